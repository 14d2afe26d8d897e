mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use tmlab::grid::{disc_integral, make_graded_grid, RadialFunction, RadialGrid};

fn bubble_density(r: f64) -> f64 {
    4.0 / (1.0 + r * r).powi(2)
}

#[test]
fn bubble_mass_on_truncated_discs() {
    for radius in [1.0, 10.0, 100.0] {
        let g = Arc::new(make_graded_grid(4000, 1.0f64.min(radius), radius).unwrap());
        let f = RadialFunction::from_fn(g, bubble_density, None);
        let got = disc_integral(&f).unwrap();
        let want = 4.0 * PI * radius * radius / (1.0 + radius * radius);
        assert!((got / want - 1.0).abs() < 1e-8, "R={radius}: {got}");
        let oracle = common::disc_integral(bubble_density, radius, 0.1);
        assert!((oracle / want - 1.0).abs() < 1e-10);
    }
}

#[test]
fn concentrated_gaussian() {
    // ∫ e^{-(r/δ)²} dx = πδ²(1 - e^{-1/δ²})
    for delta in [1e-2, 1e-4, 1e-6] {
        let g = Arc::new(make_graded_grid(6000, delta, 1.0).unwrap());
        let f = RadialFunction::from_fn(g, |r| (-(r / delta).powi(2)).exp(), None);
        let want = PI * delta * delta;
        assert!((disc_integral(&f).unwrap() / want - 1.0).abs() < 1e-8, "{delta}");
    }
}

#[test]
fn split_and_log_rules_against_simpson() {
    let g = make_graded_grid(3000, 1e-3, 1.0).unwrap();
    let f = |r: f64| (1.0 - r * r) * (-3.0 * r).exp();
    let vals: Vec<f64> = g.nodes().iter().map(|&r| f(r)).collect();
    let (inner, outer) = g.split_weights(0.37);
    let dot = |w: &[f64]| w.iter().zip(&vals).map(|(a, b)| a * b).sum::<f64>();
    let want_in = common::simpson(|r| 2.0 * PI * r * f(r), 0.0, 0.37, 20000);
    let want_out = common::simpson(|r| 2.0 * PI * r * f(r), 0.37, 1.0, 20000);
    // the cut falls inside a panel, where the rule is only third order
    assert!((dot(&inner) - want_in).abs() < 1e-8, "{}", dot(&inner) - want_in);
    assert!((dot(&outer) - want_out).abs() < 1e-8, "{}", dot(&outer) - want_out);
    let full = g.integrate(&vals).unwrap();
    assert!((dot(&inner) + dot(&outer) - full).abs() < 1e-14);
    assert!((full - want_in - want_out).abs() < 1e-10, "{}", full - want_in - want_out);
    let lw = g.log_weights();
    let mut want_log = 0.0;
    let mut b = 1.0;
    while b > 1e-14 {
        want_log += common::simpson(|r| 2.0 * PI * r * r.ln() * f(r), 0.5 * b, b, 400);
        b *= 0.5;
    }
    assert!((dot(&lw) - want_log).abs() < 1e-9, "{} vs {want_log}", dot(&lw));
}

#[test]
fn custom_nodes_with_a_kink_on_a_node() {
    // integrand with a kink at δ; a node on δ keeps the rule accurate
    let delta = 0.3;
    let mut nodes: Vec<f64> = (0..=300).map(|i| delta * i as f64 / 300.0).collect();
    nodes.extend((1..=700).map(|i| delta + (1.0 - delta) * i as f64 / 700.0));
    let g = Arc::new(RadialGrid::from_nodes(nodes).unwrap());
    let profile = |r: f64| if r <= delta { 1.0 } else { (1.0 - r) / (1.0 - delta) };
    let f = RadialFunction::from_fn(g, |r| profile(r).powi(2), None);
    let want = common::simpson(|r| 2.0 * PI * r * profile(r).powi(2), 0.0, delta, 2000)
        + common::simpson(|r| 2.0 * PI * r * profile(r).powi(2), delta, 1.0, 2000);
    assert!((disc_integral(&f).unwrap() / want - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn weights_sum_to_disc_area(n in 2usize..2000, ratio in 0.0f64..12.0, r_max in 0.1f64..50.0) {
        let r_cluster = r_max * (-ratio).exp();
        let g = make_graded_grid(n, r_cluster, r_max).unwrap();
        let s: f64 = g.weights().iter().sum();
        let area = PI * r_max * r_max;
        prop_assert!((s - area).abs() <= 1e-12 * area);
        prop_assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(g.nodes()[0], 0.0);
        prop_assert_eq!(*g.nodes().last().unwrap(), r_max);
    }

    #[test]
    fn integration_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, n in 4usize..500) {
        let g = Arc::new(make_graded_grid(n, 0.05, 1.0).unwrap());
        let f: Vec<f64> = g.nodes().iter().map(|r| (3.0 * r).sin()).collect();
        let h: Vec<f64> = g.nodes().iter().map(|r| 1.0 / (1.0 + r)).collect();
        let comb: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let lhs = g.integrate(&comb).unwrap();
        let rhs = a * g.integrate(&f).unwrap() + b * g.integrate(&h).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()));
    }

    #[test]
    fn quadratics_are_exact(c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, n in 2usize..300) {
        let g = make_graded_grid(n, 0.01, 2.0).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|r| c0 + c1 * r + c2 * r * r).collect();
        // ∫₀² (c0 + c1 r + c2 r²) 2πr dr
        let want = 2.0 * PI * (2.0 * c0 + 8.0 / 3.0 * c1 + 4.0 * c2);
        prop_assert!((g.integrate(&v).unwrap() - want).abs() <= 1e-11 * (1.0 + want.abs()));
    }
}
