use std::f64::consts::PI;

use tmlab::green::{alpha0_threshold, green_function};
use tmlab::LAMBDA1;

#[test]
fn log_green_function_norm() {
    let g = green_function(0.0, 1000).unwrap();
    assert!((g.l2_sq - 1.0 / (8.0 * PI)).abs() < 1e-6);
    assert!((g.l2_sq - 1.0 / (8.0 * PI)).abs() < 1e-12);
}

#[test]
fn self_convergence_under_grid_doubling() {
    for alpha in [1.0, 3.0, 5.0] {
        let a = green_function(alpha, 2000).unwrap();
        let b = green_function(alpha, 4000).unwrap();
        assert!((a.l2_sq - b.l2_sq).abs() < 1e-5 * b.l2_sq, "alpha={alpha}");
        for r in [0.1, 0.5, 0.9] {
            assert!((a.value(r).unwrap() - b.value(r).unwrap()).abs() < 1e-6);
        }
    }
}

#[test]
fn regular_part_solves_its_equation() {
    // -H'' - H'/r - αH = -α ln r / (2π), by central differences of the
    // interpolated regular part
    let alpha = 2.0;
    let g = green_function(alpha, 8000).unwrap();
    let h = 1e-2;
    let hv = |r: f64| g.regular_part.interpolate(r).unwrap().0;
    for r in [0.2, 0.5, 0.8] {
        let (m, c, p) = (hv(r - h), hv(r), hv(r + h));
        let lap = (p - 2.0 * c + m) / (h * h) + (p - m) / (2.0 * h * r);
        let resid = -lap - alpha * c + alpha * r.ln() / (2.0 * PI);
        assert!(resid.abs() < 1e-4, "r={r}: {resid}");
    }
}

#[test]
fn norm_grows_with_alpha() {
    let l: Vec<f64> = [0.0, 1.0, 2.0, 4.0, 5.5]
        .iter()
        .map(|&a| green_function(a, 2000).unwrap().l2_sq)
        .collect();
    assert!(l.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn threshold_is_interior_and_stable() {
    let a = alpha0_threshold(2000, 1e-8).unwrap();
    let b = alpha0_threshold(4000, 1e-8).unwrap();
    assert!(a > 0.0 && a < LAMBDA1);
    assert!((a - b).abs() < 1e-4, "{a} {b}");
    let g = green_function(b, 4000).unwrap();
    assert!((b * g.l2_sq - (8.0 * PI).sqrt().recip()).abs() < 1e-6);
    assert!(alpha0_threshold(2000, 0.0).is_err());
}
