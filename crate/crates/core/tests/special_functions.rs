mod common;

use std::f64::consts::PI;

use tmlab::bubble::{dilog, log_integral, log_integral_quadrature, phi0, w0, w0_quadrature};
use tmlab::{J0_FIRST_ZERO, LAMBDA1};

#[test]
fn bessel_zero_constant_matches_series_root() {
    let j = common::j0_first_zero();
    assert!((J0_FIRST_ZERO - j).abs() < 1e-14, "{j}");
    assert!((LAMBDA1 - j * j).abs() < 1e-13);
    assert!((LAMBDA1 - 5.783_185_962_946_784).abs() < 1e-12);
}

#[test]
fn dilogarithm_against_quadrature() {
    for x in [1e-6, 0.1, 0.5, 0.9, 1.0, 1.7, 3.0, 10.0, 77.0, 400.0] {
        let want = -common::neg_dilog_neg(x);
        let got = dilog(-x);
        assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0), "x={x}: {got} vs {want}");
        assert_eq!(log_integral(x).unwrap(), got);
    }
}

#[test]
fn dilogarithm_positive_arguments() {
    // Σ zᵏ/k² summed directly, well inside the disc of convergence
    for z in [0.2, 0.45, 0.6, 0.8] {
        let series: f64 = (1..400).map(|k| (z as f64).powi(k) / (k * k) as f64).sum();
        assert!((dilog(z) - series).abs() < 1e-14, "z={z}");
    }
    assert!((dilog(1.0) - PI * PI / 6.0).abs() < 1e-15);
}

#[test]
fn log_integral_routes_agree() {
    for k in 0..=200 {
        let x = 400.0 * (k as f64 / 200.0).powi(2);
        let a = log_integral(x).unwrap();
        let b = log_integral_quadrature(x).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "x={x}");
    }
}

#[test]
fn second_order_profile_routes_agree_on_twenty() {
    for k in 0..=400 {
        let r = 20.0 * k as f64 / 400.0;
        let a = w0(r).unwrap();
        let b = w0_quadrature(r).unwrap();
        assert!((a - b).abs() <= 1e-10, "r={r}: {a} vs {b}");
    }
}

#[test]
fn second_order_profile_solves_linearised_equation() {
    // -w'' - w'/r = 4 e^{2φ₀} (2w + φ₀ + φ₀²), checked by central differences
    let h = 1e-3;
    for r in [0.3, 0.7, 1.0, 2.0, 4.5, 9.0] {
        let (wm, w, wp) = (w0(r - h).unwrap(), w0(r).unwrap(), w0(r + h).unwrap());
        let lap = (wp - 2.0 * w + wm) / (h * h) + (wp - wm) / (2.0 * h * r);
        let p = phi0(r).unwrap();
        let rhs = 4.0 * (2.0 * p).exp() * (2.0 * w + p + p * p);
        assert!((-lap - rhs).abs() < 1e-5, "r={r}: {} vs {rhs}", -lap);
    }
}

#[test]
fn profile_values() {
    assert_eq!(w0(0.0).unwrap(), 0.0);
    let l2 = 2f64.ln();
    assert!((w0(1.0).unwrap() - (1.0 - l2 - 0.5 * l2 * l2)).abs() <= 1e-12);
    assert_eq!(phi0(0.0).unwrap().to_bits(), 0f64.to_bits());
    assert!((phi0(1.0).unwrap() + l2).abs() < 1e-16);
    assert!(phi0(-1.0).is_err());
    assert!(w0(f64::NAN).is_err());
}
