//! Reference computations that share no code with the library.

#![allow(dead_code)]

/// `J₀(x)` from its power series; accurate to rounding for `x < 8`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First positive zero of `J₀` by bisection on `[2, 3]`.
pub fn j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫₀ˣ ln(1+t)/t dt = -Li₂(-x)`, by Simpson on `[0, min(x,1)]` and on
/// doubling pieces beyond.
pub fn neg_dilog_neg(x: f64) -> f64 {
    let f = |t: f64| if t == 0.0 { 1.0 } else { t.ln_1p() / t };
    let mut total = simpson(f, 0.0, x.min(1.0), 4000);
    let mut a = 1.0;
    while a < x {
        let b = (2.0 * a).min(x);
        total += simpson(f, a, b, 4000);
        a = b;
    }
    total
}

/// `∫₀^R f(r) 2πr dr` with Simpson on geometric pieces, for integrands
/// concentrated near the origin.
pub fn disc_integral(f: impl Fn(f64) -> f64, r_max: f64, r_small: f64) -> f64 {
    let g = |r: f64| 2.0 * std::f64::consts::PI * r * f(r);
    let mut total = simpson(&g, 0.0, r_small.min(r_max), 2000);
    let mut a = r_small;
    while a < r_max {
        let b = (2.0 * a).min(r_max);
        total += simpson(&g, a, b, 2000);
        a = b;
    }
    total
}
