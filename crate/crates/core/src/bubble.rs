//! The limiting Liouville bubble `φ₀(r) = -ln(1+r²)` and the second-order
//! blow-up profile
//!
//! ```text
//! w₀(r) = φ₀ + 2r²/(1+r²) - φ₀²/2 + (1-r²)/(1+r²) ∫₁^{1+r²} ln t/(1-t) dt
//! ```
//!
//! The integral equals `Li₂(-r²)`. It is evaluated either through the
//! dilogarithm (series plus Landen/inversion transforms) or by adaptive
//! quadrature of the integrand; the two paths are independent.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::quad::adaptive_simpson;

const PI2_6: f64 = PI * PI / 6.0;

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        invalid(format!("radius must be a finite non-negative number, got {r}"))
    }
}

/// `φ₀(r) = -ln(1 + r²)`.
pub fn phi0(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(phi0_unchecked(r))
}

pub(crate) fn phi0_unchecked(r: f64) -> f64 {
    // + 0.0 turns -0 at the origin into +0
    -(r * r).ln_1p() + 0.0
}

/// Real dilogarithm `Li₂(z)` for `z ≤ 1`.
pub fn dilog(z: f64) -> f64 {
    if z == 1.0 {
        PI2_6
    } else if z > 0.5 {
        // reflection
        PI2_6 - z.ln() * (-z).ln_1p() - dilog_series(1.0 - z)
    } else if z >= -0.5 {
        dilog_series(z)
    } else if z >= -1.0 {
        // Landen: z/(z-1) ∈ (1/3, 1/2]
        let l = (-z).ln_1p();
        -dilog_series(z / (z - 1.0)) - 0.5 * l * l
    } else {
        // inversion
        let l = (-z).ln();
        -PI2_6 - 0.5 * l * l - dilog(1.0 / z)
    }
}

/// `Σ z^k / k²`, `|z| ≤ 1/2`.
fn dilog_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = z;
    for k in 1..200 {
        let kf = k as f64;
        let term = pow / (kf * kf);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        pow *= z;
    }
    sum
}

/// `∫₁^{1+x} ln t / (1 - t) dt = Li₂(-x)` for `x ≥ 0`.
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return invalid(format!("argument must be finite and non-negative, got {x}"));
    }
    Ok(dilog(-x))
}

/// `ln t / (1 - t)` at `t = 1 + d`, with the removable value `-1` at `d = 0`.
fn log_ratio(d: f64) -> f64 {
    if d.abs() < 1e-4 {
        -(1.0 - d / 2.0 + d * d / 3.0 - d * d * d / 4.0)
    } else {
        -d.ln_1p() / d
    }
}

/// Same integral as [`log_integral`], by adaptive quadrature.
pub fn log_integral_quadrature(x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return invalid(format!("argument must be finite and non-negative, got {x}"));
    }
    // split geometrically so each piece sees a mild integrand
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = x.min(1.0);
    while a < x {
        total += adaptive_simpson(log_ratio, a, b, 1e-15 * (b - a).max(1.0))?;
        a = b;
        b = (2.0 * b).min(x);
    }
    Ok(total)
}

fn w0_from(r: f64, li: f64) -> f64 {
    let r2 = r * r;
    let p = phi0_unchecked(r);
    p + 2.0 * r2 / (1.0 + r2) - 0.5 * p * p + (1.0 - r2) / (1.0 + r2) * li
}

/// Second-order profile `w₀(r)` through the dilogarithm.
pub fn w0(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(w0_from(r, dilog(-r * r)))
}

/// `w₀(r)` with the integral term evaluated by quadrature.
pub fn w0_quadrature(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(w0_from(r, log_integral_quadrature(r * r)?))
}
