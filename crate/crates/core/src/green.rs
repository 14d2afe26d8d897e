//! Radial Green function of `-Δ - α` on the unit disc with pole at the
//! origin, `-ΔG_α = δ₀ + αG_α`, `G_α(1) = 0`.
//!
//! The singular part is removed analytically: `G_α = -ln r/(2π) + H` with
//! `H'' + H'/r + αH = (α/2π) ln r`, `H` bounded at 0 and `H(1) = 0`. `H` is
//! computed by a second-order finite-volume scheme on a uniform mesh.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::grid::{make_graded_grid, RadialFunction};
use crate::parallel;
use crate::LAMBDA1;

#[derive(Debug, Clone)]
pub struct GreenFunction {
    pub alpha: f64,
    /// `H = G_α + ln r/(2π)`
    pub regular_part: RadialFunction,
    /// `‖G_α‖₂²`
    pub l2_sq: f64,
}

impl GreenFunction {
    /// `G_α(r)` for `0 < r ≤ 1`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return invalid("the Green function is singular at r = 0");
        }
        let (h, _) = self.regular_part.interpolate(r)?;
        Ok(-r.ln() / (2.0 * PI) + h)
    }
}

/// `∫ r ln r dr` antiderivative, vanishing at 0.
fn r_log_r(r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        0.5 * r * r * (r.ln() - 0.5)
    }
}

/// Solves for `G_α` on `intervals` uniform cells.
pub fn green_function(alpha: f64, intervals: usize) -> Result<GreenFunction> {
    if !(alpha >= 0.0) || alpha >= LAMBDA1 {
        return invalid(format!(
            "alpha must lie in [0, lambda_1 = {LAMBDA1}), got {alpha}"
        ));
    }
    let n = intervals.max(4);
    let grid = Arc::new(make_graded_grid(n, 1.0, 1.0)?);
    let h = 1.0 / n as f64;
    let src = alpha / (2.0 * PI);

    // tridiagonal rows i = 0..n-1; H_n = 0
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let half = 0.5 * h;
    diag[0] = -half / h + alpha * h * h / 8.0;
    upper[0] = half / h;
    rhs[0] = src * r_log_r(half);
    for i in 1..n {
        let r = i as f64 * h;
        let (rm, rp) = (r - half, r + half);
        lower[i] = rm / h;
        diag[i] = -(rm + rp) / h + alpha * r * h;
        upper[i] = rp / h;
        rhs[i] = src * (r_log_r(rp) - r_log_r(rm));
    }
    let mut sol = thomas(&lower, &diag, &upper, &rhs)?;
    sol.push(0.0);

    let weights = grid.weights();
    let log_w = grid.log_weights();
    let cross: f64 = log_w.iter().zip(&sol).map(|(w, v)| w * v).sum::<f64>();
    let reg: f64 = weights.iter().zip(&sol).map(|(w, v)| w * v * v).sum::<f64>();
    let l2_sq = 1.0 / (8.0 * PI) - cross / PI + reg;

    // H' by differences; one-sided at the ends, zero at the centre
    let mut deriv = vec![0.0; n + 1];
    for i in 1..n {
        deriv[i] = (sol[i + 1] - sol[i - 1]) / (2.0 * h);
    }
    deriv[n] = (3.0 * sol[n] - 4.0 * sol[n - 1] + sol[n - 2]) / (2.0 * h);

    Ok(GreenFunction {
        alpha,
        regular_part: RadialFunction::new(grid, sol, Some(deriv))?,
        l2_sq,
    })
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 {
        return Err(Error::Range("singular Green-function system".into()));
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv == 0.0 {
            return Err(Error::Range("singular Green-function system".into()));
        }
        c[i] = upper[i] / piv;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

/// Threshold `α²‖G_α‖₂⁴ ≤ 1/(8π)`, i.e. `α‖G_α‖₂² ≤ (8π)^{-1/2}`.
fn below_threshold(alpha: f64, intervals: usize) -> Result<bool> {
    let g = green_function(alpha, intervals)?;
    Ok(alpha * g.l2_sq <= (8.0 * PI).sqrt().recip())
}

/// Largest `α ∈ [0, λ₁)` with `α²‖G_α‖₂⁴ ≤ 1/(8π)`.
///
/// The predicate is sampled at 32 points of `[0, λ₁)` first; if it is not
/// of the form true…true false…false the result is ambiguous and an error
/// is returned. The switch point is then bisected to width `tol`.
pub fn alpha0_threshold(intervals: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let samples: Vec<f64> = (0..32).map(|k| LAMBDA1 * k as f64 / 32.0).collect();
    let flags = parallel::map(&samples, |&a| below_threshold(a, intervals))
        .into_iter()
        .collect::<Result<Vec<bool>>>()?;
    let switch = flags.iter().position(|&f| !f);
    if flags.iter().skip(switch.unwrap_or(flags.len())).any(|&f| f) {
        return Err(Error::Ambiguity(
            "threshold predicate is not monotone on the sample points".into(),
        ));
    }
    let (mut lo, mut hi) = match switch {
        Some(0) => return Err(Error::Ambiguity("predicate fails at alpha = 0".into())),
        Some(k) => (samples[k - 1], samples[k]),
        None => (samples[31], LAMBDA1 * (1.0 - 1e-12)),
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if below_threshold(mid, intervals)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_is_pure_log() {
        let g = green_function(0.0, 200).unwrap();
        assert!(g.regular_part.values().iter().all(|&h| h == 0.0));
        assert!((g.l2_sq - 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert!((g.value(0.5).unwrap() - 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn resonance_is_rejected() {
        assert!(green_function(LAMBDA1, 100).is_err());
        assert!(green_function(-0.1, 100).is_err());
    }

    #[test]
    fn boundary_value_vanishes() {
        for a in [0.5, 2.0, 4.0] {
            let g = green_function(a, 400).unwrap();
            assert_eq!(*g.regular_part.values().last().unwrap(), 0.0);
            assert!(g.value(1.0).unwrap().abs() < 1e-15);
        }
    }
}
