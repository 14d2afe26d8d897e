//! Blow-up families: the scaling radius `r_ε` defined by
//! `r_ε² c² γ e^{c²} = 4`, the rescaled profiles
//!
//! ```text
//!     ψ_ε(x) = u(r_ε x)/c,   φ_ε(x) = c (u(r_ε x) - c),   w_ε = c² (φ_ε - φ₀)
//! ```
//!
//! and their distance to the bubble `φ₀` and the second-order profile `w₀`.

use std::sync::Arc;

use serde::Serialize;

use crate::bubble::{phi0_unchecked, w0};
use crate::energy::{energy_breakdown, EnergyBreakdown};
use crate::error::{invalid, Error, Result};
use crate::grid::{make_graded_grid, RadialFunction};
use crate::neumaier_sum;
use crate::parallel;
use crate::shooting::{solve_bvp_with, BvpConfig, RadialSolution};
use crate::MAX_PEAK;

/// `r_ε = 2 / (c √γ e^{c²/2})`, evaluated through its logarithm.
pub fn scaling_radius(c: f64, gamma: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
        return invalid(format!("need c > 0 and gamma > 0, got c = {c}, gamma = {gamma}"));
    }
    Ok(ln_scaling_radius(c, gamma).exp())
}

fn ln_scaling_radius(c: f64, gamma: f64) -> f64 {
    std::f64::consts::LN_2 - c.ln() - 0.5 * gamma.ln() - 0.5 * c * c
}

/// Rescaled profiles on `[0, R_cmp]`.
#[derive(Debug, Clone)]
pub struct Rescaled {
    pub phi: RadialFunction,
    pub psi: RadialFunction,
    pub w: RadialFunction,
    /// `sup |φ_ε - φ₀|`
    pub phi_err: f64,
    /// `sup |w_ε - w₀|`
    pub w_err: f64,
}

/// Samples `φ_ε`, `ψ_ε`, `w_ε` on `intervals` uniform cells of
/// `[0, r_cmp]`, interpolating the solution with cubic Hermite.
pub fn rescale(sol: &RadialSolution, r_cmp: f64, intervals: usize) -> Result<Rescaled> {
    let (c, gamma) = (sol.c(), sol.gamma());
    let r_eps = scaling_radius(c, gamma)?;
    if !(r_cmp > 0.0) || r_cmp * r_eps > sol.u.grid().outer_radius() {
        return invalid(format!(
            "comparison radius {r_cmp} outside (0, 1/r_eps = {}]",
            1.0 / r_eps
        ));
    }
    let grid = Arc::new(make_graded_grid(intervals.max(2), r_cmp, r_cmp)?);
    let n = grid.len();
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(n);
    let mut dpsi = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut dw = Vec::with_capacity(n);
    let (mut phi_err, mut w_err) = (0.0f64, 0.0f64);
    let c2 = c * c;
    for &x in grid.nodes() {
        let (u, du) = if x == 0.0 {
            (c, 0.0)
        } else {
            sol.u.interpolate(r_eps * x)?
        };
        let p = c * (u - c);
        let dp = c * r_eps * du;
        let p0 = phi0_unchecked(x);
        let dp0 = -2.0 * x / (1.0 + x * x);
        let wv = c2 * (p - p0);
        phi.push(p);
        dphi.push(dp);
        psi.push(u / c);
        dpsi.push(r_eps * du / c);
        w.push(wv);
        dw.push(c2 * (dp - dp0));
        phi_err = phi_err.max((p - p0).abs());
        w_err = w_err.max((wv - w0(x)?).abs());
    }
    Ok(Rescaled {
        phi: RadialFunction::new(Arc::clone(&grid), phi, Some(dphi))?,
        psi: RadialFunction::new(Arc::clone(&grid), psi, Some(dpsi))?,
        w: RadialFunction::new(grid, w, Some(dw))?,
        phi_err,
        w_err,
    })
}

/// `∫_{B_{R r_ε}} γ u² e^{u²} dx`, the nonlinear mass inside `R` bubble radii.
pub fn bubble_mass(sol: &RadialSolution, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return invalid("bubble radius must be positive");
    }
    let r_eps = scaling_radius(sol.c(), sol.gamma())?;
    let grid = sol.u.grid();
    let (inner, _) = grid.split_weights(radius * r_eps);
    let ln_gamma = sol.gamma().ln();
    Ok(neumaier_sum(sol.u.values().iter().zip(&inner).map(|(&u, w)| {
        let s = u * u;
        w * s * (ln_gamma + s).exp()
    })))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyConfig {
    pub bvp: BvpConfig,
    /// Comparison window for `φ_ε`, `w_ε`.
    pub r_cmp: f64,
    pub rescale_intervals: usize,
    pub beta0: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            bvp: BvpConfig::default(),
            r_cmp: 5.0,
            rescale_intervals: 500,
            beta0: 0.5,
        }
    }
}

/// Diagnostics of one member of a blow-up family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyEntry {
    pub gamma: f64,
    pub r_eps: f64,
    pub energy: EnergyBreakdown,
    pub phi_err: f64,
    pub w_err: f64,
    /// `r_ε² e^{β₀ c²}` at the configured `β₀`.
    pub lemma1_value: f64,
    /// `sup ψ_ε`, which is `ψ_ε(0) = 1` for a decreasing solution.
    pub psi_max: f64,
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRecord {
    pub c: f64,
    pub alpha: f64,
    pub entry: Result<FamilyEntry>,
}

impl FamilyRecord {
    pub fn ok(&self) -> Option<&FamilyEntry> {
        self.entry.as_ref().ok()
    }
}

fn lemma1_value(c: f64, gamma: f64, beta0: f64) -> f64 {
    (2.0 * ln_scaling_radius(c, gamma) + beta0 * c * c).exp()
}

/// Diagnostics for one solved member. For small peaks the comparison
/// window is clipped to the disc, `R_cmp ≤ 1/r_ε`.
pub fn family_entry(sol: &RadialSolution, cfg: &FamilyConfig) -> Result<FamilyEntry> {
    let (c, gamma) = (sol.c(), sol.gamma());
    let energy = energy_breakdown(sol)?;
    let r_eps = scaling_radius(c, gamma)?;
    let window = cfg.r_cmp.min((1.0 - 1e-12) * sol.u.grid().outer_radius() / r_eps);
    let resc = rescale(sol, window, cfg.rescale_intervals)?;
    let psi_max = resc
        .psi
        .values()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(FamilyEntry {
        gamma,
        r_eps,
        energy,
        phi_err: resc.phi_err,
        w_err: resc.w_err,
        lemma1_value: lemma1_value(c, gamma, cfg.beta0),
        psi_max,
        ambiguous: sol.ambiguous(),
    })
}

/// Solves one BVP per peak value. Entries are independent and run
/// through [`parallel::map`]; a failing entry carries its error and does
/// not stop the sweep. Records come back in the order of `c_list`.
pub fn build_family(c_list: &[f64], alpha: f64, cfg: &FamilyConfig) -> Result<Vec<FamilyRecord>> {
    validate_peaks(c_list)?;
    Ok(parallel::map(c_list, |&c| family_record(c, alpha, cfg)))
}

/// Same as [`build_family`] but strictly sequential.
pub fn build_family_sequential(
    c_list: &[f64],
    alpha: f64,
    cfg: &FamilyConfig,
) -> Result<Vec<FamilyRecord>> {
    validate_peaks(c_list)?;
    Ok(parallel::map_sequential(c_list, |&c| family_record(c, alpha, cfg)))
}

fn family_record(c: f64, alpha: f64, cfg: &FamilyConfig) -> FamilyRecord {
    let entry = solve_bvp_with(c, alpha, &cfg.bvp).and_then(|sol| family_entry(&sol, cfg));
    FamilyRecord { c, alpha, entry }
}

fn validate_peaks(c_list: &[f64]) -> Result<()> {
    if c_list.is_empty() {
        return invalid("empty list of peak values");
    }
    if c_list.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("peak values must be strictly increasing");
    }
    if let Some(&c) = c_list.iter().find(|&&c| !(c > 0.0 && c <= MAX_PEAK)) {
        if c > MAX_PEAK {
            return Err(Error::Range(format!("peak value {c} exceeds {MAX_PEAK}")));
        }
        return invalid(format!("peak value {c} must be positive"));
    }
    Ok(())
}

/// `r_ε² e^{β₀c²}` for one record, with the `β₀ = 1` value computed both
/// directly and from the closed form `4/(γc²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Point {
    pub c: f64,
    pub value: f64,
    pub beta1_direct: f64,
    pub beta1_closed_form: f64,
}

/// Evaluates the decay diagnostic on every successful record.
pub fn lemma1_diagnostic(records: &[FamilyRecord], beta0: f64) -> Result<Vec<Lemma1Point>> {
    if !(beta0 > 0.0 && beta0 < 1.0) {
        return invalid(format!("beta0 must lie in (0, 1), got {beta0}"));
    }
    Ok(records
        .iter()
        .filter_map(|rec| {
            let e = rec.ok()?;
            Some(Lemma1Point {
                c: rec.c,
                value: lemma1_value(rec.c, e.gamma, beta0),
                beta1_direct: lemma1_value(rec.c, e.gamma, 1.0),
                beta1_closed_form: 4.0 / (e.gamma * rec.c * rec.c),
            })
        })
        .collect())
}
