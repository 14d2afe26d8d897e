//! Subcritical extremals of Trudinger–Moser functionals on the unit disc.
//!
//! For `T = 4π - ε`, a maximiser `u*` of `∫ e^{T u²}` under `‖u‖_{1,α} = 1`
//! becomes, after `ũ = √T u*`, a solution of the shooting problem
//! `-Δũ - αũ = γ ũ e^{ũ²}` with `‖ũ‖²_{1,α} = T` and `γ = 1/λ`,
//! `λ = ∫ u*² e^{T u*²}`. The extremal is found by root-finding on the peak
//! `c̃` of `ũ`.
//!
//! The Adimurthi–Druet functional `∫ e^{T u²(1 + α‖u‖₂²)}` under
//! `‖∇u‖₂ = 1` is handled by an outer fixed point on `m = ‖u‖₂²`: for fixed
//! `m` the substitution `v = √(T(1+αm)) u` gives the shooting problem with
//! linear coefficient `ζ = α/(1+2αm)` and `‖∇v‖₂² = T(1+αm)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::energy::{energy_breakdown, EnergyBreakdown};
use crate::error::{invalid, Error, Result};
use crate::family::FamilyRecord;
use crate::green::{alpha0_threshold, GreenFunction};
use crate::grid::{disc_integral, RadialFunction};
use crate::parallel;
use crate::rootfind::{illinois, log_space, sign_changes};
use crate::shooting::{check_alpha, solve_bvp_with, BvpConfig, RadialSolution};
use crate::{LAMBDA1, MAX_PEAK};

/// `∫_{B₁} e^{a u² (1 + ad_alpha ‖u‖₂²)} dx`.
///
/// With `ad_alpha = 0` this is the plain functional `∫ e^{a u²}`, bit for
/// bit.
pub fn tm_functional(u: &RadialFunction, coef: f64, ad_alpha: f64) -> Result<f64> {
    if !coef.is_finite() || !ad_alpha.is_finite() {
        return invalid("functional coefficients must be finite");
    }
    let l2 = disc_integral(&u.map(|_, v| v * v))?;
    let factor = coef * (1.0 + ad_alpha * l2);
    let mut vals = Vec::with_capacity(u.values().len());
    for &v in u.values() {
        let x = factor * v * v;
        if x > 709.0 {
            return Err(Error::Range(format!("exponent {x} overflows binary64")));
        }
        vals.push(x.exp());
    }
    u.grid().integrate(&vals)
}

/// `∫_{B₁} (e^{u²} - 1) dx`.
pub fn energy_functional(u: &RadialFunction) -> Result<f64> {
    let vals: Vec<f64> = u.values().iter().map(|v| (v * v).exp_m1()).collect();
    u.grid().integrate(&vals)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalConfig {
    pub bvp: BvpConfig,
    /// Log-spaced peak values scanned over `[scan_min, scan_max]`.
    pub scan_points: usize,
    pub scan_min: f64,
    pub scan_max: f64,
    /// Relative tolerance on the norm constraint.
    pub tol: f64,
    /// Damping `θ` of the fixed point `m ← (1-θ)m + θ·update`.
    pub damping: f64,
    pub max_iter: usize,
    /// Tolerance on `|update - m|`.
    pub fp_tol: f64,
    /// Mesh for Green functions used by the `α₀` check.
    pub green_intervals: usize,
}

impl Default for ExtremalConfig {
    fn default() -> Self {
        ExtremalConfig {
            bvp: BvpConfig::default(),
            scan_points: 32,
            scan_min: 1e-2,
            scan_max: MAX_PEAK,
            tol: 1e-10,
            damping: 0.5,
            max_iter: 100,
            fp_tol: 1e-10,
            green_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalMode {
    /// `sup ∫ e^{(4π-ε)u²}` over `‖u‖_{1,α} ≤ 1`.
    Plain,
    /// `sup ∫ e^{(4π-ε)u²(1+α‖u‖₂²)}` over `‖∇u‖₂ ≤ 1`.
    AdimurthiDruet,
}

#[derive(Debug, Clone)]
pub struct ExtremalResult {
    pub mode: ExtremalMode,
    pub eps: f64,
    pub alpha: f64,
    /// Normalised extremal.
    pub u_star: RadialFunction,
    pub c_star: f64,
    pub functional_value: f64,
    /// `∫ u*² e^{(4π-ε)u*²}`
    pub lambda: f64,
    /// `∫ u*² e^{α_ε u*²}` with the exponent of the solved equation,
    /// `α_ε = (4π-ε)(1+α‖u*‖₂²)`. Only set in Adimurthi–Druet mode.
    pub lambda_equation: Option<f64>,
    /// Multiplier of the shooting problem solved for the scaled profile.
    pub gamma: f64,
    /// `|γλ - 1|`, or `|γλ_eq/β - 1|` in Adimurthi–Druet mode.
    pub multiplier_residual: f64,
    /// `|‖u*‖²_{1,α} - 1|`, or `|‖∇u*‖₂² - 1|` in Adimurthi–Druet mode.
    pub constraint_residual: f64,
    /// `|update - m|` at the last outer iteration.
    pub fixed_point_residual: Option<f64>,
    /// `m_k` per outer iteration.
    pub fixed_point_history: Vec<f64>,
    pub l2_sq: f64,
    /// Number of peak values satisfying the normalisation; the returned
    /// extremal is the one with the largest functional value.
    pub roots_found: usize,
}

impl ExtremalResult {
    pub fn multiple_roots(&self) -> bool {
        self.roots_found > 1
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 4.0 * PI) {
        return invalid(format!("eps must lie in (0, 4pi), got {eps}"));
    }
    Ok(())
}

/// Which energy quantity a scaled profile must match.
#[derive(Clone, Copy)]
enum Normalisation {
    /// `‖ũ‖²_{1,α}`
    AlphaNorm,
    /// `‖∇v‖₂²`
    Gradient,
}

impl Normalisation {
    fn of(self, e: &EnergyBreakdown) -> f64 {
        match self {
            Normalisation::AlphaNorm => e.norm1a_sq,
            Normalisation::Gradient => e.grad_sq,
        }
    }
}

struct Scaled {
    sol: RadialSolution,
    energy: EnergyBreakdown,
}

fn scaled_solution(peak: f64, alpha: f64, cfg: &ExtremalConfig) -> Result<Scaled> {
    let sol = solve_bvp_with(peak, alpha, &cfg.bvp)?;
    let energy = energy_breakdown(&sol)?;
    Ok(Scaled { sol, energy })
}

/// All peaks `p` with `norm(v_p) = target`, where `v_p` solves the
/// shooting problem with linear coefficient `alpha`. The scan includes the
/// limit `p → 0`, where the norm vanishes.
fn peaks_for_target(
    alpha: f64,
    target: f64,
    norm: Normalisation,
    cfg: &ExtremalConfig,
) -> Result<Vec<Scaled>> {
    let scan = log_space(cfg.scan_min, cfg.scan_max, cfg.scan_points.max(2));
    let vals = parallel::map(&scan, |&p| {
        scaled_solution(p, alpha, cfg).map(|s| norm.of(&s.energy) - target)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    let mut peaks = vec![0.0];
    peaks.extend_from_slice(&scan);
    let mut f = vec![-target];
    f.extend_from_slice(&vals);

    let changes = sign_changes(&f);
    if changes.is_empty() {
        return Err(Error::NotFound(format!(
            "no peak in (0, {}] meets the normalisation {target}",
            cfg.scan_max
        )));
    }
    let mut roots = Vec::with_capacity(changes.len());
    for i in changes {
        let (a, b) = (peaks[i], peaks[i + 1]);
        let eval = |p: f64| scaled_solution(p, alpha, cfg).map(|s| norm.of(&s.energy) - target);
        let (p, _) = illinois(
            eval,
            a,
            f[i],
            b,
            f[i + 1],
            1e-14 * b,
            cfg.tol * target,
            200,
        )?;
        roots.push(scaled_solution(p, alpha, cfg)?);
    }
    Ok(roots)
}

/// Maximiser of `∫ e^{(4π-ε)u²}` under `‖u‖_{1,α} = 1`.
pub fn subcritical_extremal(alpha: f64, eps: f64, cfg: &ExtremalConfig) -> Result<ExtremalResult> {
    check_alpha(alpha)?;
    check_eps(eps)?;
    let target = 4.0 * PI - eps;
    let roots = peaks_for_target(alpha, target, Normalisation::AlphaNorm, cfg)?;
    let roots_found = roots.len();
    let scale = target.sqrt().recip();
    let mut best: Option<(f64, Scaled, RadialFunction)> = None;
    for s in roots {
        let u_star = s.sol.u.scaled(scale);
        let value = tm_functional(&u_star, target, 0.0)?;
        if best.as_ref().map_or(true, |b| value > b.0) {
            best = Some((value, s, u_star));
        }
    }
    let (functional_value, s, u_star) = best.expect("at least one root");
    let lambda = weighted_mass(&u_star, target)?;
    let gamma = s.sol.gamma();
    Ok(ExtremalResult {
        mode: ExtremalMode::Plain,
        eps,
        alpha,
        c_star: s.sol.c() * scale,
        functional_value,
        lambda,
        lambda_equation: None,
        gamma,
        multiplier_residual: (gamma * lambda - 1.0).abs(),
        constraint_residual: (s.energy.norm1a_sq / target - 1.0).abs(),
        fixed_point_residual: None,
        fixed_point_history: Vec::new(),
        l2_sq: s.energy.l2_sq / target,
        roots_found,
        u_star,
    })
}

/// `∫ u² e^{a u²}`
fn weighted_mass(u: &RadialFunction, a: f64) -> Result<f64> {
    let vals: Vec<f64> = u
        .values()
        .iter()
        .map(|v| {
            let s = v * v;
            s * (a * s).exp()
        })
        .collect();
    u.grid().integrate(&vals)
}

/// Maximiser of `∫ e^{(4π-ε)u²(1+α‖u‖₂²)}` under `‖∇u‖₂ = 1`, for
/// `0 ≤ α ≤ α₀`.
pub fn ad_extremal(alpha: f64, eps: f64, cfg: &ExtremalConfig) -> Result<ExtremalResult> {
    check_eps(eps)?;
    if !(alpha >= 0.0) || alpha >= LAMBDA1 {
        return invalid(format!("alpha must lie in [0, alpha_0], got {alpha}"));
    }
    if alpha > 0.0 {
        let a0 = alpha0_threshold(cfg.green_intervals, 1e-8)?;
        if alpha > a0 {
            return invalid(format!("alpha = {alpha} exceeds alpha_0 = {a0}"));
        }
    }
    if !(cfg.damping > 0.0 && cfg.damping <= 1.0) {
        return invalid("damping must lie in (0, 1]");
    }
    let t = 4.0 * PI - eps;
    let mut m = 0.0;
    let mut history = Vec::new();
    let mut prev: Option<AdStep> = None;
    for _ in 0..cfg.max_iter {
        history.push(m);
        let step = match prev {
            // at alpha = 0 the inner problem does not depend on m
            Some(p) if p.m_independent => p,
            _ => ad_step(alpha, t, m, prev.as_ref().map(|p| p.best.sol.c()), cfg)?,
        };
        let residual = (step.update - m).abs();
        if residual <= cfg.fp_tol {
            return ad_result(alpha, eps, m, step, residual, history);
        }
        m = (1.0 - cfg.damping) * m + cfg.damping * step.update;
        prev = Some(step);
    }
    Err(Error::Convergence { history })
}

struct AdStep {
    best: Scaled,
    m_independent: bool,
    roots_found: usize,
    a_eff: f64,
    update: f64,
}

/// One evaluation of the outer map at `m`. Several admissible peaks are
/// resolved by continuity with `prev_peak` when given, otherwise by the
/// largest functional value, so the iteration stays on one branch.
fn ad_step(
    alpha: f64,
    t: f64,
    m: f64,
    prev_peak: Option<f64>,
    cfg: &ExtremalConfig,
) -> Result<AdStep> {
    let a_eff = t * (1.0 + alpha * m);
    let zeta = alpha / (1.0 + 2.0 * alpha * m);
    let roots = peaks_for_target(zeta, a_eff, Normalisation::Gradient, cfg)?;
    let roots_found = roots.len();
    let mut best: Option<(f64, Scaled)> = None;
    for s in roots {
        // higher score wins
        let score = match prev_peak {
            Some(p) => -(s.sol.c() - p).abs(),
            None => tm_functional(&s.sol.u, 1.0, 0.0)?,
        };
        if best.as_ref().map_or(true, |b| score > b.0) {
            best = Some((score, s));
        }
    }
    let (_, best) = best.expect("at least one root");
    let update = best.energy.l2_sq / a_eff;
    Ok(AdStep {
        best,
        m_independent: alpha == 0.0,
        roots_found,
        a_eff,
        update,
    })
}

/// The outer map `m ↦ ‖u_m‖₂²` whose fixed point gives the
/// Adimurthi–Druet extremal.
pub fn ad_fixed_point_map(alpha: f64, eps: f64, m: f64, cfg: &ExtremalConfig) -> Result<f64> {
    check_eps(eps)?;
    check_alpha(alpha)?;
    if !(m >= 0.0 && m.is_finite()) {
        return invalid(format!("m must be non-negative, got {m}"));
    }
    Ok(ad_step(alpha, 4.0 * PI - eps, m, None, cfg)?.update)
}

fn ad_result(
    alpha: f64,
    eps: f64,
    m: f64,
    step: AdStep,
    residual: f64,
    history: Vec<f64>,
) -> Result<ExtremalResult> {
    let t = 4.0 * PI - eps;
    let AdStep {
        best: s,
        roots_found,
        a_eff,
        ..
    } = step;
    let u_star = s.sol.u.scaled(a_eff.sqrt().recip());
    let l2_sq = disc_integral(&u_star.map(|_, v| v * v))?;
    let functional_value = tm_functional(&u_star, t, alpha)?;
    let lambda = weighted_mass(&u_star, t)?;
    let lambda_eq = weighted_mass(&u_star, a_eff)?;
    let beta = (1.0 + alpha * m) / (1.0 + 2.0 * alpha * m);
    let gamma = s.sol.gamma();
    Ok(ExtremalResult {
        mode: ExtremalMode::AdimurthiDruet,
        eps,
        alpha,
        c_star: s.sol.c() / a_eff.sqrt(),
        functional_value,
        lambda,
        lambda_equation: Some(lambda_eq),
        gamma,
        multiplier_residual: (gamma * lambda_eq / beta - 1.0).abs(),
        constraint_residual: (s.energy.grad_sq / a_eff - 1.0).abs(),
        fixed_point_residual: Some(residual),
        fixed_point_history: history,
        l2_sq,
        roots_found,
        u_star,
    })
}

/// `c²‖u‖₂²` for each record after normalising `‖∇u‖₂ = 1`, i.e.
/// `c²‖u‖₂² / ‖∇u‖₂⁴` in the shooting normalisation. Tends to `‖G_α‖₂²`
/// along a blow-up family. Failed records give `NaN`.
pub fn cu_diagnostic(records: &[FamilyRecord], green: &GreenFunction) -> Result<Vec<f64>> {
    if let Some(r) = records.iter().find(|r| r.alpha != green.alpha) {
        return invalid(format!(
            "record at alpha = {} does not match the Green function at alpha = {}",
            r.alpha, green.alpha
        ));
    }
    Ok(records
        .iter()
        .map(|r| match r.ok() {
            Some(e) => r.c * r.c * e.energy.l2_sq / (e.energy.grad_sq * e.energy.grad_sq),
            None => f64::NAN,
        })
        .collect())
}
