//! Radial solutions of `-Δu - αu = γ u e^{u²}` on the unit disc.
//!
//! The radial equation `u'' + u'/r + αu + γ u e^{u²} = 0` is integrated in
//! the logarithmic radius `s = ln r` with state `(u - c, r u')`:
//!
//! ```text
//!     d(u-c)/ds = r u'
//!     d(r u')/ds = -e^{2s} (α u + γ u e^{u²})
//! ```
//!
//! which removes the coordinate singularity and lets the adaptive step
//! follow the concentration scale, which shrinks like `e^{-c²/2}`. The
//! factor `γ e^{2s + u²}` is evaluated as a single exponential so nothing
//! overflows before `c² ≈ 700`.
//!
//! Integration starts at `r₀ = 10⁻⁸ ℓ`, `ℓ = |α + γe^{c²}|^{-1/2}`, from the
//! Taylor seed `u = c - (αc + γc e^{c²}) r²/4`.

use std::sync::Arc;

use serde::Serialize;

use crate::energy::energy_breakdown;
use crate::error::{invalid, Error, Result};
use crate::family::scaling_radius;
use crate::grid::{make_graded_grid, RadialFunction, RadialGrid};
use crate::ode::{Controls, Dopri5};
use crate::rootfind::log_space;
use crate::{LAMBDA1, MAX_PEAK};

/// Parameters of the radial initial-value problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeParams {
    /// Peak value `u(0)`.
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl OdeParams {
    pub fn new(c: f64, alpha: f64, gamma: f64) -> Result<Self> {
        check_peak(c)?;
        check_alpha(alpha)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return invalid(format!("gamma must be positive and finite, got {gamma}"));
        }
        Ok(OdeParams { c, alpha, gamma })
    }

    /// `u''(0) = -(αc + γc e^{c²}) / 2`, forced by the equation at the origin.
    pub fn center_curvature(&self) -> f64 {
        -0.5 * self.c * self.center_q()
    }

    /// `α + γ e^{c²}`
    fn center_q(&self) -> f64 {
        self.alpha + (self.gamma.ln() + self.c * self.c).exp()
    }

    /// Length over which the solution leaves its peak.
    pub fn inner_scale(&self) -> f64 {
        let q = self.center_q().abs();
        if q > 0.0 {
            q.powf(-0.5)
        } else {
            1.0
        }
    }
}

pub(crate) fn check_peak(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return invalid(format!("peak value must be positive, got {c}"));
    }
    if c > MAX_PEAK {
        return Err(Error::Range(format!(
            "peak value {c} exceeds {MAX_PEAK}: e^(c^2) leaves binary64 range"
        )));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha >= LAMBDA1 {
        return invalid(format!(
            "alpha must be finite and below lambda_1 = {LAMBDA1}, got {alpha}"
        ));
    }
    Ok(())
}

/// Integrator settings for the radial problem. `atol` is relative to the
/// peak value `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpControls {
    pub rtol: f64,
    pub atol: f64,
    /// Number of output intervals for sampled profiles.
    pub output_intervals: usize,
}

impl Default for IvpControls {
    fn default() -> Self {
        IvpControls {
            rtol: 1e-12,
            atol: 1e-13,
            output_intervals: 2000,
        }
    }
}

/// Trajectory returned by [`integrate_ivp`].
#[derive(Debug, Clone)]
pub struct IvpResult {
    /// Profile from `r = 0` to the stop radius or the first zero.
    pub profile: RadialFunction,
    pub first_zero: Option<f64>,
}

/// A solved boundary-value problem.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub params: OdeParams,
    /// `u` and `u'` on a grid of `[0, 1]` graded at the scaling radius.
    pub u: RadialFunction,
    pub boundary_residual: f64,
    pub monotone: bool,
    /// `|‖u‖²_{1,α} - ∫γu²e^{u²}| / ∫γu²e^{u²}` on the solution grid.
    pub energy_identity_residual: f64,
    /// Other multipliers for which the same peak also gives a positive
    /// solution. Empty unless the shooting scan found several brackets.
    pub alternate_gammas: Vec<f64>,
}

impl RadialSolution {
    pub fn c(&self) -> f64 {
        self.params.c
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn ambiguous(&self) -> bool {
        !self.alternate_gammas.is_empty()
    }
}

/// Where a shot ended.
#[derive(Debug, Clone, Copy)]
struct Endpoint {
    /// First zero of `u`, as a log-radius.
    zero: Option<f64>,
    /// `u` at the end of the integration interval.
    u_end: f64,
}

struct Shooter {
    c: f64,
    alpha: f64,
    controls: IvpControls,
}

impl Shooter {
    fn ode(&self, ln_gamma: f64) -> Dopri5<impl Fn(f64, &[f64; 2]) -> [f64; 2], 2> {
        let (c, alpha) = (self.c, self.alpha);
        let rhs = move |s: f64, y: &[f64; 2]| {
            let u = c + y[0];
            let e2s = (2.0 * s).exp();
            let nl = u * (ln_gamma + 2.0 * s + u * u).exp();
            [y[1], -(alpha * e2s * u + nl)]
        };
        let ctl = Controls {
            rtol: self.controls.rtol,
            atol: self.controls.atol * c,
            h_init: 1e-2,
            h_max: 0.25,
            ..Controls::default()
        };
        Dopri5::new(rhs, ctl)
    }

    fn params(&self, ln_gamma: f64) -> OdeParams {
        OdeParams {
            c: self.c,
            alpha: self.alpha,
            gamma: ln_gamma.exp(),
        }
    }

    /// Taylor seed `(u - c, r u')` at radius `r`.
    fn seed_at(&self, ln_gamma: f64, r: f64) -> [f64; 2] {
        let q = self.params(ln_gamma).center_q();
        let k = self.c * q * r * r;
        [-0.25 * k, -0.5 * k]
    }

    fn start(&self, ln_gamma: f64) -> f64 {
        (1e-8 * self.params(ln_gamma).inner_scale()).ln()
    }

    /// Shoots to log-radius `s_end`. With `through_zero` the integration
    /// continues past the first zero.
    fn shoot(&self, ln_gamma: f64, s_end: f64, through_zero: bool) -> Result<Endpoint> {
        let s0 = self.start(ln_gamma).min(s_end - 1.0);
        let y0 = self.seed_at(ln_gamma, s0.exp());
        let ode = self.ode(ln_gamma);
        let c = self.c;
        let g = move |y: &[f64; 2]| c + y[0];
        let out = ode.integrate(s0, y0, s_end, &[], Some(&g))?;
        if !out.event {
            return Ok(Endpoint {
                zero: None,
                u_end: c + out.y[0],
            });
        }
        let zero = Some(out.t);
        if !through_zero || out.t >= s_end {
            return Ok(Endpoint {
                zero,
                u_end: c + out.y[0],
            });
        }
        let rest = ode.integrate(out.t, out.y, s_end, &[], None)?;
        Ok(Endpoint {
            zero,
            u_end: c + rest.y[0],
        })
    }

    /// Samples `(u, u')` at the nodes of `grid` after mapping radius
    /// `r ↦ scale·r`, stopping at the first zero. Returns values, slopes
    /// with respect to the unscaled radius, and the first zero (unscaled).
    fn sample(
        &self,
        ln_gamma: f64,
        grid: &RadialGrid,
        scale: f64,
    ) -> Result<(Vec<f64>, Vec<f64>, Option<(f64, f64)>)> {
        let nodes = grid.nodes();
        let s_end = (scale * grid.outer_radius()).ln();
        let s0 = self.start(ln_gamma).min(s_end - 1.0);
        let r0 = s0.exp();
        let mut values = Vec::with_capacity(nodes.len());
        let mut derivs = Vec::with_capacity(nodes.len());
        let mut outputs = Vec::with_capacity(nodes.len());
        for &r in nodes {
            let rho = scale * r;
            if rho <= r0 {
                let y = self.seed_at(ln_gamma, rho);
                values.push(self.c + y[0]);
                derivs.push(if r > 0.0 { y[1] / r } else { 0.0 });
            } else {
                outputs.push(rho.ln());
            }
        }
        let first_out = values.len();
        let y0 = self.seed_at(ln_gamma, r0);
        let ode = self.ode(ln_gamma);
        let c = self.c;
        let g = move |y: &[f64; 2]| c + y[0];
        let out = ode.integrate(s0, y0, s_end, &outputs, Some(&g))?;
        for (k, y) in out.samples.iter().enumerate() {
            let r = nodes[first_out + k];
            values.push(c + y[0]);
            derivs.push(y[1] / r);
        }
        // zero radius and u' there, in the unscaled variable
        let zero = out.event.then(|| {
            let rz = out.t.exp() / scale;
            (rz, out.y[1] / rz)
        });
        Ok((values, derivs, zero))
    }
}

/// Integrates the radial IVP with multiplier `params.gamma` from the origin
/// to `stop_radius` or to the first zero of `u`, whichever comes first.
pub fn integrate_ivp(
    params: &OdeParams,
    stop_radius: f64,
    controls: &IvpControls,
) -> Result<IvpResult> {
    let params = OdeParams::new(params.c, params.alpha, params.gamma)?;
    if !(stop_radius > 0.0 && stop_radius.is_finite()) {
        return invalid(format!("stop radius must be positive, got {stop_radius}"));
    }
    let shooter = Shooter {
        c: params.c,
        alpha: params.alpha,
        controls: *controls,
    };
    let ln_gamma = params.gamma.ln();
    let end = shooter.shoot(ln_gamma, stop_radius.ln(), false)?;
    let r_stop = end.zero.map_or(stop_radius, f64::exp);
    let cluster = params.inner_scale().min(r_stop);
    let grid = make_graded_grid(controls.output_intervals.max(2), cluster, r_stop)?;
    let (mut values, mut derivs, zero) = shooter.sample(ln_gamma, &grid, 1.0)?;
    if values.len() < grid.len() {
        // the final node is the zero itself; the sampled run may stop a
        // rounding error short of it
        let last = zero.map_or(*derivs.last().unwrap_or(&0.0), |z| z.1);
        values.resize(grid.len(), 0.0);
        derivs.resize(grid.len(), last);
    }
    if end.zero.is_some() {
        *values.last_mut().expect("grid has nodes") = 0.0;
    }
    let profile = RadialFunction::new(Arc::new(grid), values, Some(derivs))?;
    Ok(IvpResult {
        profile,
        first_zero: end.zero.map(f64::exp),
    })
}

/// Settings for [`solve_bvp_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvpConfig {
    /// Target for `|u(1)|`.
    pub tol: f64,
    pub ivp: IvpControls,
    /// Minimum number of intervals of the output grid; the count grows
    /// with `ln(1/r_ε)` so the log-radius spacing stays bounded.
    pub grid_intervals: usize,
    /// Points of the geometric `γ` scan over `[10⁻⁸, 10²]·λ₁`.
    pub scan_points: usize,
}

impl Default for BvpConfig {
    fn default() -> Self {
        BvpConfig {
            tol: 1e-11,
            ivp: IvpControls::default(),
            grid_intervals: 8000,
            scan_points: 41,
        }
    }
}

/// Solves the boundary-value problem with peak `c` and coefficient `alpha`
/// to `|u(1)| ≤ tol`, with default settings otherwise.
pub fn solve_bvp(c: f64, alpha: f64, tol: f64) -> Result<RadialSolution> {
    solve_bvp_with(
        c,
        alpha,
        &BvpConfig {
            tol,
            ..BvpConfig::default()
        },
    )
}

/// Sign of the shooting problem at `ln γ`: positive when `u > 0` on the
/// whole of `(0, 1]`.
fn positive_on_disc(shooter: &Shooter, ln_gamma: f64) -> Result<bool> {
    let end = shooter.shoot(ln_gamma, 0.0, false)?;
    Ok(end.zero.is_none() && end.u_end > 0.0)
}

pub fn solve_bvp_with(c: f64, alpha: f64, cfg: &BvpConfig) -> Result<RadialSolution> {
    check_peak(c)?;
    check_alpha(alpha)?;
    if !(cfg.tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let shooter = Shooter {
        c,
        alpha,
        controls: cfg.ivp,
    };
    let scan = log_space(1e-8 * LAMBDA1, 1e2 * LAMBDA1, cfg.scan_points.max(2));
    let mut signs = Vec::with_capacity(scan.len());
    for &g in &scan {
        signs.push(positive_on_disc(&shooter, g.ln())?);
    }
    let brackets: Vec<(f64, f64)> = signs
        .windows(2)
        .zip(scan.windows(2))
        .filter(|(s, _)| s[0] && !s[1])
        .map(|(_, g)| (g[0].ln(), g[1].ln()))
        .collect();
    if brackets.is_empty() {
        return Err(Error::BracketFailure {
            lo: scan[0],
            hi: scan[scan.len() - 1],
        });
    }
    let mut roots = Vec::with_capacity(brackets.len());
    for &(lo, hi) in &brackets {
        roots.push(refine_gamma(&shooter, lo, hi, cfg.tol)?);
    }
    let ln_gamma = roots[0];
    let alternate_gammas = roots[1..].iter().map(|l| l.exp()).collect();
    let params = OdeParams::new(c, alpha, ln_gamma.exp())?;

    let r_eps = scaling_radius(c, params.gamma)?;
    let cluster = r_eps.min(params.inner_scale()).min(1.0);
    let n = output_intervals(cfg.grid_intervals, cluster);
    let grid = make_graded_grid(n, cluster, 1.0)?;
    let (mut values, mut derivs, zero) = shooter.sample(ln_gamma, &grid, 1.0)?;
    if values.len() < grid.len() {
        // the zero landed a hair inside r = 1
        let (z, dz) = zero.unwrap_or((1.0, *derivs.last().unwrap_or(&0.0)));
        if 1.0 - z > 1e-6 {
            return Err(Error::SolutionRejected(format!(
                "first zero at r = {z} before the boundary"
            )));
        }
        values.resize(grid.len(), 0.0);
        derivs.resize(grid.len(), dz);
    }
    // a zero short of the boundary counts as |u(1)| ≈ (1 - z)|u'(z)|
    let boundary_residual = match zero {
        Some((z, dz)) => ((1.0 - z) * dz).abs(),
        None => values.last().copied().unwrap_or(0.0).abs(),
    };
    let interior = &values[..values.len() - 1];
    if interior.iter().any(|&u| !(u > 0.0)) {
        return Err(Error::SolutionRejected(
            "solution is not positive inside the disc".into(),
        ));
    }
    let monotone = derivs[1..derivs.len() - 1].iter().all(|&d| d < 0.0);
    if !monotone {
        return Err(Error::SolutionRejected(
            "solution is not radially decreasing".into(),
        ));
    }
    let u = RadialFunction::new(Arc::new(grid), values, Some(derivs))?;
    let mut sol = RadialSolution {
        params,
        u,
        boundary_residual,
        monotone,
        energy_identity_residual: 0.0,
        alternate_gammas,
    };
    let e = energy_breakdown(&sol)?;
    sol.energy_identity_residual = e.identity_residual / e.rhs;
    Ok(sol)
}

/// Output grid size: at least `min`, and ~400 intervals per unit of
/// `ln(1/r_cluster)`.
fn output_intervals(min: usize, cluster: f64) -> usize {
    let n = min.max((400.0 * (1.0 + 1.0 / cluster).ln()).ceil() as usize);
    n + n % 2
}

/// Refines `ln γ` on a bracket whose lower end gives a positive solution
/// and whose upper end vanishes inside the disc. Bisection on the sign
/// until the upper end has exactly one zero before `r = 1`, then Illinois
/// on `u(1)` integrated through the zero.
fn refine_gamma(shooter: &Shooter, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let eval = |lg: f64| -> Result<(bool, f64)> {
        let e = shooter.shoot(lg, 0.0, true)?;
        Ok((e.zero.is_none(), e.u_end))
    };
    let (_, mut f_lo) = eval(lo)?;
    let (_, mut f_hi) = eval(hi)?;
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    let mut side = 0i8;
    for _ in 0..400 {
        if best.1.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        let falsi_ok = f_lo > 0.0 && f_hi < 0.0;
        let mut m = if falsi_ok {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let (positive, fm) = eval(m)?;
        if positive {
            if fm.abs() < best.1.abs() {
                best = (m, fm);
            }
            lo = m;
            f_lo = fm;
            if side == 1 && falsi_ok {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            if fm < 0.0 && fm.abs() < best.1.abs() {
                best = (m, fm);
            }
            hi = m;
            f_hi = fm;
            if side == -1 && falsi_ok {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok(best.0)
}

/// Solves the `α = 0` problem by scale covariance: the IVP with `γ = 1`
/// has first zero `R`, and `u(r) = v(Rr)` solves the BVP with `γ = R²`.
pub fn solve_scaled_alpha0(c: f64) -> Result<RadialSolution> {
    solve_scaled_alpha0_with(c, &BvpConfig::default())
}

pub fn solve_scaled_alpha0_with(c: f64, cfg: &BvpConfig) -> Result<RadialSolution> {
    check_peak(c)?;
    let shooter = Shooter {
        c,
        alpha: 0.0,
        controls: cfg.ivp,
    };
    let end = shooter.shoot(0.0, 1e6f64.ln(), false)?;
    let s_zero = end
        .zero
        .ok_or_else(|| Error::NotFound("no zero of the unit-multiplier solution".into()))?;
    let radius = s_zero.exp();
    let params = OdeParams::new(c, 0.0, radius * radius)?;
    let r_eps = scaling_radius(c, params.gamma)?;
    let cluster = r_eps.min(params.inner_scale()).min(1.0);
    let n = output_intervals(cfg.grid_intervals, cluster);
    let grid = make_graded_grid(n, cluster, 1.0)?;
    let (mut values, mut derivs, zero) = shooter.sample(0.0, &grid, radius)?;
    let last = zero.map_or(*derivs.last().unwrap_or(&0.0), |z| z.1);
    values.resize(grid.len(), 0.0);
    derivs.resize(grid.len(), last);
    let boundary_residual = values.last().copied().unwrap_or(0.0).abs();
    let monotone = derivs[1..derivs.len() - 1].iter().all(|&d| d < 0.0);
    if !monotone || values[..values.len() - 1].iter().any(|&u| !(u > 0.0)) {
        return Err(Error::SolutionRejected(
            "rescaled solution is not positive and decreasing".into(),
        ));
    }
    let u = RadialFunction::new(Arc::new(grid), values, Some(derivs))?;
    let mut sol = RadialSolution {
        params,
        u,
        boundary_residual,
        monotone,
        energy_identity_residual: 0.0,
        alternate_gammas: Vec::new(),
    };
    let e = energy_breakdown(&sol)?;
    sol.energy_identity_residual = e.identity_residual / e.rhs;
    Ok(sol)
}
