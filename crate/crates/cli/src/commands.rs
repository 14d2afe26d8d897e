use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};
use tmlab::bubble::{phi0, w0};
use tmlab::energy::{energy_breakdown, fit_expansion};
use tmlab::extremal::{ad_extremal, cu_diagnostic, subcritical_extremal, ExtremalResult};
use tmlab::family::{build_family, lemma1_diagnostic, scaling_radius, FamilyEntry, FamilyRecord};
use tmlab::green::{alpha0_threshold, green_function};
use tmlab::shooting::solve_bvp_with;

use crate::config::RunConfig;
use crate::emit::{json_string, Csv};
use crate::{CliError, Command};

/// Destination of the primary output. The file, if any, is created before
/// any computation so an unwritable path fails fast.
pub enum Sink {
    Stdout,
    File(File),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => File::create(p)
                .map(Sink::File)
                .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", p.display()))),
        }
    }

    fn write(self, text: &str) -> Result<(), CliError> {
        let res = match self {
            Sink::Stdout => io::stdout().lock().write_all(text.as_bytes()),
            Sink::File(mut f) => f.write_all(text.as_bytes()).and_then(|_| f.flush()),
        };
        res.map_err(|e| CliError::Io(format!("write failed: {e}")))
    }

    /// Commands with a JSON result and a CSV profile print the JSON and
    /// put the CSV in the file, when one was given.
    fn split(self, json: &str, csv: String) -> Result<(), CliError> {
        if let Sink::File(_) = self {
            self.write(&csv)?;
        }
        Sink::Stdout.write(json)
    }
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig, sink: Sink) -> Result<(), CliError> {
    match *cmd {
        Command::Bvp { c, alpha, .. } => bvp(c, alpha, cfg, sink),
        Command::Family { alpha, ref c_list } => family(alpha, c_list, cfg, sink),
        Command::Bubble { r_max, n } => bubble(r_max, n, sink),
        Command::EnergyFit { ref input } => energy_fit(input, sink),
        Command::Extremal { alpha, eps } => {
            let r = subcritical_extremal(alpha, eps, &cfg.extremal())?;
            sink.split(&json_string(&extremal_json(&r)), profile_csv(&r))
        }
        Command::ExtremalAd { alpha, eps } => {
            let r = ad_extremal(alpha, eps, &cfg.extremal())?;
            sink.split(&json_string(&extremal_json(&r)), profile_csv(&r))
        }
        Command::Green { alpha } => green(alpha, cfg, sink),
        Command::Report {
            alpha,
            ref c_list,
            eps,
        } => sink.write(&json_string(&report(alpha, c_list, eps, cfg)?)),
    }
}

fn bvp(c: f64, alpha: f64, cfg: &RunConfig, sink: Sink) -> Result<(), CliError> {
    let sol = solve_bvp_with(c, alpha, &cfg.bvp())?;
    let e = energy_breakdown(&sol)?;
    let out = json!({
        "c": sol.c(),
        "alpha": sol.alpha(),
        "gamma": sol.gamma(),
        "alternate_gammas": sol.alternate_gammas,
        "ambiguous": sol.ambiguous(),
        "r_eps": scaling_radius(sol.c(), sol.gamma())?,
        "boundary_residual": sol.boundary_residual,
        "energy_identity_residual": sol.energy_identity_residual,
        "monotone": sol.monotone,
        "energy": e,
    });
    let mut csv = Csv::new(&["r", "u", "du"]);
    let du = sol.u.deriv().expect("shooting profiles carry derivatives");
    for ((&r, &u), &d) in sol.u.nodes().iter().zip(sol.u.values()).zip(du) {
        csv.row(&[r, u, d]);
    }
    sink.split(&json_string(&out), csv.finish())
}

fn checked(records: &[FamilyRecord]) -> Result<Vec<(f64, &FamilyEntry)>, CliError> {
    records
        .iter()
        .map(|r| match &r.entry {
            Ok(e) => Ok((r.c, e)),
            Err(e) => Err(CliError::Solver(e.clone())),
        })
        .collect()
}

const FAMILY_HEADER: [&str; 11] = [
    "c",
    "gamma",
    "r_eps",
    "grad_sq",
    "l2_sq",
    "norm1a_sq",
    "inner",
    "outer",
    "phi_err",
    "w_err",
    "lemma1",
];

fn family(alpha: f64, c_list: &[f64], cfg: &RunConfig, sink: Sink) -> Result<(), CliError> {
    let records = build_family(c_list, alpha, &cfg.family())?;
    let mut csv = Csv::new(&FAMILY_HEADER);
    for (c, e) in checked(&records)? {
        let en = &e.energy;
        csv.row(&[
            c,
            e.gamma,
            e.r_eps,
            en.grad_sq,
            en.l2_sq,
            en.norm1a_sq,
            en.inner,
            en.outer,
            e.phi_err,
            e.w_err,
            e.lemma1_value,
        ]);
    }
    sink.write(&csv.finish())
}

fn bubble(r_max: f64, n: usize, sink: Sink) -> Result<(), CliError> {
    if !(r_max > 0.0 && r_max.is_finite()) || n == 0 {
        return Err(CliError::invalid("need r_max > 0 and n >= 1"));
    }
    let mut csv = Csv::new(&["r", "phi0", "w0"]);
    for i in 0..=n {
        let r = r_max * i as f64 / n as f64;
        csv.row(&[r, phi0(r)?, w0(r)?]);
    }
    sink.write(&csv.finish())
}

/// Fit report shared by `energy-fit` and `report`.
fn fit_json(points: &[(f64, f64)]) -> Result<Value, CliError> {
    let fit = fit_expansion(points)?;
    let (lo, hi) = (4.0 * PI - 1.5, 6.0 * PI + 1.5);
    let scaled_ok = fit.scaled.iter().all(|&s| s >= lo && s <= hi);
    let above = points.iter().all(|&(_, e)| e > 4.0 * PI);
    let pts: Vec<Value> = points
        .iter()
        .zip(&fit.scaled)
        .map(|(&(c, e), &s)| json!({"c": c, "energy": e, "scaled": s}))
        .collect();
    Ok(json!({
        "A": fit.a,
        "band_check": scaled_ok && above && fit.in_band(1.0),
        "points": pts,
        "residual": fit.residual,
    }))
}

fn energy_fit(input: &Path, sink: Sink) -> Result<(), CliError> {
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", input.display())))?;
    let points = read_energy_points(&text)?;
    sink.write(&json_string(&fit_json(&points)?))
}

/// `(c, norm1a_sq)` pairs from a family CSV; other columns are ignored.
fn read_energy_points(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::invalid("empty CSV"))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| CliError::invalid(format!("CSV has no `{name}` column")))
    };
    let (ic, ie) = (col("c")?, col("norm1a_sq")?);
    lines
        .enumerate()
        .map(|(k, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |i: usize| -> Result<f64, CliError> {
                cells
                    .get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CliError::invalid(format!("CSV row {}: bad number", k + 2)))
            };
            Ok((get(ic)?, get(ie)?))
        })
        .collect()
}

fn extremal_json(r: &ExtremalResult) -> Value {
    json!({
        "mode": r.mode,
        "eps": r.eps,
        "alpha": r.alpha,
        "c_star": r.c_star,
        "functional_value": r.functional_value,
        "lambda": r.lambda,
        "lambda_equation": r.lambda_equation,
        "gamma": r.gamma,
        "multiplier_residual": r.multiplier_residual,
        "constraint_residual": r.constraint_residual,
        "fixed_point_residual": r.fixed_point_residual,
        "fixed_point_iterations": r.fixed_point_history.len(),
        "l2_sq": r.l2_sq,
        "roots_found": r.roots_found,
    })
}

fn profile_csv(r: &ExtremalResult) -> String {
    let mut csv = Csv::new(&["r", "u"]);
    for (&x, &u) in r.u_star.nodes().iter().zip(r.u_star.values()) {
        csv.row(&[x, u]);
    }
    csv.finish()
}

fn green(alpha: f64, cfg: &RunConfig, sink: Sink) -> Result<(), CliError> {
    let g = green_function(alpha, cfg.green_intervals)?;
    let a0 = alpha0_threshold(cfg.green_intervals, cfg.alpha0_tol)?;
    let out = json!({
        "alpha": g.alpha,
        "l2_sq": g.l2_sq,
        "alpha0": a0,
        "intervals": cfg.green_intervals,
    });
    let mut csv = Csv::new(&["r", "regular", "green"]);
    let h = &g.regular_part;
    for (&r, &v) in h.nodes().iter().zip(h.values()).skip(1) {
        csv.row(&[r, v, g.value(r)?]);
    }
    sink.split(&json_string(&out), csv.finish())
}

fn report(alpha: f64, c_list: &[f64], eps: f64, cfg: &RunConfig) -> Result<Value, CliError> {
    let fam_cfg = cfg.family();
    let records = build_family(c_list, alpha, &fam_cfg)?;
    let entries = checked(&records)?;
    let family: Vec<Value> = entries
        .iter()
        .map(|(c, e)| {
            json!({
                "c": c,
                "gamma": e.gamma,
                "r_eps": e.r_eps,
                "energy": e.energy,
                "phi_err": e.phi_err,
                "w_err": e.w_err,
                "lemma1": e.lemma1_value,
                "ambiguous": e.ambiguous,
            })
        })
        .collect();
    let points: Vec<(f64, f64)> = entries.iter().map(|(c, e)| (*c, e.energy.norm1a_sq)).collect();
    let fit = fit_json(&points)?;
    let lemma1 = lemma1_diagnostic(&records, fam_cfg.beta0)?;

    let g = green_function(alpha, cfg.green_intervals)?;
    let cu = cu_diagnostic(&records, &g)?;
    let cu_json: Vec<Value> = c_list
        .iter()
        .zip(&cu)
        .map(|(c, v)| json!({"c": c, "value": v}))
        .collect();
    let a0 = alpha0_threshold(cfg.green_intervals, cfg.alpha0_tol)?;

    let ext_cfg = cfg.extremal();
    let plain = subcritical_extremal(alpha, eps, &ext_cfg)?;
    let ad = ad_extremal(0.5 * a0, eps, &ext_cfg)?;
    let plain0 = if alpha == 0.0 {
        plain.clone()
    } else {
        subcritical_extremal(0.0, eps, &ext_cfg)?
    };
    let ad0 = ad_extremal(0.0, eps, &ext_cfg)?;

    Ok(json!({
        "config": cfg,
        "alpha": alpha,
        "family": family,
        "energy_fit": fit,
        "lemma1": {"beta0": fam_cfg.beta0, "points": lemma1},
        "green": {"alpha": g.alpha, "l2_sq": g.l2_sq, "alpha0": a0},
        "cu_diagnostic": {"target": g.l2_sq, "points": cu_json},
        "extremal": extremal_json(&plain),
        "extremal_ad": extremal_json(&ad),
        "collapse": {
            "eps": eps,
            "plain": plain0.functional_value,
            "adimurthi_druet": ad0.functional_value,
            "difference": (plain0.functional_value - ad0.functional_value).abs(),
        },
    }))
}
