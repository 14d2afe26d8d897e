//! Run configuration: built-in defaults, then a flat `key = value` file,
//! then command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use tmlab::extremal::ExtremalConfig;
use tmlab::family::FamilyConfig;
use tmlab::shooting::BvpConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub bvp_tol: f64,
    pub extremal_tol: f64,
    pub fp_tol: f64,
    pub alpha0_tol: f64,
    pub grid_intervals: usize,
    pub rescale_intervals: usize,
    pub green_intervals: usize,
    pub r_cmp: f64,
    pub beta0: f64,
    pub damping: f64,
    pub max_iter: usize,
    /// 0 lets the thread pool pick.
    pub threads: usize,
    pub out: Option<PathBuf>,
    /// Nothing in the pipeline draws random numbers; recorded for reports.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ext = ExtremalConfig::default();
        let fam = FamilyConfig::default();
        RunConfig {
            bvp_tol: fam.bvp.tol,
            extremal_tol: ext.tol,
            fp_tol: ext.fp_tol,
            alpha0_tol: 1e-8,
            grid_intervals: fam.bvp.grid_intervals,
            rescale_intervals: fam.rescale_intervals,
            green_intervals: ext.green_intervals,
            r_cmp: fam.r_cmp,
            beta0: fam.beta0,
            damping: ext.damping,
            max_iter: ext.max_iter,
            threads: 0,
            out: None,
            deterministic: true,
        }
    }
}

fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::invalid(format!("config key `{key}`: cannot parse `{raw}`")))
}

impl RunConfig {
    /// Applies one setting; `key` uses the config-file spelling.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        match key {
            "bvp_tol" => self.bvp_tol = parse(key, raw)?,
            "extremal_tol" => self.extremal_tol = parse(key, raw)?,
            "fp_tol" => self.fp_tol = parse(key, raw)?,
            "alpha0_tol" => self.alpha0_tol = parse(key, raw)?,
            "grid_intervals" => self.grid_intervals = parse(key, raw)?,
            "rescale_intervals" => self.rescale_intervals = parse(key, raw)?,
            "green_intervals" => self.green_intervals = parse(key, raw)?,
            "r_cmp" => self.r_cmp = parse(key, raw)?,
            "beta0" => self.beta0 = parse(key, raw)?,
            "damping" => self.damping = parse(key, raw)?,
            "max_iter" => self.max_iter = parse(key, raw)?,
            "threads" => self.threads = parse(key, raw)?,
            "out" => self.out = Some(PathBuf::from(raw)),
            _ => return Err(CliError::invalid(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg = RunConfig::default();
        for (key, value) in parse_pairs(&text)? {
            cfg.set(&key, &value)?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("bvp_tol", self.bvp_tol),
            ("extremal_tol", self.extremal_tol),
            ("fp_tol", self.fp_tol),
            ("alpha0_tol", self.alpha0_tol),
            ("r_cmp", self.r_cmp),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(CliError::invalid("damping must lie in (0, 1]"));
        }
        if self.grid_intervals < 2 || self.rescale_intervals < 2 || self.green_intervals < 2 {
            return Err(CliError::invalid("grid sizes must be at least 2"));
        }
        if self.max_iter == 0 {
            return Err(CliError::invalid("max_iter must be positive"));
        }
        Ok(())
    }

    pub fn bvp(&self) -> BvpConfig {
        BvpConfig {
            tol: self.bvp_tol,
            grid_intervals: self.grid_intervals,
            ..BvpConfig::default()
        }
    }

    pub fn family(&self) -> FamilyConfig {
        FamilyConfig {
            bvp: self.bvp(),
            r_cmp: self.r_cmp,
            rescale_intervals: self.rescale_intervals,
            beta0: self.beta0,
        }
    }

    pub fn extremal(&self) -> ExtremalConfig {
        ExtremalConfig {
            bvp: self.bvp(),
            tol: self.extremal_tol,
            damping: self.damping,
            max_iter: self.max_iter,
            fp_tol: self.fp_tol,
            green_intervals: self.green_intervals,
            ..ExtremalConfig::default()
        }
    }
}

/// `key = value` lines; `#` starts a comment, blank lines are skipped, and
/// a repeated key keeps its last value.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::invalid(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::invalid(format!("config line {}: empty key", lineno + 1)));
        }
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_with_comments() {
        let m = parse_pairs("# header\nbvp_tol = 1e-9\n\n r_cmp=4 # inline\nbvp_tol=1e-8\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m["bvp_tol"], "1e-8");
        assert_eq!(m["r_cmp"], "4");
        assert!(parse_pairs("no equals sign").is_err());
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let mut c = RunConfig::default();
        assert!(c.set("nope", "1").is_err());
        assert!(c.set("grid_intervals", "1.5").is_err());
        c.set("beta0", "0.25").unwrap();
        assert_eq!(c.beta0, 0.25);
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.fp_tol = 0.0;
        assert!(c.validate().is_err());
    }
}
