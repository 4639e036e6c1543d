//! Flat `key = value` configuration files with `[section]` headers, and the
//! bundle of all module configurations a run carries.
//!
//! The format is deliberately tiny: comments start with `#`, values are
//! numbers, booleans, strings, or comma-separated number lists. CLI flags
//! override file values.

use crate::action::QuadratureConfig;
use crate::catalog::CatalogConfig;
use crate::determinator::DeterminatorConfig;
use crate::error::{Result, ShockError};
use crate::minima::SearchConfig;
use crate::tracker::ScanConfig;
use serde::Serialize;
use std::collections::BTreeMap;

pub type Sections = BTreeMap<String, BTreeMap<String, String>>;

/// Parse the configuration text into sections.
pub fn parse_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::from("run");
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(ShockError::Config(format!(
                    "line {}: malformed section header `{raw}`",
                    lineno + 1
                )));
            }
            current = line[1..line.len() - 1].trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ShockError::Config(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            )));
        };
        out.entry(current.clone())
            .or_default()
            .insert(key.trim().to_string(), unquote(value.trim()));
    }
    Ok(out)
}

fn unquote(v: &str) -> String {
    let v = v.trim();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        v[1..v.len() - 1].to_string()
    } else {
        v.to_string()
    }
}

fn get_f64(s: &Sections, section: &str, key: &str, out: &mut f64) -> Result<()> {
    if let Some(v) = s.get(section).and_then(|m| m.get(key)) {
        *out = v
            .parse()
            .map_err(|_| ShockError::Config(format!("[{section}] {key}: not a number: {v}")))?;
    }
    Ok(())
}

fn get_usize(s: &Sections, section: &str, key: &str, out: &mut usize) -> Result<()> {
    if let Some(v) = s.get(section).and_then(|m| m.get(key)) {
        *out = v
            .parse()
            .map_err(|_| ShockError::Config(format!("[{section}] {key}: not an integer: {v}")))?;
    }
    Ok(())
}

fn get_vec(s: &Sections, section: &str, key: &str, out: &mut Vec<f64>) -> Result<()> {
    if let Some(v) = s.get(section).and_then(|m| m.get(key)) {
        let parsed: std::result::Result<Vec<f64>, _> =
            v.split(',').map(|x| x.trim().parse::<f64>()).collect();
        *out = parsed
            .map_err(|_| ShockError::Config(format!("[{section}] {key}: not a number list: {v}")))?;
    }
    Ok(())
}

/// All module configurations of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub search: SearchConfig,
    pub determinator: DeterminatorConfig,
    pub quadrature: QuadratureConfig,
    pub catalog: CatalogConfig,
    pub scan: ScanConfig,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            search: SearchConfig::default(),
            determinator: DeterminatorConfig::default(),
            quadrature: QuadratureConfig::default(),
            catalog: CatalogConfig::default(),
            scan: ScanConfig::new_1d(0.1, 2.0),
            threads: 0,
        }
    }
}

impl RunConfig {
    /// Apply a parsed configuration file on top of the defaults.
    pub fn apply(&mut self, s: &Sections) -> Result<()> {
        get_usize(s, "run", "threads", &mut self.threads)?;

        get_usize(s, "search", "grid", &mut self.search.grid_per_axis)?;
        get_f64(s, "search", "tie_tol", &mut self.search.tie_tol)?;
        get_f64(s, "search", "degeneracy_ratio", &mut self.search.degeneracy_ratio)?;
        get_f64(s, "search", "hessian_floor", &mut self.search.hessian_floor)?;
        get_f64(s, "search", "cluster_radius", &mut self.search.cluster_radius)?;
        get_usize(s, "search", "max_newton_iter", &mut self.search.max_newton_iter)?;
        get_f64(s, "search", "grad_tol", &mut self.search.grad_tol)?;
        get_f64(s, "search", "normal_form_tol", &mut self.search.normal_form_tol)?;
        get_f64(s, "search", "radius_margin", &mut self.search.radius_margin)?;
        let mut c0 = f64::NAN;
        get_f64(s, "search", "bound_c0", &mut c0)?;
        if c0.is_finite() {
            self.search.bound_c0 = Some(c0);
        }
        let mut c1 = f64::NAN;
        get_f64(s, "search", "bound_c1", &mut c1)?;
        if c1.is_finite() {
            self.search.bound_c1 = Some(c1);
        }
        let mut seed = self.search.seed as f64;
        get_f64(s, "search", "seed", &mut seed)?;
        self.search.seed = seed as u64;

        get_f64(s, "determinator", "rank_rel_tol", &mut self.determinator.rank_rel_tol)?;
        get_f64(s, "determinator", "sign_tol", &mut self.determinator.sign_tol)?;
        get_f64(s, "determinator", "c_zero_tol", &mut self.determinator.c_zero_tol)?;
        get_f64(s, "determinator", "predicate_tol", &mut self.determinator.predicate_tol)?;
        get_f64(s, "determinator", "xi_tol", &mut self.determinator.xi_tol)?;
        get_usize(s, "determinator", "sphere_samples", &mut self.determinator.sphere_samples)?;

        get_f64(s, "quadrature", "rel_tol", &mut self.quadrature.rel_tol)?;
        get_f64(s, "quadrature", "level_cut", &mut self.quadrature.level_cut)?;
        get_usize(s, "quadrature", "initial_panels", &mut self.quadrature.initial_panels)?;
        get_usize(s, "quadrature", "max_depth", &mut self.quadrature.max_depth)?;

        get_f64(s, "catalog", "epsilon", &mut self.catalog.epsilon)?;
        get_f64(s, "catalog", "a5_epsilon", &mut self.catalog.a5_epsilon)?;
        get_f64(s, "catalog", "window", &mut self.catalog.window)?;
        get_usize(s, "catalog", "resolution_2d", &mut self.catalog.resolution_2d)?;
        get_usize(s, "catalog", "resolution_3d", &mut self.catalog.resolution_3d)?;
        get_f64(s, "catalog", "jump_tol", &mut self.catalog.jump_tol)?;

        get_vec(s, "scan", "window_lo", &mut self.scan.window_lo)?;
        get_vec(s, "scan", "window_hi", &mut self.scan.window_hi)?;
        get_usize(s, "scan", "resolution", &mut self.scan.resolution)?;
        get_f64(s, "scan", "t_min", &mut self.scan.t_min)?;
        get_f64(s, "scan", "t_max", &mut self.scan.t_max)?;
        get_usize(s, "scan", "time_steps", &mut self.scan.time_steps)?;
        get_f64(s, "scan", "time_tol", &mut self.scan.time_tol)?;
        get_f64(s, "scan", "space_tol", &mut self.scan.space_tol)?;
        get_f64(s, "scan", "event_tie_tol", &mut self.scan.event_tie_tol)?;
        get_usize(s, "scan", "clip_cells", &mut self.scan.clip_cells)?;
        get_f64(s, "scan", "clip_dt_fraction", &mut self.scan.clip_dt_fraction)?;
        get_usize(s, "scan", "seed_grid", &mut self.scan.seed_grid)?;
        get_f64(s, "scan", "match_radius", &mut self.scan.match_radius)?;
        self.scan.search = self.search.clone();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_parse() {
        let text = r#"
# comment
[search]
grid = 32
tie_tol = 1e-8

[scan]
window_lo = -2, -2
resolution = 65
"#;
        let s = parse_sections(text).unwrap();
        let mut cfg = RunConfig::default();
        cfg.scan.window_lo = vec![0.0, 0.0];
        cfg.scan.window_hi = vec![1.0, 1.0];
        cfg.apply(&s).unwrap();
        assert_eq!(cfg.search.grid_per_axis, 32);
        assert_eq!(cfg.search.tie_tol, 1e-8);
        assert_eq!(cfg.scan.window_lo, vec![-2.0, -2.0]);
        assert_eq!(cfg.scan.resolution, 65);
    }

    #[test]
    fn bad_line_is_an_error() {
        assert!(parse_sections("nonsense without equals").is_err());
    }
}
