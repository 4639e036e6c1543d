//! Global minima of the action: multistart search, tie clustering,
//! multiplicity classification, and normal-form coefficient extraction at
//! degenerate minima.

mod normal_data;
mod search;
mod word;

pub use normal_data::{a3_normal_data, a5_normal_data, psi_series, A3Data, A5Data};
pub use search::{
    certified_radius, certified_radius_for_level, find_global_minima, find_global_minima_seeded,
    newton_polish, search_tied_clusters,
};
pub use word::ShockWord;

use crate::error::{Result, ShockError};
use crate::field::Jet;
use nalgebra::DMatrix;
use serde::Serialize;

/// Multiplicity verdict for a single minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MinimumClass {
    /// Non-degenerate (Morse) minimum, multiplicity 1.
    M1,
    /// Corank-1 minimum with positive reduced quartic, multiplicity 3.
    M3,
    /// Corank-1 minimum with vanishing quartic and positive sextic,
    /// multiplicity 5.
    M5,
    /// Outside the generic list (corank >= 2, seventh order or worse, ...).
    NonGeneric(String),
}

impl MinimumClass {
    pub fn multiplicity(&self) -> Option<usize> {
        match self {
            MinimumClass::M1 => Some(1),
            MinimumClass::M3 => Some(3),
            MinimumClass::M5 => Some(5),
            MinimumClass::NonGeneric(_) => None,
        }
    }
}

/// One tied global minimum of `w`.
#[derive(Debug, Clone)]
pub struct MinimumRecord {
    pub location: Vec<f64>,
    pub value: f64,
    pub class: MinimumClass,
    /// Hessian of w at the minimum, standard coordinates.
    pub hessian: DMatrix<f64>,
    /// Order-8 jet of w at the minimum.
    pub jet: Jet,
}

/// The set of tied global minima at a space-time point.
#[derive(Debug, Clone)]
pub struct MinimaCollection {
    /// Sorted lexicographically by location.
    pub records: Vec<MinimumRecord>,
    /// Common minimal value y*.
    pub y_star: f64,
    /// Tie tolerance that was used.
    pub tie_tolerance: f64,
    pub dim: usize,
}

impl MinimaCollection {
    /// The word of the collection, or an explanation why it is not generic.
    pub fn word(&self) -> std::result::Result<ShockWord, String> {
        let mut a1 = 0;
        let mut a3 = 0;
        let mut a5 = 0;
        for r in &self.records {
            match r.class {
                MinimumClass::M1 => a1 += 1,
                MinimumClass::M3 => a3 += 1,
                MinimumClass::M5 => a5 += 1,
                MinimumClass::NonGeneric(ref why) => {
                    return Err(format!("non-generic minimum at {:?}: {}", r.location, why))
                }
            }
        }
        Ok(ShockWord { a1, a3, a5 })
    }

    /// dim X = d + 1 - kappa; negative values signal a non-generic word.
    pub fn dim_x(&self) -> Option<i64> {
        self.word().ok().map(|w| w.dim_x(self.dim))
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.records {
            if (r.value - self.y_star).abs() > self.tie_tolerance {
                return Err(ShockError::Invalid(format!(
                    "record at {:?} breaks the tie tolerance",
                    r.location
                )));
            }
        }
        Ok(())
    }
}

/// JSON-friendly view of a collection.
#[derive(Debug, Clone, Serialize)]
pub struct MinimaSummary {
    pub y_star: f64,
    pub tie_tolerance: f64,
    pub word: Option<String>,
    pub mu: Option<usize>,
    pub kappa: Option<usize>,
    pub dim_x: Option<i64>,
    pub minima: Vec<MinimumSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimumSummary {
    pub location: Vec<f64>,
    pub value: f64,
    pub class: MinimumClass,
    pub hessian: Vec<Vec<f64>>,
}

impl MinimaCollection {
    pub fn summary(&self) -> MinimaSummary {
        let word = self.word().ok();
        MinimaSummary {
            y_star: self.y_star,
            tie_tolerance: self.tie_tolerance,
            word: word.map(|w| w.to_string()),
            mu: word.map(|w| w.mu()),
            kappa: word.map(|w| w.kappa()),
            dim_x: word.map(|w| w.dim_x(self.dim)),
            minima: self
                .records
                .iter()
                .map(|r| MinimumSummary {
                    location: r.location.clone(),
                    value: r.value,
                    class: r.class.clone(),
                    hessian: (0..self.dim)
                        .map(|i| (0..self.dim).map(|j| r.hessian[(i, j)]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Search configuration; every numeric threshold used by the minima pipeline
/// lives here so verdicts are auditable.
#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    /// Seeding-grid nodes per axis over the certified ball.
    pub grid_per_axis: usize,
    /// Absolute tie tolerance on w values.
    pub tie_tol: f64,
    /// A Hessian eigenvalue below `degeneracy_ratio * max(lambda_max, hessian_floor)`
    /// counts as zero.
    pub degeneracy_ratio: f64,
    /// Scale floor for the degeneracy test (guards the d=1 case where the
    /// single eigenvalue has nothing to be compared against).
    pub hessian_floor: f64,
    /// Polished points closer than this are one cluster.
    pub cluster_radius: f64,
    pub max_newton_iter: usize,
    /// |gradient| below this (times a local scale) counts as critical.
    pub grad_tol: f64,
    /// Zero test for normal-form coefficients (cubic residuals, K thresholds).
    pub normal_form_tol: f64,
    /// Optional manual lower-bound certificate phi0 >= -c0 - c1 |a|.
    pub bound_c0: Option<f64>,
    pub bound_c1: Option<f64>,
    /// Multiplier on the certified radius.
    pub radius_margin: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_per_axis: 64,
            tie_tol: 1e-9,
            degeneracy_ratio: 1e-6,
            hessian_floor: 1.0,
            cluster_radius: 1e-6,
            max_newton_iter: 100,
            grad_tol: 1e-10,
            normal_form_tol: 1e-6,
            bound_c0: None,
            bound_c1: None,
            radius_margin: 1.1,
            seed: 0,
        }
    }
}

/// Multiplicity of a critical point from its order-8 jet.
///
/// The jet must be taken at a critical point. Hessian nondegenerate gives
/// multiplicity 1; corank 1 reduces to the kernel line, where the quartic
/// coefficient decides multiplicity 3 and the sextic multiplicity 5.
pub fn classify_minimum(jet: &Jet, cfg: &SearchConfig) -> Result<MinimumClass> {
    let g = jet.gradient();
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = jet.max_abs_coeff(1, 2).max(cfg.hessian_floor);
    if gnorm > cfg.grad_tol.max(1e-8 * scale) * 100.0 {
        return Err(ShockError::NotCritical { grad_norm: gnorm });
    }
    let frame = match normal_data::kernel_frame(jet, cfg)? {
        normal_data::FrameResult::Nondegenerate => return Ok(MinimumClass::M1),
        normal_data::FrameResult::CorankTooHigh(n) => {
            return Ok(MinimumClass::NonGeneric(format!(
                "corank {} (outside the A-series for generic data)",
                n
            )))
        }
        normal_data::FrameResult::Corank1(f) => f,
    };
    let rot = jet.rotate(&frame.rotation);
    let scale = rot.max_abs_coeff(2, 4).max(1.0);
    let ztol = cfg.normal_form_tol * scale;
    // Odd-order residuals are linear in the location error of the polished
    // minimum, which double precision caps near (eps)^(1/3) through gradient
    // cancellation; their zero test gets a matching floor.
    let ztol_odd = cfg.normal_form_tol.max(2e-4) * scale;
    let d = jet.dim();
    let mut a3_exp = [0usize; 3];
    a3_exp[0] = 3;
    if rot.coeff(&a3_exp[..d]).abs() > ztol_odd {
        return Ok(MinimumClass::NonGeneric(
            "cubic term on the kernel line: not a minimum of the A-series".into(),
        ));
    }
    let reduced = normal_data::reduce_cross_terms(&rot, &frame.omega, 4);
    let k4 = reduced.coeff(&{
        let mut e = [0usize; 3];
        e[0] = 4;
        e
    }[..d]);
    if k4 > ztol {
        return Ok(MinimumClass::M3);
    }
    if k4 < -ztol {
        return Ok(MinimumClass::NonGeneric(
            "negative kernel quartic: not a minimum".into(),
        ));
    }
    // A5 path: remove cubic and quartic cross terms as well.
    let reduced = normal_data::reduce_cross_terms(&rot, &frame.omega, 6);
    let mut e5 = [0usize; 3];
    e5[0] = 5;
    if reduced.coeff(&e5[..d]).abs() > ztol_odd {
        return Ok(MinimumClass::NonGeneric(
            "residual quintic term after reduction".into(),
        ));
    }
    let mut e6 = [0usize; 3];
    e6[0] = 6;
    let k6 = reduced.coeff(&e6[..d]);
    if k6 > ztol {
        return Ok(MinimumClass::M5);
    }
    if k6 < -ztol {
        return Ok(MinimumClass::NonGeneric(
            "negative kernel sextic: not a minimum".into(),
        ));
    }
    Ok(MinimumClass::NonGeneric(
        "flat through order 6 on the kernel line (A7 or worse)".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Jet;

    fn jet_of(build: impl Fn(&Jet, &Jet) -> Jet) -> Jet {
        let a = Jet::variable(2, 8, 0, 0.0).unwrap();
        let b = Jet::variable(2, 8, 1, 0.0).unwrap();
        build(&a, &b)
    }

    #[test]
    fn morse_minimum() {
        let j = jet_of(|a, b| a.powi(2).add(&b.powi(2)));
        assert_eq!(
            classify_minimum(&j, &SearchConfig::default()).unwrap(),
            MinimumClass::M1
        );
    }

    #[test]
    fn a3_minimum() {
        let j = jet_of(|a, b| a.powi(4).add(&b.powi(2)));
        assert_eq!(
            classify_minimum(&j, &SearchConfig::default()).unwrap(),
            MinimumClass::M3
        );
    }

    #[test]
    fn a5_minimum() {
        let j = jet_of(|a, b| a.powi(6).add(&b.powi(2)));
        assert_eq!(
            classify_minimum(&j, &SearchConfig::default()).unwrap(),
            MinimumClass::M5
        );
    }

    #[test]
    fn corank_two_is_non_generic() {
        let j = jet_of(|a, b| a.powi(4).add(&b.powi(4)));
        match classify_minimum(&j, &SearchConfig::default()).unwrap() {
            MinimumClass::NonGeneric(_) => {}
            other => panic!("expected non-generic, got {other:?}"),
        }
    }

    #[test]
    fn gradient_must_be_small() {
        let j = jet_of(|a, b| a.add(&b.powi(2)));
        assert!(classify_minimum(&j, &SearchConfig::default()).is_err());
    }
}
