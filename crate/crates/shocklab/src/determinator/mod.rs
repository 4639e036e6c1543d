//! The shock determinator: decide what a space-time point is — outside the
//! shock, a singularity of the instant shock, or a perestroika — and compute
//! the extended name and signature of perestroikas.
//!
//! Two independent routes are implemented and cross-checked: the rank
//! dispatch on the decomposition matrix M (with the sign system for extended
//! names) and the geometric conditions on minima configurations (collinear /
//! coplanar points, convex position, kernel-plane regions, determinant
//! signs). Disagreement is reported as a non-generic verdict with both
//! routes in the diagnostics.

pub mod matrices;
pub mod predicates;
pub mod regions;
pub mod signatures;

pub use matrices::{build_m, ranks, solve_c, to_frame, MMatrix, WordCase};
pub use predicates::{enclosing_ball_region, geometry_predicates, BallRegion, PredicateFlags};
pub use regions::{a5_sign, kernel_region, kernel_region_signs, KernelRegion};
pub use signatures::{signature_a1a3, signature_a1m, signature_a3, Signature};

use crate::error::ShockError;
use crate::minima::{
    a3_normal_data, a5_normal_data, A3Data, A5Data, MinimaCollection, MinimumClass, SearchConfig,
    ShockWord,
};
use serde::Serialize;
use std::collections::BTreeMap;

/// Extended name: the word decorated with the per-minimum signs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedName {
    /// Signs of the A1 minima, pluses before minuses.
    pub a1_signs: Vec<i8>,
    pub a3_sign: Option<i8>,
    pub a5_sign: Option<i8>,
}

impl ExtendedName {
    pub fn new(mut a1_signs: Vec<i8>, a3_sign: Option<i8>, a5_sign: Option<i8>) -> ExtendedName {
        a1_signs.sort_by(|a, b| b.cmp(a));
        ExtendedName {
            a1_signs,
            a3_sign,
            a5_sign,
        }
    }

    /// Rendering in the style of the perestroika maps: `A1^{++-}`,
    /// `A1^+A3^-`, `A5^+`.
    pub fn render(&self) -> String {
        let sign = |s: i8| if s > 0 { '+' } else { '-' };
        let mut out = String::new();
        if !self.a1_signs.is_empty() {
            out.push_str("A1^");
            if self.a1_signs.len() == 1 {
                out.push(sign(self.a1_signs[0]));
            } else {
                out.push('{');
                for &s in &self.a1_signs {
                    out.push(sign(s));
                }
                out.push('}');
            }
        }
        if let Some(s) = self.a3_sign {
            out.push_str("A3^");
            out.push(sign(s));
        }
        if let Some(s) = self.a5_sign {
            out.push_str("A5^");
            out.push(sign(s));
        }
        out
    }

    pub fn flipped(&self) -> ExtendedName {
        ExtendedName::new(
            self.a1_signs.iter().map(|s| -s).collect(),
            self.a3_sign.map(|s| -s),
            self.a5_sign.map(|s| -s),
        )
    }
}

/// Verdict for a space-time point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    Outside,
    Singularity {
        word: String,
    },
    Perestroika {
        word: String,
        name: ExtendedName,
        signature: Signature,
        rendered: String,
    },
    NonGeneric {
        reason: String,
    },
}

/// Decision margins and intermediate quantities of a classification, so
/// borderline verdicts can be audited.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub word: Option<String>,
    pub mu: Option<usize>,
    pub dim_x: Option<i64>,
    pub sv_m: Vec<f64>,
    pub sv_m_prime: Vec<f64>,
    pub rank_m: Option<usize>,
    pub rank_m_prime: Option<usize>,
    pub rank_rel_tol: f64,
    pub c: Option<Vec<f64>>,
    pub c_min_sign_component: Option<f64>,
    pub xi_eigenvalues: Option<Vec<f64>>,
    pub algebraic_name: Option<String>,
    pub geometric_name: Option<String>,
    pub margins: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

/// Thresholds of the determinator. The mathematics is exact; these margins
/// are its floating-point substitute and are reported with every verdict.
#[derive(Debug, Clone, Serialize)]
pub struct DeterminatorConfig {
    /// Singular values below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    /// Sign components of c below this (after normalization) are degenerate.
    pub sign_tol: f64,
    /// |C| below this counts as C = 0.
    pub c_zero_tol: f64,
    /// Relative tolerance of the geometric predicates.
    pub predicate_tol: f64,
    /// Relative eigenvalue threshold under which the time form is degenerate.
    pub xi_tol: f64,
    /// Samples of the circle S in the two-A1 case.
    pub sphere_samples: usize,
}

impl Default for DeterminatorConfig {
    fn default() -> Self {
        DeterminatorConfig {
            rank_rel_tol: 1e-7,
            sign_tol: 1e-6,
            c_zero_tol: 1e-6,
            predicate_tol: 1e-6,
            xi_tol: 1e-9,
            sphere_samples: 64,
        }
    }
}

/// Classify a space-time point from its tied global minima, deriving the
/// degenerate normal-form data from the stored jets.
pub fn classify(
    mc: &MinimaCollection,
    cfg: &DeterminatorConfig,
    search_cfg: &SearchConfig,
) -> Classification {
    let mut a3 = None;
    let mut a5 = None;
    for r in &mc.records {
        match r.class {
            MinimumClass::M3 if a3.is_none() => match a3_normal_data(&r.jet, search_cfg) {
                Ok(d) => a3 = Some(d),
                Err(e) => {
                    return non_generic(format!("A3 normal data failed: {e}"), Diagnostics::default())
                }
            },
            MinimumClass::M5 if a5.is_none() => match a5_normal_data(&r.jet, search_cfg) {
                Ok(d) => a5 = Some(d),
                Err(e) => {
                    return non_generic(format!("A5 normal data failed: {e}"), Diagnostics::default())
                }
            },
            _ => {}
        }
    }
    classify_with_data(mc, a3.as_ref(), a5.as_ref(), cfg)
}

fn non_generic(reason: String, diagnostics: Diagnostics) -> Classification {
    Classification {
        verdict: Verdict::NonGeneric { reason },
        diagnostics,
    }
}

/// Classify with explicitly supplied degenerate data.
pub fn classify_with_data(
    mc: &MinimaCollection,
    a3: Option<&A3Data>,
    a5: Option<&A5Data>,
    cfg: &DeterminatorConfig,
) -> Classification {
    let mut diag = Diagnostics {
        rank_rel_tol: cfg.rank_rel_tol,
        ..Diagnostics::default()
    };
    if let Err(e) = mc.validate() {
        return non_generic(format!("invalid collection: {e}"), diag);
    }
    let word = match mc.word() {
        Ok(w) => w,
        Err(why) => return non_generic(why, diag),
    };
    let d = mc.dim;
    diag.word = Some(word.to_string());
    diag.mu = Some(word.mu());
    diag.dim_x = Some(word.dim_x(d));

    if word.mu() == 1 {
        return Classification {
            verdict: Verdict::Outside,
            diagnostics: diag,
        };
    }
    if word.mu() > d + 2 {
        return non_generic(
            format!(
                "word {} has codimension {} > d + 1 = {}",
                word,
                word.kappa(),
                d + 1
            ),
            diag,
        );
    }
    if !(word.is_pure_a1() || word.is_a1l_a3() || word.is_a5()) {
        return non_generic(
            format!("word {} is outside the generic list for d <= 3", word),
            diag,
        );
    }

    let m = match build_m(mc, a3, a5) {
        Ok(m) => m,
        Err(e) => return non_generic(format!("M assembly failed: {e}"), diag),
    };
    let (rank_m, rank_mp, sv_m, sv_mp) = ranks(&m, cfg.rank_rel_tol);
    diag.rank_m = Some(rank_m);
    diag.rank_m_prime = Some(rank_mp);
    diag.sv_m = sv_m;
    diag.sv_m_prime = sv_mp;
    let mu = word.mu();

    if rank_m < mu {
        return non_generic(
            format!("rank M = {rank_m} < mu = {mu}: the family is not transversal here"),
            diag,
        );
    }

    if rank_mp == mu {
        // Singularity branch; cross-check the geometric conditions.
        if let Err(reason) = singularity_cross_check(mc, &word, a3, cfg, &mut diag) {
            return non_generic(reason, diag);
        }
        return Classification {
            verdict: Verdict::Singularity {
                word: word.to_string(),
            },
            diagnostics: diag,
        };
    }
    if rank_mp != mu - 1 {
        return non_generic(
            format!("rank M' = {rank_mp} below mu - 1 = {}", mu - 1),
            diag,
        );
    }

    // Perestroika branch.
    if word.is_pure_a1() && word.a1 == 2 {
        diag.notes.push(
            "rank conditions report an A1^2 tangency, which the entropy condition forbids \
             for shocks of the Burgers equation"
                .into(),
        );
        return non_generic("A1^2 tangency is impossible for real shocks".into(), diag);
    }

    let (c, ineq_margin) = match solve_c(&m) {
        Ok(v) => v,
        Err(e) => return non_generic(format!("sign system failed: {e}"), diag),
    };
    diag.c = Some(c.clone());
    diag.margins.insert("inequality |M_last . c|".into(), ineq_margin);

    let mut min_sign = f64::INFINITY;
    for (col, _) in &m.sign_columns {
        min_sign = min_sign.min(c[*col].abs());
    }
    diag.c_min_sign_component = Some(min_sign);
    if min_sign < cfg.sign_tol {
        return non_generic(
            format!("a sign component of c is {min_sign:.3e}, below the sign threshold"),
            diag,
        );
    }

    let name = name_from_c(&word, &m, &c);
    diag.algebraic_name = Some(name.render());
    if word.is_pure_a1() {
        let all_equal = name.a1_signs.iter().all(|&s| s == name.a1_signs[0]);
        if all_equal {
            return non_generic(
                "sign system produced an all-equal A1 name, contradicting sum c = 0".into(),
                diag,
            );
        }
    }

    // Geometric route.
    match perestroika_geometric_name(mc, &word, a3, a5, cfg, &mut diag) {
        Ok(Some(geo)) => {
            diag.geometric_name = Some(geo.render());
            if geo != name {
                return non_generic(
                    format!(
                        "extended-name routes disagree: sign system {} vs geometry {}",
                        name.render(),
                        geo.render()
                    ),
                    diag,
                );
            }
        }
        Ok(None) => {}
        Err(reason) => return non_generic(reason, diag),
    }

    // Signature.
    let dim_x = word.dim_x(d);
    let signature = if dim_x == 0 {
        Signature::TRIVIAL
    } else {
        let sig = match signature_dispatch(mc, &word, a3, &m, &c, cfg) {
            Ok((sig, eigs)) => {
                diag.xi_eigenvalues = Some(eigs);
                sig
            }
            Err(e) => return non_generic(format!("signature failed: {e}"), diag),
        };
        sig
    };

    let rendered = format!("{}{}", name.render(), signature.render());
    Classification {
        verdict: Verdict::Perestroika {
            word: word.to_string(),
            name,
            signature,
            rendered,
        },
        diagnostics: diag,
    }
}

fn locations(mc: &MinimaCollection) -> Vec<Vec<f64>> {
    mc.records.iter().map(|r| r.location.clone()).collect()
}

/// Geometric conditions under which the rank route may report a singularity.
fn singularity_cross_check(
    mc: &MinimaCollection,
    word: &ShockWord,
    a3: Option<&A3Data>,
    cfg: &DeterminatorConfig,
    diag: &mut Diagnostics,
) -> Result<(), String> {
    let d = mc.dim;
    if word.mu() == d + 2 {
        return Err(format!(
            "rank route reported a singularity for word {} with mu = d + 2",
            word
        ));
    }
    if word.is_pure_a1() {
        if word.a1 == 3 && d >= 2 {
            let f = geometry_predicates(&locations(mc), cfg.predicate_tol);
            if f.collinear {
                return Err("rank says singularity A1^3 but the minima are collinear".into());
            }
            diag.notes.push("A1^3 singularity: minima not collinear".into());
        }
        if word.a1 == 4 && d == 3 {
            let f = geometry_predicates(&locations(mc), cfg.predicate_tol);
            if f.coplanar {
                return Err("rank says singularity A1^4 but the minima are coplanar".into());
            }
            diag.notes.push("A1^4 singularity: minima not coplanar".into());
        }
    } else if word.is_a1l_a3() {
        let a3 = a3.ok_or("missing A3 data")?;
        if word.a1 == 0 {
            if d >= 2 && a3.c_norm() <= cfg.c_zero_tol {
                return Err("rank says singularity A3 but C = 0".into());
            }
            diag.margins.insert("|C|".into(), a3.c_norm());
        }
        if word.a1 == 1 && d == 3 {
            let (_, _, nu) = kernel_coords_of_a1(mc, a3)?;
            if nu.abs() <= cfg.c_zero_tol {
                return Err(
                    "rank says singularity A1A3 but the A1 point lies in the kernel plane".into(),
                );
            }
            diag.margins.insert("A1 kernel-plane offset".into(), nu.abs());
        }
    }
    Ok(())
}

/// Extended name read from the sign system.
fn name_from_c(word: &ShockWord, m: &MMatrix, c: &[f64]) -> ExtendedName {
    let sgn = |x: f64| if x > 0.0 { 1i8 } else { -1i8 };
    match m.case {
        WordCase::PureA1 { m: count } => {
            ExtendedName::new((0..count).map(|i| sgn(c[i])).collect(), None, None)
        }
        WordCase::A1lA3 { l } => ExtendedName::new(
            (0..l).map(|i| sgn(c[i])).collect(),
            Some(sgn(c[l])),
            None,
        ),
        WordCase::A5 => {
            let _ = word;
            ExtendedName::new(vec![], None, Some(sgn(c[0])))
        }
    }
}

/// Kernel-frame coordinates (a1, s1, nu) of the A1 point of an A1 A3 word;
/// nu is the offset from the kernel plane (identically 0 when d = 2).
fn kernel_coords_of_a1(mc: &MinimaCollection, a3: &A3Data) -> Result<(f64, f64, f64), String> {
    let a3_idx = mc
        .records
        .iter()
        .position(|r| r.class == MinimumClass::M3)
        .ok_or("A3 record not found")?;
    let a1_idx = mc
        .records
        .iter()
        .position(|r| r.class == MinimumClass::M1)
        .ok_or("A1 record not found")?;
    let fc = to_frame(
        &a3.frame,
        &mc.records[a3_idx].location,
        &mc.records[a1_idx].location,
    );
    let cn = a3.c_norm();
    if cn == 0.0 {
        return Err("kernel plane undefined: C = 0".into());
    }
    match fc.len() {
        2 => {
            let s = fc[1] * a3.c[0].signum();
            Ok((fc[0], s, 0.0))
        }
        3 => {
            let s = (fc[1] * a3.c[0] + fc[2] * a3.c[1]) / cn;
            let nu = (fc[1] * a3.c[1] - fc[2] * a3.c[0]) / cn;
            Ok((fc[0], s, nu))
        }
        _ => Err("A1A3 words need d >= 2".into()),
    }
}

/// The Theorem-driven geometric route to the extended name. Returns None for
/// cases where the geometry adds nothing beyond the sign system.
fn perestroika_geometric_name(
    mc: &MinimaCollection,
    word: &ShockWord,
    a3: Option<&A3Data>,
    a5: Option<&A5Data>,
    cfg: &DeterminatorConfig,
    diag: &mut Diagnostics,
) -> Result<Option<ExtendedName>, String> {
    let d = mc.dim;
    let pts = locations(mc);
    if word.is_pure_a1() {
        match word.a1 {
            3 => {
                if d >= 2 {
                    let f = geometry_predicates(&pts, cfg.predicate_tol);
                    if !f.collinear {
                        return Err(
                            "rank says perestroika A1^3 but the minima are not collinear".into(),
                        );
                    }
                }
                Ok(Some(ExtendedName::new(vec![1, -1, -1], None, None)))
            }
            4 => {
                let f = geometry_predicates(&pts, cfg.predicate_tol);
                if d == 3 && !f.coplanar {
                    return Err("rank says perestroika A1^4 but the minima are not coplanar".into());
                }
                for skip in 0..4 {
                    let tri: Vec<Vec<f64>> = (0..4)
                        .filter(|&i| i != skip)
                        .map(|i| pts[i].clone())
                        .collect();
                    if geometry_predicates(&tri, cfg.predicate_tol).collinear {
                        return Err("three of the four minima are collinear".into());
                    }
                }
                if f.concyclic {
                    return Err("the four minima lie on one circle".into());
                }
                let hull = planar_hull_size(&pts).map_err(|e| e.to_string())?;
                diag.margins.insert("hull size".into(), hull as f64);
                let name = if hull == 3 {
                    ExtendedName::new(vec![1, -1, -1, -1], None, None)
                } else {
                    ExtendedName::new(vec![1, 1, -1, -1], None, None)
                };
                Ok(Some(name))
            }
            5 => {
                for skip in 0..5 {
                    let quad: Vec<Vec<f64>> = (0..5)
                        .filter(|&i| i != skip)
                        .map(|i| pts[i].clone())
                        .collect();
                    if geometry_predicates(&quad, cfg.predicate_tol).coplanar {
                        return Err("four of the five minima are coplanar".into());
                    }
                }
                if geometry_predicates(&pts, cfg.predicate_tol).cospherical {
                    return Err("the five minima lie on one sphere".into());
                }
                let arr: [Vec<f64>; 5] = [
                    pts[0].clone(),
                    pts[1].clone(),
                    pts[2].clone(),
                    pts[3].clone(),
                    pts[4].clone(),
                ];
                let region = enclosing_ball_region(&arr, cfg.predicate_tol)
                    .map_err(|e| format!("enclosing-ball region failed: {e}"))?;
                let name = match region {
                    BallRegion::Tetrahedron => ExtendedName::new(vec![1, -1, -1, -1, -1], None, None),
                    BallRegion::Dome(_) => ExtendedName::new(vec![1, 1, -1, -1, -1], None, None),
                    BallRegion::Lobule(_, _) => {
                        ExtendedName::new(vec![1, 1, 1, -1, -1], None, None)
                    }
                };
                Ok(Some(name))
            }
            _ => Ok(None),
        }
    } else if word.is_a1l_a3() {
        let a3 = a3.ok_or("missing A3 data")?;
        match word.a1 {
            0 => {
                if d >= 2 && a3.c_norm() > cfg.c_zero_tol {
                    return Err(format!(
                        "rank says perestroika A3 but |C| = {:.3e} is nonzero",
                        a3.c_norm()
                    ));
                }
                Ok(Some(ExtendedName::new(vec![], Some(-1), None)))
            }
            1 => {
                let (a1c, s1, nu) = kernel_coords_of_a1(mc, a3)?;
                if d == 3 && nu.abs() > 100.0 * cfg.c_zero_tol {
                    return Err(format!(
                        "rank says perestroika A1A3 but the A1 point is {nu:.3e} off the kernel plane"
                    ));
                }
                if a3.c_norm() <= cfg.c_zero_tol {
                    return Err("A1A3 perestroika needs C != 0".into());
                }
                diag.margins.insert("kernel (a1, s1) a".into(), a1c);
                diag.margins.insert("kernel (a1, s1) s".into(), s1);
                let region = kernel_region(a3.c_norm(), a1c, s1, cfg.c_zero_tol)
                    .map_err(|e| e.to_string())?;
                let (sa1, sa3) = kernel_region_signs(region)
                    .ok_or("A1 point on the kernel line or circle")?;
                Ok(Some(ExtendedName::new(vec![sa1], Some(sa3), None)))
            }
            2 => {
                if d != 3 {
                    return Err("word A1^2 A3 needs d = 3".into());
                }
                if a3.c_norm() <= cfg.c_zero_tol {
                    return Err("A1^2 A3 perestroika needs C != 0".into());
                }
                let a3_idx = mc
                    .records
                    .iter()
                    .position(|r| r.class == MinimumClass::M3)
                    .ok_or("A3 record not found")?;
                let origin = &mc.records[a3_idx].location;
                let mut coords = Vec::new();
                for (i, r) in mc.records.iter().enumerate() {
                    if i == a3_idx {
                        continue;
                    }
                    let fc = to_frame(&a3.frame, origin, &r.location);
                    let cn = a3.c_norm();
                    let s = (fc[1] * a3.c[0] + fc[2] * a3.c[1]) / cn;
                    let nu = (fc[1] * a3.c[1] - fc[2] * a3.c[0]) / cn;
                    coords.push([fc[0], s, nu]);
                }
                let (a1s, a3s) = regions::a12a3_signs(
                    a3.c_norm(),
                    coords[0],
                    coords[1],
                    cfg.sphere_samples,
                    cfg.c_zero_tol,
                )
                .map_err(|e| e.to_string())?;
                Ok(Some(ExtendedName::new(a1s.to_vec(), Some(a3s), None)))
            }
            _ => Ok(None),
        }
    } else if word.is_a5() {
        let a5 = a5.ok_or("missing A5 data")?;
        let s = a5_sign(a5, cfg.c_zero_tol).map_err(|e| e.to_string())?;
        Ok(Some(ExtendedName::new(vec![], None, Some(s))))
    } else {
        Ok(None)
    }
}

/// Convex-hull size of four roughly coplanar points (3 = triangle,
/// 4 = quadrangle), computed in the plane's own coordinates.
fn planar_hull_size(pts: &[Vec<f64>]) -> crate::error::Result<usize> {
    let d = pts[0].len();
    let n = pts.len();
    let mut mean = vec![0.0; d];
    for p in pts {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / n as f64;
        }
    }
    let mut centered = nalgebra::DMatrix::zeros(n, d);
    for (r, p) in pts.iter().enumerate() {
        for i in 0..d {
            centered[(r, i)] = p[i] - mean[i];
        }
    }
    let svd = centered.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested");
    let uv: Vec<[f64; 2]> = (0..n)
        .map(|r| {
            let mut q = [0.0; 2];
            for (axis, qq) in q.iter_mut().enumerate() {
                for i in 0..d {
                    *qq += centered[(r, i)] * vt[(axis, i)];
                }
            }
            q
        })
        .collect();
    // A point is interior iff it is a convex combination of the other three.
    let mut interior = 0;
    for i in 0..4 {
        let others: Vec<[f64; 2]> = (0..4).filter(|&j| j != i).map(|j| uv[j]).collect();
        if inside_triangle(&uv[i], &others[0], &others[1], &others[2]) {
            interior += 1;
        }
    }
    match interior {
        0 => Ok(4),
        1 => Ok(3),
        _ => Err(ShockError::Degenerate {
            reason: "ambiguous convex position of four points".into(),
        }),
    }
}

fn inside_triangle(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]) -> bool {
    let orient = |p: &[f64; 2], q: &[f64; 2], r: &[f64; 2]| -> f64 {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let d1 = orient(a, b, p);
    let d2 = orient(b, c, p);
    let d3 = orient(c, a, p);
    (d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0 && d3 <= 0.0)
}

/// Signature dispatch by word.
fn signature_dispatch(
    mc: &MinimaCollection,
    word: &ShockWord,
    a3: Option<&A3Data>,
    m: &MMatrix,
    c: &[f64],
    cfg: &DeterminatorConfig,
) -> crate::error::Result<(Signature, Vec<f64>)> {
    let d = mc.dim;
    if word.is_pure_a1() {
        return signature_a1m(mc, c, cfg.xi_tol);
    }
    if word.is_a1l_a3() && word.a1 == 0 {
        let a3 = a3.ok_or(ShockError::Invalid("missing A3 data".into()))?;
        return signature_a3(a3, cfg.xi_tol);
    }
    if word.is_a1l_a3() && word.a1 == 1 && d == 3 {
        let a3d = a3.ok_or(ShockError::Invalid("missing A3 data".into()))?;
        let a1_idx = mc
            .records
            .iter()
            .position(|r| r.class == MinimumClass::M1)
            .ok_or(ShockError::Invalid("A1 record not found".into()))?;
        // Hessian of the A1 minimum in the frame of the A3 minimum.
        let h = &mc.records[a1_idx].hessian;
        let hf = a3d.frame.transpose() * h * &a3d.frame;
        let _ = m;
        return signature_a1a3(&hf, a3d, c, cfg.xi_tol);
    }
    Err(ShockError::Invalid(format!(
        "no signature rule for word {} in d = {}",
        word, d
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action;
    use crate::field::FieldExpr;
    use crate::minima::find_global_minima;

    fn classify_point(field: &str, d: usize, x: &[f64], t: f64) -> Classification {
        let f = FieldExpr::parse(field, d).unwrap();
        let scfg = SearchConfig::default();
        let mc = find_global_minima(&f, x, t, &scfg).unwrap();
        classify(&mc, &DeterminatorConfig::default(), &scfg)
    }

    #[test]
    fn quartic_before_focus_is_outside() {
        let c = classify_point("a1^4/4 - a1^2/2", 1, &[0.0], 0.5);
        assert_eq!(c.verdict, Verdict::Outside);
    }

    #[test]
    fn quartic_after_focus_is_smooth_shock_point() {
        let c = classify_point("a1^4/4 - a1^2/2", 1, &[0.0], 2.0);
        match c.verdict {
            Verdict::Singularity { ref word } => assert_eq!(word, "A1^2"),
            other => panic!("expected A1^2 singularity, got {other:?}"),
        }
    }

    #[test]
    fn quartic_at_focus_is_a3_minus() {
        let c = classify_point("a1^4/4 - a1^2/2", 1, &[0.0], 1.0);
        match c.verdict {
            Verdict::Perestroika {
                ref word,
                ref name,
                signature,
                ref rendered,
            } => {
                assert_eq!(word, "A3");
                assert_eq!(name.a3_sign, Some(-1));
                assert_eq!(signature, Signature::TRIVIAL);
                assert_eq!(rendered, "A3^-");
            }
            other => panic!("expected A3^- perestroika, got {other:?}"),
        }
        // limit value at the focus is 0 with a single multiplicity-3 minimum
        let f = FieldExpr::parse("a1^4/4 - a1^2/2", 1).unwrap();
        let (v, mc) = action::limit_solution(&f, &[0.0], 1.0, &SearchConfig::default()).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(mc.records.len(), 1);
    }

    #[test]
    fn off_axis_smooth_point_is_outside() {
        let c = classify_point("a1^4/4 - a1^2/2", 1, &[0.3], 0.5);
        assert_eq!(c.verdict, Verdict::Outside);
    }
}
