//! Geometric predicates on small point sets, decided through singular values
//! of the standard lifted matrices, and the minimal-enclosing-ball region
//! test used by the five-point case.

use crate::error::{Result, ShockError};
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredicateFlags {
    pub collinear: bool,
    pub coplanar: bool,
    pub concyclic: bool,
    pub cospherical: bool,
}

/// Relative smallest-singular-value tests on 3..=5 points.
///
/// * collinear: centered coordinates have rank <= 1;
/// * coplanar (d = 3): rank <= 2 (trivially true in the plane);
/// * concyclic: the (1, p, |p|^2) lift has rank <= d + 1 for points on a
///   circle in the plane, or rank <= 4 together with coplanarity in space;
/// * cospherical (d = 3, 5 points): lift rank <= 4.
pub fn geometry_predicates(points: &[Vec<f64>], tol: f64) -> PredicateFlags {
    let n = points.len();
    assert!((3..=5).contains(&n), "predicates take 3 to 5 points");
    let d = points[0].len();

    let collinear = affine_rank_at_most(points, 1, tol);
    let coplanar = if d <= 2 {
        true
    } else {
        affine_rank_at_most(points, 2, tol)
    };

    // Lift (1, p, |p|^2); m points lie on a sphere or hyperplane iff the
    // lift has rank <= d + 1.
    let mut lift = DMatrix::zeros(n, d + 2);
    for (r, p) in points.iter().enumerate() {
        lift[(r, 0)] = 1.0;
        let mut sq = 0.0;
        for (i, x) in p.iter().enumerate() {
            lift[(r, 1 + i)] = *x;
            sq += x * x;
        }
        lift[(r, d + 1)] = sq;
    }
    let lift_rank_le = |k: usize| rank_at_most(&lift, k, tol);

    let (concyclic, cospherical) = match d {
        1 => (false, false),
        2 => {
            let on_circle = n >= 4 && lift_rank_le(3);
            (on_circle, false)
        }
        _ => {
            // A circle in space is a coplanar sphere section.
            let on_sphere = n >= 5 && lift_rank_le(4);
            let on_circle = coplanar && lift_rank_le(4) && n >= 4;
            (on_circle, on_sphere)
        }
    };
    PredicateFlags {
        collinear,
        coplanar,
        concyclic,
        cospherical,
    }
}

fn affine_rank_at_most(points: &[Vec<f64>], k: usize, tol: f64) -> bool {
    let n = points.len();
    let d = points[0].len();
    let mut mean = vec![0.0; d];
    for p in points {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / n as f64;
        }
    }
    let mut mat = DMatrix::zeros(n, d);
    for (r, p) in points.iter().enumerate() {
        for i in 0..d {
            mat[(r, i)] = p[i] - mean[i];
        }
    }
    rank_at_most(&mat, k, tol)
}

fn rank_at_most(m: &DMatrix<f64>, k: usize, tol: f64) -> bool {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return true;
    }
    sv.iter().filter(|&&s| s > tol * smax).count() <= k
}

/// Region of the fifth point in the minimal enclosing ball of five points
/// in space: the four support points span a tetrahedron whose face planes
/// cut the ball into the inner tetrahedron, 4 domes, and 6 lobules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BallRegion {
    Tetrahedron,
    /// Index of the face whose half-space is violated.
    Dome(usize),
    /// Indices of the two violated faces.
    Lobule(usize, usize),
}

/// Classify the position of the non-support point among the 11 parts of the
/// minimal enclosing ball. The ball must be determined by exactly 4 of the
/// points, all five must be enclosed, and the remaining point must violate
/// at most two face half-spaces.
pub fn enclosing_ball_region(points: &[Vec<f64>; 5], tol: f64) -> Result<BallRegion> {
    let (center, radius, support) = minimal_enclosing_ball(points)?;
    if support.len() != 4 {
        return Err(ShockError::Degenerate {
            reason: format!(
                "minimal enclosing ball has support of size {} (needs 4)",
                support.len()
            ),
        });
    }
    let fifth = (0..5)
        .find(|i| !support.contains(i))
        .expect("five points, four supports");
    let p = &points[fifth];
    let dist = dist(p, &center);
    if dist > radius * (1.0 + 1e-9) {
        return Err(ShockError::Invalid(
            "fifth point lies outside the minimal enclosing ball".into(),
        ));
    }
    // Face i of the support tetrahedron is opposite support vertex i; the
    // fifth point violates the face when it lies on the other side from
    // that vertex.
    let mut violated = Vec::new();
    for i in 0..4 {
        let verts: Vec<&Vec<f64>> = (0..4)
            .filter(|&j| j != i)
            .map(|j| &points[support[j]])
            .collect();
        let apex = &points[support[i]];
        let n = plane_normal(verts[0], verts[1], verts[2]);
        let off: f64 = (0..3).map(|k| n[k] * (apex[k] - verts[0][k])).sum();
        let val: f64 = (0..3).map(|k| n[k] * (p[k] - verts[0][k])).sum();
        let scale = off.abs().max(1e-300);
        if val / off.signum() < -tol * scale {
            violated.push(i);
        }
    }
    match violated.len() {
        0 => Ok(BallRegion::Tetrahedron),
        1 => Ok(BallRegion::Dome(violated[0])),
        2 => Ok(BallRegion::Lobule(violated[0], violated[1])),
        k => Err(ShockError::Degenerate {
            reason: format!("fifth point violates {} face half-spaces", k),
        }),
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn plane_normal(a: &[f64], b: &[f64], c: &[f64]) -> [f64; 3] {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Minimal enclosing ball of five points by exact case analysis over support
/// subsets of size <= 4 (the optimum is determined by one of them).
pub fn minimal_enclosing_ball(points: &[Vec<f64>; 5]) -> Result<(Vec<f64>, f64, Vec<usize>)> {
    let mut best: Option<(Vec<f64>, f64, Vec<usize>)> = None;
    let mut consider = |center: Vec<f64>, radius: f64, support: Vec<usize>| {
        let encloses = points
            .iter()
            .all(|p| dist(p, &center) <= radius * (1.0 + 1e-9) + 1e-12);
        if encloses {
            match &best {
                Some((_, r, _)) if *r <= radius => {}
                _ => best = Some((center, radius, support)),
            }
        }
    };
    for i in 0..5 {
        for j in (i + 1)..5 {
            let c: Vec<f64> = (0..3)
                .map(|k| 0.5 * (points[i][k] + points[j][k]))
                .collect();
            let r = dist(&points[i], &c);
            consider(c, r, vec![i, j]);
            for k in (j + 1)..5 {
                if let Some((c, r)) = circumcenter(&[&points[i], &points[j], &points[k]]) {
                    consider(c, r, vec![i, j, k]);
                }
                for l in (k + 1)..5 {
                    if let Some((c, r)) =
                        circumsphere(&points[i], &points[j], &points[k], &points[l])
                    {
                        consider(c, r, vec![i, j, k, l]);
                    }
                }
            }
        }
    }
    best.ok_or(ShockError::Degenerate {
        reason: "no enclosing ball candidate (degenerate point set)".into(),
    })
}

/// Center of the smallest ball through three points (lies in their plane).
fn circumcenter(p: &[&Vec<f64>; 3]) -> Option<(Vec<f64>, f64)> {
    let a = p[0];
    let u = [p[1][0] - a[0], p[1][1] - a[1], p[1][2] - a[2]];
    let v = [p[2][0] - a[0], p[2][1] - a[1], p[2][2] - a[2]];
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let uv: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
    let det = uu * vv - uv * uv;
    if det.abs() < 1e-14 * (uu * vv).max(1e-300) {
        return None;
    }
    let s = 0.5 * (uu * vv - uv * vv) / det;
    let t = 0.5 * (uu * vv - uv * uu) / det;
    let c: Vec<f64> = (0..3).map(|k| a[k] + s * u[k] + t * v[k]).collect();
    let r = dist(a, &c);
    Some((c, r))
}

fn circumsphere(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Option<(Vec<f64>, f64)> {
    // Solve 2 (p_i - a) . x = |p_i|^2 - |a|^2 for the center.
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    let sq = |p: &[f64]| -> f64 { p.iter().map(|x| x * x).sum() };
    for (r, p) in [b, c, d].into_iter().enumerate() {
        for k in 0..3 {
            m[(r, k)] = 2.0 * (p[k] - a[k]);
        }
        rhs[r] = sq(p) - sq(a);
    }
    let center = m.lu().solve(&rhs)?;
    let cv: Vec<f64> = center.iter().cloned().collect();
    let r = dist(a, &cv);
    Some((cv, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[[f64; 2]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn collinear_triple() {
        let f = geometry_predicates(&pts(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]), 1e-6);
        assert!(f.collinear);
    }

    #[test]
    fn unit_circle_quadruple() {
        let f = geometry_predicates(
            &pts(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
            1e-6,
        );
        assert!(f.concyclic);
        assert!(!f.collinear);
    }

    #[test]
    fn perturbed_quadruple_not_concyclic() {
        let f = geometry_predicates(
            &pts(&[[1.01, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]),
            1e-6,
        );
        assert!(!f.concyclic);
    }

    fn five(a: [f64; 3]) -> [Vec<f64>; 5] {
        [
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
            a.to_vec(),
        ]
    }

    #[test]
    fn tetrahedron_dome_lobule() {
        assert_eq!(
            enclosing_ball_region(&five([0.0, 0.0, 0.0]), 1e-9).unwrap(),
            BallRegion::Tetrahedron
        );
        assert!(matches!(
            enclosing_ball_region(&five([-0.6, -0.6, -0.6]), 1e-9).unwrap(),
            BallRegion::Dome(_)
        ));
        assert!(matches!(
            enclosing_ball_region(&five([1.5, 0.0, 0.0]), 1e-9).unwrap(),
            BallRegion::Lobule(_, _)
        ));
    }

    #[test]
    fn outside_ball_is_an_error() {
        assert!(enclosing_ball_region(&five([5.0, 0.0, 0.0]), 1e-9).is_err());
    }
}
