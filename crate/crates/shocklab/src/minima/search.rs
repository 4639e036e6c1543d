//! Multistart search for all tied global minima of the action.
//!
//! The search is over the certified ball |a - x| <= R, with R derived from a
//! linear minorant of the field: outside the ball the quadratic penalty in
//! the action exceeds the best value seen at the center, so the global
//! minimum cannot escape.

use crate::action;
use crate::error::{Result, ShockError};
use crate::field::{bounds, FieldExpr};
use crate::minima::{classify_minimum, MinimaCollection, MinimumRecord, SearchConfig};
use rayon::prelude::*;

/// Radius of a ball around x certified to contain every global minimum of
/// `w(a) = phi0(a) + |a-x|^2/(2t)`.
pub fn certified_radius(field: &FieldExpr, x: &[f64], t: f64, cfg: &SearchConfig) -> Result<f64> {
    // Any sampled value bounds the global minimum from above.
    certified_radius_for_level(field, x, t, cfg, field.eval(x))
}

/// Radius of a ball around x outside which `w > level` is certified.
pub fn certified_radius_for_level(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    cfg: &SearchConfig,
    level: f64,
) -> Result<f64> {
    let (c0, c1) = match (cfg.bound_c0, cfg.bound_c1) {
        (Some(c0), Some(c1)) => (c0, c1),
        _ => bounds::linear_minorant(field)?,
    };
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let slack = (level + c0 + c1 * xnorm).max(0.0);
    let r = t * c1 + (t * t * c1 * c1 + 2.0 * t * slack).sqrt();
    Ok((r * cfg.radius_margin).max(1e-3))
}

/// Newton polish of a seed toward a local minimum of w. Returns the location
/// and value, or None if the iteration failed to converge.
pub fn newton_polish(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    seed: &[f64],
    radius: f64,
    cfg: &SearchConfig,
) -> Option<(Vec<f64>, f64)> {
    let d = field.dim();
    let mut a = seed.to_vec();
    let mut value = action::action_value(field, x, t, &a).ok()?;
    for _ in 0..cfg.max_newton_iter {
        let jet = action::action_jet(field, x, t, &a, 2).ok()?;
        let g = jet.gradient();
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < cfg.grad_tol * (1.0 + value.abs()) {
            return Some((a, value));
        }
        let h = jet.hessian();
        let mut step = match h.clone().lu().solve(&nalgebra::DVector::from_column_slice(&g)) {
            Some(s) => (-s).iter().cloned().collect::<Vec<f64>>(),
            None => g.iter().map(|v| -v).collect(),
        };
        // Keep the step a descent direction; otherwise fall back to steepest
        // descent scaled by the penalty curvature.
        let dot: f64 = step.iter().zip(&g).map(|(s, gi)| s * gi).sum();
        if !dot.is_finite() || dot >= 0.0 {
            step = g.iter().map(|v| -v * t).collect();
        }
        // Backtracking line search on the value.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand: Vec<f64> = a
                .iter()
                .zip(&step)
                .map(|(ai, si)| ai + lambda * si)
                .collect();
            // Clamp into the certified ball.
            let mut dist2 = 0.0;
            for i in 0..d {
                dist2 += (cand[i] - x[i]) * (cand[i] - x[i]);
            }
            let dist = dist2.sqrt();
            if dist > radius {
                let f = radius / dist;
                for i in 0..d {
                    cand[i] = x[i] + (cand[i] - x[i]) * f;
                }
            }
            let v = action::action_value(field, x, t, &cand).ok()?;
            if v <= value - 1e-12 * value.abs() || v < value {
                let moved: f64 = a
                    .iter()
                    .zip(&cand)
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
                    .sqrt();
                a = cand;
                value = v;
                accepted = true;
                if moved < 1e-15 * (1.0 + radius) {
                    return Some((a, value));
                }
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // No descent left at this scale: treat as converged if the
            // gradient is already small, else report failure.
            if gnorm < 1e-7 * (1.0 + value.abs()) {
                return Some((a, value));
            }
            return None;
        }
    }
    let jet = action::action_jet(field, x, t, &a, 1).ok()?;
    let g = jet.gradient();
    let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if gnorm < 1e-6 * (1.0 + value.abs()) {
        Some((a, value))
    } else {
        None
    }
}

/// Dense-grid seeding over the certified ball followed by Newton polish and
/// clustering. Grid nodes that are local minima of the sampled values are
/// polished (polishing from the remaining nodes lands in the same basins).
pub fn find_global_minima(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    cfg: &SearchConfig,
) -> Result<MinimaCollection> {
    find_global_minima_seeded(field, x, t, cfg, &[])
}

/// Same as [`find_global_minima`] with extra seed hints (used by the tracker
/// to continue minima across neighboring grid points).
pub fn find_global_minima_seeded(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    cfg: &SearchConfig,
    hints: &[Vec<f64>],
) -> Result<MinimaCollection> {
    let d = field.dim();
    let clusters = search_tied_clusters(field, x, t, cfg, hints)?;
    let y_star = clusters
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    let mut records: Vec<MinimumRecord> = clusters
        .into_iter()
        .map(|(loc, val)| {
            let jet = action::action_jet(field, x, t, &loc, 8)?;
            // A record that cannot be classified stays in the collection as
            // a non-generic minimum rather than failing the whole search.
            let class = classify_minimum(&jet, cfg)
                .unwrap_or_else(|e| crate::minima::MinimumClass::NonGeneric(e.to_string()));
            let hessian = jet.hessian();
            Ok(MinimumRecord {
                location: loc,
                value: val,
                class,
                hessian,
                jet,
            })
        })
        .collect::<Result<_>>()?;
    records.sort_by(|a, b| {
        a.location
            .partial_cmp(&b.location)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(MinimaCollection {
        records,
        y_star,
        tie_tolerance: cfg.tie_tol,
        dim: d,
    })
}

/// The tied global-minimum clusters (location, value) without the order-8
/// jet classification work; this is what grid scans need.
pub fn search_tied_clusters(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    cfg: &SearchConfig,
    hints: &[Vec<f64>],
) -> Result<Vec<(Vec<f64>, f64)>> {
    if !(t > 0.0) {
        return Err(ShockError::NonPositiveTime { t });
    }
    let radius = certified_radius(field, x, t, cfg)?;

    let mut seeds: Vec<Vec<f64>> = Vec::new();
    seeds.push(x.to_vec());
    for h in hints {
        seeds.push(h.clone());
    }
    seeds.extend(grid_local_minima(field, x, t, radius, cfg.grid_per_axis));

    let polished: Vec<(Vec<f64>, f64)> = seeds
        .par_iter()
        .filter_map(|s| newton_polish(field, x, t, s, radius, cfg))
        .collect();
    if polished.is_empty() {
        return Err(ShockError::NewtonDiverged {
            cell: format!("all {} seeds at x={:?}, t={}", seeds.len(), x, t),
        });
    }

    let mut clusters = cluster_points(polished, cfg.cluster_radius);

    // Plain Newton converges only linearly into degenerate minima, which
    // leaves location errors around 1e-4; recenter those with a local
    // polynomial model before values are compared. Refinement can also move
    // saddle-trapped points into a well, so re-cluster afterwards.
    for (loc, val) in clusters.iter_mut() {
        if let Some(v) = refine_degenerate(field, x, t, loc, cfg) {
            *val = v;
        }
    }
    // Degenerate recentering is limited to roughly (eps)^(1/3) ~ 1e-5 in
    // location by gradient cancellation, so the second clustering pass must
    // not resolve below that.
    let clusters = cluster_points(clusters, cfg.cluster_radius.max(1e-5));

    let y_star = clusters
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);

    // The certificate guarantees the minimum is strictly interior; a
    // boundary-pinned best value means the caller's bounds were wrong.
    for (loc, val) in &clusters {
        if (*val - y_star).abs() <= cfg.tie_tol {
            let dist: f64 = loc
                .iter()
                .zip(x)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            if dist > radius * 0.999 {
                return Err(ShockError::SearchRegionInsufficient {
                    reason: format!("tied minimum pinned to the search boundary at {:?}", loc),
                });
            }
        }
    }

    let mut tied: Vec<(Vec<f64>, f64)> = clusters
        .into_iter()
        .filter(|(_, v)| *v - y_star <= cfg.tie_tol)
        .collect();
    tied.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(tied)
}

/// Greedy clustering by location; each cluster keeps its best point.
fn cluster_points(mut points: Vec<(Vec<f64>, f64)>, radius: f64) -> Vec<(Vec<f64>, f64)> {
    points.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut clusters: Vec<(Vec<f64>, f64)> = Vec::new();
    for (loc, val) in points {
        let mut merged = false;
        for (cl, _) in clusters.iter_mut() {
            let dist: f64 = cl
                .iter()
                .zip(&loc)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            if dist < radius {
                merged = true;
                break;
            }
        }
        if !merged {
            clusters.push((loc, val));
        }
    }
    clusters
}

/// Recenter a polished point onto a nearly degenerate minimum: Newton on the
/// non-degenerate block plus exact minimization of the order-6 polynomial
/// model along the kernel direction. Returns the refined value if the point
/// was near-degenerate and the refinement succeeded.
fn refine_degenerate(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    loc: &mut [f64],
    cfg: &SearchConfig,
) -> Option<f64> {
    let d = field.dim();
    // Cheap pre-check on the order-2 jet before any order-6 work.
    {
        let jet2 = action::action_jet(field, x, t, loc, 2).ok()?;
        let sym = nalgebra::SymmetricEigen::new(jet2.hessian());
        let lmin = sym.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let lmax = sym.eigenvalues.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if lmin > cfg.degeneracy_ratio.sqrt() * lmax.max(cfg.hessian_floor) {
            return None;
        }
    }
    let original = loc.to_vec();
    let mut touched = false;
    for _ in 0..8 {
        let jet = action::action_jet(field, x, t, loc, 6).ok()?;
        let g = jet.gradient();
        let h = jet.hessian();
        let sym = nalgebra::SymmetricEigen::new(h);
        let mut kmin = 0;
        for i in 1..d {
            if sym.eigenvalues[i] < sym.eigenvalues[kmin] {
                kmin = i;
            }
        }
        let lmax = (0..d).map(|i| sym.eigenvalues[i].abs()).fold(0.0, f64::max);
        let loose = cfg.degeneracy_ratio.sqrt() * lmax.max(cfg.hessian_floor);
        if sym.eigenvalues[kmin] > loose {
            break;
        }
        touched = true;
        let mut delta = vec![0.0; d];
        for i in 0..d {
            if i == kmin {
                continue;
            }
            let lam = sym.eigenvalues[i];
            if lam.abs() < 1e-300 {
                continue;
            }
            let gv: f64 = (0..d).map(|r| g[r] * sym.eigenvectors[(r, i)]).sum();
            for (r, dr) in delta.iter_mut().enumerate() {
                *dr -= gv / lam * sym.eigenvectors[(r, i)];
            }
        }
        // Restriction of the model along the kernel direction.
        let v: Vec<f64> = (0..d).map(|r| sym.eigenvectors[(r, kmin)]).collect();
        let mut poly = [0.0f64; 7];
        for (e, coef) in jet.terms() {
            if coef == 0.0 {
                continue;
            }
            let deg = (e[0] + e[1] + e[2]) as usize;
            let mut term = coef;
            for i in 0..d {
                term *= v[i].powi(e[i] as i32);
            }
            poly[deg] += term;
        }
        let mut dcoef = [0.0f64; 6];
        for k in 1..=6 {
            dcoef[k - 1] = poly[k] * k as f64;
        }
        let mut s_best = 0.0;
        let mut best_abs = f64::INFINITY;
        for s in crate::polyroots::real_roots(&dcoef) {
            // second derivative of the restriction
            let mut p2 = 0.0;
            for k in 2..=6 {
                p2 += poly[k] * (k * (k - 1)) as f64 * s.powi(k as i32 - 2);
            }
            if p2 >= -1e-12 && s.abs() < best_abs {
                best_abs = s.abs();
                s_best = s;
            }
        }
        let mut norm2 = 0.0;
        for (r, dr) in delta.iter_mut().enumerate() {
            *dr += s_best * v[r];
            norm2 += *dr * *dr;
        }
        for (l, dr) in loc.iter_mut().zip(&delta) {
            *l += dr;
        }
        if norm2.sqrt() < 1e-14 {
            break;
        }
    }
    if !touched {
        return None;
    }
    // The polynomial model can step to a far non-critical point when the
    // restriction has no nearby root; verify and revert in that case.
    let jet = action::action_jet(field, x, t, loc, 1).ok()?;
    let g = jet.gradient();
    let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if gnorm > 1e-6 * (1.0 + jet.value().abs()) {
        loc.copy_from_slice(&original);
        return None;
    }
    Some(jet.value())
}

/// Sample w on a grid over the bounding cube of the ball and return the
/// nodes that are local minima of the sampled values, plus the global best.
fn grid_local_minima(
    field: &FieldExpr,
    x: &[f64],
    t: f64,
    radius: f64,
    n: usize,
) -> Vec<Vec<f64>> {
    let d = field.dim();
    let n = n.max(3);
    let total = n.pow(d as u32);
    let coord = |k: usize, i: usize| -> f64 { x[i] - radius + 2.0 * radius * k as f64 / (n - 1) as f64 };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat;
            let mut p = vec![0.0; d];
            for i in 0..d {
                p[i] = coord(idx % n, i);
                idx /= n;
            }
            action::action_value(field, x, t, &p).unwrap_or(f64::INFINITY)
        })
        .collect();
    let mut out = Vec::new();
    let mut best = (f64::INFINITY, 0usize);
    for flat in 0..total {
        if values[flat] < best.0 {
            best = (values[flat], flat);
        }
        let mut idx = flat;
        let mut is_min = true;
        let mut stride = 1usize;
        for _ in 0..d {
            let k = idx % n;
            if k > 0 && values[flat - stride] < values[flat] {
                is_min = false;
                break;
            }
            if k + 1 < n && values[flat + stride] < values[flat] {
                is_min = false;
                break;
            }
            idx /= n;
            stride *= n;
        }
        if is_min {
            let mut p = vec![0.0; d];
            let mut idx = flat;
            for i in 0..d {
                p[i] = coord(idx % n, i);
                idx /= n;
            }
            out.push(p);
        }
    }
    let mut p = vec![0.0; d];
    let mut idx = best.1;
    for i in 0..d {
        p[i] = coord(idx % n, i);
        idx /= n;
    }
    out.push(p);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minima::MinimumClass;
    use approx::assert_relative_eq;

    fn quartic() -> FieldExpr {
        FieldExpr::parse("a1^4/4 - a1^2/2", 1).unwrap()
    }

    #[test]
    fn convex_total_action() {
        // t = 0.5: w = a^4/4 + a^2/2, single Morse minimum at 0, value 0.
        let mc = find_global_minima(&quartic(), &[0.0], 0.5, &SearchConfig::default()).unwrap();
        assert_eq!(mc.records.len(), 1);
        assert_relative_eq!(mc.records[0].location[0], 0.0, epsilon = 1e-8);
        assert_relative_eq!(mc.y_star, 0.0, epsilon = 1e-12);
        assert_eq!(mc.records[0].class, MinimumClass::M1);
    }

    #[test]
    fn two_tied_minima() {
        // t = 2: w = a^4/4 - a^2/4, minima at +-1/sqrt(2), value -1/16.
        let mc = find_global_minima(&quartic(), &[0.0], 2.0, &SearchConfig::default()).unwrap();
        assert_eq!(mc.records.len(), 2);
        let s = 0.5f64.sqrt();
        assert_relative_eq!(mc.records[0].location[0], -s, epsilon = 1e-9);
        assert_relative_eq!(mc.records[1].location[0], s, epsilon = 1e-9);
        assert_relative_eq!(mc.y_star, -1.0 / 16.0, epsilon = 1e-12);
        assert_eq!(mc.word().unwrap().to_string(), "A1^2");
    }

    #[test]
    fn degenerate_minimum_at_focus() {
        // t = 1: w = a^4/4 exactly, one multiplicity-3 minimum at 0.
        let mc = find_global_minima(&quartic(), &[0.0], 1.0, &SearchConfig::default()).unwrap();
        assert_eq!(mc.records.len(), 1);
        assert_eq!(mc.records[0].class, MinimumClass::M3);
        assert_eq!(mc.word().unwrap().to_string(), "A3");
    }

    #[test]
    fn translation_shifts_value_only() {
        let f = quartic();
        let g = FieldExpr::parse("a1^4/4 - a1^2/2 + 3", 1).unwrap();
        let cfg = SearchConfig::default();
        let a = find_global_minima(&f, &[0.2], 1.7, &cfg).unwrap();
        let b = find_global_minima(&g, &[0.2], 1.7, &cfg).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        assert_relative_eq!(b.y_star - a.y_star, 3.0, epsilon = 1e-10);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_relative_eq!(ra.location[0], rb.location[0], epsilon = 1e-8);
        }
    }
}
