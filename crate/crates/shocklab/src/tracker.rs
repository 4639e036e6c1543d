//! Space-time scanning: extract instant shocks of a concrete field, detect
//! changes of their discrete topology along time, localize the events, run
//! the determinator on them, and check the topological restriction against
//! the extracted after-geometry.

use crate::action;
use crate::determinator::{classify, Classification, DeterminatorConfig};
use crate::error::{Result, ShockError};
use crate::field::FieldExpr;
use crate::geometry::{
    extract_interfaces, is_contractible, Contractibility, GeometryInvariants, GridSpec,
    RegionField, ShockGeometry,
};
use crate::minima::{self, MinimaCollection, SearchConfig};
use serde::Serialize;

/// Scan configuration; spatial window, time range, and localization
/// tolerances.
#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub window_lo: Vec<f64>,
    pub window_hi: Vec<f64>,
    /// Spatial grid nodes per axis.
    pub resolution: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Time-march steps between t_min and t_max.
    pub time_steps: usize,
    /// Bisection tolerance in time.
    pub time_tol: f64,
    /// Target accuracy of the event point in space.
    pub space_tol: f64,
    /// Tie tolerance used when classifying at a localized event.
    pub event_tie_tol: f64,
    /// Halfwidth of the before/after clips, in main-grid cells.
    pub clip_cells: usize,
    /// Clip time offset, as a fraction of the time step.
    pub clip_dt_fraction: f64,
    /// Seeding grid per axis for the per-vertex minima search.
    pub seed_grid: usize,
    /// Argmin matching radius for region identity across grid edges.
    pub match_radius: f64,
    pub search: SearchConfig,
}

impl ScanConfig {
    pub fn new_1d(t_min: f64, t_max: f64) -> ScanConfig {
        ScanConfig {
            window_lo: vec![-2.0],
            window_hi: vec![2.0],
            resolution: 129,
            t_min,
            t_max,
            time_steps: 40,
            time_tol: 1e-6,
            space_tol: 1e-5,
            event_tie_tol: 1e-4,
            clip_cells: 6,
            clip_dt_fraction: 0.5,
            seed_grid: 24,
            match_radius: 1e-2,
            search: SearchConfig::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.window_lo.len()
    }

    fn fast_search(&self) -> SearchConfig {
        SearchConfig {
            grid_per_axis: self.seed_grid,
            ..self.search.clone()
        }
    }
}

/// Region data at one spatial sample: the dominant argmin and enough context
/// to match regions across grid edges.
#[derive(Debug, Clone)]
pub struct RegionSample {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub near_degenerate: bool,
}

/// The argmin-region structure of one time slice.
pub struct SliceField<'a> {
    pub field: &'a FieldExpr,
    pub t: f64,
    cfg: ScanConfig,
    radius: f64,
    hints: Vec<Vec<f64>>,
}

impl<'a> SliceField<'a> {
    pub fn new(field: &'a FieldExpr, t: f64, cfg: &ScanConfig) -> Result<SliceField<'a>> {
        // One conservative polish radius for every point of the window.
        let center: Vec<f64> = cfg
            .window_lo
            .iter()
            .zip(&cfg.window_hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let diag: f64 = cfg
            .window_lo
            .iter()
            .zip(&cfg.window_hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();
        let radius = minima::certified_radius(field, &center, t, &cfg.search)? + diag;
        // t-independent seed hints: grid local minima of the field itself
        // over the enlarged window.
        let hints = field_well_hints(field, &center, radius, cfg.seed_grid.max(16));
        Ok(SliceField {
            field,
            t,
            cfg: cfg.clone(),
            radius,
            hints,
        })
    }

    fn tied_clusters(&self, x: &[f64]) -> Result<Vec<(Vec<f64>, f64)>> {
        minima::search_tied_clusters(self.field, x, self.t, &self.cfg.fast_search(), &self.hints)
    }

    /// Continue a minimum from a nearby argmin location to the problem at x.
    fn continue_minimum(&self, x: &[f64], from: &[f64]) -> Option<(Vec<f64>, f64)> {
        minima::newton_polish(
            self.field,
            x,
            self.t,
            from,
            self.radius,
            &self.cfg.search,
        )
    }

    /// Does the dominant well stay the same along [pa, pb]? Continuation of
    /// one endpoint's argmin to the other can silently slide through a fold
    /// when its well disappears in between, so any large continuation jump
    /// triggers a recursive midpoint verification. This keeps sub-cell
    /// two-well zones (young shocks just after a birth) detectable.
    fn same_well(&self, wa: &[f64], wb: &[f64], pa: &[f64], pb: &[f64], depth: usize) -> bool {
        let dist = |u: &[f64], v: &[f64]| -> f64 {
            u.iter()
                .zip(v)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let Some((ca, _)) = self.continue_minimum(pb, wa) else {
            return false;
        };
        if dist(&ca, wb) > self.cfg.match_radius {
            return false;
        }
        // Identity preserved end to end; guard against a fold slip.
        if dist(&ca, wa) <= 10.0 * self.cfg.match_radius || depth == 0 {
            return true;
        }
        let pm: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| 0.5 * (x + y)).collect();
        let (Some((ma, _)), Some((mb, _))) =
            (self.continue_minimum(&pm, wa), self.continue_minimum(&pm, wb))
        else {
            return false;
        };
        if dist(&ma, &mb) > self.cfg.match_radius {
            return false;
        }
        self.same_well(wa, &ma, pa, &pm, depth - 1) && self.same_well(&mb, wb, &pm, pb, depth - 1)
    }
}

fn field_well_hints(field: &FieldExpr, center: &[f64], radius: f64, n: usize) -> Vec<Vec<f64>> {
    let d = field.dim();
    let total = n.pow(d as u32);
    let coord = |k: usize, i: usize| center[i] - radius + 2.0 * radius * k as f64 / (n - 1) as f64;
    let mut values = vec![0.0; total];
    for (flat, v) in values.iter_mut().enumerate() {
        let mut idx = flat;
        let mut p = vec![0.0; d];
        for i in 0..d {
            p[i] = coord(idx % n, i);
            idx /= n;
        }
        *v = field.eval(&p);
    }
    let mut out = Vec::new();
    for flat in 0..total {
        let mut idx = flat;
        let mut stride = 1;
        let mut is_min = true;
        for _ in 0..d {
            let k = idx % n;
            if (k > 0 && values[flat - stride] < values[flat])
                || (k + 1 < n && values[flat + stride] < values[flat])
            {
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
    out
}

impl<'a> RegionField for SliceField<'a> {
    type Label = RegionSample;

    fn sample(&self, p: &[f64]) -> RegionSample {
        match self.tied_clusters(p) {
            Ok(clusters) => {
                let best = clusters
                    .iter()
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .cloned()
                    .unwrap_or((p.to_vec(), f64::INFINITY));
                let near_degenerate = match crate::action::action_jet(
                    self.field,
                    p,
                    self.t,
                    &best.0,
                    2,
                ) {
                    Ok(jet) => {
                        let sym = nalgebra::SymmetricEigen::new(jet.hessian());
                        let lmin =
                            sym.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                        let lmax = sym.eigenvalues.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                        lmin
                            < self.cfg.search.degeneracy_ratio.sqrt().sqrt()
                                * lmax.max(self.cfg.search.hessian_floor)
                    }
                    Err(_) => false,
                };
                RegionSample {
                    argmin: best.0,
                    value: best.1,
                    near_degenerate,
                }
            }
            Err(_) => RegionSample {
                argmin: p.to_vec(),
                value: f64::INFINITY,
                near_degenerate: false,
            },
        }
    }

    fn same_region(&self, a: &RegionSample, b: &RegionSample, pa: &[f64], pb: &[f64]) -> bool {
        self.same_well(&a.argmin, &b.argmin, pa, pb, 7)
    }

    fn crossing(&self, pa: &[f64], pb: &[f64], la: &RegionSample, lb: &RegionSample) -> f64 {
        // Track both competing wells to the midpoint and compare values.
        // When a tracked well has disappeared before the midpoint, its
        // continuation slides onto the other well; the crossing then lies on
        // the near side of the midpoint.
        let dist = |u: &[f64], v: &[f64]| -> f64 {
            u.iter()
                .zip(v)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let slip = 10.0 * self.cfg.match_radius;
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut wa = la.argmin.clone();
        let mut wb = lb.argmin.clone();
        for _ in 0..28 {
            let mid = 0.5 * (lo + hi);
            let pm: Vec<f64> = pa.iter().zip(pb).map(|(a, b)| a + mid * (b - a)).collect();
            let ca = self.continue_minimum(&pm, &wa);
            let cb = self.continue_minimum(&pm, &wb);
            match (ca, cb) {
                (Some((la2, va)), Some((lb2, vb))) => {
                    if dist(&la2, &lb2) <= self.cfg.match_radius {
                        let slip_a = dist(&la2, &wa) > slip;
                        let slip_b = dist(&lb2, &wb) > slip;
                        if slip_a && !slip_b {
                            hi = mid;
                            wb = lb2;
                        } else if slip_b && !slip_a {
                            lo = mid;
                            wa = la2;
                        } else {
                            break;
                        }
                    } else if va <= vb {
                        lo = mid;
                        wa = la2;
                    } else {
                        hi = mid;
                        wb = lb2;
                    }
                }
                _ => break,
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn degenerate(&self, label: &RegionSample) -> bool {
        label.near_degenerate
    }
}

/// Extract the instant shock at time t over the configured window.
pub fn instant_shock(field: &FieldExpr, t: f64, cfg: &ScanConfig) -> Result<ShockGeometry> {
    if !(t > 0.0) {
        return Err(ShockError::NonPositiveTime { t });
    }
    let slice = SliceField::new(field, t, cfg)?;
    let grid = GridSpec::new(
        cfg.window_lo.clone(),
        cfg.window_hi.clone(),
        vec![cfg.resolution; cfg.dim()],
    );
    Ok(extract_interfaces(&slice, &grid))
}

fn shock_signature(field: &FieldExpr, t: f64, cfg: &ScanConfig) -> Result<(usize, usize, usize, i64)> {
    Ok(instant_shock(field, t, cfg)?
        .invariants()
        .signature(cfg.dim()))
}

/// Verdict of the topological restriction at one event.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictionReport {
    pub after_contractible: Contractibility,
    pub verdict: String,
    pub regions_before: usize,
    pub regions_after: usize,
    /// Argmin-region count must not increase across the event.
    pub monotone: bool,
}

/// A localized perestroika event.
#[derive(Debug, Clone, Serialize)]
pub struct PerestroikaEvent {
    pub t_star: f64,
    pub x_star: Vec<f64>,
    pub classification: Classification,
    pub before_invariants: GeometryInvariants,
    pub after_invariants: GeometryInvariants,
    #[serde(skip)]
    pub before_clip: ShockGeometry,
    #[serde(skip)]
    pub after_clip: ShockGeometry,
    pub restriction: RestrictionReport,
    /// False when several topology changes collided inside one tolerance
    /// interval (unresolved event cluster).
    pub resolved: bool,
}

/// March time over the configured range, bisect every change of the discrete
/// shock invariants, and classify the events.
pub fn find_perestroikas(
    field: &FieldExpr,
    cfg: &ScanConfig,
    det: &DeterminatorConfig,
) -> Result<Vec<PerestroikaEvent>> {
    let steps = cfg.time_steps.max(2);
    let times: Vec<f64> = (0..=steps)
        .map(|k| cfg.t_min + (cfg.t_max - cfg.t_min) * k as f64 / steps as f64)
        .collect();
    // March slices are independent; sample them in parallel.
    use rayon::prelude::*;
    let sigs: Vec<(usize, usize, usize, i64)> = times
        .par_iter()
        .map(|&t| shock_signature(field, t, cfg))
        .collect::<Result<_>>()?;

    let mut intervals: Vec<(f64, (usize, usize, usize, i64), f64, (usize, usize, usize, i64), bool)> =
        Vec::new();
    for k in 0..steps {
        if sigs[k] != sigs[k + 1] {
            // Drop intervals whose topology change has no interior moving
            // feature before paying for any bisection: those are shock
            // curves entering or leaving the scan window.
            if locate_feature(field, times[k], times[k + 1], cfg)?.is_none() {
                continue;
            }
            intervals.push((times[k], sigs[k], times[k + 1], sigs[k + 1], true));
        }
    }

    // Near-simultaneous events (or detection flicker at marginal features)
    // can keep splitting intervals; a work budget turns the leftovers into
    // honestly flagged unresolved clusters instead of unbounded bisection.
    let mut budget = 64 * (intervals.len().max(1)) * 64;
    let mut events: Vec<PerestroikaEvent> = Vec::new();
    while let Some((lo, slo, hi, shi, resolved)) = intervals.pop() {
        let exhausted = budget == 0;
        budget = budget.saturating_sub(1);
        if hi - lo <= cfg.time_tol || exhausted {
            let t_star = 0.5 * (lo + hi);
            let resolved = resolved && !exhausted;
            if let Some(event) = build_event(field, t_star, lo, hi, cfg, det, resolved)? {
                events.push(event);
            }
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let smid = shock_signature(field, mid, cfg)?;
        if smid == slo {
            intervals.push((mid, smid, hi, shi, resolved));
        } else if smid == shi {
            intervals.push((lo, slo, mid, smid, resolved));
        } else {
            // Two separate changes inside the interval.
            intervals.push((lo, slo, mid, smid, false));
            intervals.push((mid, smid, hi, shi, false));
        }
    }
    events.sort_by(|a, b| a.t_star.partial_cmp(&b.t_star).unwrap());

    // Detection flicker near marginal resolutions can bisect the same event
    // from two march intervals; keep one representative.
    let close = |a: &PerestroikaEvent, b: &PerestroikaEvent| -> bool {
        let dx: f64 = a
            .x_star
            .iter()
            .zip(&b.x_star)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        (a.t_star - b.t_star).abs() <= 100.0 * cfg.time_tol && dx <= 100.0 * cfg.space_tol
    };
    let mut deduped: Vec<PerestroikaEvent> = Vec::new();
    for e in events {
        if let Some(prev) = deduped.iter_mut().find(|p| close(p, &e)) {
            let prev_is_perestroika = matches!(
                prev.classification.verdict,
                crate::determinator::Verdict::Perestroika { .. }
            );
            let e_is_perestroika = matches!(
                e.classification.verdict,
                crate::determinator::Verdict::Perestroika { .. }
            );
            if e_is_perestroika && !prev_is_perestroika {
                *prev = e;
            }
        } else {
            deduped.push(e);
        }
    }
    // A singularity verdict at a bisected time means the detected topology
    // change was resolution flicker at a persistent feature, not an event.
    deduped.retain(|e| {
        !matches!(
            e.classification.verdict,
            crate::determinator::Verdict::Singularity { .. }
        )
    });
    // Shock features entering or leaving through the window boundary are
    // scan artifacts, not perestroikas; drop them unless the determinator
    // still recognized a perestroika there.
    let d = cfg.dim();
    let cell: f64 = (0..d)
        .map(|i| (cfg.window_hi[i] - cfg.window_lo[i]) / (cfg.resolution - 1) as f64)
        .fold(0.0, f64::max);
    deduped.retain(|e| {
        let near_boundary = (0..d).any(|i| {
            e.x_star[i] < cfg.window_lo[i] + 2.0 * cell
                || e.x_star[i] > cfg.window_hi[i] - 2.0 * cell
        });
        let is_perestroika = matches!(
            e.classification.verdict,
            crate::determinator::Verdict::Perestroika { .. }
        );
        !near_boundary || is_perestroika
    });
    Ok(deduped)
}

/// Coarse location of the interior feature that changes between two times:
/// the geometry vertex on either side farthest from the other side's
/// geometry, considering only vertices away from the window rim and scores
/// above the per-step drift of persistent curves. Returns None when the
/// signature change is a boundary artifact.
fn locate_feature(
    field: &FieldExpr,
    t_lo: f64,
    t_hi: f64,
    cfg: &ScanConfig,
) -> Result<Option<Vec<f64>>> {
    let d = cfg.dim();
    let cell: f64 = (0..d)
        .map(|i| (cfg.window_hi[i] - cfg.window_lo[i]) / (cfg.resolution - 1) as f64)
        .fold(0.0, f64::max);
    let g_before = instant_shock(field, t_lo, cfg)?;
    let g_after = instant_shock(field, t_hi, cfg)?;
    let interior = |p: &[f64]| -> bool {
        (0..d).all(|i| {
            p[i] >= cfg.window_lo[i] + 2.0 * cell && p[i] <= cfg.window_hi[i] - 2.0 * cell
        })
    };
    let dist_to = |p: &[f64], g: &ShockGeometry| -> f64 {
        g.vertices
            .iter()
            .map(|q| {
                p.iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = -1.0;
    let mut x0 = None;
    for (g, other) in [(&g_after, &g_before), (&g_before, &g_after)] {
        for v in &g.vertices {
            if !interior(v) {
                continue;
            }
            let s = dist_to(v, other).min(1e6);
            if s > best {
                best = s;
                x0 = Some(v.clone());
            }
        }
    }
    if best < cell {
        return Ok(None);
    }
    Ok(x0)
}

fn build_event(
    field: &FieldExpr,
    t_star: f64,
    t_lo: f64,
    t_hi: f64,
    cfg: &ScanConfig,
    det: &DeterminatorConfig,
    resolved: bool,
) -> Result<Option<PerestroikaEvent>> {
    let d = cfg.dim();
    let dt_step = (cfg.t_max - cfg.t_min) / cfg.time_steps.max(2) as f64;
    let clip_dt = (dt_step * cfg.clip_dt_fraction).max(10.0 * cfg.time_tol);

    // The bisection endpoints carry the differing signatures, so the changed
    // feature is visible exactly there and no other event sits between.
    let g_before = instant_shock(field, t_lo, cfg)?;
    let g_after = instant_shock(field, t_hi, cfg)?;

    // Coarse event location: the geometry vertex farthest from the other
    // side's geometry.
    let mut x0: Vec<f64> = cfg
        .window_lo
        .iter()
        .zip(&cfg.window_hi)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let mut best = -1.0;
    let dist_to = |p: &[f64], g: &ShockGeometry| -> f64 {
        g.vertices
            .iter()
            .map(|q| {
                p.iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    };
    for (g, other) in [(&g_after, &g_before), (&g_before, &g_after)] {
        for v in &g.vertices {
            let s = dist_to(v, other);
            let s = if s.is_finite() { s } else { 1e6 };
            if s > best {
                best = s;
                x0 = v.clone();
            }
        }
    }

    // Spatial refinement: shrink a local window around the moving feature.
    let cell: f64 = (0..d)
        .map(|i| (cfg.window_hi[i] - cfg.window_lo[i]) / (cfg.resolution - 1) as f64)
        .fold(0.0, f64::max);
    // Features at the window edge are boundary-crossing artifacts; skip the
    // expensive refinement and classification for them.
    let near_boundary = (0..d).any(|i| {
        x0[i] < cfg.window_lo[i] + 2.0 * cell || x0[i] > cfg.window_hi[i] - 2.0 * cell
    });
    if near_boundary {
        return Ok(None);
    }
    let mut half = 3.0 * cell;
    for _ in 0..18 {
        if half < cfg.space_tol {
            break;
        }
        let local = ScanConfig {
            window_lo: x0.iter().map(|c| c - half).collect(),
            window_hi: x0.iter().map(|c| c + half).collect(),
            resolution: 17,
            ..cfg.clone()
        };
        let gb = instant_shock(field, t_lo, &local)?;
        let ga = instant_shock(field, t_hi, &local)?;
        let mut candidate = x0.clone();
        let mut score = -1.0;
        for (g, other) in [(&ga, &gb), (&gb, &ga)] {
            for v in &g.vertices {
                let s = dist_to(v, other).min(1e6);
                if s > score {
                    score = s;
                    candidate = v.clone();
                }
            }
        }
        if score >= 0.0 {
            x0 = candidate;
        }
        half *= 0.45;
    }

    // Word-specific algebraic polish onto the exact event.
    let polished = polish_event(field, &x0, t_star, cfg);
    let (x_star, t_star) = polished.unwrap_or((x0, t_star));

    // Classification at the event, with the tie tolerance opened up to the
    // localization accuracy.
    let event_search = SearchConfig {
        tie_tol: cfg.event_tie_tol,
        ..cfg.search.clone()
    };
    let mc = minima::find_global_minima(field, &x_star, t_star, &event_search)?;
    let classification = classify(&mc, det, &event_search);

    // Local clips around the event.
    let clip_half = (cfg.clip_cells as f64) * cell;
    let clip_cfg = ScanConfig {
        window_lo: x_star.iter().map(|c| c - clip_half).collect(),
        window_hi: x_star.iter().map(|c| c + clip_half).collect(),
        resolution: (4 * cfg.clip_cells + 1).max(17),
        ..cfg.clone()
    };
    let before_clip = instant_shock(field, (t_star - clip_dt).max(cfg.t_min * 0.5), &clip_cfg)?;
    let after_clip = instant_shock(field, t_star + clip_dt, &clip_cfg)?;
    let restriction = verify_restriction_parts(field, &clip_cfg, t_star, clip_dt, &after_clip)?;

    Ok(Some(PerestroikaEvent {
        t_star,
        x_star,
        classification,
        before_invariants: before_clip.invariants(),
        after_invariants: after_clip.invariants(),
        before_clip,
        after_clip,
        restriction,
        resolved,
    }))
}

/// The topological restriction on an already-built event.
pub fn verify_restriction(
    field: &FieldExpr,
    event: &PerestroikaEvent,
    cfg: &ScanConfig,
) -> Result<RestrictionReport> {
    let d = cfg.dim();
    let cell: f64 = (0..d)
        .map(|i| (cfg.window_hi[i] - cfg.window_lo[i]) / (cfg.resolution - 1) as f64)
        .fold(0.0, f64::max);
    let clip_half = (cfg.clip_cells as f64) * cell;
    let dt_step = (cfg.t_max - cfg.t_min) / cfg.time_steps.max(2) as f64;
    let clip_dt = (dt_step * cfg.clip_dt_fraction).max(10.0 * cfg.time_tol);
    let clip_cfg = ScanConfig {
        window_lo: event.x_star.iter().map(|c| c - clip_half).collect(),
        window_hi: event.x_star.iter().map(|c| c + clip_half).collect(),
        resolution: (4 * cfg.clip_cells + 1).max(17),
        ..cfg.clone()
    };
    verify_restriction_parts(field, &clip_cfg, event.t_star, clip_dt, &event.after_clip)
}

fn verify_restriction_parts(
    field: &FieldExpr,
    clip_cfg: &ScanConfig,
    t_star: f64,
    clip_dt: f64,
    after_clip: &ShockGeometry,
) -> Result<RestrictionReport> {
    let after_contractible = is_contractible(after_clip);
    let regions_before = count_regions(field, (t_star - clip_dt).max(t_star * 0.5), clip_cfg)?;
    let regions_after = count_regions(field, t_star + clip_dt, clip_cfg)?;
    let monotone = regions_after <= regions_before;
    let verdict = match after_contractible {
        Contractibility::Yes => "contractible",
        Contractibility::No => "violation",
        Contractibility::Undetermined => "undetermined",
    };
    Ok(RestrictionReport {
        after_contractible,
        verdict: verdict.to_string(),
        regions_before,
        regions_after,
        monotone,
    })
}

/// Number of distinct argmin regions among the clip-grid samples.
fn count_regions(field: &FieldExpr, t: f64, cfg: &ScanConfig) -> Result<usize> {
    let slice = SliceField::new(field, t, cfg)?;
    let d = cfg.dim();
    let n = 9usize;
    let mut samples: Vec<(Vec<f64>, RegionSample)> = Vec::new();
    let total = n.pow(d as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut p = vec![0.0; d];
        for i in 0..d {
            let k = idx % n;
            idx /= n;
            p[i] = cfg.window_lo[i]
                + (cfg.window_hi[i] - cfg.window_lo[i]) * k as f64 / (n - 1) as f64;
        }
        let s = slice.sample(&p);
        samples.push((p, s));
    }
    // Cluster the argmins by location.
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for (_, s) in &samples {
        let mut found = false;
        for r in &reps {
            let dist: f64 = r
                .iter()
                .zip(&s.argmin)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist < cfg.match_radius {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(s.argmin.clone());
        }
    }
    Ok(reps.len())
}

/// Newton polish of an event onto the exact algebraic conditions of its
/// word (implemented for the words that occur in d <= 2 scans). Falls back
/// to the bisection location when the system does not converge.
fn polish_event(
    field: &FieldExpr,
    x0: &[f64],
    t0: f64,
    cfg: &ScanConfig,
) -> Option<(Vec<f64>, f64)> {
    let d = field.dim();
    // Identify the word at slightly relaxed tolerance.
    let relaxed = SearchConfig {
        tie_tol: (cfg.event_tie_tol * 50.0).max(1e-3),
        ..cfg.search.clone()
    };
    let mc = minima::find_global_minima(field, x0, t0, &relaxed).ok()?;
    let locs: Vec<Vec<f64>> = mc.records.iter().map(|r| r.location.clone()).collect();
    let curvature: Vec<f64> = mc
        .records
        .iter()
        .map(|r| {
            let sym = nalgebra::SymmetricEigen::new(r.hessian.clone());
            sym.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .collect();
    let m = locs.len();
    // Group minima into a candidate degenerate cluster (wells about to merge
    // or split; the biased event location may hide the degeneracy, so the
    // smallest-curvature record seeds it when no two records are close) and
    // far simple minima. Try the word systems and accept a solution that
    // stays near the bisection estimate.
    let near = |a: &[f64], b: &[f64]| -> bool {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        d2.sqrt() < 0.25
    };
    let softest = (0..m).min_by(|&i, &j| curvature[i].partial_cmp(&curvature[j]).unwrap())?;
    let mut centroid = vec![0.0; d];
    let mut count = 0.0;
    let mut far = Vec::new();
    for loc in &locs {
        if near(loc, &locs[softest]) {
            for (c, x) in centroid.iter_mut().zip(loc) {
                *c += x;
            }
            count += 1.0;
        } else {
            far.push(loc.clone());
        }
    }
    for c in centroid.iter_mut() {
        *c /= count;
    }
    let span: f64 = (0..d)
        .map(|i| cfg.window_hi[i] - cfg.window_lo[i])
        .fold(0.0, f64::max);
    let dt_step = (cfg.t_max - cfg.t_min) / cfg.time_steps.max(2) as f64;
    let accept = |sol: &(Vec<f64>, f64)| -> bool {
        let (x, t) = sol;
        let dx: f64 = x
            .iter()
            .zip(x0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        dx <= 0.15 * span && (t - t0).abs() <= 3.0 * dt_step && *t > 0.0
    };
    if far.is_empty() {
        // Pure birth: the event satisfies a d-dimensional system in the
        // Lagrangian coordinate alone.
        if let Some(sol) = polish_birth_lagrangian(field, x0, t0, cfg) {
            if accept(&sol) {
                return Some(sol);
            }
        }
    }
    if let Some(sol) = polish_degenerate(field, &centroid, &far, x0, t0, d) {
        if accept(&sol) {
            return Some(sol);
        }
    }
    if m >= 3 {
        if let Some(sol) = polish_merge(field, &locs, x0, t0, d) {
            if accept(&sol) {
                return Some(sol);
            }
        }
    }
    None
}

/// Kernel cubic and cross-cubic coefficients of the field at a point, in the
/// eigenframe of its Hessian. These vanish exactly at a birth event; the
/// quadratic penalty of the action contributes nothing to them, so the
/// system lives in Lagrangian coordinates alone.
fn birth_residual(field: &FieldExpr, a: &[f64]) -> Option<(Vec<f64>, f64)> {
    let d = field.dim();
    let jet = field.eval_jet(a, 3).ok()?;
    let h = jet.hessian();
    let sym = nalgebra::SymmetricEigen::new(h);
    let mut kmin = 0;
    for i in 1..d {
        if sym.eigenvalues[i] < sym.eigenvalues[kmin] {
            kmin = i;
        }
    }
    let v: Vec<f64> = (0..d).map(|r| sym.eigenvectors[(r, kmin)]).collect();
    let mut res = Vec::with_capacity(d);
    let mut cubic = 0.0;
    for (e, cf) in jet.terms() {
        if (e[0] + e[1] + e[2]) as usize == 3 && cf != 0.0 {
            let mut term = cf;
            for i in 0..d {
                term *= v[i].powi(e[i] as i32);
            }
            cubic += term;
        }
    }
    res.push(cubic);
    let mut others: Vec<usize> = (0..d).filter(|&i| i != kmin).collect();
    others.sort_by(|&i, &j| sym.eigenvalues[i].partial_cmp(&sym.eigenvalues[j]).unwrap());
    for &oi in &others {
        let w: Vec<f64> = (0..d).map(|r| sym.eigenvectors[(r, oi)]).collect();
        let mut cross = 0.0;
        for (e, cf) in jet.terms() {
            if (e[0] + e[1] + e[2]) as usize != 3 || cf == 0.0 {
                continue;
            }
            let mut cur = [cf, 0.0, 0.0, 0.0];
            for i in 0..d {
                for _ in 0..e[i] {
                    let mut built = [0.0; 4];
                    for (k, bk) in cur.iter().enumerate() {
                        if *bk == 0.0 {
                            continue;
                        }
                        built[k] += bk * v[i];
                        if k + 1 < 4 {
                            built[k + 1] += bk * w[i];
                        }
                    }
                    cur = built;
                }
            }
            cross += cur[1];
        }
        res.push(cross);
    }
    Some((res, sym.eigenvalues[kmin]))
}

/// Solve the birth system in Lagrangian coordinates: seeds are the concavity
/// centers of the field; among the solutions, the one mapping closest to the
/// bisected event wins.
fn polish_birth_lagrangian(
    field: &FieldExpr,
    x0: &[f64],
    t0: f64,
    cfg: &ScanConfig,
) -> Option<(Vec<f64>, f64)> {
    let d = field.dim();
    // Seed grid over the window enlarged by the expected Lagrangian drift.
    let n = 33usize;
    let margin: f64 = 1.0;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    let total = n.pow(d as u32);
    let mut lam = vec![0.0; total];
    let coord = |k: usize, i: usize| -> f64 {
        cfg.window_lo[i] - margin
            + (cfg.window_hi[i] - cfg.window_lo[i] + 2.0 * margin) * k as f64 / (n - 1) as f64
    };
    let point = |flat: usize| -> Vec<f64> {
        let mut idx = flat;
        let mut p = vec![0.0; d];
        for i in 0..d {
            p[i] = coord(idx % n, i);
            idx /= n;
        }
        p
    };
    for (flat, l) in lam.iter_mut().enumerate() {
        let p = point(flat);
        let jet = match field.eval_jet(&p, 2) {
            Ok(j) => j,
            Err(_) => return None,
        };
        let sym = nalgebra::SymmetricEigen::new(jet.hessian());
        *l = sym.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    }
    for flat in 0..total {
        if lam[flat] >= 0.0 {
            continue;
        }
        let mut idx = flat;
        let mut stride = 1;
        let mut is_min = true;
        for _ in 0..d {
            let k = idx % n;
            if (k > 0 && lam[flat - stride] < lam[flat])
                || (k + 1 < n && lam[flat + stride] < lam[flat])
            {
                is_min = false;
                break;
            }
            idx /= n;
            stride *= n;
        }
        if is_min {
            seeds.push(point(flat));
        }
    }
    let mut best: Option<((Vec<f64>, f64), f64)> = None;
    for seed in seeds {
        let mut u = seed.clone();
        let ok = newton_fd(&mut u, |a| birth_residual(field, a).map(|(r, _)| r), 50);
        if ok.is_none() {
            continue;
        }
        let (_, lambda) = birth_residual(field, &u)?;
        if lambda >= -1e-10 {
            continue;
        }
        let t = -1.0 / lambda;
        let jet = field.eval_jet(&u, 1).ok()?;
        let g = jet.gradient();
        let x: Vec<f64> = u.iter().zip(&g).map(|(a, gi)| a + t * gi).collect();
        let dist: f64 = x
            .iter()
            .zip(x0)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
            + (t - t0).abs();
        match &best {
            Some((_, bd)) if *bd <= dist => {}
            _ => best = Some(((x, t), dist)),
        }
    }
    best.map(|(sol, _)| sol)
}

/// Solve the word system of an event with one degenerate minimum and f far
/// simple minima: gradients, degeneracy, kernel cubic, ties, and the
/// C = 0 tangency conditions when the word is a lone A3 with d >= 2.
fn polish_degenerate(
    field: &FieldExpr,
    a0: &[f64],
    far: &[Vec<f64>],
    x0: &[f64],
    t0: f64,
    d: usize,
) -> Option<(Vec<f64>, f64)> {
    let f = far.len();
    let with_c = f == 0 && d >= 2;
    let nvar = d + f * d + d + 1;
    let neq = d + 2 + f * d + f + if with_c { d - 1 } else { 0 };
    if neq != nvar {
        return None; // word outside this polisher's scope (d = 3 mixed cases)
    }
    let mut u = vec![0.0; nvar];
    u[..d].copy_from_slice(a0);
    for (i, loc) in far.iter().enumerate() {
        u[d + i * d..d + (i + 1) * d].copy_from_slice(loc);
    }
    u[d + f * d..d + f * d + d].copy_from_slice(x0);
    u[nvar - 1] = t0;
    let residual = |u: &[f64]| -> Option<Vec<f64>> {
        let a = &u[..d];
        let x = &u[d + f * d..d + f * d + d];
        let t = u[nvar - 1];
        if t <= 0.0 {
            return None;
        }
        let jet = action::action_jet(field, x, t, a, 3).ok()?;
        let g = jet.gradient();
        let h = jet.hessian();
        let sym = nalgebra::SymmetricEigen::new(h);
        let mut kmin = 0;
        for i in 1..d {
            if sym.eigenvalues[i] < sym.eigenvalues[kmin] {
                kmin = i;
            }
        }
        let v: Vec<f64> = (0..d).map(|r| sym.eigenvectors[(r, kmin)]).collect();
        let mut res = Vec::with_capacity(nvar);
        res.extend_from_slice(&g);
        res.push(sym.eigenvalues[kmin]);
        // cubic along the kernel: sum over |e| = 3 of coeff * v^e
        let mut cubic = 0.0;
        for (e, cf) in jet.terms() {
            if (e[0] + e[1] + e[2]) as usize == 3 && cf != 0.0 {
                let mut term = cf;
                for i in 0..d {
                    term *= v[i].powi(e[i] as i32);
                }
                cubic += term;
            }
        }
        res.push(cubic);
        if with_c {
            // C = 0: the a^2 b_j cross coefficients vanish in the kernel
            // frame; read them from the degree-3 monomials as the s^2 r
            // coefficient of coeff * prod (v_i s + w_i r)^{e_i}.
            let mut others: Vec<usize> = (0..d).filter(|&i| i != kmin).collect();
            others.sort_by(|&i, &j| {
                sym.eigenvalues[i].partial_cmp(&sym.eigenvalues[j]).unwrap()
            });
            for &oi in &others {
                let w: Vec<f64> = (0..d).map(|r| sym.eigenvectors[(r, oi)]).collect();
                let mut cross = 0.0;
                for (e, cf) in jet.terms() {
                    if (e[0] + e[1] + e[2]) as usize != 3 || cf == 0.0 {
                        continue;
                    }
                    let mut cur = [cf, 0.0, 0.0, 0.0];
                    for i in 0..d {
                        for _ in 0..e[i] {
                            let mut built = [0.0; 4];
                            for (k, bk) in cur.iter().enumerate() {
                                if *bk == 0.0 {
                                    continue;
                                }
                                built[k] += bk * v[i];
                                if k + 1 < 4 {
                                    built[k + 1] += bk * w[i];
                                }
                            }
                            cur = built;
                        }
                    }
                    cross += cur[1];
                }
                res.push(cross);
            }
        }
        let v0 = jet.value();
        for i in 0..f {
            let ai = &u[d + i * d..d + (i + 1) * d];
            let jet_i = action::action_jet(field, x, t, ai, 1).ok()?;
            res.extend_from_slice(&jet_i.gradient());
            res.push(jet_i.value() - v0);
        }
        Some(res)
    };
    newton_fd(&mut u, residual, 60).map(|_| {
        let x = u[d + f * d..d + f * d + d].to_vec();
        (x, u[nvar - 1])
    })
}

/// Solve the tie system for a pure A1 merge word: gradients and ties, plus
/// collinearity when m < d + 2 (the tangency condition of the perestroika).
fn polish_merge(
    field: &FieldExpr,
    locs: &[Vec<f64>],
    x0: &[f64],
    t0: f64,
    d: usize,
) -> Option<(Vec<f64>, f64)> {
    let m = locs.len();
    let nvar = m * d + d + 1;
    let n_tangency = (d + 2).checked_sub(m)?;
    let neq = m * d + (m - 1) + n_tangency;
    if neq != nvar || (n_tangency > 0 && !(d == 2 && m == 3)) {
        // collinearity conditions are implemented for the planar triple only
        if n_tangency > 0 {
            return None;
        }
    }
    let mut u = vec![0.0; nvar];
    for (i, a) in locs.iter().enumerate() {
        u[i * d..(i + 1) * d].copy_from_slice(a);
    }
    u[m * d..m * d + d].copy_from_slice(x0);
    u[m * d + d] = t0;
    let residual = |u: &[f64]| -> Option<Vec<f64>> {
        let t = u[m * d + d];
        if t <= 0.0 {
            return None;
        }
        let x = &u[m * d..m * d + d];
        let mut res = Vec::with_capacity(nvar);
        let mut values = Vec::with_capacity(m);
        for i in 0..m {
            let a = &u[i * d..(i + 1) * d];
            let jet = action::action_jet(field, x, t, a, 1).ok()?;
            res.extend_from_slice(&jet.gradient());
            values.push(jet.value());
        }
        for i in 1..m {
            res.push(values[i] - values[0]);
        }
        if n_tangency == 1 && d == 2 && m == 3 {
            let ux = u[2] - u[0];
            let uy = u[3] - u[1];
            let vx = u[4] - u[0];
            let vy = u[5] - u[1];
            res.push(ux * vy - uy * vx);
        }
        Some(res)
    };
    newton_fd(&mut u, residual, 60).map(|_| {
        let x = u[m * d..m * d + d].to_vec();
        (x, u[m * d + d])
    })
}

/// Damped Newton with a forward-difference Jacobian on a square system.
fn newton_fd<F>(u: &mut [f64], f: F, max_iter: usize) -> Option<()>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = u.len();
    let mut res = f(u)?;
    if res.len() != n {
        return None;
    }
    let norm = |r: &[f64]| -> f64 { r.iter().map(|x| x * x).sum::<f64>().sqrt() };
    let mut rn = norm(&res);
    for _ in 0..max_iter {
        if rn < 1e-12 {
            return Some(());
        }
        let mut jac = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            let h = 1e-7 * (1.0 + u[j].abs());
            let mut up = u.to_vec();
            up[j] += h;
            let rp = f(&up)?;
            for i in 0..n {
                jac[(i, j)] = (rp[i] - res[i]) / h;
            }
        }
        let rhs = nalgebra::DVector::from_column_slice(&res);
        let step = jac.lu().solve(&rhs)?;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(i, v)| v - lambda * step[i])
                .collect();
            if let Some(rc) = f(&cand) {
                let rcn = norm(&rc);
                if rcn < rn {
                    u.copy_from_slice(&cand);
                    res = rc;
                    rn = rcn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if rn < 1e-9 {
        Some(())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> FieldExpr {
        FieldExpr::parse("a1^4/4 - a1^2/2", 1).unwrap()
    }

    #[test]
    fn instant_shock_before_and_after_focus() {
        let f = quartic();
        let cfg = ScanConfig::new_1d(0.2, 2.0);
        let g = instant_shock(&f, 0.5, &cfg).unwrap();
        assert!(g.is_empty(), "no shock before the focus");
        let g = instant_shock(&f, 2.0, &cfg).unwrap();
        assert_eq!(g.vertices.len(), 1, "one shock point after the focus");
        assert!(g.vertices[0][0].abs() < 1e-6);
    }

    #[test]
    fn quartic_birth_event() {
        let f = quartic();
        let cfg = ScanConfig::new_1d(0.5, 1.5);
        let det = DeterminatorConfig::default();
        let events = find_perestroikas(&f, &cfg, &det).unwrap();
        assert_eq!(events.len(), 1);
        let e = &events[0];
        assert!((e.t_star - 1.0).abs() < 1e-5, "t* = {}", e.t_star);
        assert!(e.x_star[0].abs() < 1e-5, "x* = {:?}", e.x_star);
        match &e.classification.verdict {
            crate::determinator::Verdict::Perestroika { rendered, .. } => {
                assert_eq!(rendered, "A3^-");
            }
            other => panic!("expected A3^- event, got {other:?}"),
        }
        assert_eq!(e.restriction.verdict, "contractible");
    }
}

#[cfg(test)]
mod polish_probe {
    use super::*;

    #[test]
    fn tail_birth_polish() {
        let f = FieldExpr::parse(
            "-1.0*gauss((-1.2),0.5) - 0.9*gauss((0),0.6) - 1.1*gauss((1.2),0.55) - 0.03*a1",
            1,
        )
        .unwrap();
        let mut cfg = ScanConfig::new_1d(0.1, 3.0);
        cfg.window_lo = vec![-3.0];
        cfg.window_hi = vec![3.0];
        cfg.time_steps = 58;
        let out = polish_event(&f, &[-2.1549], 0.28011, &cfg);
        eprintln!("polish result: {:?}", out);
        let relaxed = SearchConfig {
            tie_tol: 5e-3,
            ..cfg.search.clone()
        };
        let mc = minima::find_global_minima(&f, &[-2.1549], 0.28011, &relaxed).unwrap();
        for r in &mc.records {
            eprintln!("seed record: loc {:+.6} val {:+.8} h {:+.4e}", r.location[0], r.value, r.hessian[(0,0)]);
        }
        assert!(out.is_some());
    }
}
