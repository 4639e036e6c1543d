//! Multi-region interface extraction on uniform grids.

use super::{ShockGeometry, UnionFind, VertexKind};
use rayon::prelude::*;
use std::collections::HashMap;

/// A labeling of space into regions. Adjacent samples with different regions
/// are separated by the shock.
pub trait RegionField: Sync {
    type Label: Clone + Send + Sync;

    fn sample(&self, p: &[f64]) -> Self::Label;

    /// Do two nearby samples belong to the same region (no interface
    /// crossing between them)?
    fn same_region(&self, a: &Self::Label, b: &Self::Label, pa: &[f64], pb: &[f64]) -> bool;

    /// Parameter s in (0,1) of the interface crossing along [pa, pb].
    /// The default bisects against the endpoint regions.
    fn crossing(&self, pa: &[f64], pb: &[f64], la: &Self::Label, lb: &Self::Label) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut llo = la.clone();
        let _ = lb;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let pm: Vec<f64> = pa
                .iter()
                .zip(pb)
                .map(|(a, b)| a + mid * (b - a))
                .collect();
            let plo: Vec<f64> = pa
                .iter()
                .zip(pb)
                .map(|(a, b)| a + lo * (b - a))
                .collect();
            let lm = self.sample(&pm);
            if self.same_region(&llo, &lm, &plo, &pm) {
                lo = mid;
                llo = lm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Whether the region's minimum is degenerate (labels shock-edge ends).
    fn degenerate(&self, _label: &Self::Label) -> bool {
        false
    }
}

/// Uniform sampling grid over a box.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Nodes per axis (>= 2).
    pub n: Vec<usize>,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>) -> GridSpec {
        assert_eq!(lo.len(), hi.len());
        assert_eq!(lo.len(), n.len());
        assert!(n.iter().all(|&k| k >= 2), "resolutions must be >= 2");
        GridSpec { lo, hi, n }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn coord(&self, axis: usize, k: usize) -> f64 {
        self.lo[axis] + (self.hi[axis] - self.lo[axis]) * k as f64 / (self.n[axis] - 1) as f64
    }

    fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &k)| self.coord(a, k))
            .collect()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for a in (0..self.dim()).rev() {
            f = f * self.n[a] + idx[a];
        }
        f
    }

    fn total(&self) -> usize {
        self.n.iter().product()
    }

    fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in 0..self.dim() {
            idx[a] = f % self.n[a];
            f /= self.n[a];
        }
        idx
    }
}

/// Extract the interface complex of a labeled grid.
pub fn extract_interfaces<F: RegionField>(field: &F, grid: &GridSpec) -> ShockGeometry {
    let labels: Vec<F::Label> = (0..grid.total())
        .into_par_iter()
        .map(|f| field.sample(&grid.point(&grid.unflat(f))))
        .collect();
    let mut g = match grid.dim() {
        1 => extract_1d(field, grid, &labels),
        2 => extract_2d(field, grid, &labels),
        3 => extract_3d(field, grid, &labels),
        d => {
            let mut g = ShockGeometry::empty(d);
            g.warnings.push(format!("unsupported dimension {d}"));
            g
        }
    };
    g.feature_radius = (0..grid.dim())
        .map(|a| (grid.hi[a] - grid.lo[a]) / (grid.n[a] - 1) as f64)
        .fold(0.0f64, f64::max)
        * 1.8;
    g
}

fn crossing_vertex<F: RegionField>(
    field: &F,
    grid: &GridSpec,
    labels: &[F::Label],
    ia: &[usize],
    ib: &[usize],
) -> (Vec<f64>, bool) {
    let pa = grid.point(ia);
    let pb = grid.point(ib);
    let la = &labels[grid.flat(ia)];
    let lb = &labels[grid.flat(ib)];
    let s = field.crossing(&pa, &pb, la, lb);
    let p: Vec<f64> = pa.iter().zip(&pb).map(|(a, b)| a + s * (b - a)).collect();
    let degen = field.degenerate(la) || field.degenerate(lb);
    (p, degen)
}

fn extract_1d<F: RegionField>(field: &F, grid: &GridSpec, labels: &[F::Label]) -> ShockGeometry {
    let mut g = ShockGeometry::empty(1);
    for k in 0..grid.n[0] - 1 {
        let (ia, ib) = ([k], [k + 1]);
        let la = &labels[grid.flat(&ia)];
        let lb = &labels[grid.flat(&ib)];
        if !field.same_region(la, lb, &grid.point(&ia), &grid.point(&ib)) {
            let (p, degen) = crossing_vertex(field, grid, labels, &ia, &ib);
            g.vertices.push(p);
            g.vertex_kinds.push(if degen {
                VertexKind::Degenerate
            } else {
                VertexKind::Regular
            });
        }
    }
    g
}

/// Per-cell connectivity groups of the four corners (indices in the order
/// c00, c10, c11, c01 around the cell).
fn corner_groups<F: RegionField>(
    field: &F,
    corners: &[(Vec<f64>, F::Label)],
) -> (Vec<usize>, usize) {
    let n = corners.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let j = (i + 1) % n;
        if field.same_region(&corners[i].1, &corners[j].1, &corners[i].0, &corners[j].0) {
            uf.union(i, j);
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut uniq = roots.clone();
    uniq.sort_unstable();
    uniq.dedup();
    for r in roots.iter_mut() {
        *r = uniq.binary_search(r).unwrap();
    }
    (roots, uniq.len())
}

fn extract_2d<F: RegionField>(field: &F, grid: &GridSpec, labels: &[F::Label]) -> ShockGeometry {
    let mut g = ShockGeometry::empty(2);
    let mut edge_vertex: HashMap<(usize, usize), Option<usize>> = HashMap::new();
    let (nx, ny) = (grid.n[0], grid.n[1]);

    // Crossing vertices on grid edges, keyed by (flat index of low corner, axis).
    for j in 0..ny {
        for i in 0..nx {
            for axis in 0..2 {
                let (i2, j2) = if axis == 0 { (i + 1, j) } else { (i, j + 1) };
                if i2 >= nx || j2 >= ny {
                    continue;
                }
                let (ia, ib) = ([i, j], [i2, j2]);
                let la = &labels[grid.flat(&ia)];
                let lb = &labels[grid.flat(&ib)];
                let key = (grid.flat(&ia), axis);
                if field.same_region(la, lb, &grid.point(&ia), &grid.point(&ib)) {
                    edge_vertex.insert(key, None);
                } else {
                    let (p, degen) = crossing_vertex(field, grid, labels, &ia, &ib);
                    g.vertices.push(p);
                    g.vertex_kinds.push(if degen {
                        VertexKind::Degenerate
                    } else {
                        VertexKind::Regular
                    });
                    edge_vertex.insert(key, Some(g.vertices.len() - 1));
                }
            }
        }
    }

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            // Corners in cyclic order with their bounding edges.
            let idx = [[i, j], [i + 1, j], [i + 1, j + 1], [i, j + 1]];
            let corners: Vec<(Vec<f64>, F::Label)> = idx
                .iter()
                .map(|ix| (grid.point(ix), labels[grid.flat(ix)].clone()))
                .collect();
            let edge_keys = [
                (grid.flat(&[i, j]), 0),
                (grid.flat(&[i + 1, j]), 1),
                (grid.flat(&[i, j + 1]), 0),
                (grid.flat(&[i, j]), 1),
            ];
            let xverts: Vec<Option<usize>> = edge_keys
                .iter()
                .map(|k| edge_vertex.get(k).copied().flatten())
                .collect();
            let crossings: Vec<usize> = xverts.iter().flatten().cloned().collect();
            if crossings.is_empty() {
                continue;
            }
            let (_, ngroups) = corner_groups(field, &corners);
            if crossings.len() == 2 && ngroups == 2 {
                g.edges.push([crossings[0], crossings[1]]);
            } else if crossings.len() == 4 && ngroups == 2 {
                // Saddle: resolve with the center sample. Each corner that
                // differs from the center pairs its two bounding crossings.
                let center: Vec<f64> = (0..2)
                    .map(|a| 0.5 * (grid.coord(a, [i, j][a]) + grid.coord(a, [i + 1, j + 1][a])))
                    .collect();
                let lc = field.sample(&center);
                let mut connected = 0;
                for (ci, corner) in corners.iter().enumerate() {
                    if !field.same_region(&lc, &corner.1, &center, &corner.0) {
                        let e1 = xverts[ci];
                        let e2 = xverts[(ci + 3) % 4];
                        if let (Some(a), Some(b)) = (e1, e2) {
                            g.edges.push([a, b]);
                            connected += 1;
                        }
                    }
                }
                if connected == 0 {
                    g.warnings
                        .push(format!("unresolved saddle cell at ({i},{j})"));
                }
            } else {
                // Junction cell: star vertex joined to every crossing.
                let mut cpos = vec![0.0; 2];
                for &v in &crossings {
                    for a in 0..2 {
                        cpos[a] += g.vertices[v][a] / crossings.len() as f64;
                    }
                }
                g.vertices.push(cpos);
                g.vertex_kinds.push(if ngroups >= 3 {
                    VertexKind::Junction
                } else {
                    VertexKind::Center
                });
                let cv = g.vertices.len() - 1;
                for &v in &crossings {
                    g.edges.push([v, cv]);
                }
            }
        }
    }
    g
}

fn extract_3d<F: RegionField>(field: &F, grid: &GridSpec, labels: &[F::Label]) -> ShockGeometry {
    let mut g = ShockGeometry::empty(3);
    let (nx, ny, nz) = (grid.n[0], grid.n[1], grid.n[2]);
    let mut edge_vertex: HashMap<(usize, usize), Option<usize>> = HashMap::new();

    // Crossing vertices on all grid edges.
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for axis in 0..3 {
                    let mut ib = [i, j, k];
                    ib[axis] += 1;
                    if ib[0] >= nx || ib[1] >= ny || ib[2] >= nz {
                        continue;
                    }
                    let ia = [i, j, k];
                    let la = &labels[grid.flat(&ia)];
                    let lb = &labels[grid.flat(&ib)];
                    let key = (grid.flat(&ia), axis);
                    if field.same_region(la, lb, &grid.point(&ia), &grid.point(&ib)) {
                        edge_vertex.insert(key, None);
                    } else {
                        let (p, degen) = crossing_vertex(field, grid, labels, &ia, &ib);
                        g.vertices.push(p);
                        g.vertex_kinds.push(if degen {
                            VertexKind::Degenerate
                        } else {
                            VertexKind::Regular
                        });
                        edge_vertex.insert(key, Some(g.vertices.len() - 1));
                    }
                }
            }
        }
    }

    // Face segments, keyed by (flat index of min corner, normal axis).
    let mut face_segments: HashMap<(usize, usize), Vec<[usize; 2]>> = HashMap::new();
    for normal in 0..3 {
        let (u, v) = match normal {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let base = [i, j, k];
                    let mut c10 = base;
                    c10[u] += 1;
                    let mut c01 = base;
                    c01[v] += 1;
                    let mut c11 = base;
                    c11[u] += 1;
                    c11[v] += 1;
                    if c11[0] >= nx || c11[1] >= ny || c11[2] >= nz {
                        continue;
                    }
                    let ring = [base, c10, c11, c01];
                    let corners: Vec<(Vec<f64>, F::Label)> = ring
                        .iter()
                        .map(|ix| (grid.point(ix), labels[grid.flat(ix)].clone()))
                        .collect();
                    // Bounding edge keys in ring order.
                    let ekeys = [
                        (grid.flat(&base), u),
                        (grid.flat(&c10), v),
                        (grid.flat(&c01), u),
                        (grid.flat(&base), v),
                    ];
                    let xverts: Vec<Option<usize>> = ekeys
                        .iter()
                        .map(|kk| edge_vertex.get(kk).copied().flatten())
                        .collect();
                    let crossings: Vec<usize> = xverts.iter().flatten().cloned().collect();
                    if crossings.is_empty() {
                        continue;
                    }
                    let (_, ngroups) = corner_groups(field, &corners);
                    let mut segs = Vec::new();
                    if crossings.len() == 2 && ngroups == 2 {
                        segs.push([crossings[0], crossings[1]]);
                    } else if crossings.len() == 4 && ngroups == 2 {
                        let center: Vec<f64> = (0..3)
                            .map(|a| {
                                0.5 * (grid.point(&base)[a] + grid.point(&c11)[a])
                            })
                            .collect();
                        let lc = field.sample(&center);
                        for (ci, corner) in corners.iter().enumerate() {
                            if !field.same_region(&lc, &corner.1, &center, &corner.0) {
                                if let (Some(a), Some(b)) = (xverts[ci], xverts[(ci + 3) % 4]) {
                                    segs.push([a, b]);
                                }
                            }
                        }
                    } else {
                        // Face junction: star vertex on the face.
                        let mut cpos = vec![0.0; 3];
                        for &vx in &crossings {
                            for a in 0..3 {
                                cpos[a] += g.vertices[vx][a] / crossings.len() as f64;
                            }
                        }
                        g.vertices.push(cpos);
                        g.vertex_kinds.push(if ngroups >= 3 {
                            VertexKind::Junction
                        } else {
                            VertexKind::Center
                        });
                        let cv = g.vertices.len() - 1;
                        for &vx in &crossings {
                            segs.push([vx, cv]);
                        }
                    }
                    face_segments.insert((grid.flat(&base), normal), segs);
                }
            }
        }
    }

    // Cells: fan all face segments from a cell vertex.
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let base = [i, j, k];
                let fkeys = [
                    (grid.flat(&base), 0),
                    (grid.flat(&[i + 1, j, k]), 0),
                    (grid.flat(&base), 1),
                    (grid.flat(&[i, j + 1, k]), 1),
                    (grid.flat(&base), 2),
                    (grid.flat(&[i, j, k + 1]), 2),
                ];
                let mut segs: Vec<[usize; 2]> = Vec::new();
                for fk in fkeys {
                    if let Some(s) = face_segments.get(&fk) {
                        segs.extend_from_slice(s);
                    }
                }
                if segs.is_empty() {
                    continue;
                }
                let mut cpos = vec![0.0; 3];
                for s in &segs {
                    for &vx in s {
                        for a in 0..3 {
                            cpos[a] += g.vertices[vx][a] / (2.0 * segs.len() as f64);
                        }
                    }
                }
                g.vertices.push(cpos);
                g.vertex_kinds.push(VertexKind::Center);
                let cv = g.vertices.len() - 1;
                for s in &segs {
                    g.triangles.push([s[0], s[1], cv]);
                }
            }
        }
    }

    // Derive the edge skeleton of the triangle complex (needed for Euler
    // characteristics and homology).
    let mut eset = std::collections::BTreeSet::new();
    for t in &g.triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            eset.insert([a.min(b), a.max(b)]);
        }
    }
    g.edges = eset.into_iter().collect();
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sign of a linear functional as a two-region field.
    struct HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    }

    impl RegionField for HalfSpace {
        type Label = bool;
        fn sample(&self, p: &[f64]) -> bool {
            let v: f64 = p.iter().zip(&self.normal).map(|(a, b)| a * b).sum();
            v > self.offset
        }
        fn same_region(&self, a: &bool, b: &bool, _: &[f64], _: &[f64]) -> bool {
            a == b
        }
    }

    #[test]
    fn single_point_in_1d() {
        let f = HalfSpace {
            normal: vec![1.0],
            offset: 0.3,
        };
        let grid = GridSpec::new(vec![-1.0], vec![1.0], vec![65]);
        let g = extract_interfaces(&f, &grid);
        assert_eq!(g.vertices.len(), 1);
        assert!((g.vertices[0][0] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn line_in_2d_is_a_path() {
        let f = HalfSpace {
            normal: vec![1.0, 0.4],
            offset: 0.1,
        };
        let grid = GridSpec::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![33, 33]);
        let g = extract_interfaces(&f, &grid);
        assert!(g.components() == 1);
        // A path: exactly two endpoints, no junctions.
        let inv = g.invariants();
        assert_eq!(inv.endpoints, 2);
        assert_eq!(inv.junctions, 0);
    }

    #[test]
    fn plane_in_3d_is_a_disk() {
        let f = HalfSpace {
            normal: vec![0.3, 0.7, 1.0],
            offset: 0.0,
        };
        let grid = GridSpec::new(vec![-1.0; 3], vec![1.0; 3], vec![17, 17, 17]);
        let g = extract_interfaces(&f, &grid);
        assert_eq!(g.components(), 1);
        assert_eq!(g.euler_characteristic(), 1);
    }

    /// Nearest-center labels: a Y junction for three centers.
    struct Nearest {
        centers: Vec<Vec<f64>>,
    }

    impl RegionField for Nearest {
        type Label = usize;
        fn sample(&self, p: &[f64]) -> usize {
            let mut best = (f64::INFINITY, 0);
            for (i, c) in self.centers.iter().enumerate() {
                let d: f64 = p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, i);
                }
            }
            best.1
        }
        fn same_region(&self, a: &usize, b: &usize, _: &[f64], _: &[f64]) -> bool {
            a == b
        }
    }

    #[test]
    fn three_regions_make_a_triple_point() {
        let f = Nearest {
            centers: vec![vec![1.0, 0.0], vec![-0.5, 0.87], vec![-0.5, -0.87]],
        };
        let grid = GridSpec::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![33, 33]);
        let g = extract_interfaces(&f, &grid);
        let inv = g.invariants();
        assert_eq!(inv.components, 1);
        assert_eq!(inv.junctions, 1);
        assert_eq!(inv.endpoints, 3);
    }
}
