//! Contractibility of discretized shock geometry.
//!
//! d = 1: exactly one point. d = 2: a tree (connected, E = V - 1). d = 3:
//! connected with Euler characteristic 1 and trivial first rational
//! homology; for the complexes arising from the normal-form sections these
//! necessary conditions are also sufficient (everything at this scale is
//! homotopy equivalent to a wedge of spheres). Free-pair collapsing shrinks
//! the complex before any rank computation.

use super::{ShockGeometry, UnionFind};
use serde::Serialize;
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Contractibility {
    Yes,
    No,
    Undetermined,
}

/// Decide contractibility. The empty set is not contractible.
pub fn is_contractible(g: &ShockGeometry) -> Contractibility {
    if g.vertices.is_empty() {
        return Contractibility::No;
    }
    if g.triangles.is_empty() && g.edges.is_empty() {
        return if g.vertices.len() == 1 {
            Contractibility::Yes
        } else {
            Contractibility::No
        };
    }
    if g.components() != 1 {
        return Contractibility::No;
    }
    if g.triangles.is_empty() {
        // Graph case: a tree has V - 1 edges.
        let used: HashSet<usize> = g.edges.iter().flatten().cloned().collect();
        if used.len() != g.vertices.len() {
            // isolated vertices alongside edges: not connected as a complex
            return Contractibility::No;
        }
        return if g.edges.len() + 1 == g.vertices.len() {
            Contractibility::Yes
        } else {
            Contractibility::No
        };
    }
    if g.euler_characteristic() != 1 {
        return Contractibility::No;
    }
    match first_betti_number(g) {
        Some(0) => Contractibility::Yes,
        Some(_) => Contractibility::No,
        None => Contractibility::Undetermined,
    }
}

/// Rank of H1 over the rationals: b1 = E - rank d1 - rank d2.
pub fn first_betti_number(g: &ShockGeometry) -> Option<usize> {
    let (vertices, edges, triangles) = collapse(g);
    let components = {
        // count components of the collapsed core
        let map: HashMap<usize, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let mut uf = UnionFind::new(vertices.len());
        for e in &edges {
            uf.union(map[&e[0]], map[&e[1]]);
        }
        let mut roots = HashSet::new();
        for i in 0..vertices.len() {
            roots.insert(uf.find(i));
        }
        roots.len()
    };
    if edges.is_empty() {
        return Some(0);
    }
    let rank_d1 = vertices.len() - components;
    let rank_d2 = boundary2_rank(&edges, &triangles)?;
    Some(edges.len() - rank_d1 - rank_d2)
}

/// Free-pair collapsing: repeatedly remove an edge contained in exactly one
/// triangle together with that triangle, and a vertex contained in exactly
/// one edge (and no triangle) together with that edge. Preserves homotopy
/// type and usually reduces the complex to a point or a small core.
fn collapse(g: &ShockGeometry) -> (Vec<usize>, Vec<[usize; 2]>, Vec<[usize; 3]>) {
    let mut tri_alive: Vec<bool> = vec![true; g.triangles.len()];
    let mut edge_alive: Vec<bool> = vec![true; g.edges.len()];
    let mut vert_alive: Vec<bool> = vec![false; g.vertices.len()];
    let ekey = |a: usize, b: usize| [a.min(b), a.max(b)];
    let mut edge_id: HashMap<[usize; 2], usize> = HashMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        edge_id.insert(ekey(e[0], e[1]), i);
        vert_alive[e[0]] = true;
        vert_alive[e[1]] = true;
    }
    for t in &g.triangles {
        for &v in t {
            vert_alive[v] = true;
        }
    }
    for v in g.edges.iter().flatten() {
        vert_alive[*v] = true;
    }
    // isolated vertices stay alive too
    for (i, alive) in vert_alive.iter_mut().enumerate() {
        let _ = i;
        if !*alive {
            *alive = true;
        }
    }

    let mut edge_tris: Vec<Vec<usize>> = vec![Vec::new(); g.edges.len()];
    for (ti, t) in g.triangles.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            if let Some(&ei) = edge_id.get(&ekey(a, b)) {
                edge_tris[ei].push(ti);
            }
        }
    }
    let mut vert_edges: Vec<Vec<usize>> = vec![Vec::new(); g.vertices.len()];
    for (ei, e) in g.edges.iter().enumerate() {
        vert_edges[e[0]].push(ei);
        vert_edges[e[1]].push(ei);
    }
    let mut vert_tris: Vec<usize> = vec![0; g.vertices.len()];
    for t in &g.triangles {
        for &v in t {
            vert_tris[v] += 1;
        }
    }

    let live_tris = |edge_tris: &Vec<Vec<usize>>, tri_alive: &Vec<bool>, ei: usize| -> Vec<usize> {
        edge_tris[ei]
            .iter()
            .cloned()
            .filter(|&t| tri_alive[t])
            .collect()
    };

    let mut changed = true;
    while changed {
        changed = false;
        for ei in 0..g.edges.len() {
            if !edge_alive[ei] {
                continue;
            }
            let lt = live_tris(&edge_tris, &tri_alive, ei);
            if lt.len() == 1 {
                let ti = lt[0];
                tri_alive[ti] = false;
                edge_alive[ei] = false;
                for &v in &g.triangles[ti] {
                    vert_tris[v] = vert_tris[v].saturating_sub(1);
                }
                changed = true;
            }
        }
        for v in 0..g.vertices.len() {
            if !vert_alive[v] || vert_tris[v] > 0 {
                continue;
            }
            let live: Vec<usize> = vert_edges[v]
                .iter()
                .cloned()
                .filter(|&e| edge_alive[e])
                .collect();
            let in_tri = live
                .iter()
                .any(|&e| !live_tris(&edge_tris, &tri_alive, e).is_empty());
            if live.len() == 1 && !in_tri {
                edge_alive[live[0]] = false;
                vert_alive[v] = false;
                changed = true;
            }
        }
    }

    let vertices: Vec<usize> = (0..g.vertices.len()).filter(|&v| vert_alive[v]).collect();
    let edges: Vec<[usize; 2]> = g
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| edge_alive[*i])
        .map(|(_, e)| *e)
        .collect();
    let triangles: Vec<[usize; 3]> = g
        .triangles
        .iter()
        .enumerate()
        .filter(|(i, _)| tri_alive[*i])
        .map(|(_, t)| *t)
        .collect();
    (vertices, edges, triangles)
}

const P: u64 = 1_000_000_007;

/// Rank of the triangle boundary matrix over GF(p) by column reduction.
/// Ranks of these +-1 integer matrices over a large prime agree with the
/// rational rank for every complex of this size.
fn boundary2_rank(edges: &[[usize; 2]], triangles: &[[usize; 3]]) -> Option<usize> {
    let ekey = |a: usize, b: usize| [a.min(b), a.max(b)];
    let edge_id: HashMap<[usize; 2], usize> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| (ekey(e[0], e[1]), i))
        .collect();
    // pivot row -> reduced column
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    let mut rank = 0usize;
    for t in triangles {
        // oriented boundary of (v0, v1, v2): +[v0v1] - [v0v2] + [v1v2]
        let mut col: Vec<(usize, u64)> = Vec::new();
        let (v0, v1, v2) = (t[0], t[1], t[2]);
        for (a, b, sgn) in [(v0, v1, 1i64), (v0, v2, -1), (v1, v2, 1)] {
            let ei = *edge_id.get(&ekey(a, b))?;
            let coeff = if (a > b) ^ (sgn > 0) { P - 1 } else { 1 };
            col.push((ei, coeff));
        }
        col.sort_unstable_by_key(|(e, _)| *e);
        // Reduce against stored pivots.
        loop {
            let Some(&(top, val)) = col.last() else { break };
            match pivots.get(&top) {
                None => {
                    pivots.insert(top, normalize(col, val));
                    rank += 1;
                    break;
                }
                Some(p) => {
                    col = subtract(&col, p, val);
                    if col.is_empty() {
                        break;
                    }
                }
            }
        }
    }
    Some(rank)
}

fn modinv(a: u64) -> u64 {
    // Fermat: a^(P-2) mod P
    let mut base = a % P;
    let mut exp = P - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        exp >>= 1;
    }
    acc
}

fn normalize(col: Vec<(usize, u64)>, lead: u64) -> Vec<(usize, u64)> {
    let inv = modinv(lead);
    col.into_iter().map(|(e, v)| (e, v * inv % P)).collect()
}

/// col - lead * pivot (pivot normalized to lead coefficient 1).
fn subtract(col: &[(usize, u64)], pivot: &[(usize, u64)], lead: u64) -> Vec<(usize, u64)> {
    let mut map: HashMap<usize, u64> = col.iter().cloned().collect();
    for (e, v) in pivot {
        let sub = lead * v % P;
        let entry = map.entry(*e).or_insert(0);
        *entry = (*entry + P - sub) % P;
        if *entry == 0 {
            map.remove(e);
        }
    }
    let mut out: Vec<(usize, u64)> = map.into_iter().collect();
    out.sort_unstable_by_key(|(e, _)| *e);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VertexKind;

    fn geom(dim: usize, nv: usize, edges: Vec<[usize; 2]>, tris: Vec<[usize; 3]>) -> ShockGeometry {
        ShockGeometry {
            dim,
            vertices: (0..nv).map(|i| vec![i as f64, 0.0, 0.0][..dim].to_vec()).collect(),
            vertex_kinds: vec![VertexKind::Regular; nv],
            edges,
            triangles: tris,
            feature_radius: 0.0,
            warnings: vec![],
        }
    }

    #[test]
    fn single_point_yes() {
        assert_eq!(is_contractible(&geom(1, 1, vec![], vec![])), Contractibility::Yes);
    }

    #[test]
    fn two_points_no() {
        assert_eq!(is_contractible(&geom(1, 2, vec![], vec![])), Contractibility::No);
    }

    #[test]
    fn empty_no() {
        assert_eq!(is_contractible(&geom(2, 0, vec![], vec![])), Contractibility::No);
    }

    #[test]
    fn triangle_cycle_no() {
        let g = geom(2, 3, vec![[0, 1], [1, 2], [2, 0]], vec![]);
        assert_eq!(is_contractible(&g), Contractibility::No);
    }

    #[test]
    fn y_tree_yes() {
        let g = geom(2, 4, vec![[0, 3], [1, 3], [2, 3]], vec![]);
        assert_eq!(is_contractible(&g), Contractibility::Yes);
    }

    #[test]
    fn filled_triangle_yes() {
        let g = geom(3, 3, vec![[0, 1], [1, 2], [0, 2]], vec![[0, 1, 2]]);
        assert_eq!(is_contractible(&g), Contractibility::Yes);
    }

    #[test]
    fn sphere_boundary_no() {
        // Boundary of a tetrahedron: chi = 2, not contractible.
        let edges = vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
        let tris = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        let g = geom(3, 4, edges, tris);
        assert_eq!(g.euler_characteristic(), 2);
        assert_eq!(is_contractible(&g), Contractibility::No);
    }

    #[test]
    fn annulus_like_cycle_no() {
        // A hollow triangle with a tail: chi = 1 - 1 = 0 -> no.
        let g = geom(3, 4, vec![[0, 1], [1, 2], [2, 0], [0, 3]], vec![]);
        assert_eq!(is_contractible(&g), Contractibility::No);
    }

    #[test]
    fn betti_of_filled_vs_hollow() {
        let hollow = geom(3, 3, vec![[0, 1], [1, 2], [0, 2]], vec![]);
        assert_eq!(first_betti_number(&hollow), Some(1));
        let filled = geom(3, 3, vec![[0, 1], [1, 2], [0, 2]], vec![[0, 1, 2]]);
        assert_eq!(first_betti_number(&filled), Some(0));
    }
}
