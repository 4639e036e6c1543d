//! Discretized shock geometry: interface extraction from labeled grids and
//! the contractibility test.
//!
//! The instant shock is the locus where the active region (which branch or
//! well realizes the global minimum) changes. The extraction engine walks a
//! grid, compares adjacent samples through a [`RegionField`], refines the
//! crossing points, and assembles points (d=1), a polyline graph (d=2), or a
//! triangle complex (d=3). Junction cells (three or more regions) produce
//! star vertices, which is what glues triple curves correctly.

mod contract;
mod extract;

pub use contract::{is_contractible, Contractibility};
pub use extract::{extract_interfaces, GridSpec, RegionField};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    /// Plain two-region crossing.
    Regular,
    /// Three or more regions meet here.
    Junction,
    /// Interior star vertex introduced by a cell.
    Center,
    /// A region with a degenerate minimum abuts here (shock edge end).
    Degenerate,
}

/// Discretized instant shock with labeled singular loci.
#[derive(Debug, Clone, Serialize)]
pub struct ShockGeometry {
    /// Ambient dimension of the coordinates (1, 2 or 3).
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub vertex_kinds: Vec<VertexKind>,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Vertices closer than this are one feature for invariant counting.
    pub feature_radius: f64,
    pub warnings: Vec<String>,
}

impl ShockGeometry {
    pub fn empty(dim: usize) -> ShockGeometry {
        ShockGeometry {
            dim,
            vertices: Vec::new(),
            vertex_kinds: Vec::new(),
            edges: Vec::new(),
            triangles: Vec::new(),
            feature_radius: 0.0,
            warnings: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of connected components (isolated vertices count).
    pub fn components(&self) -> usize {
        if self.vertices.is_empty() {
            return 0;
        }
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e[0], e[1]);
        }
        for t in &self.triangles {
            uf.union(t[0], t[1]);
            uf.union(t[1], t[2]);
        }
        let mut roots = std::collections::BTreeSet::new();
        for v in 0..self.vertices.len() {
            roots.insert(uf.find(v));
        }
        roots.len()
    }

    /// Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Plot-ready CSV: one section per simplex kind.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# vertices: id,kind,coords...\n");
        for (i, (v, k)) in self.vertices.iter().zip(&self.vertex_kinds).enumerate() {
            out.push_str(&format!("v,{},{:?}", i, k));
            for c in v {
                out.push_str(&format!(",{}", c));
            }
            out.push('\n');
        }
        if !self.edges.is_empty() {
            out.push_str("# edges: a,b\n");
            for e in &self.edges {
                out.push_str(&format!("e,{},{}\n", e[0], e[1]));
            }
        }
        if !self.triangles.is_empty() {
            out.push_str("# triangles: a,b,c\n");
            for t in &self.triangles {
                out.push_str(&format!("t,{},{},{}\n", t[0], t[1], t[2]));
            }
        }
        out
    }

    /// Counts of junction vertices and endpoint vertices (degree-1 in the
    /// edge graph), the discrete invariants used for event detection.
    /// Nearby junction or endpoint vertices are one feature: a triple point
    /// that sits on a cell boundary shows up in both adjacent cells, and
    /// merging within `feature_radius` keeps the counts stable under drift.
    pub fn invariants(&self) -> GeometryInvariants {
        let mut degree = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            degree[e[0]] += 1;
            degree[e[1]] += 1;
        }
        let endpoints = if self.triangles.is_empty() {
            degree.iter().filter(|&&d| d == 1).count()
        } else {
            0
        };
        let junction_vs: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| matches!(self.vertex_kinds[v], VertexKind::Junction))
            .collect();
        let cluster_count = |vs: &[usize]| -> usize {
            let mut uf = UnionFind::new(vs.len());
            for i in 0..vs.len() {
                for j in (i + 1)..vs.len() {
                    let d2: f64 = self.vertices[vs[i]]
                        .iter()
                        .zip(&self.vertices[vs[j]])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2.sqrt() <= self.feature_radius {
                        uf.union(i, j);
                    }
                }
            }
            let mut roots = std::collections::BTreeSet::new();
            for i in 0..vs.len() {
                roots.insert(uf.find(i));
            }
            roots.len()
        };
        GeometryInvariants {
            components: self.components(),
            vertices: self.vertices.len(),
            endpoints,
            junctions: cluster_count(&junction_vs),
            euler: self.euler_characteristic(),
        }
    }
}

/// Discrete topological invariants compared across time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeometryInvariants {
    pub components: usize,
    pub vertices: usize,
    pub endpoints: usize,
    pub junctions: usize,
    pub euler: i64,
}

impl GeometryInvariants {
    /// The part compared across time steps for event detection. Vertex
    /// counts drift with resolution, so only genuinely topological fields
    /// participate.
    pub fn signature(&self, dim: usize) -> (usize, usize, usize, i64) {
        match dim {
            1 => (self.components, self.vertices, 0, 0),
            2 => (self.components, self.endpoints, self.junctions, 0),
            _ => (
                self.components,
                self.endpoints,
                self.junctions,
                self.euler,
            ),
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
