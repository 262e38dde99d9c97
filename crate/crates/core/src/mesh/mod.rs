//! Conforming triangulations of polygonal domains.
//!
//! A [`Mesh`] is immutable once built. Refinement ([`Mesh::bisect`]) returns a
//! new mesh together with a child-to-parent map.

mod generate;
mod io;
mod locate;
mod patch;
mod refine;

pub use generate::{l_shape_criss_cross, unit_square_criss_cross};
pub use io::{read_mesh, read_mesh_file, write_mesh, write_mesh_file};
pub use locate::{Location, PointClass, DEFAULT_GEO_TOL};
pub use patch::Patch;
pub use refine::{RefineOptions, Refinement};

use std::collections::HashMap;

use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("triangle {element} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange { element: usize, vertex: usize, count: usize },
    #[error("triangle {element} is degenerate or clockwise (signed area {area:e})")]
    Degenerate { element: usize, area: f64 },
    #[error("edge ({a}, {b}) is shared by more than two triangles")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("edge ({a}, {b}) is traversed in the same direction by two triangles (overlap)")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("hanging vertex {vertex} lies inside edge ({a}, {b})")]
    HangingVertex { vertex: usize, a: usize, b: usize },
    #[error("vertex {0} is not used by any triangle")]
    IsolatedVertex(usize),
    #[error("mesh has no triangles")]
    Empty,
    #[error("marked element {element} out of range (mesh has {count} elements)")]
    MarkedOutOfRange { element: usize, count: usize },
    #[error("refinement closure exceeded depth cap {cap}; refinement-edge cycle")]
    ClosureDepth { cap: usize },
    #[error("triangle {element} has minimum angle {angle_deg:.3} deg, below the floor {floor_deg} deg")]
    ShapeRegularity { element: usize, angle_deg: f64, floor_deg: f64 },
    #[error("point ({x}, {y}) is outside the meshed domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("mesh file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Conforming triangle mesh with full incidence information.
///
/// Local edge `i` of a triangle is the edge opposite its local vertex `i`.
/// Global edges are stored as `[lo, hi]` vertex pairs, sorted lexicographically,
/// so the edge index order coincides with the vertex-pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    tri_edge_signs: Vec<[f64; 3]>,
    edge_tris: Vec<(usize, Option<usize>)>,
    boundary_edge: Vec<bool>,
    boundary_vertex: Vec<bool>,
    refinement_edge: Vec<usize>,
}

impl Mesh {
    /// Builds a mesh from vertex coordinates and counterclockwise triangles.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = vertices.len();
        let mut used = vec![false; nv];
        for (k, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(MeshError::VertexOutOfRange { element: k, vertex: v, count: nv });
                }
                used[v] = true;
            }
            let area = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(MeshError::Degenerate { element: k, area });
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(MeshError::IsolatedVertex(v));
        }

        // (lo, hi, triangle, local edge, traversed lo->hi)
        let mut half: Vec<(usize, usize, usize, usize, bool)> = Vec::with_capacity(3 * triangles.len());
        for (k, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                half.push((a.min(b), a.max(b), k, i, a < b));
            }
        }
        half.sort_unstable();

        let mut edges = Vec::new();
        let mut edge_tris = Vec::new();
        let mut tri_edges = vec![[usize::MAX; 3]; triangles.len()];
        let mut tri_edge_signs = vec![[0.0; 3]; triangles.len()];
        let mut start = 0;
        while start < half.len() {
            let (lo, hi, ..) = half[start];
            let mut end = start + 1;
            while end < half.len() && half[end].0 == lo && half[end].1 == hi {
                end += 1;
            }
            if end - start > 2 {
                return Err(MeshError::NonManifoldEdge { a: lo, b: hi });
            }
            if end - start == 2 && half[start].4 == half[start + 1].4 {
                return Err(MeshError::InconsistentOrientation { a: lo, b: hi });
            }
            let e = edges.len();
            edges.push([lo, hi]);
            for &(_, _, k, i, forward) in &half[start..end] {
                tri_edges[k][i] = e;
                // Global normal is the clockwise rotation of (hi - lo); it is outward
                // for the triangle that traverses the edge from lo to hi.
                tri_edge_signs[k][i] = if forward { 1.0 } else { -1.0 };
            }
            let first = half[start].2;
            let second = (end - start == 2).then(|| half[start + 1].2);
            edge_tris.push(match second {
                Some(s) if s < first => (s, Some(first)),
                other => (first, other),
            });
            start = end;
        }

        let boundary_edge: Vec<bool> = edge_tris.iter().map(|(_, t)| t.is_none()).collect();
        let mut boundary_vertex = vec![false; nv];
        for (e, &[a, b]) in edges.iter().enumerate() {
            if boundary_edge[e] {
                boundary_vertex[a] = true;
                boundary_vertex[b] = true;
            }
        }

        let mut mesh = Mesh {
            vertices,
            triangles,
            edges,
            tri_edges,
            tri_edge_signs,
            edge_tris,
            boundary_edge,
            boundary_vertex,
            refinement_edge: Vec::new(),
        };
        mesh.refinement_edge = (0..mesh.num_triangles()).map(|k| mesh.longest_local_edge(k)).collect();
        mesh.check_hanging_vertices()?;
        Ok(mesh)
    }

    /// A hanging vertex always sits on edges with a single incident triangle, so it
    /// suffices to test boundary-flagged vertices against boundary-flagged edges.
    fn check_hanging_vertices(&self) -> Result<(), MeshError> {
        let bverts: Vec<usize> = (0..self.num_vertices()).filter(|&v| self.boundary_vertex[v]).collect();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if !self.boundary_edge[e] {
                continue;
            }
            let pa = self.vertices[a];
            let pb = self.vertices[b];
            let len2 = dist2(&pa, &pb);
            let (xmin, xmax) = (pa[0].min(pb[0]), pa[0].max(pb[0]));
            let (ymin, ymax) = (pa[1].min(pb[1]), pa[1].max(pb[1]));
            for &v in &bverts {
                if v == a || v == b {
                    continue;
                }
                let q = self.vertices[v];
                if q[0] < xmin || q[0] > xmax || q[1] < ymin || q[1] > ymax {
                    continue;
                }
                let cross = (pb[0] - pa[0]) * (q[1] - pa[1]) - (pb[1] - pa[1]) * (q[0] - pa[0]);
                if cross.abs() <= 1e-12 * len2 {
                    let t = ((q[0] - pa[0]) * (pb[0] - pa[0]) + (q[1] - pa[1]) * (pb[1] - pa[1])) / len2;
                    if t > 0.0 && t < 1.0 {
                        return Err(MeshError::HangingVertex { vertex: v, a, b });
                    }
                }
            }
        }
        Ok(())
    }

    /// Local index of the longest edge; equal lengths go to the smaller global edge index.
    fn longest_local_edge(&self, k: usize) -> usize {
        let mut best = 0;
        for i in 1..3 {
            if edge_order(self.edge_len2(self.tri_edges[k][i]), self.tri_edges[k][i], self.edge_len2(self.tri_edges[k][best]), self.tri_edges[k][best])
                == std::cmp::Ordering::Greater
            {
                best = i;
            }
        }
        best
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, k: usize) -> [usize; 3] {
        self.triangles[k]
    }

    pub fn triangle_points(&self, k: usize) -> [Point; 3] {
        self.triangles[k].map(|v| self.vertices[v])
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// Global edges of triangle `k`, local edge `i` opposite local vertex `i`.
    pub fn triangle_edges(&self, k: usize) -> [usize; 3] {
        self.tri_edges[k]
    }

    /// `+1` where the global edge normal points out of triangle `k`, `-1` otherwise.
    pub fn triangle_edge_signs(&self, k: usize) -> [f64; 3] {
        self.tri_edge_signs[k]
    }

    /// Incident triangles of edge `e`, smaller id first.
    pub fn edge_triangles(&self, e: usize) -> (usize, Option<usize>) {
        self.edge_tris[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn refinement_edge(&self, k: usize) -> usize {
        self.refinement_edge[k]
    }

    pub fn area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangle_points(k);
        signed_area(&a, &b, &c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|k| self.area(k)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_len2(e).sqrt()
    }

    fn edge_len2(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        dist2(&self.vertices[a], &self.vertices[b])
    }

    /// Element diameter `h_K`, the length of its longest edge.
    pub fn diameter(&self, k: usize) -> f64 {
        self.edge_length(self.tri_edges[k][self.refinement_edge[k]])
    }

    /// Unit tangent of edge `e`, pointing from its lower to its higher vertex index.
    pub fn edge_tangent(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let len = self.edge_length(e);
        [(pb[0] - pa[0]) / len, (pb[1] - pa[1]) / len]
    }

    /// Unit global normal of edge `e`: the tangent rotated clockwise.
    pub fn edge_normal(&self, e: usize) -> Point {
        let t = self.edge_tangent(e);
        [t[1], -t[0]]
    }

    pub fn min_angle_deg(&self, k: usize) -> f64 {
        let p = self.triangle_points(k);
        let mut min = f64::INFINITY;
        for i in 0..3 {
            let o = p[i];
            let u = [p[(i + 1) % 3][0] - o[0], p[(i + 1) % 3][1] - o[1]];
            let w = [p[(i + 2) % 3][0] - o[0], p[(i + 2) % 3][1] - o[1]];
            let cross = u[0] * w[1] - u[1] * w[0];
            let dot = u[0] * w[0] + u[1] * w[1];
            min = min.min(cross.atan2(dot).to_degrees());
        }
        min
    }

    pub fn num_interior_edges(&self) -> usize {
        self.boundary_edge.iter().filter(|&&b| !b).count()
    }

    pub fn num_interior_vertices(&self) -> usize {
        self.boundary_vertex.iter().filter(|&&b| !b).count()
    }

    /// Triangles incident to each vertex, in increasing id order.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for (k, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                out[v].push(k);
            }
        }
        out
    }

    /// Global edge index of the vertex pair, if it is an edge of the mesh.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.binary_search(&key).ok()
    }

    /// Map from sorted vertex pair to edge index, for bulk lookups.
    pub fn edge_map(&self) -> HashMap<[usize; 2], usize> {
        self.edges.iter().enumerate().map(|(e, &k)| (k, e)).collect()
    }
}

pub(crate) fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn dist2(a: &Point, b: &Point) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    dx * dx + dy * dy
}

/// Strict total order on edges used for the refinement edge: longer first, then the
/// smaller key. `key` is any value that orders edges like their global index.
pub(crate) fn edge_order<K: Ord>(len2_a: f64, key_a: K, len2_b: f64, key_b: K) -> std::cmp::Ordering {
    match len2_a.partial_cmp(&len2_b).expect("finite edge lengths") {
        std::cmp::Ordering::Equal => key_b.cmp(&key_a),
        ord => ord,
    }
}
