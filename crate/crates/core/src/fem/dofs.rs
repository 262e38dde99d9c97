use crate::mesh::Mesh;

/// Global numbering of the unknowns.
///
/// Velocity unknowns live on interior edges (zero normal flux on the boundary),
/// pressure unknowns on every triangle, temperature unknowns on interior
/// vertices (homogeneous Dirichlet data).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout {
    edge_dof: Vec<Option<usize>>,
    vertex_dof: Vec<Option<usize>>,
    interior_vertices: Vec<usize>,
    n_velocity: usize,
    n_pressure: usize,
    n_temperature: usize,
}

impl DofLayout {
    pub fn new(mesh: &Mesh) -> Self {
        let mut n_velocity = 0;
        let edge_dof = (0..mesh.num_edges())
            .map(|e| {
                (!mesh.is_boundary_edge(e)).then(|| {
                    n_velocity += 1;
                    n_velocity - 1
                })
            })
            .collect();
        let mut interior_vertices = Vec::new();
        let vertex_dof = (0..mesh.num_vertices())
            .map(|v| {
                (!mesh.is_boundary_vertex(v)).then(|| {
                    interior_vertices.push(v);
                    interior_vertices.len() - 1
                })
            })
            .collect();
        DofLayout {
            edge_dof,
            vertex_dof,
            n_temperature: interior_vertices.len(),
            interior_vertices,
            n_velocity,
            n_pressure: mesh.num_triangles(),
        }
    }

    pub fn n_velocity(&self) -> usize {
        self.n_velocity
    }

    pub fn n_pressure(&self) -> usize {
        self.n_pressure
    }

    pub fn n_temperature(&self) -> usize {
        self.n_temperature
    }

    /// Total unknown count: interior edges + triangles + interior vertices.
    pub fn ndof(&self) -> usize {
        self.n_velocity + self.n_pressure + self.n_temperature
    }

    pub fn edge_dof(&self, e: usize) -> Option<usize> {
        self.edge_dof[e]
    }

    pub fn vertex_dof(&self, v: usize) -> Option<usize> {
        self.vertex_dof[v]
    }

    /// Mesh vertex of temperature unknown `i`.
    pub fn temperature_vertex(&self, i: usize) -> usize {
        self.interior_vertices[i]
    }

    /// Local RT0 coefficients of triangle `k` (zero on boundary edges).
    pub fn local_velocity(&self, mesh: &Mesh, k: usize, velocity: &[f64]) -> [f64; 3] {
        mesh.triangle_edges(k).map(|e| self.edge_dof[e].map_or(0.0, |d| velocity[d]))
    }

    /// Nodal temperatures of triangle `k` (zero on boundary vertices).
    pub fn local_temperature(&self, mesh: &Mesh, k: usize, temperature: &[f64]) -> [f64; 3] {
        mesh.triangle(k).map(|v| self.vertex_dof[v].map_or(0.0, |d| temperature[d]))
    }

    /// Temperature at every mesh vertex, boundary values included.
    pub fn nodal_temperature(&self, temperature: &[f64]) -> Vec<f64> {
        self.vertex_dof.iter().map(|d| d.map_or(0.0, |d| temperature[d])).collect()
    }
}
