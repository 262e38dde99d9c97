use super::Mesh;

/// Element stars: `edge_patch` holds the centre and its edge neighbours,
/// `vertex_patch` the centre and every element sharing at least a vertex.
/// Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub center: usize,
    pub edge_patch: Vec<usize>,
    pub vertex_patch: Vec<usize>,
}

impl Mesh {
    pub fn patches(&self) -> Vec<Patch> {
        let vt = self.vertex_triangles();
        (0..self.num_triangles())
            .map(|k| {
                let mut edge_patch = vec![k];
                for e in self.triangle_edges(k) {
                    let (a, b) = self.edge_triangles(e);
                    edge_patch.extend([a].into_iter().chain(b).filter(|&t| t != k));
                }
                edge_patch.sort_unstable();
                let mut vertex_patch: Vec<usize> = self.triangle(k).iter().flat_map(|&v| vt[v].iter().copied()).collect();
                vertex_patch.sort_unstable();
                vertex_patch.dedup();
                Patch { center: k, edge_patch, vertex_patch }
            })
            .collect()
    }

    /// The two elements sharing interior edge `e`, `None` on the boundary.
    pub fn edge_pair(&self, e: usize) -> Option<[usize; 2]> {
        match self.edge_triangles(e) {
            (a, Some(b)) => Some([a, b]),
            _ => None,
        }
    }
}
