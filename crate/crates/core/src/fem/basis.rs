//! Element-local RT0 and P1 bases.
//!
//! RT0 coefficients are normal components with respect to the global edge
//! normal: on local edge `i`, `psi_i . n_global = 1` and `psi_j . n = 0` for
//! `j != i`, so the flux of `psi_i` through its edge is `|gamma_i|`.

use crate::mesh::{Mesh, Point};

/// Geometric data of one triangle needed by the local bases.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub verts: [Point; 3],
    pub area: f64,
    /// Length of local edge `i` (opposite vertex `i`).
    pub edge_len: [f64; 3],
    pub signs: [f64; 3],
    pub grad_bary: [Point; 3],
    pub diameter: f64,
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, k: usize) -> Self {
        let verts = mesh.triangle_points(k);
        let edges = mesh.triangle_edges(k);
        Self::from_parts(verts, edges.map(|e| mesh.edge_length(e)), mesh.triangle_edge_signs(k))
    }

    pub fn from_parts(verts: [Point; 3], edge_len: [f64; 3], signs: [f64; 3]) -> Self {
        let area = crate::mesh::signed_area(&verts[0], &verts[1], &verts[2]);
        let grad_bary = std::array::from_fn(|i| {
            let p1 = verts[(i + 1) % 3];
            let p2 = verts[(i + 2) % 3];
            [(p1[1] - p2[1]) / (2.0 * area), (p2[0] - p1[0]) / (2.0 * area)]
        });
        let diameter = edge_len.iter().copied().fold(0.0, f64::max);
        ElementGeometry { verts, area, edge_len, signs, grad_bary, diameter }
    }

    pub fn point(&self, bary: &[f64; 3]) -> Point {
        super::quadrature::map_point(&self.verts, bary)
    }

    /// Value of RT0 basis function `i` at `x`.
    pub fn rt0_basis(&self, i: usize, x: Point) -> Point {
        let c = self.signs[i] * self.edge_len[i] / (2.0 * self.area);
        let p = self.verts[i];
        [c * (x[0] - p[0]), c * (x[1] - p[1])]
    }

    /// Constant divergence of RT0 basis function `i`.
    pub fn rt0_div(&self, i: usize) -> f64 {
        self.signs[i] * self.edge_len[i] / self.area
    }

    pub fn eval_rt0(&self, coeffs: &[f64; 3], x: Point) -> Point {
        let mut v = [0.0; 2];
        for (i, c) in coeffs.iter().enumerate() {
            let b = self.rt0_basis(i, x);
            v[0] += c * b[0];
            v[1] += c * b[1];
        }
        v
    }

    pub fn div_rt0(&self, coeffs: &[f64; 3]) -> f64 {
        (0..3).map(|i| coeffs[i] * self.rt0_div(i)).sum()
    }

    pub fn eval_p1(&self, coeffs: &[f64; 3], bary: &[f64; 3]) -> f64 {
        coeffs[0] * bary[0] + coeffs[1] * bary[1] + coeffs[2] * bary[2]
    }

    pub fn grad_p1(&self, coeffs: &[f64; 3]) -> Point {
        let g = &self.grad_bary;
        [
            coeffs[0] * g[0][0] + coeffs[1] * g[1][0] + coeffs[2] * g[2][0],
            coeffs[0] * g[0][1] + coeffs[1] * g[1][1] + coeffs[2] * g[2][1],
        ]
    }

    /// Barycentric coordinates of a physical point.
    pub fn bary(&self, x: Point) -> [f64; 3] {
        let [a, b, c] = self.verts;
        let area = self.area;
        let sa = crate::mesh::signed_area;
        [sa(&x, &b, &c) / area, sa(&a, &x, &c) / area, sa(&a, &b, &x) / area]
    }
}

/// RT0 field of triangle `k` at `x` from its three local coefficients.
pub fn evaluate_rt0(mesh: &Mesh, k: usize, coeffs: &[f64; 3], x: Point) -> Point {
    ElementGeometry::new(mesh, k).eval_rt0(coeffs, x)
}

pub fn evaluate_p1(mesh: &Mesh, k: usize, coeffs: &[f64; 3], x: Point) -> f64 {
    let g = ElementGeometry::new(mesh, k);
    g.eval_p1(coeffs, &g.bary(x))
}

pub fn evaluate_grad_p1(mesh: &Mesh, k: usize, coeffs: &[f64; 3]) -> Point {
    ElementGeometry::new(mesh, k).grad_p1(coeffs)
}
