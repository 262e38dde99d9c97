//! Structured criss-cross meshes for the built-in domains.

use std::collections::BTreeMap;

use super::{Mesh, MeshError, Point};

/// Unit square split into `n x n` cells, each cut by both diagonals into four triangles.
pub fn unit_square_criss_cross(n: usize) -> Result<Mesh, MeshError> {
    let h = 1.0 / n as f64;
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
    criss_cross(&cells, [0.0, 0.0], h)
}

/// L-shaped domain `(-1,1)^2 \ [0,1) x [-1,0)` on an `n x n` grid of the bounding
/// square (`n` even), lower-right quadrant removed, criss-cross cells.
pub fn l_shape_criss_cross(n: usize) -> Result<Mesh, MeshError> {
    assert!(n >= 2 && n.is_multiple_of(2), "L-shape grid needs an even cell count");
    let h = 2.0 / n as f64;
    let half = n / 2;
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| !(i >= half && j < half))
        .collect();
    criss_cross(&cells, [-1.0, -1.0], h)
}

fn criss_cross(cells: &[(usize, usize)], origin: Point, h: f64) -> Result<Mesh, MeshError> {
    // Grid corners are keyed by twice their index so cell centres get odd keys.
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut id = |key: (usize, usize), vertices: &mut Vec<Point>| {
        *index.entry(key).or_insert_with(|| {
            vertices.push([origin[0] + 0.5 * h * key.0 as f64, origin[1] + 0.5 * h * key.1 as f64]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * cells.len());
    for &(i, j) in cells {
        let sw = id((2 * i, 2 * j), &mut vertices);
        let se = id((2 * i + 2, 2 * j), &mut vertices);
        let ne = id((2 * i + 2, 2 * j + 2), &mut vertices);
        let nw = id((2 * i, 2 * j + 2), &mut vertices);
        let c = id((2 * i + 1, 2 * j + 1), &mut vertices);
        triangles.extend([[sw, se, c], [se, ne, c], [ne, nw, c], [nw, sw, c]]);
    }
    Mesh::new(vertices, triangles)
}
