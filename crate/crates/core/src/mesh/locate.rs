use super::{signed_area, Mesh, MeshError, Point};

/// Default tolerance on barycentric coordinates. Barycentric coordinates are
/// scale free, so this is a tolerance relative to the element size.
pub const DEFAULT_GEO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    /// On local edge `i` (opposite local vertex `i`).
    OnEdge(usize),
    /// At local vertex `i`.
    AtVertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub element: usize,
    pub bary: [f64; 3],
    pub class: PointClass,
}

impl Mesh {
    /// Barycentric coordinates of `z` with respect to triangle `k` (not clipped).
    pub fn barycentric(&self, k: usize, z: Point) -> [f64; 3] {
        let [a, b, c] = self.triangle_points(k);
        let area = signed_area(&a, &b, &c);
        [
            signed_area(&z, &b, &c) / area,
            signed_area(&a, &z, &c) / area,
            signed_area(&a, &b, &z) / area,
        ]
    }

    /// Classifies `z` against the closed triangle `k`; `None` when outside.
    pub fn classify(&self, k: usize, z: Point, tol: f64) -> Option<Location> {
        let mut bary = self.barycentric(k, z);
        if bary.iter().any(|&l| l < -tol) {
            return None;
        }
        let zero: Vec<usize> = (0..3).filter(|&i| bary[i].abs() <= tol).collect();
        let class = match zero.as_slice() {
            [] => PointClass::Interior,
            [i] => {
                bary[*i] = 0.0;
                let s: f64 = bary.iter().sum();
                bary.iter_mut().for_each(|l| *l /= s);
                PointClass::OnEdge(*i)
            }
            _ => {
                let v = (0..3).find(|i| !zero.contains(i)).unwrap_or(0);
                bary = [0.0; 3];
                bary[v] = 1.0;
                PointClass::AtVertex(v)
            }
        };
        Some(Location { element: k, bary, class })
    }

    /// Smallest-id element whose closure contains `z`.
    pub fn locate(&self, z: Point) -> Result<Location, MeshError> {
        self.locate_with_tol(z, DEFAULT_GEO_TOL)
    }

    pub fn locate_with_tol(&self, z: Point, tol: f64) -> Result<Location, MeshError> {
        (0..self.num_triangles())
            .find_map(|k| self.classify(k, z, tol))
            .ok_or(MeshError::OutsideDomain { x: z[0], y: z[1] })
    }

    /// Every element whose closure contains `z`, in increasing id order.
    pub fn locate_all(&self, z: Point, tol: f64) -> Vec<Location> {
        (0..self.num_triangles()).filter_map(|k| self.classify(k, z, tol)).collect()
    }

    pub fn barycenter(&self, k: usize) -> Point {
        let [a, b, c] = self.triangle_points(k);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }
}
