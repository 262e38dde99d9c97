//! Quadrature on triangles and edges.
//!
//! Degrees 1, 2 and 5 use the classical fully symmetric rules (centroid,
//! three-point interior, seven-point Radon). Every other degree up to
//! [`MAX_DEGREE`] uses a collapsed (conical) product of a Gauss-Jacobi rule,
//! weight `1 - s`, and a Gauss-Legendre rule. All weights are positive.
//! Gauss nodes come from the Golub-Welsch eigenvalue problem.

use nalgebra::DMatrix;

use super::FemError;

pub const MAX_DEGREE: usize = 20;

/// Triangle rule in barycentric coordinates; weights sum to one and are scaled by
/// the element area at use.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss-Legendre rule on `[0, 1]`; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integral of `f` over the triangle with the given vertices.
    pub fn integrate(&self, verts: &[[f64; 2]; 3], mut f: impl FnMut([f64; 2]) -> f64) -> f64 {
        let area = crate::mesh::signed_area(&verts[0], &verts[1], &verts[2]);
        let sum: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * f(map_point(verts, l)))
            .sum();
        area * sum
    }
}

impl EdgeRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

pub fn map_point(verts: &[[f64; 2]; 3], l: &[f64; 3]) -> [f64; 2] {
    [
        l[0] * verts[0][0] + l[1] * verts[1][0] + l[2] * verts[2][0],
        l[0] * verts[0][1] + l[1] * verts[1][1] + l[2] * verts[2][1],
    ]
}

/// Positive-weight triangle rule exact for polynomials of total degree `degree`.
pub fn quadrature_rule(degree: usize) -> Result<QuadratureRule, FemError> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(FemError::UnsupportedDegree { degree, supported: (1, MAX_DEGREE) });
    }
    let (points, weights) = match degree {
        1 => (vec![[1.0 / 3.0; 3]], vec![1.0]),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            (vec![[a, b, b], [b, a, b], [b, b, a]], vec![1.0 / 3.0; 3])
        }
        5 => radon7(),
        _ => conical_product(degree),
    };
    Ok(QuadratureRule { points, weights, degree })
}

/// Gauss-Legendre rule with enough points to integrate degree `degree` exactly.
pub fn edge_rule(degree: usize) -> EdgeRule {
    let n = degree / 2 + 1;
    let (x, w) = gauss_jacobi(n, 0.0, 0.0);
    EdgeRule { points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(), weights: w.iter().map(|w| 0.5 * w).collect() }
}

fn radon7() -> (Vec<[f64; 3]>, Vec<f64>) {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    let b1 = 1.0 - 2.0 * a1;
    let b2 = 1.0 - 2.0 * a2;
    let points = vec![
        [1.0 / 3.0; 3],
        [b1, a1, a1],
        [a1, b1, a1],
        [a1, a1, b1],
        [b2, a2, a2],
        [a2, b2, a2],
        [a2, a2, b2],
    ];
    (points, vec![9.0 / 40.0, w1, w1, w1, w2, w2, w2])
}

/// Collapsed product rule. With `x = s`, `y = t (1 - s)` the reference triangle
/// integral becomes `int_0^1 int_0^1 f (1 - s) ds dt`.
fn conical_product(degree: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let n = degree / 2 + 1;
    // weight (1 - x) on [-1, 1] is Jacobi with alpha = 1, beta = 0
    let (xs, ws) = gauss_jacobi(n, 1.0, 0.0);
    let (xt, wt) = gauss_jacobi(n, 0.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (s, ws) in xs.iter().zip(&ws) {
        let s = 0.5 * (s + 1.0);
        // int_0^1 (1-s) g(s) ds = 1/4 int_{-1}^{1} (1-x) g dx
        let ws = 0.25 * ws;
        for (t, wt) in xt.iter().zip(&wt) {
            let t = 0.5 * (t + 1.0);
            let wt = 0.5 * wt;
            let x = s;
            let y = t * (1.0 - s);
            points.push([1.0 - x - y, x, y]);
            // reference area is 1/2; normalise weights to sum to one
            weights.push(2.0 * ws * wt);
        }
    }
    (points, weights)
}

/// Gauss-Jacobi nodes and weights on `[-1, 1]` for weight `(1-x)^alpha (1+x)^beta`.
pub(crate) fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let num = 4.0 * m * (m + alpha) * (m + beta) * (m + ab);
            let den = (2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0);
            let off = (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gamma function for the small non-negative integer arguments used here.
fn gamma(x: f64) -> f64 {
    let n = x.round();
    assert!((x - n).abs() < 1e-12 && n >= 1.0, "integer argument expected");
    (1..n as u64).map(|k| k as f64).product()
}
