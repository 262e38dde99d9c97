//! Residual a posteriori indicators.
//!
//! Per element `K` with diameter `h_K`:
//!
//! * heat: `E_K^p = sum_{z in D, z in K not a vertex} h_K^{2-p} + h_K^p int_K |R_K|^p
//!   + h_K sum_{gamma in dK interior} int_gamma |J_gamma|^p`, where
//!   `R_K = -grad T_h . u_h - T_h div u_h` and `J = [[(kappa grad T_h - T_h u_h) . n]]`;
//! * curl: `h_K^2 ||curl f - nu'(T_h) grad T_h x u_h||^2 + h_K sum ||[[(f - nu(T_h) u_h) . t]]||^2`;
//! * pressure: `h_K^2 ||f - nu(T_h) u_h||^2 + h_K sum ||[[p_h n]]||^2`.
//!
//! Interior edges enter the sums of both incident elements. Jumps are taken as
//! `K+` minus `K-` with `K+` the element of smaller id.

use thiserror::Error;

use crate::assembly::{AssemblyError, CoupledState, Discretization};
use crate::fem::{edge_rule, ElementGeometry};
use crate::mesh::{PointClass, DEFAULT_GEO_TOL};
use crate::problem::ProblemSpec;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("integrability index p = {0} must lie in the open interval (1, 2)")]
    InvalidP(f64),
    #[error("problem {0:?} has no analytic curl of the force; supply force_curl")]
    MissingCurl(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

/// Per-element indicators and their global aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    pub p: f64,
    pub heat: Vec<f64>,
    pub curl: Vec<f64>,
    pub pressure: Vec<f64>,
    /// `heat + curl + pressure` per element.
    pub total: Vec<f64>,
    pub est_heat: f64,
    pub est_curl: f64,
    pub est_pressure: f64,
    pub est_total: f64,
}

pub fn check_p(p: f64) -> Result<(), EstimatorError> {
    if p > 1.0 && p < 2.0 {
        Ok(())
    } else {
        Err(EstimatorError::InvalidP(p))
    }
}

pub fn aggregate(heat: Vec<f64>, curl: Vec<f64>, pressure: Vec<f64>, p: f64) -> IndicatorField {
    assert!(heat.len() == curl.len() && curl.len() == pressure.len());
    let est_heat = heat.iter().map(|e| e.powf(p)).sum::<f64>().powf(1.0 / p);
    let est_curl = curl.iter().map(|e| e * e).sum::<f64>().sqrt();
    let est_pressure = pressure.iter().map(|e| e * e).sum::<f64>().sqrt();
    let total = (0..heat.len()).map(|k| heat[k] + curl[k] + pressure[k]).collect();
    IndicatorField {
        p,
        heat,
        curl,
        pressure,
        total,
        est_heat,
        est_curl,
        est_pressure,
        est_total: est_heat + est_curl + est_pressure,
    }
}

/// All three indicator families and their aggregates.
pub fn estimate(disc: &Discretization, state: &CoupledState, problem: &ProblemSpec, p: f64) -> Result<IndicatorField, EstimatorError> {
    let heat = heat_indicator(disc, state, problem, p)?;
    let curl = curl_indicator(disc, state, problem)?;
    let pressure = pressure_indicator(disc, state, problem)?;
    Ok(aggregate(heat, curl, pressure, p))
}

/// Local fields of one element.
struct Local {
    g: ElementGeometry,
    u: [f64; 3],
    t: [f64; 3],
    grad_t: [f64; 2],
}

fn locals(disc: &Discretization, state: &CoupledState) -> Result<Vec<Local>, EstimatorError> {
    state.check_layout(&disc.layout)?;
    let (mesh, layout) = (&disc.mesh, &disc.layout);
    Ok((0..mesh.num_triangles())
        .map(|k| {
            let g = disc.geometry(k);
            let t = layout.local_temperature(mesh, k, &state.temperature);
            Local { u: layout.local_velocity(mesh, k, &state.velocity), grad_t: g.grad_p1(&t), t, g }
        })
        .collect())
}

/// For each interior edge, calls `f(e, k_plus, k_minus)` and adds the result to both elements.
fn edge_sums(disc: &Discretization, mut f: impl FnMut(usize, usize, usize) -> f64) -> Vec<f64> {
    let mesh = &disc.mesh;
    let mut sums = vec![0.0; mesh.num_triangles()];
    for e in 0..mesh.num_edges() {
        if let (kp, Some(km)) = mesh.edge_triangles(e) {
            let v = f(e, kp, km);
            sums[kp] += v;
            sums[km] += v;
        }
    }
    sums
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn heat_indicator(disc: &Discretization, state: &CoupledState, problem: &ProblemSpec, p: f64) -> Result<Vec<f64>, EstimatorError> {
    check_p(p)?;
    let mesh = &disc.mesh;
    let loc = locals(disc, state)?;
    let kappa = problem.diffusivity;
    let nodal = disc.layout.nodal_temperature(&state.temperature);

    let edges = edge_sums(disc, |e, kp, km| {
        let [a, b] = mesh.edge(e);
        let n = mesh.edge_normal(e);
        let (lp, lm) = (&loc[kp], &loc[km]);
        let jump = |v: usize| {
            let x = mesh.vertex(v);
            let up = lp.g.eval_rt0(&lp.u, x);
            let um = lm.g.eval_rt0(&lm.u, x);
            let qp = [kappa * lp.grad_t[0] - nodal[v] * up[0], kappa * lp.grad_t[1] - nodal[v] * up[1]];
            let qm = [kappa * lm.grad_t[0] - nodal[v] * um[0], kappa * lm.grad_t[1] - nodal[v] * um[1]];
            dot([qp[0] - qm[0], qp[1] - qm[1]], n)
        };
        mesh.edge_length(e) * segment_lp(jump(a), jump(b), p)
    });

    let mut dirac = vec![0.0; mesh.num_triangles()];
    for &z in &problem.sources {
        for l in mesh.locate_all(z, DEFAULT_GEO_TOL) {
            if !matches!(l.class, PointClass::AtVertex(_)) {
                dirac[l.element] += mesh.diameter(l.element).powf(2.0 - p);
            }
        }
    }

    Ok(loc
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let h = l.g.diameter;
            let div = l.g.div_rt0(&l.u);
            let r: [f64; 3] = std::array::from_fn(|i| -dot(l.grad_t, l.g.eval_rt0(&l.u, l.g.verts[i])) - l.t[i] * div);
            let vol = triangle_lp(l.g.area, r, p);
            (dirac[k] + h.powf(p) * vol + h * edges[k]).powf(1.0 / p)
        })
        .collect())
}

pub fn curl_indicator(disc: &Discretization, state: &CoupledState, problem: &ProblemSpec) -> Result<Vec<f64>, EstimatorError> {
    let curl_f = problem.force_curl.as_ref().ok_or_else(|| EstimatorError::MissingCurl(problem.name.clone()))?;
    let mesh = &disc.mesh;
    let loc = locals(disc, state)?;
    let nodal = disc.layout.nodal_temperature(&state.temperature);
    let er = &disc.edge_quad;

    let edges = edge_sums(disc, |e, kp, km| {
        let [a, b] = mesh.edge(e);
        let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
        let tau = mesh.edge_tangent(e);
        let (lp, lm) = (&loc[kp], &loc[km]);
        let mut s = 0.0;
        for (&t, &w) in er.points.iter().zip(&er.weights) {
            let x = [xa[0] + t * (xb[0] - xa[0]), xa[1] + t * (xb[1] - xa[1])];
            let nu = (problem.viscosity)((1.0 - t) * nodal[a] + t * nodal[b]);
            let up = lp.g.eval_rt0(&lp.u, x);
            let um = lm.g.eval_rt0(&lm.u, x);
            let j = -nu * dot([up[0] - um[0], up[1] - um[1]], tau);
            s += w * j * j;
        }
        s * mesh.edge_length(e)
    });

    Ok(loc
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let h = l.g.diameter;
            let mut vol = 0.0;
            for (b, w) in disc.quad.points.iter().zip(&disc.quad.weights) {
                let x = l.g.point(b);
                let u = l.g.eval_rt0(&l.u, x);
                let dnu = (problem.viscosity_deriv)(l.g.eval_p1(&l.t, b));
                let r = curl_f(x) - dnu * (l.grad_t[0] * u[1] - l.grad_t[1] * u[0]);
                vol += w * r * r;
            }
            (h * h * vol * l.g.area + h * edges[k]).sqrt()
        })
        .collect())
}

pub fn pressure_indicator(disc: &Discretization, state: &CoupledState, problem: &ProblemSpec) -> Result<Vec<f64>, EstimatorError> {
    let mesh = &disc.mesh;
    let loc = locals(disc, state)?;
    let pr = &state.pressure;
    let edges = edge_sums(disc, |e, kp, km| (pr[kp] - pr[km]).powi(2) * mesh.edge_length(e));
    Ok(loc
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let h = l.g.diameter;
            let mut vol = 0.0;
            for (b, w) in disc.quad.points.iter().zip(&disc.quad.weights) {
                let x = l.g.point(b);
                let u = l.g.eval_rt0(&l.u, x);
                let nu = (problem.viscosity)(l.g.eval_p1(&l.t, b));
                let f = (problem.force)(x);
                let r = [f[0] - nu * u[0], f[1] - nu * u[1]];
                vol += w * dot(r, r);
            }
            (h * h * vol * l.g.area + h * edges[k]).sqrt()
        })
        .collect())
}

/// `h_K ||f - P_K f||_{L^2(K)}` with `P_K` the elementwise mean; a diagnostic only.
pub fn data_oscillation(disc: &Discretization, problem: &ProblemSpec) -> Vec<f64> {
    (0..disc.mesh.num_triangles())
        .map(|k| {
            let g = disc.geometry(k);
            let q = &disc.quad;
            let vals: Vec<[f64; 2]> = q.points.iter().map(|b| (problem.force)(g.point(b))).collect();
            let mean = vals.iter().zip(&q.weights).fold([0.0; 2], |m, (v, w)| [m[0] + w * v[0], m[1] + w * v[1]]);
            let var: f64 = vals.iter().zip(&q.weights).map(|(v, w)| w * ((v[0] - mean[0]).powi(2) + (v[1] - mean[1]).powi(2))).sum();
            g.diameter * (var * g.area).sqrt()
        })
        .collect()
}

/// `F(t) = |t|^(p+2) / ((p+1)(p+2))`, so that `F'' = |t|^p`.
fn antideriv2(t: f64, p: f64) -> f64 {
    t.abs().powf(p + 2.0) / ((p + 1.0) * (p + 2.0))
}

/// `F'(t) = sign(t) |t|^(p+1) / (p+1)`.
fn antideriv1(t: f64, p: f64) -> f64 {
    t.signum() * t.abs().powf(p + 1.0) / (p + 1.0)
}

/// Divided difference `F[a, b] = int_0^1 F'(a + s (b - a)) ds`.
fn divided1(a: f64, b: f64, p: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if (b - a).abs() > 0.1 * scale {
        (antideriv2(b, p) - antideriv2(a, p)) / (b - a)
    } else {
        // a and b share a sign, F' is smooth in between
        let r = edge_rule(23);
        r.points.iter().zip(&r.weights).map(|(s, w)| w * antideriv1(a + s * (b - a), p)).sum()
    }
}

/// `int_0^1 |a + s (b - a)|^p ds`, exactly.
pub fn segment_lp(a: f64, b: f64, p: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else if (b - a).abs() > 0.1 * scale {
        (antideriv1(b, p) - antideriv1(a, p)) / (b - a)
    } else {
        let r = edge_rule(23);
        r.points.iter().zip(&r.weights).map(|(s, w)| w * (a + s * (b - a)).abs().powf(p)).sum()
    }
}

/// `int_K |g|^p` for the affine `g` with vertex values `vals` on a triangle of
/// the given area.
///
/// Uses the Hermite-Genocchi formula `int_K F''(g) = 2 |K| F[g0, g1, g2]`, which
/// is exact also when `g` changes sign inside `K`. Nearly constant `g` falls back
/// to a high-order rule, where `|g|^p` is smooth.
pub fn triangle_lp(area: f64, vals: [f64; 3], p: f64) -> f64 {
    let mut v = vals;
    v.sort_by(f64::total_cmp);
    let scale = v[0].abs().max(v[2].abs());
    if scale == 0.0 {
        return 0.0;
    }
    if v[2] - v[0] > 0.2 * scale {
        2.0 * area * (divided1(v[1], v[2], p) - divided1(v[0], v[1], p)) / (v[2] - v[0])
    } else {
        let q = crate::fem::quadrature_rule(20).expect("degree 20 is supported");
        area * q.points.iter().zip(&q.weights).map(|(l, w)| w * (l[0] * v[0] + l[1] * v[1] + l[2] * v[2]).abs().powf(p)).sum::<f64>()
    }
}
