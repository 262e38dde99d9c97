//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the estimator or the quadrature module of the crate;
//! geometry, basis functions and integration rules are rebuilt from scratch.

#![allow(dead_code)]

use std::collections::HashMap;

use coupled_afem::assembly::CoupledState;
use coupled_afem::fem::DofLayout;
use coupled_afem::mesh::Mesh;
use coupled_afem::problem::ProblemSpec;

type P = [f64; 2];

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// Collapsed tensor rule on a triangle; returns (point, weight) with weights
/// summing to the area.
pub fn triangle_rule(v: &[P; 3], n: usize) -> Vec<(P, f64)> {
    let gl = gauss_legendre(n);
    let area2 = ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let mut out = Vec::with_capacity(n * n);
    for &(s, ws) in &gl {
        for &(t, wt) in &gl {
            let (a, b) = (s, t * (1.0 - s));
            let x = [
                v[0][0] + a * (v[1][0] - v[0][0]) + b * (v[2][0] - v[0][0]),
                v[0][1] + a * (v[1][1] - v[0][1]) + b * (v[2][1] - v[0][1]),
            ];
            out.push((x, ws * wt * (1.0 - s) * area2));
        }
    }
    out
}

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: P) -> f64 {
    dot(a, a).sqrt()
}

/// `int_0^L |l|^p` for `l` linear with end values `a`, `b`.
pub fn segment_abs_pow(len: f64, a: f64, b: f64, p: f64) -> f64 {
    if a * b < 0.0 {
        let (a, b) = (a.abs(), b.abs());
        return len * (a.powf(p + 1.0) + b.powf(p + 1.0)) / ((p + 1.0) * (a + b));
    }
    let (a, b) = (a.abs(), b.abs());
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    if (b - a).abs() < 1e-3 * m {
        return len * gauss_legendre(20).iter().map(|&(t, w)| w * ((1.0 - t) * a + t * b).powf(p)).sum::<f64>();
    }
    len * (b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))
}

/// Part of the triangle where the linear function is nonnegative.
fn clip(v: &[P; 3], l: &[f64; 3]) -> Vec<(P, f64)> {
    let mut poly = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        if l[i] >= 0.0 {
            poly.push((v[i], l[i]));
        }
        if (l[i] > 0.0 && l[j] < 0.0) || (l[i] < 0.0 && l[j] > 0.0) {
            let t = l[i] / (l[i] - l[j]);
            poly.push(([v[i][0] + t * (v[j][0] - v[i][0]), v[i][1] + t * (v[j][1] - v[i][1])], 0.0));
        }
    }
    poly
}

/// `int |l|^p` over a counter-clockwise triangle, `l` linear with vertex values `l`.
///
/// Exact via `div(l^{p+1} g) = (p+1) |g|^2 l^p` on each sign region.
pub fn triangle_abs_pow(v: &[P; 3], l: [f64; 3], p: f64) -> f64 {
    let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let g = [
        (l[0] * (v[1][1] - v[2][1]) + l[1] * (v[2][1] - v[0][1]) + l[2] * (v[0][1] - v[1][1])) / area2,
        (l[0] * (v[2][0] - v[1][0]) + l[1] * (v[0][0] - v[2][0]) + l[2] * (v[1][0] - v[0][0])) / area2,
    ];
    let lmax = l.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if lmax == 0.0 {
        return 0.0;
    }
    let diam = (0..3).map(|i| norm(sub(v[i], v[(i + 1) % 3]))).fold(0.0, f64::max);
    if norm(g) * diam < 0.05 * lmax {
        // nearly constant and bounded away from zero: smooth integrand
        return triangle_rule(v, 24)
            .iter()
            .map(|&(x, w)| {
                let b = barycentric(v, x);
                w * (b[0] * l[0] + b[1] * l[1] + b[2] * l[2]).abs().powf(p)
            })
            .sum();
    }
    let gg = dot(g, g);
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let poly = clip(v, &[sign * l[0], sign * l[1], sign * l[2]]);
        let gs = [sign * g[0], sign * g[1]];
        for i in 0..poly.len() {
            let (xa, la) = poly[i];
            let (xb, lb) = poly[(i + 1) % poly.len()];
            let e = sub(xb, xa);
            let len = norm(e);
            if len == 0.0 {
                continue;
            }
            let n = [e[1] / len, -e[0] / len];
            total += dot(gs, n) * segment_abs_pow(len, la, lb, p + 1.0);
        }
    }
    total / ((p + 1.0) * gg)
}

pub fn barycentric(v: &[P; 3], x: P) -> [f64; 3] {
    let d = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let l1 = ((x[0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (x[1] - v[0][1])) / d;
    let l2 = ((v[1][0] - v[0][0]) * (x[1] - v[0][1]) - (x[0] - v[0][0]) * (v[1][1] - v[0][1])) / d;
    [1.0 - l1 - l2, l1, l2]
}

/// Local fields of one element rebuilt from raw coefficients.
pub struct Local {
    pub v: [P; 3],
    pub area: f64,
    pub diam: f64,
    /// RT0 field `a + b x`.
    pub ua: P,
    pub ub: f64,
    /// Nodal temperatures and the constant gradient.
    pub t: [f64; 3],
    pub grad_t: P,
    pub pressure: f64,
}

impl Local {
    pub fn u(&self, x: P) -> P {
        [self.ua[0] + self.ub * x[0], self.ua[1] + self.ub * x[1]]
    }

    pub fn temp(&self, x: P) -> f64 {
        let b = barycentric(&self.v, x);
        b[0] * self.t[0] + b[1] * self.t[1] + b[2] * self.t[2]
    }

    pub fn div_u(&self) -> f64 {
        2.0 * self.ub
    }
}

/// Global edge normal: clockwise rotation of the unit tangent from the lower to
/// the higher vertex index.
fn global_normal(mesh: &Mesh, a: usize, b: usize) -> P {
    let (lo, hi) = (a.min(b), a.max(b));
    let t = sub(mesh.vertex(hi), mesh.vertex(lo));
    let l = norm(t);
    [t[1] / l, -t[0] / l]
}

pub fn locals(mesh: &Mesh, layout: &DofLayout, state: &CoupledState) -> Vec<Local> {
    (0..mesh.num_triangles())
        .map(|k| {
            let tri = mesh.triangle(k);
            let v = [mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])];
            let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
            let diam = (0..3).map(|i| norm(sub(v[i], v[(i + 1) % 3]))).fold(0.0, f64::max);
            // edge i is opposite vertex i; psi_i = s |e| / (2|K|) (x - P_i)
            let (mut ua, mut ub) = ([0.0, 0.0], 0.0);
            for i in 0..3 {
                let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let e = mesh.find_edge(a, b).expect("edge");
                let Some(dof) = layout.edge_dof(e) else { continue };
                let n = global_normal(mesh, a, b);
                let mid = [(v[(i + 1) % 3][0] + v[(i + 2) % 3][0]) / 2.0, (v[(i + 1) % 3][1] + v[(i + 2) % 3][1]) / 2.0];
                let s = if dot(n, sub(mid, v[i])) > 0.0 { 1.0 } else { -1.0 };
                let c = state.velocity[dof] * s * norm(sub(v[(i + 1) % 3], v[(i + 2) % 3])) / (2.0 * area);
                ua[0] -= c * v[i][0];
                ua[1] -= c * v[i][1];
                ub += c;
            }
            let t: [f64; 3] = std::array::from_fn(|i| layout.vertex_dof(tri[i]).map_or(0.0, |d| state.temperature[d]));
            let d2 = 2.0 * area;
            let grad_t = [
                (t[0] * (v[1][1] - v[2][1]) + t[1] * (v[2][1] - v[0][1]) + t[2] * (v[0][1] - v[1][1])) / d2,
                (t[0] * (v[2][0] - v[1][0]) + t[1] * (v[0][0] - v[2][0]) + t[2] * (v[1][0] - v[0][0])) / d2,
            ];
            Local { v, area, diam, ua, ub, t, grad_t, pressure: state.pressure[k] }
        })
        .collect()
}

/// Interior edges as (vertex a, vertex b, element 1, element 2).
fn interior_edges(mesh: &Mesh) -> Vec<(usize, usize, usize, usize)> {
    let mut owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for k in 0..mesh.num_triangles() {
        let t = mesh.triangle(k);
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            owners.entry((a.min(b), a.max(b))).or_default().push(k);
        }
    }
    let mut out: Vec<_> = owners.into_iter().filter(|(_, o)| o.len() == 2).map(|((a, b), o)| (a, b, o[0], o[1])).collect();
    out.sort_unstable();
    out
}

pub struct OracleIndicators {
    pub heat: Vec<f64>,
    pub curl: Vec<f64>,
    pub pressure: Vec<f64>,
}

pub fn oracle_indicators(mesh: &Mesh, layout: &DofLayout, state: &CoupledState, problem: &ProblemSpec, p: f64) -> OracleIndicators {
    let loc = locals(mesh, layout, state);
    let nt = loc.len();
    let kappa = problem.diffusivity;
    let curl_f = problem.force_curl.as_ref().expect("curl f");
    let edge_gl = gauss_legendre(40);

    let (mut heat_e, mut curl_e, mut pres_e) = (vec![0.0; nt], vec![0.0; nt], vec![0.0; nt]);
    for (a, b, k1, k2) in interior_edges(mesh) {
        let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
        let len = norm(sub(xb, xa));
        let tau = [(xb[0] - xa[0]) / len, (xb[1] - xa[1]) / len];
        let n = [tau[1], -tau[0]];
        let (l1, l2) = (&loc[k1], &loc[k2]);
        let flux = |l: &Local, x: P| {
            let u = l.u(x);
            let t = l.temp(x);
            dot([kappa * l.grad_t[0] - t * u[0], kappa * l.grad_t[1] - t * u[1]], n)
        };
        let ja = flux(l1, xa) - flux(l2, xa);
        let jb = flux(l1, xb) - flux(l2, xb);
        let h = segment_abs_pow(len, ja, jb, p);

        let mut c = 0.0;
        for &(s, w) in &edge_gl {
            let x = [xa[0] + s * (xb[0] - xa[0]), xa[1] + s * (xb[1] - xa[1])];
            let nu = (problem.viscosity)(0.5 * (l1.temp(x) + l2.temp(x)));
            let (u1, u2) = (l1.u(x), l2.u(x));
            let j = nu * dot(sub(u1, u2), tau);
            c += w * j * j;
        }
        c *= len;
        let pj = (l1.pressure - l2.pressure).powi(2) * len;
        for k in [k1, k2] {
            heat_e[k] += h;
            curl_e[k] += c;
            pres_e[k] += pj;
        }
    }

    let mut heat = Vec::with_capacity(nt);
    let mut curl = Vec::with_capacity(nt);
    let mut pressure = Vec::with_capacity(nt);
    for (k, l) in loc.iter().enumerate() {
        let h = l.diam;
        let r: [f64; 3] = std::array::from_fn(|i| -dot(l.grad_t, l.u(l.v[i])) - l.t[i] * l.div_u());
        let mut dirac = 0.0;
        for &z in &problem.sources {
            let bc = barycentric(&l.v, z);
            let inside = bc.iter().all(|&c| c >= -1e-12);
            let at_vertex = l.v.iter().any(|&x| norm(sub(x, z)) < 1e-12);
            if inside && !at_vertex {
                dirac += h.powf(2.0 - p);
            }
        }
        heat.push((dirac + h.powf(p) * triangle_abs_pow(&l.v, r, p) + h * heat_e[k]).powf(1.0 / p));

        let (mut vc, mut vp) = (0.0, 0.0);
        for (x, w) in triangle_rule(&l.v, 24) {
            let u = l.u(x);
            let t = l.temp(x);
            let rc = curl_f(x) - (problem.viscosity_deriv)(t) * (l.grad_t[0] * u[1] - l.grad_t[1] * u[0]);
            vc += w * rc * rc;
            let f = (problem.force)(x);
            let nu = (problem.viscosity)(t);
            let rp = [f[0] - nu * u[0], f[1] - nu * u[1]];
            vp += w * dot(rp, rp);
        }
        curl.push((h * h * vc + h * curl_e[k]).sqrt());
        pressure.push((h * h * vp + h * pres_e[k]).sqrt());
    }
    OracleIndicators { heat, curl, pressure }
}
