//! Linear systems of the Picard iteration.
//!
//! The Darcy system is the saddle-point block
//!
//! ```text
//! [ A(T)  B^T  0 ] [u]   [F]
//! [ B     0    m ] [p] = [0]
//! [ 0     m^T  0 ] [l]   [0]
//! ```
//!
//! with `A_ij = int nu(T_h) psi_i . psi_j`, `B_Ki = -int_K div psi_i` and the
//! area row `m_K = |K|` enforcing a zero-mean pressure. The temperature system
//! is `K + C` with `K_ij = kappa int grad phi_j . grad phi_i` and
//! `C_ij = -int phi_j (u_h . grad phi_i)`.

use log::warn;
use thiserror::Error;

use crate::fem::{edge_rule, quadrature_rule, DofLayout, EdgeRule, ElementGeometry, FemError, QuadratureRule};
use crate::mesh::{Mesh, MeshError, Point, PointClass};
use crate::problem::ProblemSpec;
use crate::sparse::{norm2, CsrMatrix, TripletBuilder};

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("viscosity nu(T_h) = {value} is not positive at ({x}, {y}) in element {element}")]
    ViscosityNotPositive { element: usize, x: f64, y: f64, value: f64 },
    #[error("coefficient vector has length {got}, layout expects {expected}")]
    LayoutMismatch { got: usize, expected: usize },
    #[error("point source: {0}")]
    Source(#[from] MeshError),
}

/// Mesh together with its unknown numbering and quadrature rules.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub layout: DofLayout,
    pub quad: QuadratureRule,
    pub edge_quad: EdgeRule,
}

impl Discretization {
    pub fn new(mesh: Mesh, quad_degree: usize) -> Result<Self, FemError> {
        let layout = DofLayout::new(&mesh);
        Ok(Discretization { quad: quadrature_rule(quad_degree)?, edge_quad: edge_rule(quad_degree), layout, mesh })
    }

    pub fn ndof(&self) -> usize {
        self.layout.ndof()
    }

    pub fn geometry(&self, k: usize) -> ElementGeometry {
        ElementGeometry::new(&self.mesh, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Darcy,
    Temperature,
}

#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub kind: SystemKind,
}

/// Discrete velocity, pressure and temperature on one discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub temperature: Vec<f64>,
}

impl CoupledState {
    pub fn zeros(layout: &DofLayout) -> Self {
        CoupledState {
            velocity: vec![0.0; layout.n_velocity()],
            pressure: vec![0.0; layout.n_pressure()],
            temperature: vec![0.0; layout.n_temperature()],
        }
    }

    /// All coefficients in the order velocity, pressure, temperature.
    pub fn concat(&self) -> Vec<f64> {
        [self.velocity.as_slice(), &self.pressure, &self.temperature].concat()
    }

    /// `int_Omega p_h`.
    pub fn pressure_integral(&self, mesh: &Mesh) -> f64 {
        self.pressure.iter().enumerate().map(|(k, p)| p * mesh.area(k)).sum()
    }

    pub fn check_layout(&self, layout: &DofLayout) -> Result<(), AssemblyError> {
        for (got, expected) in [
            (self.velocity.len(), layout.n_velocity()),
            (self.pressure.len(), layout.n_pressure()),
            (self.temperature.len(), layout.n_temperature()),
        ] {
            if got != expected {
                return Err(AssemblyError::LayoutMismatch { got, expected });
            }
        }
        Ok(())
    }
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn assemble_darcy(disc: &Discretization, temperature: &[f64], problem: &ProblemSpec) -> Result<SparseSystem, AssemblyError> {
    let (mesh, layout) = (&disc.mesh, &disc.layout);
    if temperature.len() != layout.n_temperature() {
        return Err(AssemblyError::LayoutMismatch { got: temperature.len(), expected: layout.n_temperature() });
    }
    let nu_dofs = layout.n_velocity();
    let np = layout.n_pressure();
    let n = nu_dofs + np + 1;
    let mult = nu_dofs + np;
    let mut builder = TripletBuilder::with_capacity(n, n, 17 * mesh.num_triangles());
    let mut rhs = vec![0.0; n];

    for k in 0..mesh.num_triangles() {
        let g = disc.geometry(k);
        let dofs = mesh.triangle_edges(k).map(|e| layout.edge_dof(e));
        let t_loc = layout.local_temperature(mesh, k, temperature);
        let mut a_loc = [[0.0; 3]; 3];
        let mut f_loc = [0.0; 3];
        for (l, w) in disc.quad.points.iter().zip(&disc.quad.weights) {
            let x = g.point(l);
            let nu = (problem.viscosity)(g.eval_p1(&t_loc, l));
            if !(nu > 0.0) {
                return Err(AssemblyError::ViscosityNotPositive { element: k, x: x[0], y: x[1], value: nu });
            }
            let psi = [g.rt0_basis(0, x), g.rt0_basis(1, x), g.rt0_basis(2, x)];
            let f = (problem.force)(x);
            let wa = w * g.area;
            for i in 0..3 {
                f_loc[i] += wa * dot(f, psi[i]);
                for j in 0..3 {
                    a_loc[i][j] += wa * nu * dot(psi[i], psi[j]);
                }
            }
        }
        for i in 0..3 {
            let Some(di) = dofs[i] else { continue };
            rhs[di] += f_loc[i];
            for j in 0..3 {
                if let Some(dj) = dofs[j] {
                    builder.push(di, dj, k, a_loc[i][j]);
                }
            }
            let b = -g.rt0_div(i) * g.area;
            builder.push(nu_dofs + k, di, k, b);
            builder.push(di, nu_dofs + k, k, b);
        }
        builder.push(mult, nu_dofs + k, k, g.area);
        builder.push(nu_dofs + k, mult, k, g.area);
    }
    Ok(SparseSystem { matrix: builder.build(), rhs, kind: SystemKind::Darcy })
}

/// Barycentric rule exact for quadratics, enough for `phi_j (u_h . grad phi_i)`.
const QUADRATIC_RULE: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

pub fn assemble_temperature(disc: &Discretization, velocity: &[f64], problem: &ProblemSpec) -> Result<SparseSystem, AssemblyError> {
    let (mesh, layout) = (&disc.mesh, &disc.layout);
    if velocity.len() != layout.n_velocity() {
        return Err(AssemblyError::LayoutMismatch { got: velocity.len(), expected: layout.n_velocity() });
    }
    let n = layout.n_temperature();
    let kappa = problem.diffusivity;
    let mut builder = TripletBuilder::with_capacity(n, n, 9 * mesh.num_triangles());
    let mut rhs = dirac_load(mesh, layout, &problem.sources)?;

    for k in 0..mesh.num_triangles() {
        let g = disc.geometry(k);
        let dofs = mesh.triangle(k).map(|v| layout.vertex_dof(v));
        if dofs.iter().all(Option::is_none) {
            continue;
        }
        let u_loc = layout.local_velocity(mesh, k, velocity);
        // int_K phi_j u_h, exact for the linear u_h
        let mut phi_u = [[0.0; 2]; 3];
        for l in &QUADRATIC_RULE {
            let u = g.eval_rt0(&u_loc, g.point(l));
            for j in 0..3 {
                phi_u[j][0] += g.area / 3.0 * l[j] * u[0];
                phi_u[j][1] += g.area / 3.0 * l[j] * u[1];
            }
        }
        for i in 0..3 {
            let Some(di) = dofs[i] else { continue };
            for j in 0..3 {
                let Some(dj) = dofs[j] else { continue };
                let stiff = kappa * g.area * dot(g.grad_bary[i], g.grad_bary[j]);
                let conv = -dot(phi_u[j], g.grad_bary[i]);
                builder.push(di, dj, k, stiff + conv);
            }
        }
        if let Some(src) = &problem.smooth_source {
            for (l, w) in disc.quad.points.iter().zip(&disc.quad.weights) {
                let gx = src(g.point(l));
                for i in 0..3 {
                    if let Some(di) = dofs[i] {
                        rhs[di] += w * g.area * gx * l[i];
                    }
                }
            }
        }
    }
    Ok(SparseSystem { matrix: builder.build(), rhs, kind: SystemKind::Temperature })
}

/// `sum_z phi_v(z)` for every mesh vertex `v`, boundary vertices included.
///
/// Each point is evaluated through the global continuous basis, so a point on a
/// shared edge or vertex contributes once.
pub fn dirac_vertex_weights(mesh: &Mesh, sources: &[Point]) -> Result<Vec<f64>, MeshError> {
    let mut w = vec![0.0; mesh.num_vertices()];
    for &z in sources {
        let loc = mesh.locate(z)?;
        let tri = mesh.triangle(loc.element);
        let on_boundary = match loc.class {
            PointClass::AtVertex(i) => mesh.is_boundary_vertex(tri[i]),
            PointClass::OnEdge(i) => mesh.is_boundary_edge(mesh.triangle_edges(loc.element)[i]),
            PointClass::Interior => false,
        };
        if on_boundary {
            warn!("point source ({}, {}) lies on the boundary; it vanishes on the discrete space", z[0], z[1]);
        }
        for i in 0..3 {
            w[tri[i]] += loc.bary[i];
        }
    }
    Ok(w)
}

/// Point-source load restricted to the temperature unknowns.
pub fn dirac_load(mesh: &Mesh, layout: &DofLayout, sources: &[Point]) -> Result<Vec<f64>, MeshError> {
    let w = dirac_vertex_weights(mesh, sources)?;
    Ok((0..layout.n_temperature()).map(|i| w[layout.temperature_vertex(i)]).collect())
}

/// Algebraic residual norms `(darcy, temperature)` of a state, reassembling both
/// systems at the state itself.
pub fn fixed_point_residual(disc: &Discretization, state: &CoupledState, problem: &ProblemSpec) -> Result<(f64, f64), AssemblyError> {
    state.check_layout(&disc.layout)?;
    let darcy = assemble_darcy(disc, &state.temperature, problem)?;
    let nu = disc.layout.n_velocity();
    let np = disc.layout.n_pressure();
    // the multiplier vanishes at a solution: B u sums to zero over the mesh
    let x: Vec<f64> = [state.velocity.as_slice(), &state.pressure, &[0.0]].concat();
    let mut r: Vec<f64> = darcy.matrix.mul_vec(&x).iter().zip(&darcy.rhs).map(|(a, b)| a - b).collect();
    r.truncate(nu + np);
    r.push(state.pressure_integral(&disc.mesh));
    let temp = assemble_temperature(disc, &state.velocity, problem)?;
    let rt: Vec<f64> = temp.matrix.mul_vec(&state.temperature).iter().zip(&temp.rhs).map(|(a, b)| a - b).collect();
    Ok((norm2(&r), norm2(&rt)))
}
