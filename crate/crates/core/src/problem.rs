//! Problem data: viscosity law, diffusivity, body force, point sources.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::mesh::{self, Mesh, MeshError, Point};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

pub const BUILTIN_PROBLEMS: [&str; 4] = ["example1", "example2", "verification-poisson", "verification-darcy-gradient"];

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("unknown problem {name:?}; available: {}", BUILTIN_PROBLEMS.join(", "))]
    Unknown { name: String },
    #[error("viscosity violates its declared bounds ({lower}, {upper}] at s = {s}: nu(s) = {value}")]
    ViscosityBounds { s: f64, value: f64, lower: f64, upper: f64 },
    #[error("viscosity bounds must be positive, got ({lower}, {upper}]")]
    NonPositiveBounds { lower: f64, upper: f64 },
    #[error("thermal diffusivity must be positive, got {0}")]
    Diffusivity(f64),
    #[error("point source ({x}, {y}) lies outside the domain")]
    SourceOutside { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    UnitSquare,
    LShape,
    Custom,
}

impl Domain {
    /// Default coarse mesh: 4x4 criss-cross square, or the three-quadrant
    /// analogue on the L-shape.
    pub fn initial_mesh(self) -> Option<Result<Mesh, MeshError>> {
        match self {
            Domain::UnitSquare => Some(mesh::unit_square_criss_cross(4)),
            Domain::LShape => Some(mesh::l_shape_criss_cross(4)),
            Domain::Custom => None,
        }
    }
}

/// Manufactured solution used by verification problems.
#[derive(Clone)]
pub struct ExactSolution {
    pub temperature: FieldFn,
    pub temperature_grad: VectorFn,
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub viscosity: ScalarFn,
    pub viscosity_deriv: ScalarFn,
    /// Declared `(nu_minus, nu_plus]`.
    pub viscosity_bounds: (f64, f64),
    pub diffusivity: f64,
    pub force: VectorFn,
    /// Scalar curl `d f2/dx1 - d f1/dx2`, supplied analytically.
    pub force_curl: Option<FieldFn>,
    pub sources: Vec<Point>,
    pub smooth_source: Option<FieldFn>,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("viscosity_bounds", &self.viscosity_bounds)
            .field("diffusivity", &self.diffusivity)
            .field("sources", &self.sources)
            .field("smooth_source", &self.smooth_source.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// A problem with constant viscosity `nu`, zero force, no sources.
    pub fn constant_viscosity(name: &str, domain: Domain, nu: f64) -> Self {
        ProblemSpec {
            name: name.to_owned(),
            domain,
            viscosity: Arc::new(move |_| nu),
            viscosity_deriv: Arc::new(|_| 0.0),
            viscosity_bounds: (nu, nu),
            diffusivity: 1.0,
            force: Arc::new(|_| [0.0, 0.0]),
            force_curl: Some(Arc::new(|_| 0.0)),
            sources: Vec::new(),
            smooth_source: None,
            exact: None,
        }
    }

    /// Checks positivity and boundedness of the data; viscosity is sampled on [-50, 50].
    pub fn validate(&self, mesh: Option<&Mesh>) -> Result<(), ProblemError> {
        let (lower, upper) = self.viscosity_bounds;
        if !(lower > 0.0 && upper >= lower) {
            return Err(ProblemError::NonPositiveBounds { lower, upper });
        }
        for i in 0..=2000 {
            let s = -50.0 + 0.05 * i as f64;
            let value = (self.viscosity)(s);
            if !(value >= lower && value <= upper) {
                return Err(ProblemError::ViscosityBounds { s, value, lower, upper });
            }
        }
        if !(self.diffusivity > 0.0) {
            return Err(ProblemError::Diffusivity(self.diffusivity));
        }
        if let Some(mesh) = mesh {
            for z in &self.sources {
                mesh.locate(*z).map_err(|_| ProblemError::SourceOutside { x: z[0], y: z[1] })?;
            }
        }
        Ok(())
    }
}

pub fn builtin_problem(name: &str) -> Result<ProblemSpec, ProblemError> {
    match name {
        "example1" => Ok(example1()),
        "example2" => Ok(example2()),
        "verification-poisson" => Ok(verification_poisson()),
        "verification-darcy-gradient" => Ok(verification_darcy_gradient()),
        _ => Err(ProblemError::Unknown { name: name.to_owned() }),
    }
}

/// Unit square, `nu(s) = sin s + 2`, four interior point sources.
fn example1() -> ProblemSpec {
    ProblemSpec {
        name: "example1".into(),
        domain: Domain::UnitSquare,
        viscosity: Arc::new(|s| s.sin() + 2.0),
        viscosity_deriv: Arc::new(f64::cos),
        viscosity_bounds: (1.0, 3.0),
        diffusivity: 1.0,
        force: Arc::new(|[x, y]| [x * y * (1.0 - x) * (1.0 - y), 0.0]),
        force_curl: Some(Arc::new(|[x, y]| -x * (1.0 - x) * (1.0 - 2.0 * y))),
        sources: vec![[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]],
        smooth_source: None,
        exact: None,
    }
}

/// L-shape, `nu(s) = exp(-s^2) + 1`, three point sources.
fn example2() -> ProblemSpec {
    ProblemSpec {
        name: "example2".into(),
        domain: Domain::LShape,
        viscosity: Arc::new(|s| (-s * s).exp() + 1.0),
        viscosity_deriv: Arc::new(|s| -2.0 * s * (-s * s).exp()),
        viscosity_bounds: (1.0, 2.0),
        diffusivity: 1.0,
        force: Arc::new(|[x, y]| [10.0 * y * (1.0 - x) * (1.0 + x), 5.0 * x * (1.0 - y) * (1.0 + x)]),
        force_curl: Some(Arc::new(|[x, y]| 5.0 * (1.0 + 2.0 * x) * (1.0 - y) - 10.0 * (1.0 - x * x))),
        sources: vec![[-0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]],
        smooth_source: None,
        exact: None,
    }
}

/// `-Laplace T = 2 pi^2 sin(pi x) sin(pi y)` on the unit square with zero flow.
fn verification_poisson() -> ProblemSpec {
    let mut p = ProblemSpec::constant_viscosity("verification-poisson", Domain::UnitSquare, 1.0);
    p.smooth_source = Some(Arc::new(|[x, y]| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin()));
    p.exact = Some(ExactSolution {
        temperature: Arc::new(|[x, y]| (PI * x).sin() * (PI * y).sin()),
        temperature_grad: Arc::new(|[x, y]| [PI * (PI * x).cos() * (PI * y).sin(), PI * (PI * x).sin() * (PI * y).cos()]),
    });
    p
}

/// Gradient force `f = grad x1` with unit viscosity: zero velocity, pressure `x1`.
fn verification_darcy_gradient() -> ProblemSpec {
    let mut p = ProblemSpec::constant_viscosity("verification-darcy-gradient", Domain::UnitSquare, 1.0);
    p.force = Arc::new(|_| [1.0, 0.0]);
    p
}
