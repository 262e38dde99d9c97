//! Adaptive mixed finite elements for stationary Darcy flow with a
//! temperature-dependent viscosity, coupled to convection-diffusion of heat
//! driven by point sources.
//!
//! The discrete spaces are lowest-order Raviart-Thomas velocities, piecewise
//! constant pressures and continuous piecewise linear temperatures on conforming
//! triangulations. The coupled problem is solved by a Picard iteration, and the
//! mesh is adapted with residual indicators, maximum marking and longest-edge
//! bisection.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt;
pub mod assembly;
pub mod config;
pub mod estimator;
pub mod export;
pub mod fem;
pub mod mesh;
pub mod problem;
pub mod solver;
pub mod sparse;

pub use adapt::{run_adaptive, AdaptiveOptions, AdaptiveRecord, AdaptiveResult};
pub use assembly::{CoupledState, Discretization};
pub use estimator::IndicatorField;
pub use mesh::Mesh;
pub use problem::{builtin_problem, ProblemSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error(transparent)]
    Fem(#[from] fem::FemError),
    #[error(transparent)]
    Problem(#[from] problem::ProblemError),
    #[error(transparent)]
    Assembly(#[from] assembly::AssemblyError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Estimator(#[from] estimator::EstimatorError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Adaptive(#[from] adapt::AdaptiveError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}
