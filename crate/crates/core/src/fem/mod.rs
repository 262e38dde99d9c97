//! Finite element spaces: RT0 velocities, P0 pressures, P1 temperatures.

mod basis;
mod dofs;
mod quadrature;

pub use basis::{evaluate_grad_p1, evaluate_p1, evaluate_rt0, ElementGeometry};
pub use dofs::DofLayout;
pub use quadrature::{edge_rule, map_point, quadrature_rule, EdgeRule, QuadratureRule, MAX_DEGREE};


use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("unsupported quadrature degree {degree}; supported degrees are {}..={}", supported.0, supported.1)]
    UnsupportedDegree { degree: usize, supported: (usize, usize) },
}
