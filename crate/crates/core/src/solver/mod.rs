//! Sparse direct solves and the Picard iteration.

mod direct;
mod picard;

pub use direct::{solve_csr, solve_mean_constrained, solve_sparse, RESIDUAL_TOL};
pub use picard::{picard, PicardOptions, PicardReport};

use thiserror::Error;

use crate::assembly::AssemblyError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("matrix is not square ({rows} x {cols}) or rhs has length {rhs}")]
    Shape { rows: usize, cols: usize, rhs: usize },
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("singular or ill-conditioned system: relative residual {residual:e} (max |a_ij| = {max_entry:e})")]
    Singular { residual: f64, max_entry: f64 },
    #[error("Picard iteration did not converge in {} iterations (last increment {:e})", .0.iterations, .0.final_increment)]
    NotConverged(Box<PicardReport>),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}
