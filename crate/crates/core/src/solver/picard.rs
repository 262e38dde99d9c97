use log::debug;

use super::{solve_sparse, SolverError};
use crate::assembly::{assemble_darcy, assemble_temperature, CoupledState, Discretization};
use crate::problem::ProblemSpec;
use crate::sparse::norm2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    /// Number of Darcy/temperature passes performed.
    pub iterations: usize,
    pub final_increment: f64,
    /// Euclidean norm of the coefficient increment after each pass.
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Alternates Darcy solves with `nu(T^i)` and temperature solves with `u^{i+1}`,
/// starting from the zero state, until the increment of all coefficients drops
/// below `tol`.
pub fn picard(disc: &Discretization, problem: &ProblemSpec, opts: &PicardOptions) -> Result<(CoupledState, PicardReport), SolverError> {
    let nu = disc.layout.n_velocity();
    let np = disc.layout.n_pressure();
    let mut state = CoupledState::zeros(&disc.layout);
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let x = solve_sparse(&assemble_darcy(disc, &state.temperature, problem)?)?;
        let velocity = x[..nu].to_vec();
        let pressure = x[nu..nu + np].to_vec();
        let temperature = solve_sparse(&assemble_temperature(disc, &velocity, problem)?)?;
        let next = CoupledState { velocity, pressure, temperature };
        let diff: Vec<f64> = next.concat().iter().zip(state.concat()).map(|(a, b)| a - b).collect();
        let incr = norm2(&diff);
        history.push(incr);
        debug!("picard pass {it}: increment {incr:e}");
        state = next;
        if incr <= opts.tol {
            let report = PicardReport { iterations: it, final_increment: incr, history, converged: true };
            return Ok((state, report));
        }
    }
    let report = PicardReport {
        iterations: opts.max_iter,
        final_increment: history.last().copied().unwrap_or(f64::INFINITY),
        history,
        converged: false,
    };
    Err(SolverError::NotConverged(Box::new(report)))
}
