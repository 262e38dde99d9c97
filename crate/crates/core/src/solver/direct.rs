use std::sync::Once;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use super::SolverError;
use crate::assembly::{SparseSystem, SystemKind};
use crate::sparse::{norm2, CsrMatrix, TripletBuilder};

/// Accepted `||M x - b|| / ||b||` after a direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn solve_sparse(system: &SparseSystem) -> Result<Vec<f64>, SolverError> {
    match system.kind {
        SystemKind::Darcy => solve_mean_constrained(&system.matrix, &system.rhs),
        SystemKind::Temperature => solve_csr(&system.matrix, &system.rhs),
    }
}

/// Solves `[M a; a^T 0] [x; l] = [b; 0]` where the last row `a` is a mean
/// constraint on an index set `S` and the constant vector on `S` spans the kernel
/// of `M` (Darcy: constant pressures). The dense border ruins the fill of a
/// direct factorization, so one index of `S` is pinned instead, the row it
/// replaces being implied by the others. The particular solution is then shifted
/// along the kernel to satisfy the constraint; the multiplier is zero.
///
/// The residual is checked against the full bordered system.
pub fn solve_mean_constrained(matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    let n = matrix.nrows();
    if matrix.ncols() != n || rhs.len() != n || n < 2 {
        return Err(SolverError::Shape { rows: n, cols: matrix.ncols(), rhs: rhs.len() });
    }
    let m = n - 1;
    let border: Vec<(usize, f64)> = matrix.row(m).collect();
    let Some(&(pin, _)) = border.first() else {
        return Err(SolverError::Factorization("mean-constraint row is empty".into()));
    };
    let mut b = TripletBuilder::with_capacity(m, m, matrix.nnz());
    for (r, c, v) in matrix.triplets() {
        if r < m && c < m && r != pin {
            b.push(r, c, 0, v);
        }
    }
    b.push(pin, pin, 0, 1.0);
    let mut reduced_rhs = rhs[..m].to_vec();
    reduced_rhs[pin] = 0.0;
    let mut x = solve_unchecked(&b.build(), &reduced_rhs)?;
    let weight: f64 = border.iter().map(|&(_, a)| a).sum();
    let mean = border.iter().map(|&(c, a)| a * x[c]).sum::<f64>() / weight;
    for &(c, _) in &border {
        x[c] -= mean;
    }
    x.push(0.0);
    check_residual(matrix, rhs, x)
}

/// LU solve of a general square sparse system.
///
/// The factorization does not expose its pivots, so a singular or badly
/// conditioned matrix is detected through a non-finite solution or a relative
/// residual above [`RESIDUAL_TOL`].
pub fn solve_csr(matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    let n = matrix.nrows();
    if matrix.ncols() != n || rhs.len() != n {
        return Err(SolverError::Shape { rows: n, cols: matrix.ncols(), rhs: rhs.len() });
    }
    let x = solve_unchecked(matrix, rhs)?;
    check_residual(matrix, rhs, x)
}

fn solve_unchecked(matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    static SEQUENTIAL: Once = Once::new();
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
    let n = matrix.nrows();
    if rhs.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; n]);
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = matrix.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let x = lu.solve(&b);
    Ok((0..n).map(|i| x[i]).collect())
}

fn check_residual(matrix: &CsrMatrix, rhs: &[f64], x: Vec<f64>) -> Result<Vec<f64>, SolverError> {
    let bnorm = norm2(rhs);
    if bnorm == 0.0 && x.iter().all(|&v| v == 0.0) {
        return Ok(x);
    }
    let residual = if x.iter().all(|v| v.is_finite()) {
        let r: Vec<f64> = matrix.mul_vec(&x).iter().zip(rhs).map(|(a, b)| a - b).collect();
        norm2(&r) / bnorm.max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    };
    if !(residual <= RESIDUAL_TOL) {
        return Err(SolverError::Singular { residual, max_entry: matrix.max_abs() });
    }
    Ok(x)
}
