//! Solve, estimate, mark, refine.

use std::time::{Duration, Instant};

use log::info;
use thiserror::Error;

use crate::assembly::{CoupledState, Discretization};
use crate::estimator::{check_p, estimate, IndicatorField};
use crate::mesh::{Mesh, RefineOptions};
use crate::problem::ProblemSpec;
use crate::solver::{picard, PicardOptions, PicardReport};
use crate::Error as CrateError;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveOptions {
    pub p: f64,
    /// Number of solve/estimate passes; the mesh is refined between passes.
    pub iterations: usize,
    pub quad_degree: usize,
    pub picard: PicardOptions,
    pub mark_factor: f64,
    /// Stop once the unknown count reaches this value.
    pub max_ndof: Option<usize>,
    pub refine: RefineOptions,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            p: 1.6,
            iterations: 10,
            quad_degree: 19,
            picard: PicardOptions::default(),
            mark_factor: 0.5,
            max_ndof: None,
            refine: RefineOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRecord {
    pub iter: usize,
    pub ndof: usize,
    pub est_heat: f64,
    pub est_curl: f64,
    pub est_pressure: f64,
    pub est_total: f64,
    pub elements: usize,
    pub picard_iters: usize,
    pub marked: usize,
    pub wall_time: Duration,
}

/// What the observer sees after each pass, before refinement.
pub struct IterationView<'a> {
    pub iter: usize,
    pub disc: &'a Discretization,
    pub state: &'a CoupledState,
    pub indicators: &'a IndicatorField,
    pub report: &'a PicardReport,
    pub marked: &'a [usize],
}

#[derive(Debug, Clone)]
pub struct AdaptiveResult {
    pub records: Vec<AdaptiveRecord>,
    pub disc: Discretization,
    pub state: CoupledState,
    pub indicators: IndicatorField,
    /// The loop ended early because nothing was marked.
    pub stagnated: bool,
}

#[derive(Debug, Error)]
#[error("adaptive iteration {iteration} failed: {source}")]
pub struct AdaptiveError {
    pub iteration: usize,
    /// Records of the passes completed before the failure.
    pub records: Vec<AdaptiveRecord>,
    #[source]
    pub source: Box<CrateError>,
}

/// Elements with `values[k] > factor * max`. Empty when every value is zero.
pub fn mark(values: &[f64], factor: f64) -> Vec<usize> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let threshold = factor * max;
    (0..values.len()).filter(|&k| values[k] > threshold).collect()
}

pub fn run_adaptive(problem: &ProblemSpec, mesh: Mesh, opts: &AdaptiveOptions) -> Result<AdaptiveResult, AdaptiveError> {
    run_adaptive_with(problem, mesh, opts, |_| Ok(()))
}

/// Runs the adaptive loop, calling `observer` after every pass.
pub fn run_adaptive_with(
    problem: &ProblemSpec,
    mesh: Mesh,
    opts: &AdaptiveOptions,
    mut observer: impl FnMut(&IterationView) -> Result<(), CrateError>,
) -> Result<AdaptiveResult, AdaptiveError> {
    let mut records = Vec::new();
    let fail = |iteration: usize, records: &Vec<AdaptiveRecord>, e: CrateError| AdaptiveError { iteration, records: records.clone(), source: Box::new(e) };
    check_p(opts.p).map_err(|e| fail(0, &records, e.into()))?;
    problem.validate(Some(&mesh)).map_err(|e| fail(0, &records, e.into()))?;

    let mut mesh = mesh;
    let mut iter = 0;
    loop {
        let start = Instant::now();
        let disc = Discretization::new(mesh, opts.quad_degree).map_err(|e| fail(iter, &records, e.into()))?;
        let (state, report) = picard(&disc, problem, &opts.picard).map_err(|e| fail(iter, &records, e.into()))?;
        let indicators = estimate(&disc, &state, problem, opts.p).map_err(|e| fail(iter, &records, e.into()))?;
        let marked = mark(&indicators.total, opts.mark_factor);
        let record = AdaptiveRecord {
            iter,
            ndof: disc.ndof(),
            est_heat: indicators.est_heat,
            est_curl: indicators.est_curl,
            est_pressure: indicators.est_pressure,
            est_total: indicators.est_total,
            elements: disc.mesh.num_triangles(),
            picard_iters: report.iterations,
            marked: marked.len(),
            wall_time: start.elapsed(),
        };
        info!(
            "iter {iter}: ndof {} E {:.4e} (heat {:.4e}, curl {:.4e}, pressure {:.4e}), picard {}, marked {}",
            record.ndof, record.est_total, record.est_heat, record.est_curl, record.est_pressure, report.iterations, marked.len()
        );
        records.push(record);
        let view = IterationView { iter, disc: &disc, state: &state, indicators: &indicators, report: &report, marked: &marked };
        observer(&view).map_err(|e| fail(iter, &records, e))?;

        let last = iter + 1 >= opts.iterations || opts.max_ndof.is_some_and(|cap| disc.ndof() >= cap);
        if last || marked.is_empty() {
            return Ok(AdaptiveResult { records, disc, state, indicators, stagnated: !last && marked.is_empty() });
        }
        mesh = disc.mesh.bisect(&marked, &opts.refine).map_err(|e| fail(iter, &records, e.into()))?.mesh;
        iter += 1;
    }
}

/// Least-squares slope of `log y` against `log ndof` over the last `window` records.
pub fn fit_slope(records: &[AdaptiveRecord], window: usize, y: impl Fn(&AdaptiveRecord) -> f64) -> Option<f64> {
    let tail = &records[records.len().saturating_sub(window)..];
    if tail.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|r| ((r.ndof as f64).ln(), y(r).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slopes of the heat, curl, pressure and total estimators, in that order.
pub fn estimator_slopes(records: &[AdaptiveRecord], window: usize) -> Option<[f64; 4]> {
    Some([
        fit_slope(records, window, |r| r.est_heat)?,
        fit_slope(records, window, |r| r.est_curl)?,
        fit_slope(records, window, |r| r.est_pressure)?,
        fit_slope(records, window, |r| r.est_total)?,
    ])
}
