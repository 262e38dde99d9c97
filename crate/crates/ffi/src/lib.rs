//! C interface to `coupled_afem`.
//!
//! Objects are opaque heap handles created by `caf_*_new`-style functions and
//! released with the matching `caf_*_free`. Every fallible function returns a
//! [`CafStatus`]; the message of the last failure on the calling thread is
//! available through [`caf_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use coupled_afem::adapt::{run_adaptive, AdaptiveOptions, AdaptiveResult};
use coupled_afem::export::write_csv_file;
use coupled_afem::mesh::{self, Mesh, RefineOptions};
use coupled_afem::problem::{builtin_problem, ProblemSpec};
use coupled_afem::solver::PicardOptions;
use coupled_afem::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CafStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MeshError = 3,
    ProblemError = 4,
    SolverError = 5,
    IoError = 6,
    Panic = 7,
}

pub struct CafMesh(Mesh);

pub struct CafProblem(ProblemSpec);

pub struct CafRun(AdaptiveResult);

/// Parameters of the adaptive loop. `max_ndof == 0` means no cap.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CafRunOptions {
    pub p: f64,
    pub iterations: usize,
    pub quad_degree: usize,
    pub tol: f64,
    pub max_picard: usize,
    pub mark_factor: f64,
    pub max_ndof: usize,
}

/// One row of the convergence history.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CafRecord {
    pub iter: usize,
    pub ndof: usize,
    pub est_heat: f64,
    pub est_curl: f64,
    pub est_pressure: f64,
    pub est_total: f64,
    pub elements: usize,
    pub picard_iters: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> CafStatus {
    match e {
        Error::Mesh(_) => CafStatus::MeshError,
        Error::Problem(_) | Error::Config(_) => CafStatus::ProblemError,
        Error::Fem(_) => CafStatus::InvalidArgument,
        Error::Assembly(_) | Error::Solver(_) | Error::Estimator(_) => CafStatus::SolverError,
        Error::Io { .. } => CafStatus::IoError,
        Error::Adaptive(a) => status_of(&a.source),
    }
}

fn fail(status: CafStatus, msg: impl Into<String>) -> CafStatus {
    set_error(msg);
    status
}

fn fail_with(e: impl Into<Error>) -> CafStatus {
    let e = e.into();
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning a panic into [`CafStatus::Panic`].
fn guard(f: impl FnOnce() -> CafStatus) -> CafStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(CafStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn out_ptr<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, CafStatus> {
    if s.is_null() {
        return Err(fail(CafStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(CafStatus::InvalidArgument, "string argument is not UTF-8"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CafStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn caf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a mesh from `nv` points (`xy`, interleaved) and `nt` counter-clockwise
/// triangles (`tris`, three vertex indices each).
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_new(xy: *const f64, nv: usize, tris: *const usize, nt: usize, out: *mut *mut CafMesh) -> CafStatus {
    non_null!(xy, tris, out);
    guard(|| {
        let xy = std::slice::from_raw_parts(xy, 2 * nv);
        let tris = std::slice::from_raw_parts(tris, 3 * nt);
        let verts = xy.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let cells = tris.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        match Mesh::new(verts, cells) {
            Ok(m) => {
                out_ptr(out, CafMesh(m));
                CafStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Criss-cross mesh of the unit square with `n x n` cells.
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_unit_square(n: usize, out: *mut *mut CafMesh) -> CafStatus {
    non_null!(out);
    guard(|| match mesh::unit_square_criss_cross(n) {
        Ok(m) => {
            out_ptr(out, CafMesh(m));
            CafStatus::Ok
        }
        Err(e) => fail_with(e),
    })
}

/// Criss-cross mesh of the L-shape `(-1,1)^2 \ [0,1) x (-1,0]`; `n` must be even.
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_l_shape(n: usize, out: *mut *mut CafMesh) -> CafStatus {
    non_null!(out);
    guard(|| match mesh::l_shape_criss_cross(n) {
        Ok(m) => {
            out_ptr(out, CafMesh(m));
            CafStatus::Ok
        }
        Err(e) => fail_with(e),
    })
}

/// Reads a mesh in the `nv nt` text format.
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_read(path: *const c_char, out: *mut *mut CafMesh) -> CafStatus {
    non_null!(out);
    let path = match str_arg(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guard(|| match mesh::read_mesh_file(Path::new(path)) {
        Ok(m) => {
            out_ptr(out, CafMesh(m));
            CafStatus::Ok
        }
        Err(e) => fail_with(e),
    })
}

#[no_mangle]
pub unsafe extern "C" fn caf_mesh_free(mesh: *mut CafMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

#[no_mangle]
pub unsafe extern "C" fn caf_mesh_num_vertices(mesh: *const CafMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_vertices())
}

#[no_mangle]
pub unsafe extern "C" fn caf_mesh_num_triangles(mesh: *const CafMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_triangles())
}

#[no_mangle]
pub unsafe extern "C" fn caf_mesh_num_edges(mesh: *const CafMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_edges())
}

/// Copies vertex coordinates (interleaved x, y) into `out`, which must hold
/// `2 * caf_mesh_num_vertices` values.
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_vertices(mesh: *const CafMesh, out: *mut f64, len: usize) -> CafStatus {
    non_null!(mesh, out);
    let m = &(*mesh).0;
    if len < 2 * m.num_vertices() {
        return fail(CafStatus::InvalidArgument, format!("buffer holds {len} values, need {}", 2 * m.num_vertices()));
    }
    let out = std::slice::from_raw_parts_mut(out, len);
    for (i, v) in m.vertices().iter().enumerate() {
        out[2 * i] = v[0];
        out[2 * i + 1] = v[1];
    }
    CafStatus::Ok
}

/// Copies triangle vertex indices into `out` (`3 * caf_mesh_num_triangles` values).
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_triangles(mesh: *const CafMesh, out: *mut usize, len: usize) -> CafStatus {
    non_null!(mesh, out);
    let m = &(*mesh).0;
    if len < 3 * m.num_triangles() {
        return fail(CafStatus::InvalidArgument, format!("buffer holds {len} values, need {}", 3 * m.num_triangles()));
    }
    let out = std::slice::from_raw_parts_mut(out, len);
    for (i, t) in m.triangles().iter().enumerate() {
        out[3 * i..3 * i + 3].copy_from_slice(t);
    }
    CafStatus::Ok
}

/// Longest-edge bisection of the `n` marked elements with conforming closure.
#[no_mangle]
pub unsafe extern "C" fn caf_mesh_refine(mesh: *const CafMesh, marked: *const usize, n: usize, out: *mut *mut CafMesh) -> CafStatus {
    non_null!(mesh, out);
    if marked.is_null() && n > 0 {
        return fail(CafStatus::NullPointer, "marked is null");
    }
    guard(|| {
        let marked = if n == 0 { &[][..] } else { std::slice::from_raw_parts(marked, n) };
        match (*mesh).0.bisect(marked, &RefineOptions::default()) {
            Ok(r) => {
                out_ptr(out, CafMesh(r.mesh));
                CafStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// One of `example1`, `example2`, `verification-poisson`,
/// `verification-darcy-gradient`.
#[no_mangle]
pub unsafe extern "C" fn caf_problem_builtin(name: *const c_char, out: *mut *mut CafProblem) -> CafStatus {
    non_null!(out);
    let name = match str_arg(name) {
        Ok(n) => n,
        Err(s) => return s,
    };
    guard(|| match builtin_problem(name) {
        Ok(p) => {
            out_ptr(out, CafProblem(p));
            CafStatus::Ok
        }
        Err(e) => fail_with(e),
    })
}

#[no_mangle]
pub unsafe extern "C" fn caf_problem_free(problem: *mut CafProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

#[no_mangle]
pub extern "C" fn caf_run_options_default() -> CafRunOptions {
    let d = AdaptiveOptions::default();
    CafRunOptions {
        p: d.p,
        iterations: d.iterations,
        quad_degree: d.quad_degree,
        tol: d.picard.tol,
        max_picard: d.picard.max_iter,
        mark_factor: d.mark_factor,
        max_ndof: 0,
    }
}

/// Runs the adaptive loop. `mesh` may be null to use the problem's default
/// initial mesh; `options` may be null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn caf_run_adaptive(problem: *const CafProblem, mesh: *const CafMesh, options: *const CafRunOptions, out: *mut *mut CafRun) -> CafStatus {
    non_null!(problem, out);
    guard(|| {
        let problem = &(*problem).0;
        let o = options.as_ref().copied().unwrap_or_else(|| caf_run_options_default());
        let opts = AdaptiveOptions {
            p: o.p,
            iterations: o.iterations,
            quad_degree: o.quad_degree,
            picard: PicardOptions { tol: o.tol, max_iter: o.max_picard },
            mark_factor: o.mark_factor,
            max_ndof: (o.max_ndof > 0).then_some(o.max_ndof),
            ..Default::default()
        };
        if opts.iterations == 0 || opts.picard.tol.is_nan() || opts.picard.tol <= 0.0 {
            return fail(CafStatus::InvalidArgument, "iterations must be positive and tol > 0");
        }
        let initial = match mesh.as_ref() {
            Some(m) => m.0.clone(),
            None => match problem.domain.initial_mesh() {
                Some(Ok(m)) => m,
                Some(Err(e)) => return fail_with(e),
                None => return fail(CafStatus::InvalidArgument, "problem has no default mesh; pass one"),
            },
        };
        match run_adaptive(problem, initial, &opts) {
            Ok(r) => {
                out_ptr(out, CafRun(r));
                CafStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn caf_run_free(run: *mut CafRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

#[no_mangle]
pub unsafe extern "C" fn caf_run_num_records(run: *const CafRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.records.len())
}

#[no_mangle]
pub unsafe extern "C" fn caf_run_record(run: *const CafRun, index: usize, out: *mut CafRecord) -> CafStatus {
    non_null!(run, out);
    let records = &(*run).0.records;
    let Some(r) = records.get(index) else {
        return fail(CafStatus::InvalidArgument, format!("record {index} out of range"));
    };
    *out = CafRecord {
        iter: r.iter,
        ndof: r.ndof,
        est_heat: r.est_heat,
        est_curl: r.est_curl,
        est_pressure: r.est_pressure,
        est_total: r.est_total,
        elements: r.elements,
        picard_iters: r.picard_iters,
    };
    CafStatus::Ok
}

/// True when the loop stopped early because no element was marked.
#[no_mangle]
pub unsafe extern "C" fn caf_run_stagnated(run: *const CafRun) -> bool {
    run.as_ref().is_some_and(|r| r.0.stagnated)
}

/// A copy of the last mesh of the run, on which the final solution lives.
#[no_mangle]
pub unsafe extern "C" fn caf_run_final_mesh(run: *const CafRun, out: *mut *mut CafMesh) -> CafStatus {
    non_null!(run, out);
    out_ptr(out, CafMesh((*run).0.disc.mesh.clone()));
    CafStatus::Ok
}

/// Final temperature at every vertex of the final mesh (zero on the boundary).
#[no_mangle]
pub unsafe extern "C" fn caf_run_temperature(run: *const CafRun, out: *mut f64, len: usize) -> CafStatus {
    non_null!(run, out);
    let r = &(*run).0;
    let t = r.disc.layout.nodal_temperature(&r.state.temperature);
    if len < t.len() {
        return fail(CafStatus::InvalidArgument, format!("buffer holds {len} values, need {}", t.len()));
    }
    std::slice::from_raw_parts_mut(out, t.len()).copy_from_slice(&t);
    CafStatus::Ok
}

/// Final per-element total indicators (`caf_mesh_num_triangles` of the final mesh).
#[no_mangle]
pub unsafe extern "C" fn caf_run_indicators(run: *const CafRun, out: *mut f64, len: usize) -> CafStatus {
    non_null!(run, out);
    let e = &(*run).0.indicators.total;
    if len < e.len() {
        return fail(CafStatus::InvalidArgument, format!("buffer holds {len} values, need {}", e.len()));
    }
    std::slice::from_raw_parts_mut(out, e.len()).copy_from_slice(e);
    CafStatus::Ok
}

/// Writes the convergence table as CSV.
#[no_mangle]
pub unsafe extern "C" fn caf_run_write_csv(run: *const CafRun, path: *const c_char) -> CafStatus {
    non_null!(run);
    let path = match str_arg(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match write_csv_file(&(*run).0.records, Path::new(path)) {
        Ok(()) => CafStatus::Ok,
        Err(e) => fail(CafStatus::IoError, format!("{path}: {e}")),
    }
}
