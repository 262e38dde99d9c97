//! Run configuration as a flat `key = value` file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::adapt::AdaptiveOptions;
use crate::fem::MAX_DEGREE;
use crate::solver::PicardOptions;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Builtin problem name.
    pub problem: String,
    /// Initial mesh file; the problem's default mesh when absent.
    pub mesh: Option<PathBuf>,
    pub p: f64,
    pub iters: usize,
    pub quad_degree: usize,
    pub tol: f64,
    pub max_picard: usize,
    pub mark_factor: f64,
    pub max_ndof: Option<usize>,
    pub out: PathBuf,
    pub vtk: bool,
    /// Reserved; nothing in the solver is random.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: "example1".into(),
            mesh: None,
            p: 1.6,
            iters: 29,
            quad_degree: 19,
            tol: 1e-8,
            max_picard: 200,
            mark_factor: 0.5,
            max_ndof: None,
            out: PathBuf::from("out"),
            vtk: false,
            seed: 0,
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "on" | "true" | "yes" | "1" => Some(true),
        "off" | "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
}

impl RunConfig {
    /// Sets one key; unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "problem" => self.problem = v.to_owned(),
            "mesh" => self.mesh = (!v.is_empty() && v != "none").then(|| PathBuf::from(v)),
            "p" => self.p = parse_num("p", v)?,
            "iters" => self.iters = parse_num("iters", v)?,
            "quad_degree" => self.quad_degree = parse_num("quad_degree", v)?,
            "tol" => self.tol = parse_num("tol", v)?,
            "max_picard" => self.max_picard = parse_num("max_picard", v)?,
            "mark_factor" => self.mark_factor = parse_num("mark_factor", v)?,
            "max_ndof" => self.max_ndof = if v == "none" { None } else { Some(parse_num("max_ndof", v)?) },
            "out" => self.out = PathBuf::from(v),
            "vtk" => self.vtk = parse_bool(v).ok_or_else(|| format!("bad value {v:?} for vtk (on|off)"))?,
            "seed" => self.seed = parse_num("seed", v)?,
            k => return Err(format!("unknown key {k:?}")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Parse { line: i + 1, msg: "expected key = value".into() })?;
            cfg.set(k, v).map_err(|msg| ConfigError::Parse { line: i + 1, msg })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    /// Every violated constraint, or `Ok` when the configuration is usable.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Vec::new();
        if !(self.p > 1.0 && self.p < 2.0) {
            v.push(format!("p = {} must lie in (1, 2)", self.p));
        }
        if !(self.tol > 0.0) {
            v.push(format!("tol = {} must be positive", self.tol));
        }
        if self.iters == 0 {
            v.push("iters must be at least 1".into());
        }
        if self.max_picard == 0 {
            v.push("max_picard must be at least 1".into());
        }
        if !(1..=MAX_DEGREE).contains(&self.quad_degree) {
            v.push(format!("quad_degree = {} must lie in 1..={MAX_DEGREE}", self.quad_degree));
        }
        if !(self.mark_factor >= 0.0 && self.mark_factor < 1.0) {
            v.push(format!("mark_factor = {} must lie in [0, 1)", self.mark_factor));
        }
        if let Err(e) = crate::problem::builtin_problem(&self.problem) {
            v.push(e.to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// The effective parameters, in a form [`RunConfig::parse`] reads back.
    pub fn to_resolved(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem);
        let _ = writeln!(s, "mesh = {}", self.mesh.as_ref().map_or("none".into(), |m| m.display().to_string()));
        let _ = writeln!(s, "p = {:?}", self.p);
        let _ = writeln!(s, "iters = {}", self.iters);
        let _ = writeln!(s, "quad_degree = {}", self.quad_degree);
        let _ = writeln!(s, "tol = {:e}", self.tol);
        let _ = writeln!(s, "max_picard = {}", self.max_picard);
        let _ = writeln!(s, "mark_factor = {:?}", self.mark_factor);
        let _ = writeln!(s, "max_ndof = {}", self.max_ndof.map_or("none".into(), |n| n.to_string()));
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "vtk = {}", if self.vtk { "on" } else { "off" });
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }

    pub fn adaptive_options(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            p: self.p,
            iterations: self.iters,
            quad_degree: self.quad_degree,
            picard: PicardOptions { tol: self.tol, max_iter: self.max_picard },
            mark_factor: self.mark_factor,
            max_ndof: self.max_ndof,
            ..Default::default()
        }
    }
}
