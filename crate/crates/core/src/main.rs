use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use coupled_afem::adapt::{estimator_slopes, run_adaptive_with};
use coupled_afem::config::RunConfig;
use coupled_afem::export::{write_csv_file, write_vtk_mesh_file, write_vtk_solution_file};
use coupled_afem::mesh::read_mesh_file;
use coupled_afem::problem::builtin_problem;
use coupled_afem::{AdaptiveRecord, Error};

#[derive(Parser)]
#[command(name = "coupled-afem", version, about = "Adaptive FEM for Darcy flow coupled to heat transport with point sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive loop once.
    Run(RunArgs),
    /// Run several integrability indices concurrently, one output directory each.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
        /// Comma-separated values of p.
        #[arg(long, value_delimiter = ',', default_value = "1.2,1.4,1.6,1.8")]
        ps: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Key = value file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Initial mesh in the `nv nt` text format.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    quad_degree: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_picard: Option<usize>,
    #[arg(long)]
    mark_factor: Option<f64>,
    #[arg(long)]
    max_ndof: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    vtk: Option<Toggle>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.problem {
            c.problem = v.clone();
        }
        if let Some(v) = &self.mesh {
            c.mesh = Some(v.clone());
        }
        if let Some(v) = self.p {
            c.p = v;
        }
        if let Some(v) = self.iters {
            c.iters = v;
        }
        if let Some(v) = self.quad_degree {
            c.quad_degree = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.max_picard {
            c.max_picard = v;
        }
        if let Some(v) = self.mark_factor {
            c.mark_factor = v;
        }
        if let Some(v) = self.max_ndof {
            c.max_ndof = Some(v);
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = self.vtk {
            c.vtk = matches!(v, Toggle::On);
        }
        c.validate()?;
        Ok(c)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn run(cfg: &RunConfig) -> Result<Vec<AdaptiveRecord>, Error> {
    let problem = builtin_problem(&cfg.problem)?;
    let mesh = match &cfg.mesh {
        Some(path) => read_mesh_file(path)?,
        None => match problem.domain.initial_mesh() {
            Some(m) => m?,
            None => return Err(Error::Config(coupled_afem::config::ConfigError::Invalid(vec!["problem needs a mesh file".into()]))),
        },
    };
    std::fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let resolved = cfg.out.join("config.resolved");
    std::fs::write(&resolved, cfg.to_resolved()).map_err(io_err(&resolved))?;

    let result = run_adaptive_with(&problem, mesh, &cfg.adaptive_options(), |v| {
        if cfg.vtk {
            let mp = cfg.out.join(format!("mesh_{:04}.vtk", v.iter));
            write_vtk_mesh_file(&v.disc.mesh, &mp).map_err(io_err(&mp))?;
            let sp = cfg.out.join(format!("solution_{:04}.vtk", v.iter));
            write_vtk_solution_file(v.disc, v.state, v.indicators, &sp).map_err(io_err(&sp))?;
        }
        Ok(())
    });
    let csv = cfg.out.join("convergence.csv");
    let records = match &result {
        Ok(r) => &r.records,
        Err(e) => &e.records,
    };
    write_csv_file(records, &csv).map_err(io_err(&csv))?;
    let result = result?;
    if result.stagnated {
        println!("{}: nothing marked after iteration {}, stopped early", cfg.out.display(), result.records.len() - 1);
    }
    Ok(result.records)
}

fn report(cfg: &RunConfig, records: &[AdaptiveRecord]) {
    let last = records.last().expect("at least one record");
    println!(
        "{} p={}: {} iterations, final ndof {}, E_total {:.6e}",
        cfg.problem,
        cfg.p,
        records.len(),
        last.ndof,
        last.est_total
    );
    match estimator_slopes(records, 10) {
        Some([h, c, p, t]) => println!("slope vs ndof (last 10): heat {h:.4} curl {c:.4} pressure {p:.4} total {t:.4}"),
        None => println!("slope vs ndof: not enough iterations"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => args.resolve().and_then(|cfg| run(&cfg).map(|r| report(&cfg, &r))),
        Command::Sweep { args, ps } => args.resolve().and_then(|base| {
            let cfgs: Vec<RunConfig> = ps
                .iter()
                .map(|&p| {
                    let mut c = base.clone();
                    c.p = p;
                    c.out = base.out.join(format!("p{p}"));
                    c
                })
                .collect();
            for c in &cfgs {
                c.validate()?;
            }
            let results: Vec<Result<Vec<AdaptiveRecord>, Error>> =
                thread::scope(|s| cfgs.iter().map(|c| s.spawn(move || run(c))).collect::<Vec<_>>().into_iter().map(|h| h.join().expect("run panicked")).collect());
            let mut first_err = None;
            for (c, r) in cfgs.iter().zip(results) {
                match r {
                    Ok(recs) => report(c, &recs),
                    Err(e) => {
                        error!("p={}: {e}", c.p);
                        first_err.get_or_insert(e);
                    }
                }
            }
            first_err.map_or(Ok(()), Err)
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
