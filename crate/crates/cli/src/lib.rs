//! Command-line front end: instance generation, solving, benchmarking,
//! model export and SVG rendering.

pub mod bench;
pub mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use xppn::benders::{benders_solve, lift_solution, BendersConfig, BendersStatus, Eps};
use xppn::bounds::{compute_bounds, preprocess};
use xppn::heuristic::{heuristic_solve, HeuristicConfig};
use xppn::instance::{generate, read_instance, write_instance, Instance};
use xppn::model_ir::{build_mtz, build_sec, build_time_dependent, export_model, TimeParams};
use xppn::touring::{read_solution, write_solution, TourSolution};

pub use bench::{run_bench, BenchRow, BenchSpec};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const LIMIT: u8 = 3;
    pub const VALIDATION: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
        }
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "xppn", version, about = "Routing through neighbourhoods and polygonal chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Heuristic,
    Benders,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formulation {
    Mtz,
    Sec,
    Ssec,
    Time,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Generate {
        #[arg(long)]
        size: usize,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        radii: u8,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        mode: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and write the solution and a run log.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Benders)]
        method: Method,
        /// Relative stopping gap.
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        /// Seconds.
        #[arg(long, default_value_t = 7200.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solution file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run log; `<out>.log` by default.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run the benchmark grid and write the CSV, profile and metadata files.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "5")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        radii: Vec<u8>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        modes: Vec<u8>,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 7200.0)]
        time_limit: f64,
        /// Worker threads; `XPPN_THREADS` or all cores by default.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an instance and a solution as SVG.
    Render {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a formulation of an instance in the model text format.
    Export {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Formulation::Mtz)]
        formulation: Formulation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    read_instance(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn seconds(s: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(s).map_err(|_| CliError::Usage(format!("invalid time limit {s}")))
}

/// The instance file text for a generator cell.
pub fn cmd_generate(size: usize, radii: u8, mode: u8, seed: u64) -> Result<String, CliError> {
    generate(size, radii, mode, seed).map(|i| write_instance(&i)).map_err(|e| CliError::Usage(e.to_string()))
}

/// Outcome of `solve`.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: TourSolution,
    pub log: String,
    /// `None` for the heuristic.
    pub status: Option<BendersStatus>,
}

impl SolveOutcome {
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Some(BendersStatus::TimeLimit) => exit::LIMIT,
            _ => exit::OK,
        }
    }
}

pub fn cmd_solve(inst: &Instance, method: Method, eps: f64, time_limit: Duration, seed: u64) -> Result<SolveOutcome, CliError> {
    if !(eps >= 0.0) {
        return Err(CliError::Usage(format!("eps must be non-negative, got {eps}")));
    }
    let mut heuristic = HeuristicConfig { seed, ..HeuristicConfig::default() };
    heuristic.subproblem.seed = seed;
    match method {
        Method::Heuristic => {
            let t = std::time::Instant::now();
            let sol = heuristic_solve(inst, &heuristic).map_err(validation)?;
            let log = format!(
                "method heuristic\ncost {:.9}\ntour {}\nelapsed {:.3}\n",
                sol.cost,
                sol.tour,
                t.elapsed().as_secs_f64()
            );
            Ok(SolveOutcome { solution: sol, log, status: None })
        }
        Method::Benders => {
            let (reduced, reduction) = preprocess(inst);
            let cfg = BendersConfig { time_limit, heuristic, subproblem: heuristic.subproblem, ..BendersConfig::default() };
            let r = benders_solve(&reduced, Eps::Relative(eps), &cfg).map_err(validation)?;
            let solution = lift_solution(inst, &reduction, &r.best).map_err(validation)?;
            let mut log = format!("method benders\nstatus {}\n", r.status);
            if !reduction.is_identity() {
                log += &format!("preprocessing removed {:?}\n", reduction.deleted);
            }
            log += &r.log_text();
            log += &format!(
                "final LB {:.9} UB {:.9} gap_pct {:.6} cuts {} iterations {} elapsed {:.3}\n",
                r.lower_bound,
                r.upper_bound,
                r.gap_percent(),
                r.cuts.len(),
                r.iterations,
                r.wall_time.as_secs_f64()
            );
            Ok(SolveOutcome { solution, log, status: Some(r.status) })
        }
    }
}

/// Checks that `sol` belongs to `inst`.
pub fn check_solution(inst: &Instance, sol: &TourSolution, name: &str) -> Result<(), CliError> {
    if sol.tour.len() != inst.len() {
        return Err(CliError::Validation(format!(
            "solution visits {} elements but the instance has {}",
            sol.tour.len(),
            inst.len()
        )));
    }
    if name != inst.name {
        return Err(CliError::Validation(format!("solution is for `{name}`, instance is `{}`", inst.name)));
    }
    for (v, p) in sol.points() {
        if !inst.element(v).contains(p, 1e-5) {
            return Err(CliError::Validation(format!("point ({}, {}) lies outside element {v}", p.x, p.y)));
        }
    }
    Ok(())
}

pub fn cmd_export(inst: &Instance, formulation: Formulation) -> Result<(String, Option<String>), CliError> {
    let bounds = compute_bounds(inst);
    Ok(match formulation {
        Formulation::Mtz => (export_model(&build_mtz(inst, &bounds)), None),
        Formulation::Sec | Formulation::Ssec => {
            let (m, note) = build_sec(inst, &bounds, formulation == Formulation::Ssec);
            (export_model(&m), Some(note))
        }
        Formulation::Time => {
            let m = build_time_dependent(inst, &bounds, &TimeParams::uniform(inst)).map_err(validation)?;
            (export_model(&m), None)
        }
    })
}

/// Worker count: the flag, then `XPPN_THREADS`, then all cores.
pub fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("XPPN_THREADS").ok().and_then(|s| s.parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Generate { size, radii, mode, seed, out } => {
            emit(out.as_deref(), &cmd_generate(size, radii, mode, seed)?)?;
            Ok(exit::OK)
        }
        Command::Solve { instance, method, eps, time_limit, seed, out, log } => {
            let inst = load_instance(&instance)?;
            let outcome = cmd_solve(&inst, method, eps, seconds(time_limit)?, seed)?;
            emit(out.as_deref(), &write_solution(&outcome.solution, &inst.name))?;
            let log_path = log.or_else(|| out.map(|o| PathBuf::from(format!("{}.log", o.display()))));
            match log_path {
                Some(p) => write(&p, &outcome.log)?,
                None => eprint!("{}", outcome.log),
            }
            Ok(outcome.exit_code())
        }
        Command::Bench { sizes, radii, modes, seeds, eps, time_limit, threads, out } => {
            let spec = BenchSpec { sizes, radii, modes, seeds, eps, time_limit: seconds(time_limit)? };
            spec.validate()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(worker_count(threads))
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let rows = pool.install(|| run_bench(&spec));
            write(&out, &bench::csv(&rows))?;
            let stem = out.with_extension("");
            write(&PathBuf::from(format!("{}_profile.csv", stem.display())), &bench::profile_csv(&rows, spec.time_limit))?;
            write(&PathBuf::from(format!("{}.meta.txt", out.display())), &bench::meta(&spec))?;
            Ok(exit::OK)
        }
        Command::Render { instance, solution, out } => {
            let inst = load_instance(&instance)?;
            let (sol, name) = read_solution(&read(&solution)?).map_err(validation)?;
            check_solution(&inst, &sol, &name)?;
            emit(out.as_deref(), &render::svg(&inst, &sol))?;
            Ok(exit::OK)
        }
        Command::Export { instance, formulation, out } => {
            let inst = load_instance(&instance)?;
            let (text, note) = cmd_export(&inst, formulation)?;
            emit(out.as_deref(), &text)?;
            if let Some(n) = note {
                eprintln!("note: {n}");
            }
            Ok(exit::OK)
        }
    }
}
