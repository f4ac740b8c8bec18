//! Benchmark grid over generator cells.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use xppn::benders::{benders_solve, lift_solution, BendersConfig, Eps};
use xppn::bounds::preprocess;
use xppn::exec::map_slice;
use xppn::instance::generate;

use crate::CliError;

pub const CSV_HEADER: &str = "size,radii,mode,seed,heur_cost,final_cost,final_gap_pct,exact_s,heur_s,cuts,status";

/// Points per decade of the profile time grid.
const PROFILE_STEPS_PER_DECADE: usize = 10;
const PROFILE_START_S: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub sizes: Vec<usize>,
    pub radii: Vec<u8>,
    pub modes: Vec<u8>,
    /// Seeds `1..=seeds` per cell.
    pub seeds: u64,
    pub eps: f64,
    pub time_limit: Duration,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.sizes.is_empty() || self.radii.is_empty() || self.modes.is_empty() || self.seeds == 0 {
            return Err(CliError::Usage("benchmark grid is empty".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(1..=4).contains(*r)) {
            return Err(CliError::Usage(format!("radii class {r} is not in 1..=4")));
        }
        if let Some(m) = self.modes.iter().find(|m| !(1..=4).contains(*m)) {
            return Err(CliError::Usage(format!("mode {m} is not in 1..=4")));
        }
        if !(self.eps >= 0.0) {
            return Err(CliError::Usage(format!("eps must be non-negative, got {}", self.eps)));
        }
        Ok(())
    }

    /// Runs in `(size, radii, mode, seed)` order.
    pub fn runs(&self) -> Vec<(usize, u8, u8, u64)> {
        let mut out = Vec::new();
        for &s in &self.sizes {
            for &r in &self.radii {
                for &m in &self.modes {
                    out.extend((1..=self.seeds).map(|seed| (s, r, m, seed)));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub radii_class: u8,
    pub mode: u8,
    pub seed: u64,
    pub heuristic_cost: f64,
    pub final_cost: f64,
    pub final_gap_percent: f64,
    pub exact_time_s: f64,
    pub heuristic_time_s: f64,
    pub cuts: usize,
    /// `optimal`, `gap_limit`, `time_limit` or `error: <message>`.
    pub status: String,
}

impl BenchRow {
    pub fn is_solved(&self) -> bool {
        self.status == "optimal"
    }

    fn failed(size: usize, radii_class: u8, mode: u8, seed: u64, elapsed: f64, message: String) -> Self {
        BenchRow {
            size,
            radii_class,
            mode,
            seed,
            heuristic_cost: f64::NAN,
            final_cost: f64::NAN,
            final_gap_percent: f64::NAN,
            exact_time_s: elapsed,
            heuristic_time_s: 0.0,
            cuts: 0,
            status: format!("error: {}", message.replace([',', '\n'], ";")),
        }
    }
}

/// One isolated run of a grid cell.
pub fn run_one(size: usize, radii_class: u8, mode: u8, seed: u64, eps: f64, time_limit: Duration) -> BenchRow {
    let start = Instant::now();
    let inst = match generate(size, radii_class, mode, seed) {
        Ok(i) => i,
        Err(e) => return BenchRow::failed(size, radii_class, mode, seed, 0.0, e.to_string()),
    };
    let (reduced, reduction) = preprocess(&inst);
    let cfg = BendersConfig { time_limit, ..BendersConfig::default() };
    let r = match benders_solve(&reduced, Eps::Relative(eps), &cfg) {
        Ok(r) => r,
        Err(e) => return BenchRow::failed(size, radii_class, mode, seed, start.elapsed().as_secs_f64(), e.to_string()),
    };
    let final_cost = match lift_solution(&inst, &reduction, &r.best) {
        Ok(s) => s.cost,
        Err(e) => return BenchRow::failed(size, radii_class, mode, seed, start.elapsed().as_secs_f64(), e.to_string()),
    };
    BenchRow {
        size,
        radii_class,
        mode,
        seed,
        heuristic_cost: r.heuristic.cost,
        final_cost,
        final_gap_percent: r.gap_percent(),
        exact_time_s: start.elapsed().as_secs_f64(),
        heuristic_time_s: r.heuristic_time.as_secs_f64(),
        cuts: r.cuts.len(),
        status: r.status.as_str().to_string(),
    }
}

/// Runs the grid on the current rayon pool; rows come back in grid order.
pub fn run_bench(spec: &BenchSpec) -> Vec<BenchRow> {
    map_slice(&spec.runs(), |&(s, r, m, seed)| run_one(s, r, m, seed, spec.eps, spec.time_limit))
}

fn real(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.6}")
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// The CSV body: rows in input order, each cell followed by its average row.
pub fn csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for cell in rows.chunk_by(|a, b| (a.size, a.radii_class, a.mode) == (b.size, b.radii_class, b.mode)) {
        for r in cell {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.size,
                r.radii_class,
                r.mode,
                r.seed,
                real(r.heuristic_cost),
                real(r.final_cost),
                real(r.final_gap_percent),
                real(r.exact_time_s),
                real(r.heuristic_time_s),
                r.cuts,
                r.status
            );
        }
        let first = &cell[0];
        let solved = cell.iter().filter(|r| r.is_solved()).count();
        let _ = writeln!(
            out,
            "{},{},{},avg,{},{},{},{},{},{},{}/{} optimal",
            first.size,
            first.radii_class,
            first.mode,
            real(mean(cell.iter().map(|r| r.heuristic_cost))),
            real(mean(cell.iter().map(|r| r.final_cost))),
            real(mean(cell.iter().map(|r| r.final_gap_percent))),
            real(mean(cell.iter().map(|r| r.exact_time_s))),
            real(mean(cell.iter().map(|r| r.heuristic_time_s))),
            real(mean(cell.iter().map(|r| r.cuts as f64))),
            solved,
            cell.len()
        );
    }
    out
}

/// Log-spaced times from 10 ms up to and including `limit`.
pub fn profile_grid(limit: Duration) -> Vec<f64> {
    let limit = limit.as_secs_f64().max(PROFILE_START_S);
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let t = PROFILE_START_S * 10f64.powf(k as f64 / PROFILE_STEPS_PER_DECADE as f64);
        if t >= limit {
            break;
        }
        grid.push(t);
        k += 1;
    }
    grid.push(limit);
    grid
}

/// `t_s,solved`: runs finished with status optimal within `t` seconds.
pub fn profile_csv(rows: &[BenchRow], limit: Duration) -> String {
    let mut times: Vec<f64> = rows.iter().filter(|r| r.is_solved()).map(|r| r.exact_time_s).collect();
    times.sort_by(f64::total_cmp);
    let mut out = String::from("t_s,solved\n");
    for t in profile_grid(limit) {
        let solved = times.partition_point(|&x| x <= t);
        let _ = writeln!(out, "{t:.6},{solved}");
    }
    out
}

pub fn meta(spec: &BenchSpec) -> String {
    format!(
        "sizes {:?}\nradii {:?}\nmodes {:?}\nseeds 1..={}\neps {} relative\ntime_limit_s {}\n\
         Instances are generated from the listed seeds, so every row can be regenerated.\n\
         Averages from runs of this protocol on unseeded instances are not reproducible\n\
         bit for bit, and rows here are not expected to match them.\n",
        spec.sizes,
        spec.radii,
        spec.modes,
        spec.seeds,
        spec.eps,
        spec.time_limit.as_secs_f64()
    )
}
