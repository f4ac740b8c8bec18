//! Exact solution by Benders decomposition: a combinatorial master picks the
//! tour minimizing the largest cut value, the fixed-tour subproblem prices
//! it, and each priced tour adds one optimality cut.

use std::fmt;
use std::time::{Duration, Instant};

use crate::bounds::{compute_bounds, BoundsTable, Reduction};
use crate::exec;
use crate::geometry::Point;
use crate::heuristic::{heuristic_solve, HeuristicConfig};
use crate::instance::Instance;
use crate::touring::{
    evaluate, solve_fixed_tour, SolveStatus, SubproblemConfig, Tour, TourSolution, TouringError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BendersError {
    #[error(transparent)]
    Touring(#[from] TouringError),
    #[error("{n} elements exceed the master size cap of {cap}")]
    UnsupportedSize { n: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// An optimality cut `P ≥ base + Σ_{e ∈ tour} coef[e]`.
///
/// Coefficients are indexed by directed edge. Cost is symmetric under
/// reversal, so a tour is scored in both directions and the larger value
/// is used.
#[derive(Debug, Clone, PartialEq)]
pub struct BendersCut {
    pub base: f64,
    n: usize,
    coef: Vec<f64>,
    /// Tour whose subproblem produced the cut; `None` for the initial cut.
    pub source_tour: Option<Tour>,
}

impl BendersCut {
    /// `P ≥ Σ m_e z_e`.
    pub fn initial(bounds: &BoundsTable) -> Self {
        let n = bounds.len();
        let coef = (0..n * n).map(|i| bounds.lower(i / n, i % n)).collect();
        Self { base: 0.0, n, coef, source_tour: None }
    }

    /// Cut generated by tour `source` whose subproblem value is at least `value`.
    pub fn from_tour(bounds: &BoundsTable, source: &Tour, value: f64) -> Self {
        let n = bounds.len();
        let mut coef: Vec<f64> = (0..n * n).map(|i| bounds.lower(i / n, i % n)).collect();
        let mut base = value;
        for (v, w) in source.edges() {
            coef[v * n + w] = bounds.upper(v, w);
            base -= bounds.upper(v, w);
        }
        Self { base, n, coef, source_tour: Some(source.clone()) }
    }

    pub fn coef(&self, v: usize, w: usize) -> f64 {
        self.coef[v * self.n + w]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn value_of(&self, order: &[usize]) -> f64 {
        let n = order.len();
        let mut fwd = self.base;
        let mut bwd = self.base;
        for k in 0..n {
            let (v, w) = (order[k], order[(k + 1) % n]);
            fwd += self.coef(v, w);
            bwd += self.coef(w, v);
        }
        fwd.max(bwd)
    }
}

/// `base + Σ coef` over the edges of `tour`, in its better direction.
pub fn cut_value(cut: &BendersCut, tour: &Tour) -> f64 {
    cut.value_of(tour.order())
}

/// Absolute or relative stopping gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eps {
    Absolute(f64),
    /// `r · (1 + UB₀)` with `UB₀` the heuristic cost.
    Relative(f64),
}

impl Default for Eps {
    fn default() -> Self {
        Eps::Relative(1e-4)
    }
}

impl Eps {
    pub fn resolve(self, initial_upper: f64) -> f64 {
        match self {
            Eps::Absolute(e) => e,
            Eps::Relative(r) => r * (1.0 + initial_upper.abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendersConfig {
    pub time_limit: Duration,
    pub max_iterations: usize,
    /// Subtracted from an unbounded subproblem's cost before it is used in a cut.
    pub safety_margin: f64,
    /// Largest size solved by full tour enumeration in the master.
    pub enum_threshold: usize,
    /// Largest size the master accepts at all.
    pub size_cap: usize,
    pub heuristic: HeuristicConfig,
    pub subproblem: SubproblemConfig,
}

impl Default for BendersConfig {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(7200),
            max_iterations: 100_000,
            safety_margin: 1e-6,
            enum_threshold: 10,
            size_cap: 16,
            heuristic: HeuristicConfig::default(),
            subproblem: SubproblemConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BendersStatus {
    Optimal,
    GapLimit,
    TimeLimit,
}

impl BendersStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BendersStatus::Optimal => "optimal",
            BendersStatus::GapLimit => "gap_limit",
            BendersStatus::TimeLimit => "time_limit",
        }
    }
}

impl fmt::Display for BendersStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub gap: f64,
    pub tour: Tour,
    pub cuts: usize,
    pub elapsed: Duration,
}

impl fmt::Display for IterationLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {:.9}, {:.9}, {:.3e}, {}, {}, {:.3}",
            self.iteration,
            self.lower_bound,
            self.upper_bound,
            self.gap,
            self.tour,
            self.cuts,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BendersResult {
    pub best: TourSolution,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub cuts: Vec<BendersCut>,
    pub status: BendersStatus,
    pub wall_time: Duration,
    /// The warm-start solution from the heuristic.
    pub heuristic: TourSolution,
    pub heuristic_time: Duration,
    pub eps: f64,
    /// Set when some cut had to be built from a subproblem without a finite
    /// lower bound; optimality is then not claimed.
    pub heuristic_cuts: bool,
    pub log: Vec<IterationLog>,
}

impl BendersResult {
    pub fn gap(&self) -> f64 {
        (self.upper_bound - self.lower_bound).max(0.0)
    }

    /// `100 · (UB − LB) / UB`, zero when `UB` is not positive.
    pub fn gap_percent(&self) -> f64 {
        if self.upper_bound > 0.0 {
            100.0 * self.gap() / self.upper_bound
        } else {
            0.0
        }
    }

    pub fn log_text(&self) -> String {
        let mut out = String::from("iter, LB, UB, gap, tour, cut_count, elapsed\n");
        for line in &self.log {
            out += &format!("{line}\n");
        }
        out
    }
}

/// All canonical tours of `0..n` in lexicographic order.
pub fn canonical_tours(n: usize) -> Vec<Vec<usize>> {
    if n <= 2 {
        return vec![(0..n.max(1)).collect()];
    }
    let mut out = Vec::new();
    let mut rest: Vec<usize> = (1..n).collect();
    loop {
        if rest[0] < rest[n - 2] {
            let mut t = Vec::with_capacity(n);
            t.push(0);
            t.extend_from_slice(&rest);
            out.push(t);
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    out
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Enumeration master: the running max-cut value of every canonical tour.
struct TourTable {
    tours: Vec<Vec<usize>>,
    values: Vec<f64>,
}

impl TourTable {
    fn new(n: usize) -> Self {
        let tours = canonical_tours(n);
        let values = vec![f64::NEG_INFINITY; tours.len()];
        Self { tours, values }
    }

    fn add(&mut self, cut: &BendersCut) {
        let tours = &self.tours;
        let fresh = exec::map_range(tours.len(), |t| cut.value_of(&tours[t]));
        for (v, f) in self.values.iter_mut().zip(fresh) {
            *v = v.max(f);
        }
    }

    /// Smallest value, first in lexicographic order among ties.
    fn argmin(&self) -> (Tour, f64) {
        let mut best = 0;
        for (t, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = t;
            }
        }
        (Tour::new(self.tours[best].clone()).expect("canonical tour"), self.values[best])
    }
}

/// Depth-first branch-and-bound over paths from vertex 0.
fn master_dfs(cuts: &[BendersCut], n: usize) -> (Tour, f64) {
    struct Search<'a> {
        cuts: &'a [BendersCut],
        n: usize,
        path: Vec<usize>,
        used: Vec<bool>,
        /// Per cut: forward and backward partial sums.
        sums: Vec<(f64, f64)>,
        best: Option<(Vec<usize>, f64)>,
    }

    impl Search<'_> {
        fn bound(&self) -> f64 {
            let n = self.n;
            let last = *self.path.last().unwrap();
            let open: Vec<usize> = (0..n).filter(|&w| !self.used[w]).collect();
            let mut bound = f64::NEG_INFINITY;
            for (cut, &(fwd, bwd)) in self.cuts.iter().zip(&self.sums) {
                // Every open vertex and the path end still need one edge
                // towards an open vertex or back to the start.
                let mut rest_f = 0.0;
                let mut rest_b = 0.0;
                for &u in open.iter().chain(std::iter::once(&last)) {
                    let targets = open.iter().copied().chain(std::iter::once(0)).filter(|&w| w != u);
                    let (mut f, mut b) = (f64::INFINITY, f64::INFINITY);
                    for w in targets {
                        f = f.min(cut.coef(u, w));
                        b = b.min(cut.coef(w, u));
                    }
                    if f.is_finite() {
                        rest_f += f;
                        rest_b += b;
                    }
                }
                bound = bound.max((fwd + rest_f).max(bwd + rest_b));
            }
            bound
        }

        fn run(&mut self) {
            let n = self.n;
            if self.path.len() == n {
                if n >= 3 && self.path[1] > self.path[n - 1] {
                    return;
                }
                let value = self
                    .cuts
                    .iter()
                    .zip(&self.sums)
                    .map(|(c, &(f, b))| {
                        let last = self.path[n - 1];
                        (f + c.coef(last, 0)).max(b + c.coef(0, last))
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                if self.best.as_ref().is_none_or(|b| value < b.1) {
                    self.best = Some((self.path.clone(), value));
                }
                return;
            }
            if let Some(b) = &self.best {
                if self.bound() >= b.1 {
                    return;
                }
            }
            let last = *self.path.last().unwrap();
            for w in 1..n {
                if self.used[w] {
                    continue;
                }
                let saved = self.sums.clone();
                for (s, c) in self.sums.iter_mut().zip(self.cuts) {
                    s.0 += c.coef(last, w);
                    s.1 += c.coef(w, last);
                }
                self.used[w] = true;
                self.path.push(w);
                self.run();
                self.path.pop();
                self.used[w] = false;
                self.sums = saved;
            }
        }
    }

    let mut used = vec![false; n];
    used[0] = true;
    let mut search = Search {
        cuts,
        n,
        path: vec![0],
        used,
        sums: cuts.iter().map(|c| (c.base, c.base)).collect(),
        best: None,
    };
    search.run();
    let (order, value) = search.best.expect("at least one tour");
    (Tour::new(order).expect("permutation"), value)
}

/// The tour minimizing the largest cut value, and that value.
///
/// Ties go to the lexicographically smallest canonical tour.
pub fn master_solve(cuts: &[BendersCut], n: usize, cfg: &BendersConfig) -> Result<(Tour, f64), BendersError> {
    if cuts.is_empty() {
        return Err(BendersError::Config("the master needs at least one cut".into()));
    }
    if cuts.iter().any(|c| c.len() != n) {
        return Err(BendersError::Config("cut size does not match the instance".into()));
    }
    if n > cfg.size_cap {
        return Err(BendersError::UnsupportedSize { n, cap: cfg.size_cap });
    }
    if n <= cfg.enum_threshold {
        let mut table = TourTable::new(n);
        for c in cuts {
            table.add(c);
        }
        Ok(table.argmin())
    } else {
        Ok(master_dfs(cuts, n))
    }
}

enum Master<'a> {
    Table(TourTable),
    Search(&'a BendersConfig),
}

impl Master<'_> {
    fn solve(&mut self, cuts: &[BendersCut], n: usize) -> Result<(Tour, f64), BendersError> {
        match self {
            Master::Table(t) => {
                t.add(cuts.last().expect("cut"));
                Ok(t.argmin())
            }
            Master::Search(cfg) => master_solve(cuts, n, cfg),
        }
    }
}

/// Lower bound a cut may use for a solved subproblem.
fn cut_value_for(sol: &TourSolution, margin: f64) -> (f64, bool) {
    if sol.lower_bound.is_finite() {
        (sol.lower_bound.min(sol.cost), false)
    } else {
        (sol.cost - margin, true)
    }
}

/// Runs the decomposition from a heuristic warm start until the gap closes
/// to `eps` or a limit is hit.
pub fn benders_solve(inst: &Instance, eps: Eps, cfg: &BendersConfig) -> Result<BendersResult, BendersError> {
    let start = Instant::now();
    let n = inst.len();
    if n > cfg.size_cap {
        return Err(BendersError::UnsupportedSize { n, cap: cfg.size_cap });
    }
    if cfg.max_iterations == 0 {
        return Err(BendersError::Config("max_iterations must be positive".into()));
    }
    let bounds = compute_bounds(inst);
    let heuristic = heuristic_solve(inst, &cfg.heuristic)?;
    let heuristic_time = start.elapsed();
    let eps = eps.resolve(heuristic.cost);
    if !(eps >= 0.0) {
        return Err(BendersError::Config("eps must be non-negative".into()));
    }

    let (first, mut heuristic_cuts) = cut_value_for(&heuristic, cfg.safety_margin);
    let mut cuts = vec![BendersCut::initial(&bounds), BendersCut::from_tour(&bounds, &heuristic.tour, first)];
    let mut master = if n <= cfg.enum_threshold {
        let mut table = TourTable::new(n);
        table.add(&cuts[0]);
        Master::Table(table)
    } else {
        Master::Search(cfg)
    };
    let mut priced = vec![heuristic.tour.clone()];
    let mut best = heuristic.clone();
    let mut upper = heuristic.cost;
    let mut lower = 0.0_f64;
    let mut log = Vec::new();
    let mut status = BendersStatus::GapLimit;
    let mut iterations = 0;

    loop {
        if upper - lower <= eps {
            status = BendersStatus::Optimal;
            break;
        }
        if start.elapsed() >= cfg.time_limit {
            status = BendersStatus::TimeLimit;
            break;
        }
        if iterations == cfg.max_iterations {
            break;
        }
        iterations += 1;
        let (tour, value) = master.solve(&cuts, n)?;
        let previous = lower;
        lower = lower.max(value.min(upper));
        debug_assert!(lower >= previous);
        let gap = (upper - lower).max(0.0);
        if gap <= eps {
            log.push(IterationLog { iteration: iterations, lower_bound: lower, upper_bound: upper, gap, tour, cuts: cuts.len(), elapsed: start.elapsed() });
            status = BendersStatus::Optimal;
            break;
        }
        if priced.contains(&tour) {
            // The master repeats a priced tour: its own cut is tight, so the
            // remaining gap is the subproblem tolerance.
            log.push(IterationLog { iteration: iterations, lower_bound: lower, upper_bound: upper, gap, tour, cuts: cuts.len(), elapsed: start.elapsed() });
            break;
        }
        let sol = solve_fixed_tour(inst, &tour, &cfg.subproblem)?;
        let (value, flagged) = cut_value_for(&sol, cfg.safety_margin);
        heuristic_cuts |= flagged;
        cuts.push(BendersCut::from_tour(&bounds, &tour, value));
        priced.push(tour.clone());
        if sol.cost < upper {
            upper = sol.cost;
            best = sol;
        }
        debug_assert!(upper <= log.last().map_or(f64::INFINITY, |l: &IterationLog| l.upper_bound));
        log.push(IterationLog {
            iteration: iterations,
            lower_bound: lower,
            upper_bound: upper,
            gap: (upper - lower).max(0.0),
            tour,
            cuts: cuts.len(),
            elapsed: start.elapsed(),
        });
    }
    if status == BendersStatus::Optimal && (heuristic_cuts || best.status == SolveStatus::Approximate) {
        status = BendersStatus::GapLimit;
    }
    Ok(BendersResult {
        best,
        lower_bound: lower,
        upper_bound: upper,
        iterations,
        cuts,
        status,
        wall_time: start.elapsed(),
        heuristic,
        heuristic_time,
        eps,
        heuristic_cuts,
        log,
    })
}

/// Extends a solution of a preprocessed instance to the original one.
///
/// Each deleted element contains its witness, so it is visited right after
/// the witness at the witness's exit point, which adds nothing to the cost.
pub fn lift_solution(original: &Instance, reduction: &Reduction, sol: &TourSolution) -> Result<TourSolution, TouringError> {
    if reduction.is_identity() {
        return Ok(sol.clone());
    }
    let mut order: Vec<usize> = sol.tour.order().iter().map(|&v| reduction.kept[v]).collect();
    let n = original.len();
    let mut entry = vec![Point::ORIGIN; n];
    let mut exit = vec![Point::ORIGIN; n];
    for (i, &v) in reduction.kept.iter().enumerate() {
        entry[v] = sol.entry[i];
        exit[v] = sol.exit[i];
    }
    for &(deleted, witness) in reduction.deleted.iter().rev() {
        let at = order.iter().position(|&v| v == witness).expect("witness is visited");
        order.insert(at + 1, deleted);
        entry[deleted] = exit[witness];
        exit[deleted] = exit[witness];
    }
    let mut lifted = evaluate(original, &Tour::new(order)?, &entry, &exit)?;
    lifted.lower_bound = sol.lower_bound;
    lifted.status = sol.status;
    lifted.stats = sol.stats.clone();
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Element;

    fn circle(x: f64, y: f64, r: f64) -> Element {
        Element::circle(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn canonical_counts() {
        assert_eq!(canonical_tours(3).len(), 1);
        assert_eq!(canonical_tours(5).len(), 12);
        assert_eq!(canonical_tours(6).len(), 60);
        let t = canonical_tours(6);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t.iter().all(|o| Tour::new(o.clone()).unwrap().order() == o.as_slice()));
    }

    #[test]
    fn cut_self_value() {
        let inst = crate::instance::generate(5, 1, 1, 2).unwrap();
        let b = compute_bounds(&inst);
        let t = Tour::identity(5);
        let cut = BendersCut::from_tour(&b, &t, 120.0);
        assert!((cut_value(&cut, &t) - 120.0).abs() < 1e-9);
        // Shares no edge with the source.
        let other = Tour::new(vec![0, 2, 4, 1, 3]).unwrap();
        let removed: f64 = t.edges().map(|(v, w)| b.upper(v, w)).sum();
        let added: f64 = other.edges().map(|(v, w)| b.lower(v, w)).sum();
        assert!((cut_value(&cut, &other) - (120.0 - removed + added)).abs() < 1e-9);
    }

    #[test]
    fn dfs_matches_enumeration() {
        let inst = crate::instance::generate(7, 2, 1, 3).unwrap();
        let b = compute_bounds(&inst);
        let mut cuts = vec![BendersCut::initial(&b)];
        for (k, t) in canonical_tours(7).iter().step_by(37).enumerate() {
            cuts.push(BendersCut::from_tour(&b, &Tour::new(t.clone()).unwrap(), 150.0 + k as f64));
        }
        let cfg = BendersConfig::default();
        let (te, ve) = master_solve(&cuts, 7, &cfg).unwrap();
        let (td, vd) = master_dfs(&cuts, 7);
        assert_eq!(te, td);
        assert!((ve - vd).abs() < 1e-9);
    }

    #[test]
    fn size_cap() {
        let b = compute_bounds(&crate::instance::generate(17, 1, 1, 0).unwrap());
        let cuts = [BendersCut::initial(&b)];
        assert!(matches!(master_solve(&cuts, 17, &BendersConfig::default()), Err(BendersError::UnsupportedSize { .. })));
    }

    #[test]
    fn common_point_closes_at_once() {
        let inst = Instance::new(
            "t",
            vec![circle(1.0, 0.0, 1.0), circle(-1.0, 0.0, 1.0), circle(0.0, 1.0, 1.0), circle(0.0, -1.0, 1.0)],
        )
        .unwrap();
        let r = benders_solve(&inst, Eps::default(), &BendersConfig::default()).unwrap();
        assert_eq!(r.status, BendersStatus::Optimal);
        assert!(r.upper_bound <= 1e-4);
        assert!(r.iterations <= 2);
    }

    #[test]
    fn lifting_keeps_cost() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(0.0, 0.0, 3.0), circle(8.0, 0.0, 1.0), circle(4.0, 6.0, 1.0)])
            .unwrap();
        let (reduced, red) = crate::bounds::preprocess(&inst);
        assert_eq!(red.kept, vec![0, 2, 3]);
        let r = benders_solve(&reduced, Eps::default(), &BendersConfig::default()).unwrap();
        let lifted = lift_solution(&inst, &red, &r.best).unwrap();
        assert_eq!(lifted.tour.len(), 4);
        assert!((lifted.cost - r.best.cost).abs() < 1e-9);
    }
}
