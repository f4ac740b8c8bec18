//! The fixed-tour subproblem: given a visiting order, choose entry and exit
//! points in every element to minimize the route cost.
//!
//! Orientation convention: the route leaves element `v` at `exit[v]` and
//! arrives at the next element `w` at `entry[w]`, so the tour edge `(v, w)`
//! costs `‖exit[v] − entry[w]‖` and element `v` adds `f_v‖entry[v] − exit[v]‖`.

mod blocks;
mod convex;
mod text;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use crate::exec;
use crate::geometry::{Element, Point};
use crate::instance::{Instance, StreamRng};
use blocks::{choice_distance, element_block, element_choices, Assembly, Block, Choices};
use convex::{ConvexOutcome, SolverSettings};

pub use text::{read_solution, write_solution};

const RELAXATION_TOL: f64 = 1e-4;
const RELAXATION_PDHG_ITERATIONS: usize = 500;
const RELAXATION_SWEEPS: usize = 60;

/// Membership tolerance for returned and evaluated points.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TouringError {
    #[error("tour does not match the instance: {0}")]
    TourMismatch(String),
    #[error("element {element}: {detail}")]
    Infeasible { element: usize, detail: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solution file, line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A Hamiltonian cycle in canonical form: it starts at the smallest index
/// and, for three or more vertices, its second vertex is smaller than its last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tour(Vec<usize>);

impl Tour {
    /// Canonicalizes a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self, TouringError> {
        let n = order.len();
        if n == 0 {
            return Err(TouringError::TourMismatch("empty tour".into()));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(TouringError::TourMismatch(format!("{order:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self::canonical(order))
    }

    fn canonical(mut order: Vec<usize>) -> Self {
        let start = order.iter().position(|&v| v == 0).unwrap_or(0);
        order.rotate_left(start);
        let n = order.len();
        if n >= 3 && order[1] > order[n - 1] {
            order[1..].reverse();
        }
        Tour(order)
    }

    /// `0, 1, …, n−1`.
    pub fn identity(n: usize) -> Self {
        Tour((0..n).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Directed edges `(order[k], order[k+1])`, closing edge included.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).map(move |k| (self.0[k], self.0[(k + 1) % n]))
    }

    /// The same cycle traversed backwards (not canonical).
    pub fn reversed_order(&self) -> Vec<usize> {
        self.0.iter().rev().copied().collect()
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// Chain parameters of the entry and exit points, in `[0, segments]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub entry: f64,
    pub exit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Duality gap within the configured tolerance.
    Certified,
    /// Budget exhausted before certification; `lower_bound` is still valid.
    Approximate,
    /// Assembled from given points by [`evaluate`].
    Evaluated,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Certified => "certified",
            SolveStatus::Approximate => "approximate",
            SolveStatus::Evaluated => "evaluated",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Cost after each descent sweep, one list per descent run.
    pub sweeps: Vec<Vec<f64>>,
    pub pdhg_iterations: usize,
    /// Convex problems solved (branch-and-bound nodes included).
    pub convex_solves: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TourSolution {
    pub tour: Tour,
    pub entry: Vec<Point>,
    pub exit: Vec<Point>,
    pub lambda: Vec<Option<ChainParams>>,
    /// Cost of the tour edge leaving position `k` of the order.
    pub out_costs: Vec<f64>,
    /// `f_v‖entry[v] − exit[v]‖` per element.
    pub in_costs: Vec<f64>,
    pub cost: f64,
    /// Certified lower bound on the optimal cost for this tour.
    pub lower_bound: f64,
    pub status: SolveStatus,
    pub stats: SolveStats,
}

impl TourSolution {
    pub fn is_approximate(&self) -> bool {
        self.status == SolveStatus::Approximate
    }

    /// Every chosen point as `(element, point)`.
    pub fn points(&self) -> Vec<(usize, Point)> {
        (0..self.entry.len())
            .flat_map(|v| [(v, self.entry[v]), (v, self.exit[v])])
            .collect()
    }
}

fn cost_parts(inst: &Instance, tour: &Tour, entry: &[Point], exit: &[Point]) -> (Vec<f64>, Vec<f64>, f64) {
    let out: Vec<f64> = tour.edges().map(|(v, w)| exit[v].dist(entry[w])).collect();
    let inner: Vec<f64> = inst
        .elements()
        .iter()
        .enumerate()
        .map(|(v, e)| e.discount() * entry[v].dist(exit[v]))
        .collect();
    let total = out.iter().sum::<f64>() + inner.iter().sum::<f64>();
    (out, inner, total)
}

fn check_tour(inst: &Instance, tour: &Tour) -> Result<(), TouringError> {
    if tour.len() != inst.len() {
        return Err(TouringError::TourMismatch(format!(
            "tour has {} vertices, instance has {} elements",
            tour.len(),
            inst.len()
        )));
    }
    Ok(())
}

fn chain_params(
    e: &Element,
    entry: Point,
    exit: Point,
    given: Option<ChainParams>,
    element: usize,
) -> Result<Option<ChainParams>, TouringError> {
    if !e.is_chain() {
        return Ok(None);
    }
    let infeasible = |detail: String| TouringError::Infeasible { element, detail };
    let params = match given {
        Some(l) => {
            for (lam, p, which) in [(l.entry, entry, "entry"), (l.exit, exit, "exit")] {
                let at = e.chain_point_at(lam).map_err(|err| infeasible(err.to_string()))?;
                if at.dist(p) > FEASIBILITY_TOL {
                    return Err(infeasible(format!("{which} parameter {lam} does not match point {p:?}")));
                }
            }
            l
        }
        None => {
            let param = |p: Point, which: &str| {
                e.chain_param_of(p)
                    .ok_or_else(|| infeasible(format!("{which} point {p:?} is not on the chain")))
            };
            ChainParams { entry: param(entry, "entry")?, exit: param(exit, "exit")? }
        }
    };
    let need = e.coverage() * e.segment_count() as f64;
    if (params.entry - params.exit).abs() < need - FEASIBILITY_TOL {
        return Err(infeasible(format!(
            "coverage {:.6} below required {need:.6}",
            (params.entry - params.exit).abs()
        )));
    }
    Ok(Some(params))
}

/// Assembles the route cost of given points, checking membership and coverage.
/// Chain parameters are recovered from the points.
pub fn evaluate(inst: &Instance, tour: &Tour, entry: &[Point], exit: &[Point]) -> Result<TourSolution, TouringError> {
    evaluate_with_params(inst, tour, entry, exit, None)
}

/// Like [`evaluate`], with explicit chain parameters (needed on chains that
/// cross themselves, where a point has several parameters).
pub fn evaluate_with_params(
    inst: &Instance,
    tour: &Tour,
    entry: &[Point],
    exit: &[Point],
    lambda: Option<&[Option<ChainParams>]>,
) -> Result<TourSolution, TouringError> {
    check_tour(inst, tour)?;
    if entry.len() != inst.len() || exit.len() != inst.len() {
        return Err(TouringError::TourMismatch("one entry and one exit point per element required".into()));
    }
    let given = lambda;
    let mut lambda = Vec::with_capacity(inst.len());
    for (v, e) in inst.elements().iter().enumerate() {
        for (p, which) in [(entry[v], "entry"), (exit[v], "exit")] {
            if !e.contains(p, FEASIBILITY_TOL) {
                return Err(TouringError::Infeasible { element: v, detail: format!("{which} point {p:?} outside") });
            }
        }
        lambda.push(chain_params(e, entry[v], exit[v], given.and_then(|l| l.get(v).copied().flatten()), v)?);
    }
    let (out_costs, in_costs, cost) = cost_parts(inst, tour, entry, exit);
    Ok(TourSolution {
        tour: tour.clone(),
        entry: entry.to_vec(),
        exit: exit.to_vec(),
        lambda,
        out_costs,
        in_costs,
        cost,
        lower_bound: 0.0,
        status: SolveStatus::Evaluated,
        stats: SolveStats::default(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubproblemConfig {
    /// Relative duality-gap target.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Primal-dual iterations allowed per convex solve after descent stalls.
    pub pdhg_iterations: usize,
    /// Extra random starts tried when a solve ends uncertified.
    pub multistarts: usize,
    pub seed: u64,
    /// Maximum number of convex solves in the branch-and-bound over choices.
    pub node_budget: usize,
    /// Merge entry and exit of convex elements with discount ≥ 1.
    pub collapse: bool,
}

impl Default for SubproblemConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_sweeps: 500,
            pdhg_iterations: 20_000,
            multistarts: 5,
            seed: 0,
            node_budget: 100_000,
            collapse: true,
        }
    }
}

impl SubproblemConfig {
    fn validate(&self) -> Result<(), TouringError> {
        if !(self.tol > 0.0) || self.max_sweeps == 0 || self.node_budget == 0 {
            return Err(TouringError::Config("tol, max_sweeps and node_budget must be positive".into()));
        }
        Ok(())
    }

    fn settings(&self) -> SolverSettings {
        SolverSettings { tol: self.tol, max_sweeps: self.max_sweeps, pdhg_iterations: self.pdhg_iterations }
    }
}

/// Entry and exit guesses used to start the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub entry: Vec<Point>,
    pub exit: Vec<Point>,
}

impl WarmStart {
    pub fn anchors(inst: &Instance) -> Self {
        let p: Vec<Point> = inst.elements().iter().map(Element::anchor).collect();
        Self { entry: p.clone(), exit: p }
    }
}

/// One convex solve for a fixed choice per element.
struct NodeSolve {
    outcome: ConvexOutcome,
    entry: Vec<Point>,
    exit: Vec<Point>,
    lambda: Vec<Option<(f64, f64)>>,
}

struct Solver<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    discounts: Vec<f64>,
    choices: Vec<Option<Choices>>,
    cfg: SubproblemConfig,
}

impl<'a> Solver<'a> {
    fn blocks(&self, assign: &[Option<usize>]) -> Vec<Block> {
        self.inst
            .elements()
            .iter()
            .enumerate()
            .map(|(v, e)| element_block(e, self.choices[v].as_ref(), assign[v], self.cfg.collapse))
            .collect()
    }

    fn solve(&self, assign: &[Option<usize>], hint: &WarmStart) -> NodeSolve {
        let asm = Assembly::new(&self.order, &self.discounts, self.blocks(assign));
        let z = asm.initial(&hint.entry, &hint.exit);
        // Relaxations only feed bounds to the search, so they stop early.
        let settings = if self.unassigned_nonconvex(assign).is_empty() {
            self.cfg.settings()
        } else {
            SolverSettings {
                tol: RELAXATION_TOL.max(self.cfg.tol),
                max_sweeps: self.cfg.max_sweeps.min(RELAXATION_SWEEPS),
                pdhg_iterations: self.cfg.pdhg_iterations.min(RELAXATION_PDHG_ITERATIONS),
            }
        };
        let outcome = asm.problem.solve(z, settings);
        let (entry, exit, lambda) = asm.decode(&outcome.z);
        NodeSolve { outcome, entry, exit, lambda }
    }

    /// Re-solves from random starts, keeping the best primal point and the
    /// best bound.
    fn multistart(&self, assign: &[Option<usize>], mut best: NodeSolve) -> NodeSolve {
        let mut rng = StreamRng::new(self.cfg.seed);
        for _ in 0..self.cfg.multistarts {
            if best.outcome.certified(self.cfg.tol) {
                break;
            }
            let random: Vec<Point> = self
                .inst
                .elements()
                .iter()
                .map(|e| {
                    let (lo, hi) = e.bounding_box();
                    Point::new(rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y))
                })
                .collect();
            let hint = WarmStart { entry: random.clone(), exit: random };
            let mut next = self.solve(assign, &hint);
            let bound = best.outcome.lower_bound.max(next.outcome.lower_bound);
            let mut sweeps = std::mem::take(&mut best.outcome.sweeps);
            sweeps.append(&mut next.outcome.sweeps);
            if next.outcome.cost < best.outcome.cost {
                best = next;
            }
            best.outcome.lower_bound = bound.min(best.outcome.cost);
            best.outcome.sweeps = sweeps;
        }
        best
    }

    fn unassigned_nonconvex(&self, assign: &[Option<usize>]) -> Vec<usize> {
        (0..assign.len())
            .filter(|&v| self.choices[v].is_some() && assign[v].is_none())
            .collect()
    }

    /// The choice closest to relaxed points, and its distance.
    fn nearest_choice(&self, v: usize, entry: Point, exit: Point) -> (usize, f64) {
        let choices = self.choices[v].as_ref().expect("nonconvex element");
        (0..choices.len())
            .map(|i| (i, choice_distance(self.inst.element(v), choices, i, entry, exit)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one choice")
    }
}

#[derive(Debug)]
struct OpenNode {
    bound: f64,
    seq: usize,
    assign: Vec<Option<usize>>,
    hint: WarmStart,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for OpenNode {}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenNode {
    /// Reversed so that `BinaryHeap` pops the smallest bound first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.seq.cmp(&self.seq))
    }
}

/// Solves the subproblem of `tour` from the element anchors.
pub fn solve_fixed_tour(inst: &Instance, tour: &Tour, cfg: &SubproblemConfig) -> Result<TourSolution, TouringError> {
    solve_fixed_tour_from(inst, tour, cfg, &WarmStart::anchors(inst))
}

/// Solves the subproblem of `tour` starting near `warm`.
///
/// Convex elements are handled directly. Chains and unions make the problem
/// nonconvex; their discrete choices (segment pair and direction for
/// chains, member pair for unions) are searched best-first, bounding each
/// node by the certified dual value of a convex relaxation in which
/// undecided chains are replaced by the convex hull of their feasible
/// entry-exit pairs and undecided unions by their bounding box.
pub fn solve_fixed_tour_from(
    inst: &Instance,
    tour: &Tour,
    cfg: &SubproblemConfig,
    warm: &WarmStart,
) -> Result<TourSolution, TouringError> {
    check_tour(inst, tour)?;
    cfg.validate()?;
    if warm.entry.len() != inst.len() || warm.exit.len() != inst.len() {
        return Err(TouringError::TourMismatch("warm start must have one point pair per element".into()));
    }
    let solver = Solver {
        inst,
        order: tour.order().to_vec(),
        discounts: inst.elements().iter().map(Element::discount).collect(),
        choices: inst.elements().iter().map(|e| element_choices(e, cfg.collapse)).collect(),
        cfg: *cfg,
    };
    let n = inst.len();
    let mut stats = SolveStats::default();
    let mut root_assign: Vec<Option<usize>> = vec![None; n];
    for v in 0..n {
        if let Some(c) = &solver.choices[v] {
            if c.len() == 1 {
                root_assign[v] = Some(0);
            }
        }
    }

    let (best, best_assign, lower_bound, exhausted) = if solver.unassigned_nonconvex(&root_assign).is_empty() {
        let first = solver.solve(&root_assign, warm);
        stats.convex_solves += 1;
        let best = solver.multistart(&root_assign, first);
        let lb = best.outcome.lower_bound;
        (best, root_assign, lb, false)
    } else {
        branch_and_bound(&solver, root_assign, warm, &mut stats)
    };

    stats.sweeps.extend(best.outcome.sweeps.iter().cloned());
    stats.pdhg_iterations += best.outcome.pdhg_iterations;
    let mut entry = best.entry;
    let mut exit = best.exit;
    let collapsed: Vec<bool> = solver
        .blocks(&best_assign)
        .iter()
        .map(|b| matches!(b, Block::Collapsed(_)))
        .collect();
    push_to_boundary(inst, tour, &collapsed, &mut entry, &mut exit);
    let (out_costs, in_costs, cost) = cost_parts(inst, tour, &entry, &exit);
    let lambda = best
        .lambda
        .iter()
        .map(|l| l.map(|(a, b)| ChainParams { entry: a, exit: b }))
        .collect();
    let lower_bound = lower_bound.min(cost);
    let certified = !exhausted && cost - lower_bound <= cfg.tol * (1.0 + cost.abs());
    Ok(TourSolution {
        tour: tour.clone(),
        entry,
        exit,
        lambda,
        out_costs,
        in_costs,
        cost,
        lower_bound,
        status: if certified { SolveStatus::Certified } else { SolveStatus::Approximate },
        stats,
    })
}

/// Best-first search over the choices of nonconvex elements. Returns the
/// best leaf, its assignment, a global lower bound and whether the node
/// budget ran out.
fn branch_and_bound(
    solver: &Solver<'_>,
    root_assign: Vec<Option<usize>>,
    warm: &WarmStart,
    stats: &mut SolveStats,
) -> (NodeSolve, Vec<Option<usize>>, f64, bool) {
    let tol = solver.cfg.tol;
    let root = solver.solve(&root_assign, warm);
    stats.convex_solves += 1;

    // Incumbent: round the root relaxation, then improve one element at a time.
    let mut inc_assign = root_assign.clone();
    for v in solver.unassigned_nonconvex(&root_assign) {
        inc_assign[v] = Some(solver.nearest_choice(v, root.entry[v], root.exit[v]).0);
    }
    let round_hint = WarmStart { entry: root.entry.clone(), exit: root.exit.clone() };
    let mut incumbent = solver.solve(&inc_assign, &round_hint);
    stats.convex_solves += 1;
    let free: Vec<usize> = solver.unassigned_nonconvex(&root_assign);
    for _pass in 0..3 {
        let mut improved = false;
        for &v in &free {
            let count = solver.choices[v].as_ref().map_or(0, Choices::len);
            let hint = WarmStart { entry: incumbent.entry.clone(), exit: incumbent.exit.clone() };
            let trials = exec::map_range(count, |i| {
                let mut a = inc_assign.clone();
                a[v] = Some(i);
                solver.solve(&a, &hint)
            });
            stats.convex_solves += count;
            for (i, t) in trials.into_iter().enumerate() {
                if t.outcome.cost < incumbent.outcome.cost * (1.0 - 1e-12) {
                    inc_assign[v] = Some(i);
                    incumbent = t;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }

    let prune = |bound: f64, inc: f64| bound >= inc - tol * (1.0 + inc.abs());
    let mut terminal_bound = incumbent.outcome.lower_bound;
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(OpenNode {
        bound: root.outcome.lower_bound,
        seq,
        assign: root_assign,
        hint: WarmStart { entry: root.entry, exit: root.exit },
    });
    let mut exhausted = false;
    while let Some(node) = heap.pop() {
        if prune(node.bound, incumbent.outcome.cost) {
            terminal_bound = terminal_bound.min(node.bound);
            // Every remaining node has a larger bound.
            while let Some(rest) = heap.pop() {
                terminal_bound = terminal_bound.min(rest.bound);
            }
            break;
        }
        if stats.convex_solves >= solver.cfg.node_budget {
            exhausted = true;
            terminal_bound = terminal_bound.min(node.bound);
            while let Some(rest) = heap.pop() {
                terminal_bound = terminal_bound.min(rest.bound);
            }
            break;
        }
        let open = solver.unassigned_nonconvex(&node.assign);
        let v = *open
            .iter()
            .max_by(|&&a, &&b| {
                let da = solver.nearest_choice(a, node.hint.entry[a], node.hint.exit[a]).1;
                let db = solver.nearest_choice(b, node.hint.entry[b], node.hint.exit[b]).1;
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("open node has an undecided element");
        let count = solver.choices[v].as_ref().map_or(0, Choices::len);
        let children = exec::map_range(count, |i| {
            let mut a = node.assign.clone();
            a[v] = Some(i);
            let s = solver.solve(&a, &node.hint);
            (a, s)
        });
        stats.convex_solves += count;
        for (assign, child) in children {
            let bound = child.outcome.lower_bound.max(node.bound);
            let leaf = solver.unassigned_nonconvex(&assign).is_empty();
            if leaf {
                if child.outcome.cost < incumbent.outcome.cost {
                    terminal_bound = terminal_bound.min(incumbent.outcome.lower_bound);
                    incumbent = child;
                    inc_assign = assign;
                } else {
                    terminal_bound = terminal_bound.min(bound);
                }
            } else if prune(bound, incumbent.outcome.cost) {
                terminal_bound = terminal_bound.min(bound);
            } else {
                seq += 1;
                heap.push(OpenNode {
                    bound,
                    seq,
                    assign,
                    hint: WarmStart { entry: child.entry, exit: child.exit },
                });
            }
        }
    }
    let incumbent = if incumbent.outcome.certified(tol) {
        incumbent
    } else {
        solver.multistart(&inc_assign, incumbent)
    };
    let bound = terminal_bound.min(incumbent.outcome.lower_bound);
    (incumbent, inc_assign, bound, exhausted)
}

/// Moves interior collapsed points that sit on the segment between their
/// neighbours' points onto the element boundary, which leaves the cost
/// unchanged.
fn push_to_boundary(inst: &Instance, tour: &Tour, collapsed: &[bool], entry: &mut [Point], exit: &mut [Point]) {
    let order = tour.order();
    let n = order.len();
    if n < 2 {
        return;
    }
    for k in 0..n {
        let v = order[k];
        if !collapsed[v] {
            continue;
        }
        let Some(shape) = inst.element(v).convex_shape() else { continue };
        let x = entry[v];
        if shape.boundary_distance(x) <= 1e-12 {
            continue;
        }
        let a = exit[order[(k + n - 1) % n]];
        let b = entry[order[(k + 1) % n]];
        let slack = a.dist(x) + x.dist(b) - a.dist(b);
        if slack > 1e-9 * (1.0 + a.dist(b)) {
            continue;
        }
        let target = if !shape.contains(a, 0.0) {
            a
        } else if !shape.contains(b, 0.0) {
            b
        } else {
            continue;
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if shape.contains(x.lerp(target, mid), 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = x.lerp(target, lo);
        let before = a.dist(x) + x.dist(b);
        if a.dist(p) + p.dist(b) <= before + 1e-12 * (1.0 + before) {
            entry[v] = p;
            exit[v] = p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(x: f64, y: f64, r: f64) -> Element {
        Element::circle(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Tour::new(vec![2, 0, 1]).unwrap().order(), &[0, 1, 2]);
        assert_eq!(Tour::new(vec![0, 3, 2, 1]).unwrap().order(), &[0, 1, 2, 3]);
        assert_eq!(Tour::new(vec![1, 0]).unwrap().order(), &[0, 1]);
        assert!(Tour::new(vec![0, 0, 1]).is_err());
        assert!(Tour::new(vec![0, 5]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0)]).unwrap();
        let t = Tour::identity(2);
        let p = [Point::new(1.0, 0.0), Point::new(4.0, 0.0)];
        assert!((evaluate(&inst, &t, &p, &p).unwrap().cost - 6.0).abs() < 1e-12);
        // Inner segment 2, outgoing edge 3, returning edge into (-1, 0) is 5.
        let entry = [Point::new(-1.0, 0.0), Point::new(4.0, 0.0)];
        assert!((evaluate(&inst, &t, &entry, &p).unwrap().cost - 10.0).abs() < 1e-12);
        let bad = [Point::new(2.0, 0.0), Point::new(4.0, 0.0)];
        assert!(matches!(evaluate(&inst, &t, &bad, &bad), Err(TouringError::Infeasible { element: 0, .. })));
    }

    #[test]
    fn evaluate_three_collinear() {
        let inst = Instance::new(
            "t",
            vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0), circle(10.0, 0.0, 1.0)],
        )
        .unwrap();
        let entry = [Point::new(1.0, 0.0), Point::new(4.0, 0.0), Point::new(9.0, 0.0)];
        let exit = [Point::new(1.0, 0.0), Point::new(6.0, 0.0), Point::new(9.0, 0.0)];
        let s = evaluate(&inst, &Tour::identity(3), &entry, &exit).unwrap();
        // 3 + 3 + 8 outside, 2 inside the middle circle.
        assert!((s.cost - 16.0).abs() < 1e-12, "{}", s.cost);
        assert!((s.cost - s.out_costs.iter().sum::<f64>() - s.in_costs.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn two_circles_solve() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0)]).unwrap();
        let s = solve_fixed_tour(&inst, &Tour::identity(2), &SubproblemConfig::default()).unwrap();
        assert!((s.cost - 6.0).abs() < 1e-7);
        assert!(s.entry[0].dist(Point::new(1.0, 0.0)) < 1e-5);
        assert!(s.entry[1].dist(Point::new(4.0, 0.0)) < 1e-5);
        assert_eq!(s.status, SolveStatus::Certified);
    }

    #[test]
    fn common_point_costs_nothing() {
        let inst = Instance::new(
            "t",
            vec![circle(1.0, 0.0, 1.5), circle(-1.0, 0.0, 1.5), circle(0.0, 1.0, 1.5)],
        )
        .unwrap();
        let s = solve_fixed_tour(&inst, &Tour::identity(3), &SubproblemConfig::default()).unwrap();
        assert!(s.cost < 1e-6, "{}", s.cost);
    }

    #[test]
    fn chain_respects_coverage() {
        let chain = Element::chain(
            vec![Point::new(0.0, 10.0), Point::new(4.0, 10.0), Point::new(8.0, 10.0), Point::new(12.0, 10.0)],
            0.5,
        )
        .unwrap();
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), chain, circle(12.0, 0.0, 1.0)]).unwrap();
        let s = solve_fixed_tour(&inst, &Tour::identity(3), &SubproblemConfig::default()).unwrap();
        let l = s.lambda[1].unwrap();
        assert!((l.entry - l.exit).abs() >= 1.5 - 1e-6);
        assert!(evaluate(&inst, &s.tour, &s.entry, &s.exit).is_ok());
        assert!(s.lower_bound <= s.cost + 1e-12);
    }
}
