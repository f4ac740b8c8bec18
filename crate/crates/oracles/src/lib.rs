//! Slow reference solvers for cross-checking the library in tests.
//!
//! Nothing here calls the solvers under test except [`exhaustive_optimum`],
//! which is the tour-enumeration reference and reuses the fixed-tour solver
//! by design.

use std::f64::consts::TAU;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use xppn::geometry::{Element, ElementKind, Point};
use xppn::instance::Instance;
use xppn::touring::{solve_fixed_tour, SubproblemConfig, Tour, TourSolution};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn dist(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

pub fn cycle_length(points: &[Point], order: &[usize]) -> f64 {
    (0..order.len()).map(|k| dist(points[order[k]], points[order[(k + 1) % order.len()]])).sum()
}

/// Exact shortest Hamiltonian cycle by dynamic programming over subsets.
pub fn held_karp(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let full = 1usize << (n - 1);
    // best[S][j]: shortest path from 0 through S (over 1..n) ending at j+1.
    let mut best = vec![vec![f64::INFINITY; n - 1]; full];
    for j in 0..n - 1 {
        best[1 << j][j] = dist(points[0], points[j + 1]);
    }
    for s in 1..full {
        for j in 0..n - 1 {
            let here = best[s][j];
            if s & (1 << j) == 0 || here.is_infinite() {
                continue;
            }
            for k in 0..n - 1 {
                if s & (1 << k) == 0 {
                    let t = s | (1 << k);
                    let c = here + dist(points[j + 1], points[k + 1]);
                    if c < best[t][k] {
                        best[t][k] = c;
                    }
                }
            }
        }
    }
    (0..n - 1).map(|j| best[full - 1][j] + dist(points[j + 1], points[0])).fold(f64::INFINITY, f64::min)
}

/// Every Hamiltonian cycle on `0..n` once: start at 0 and, for `n ≥ 3`,
/// second vertex smaller than the last.
pub fn distinct_cycles(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            if n < 3 || prefix[1] < prefix[n - 1] {
                out.push(prefix.clone());
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    if n > 0 {
        used[0] = true;
        extend(&mut vec![0], &mut used, &mut out);
    }
    out
}

/// A uniformly random permutation of `0..n`.
pub fn random_order(n: usize, rng: &mut StdRng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    order
}

/// `count` points drawn from the element: uniform over the bounding box with
/// rejection for regions, uniform in arc parameter for chains.
pub fn sample_points(e: &Element, count: usize, rng: &mut StdRng) -> Vec<Point> {
    if let ElementKind::Chain { breakpoints } = e.kind() {
        return (0..count)
            .map(|_| {
                let seg = rng.gen_range(0..breakpoints.len() - 1);
                let t: f64 = rng.gen();
                let (a, b) = (breakpoints[seg], breakpoints[seg + 1]);
                Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
            })
            .collect();
    }
    let (lo, hi) = e.bounding_box();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Point::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if e.contains(p, 0.0) {
            out.push(p);
        }
    }
    out
}

/// Center and radius when every element is a circle.
pub fn circles(inst: &Instance) -> Option<Vec<(Point, f64)>> {
    inst.elements()
        .iter()
        .map(|e| match e.kind() {
            ElementKind::Circle { center, radius } => Some((*center, *radius)),
            _ => None,
        })
        .collect()
}

const COARSE: usize = 120;
const FINE: usize = 720;
const WINDOW: i64 = 12;
const GOLDEN_SWEEPS: usize = 60;

fn on_circle(c: (Point, f64), theta: f64) -> Point {
    Point::new(c.0.x + c.1 * theta.cos(), c.0.y + c.1 * theta.sin())
}

/// Best cycle through one candidate angle per position, by dynamic
/// programming with the first choice fixed in turn.
fn cycle_dp(cands: &[Vec<Point>]) -> (f64, Vec<usize>) {
    let n = cands.len();
    let mut best = (f64::INFINITY, Vec::new());
    for a0 in 0..cands[0].len() {
        let mut cost = vec![0.0];
        let mut back: Vec<Vec<usize>> = Vec::new();
        let mut prev = vec![cands[0][a0]];
        for cand in &cands[1..] {
            let mut next = vec![f64::INFINITY; cand.len()];
            let mut arg = vec![0; cand.len()];
            for (j, &q) in cand.iter().enumerate() {
                for (i, &p) in prev.iter().enumerate() {
                    let c = cost[i] + dist(p, q);
                    if c < next[j] {
                        next[j] = c;
                        arg[j] = i;
                    }
                }
            }
            cost = next;
            back.push(arg);
            prev = cand.clone();
        }
        for (j, &p) in prev.iter().enumerate() {
            let c = cost[j] + dist(p, cands[0][a0]);
            if c < best.0 {
                let mut picks = vec![j];
                for arg in back.iter().rev().take(n - 2) {
                    picks.push(arg[*picks.last().unwrap()]);
                }
                picks.push(a0);
                picks.reverse();
                best = (c, picks);
            }
        }
    }
    best
}

/// Shortest closed route meeting the circles in the given order with one
/// boundary point per circle: angular grid search, then local refinement.
pub fn circle_cycle_oracle(circles: &[(Point, f64)], order: &[usize]) -> f64 {
    let cs: Vec<(Point, f64)> = order.iter().map(|&v| circles[v]).collect();
    let n = cs.len();
    if n == 1 {
        return 0.0;
    }
    let coarse: Vec<Vec<Point>> =
        cs.iter().map(|&c| (0..COARSE).map(|k| on_circle(c, TAU * k as f64 / COARSE as f64)).collect()).collect();
    let (_, picks) = cycle_dp(&coarse);
    let ratio = (FINE / COARSE) as i64;
    let fine_idx: Vec<Vec<i64>> =
        picks.iter().map(|&p| (-WINDOW..=WINDOW).map(|d| (p as i64 * ratio + d).rem_euclid(FINE as i64)).collect()).collect();
    let fine: Vec<Vec<Point>> = cs
        .iter()
        .zip(&fine_idx)
        .map(|(&c, idx)| idx.iter().map(|&k| on_circle(c, TAU * k as f64 / FINE as f64)).collect())
        .collect();
    let (mut best, picks) = cycle_dp(&fine);
    let mut theta: Vec<f64> = picks.iter().zip(&fine_idx).map(|(&p, idx)| TAU * idx[p] as f64 / FINE as f64).collect();
    let step = TAU / FINE as f64;
    let local = |k: usize, th: f64, theta: &[f64]| {
        let prev = on_circle(cs[(k + n - 1) % n], theta[(k + n - 1) % n]);
        let next = on_circle(cs[(k + 1) % n], theta[(k + 1) % n]);
        let p = on_circle(cs[k], th);
        dist(prev, p) + dist(p, next)
    };
    for _ in 0..GOLDEN_SWEEPS {
        for k in 0..n {
            let (mut a, mut b) = (theta[k] - step, theta[k] + step);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..60 {
                let (x1, x2) = (b - g * (b - a), a + g * (b - a));
                if local(k, x1, &theta) < local(k, x2, &theta) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            let cand = (a + b) / 2.0;
            if local(k, cand, &theta) < local(k, theta[k], &theta) {
                theta[k] = cand;
            }
        }
        let pts: Vec<Point> = cs.iter().zip(&theta).map(|(&c, &t)| on_circle(c, t)).collect();
        best = best.min(cycle_length(&pts, &(0..n).collect::<Vec<_>>()));
    }
    best
}

/// Optimum over all tours for circles with discount ≥ 1 and no circle
/// inside another, where some optimum meets each circle at one boundary point.
pub fn circle_brute_force(circles: &[(Point, f64)]) -> f64 {
    distinct_cycles(circles.len()).iter().map(|o| circle_cycle_oracle(circles, o)).fold(f64::INFINITY, f64::min)
}

/// Exhaustive reference: the fixed-tour solver on every distinct tour.
pub fn exhaustive_optimum(inst: &Instance, cfg: &SubproblemConfig) -> TourSolution {
    distinct_cycles(inst.len())
        .into_iter()
        .map(|o| solve_fixed_tour(inst, &Tour::new(o).expect("permutation"), cfg).expect("subproblem"))
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .expect("at least one tour")
}
