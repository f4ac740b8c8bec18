//! Two-phase construction heuristic: a Weber clustering picks one
//! representative point per element, variable neighbourhood search orders
//! them, and the fixed-tour subproblem refines the points.

use crate::geometry::{Element, Point};
use crate::instance::{Instance, StreamRng};
use crate::touring::{solve_fixed_tour_from, SubproblemConfig, Tour, TourSolution, TouringError, WarmStart};

/// Distance below which the median iterate is treated as sitting on a point.
const COINCIDENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicConfig {
    /// Total number of shakes allowed.
    pub vns_attempts: usize,
    /// Largest number of random reversals in one shake.
    pub vns_neighborhood_size: usize,
    pub vns_iterations: usize,
    pub weber_tol: f64,
    pub weber_max_iters: usize,
    pub seed: u64,
    pub subproblem: SubproblemConfig,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            vns_attempts: 25,
            vns_neighborhood_size: 5,
            vns_iterations: 10,
            weber_tol: 1e-7,
            weber_max_iters: 1000,
            seed: 0,
            subproblem: SubproblemConfig::default(),
        }
    }
}

impl HeuristicConfig {
    fn validate(&self) -> Result<(), TouringError> {
        let counts = [self.vns_attempts, self.vns_neighborhood_size, self.vns_iterations, self.weber_max_iters];
        if counts.contains(&0) || !(self.weber_tol > 0.0) {
            return Err(TouringError::Config("heuristic parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Result of the clustering phase.
#[derive(Debug, Clone, PartialEq)]
pub struct WeberCluster {
    pub center: Point,
    /// One point per element, in element order.
    pub reps: Vec<Point>,
    /// `Σ ‖reps[v] − center‖`.
    pub objective: f64,
    /// Objective after each outer iteration.
    pub trace: Vec<f64>,
}

fn sum_dist(points: &[Point], c: Point) -> f64 {
    points.iter().map(|p| p.dist(c)).sum()
}

/// Geometric median of `points` by Weiszfeld's iteration from `start`,
/// with the Vardi–Zhang modification at data points. Returns the median and
/// the objective at every iterate.
pub fn geometric_median(points: &[Point], start: Point, tol: f64, max_iters: usize) -> (Point, Vec<f64>) {
    match points.len() {
        0 => return (start, vec![0.0]),
        1 => return (points[0], vec![0.0]),
        2 => {
            let mid = points[0].lerp(points[1], 0.5);
            return (mid, vec![sum_dist(points, mid)]);
        }
        _ => {}
    }
    let mut y = start;
    let mut trace = vec![sum_dist(points, y)];
    for _ in 0..max_iters {
        let mut num = Point::ORIGIN;
        let mut den = 0.0;
        let mut pull = Point::ORIGIN;
        let mut eta = 0.0;
        for &a in points {
            let d = a.dist(y);
            if d < COINCIDENT {
                eta += 1.0;
            } else {
                num = num + a / d;
                den += 1.0 / d;
                pull = pull + (a - y) / d;
            }
        }
        if den == 0.0 {
            break;
        }
        let r = pull.norm();
        if eta > 0.0 && r <= eta {
            break;
        }
        let t = num / den;
        let next = if eta > 0.0 {
            let s = (eta / r).min(1.0);
            t * (1.0 - s) + y * s
        } else {
            t
        };
        let value = sum_dist(points, next);
        if value > *trace.last().unwrap() {
            break;
        }
        let moved = next.dist(y);
        y = next;
        trace.push(value);
        if moved < tol {
            break;
        }
    }
    (y, trace)
}

/// Alternating minimization of `Σ_v ‖x_v − C‖` with `x_v` in element `v`.
pub fn weber_cluster(inst: &Instance, cfg: &HeuristicConfig) -> WeberCluster {
    weber_cluster_of(inst.elements(), cfg)
}

pub fn weber_cluster_of(elements: &[Element], cfg: &HeuristicConfig) -> WeberCluster {
    let anchors: Vec<Point> = elements.iter().map(Element::anchor).collect();
    let mut center = anchors.iter().fold(Point::ORIGIN, |a, &p| a + p) / anchors.len().max(1) as f64;
    let mut reps: Vec<Point> = elements.iter().map(|e| e.project(center)).collect();
    let mut objective = sum_dist(&reps, center);
    let mut trace = vec![objective];
    for _ in 0..cfg.weber_max_iters {
        let (next, _) = geometric_median(&reps, center, cfg.weber_tol, cfg.weber_max_iters);
        let next_reps: Vec<Point> = elements.iter().map(|e| e.project(next)).collect();
        let value = sum_dist(&next_reps, next);
        if value > objective {
            break;
        }
        let moved = next.dist(center);
        center = next;
        reps = next_reps;
        objective = value;
        trace.push(value);
        if moved < cfg.weber_tol {
            break;
        }
    }
    WeberCluster { center, reps, objective, trace }
}

/// Length of the closed tour visiting `points` in `order`.
pub fn tour_length(points: &[Point], order: &[usize]) -> f64 {
    let n = order.len();
    (0..n).map(|k| points[order[k]].dist(points[order[(k + 1) % n]])).sum()
}

fn nearest_neighbor(points: &[Point]) -> Vec<usize> {
    let n = points.len();
    let mut used = vec![false; n];
    let mut order = vec![0];
    used[0] = true;
    for _ in 1..n {
        let last = points[*order.last().unwrap()];
        let next = (0..n)
            .filter(|&w| !used[w])
            .min_by(|&a, &b| last.dist(points[a]).total_cmp(&last.dist(points[b])))
            .unwrap();
        used[next] = true;
        order.push(next);
    }
    order
}

/// First-improvement 2-opt until no reversal shortens the tour.
fn two_opt(points: &[Point], order: &mut [usize]) {
    let n = order.len();
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (points[order[i]], points[order[i + 1]]);
                let (c, e) = (points[order[j]], points[order[(j + 1) % n]]);
                let delta = a.dist(c) + b.dist(e) - a.dist(b) - c.dist(e);
                if delta < -1e-12 {
                    order[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

fn shake(order: &[usize], k: usize, rng: &mut StreamRng) -> Vec<usize> {
    let n = order.len();
    let mut out = order.to_vec();
    for _ in 0..k {
        let i = 1 + rng.below(n - 1);
        let j = 1 + rng.below(n - 1);
        let (i, j) = (i.min(j), i.max(j));
        out[i..=j].reverse();
    }
    out
}

/// Orders `points` by variable neighbourhood search: nearest-neighbour
/// start, 2-opt descent, shakes of `k` random reversals with `k` cycling
/// through `1..=vns_neighborhood_size`.
pub fn vns_tour(points: &[Point], cfg: &HeuristicConfig) -> Tour {
    let n = points.len();
    if n < 3 {
        return Tour::identity(n.max(1));
    }
    let mut rng = StreamRng::new(cfg.seed);
    let mut best = nearest_neighbor(points);
    two_opt(points, &mut best);
    let mut best_len = tour_length(points, &best);
    let mut attempts = 0;
    'outer: for _ in 0..cfg.vns_iterations {
        let mut k = 1;
        while k <= cfg.vns_neighborhood_size {
            if attempts == cfg.vns_attempts {
                break 'outer;
            }
            attempts += 1;
            let mut candidate = shake(&best, k, &mut rng);
            two_opt(points, &mut candidate);
            let len = tour_length(points, &candidate);
            if len < best_len - 1e-12 {
                best = candidate;
                best_len = len;
                k = 1;
            } else {
                k += 1;
            }
        }
    }
    Tour::new(best).expect("permutation")
}

/// Weber clustering, VNS over the representatives, then the fixed-tour
/// subproblem started at the representatives.
pub fn heuristic_solve(inst: &Instance, cfg: &HeuristicConfig) -> Result<TourSolution, TouringError> {
    cfg.validate()?;
    let cluster = weber_cluster(inst, cfg);
    let tour = vns_tour(&cluster.reps, cfg);
    let warm = WarmStart { entry: cluster.reps.clone(), exit: cluster.reps };
    solve_fixed_tour_from(inst, &tour, &cfg.subproblem, &warm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(x: f64, y: f64, r: f64) -> Element {
        Element::circle(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn symmetric_cross() {
        let inst = Instance::new(
            "t",
            vec![circle(10.0, 0.0, 1.0), circle(-10.0, 0.0, 1.0), circle(0.0, 10.0, 1.0), circle(0.0, -10.0, 1.0)],
        )
        .unwrap();
        let w = weber_cluster(&inst, &HeuristicConfig::default());
        assert!(w.center.norm() < 1e-6);
        assert!(w.reps[0].dist(Point::new(9.0, 0.0)) < 1e-6);
        assert!(w.reps[3].dist(Point::new(0.0, -9.0)) < 1e-6);
        assert!((w.objective - 36.0).abs() < 1e-5);
    }

    #[test]
    fn single_element_and_pair() {
        let one = Instance::new("t", vec![circle(3.0, 4.0, 2.0)]).unwrap();
        let w = weber_cluster(&one, &HeuristicConfig::default());
        assert!(w.objective < 1e-9);
        assert!(one.element(0).contains(w.center, 1e-9));
        let (m, _) = geometric_median(&[Point::new(0.0, 0.0), Point::new(4.0, 0.0)], Point::new(1.0, 0.0), 1e-9, 100);
        assert_eq!(m, Point::new(2.0, 0.0));
    }

    #[test]
    fn median_at_data_point() {
        // The heavy cluster at the origin is the median.
        let pts = [Point::ORIGIN, Point::ORIGIN, Point::ORIGIN, Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let (m, trace) = geometric_median(&pts, Point::new(0.3, 0.3), 1e-12, 1000);
        assert!(m.norm() < 1e-6);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn square_tour() {
        let pts = [Point::new(0.0, 0.0), Point::new(5.0, 5.0), Point::new(5.0, 0.0), Point::new(0.0, 5.0)];
        let t = vns_tour(&pts, &HeuristicConfig::default());
        assert!((tour_length(&pts, t.order()) - 20.0).abs() < 1e-12);
        assert_eq!(vns_tour(&pts[..3], &HeuristicConfig::default()).order(), &[0, 1, 2]);
    }

    #[test]
    fn overlapping_circles_cost_nothing() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 2.0), circle(1.0, 0.0, 2.0), circle(0.0, 1.0, 2.0)]).unwrap();
        let sol = heuristic_solve(&inst, &HeuristicConfig::default()).unwrap();
        assert!(sol.cost <= 1e-4);
    }
}
