//! Convex sum-of-norms minimization over a product of simple sets:
//!
//! ```text
//! minimize  Σ_t w_t ‖g_t + Σ_c A_tc z_c‖    subject to  z_c ∈ S_c
//! ```
//!
//! Every coordinate block `z_c` is either a planar point in a convex shape or
//! a weight vector on a simplex. The solver runs block-coordinate descent,
//! prices the result against the Lagrangian dual, and falls back to a
//! diagonally preconditioned primal-dual (Chambolle-Pock) method when the
//! duality gap is too large.

use crate::geometry::{ConvexShape, Point};

/// Squared smoothing of the norm used by the gradient steps only.
const SMOOTHING_SQ: f64 = 1e-18;
const INNER_ITERS: usize = 60;
const GAP_CHECK_EVERY: usize = 25;

#[derive(Debug, Clone)]
pub(crate) enum CoordSet {
    Shape(ConvexShape),
    Simplex(usize),
}

impl CoordSet {
    pub fn dim(&self) -> usize {
        match self {
            CoordSet::Shape(_) => 2,
            CoordSet::Simplex(k) => *k,
        }
    }

    fn project(&self, z: &mut [f64]) {
        match self {
            CoordSet::Shape(s) => {
                let p = s.project(Point::new(z[0], z[1]));
                z[0] = p.x;
                z[1] = p.y;
            }
            CoordSet::Simplex(_) => project_simplex(z),
        }
    }

    fn support_min_value(&self, g: &[f64]) -> f64 {
        match self {
            CoordSet::Shape(s) => s.support_value(Point::new(g[0], g[1])),
            CoordSet::Simplex(_) => g.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_simplex(z: &mut [f64]) {
    let mut u: Vec<f64> = z.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for zi in z.iter_mut() {
        *zi = (*zi - theta).max(0.0);
    }
}

/// One coordinate block's contribution to a term: `Σ_j cols[j]·z_c[j]`.
#[derive(Debug, Clone)]
pub(crate) struct Part {
    pub coord: usize,
    pub cols: Vec<Point>,
}

#[derive(Debug, Clone)]
pub(crate) struct Term {
    pub weight: f64,
    pub constant: Point,
    pub parts: Vec<Part>,
}

#[derive(Debug, Clone)]
pub(crate) struct ConvexProblem {
    sets: Vec<CoordSet>,
    offsets: Vec<usize>,
    dim: usize,
    terms: Vec<Term>,
    /// For each coordinate: `(term, part)` positions touching it.
    incidence: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SolverSettings {
    pub tol: f64,
    pub max_sweeps: usize,
    pub pdhg_iterations: usize,
}

/// Result of [`ConvexProblem::solve`].
#[derive(Debug, Clone)]
pub(crate) struct ConvexOutcome {
    pub z: Vec<f64>,
    pub cost: f64,
    pub lower_bound: f64,
    /// Cost after each descent sweep, one list per descent run.
    pub sweeps: Vec<Vec<f64>>,
    pub pdhg_iterations: usize,
}

impl ConvexOutcome {
    pub fn certified(&self, tol: f64) -> bool {
        self.cost - self.lower_bound <= tol * (1.0 + self.cost.abs())
    }
}

impl ConvexProblem {
    pub fn new(sets: Vec<CoordSet>, terms: Vec<Term>) -> Self {
        let mut offsets = Vec::with_capacity(sets.len());
        let mut dim = 0;
        for s in &sets {
            offsets.push(dim);
            dim += s.dim();
        }
        let mut incidence = vec![Vec::new(); sets.len()];
        for (t, term) in terms.iter().enumerate() {
            for (p, part) in term.parts.iter().enumerate() {
                debug_assert_eq!(part.cols.len(), sets[part.coord].dim());
                incidence[part.coord].push((t, p));
            }
        }
        Self { sets, offsets, dim, terms, incidence }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, c: usize) -> usize {
        self.offsets[c]
    }

    fn slice<'a>(&self, z: &'a [f64], c: usize) -> &'a [f64] {
        &z[self.offsets[c]..self.offsets[c] + self.sets[c].dim()]
    }

    fn part_value(part: &Part, zc: &[f64]) -> Point {
        part.cols
            .iter()
            .zip(zc)
            .fold(Point::ORIGIN, |acc, (col, v)| acc + *col * *v)
    }

    pub fn residual(&self, t: usize, z: &[f64]) -> Point {
        let term = &self.terms[t];
        term.parts
            .iter()
            .fold(term.constant, |acc, part| acc + Self::part_value(part, self.slice(z, part.coord)))
    }

    pub fn cost(&self, z: &[f64]) -> f64 {
        (0..self.terms.len())
            .map(|t| self.terms[t].weight * self.residual(t, z).norm())
            .sum()
    }

    /// Projects every block of `z` onto its set.
    pub fn make_feasible(&self, z: &mut [f64]) {
        for c in 0..self.sets.len() {
            let (o, d) = (self.offsets[c], self.sets[c].dim());
            self.sets[c].project(&mut z[o..o + d]);
        }
    }

    /// `Kᵀy`, laid out like `z`.
    fn adjoint(&self, y: &[Point]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (term, yt) in self.terms.iter().zip(y) {
            for part in &term.parts {
                let o = self.offsets[part.coord];
                for (j, col) in part.cols.iter().enumerate() {
                    g[o + j] += yt.dot(*col);
                }
            }
        }
        g
    }

    /// Lagrangian dual value of a multiplier set with `‖y_t‖ ≤ w_t`; a lower
    /// bound on the optimal cost.
    pub fn dual_value(&self, y: &[Point]) -> f64 {
        let g = self.adjoint(y);
        let linear: f64 = self.terms.iter().zip(y).map(|(t, yt)| yt.dot(t.constant)).sum();
        linear
            + (0..self.sets.len())
                .map(|c| self.sets[c].support_min_value(self.slice(&g, c)))
                .sum::<f64>()
    }

    /// Multipliers aligned with the current residuals.
    pub fn aligned_multipliers(&self, z: &[f64]) -> Vec<Point> {
        (0..self.terms.len())
            .map(|t| {
                let r = self.residual(t, z);
                let n = r.norm();
                if n > 0.0 {
                    r * (self.terms[t].weight / n)
                } else {
                    Point::ORIGIN
                }
            })
            .collect()
    }

    /// Minimizes over block `c` with the others fixed; returns whether `z` changed.
    fn block_minimize(&self, c: usize, z: &mut [f64], step: &mut f64) -> bool {
        let (o, d) = (self.offsets[c], self.sets[c].dim());
        let touching = &self.incidence[c];
        if touching.is_empty() {
            return false;
        }
        // Residual of each touching term without block c.
        let rest: Vec<Point> = touching
            .iter()
            .map(|&(t, p)| self.residual(t, z) - Self::part_value(&self.terms[t].parts[p], &z[o..o + d]))
            .collect();
        let eval = |u: &[f64], smooth: bool| -> f64 {
            touching
                .iter()
                .zip(&rest)
                .map(|(&(t, p), r)| {
                    let v = *r + Self::part_value(&self.terms[t].parts[p], u);
                    let n2 = v.norm_sq() + if smooth { SMOOTHING_SQ } else { 0.0 };
                    self.terms[t].weight * n2.sqrt()
                })
                .sum()
        };
        let grad = |u: &[f64]| -> Vec<f64> {
            let mut g = vec![0.0; d];
            for (&(t, p), r) in touching.iter().zip(&rest) {
                let part = &self.terms[t].parts[p];
                let v = *r + Self::part_value(part, u);
                let s = self.terms[t].weight / (v.norm_sq() + SMOOTHING_SQ).sqrt();
                for (j, col) in part.cols.iter().enumerate() {
                    g[j] += s * v.dot(*col);
                }
            }
            g
        };
        let start: Vec<f64> = z[o..o + d].to_vec();
        let start_cost = eval(&start, false);
        let mut u = start.clone();
        let mut s = step.clamp(1e-12, 1e6);
        for _ in 0..INNER_ITERS {
            let g = grad(&u);
            let f0 = eval(&u, true);
            let mut accepted = None;
            while s > 1e-16 {
                let mut cand: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - s * b).collect();
                self.sets[c].project(&mut cand);
                let diff: Vec<f64> = cand.iter().zip(&u).map(|(a, b)| a - b).collect();
                let lin: f64 = diff.iter().zip(&g).map(|(a, b)| a * b).sum();
                let sq: f64 = diff.iter().map(|a| a * a).sum();
                if eval(&cand, true) <= f0 + lin + sq / (2.0 * s) + 1e-15 * f0.abs() {
                    accepted = Some((cand, sq.sqrt()));
                    break;
                }
                s *= 0.5;
            }
            let Some((cand, moved)) = accepted else { break };
            let scale = 1.0 + u.iter().map(|a| a.abs()).fold(0.0, f64::max);
            u = cand;
            if moved <= 1e-13 * scale {
                break;
            }
            s *= 2.0;
        }
        *step = s;
        if eval(&u, false) < start_cost {
            z[o..o + d].copy_from_slice(&u);
            true
        } else {
            false
        }
    }

    /// Block-coordinate descent from `z` (feasible). Returns the cost trace,
    /// starting with the initial cost.
    pub fn descend(&self, z: &mut [f64], tol: f64, max_sweeps: usize) -> Vec<f64> {
        let mut trace = vec![self.cost(z)];
        let mut steps = vec![1.0; self.sets.len()];
        let mut before = z.to_vec();
        for _ in 0..max_sweeps {
            let mut changed = false;
            for c in 0..self.sets.len() {
                changed |= self.block_minimize(c, z, &mut steps[c]);
            }
            let mut cost = self.cost(z);
            let prev = *trace.last().unwrap();
            if cost > prev {
                // Block moves are accepted on their local terms; summing all
                // terms again can round up by an ulp.
                z.copy_from_slice(&before);
                cost = prev;
                changed = false;
            }
            debug_assert!(cost <= prev, "descent sweep increased cost: {prev} -> {cost}");
            trace.push(cost);
            if !changed || prev - cost < tol * (1.0 + cost.abs()) {
                break;
            }
            before.copy_from_slice(z);
        }
        trace
    }

    /// Chambolle-Pock iterations warm-started at `(z, y)`. Returns the best
    /// primal point, its cost, the best dual value and the iteration count.
    fn primal_dual(
        &self,
        z: &[f64],
        y: &[Point],
        iterations: usize,
        tol: f64,
        incumbent: f64,
        bound: f64,
    ) -> (Vec<f64>, f64, f64, usize) {
        let mut tau = vec![0.0; self.sets.len()];
        for (c, inc) in self.incidence.iter().enumerate() {
            let d = self.sets[c].dim();
            let mut col_sums = vec![0.0; d];
            for &(t, p) in inc {
                for (j, col) in self.terms[t].parts[p].cols.iter().enumerate() {
                    col_sums[j] += col.x.abs() + col.y.abs();
                }
            }
            let worst = col_sums.iter().copied().fold(0.0, f64::max);
            tau[c] = if worst > 0.0 { 1.0 / worst } else { 0.0 };
        }
        let sigma: Vec<f64> = self
            .terms
            .iter()
            .map(|t| {
                let (mut rx, mut ry) = (0.0, 0.0);
                for part in &t.parts {
                    for col in &part.cols {
                        rx += col.x.abs();
                        ry += col.y.abs();
                    }
                }
                let worst: f64 = f64::max(rx, ry);
                if worst > 0.0 { 1.0 / worst } else { 0.0 }
            })
            .collect();

        let mut x = z.to_vec();
        let mut y = y.to_vec();
        let mut best_x = x.clone();
        let mut best_cost = incumbent;
        let mut best_dual = bound;
        let mut done = 0;
        let mut bar = x.clone();
        for it in 1..=iterations {
            done = it;
            let g = self.adjoint(&y);
            let mut next = x.clone();
            for c in 0..self.sets.len() {
                let (o, d) = (self.offsets[c], self.sets[c].dim());
                for j in o..o + d {
                    next[j] -= tau[c] * g[j];
                }
                self.sets[c].project(&mut next[o..o + d]);
            }
            for j in 0..self.dim {
                bar[j] = 2.0 * next[j] - x[j];
            }
            x = next;
            for (t, yt) in y.iter_mut().enumerate() {
                let w = self.terms[t].weight;
                let cand = *yt + self.residual(t, &bar) * sigma[t];
                let n = cand.norm();
                *yt = if n > w { cand * (w / n) } else { cand };
            }
            if it % GAP_CHECK_EVERY == 0 || it == iterations {
                let cost = self.cost(&x);
                if cost < best_cost {
                    best_cost = cost;
                    best_x.copy_from_slice(&x);
                }
                best_dual = best_dual.max(self.dual_value(&y));
                let aligned = self.dual_value(&self.aligned_multipliers(&x));
                best_dual = best_dual.max(aligned);
                if best_cost - best_dual <= tol * (1.0 + best_cost.abs()) {
                    break;
                }
            }
        }
        (best_x, best_cost, best_dual, done)
    }

    /// Descent, certificate, primal-dual fallback, final descent polish.
    pub fn solve(&self, mut z: Vec<f64>, settings: SolverSettings) -> ConvexOutcome {
        self.make_feasible(&mut z);
        let mut sweeps = vec![self.descend(&mut z, settings.tol * 1e-2, settings.max_sweeps)];
        let mut cost = self.cost(&z);
        let mut lower_bound = self.dual_value(&self.aligned_multipliers(&z)).min(cost);
        let mut pdhg_iterations = 0;
        if cost - lower_bound > settings.tol * (1.0 + cost.abs()) && settings.pdhg_iterations > 0 {
            let y = self.aligned_multipliers(&z);
            let (bx, bc, bd, it) =
                self.primal_dual(&z, &y, settings.pdhg_iterations, settings.tol, cost, lower_bound);
            pdhg_iterations = it;
            lower_bound = lower_bound.max(bd);
            if bc < cost {
                z = bx;
            }
            sweeps.push(self.descend(&mut z, settings.tol * 1e-2, settings.max_sweeps));
            cost = self.cost(&z);
            lower_bound = lower_bound.max(self.dual_value(&self.aligned_multipliers(&z)));
        }
        ConvexOutcome {
            z,
            cost,
            lower_bound: lower_bound.min(cost),
            sweeps,
            pdhg_iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(x: f64, y: f64, r: f64) -> CoordSet {
        CoordSet::Shape(ConvexShape::Disk { center: Point::new(x, y), radius: r })
    }

    fn ident(c: usize, sign: f64) -> Part {
        Part { coord: c, cols: vec![Point::new(sign, 0.0), Point::new(0.0, sign)] }
    }

    fn cycle(sets: Vec<CoordSet>) -> ConvexProblem {
        let n = sets.len();
        let terms = (0..n)
            .map(|k| Term {
                weight: 1.0,
                constant: Point::ORIGIN,
                parts: vec![ident(k, 1.0), ident((k + 1) % n, -1.0)],
            })
            .collect();
        ConvexProblem::new(sets, terms)
    }

    const SETTINGS: SolverSettings = SolverSettings { tol: 1e-9, max_sweeps: 500, pdhg_iterations: 20_000 };

    #[test]
    fn simplex_projection() {
        let mut z = vec![0.5, 0.5, 0.5];
        project_simplex(&mut z);
        assert!(z.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        let mut z = vec![3.0, 0.0];
        project_simplex(&mut z);
        assert_eq!(z, vec![1.0, 0.0]);
    }

    #[test]
    fn two_disks() {
        let p = cycle(vec![disk(0.0, 0.0, 1.0), disk(5.0, 0.0, 1.0)]);
        let out = p.solve(vec![0.0, 0.0, 5.0, 0.0], SETTINGS);
        assert!((out.cost - 6.0).abs() < 1e-8, "{}", out.cost);
        assert!(out.certified(1e-7), "{} {}", out.cost, out.lower_bound);
    }

    #[test]
    fn shared_point_reaches_zero() {
        let sets = vec![disk(1.0, 0.0, 1.0), disk(-1.0, 0.0, 1.0), disk(0.0, 1.0, 1.0)];
        let p = cycle(sets);
        let out = p.solve(vec![2.0, 0.0, -2.0, 0.0, 0.0, 2.0], SETTINGS);
        assert!(out.cost < 1e-6, "{}", out.cost);
        assert!(out.lower_bound <= out.cost);
    }

    #[test]
    fn descent_is_monotone() {
        let sets = vec![disk(0.0, 0.0, 1.0), disk(10.0, 0.0, 2.0), disk(4.0, 7.0, 1.5), disk(-3.0, 5.0, 1.0)];
        let p = cycle(sets);
        let mut z = vec![0.0, 0.0, 10.0, 0.0, 4.0, 7.0, -3.0, 5.0];
        let trace = p.descend(&mut z, 1e-12, 500);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
