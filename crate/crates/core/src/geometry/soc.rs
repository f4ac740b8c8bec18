//! Planar sets cut out by second-order cone rows `‖B x + b‖ ≤ cᵀx + d`.
//!
//! Generic sets have no closed-form projection. Everything here goes through
//! a radial parameterization of the boundary around a precomputed interior
//! point: the boundary radius in a direction is found by bisection, and
//! one-dimensional searches over the angle give projections and support values.

use std::f64::consts::TAU;

use super::point::Point;
use super::GeometryError;

/// One cone row `‖B x + b‖ ≤ cᵀx + d`, with `B` stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocRow {
    pub mat: [[f64; 2]; 2],
    pub offset: Point,
    pub lin: Point,
    pub constant: f64,
}

impl SocRow {
    /// A linear row `cᵀx + d ≥ 0`.
    pub fn halfplane(lin: Point, constant: f64) -> Self {
        Self {
            mat: [[0.0; 2]; 2],
            offset: Point::ORIGIN,
            lin,
            constant,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.mat.iter().flatten().all(|v| *v == 0.0) && self.offset == Point::ORIGIN
    }

    fn affine(&self, p: Point) -> Point {
        Point::new(
            self.mat[0][0] * p.x + self.mat[0][1] * p.y + self.offset.x,
            self.mat[1][0] * p.x + self.mat[1][1] * p.y + self.offset.y,
        )
    }

    /// Row violation `‖B x + b‖ − cᵀx − d`; non-positive inside.
    pub fn violation(&self, p: Point) -> f64 {
        self.affine(p).norm() - self.lin.dot(p) - self.constant
    }

    fn subgradient(&self, p: Point) -> Point {
        let a = self.affine(p);
        let n = a.norm();
        let lin = -self.lin;
        if n == 0.0 {
            return lin;
        }
        let u = a / n;
        Point::new(
            self.mat[0][0] * u.x + self.mat[1][0] * u.y,
            self.mat[0][1] * u.x + self.mat[1][1] * u.y,
        ) + lin
    }
}

/// A bounded intersection of cone rows with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub struct SocSet {
    rows: Vec<SocRow>,
    interior: Point,
    /// Upper bound on the distance from `interior` to any point of the set.
    reach: f64,
}

const RAY_BISECTIONS: usize = 64;
const ANGLE_SAMPLES: usize = 256;
const GOLDEN_STEPS: usize = 90;

impl SocSet {
    pub fn new(rows: Vec<SocRow>) -> Result<Self, GeometryError> {
        if rows.is_empty() {
            return Err(GeometryError::InvalidElement("cone set needs at least one row".into()));
        }
        let interior = find_interior(&rows)
            .ok_or_else(|| GeometryError::InvalidElement("cone set has empty interior".into()))?;
        let mut set = SocSet {
            rows,
            interior,
            reach: 0.0,
        };
        let mut reach: f64 = 0.0;
        for k in 0..64 {
            let dir = Point::from_polar(1.0, TAU * k as f64 / 64.0);
            let r = set
                .ray_radius(dir, 1e9)
                .ok_or_else(|| GeometryError::InvalidElement("cone set is unbounded".into()))?;
            reach = reach.max(r);
        }
        // The sampled directions can under-estimate the reach between samples;
        // the support search below refines the bounding box.
        set.reach = reach * 1.5 + 1e-9;
        let (lo, hi) = set.bounding_box();
        set.reach = lo.dist(interior).max(hi.dist(interior)).max(
            Point::new(lo.x, hi.y).dist(interior).max(Point::new(hi.x, lo.y).dist(interior)),
        ) * (1.0 + 1e-9);
        Ok(set)
    }

    pub fn rows(&self) -> &[SocRow] {
        &self.rows
    }

    pub fn interior_point(&self) -> Point {
        self.interior
    }

    pub fn max_violation(&self, p: Point) -> f64 {
        self.rows
            .iter()
            .map(|r| r.violation(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains_exact(&self, p: Point, slack: f64) -> bool {
        self.max_violation(p) <= slack
    }

    /// Largest `r` such that `interior + r·dir` is in the set (dir is a unit vector).
    fn ray_radius(&self, dir: Point, cap: f64) -> Option<f64> {
        let mut hi = 1.0;
        while self.contains_exact(self.interior + dir * hi, 0.0) {
            hi *= 2.0;
            if hi > cap {
                return None;
            }
        }
        let mut lo = 0.0;
        for _ in 0..RAY_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if self.contains_exact(self.interior + dir * mid, 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// Boundary point in the direction of `angle` from the interior point.
    pub fn boundary_at(&self, angle: f64) -> Point {
        let dir = Point::from_polar(1.0, angle);
        let r = self.ray_radius(dir, 2.0 * self.reach.max(1.0) + 1e9).unwrap_or(0.0);
        self.interior + dir * r
    }

    /// Minimizes `f` over boundary angles: coarse sampling, then bisection on
    /// the sign of the derivative along the boundary (`grad` is the gradient
    /// of `f`), with golden section as fallback.
    fn minimize_on_boundary(
        &self,
        hint: Option<f64>,
        f: impl Fn(Point) -> f64,
        grad: impl Fn(Point) -> Point,
    ) -> Point {
        let step = TAU / ANGLE_SAMPLES as f64;
        let mut best_angle = 0.0;
        let mut best_val = f64::INFINITY;
        let mut consider = |angle: f64| {
            let v = f(self.boundary_at(angle));
            if v < best_val {
                best_val = v;
                best_angle = angle;
            }
        };
        for k in 0..ANGLE_SAMPLES {
            consider(step * k as f64);
        }
        if let Some(h) = hint {
            consider(h);
        }
        let slope = |t: f64| {
            let h = 1e-6;
            let tangent = self.boundary_at(t + h) - self.boundary_at(t - h);
            grad(self.boundary_at(t)).dot(tangent)
        };
        let (mut a, mut b) = (best_angle - step, best_angle + step);
        let start = self.boundary_at(best_angle);
        if slope(a) < 0.0 && slope(b) > 0.0 {
            for _ in 0..RAY_BISECTIONS {
                let mid = 0.5 * (a + b);
                if slope(mid) < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
        } else {
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            let mut fc = f(self.boundary_at(c));
            let mut fd = f(self.boundary_at(d));
            for _ in 0..GOLDEN_STEPS {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = f(self.boundary_at(c));
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = f(self.boundary_at(d));
                }
            }
        }
        let mid = self.boundary_at(0.5 * (a + b));
        if f(mid) <= f(start) {
            mid
        } else {
            start
        }
    }

    pub fn project(&self, p: Point) -> Point {
        if self.contains_exact(p, 0.0) {
            return p;
        }
        let d = p - self.interior;
        let hint = d.y.atan2(d.x);
        self.minimize_on_boundary(Some(hint), |q| q.dist(p), |q| q - p)
    }

    /// A minimizer of `⟨g, x⟩` over the set.
    pub fn support_min(&self, g: Point) -> Point {
        if g.norm() == 0.0 {
            return self.interior;
        }
        let hint = (-g.y).atan2(-g.x);
        self.minimize_on_boundary(Some(hint), |q| g.dot(q), |_| g)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let xs = self.support_min(Point::new(1.0, 0.0)).x;
        let xl = self.support_min(Point::new(-1.0, 0.0)).x;
        let ys = self.support_min(Point::new(0.0, 1.0)).y;
        let yl = self.support_min(Point::new(0.0, -1.0)).y;
        (Point::new(xs, ys), Point::new(xl, yl))
    }

    /// Radius of a disk around the interior point that contains the set.
    pub fn reach(&self) -> f64 {
        self.reach
    }
}

/// Minimizes `max_i violation_i` with a central-cut ellipsoid method and
/// returns the best point if it is strictly interior.
fn find_interior(rows: &[SocRow]) -> Option<Point> {
    let h = |p: Point| {
        rows.iter()
            .map(|r| r.violation(p))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut x = Point::ORIGIN;
    let r0 = 1e6;
    // Shape matrix P (symmetric 2x2) as (p11, p12, p22).
    let (mut p11, mut p12, mut p22) = (r0 * r0, 0.0, r0 * r0);
    let mut best = x;
    let mut best_val = h(x);
    for _ in 0..1500 {
        let (idx, val) = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.violation(x)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if val < best_val {
            best_val = val;
            best = x;
        }
        let g = rows[idx].subgradient(x);
        let pg = Point::new(p11 * g.x + p12 * g.y, p12 * g.x + p22 * g.y);
        let gpg = g.dot(pg);
        if gpg <= 1e-300 {
            break;
        }
        let s = gpg.sqrt();
        x = x - pg / (3.0 * s);
        let f = 4.0 / 3.0;
        let k = 2.0 / 3.0 / gpg;
        p11 = f * (p11 - k * pg.x * pg.x);
        p12 = f * (p12 - k * pg.x * pg.y);
        p22 = f * (p22 - k * pg.y * pg.y);
    }
    let v = h(x);
    if v < best_val {
        best_val = v;
        best = x;
    }
    (best_val < 0.0).then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(c: Point, r: f64) -> SocSet {
        SocSet::new(vec![SocRow {
            mat: [[1.0 / r, 0.0], [0.0, 1.0 / r]],
            offset: -c / r,
            lin: Point::ORIGIN,
            constant: 1.0,
        }])
        .unwrap()
    }

    #[test]
    fn generic_projection_matches_disk() {
        let s = disk(Point::new(3.0, -1.0), 2.0);
        let p = s.project(Point::new(10.0, 5.0));
        let d = Point::new(7.0, 6.0);
        let expect = Point::new(3.0, -1.0) + d / d.norm() * 2.0;
        assert!(p.dist(expect) < 1e-9, "{p:?} vs {expect:?}");
    }

    #[test]
    fn support_of_square() {
        let rows = vec![
            SocRow::halfplane(Point::new(1.0, 0.0), 0.0),
            SocRow::halfplane(Point::new(-1.0, 0.0), 1.0),
            SocRow::halfplane(Point::new(0.0, 1.0), 0.0),
            SocRow::halfplane(Point::new(0.0, -1.0), 1.0),
        ];
        let s = SocSet::new(rows).unwrap();
        let m = s.support_min(Point::new(1.0, 1.0));
        assert!(m.norm() < 1e-9);
        let (lo, hi) = s.bounding_box();
        assert!(lo.norm() < 1e-9 && hi.dist(Point::new(1.0, 1.0)) < 1e-9);
    }

    #[test]
    fn empty_and_unbounded_sets_rejected() {
        let empty = vec![
            SocRow::halfplane(Point::new(1.0, 0.0), -1.0),
            SocRow::halfplane(Point::new(-1.0, 0.0), 0.0),
        ];
        assert!(SocSet::new(empty).is_err());
        let strip = vec![
            SocRow::halfplane(Point::new(0.0, 1.0), 0.0),
            SocRow::halfplane(Point::new(0.0, -1.0), 1.0),
        ];
        assert!(SocSet::new(strip).is_err());
    }
}
