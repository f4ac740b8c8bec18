use std::f64::consts::TAU;

use super::point::{Point, Segment};
use super::soc::{SocRow, SocSet};

/// A compact convex planar set with projection and linear-minimization oracles.
///
/// `Polygon` holds counter-clockwise vertices and may be degenerate (one or
/// two vertices, or collinear points already reduced by [`convex_hull`]); the
/// element layer only hands out proper polygons but the solver also builds
/// hulls of chains and parameter boxes with it.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexShape {
    Disk { center: Point, radius: f64 },
    Ellipse { center: Point, semi_axes: (f64, f64), rotation: f64 },
    Polygon(Vec<Point>),
    Soc(SocSet),
}

const ELLIPSE_NEWTON_TOL: f64 = 1e-12;
const ELLIPSE_NEWTON_ITERS: usize = 100;

impl ConvexShape {
    /// A point inside the set (the center for conics).
    pub fn anchor(&self) -> Point {
        match self {
            ConvexShape::Disk { center, .. } | ConvexShape::Ellipse { center, .. } => *center,
            ConvexShape::Polygon(v) => v.iter().fold(Point::ORIGIN, |acc, p| acc + *p) / v.len() as f64,
            ConvexShape::Soc(s) => s.interior_point(),
        }
    }

    /// Radius of a disk centered at [`anchor`](Self::anchor) containing the set.
    pub fn enclosing_radius(&self) -> f64 {
        match self {
            ConvexShape::Disk { radius, .. } => *radius,
            ConvexShape::Ellipse { semi_axes, .. } => semi_axes.0.max(semi_axes.1),
            ConvexShape::Polygon(v) => {
                let c = self.anchor();
                v.iter().map(|p| p.dist(c)).fold(0.0, f64::max)
            }
            ConvexShape::Soc(s) => s.reach(),
        }
    }

    pub fn project(&self, p: Point) -> Point {
        match self {
            ConvexShape::Disk { center, radius } => {
                let d = p - *center;
                let n = d.norm();
                if n <= *radius {
                    p
                } else {
                    *center + d * (*radius / n)
                }
            }
            ConvexShape::Ellipse { center, semi_axes, rotation } => {
                let q = (p - *center).rotate(-rotation);
                project_axis_ellipse(semi_axes.0, semi_axes.1, q).rotate(*rotation) + *center
            }
            ConvexShape::Polygon(v) => project_polygon(v, p),
            ConvexShape::Soc(s) => s.project(p),
        }
    }

    /// Euclidean distance-based membership.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        match self {
            ConvexShape::Disk { center, radius } => p.dist(*center) <= radius + tol,
            _ => self.project(p).dist(p) <= tol,
        }
    }

    /// A minimizer of `⟨g, x⟩` over the set.
    pub fn support_min(&self, g: Point) -> Point {
        match self {
            ConvexShape::Disk { center, radius } => match g.normalized() {
                Some(u) => *center - u * *radius,
                None => *center,
            },
            ConvexShape::Ellipse { center, semi_axes, rotation } => {
                let gl = g.rotate(-rotation);
                let (a, b) = *semi_axes;
                let s = Point::new(a * gl.x, b * gl.y);
                let n = s.norm();
                if n == 0.0 {
                    return *center;
                }
                Point::new(-a * s.x / n, -b * s.y / n).rotate(*rotation) + *center
            }
            ConvexShape::Polygon(v) => {
                let mut best = v[0];
                for p in &v[1..] {
                    if g.dot(*p) < g.dot(best) {
                        best = *p;
                    }
                }
                best
            }
            ConvexShape::Soc(s) => s.support_min(g),
        }
    }

    pub fn support_value(&self, g: Point) -> f64 {
        g.dot(self.support_min(g))
    }

    /// Distance from `p` to the boundary of the set (for `p` inside or outside).
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let outside = self.project(p).dist(p);
        if outside > 0.0 {
            return outside;
        }
        match self {
            ConvexShape::Disk { center, radius } => radius - p.dist(*center),
            ConvexShape::Polygon(v) => polygon_edges(v)
                .map(|s| s.dist_to_point(p))
                .fold(f64::INFINITY, f64::min),
            ConvexShape::Ellipse { center, semi_axes, rotation } => {
                let (a, b) = *semi_axes;
                let q = (p - *center).rotate(-rotation);
                min_over_angle(|t| Point::new(a * t.cos(), b * t.sin()).dist(q))
            }
            ConvexShape::Soc(s) => min_over_angle(|t| s.boundary_at(t).dist(p)),
        }
    }

    /// Equivalent cone-row description.
    pub fn to_soc_rows(&self) -> Vec<SocRow> {
        match self {
            ConvexShape::Disk { center, radius } => vec![SocRow {
                mat: [[1.0 / radius, 0.0], [0.0, 1.0 / radius]],
                offset: -*center / *radius,
                lin: Point::ORIGIN,
                constant: 1.0,
            }],
            ConvexShape::Ellipse { center, semi_axes, rotation } => {
                // ‖diag(1/a, 1/b) Rᵀ (x − c)‖ ≤ 1
                let (s, c) = rotation.sin_cos();
                let (a, b) = *semi_axes;
                let mat = [[c / a, s / a], [-s / b, c / b]];
                let offset = Point::new(
                    -(mat[0][0] * center.x + mat[0][1] * center.y),
                    -(mat[1][0] * center.x + mat[1][1] * center.y),
                );
                vec![SocRow { mat, offset, lin: Point::ORIGIN, constant: 1.0 }]
            }
            ConvexShape::Polygon(v) => polygon_edges(v)
                .map(|e| {
                    let n = (e.b - e.a).perp();
                    let n = n / n.norm();
                    SocRow::halfplane(n, -n.dot(e.a))
                })
                .collect(),
            ConvexShape::Soc(s) => s.rows().to_vec(),
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let xs = self.support_min(Point::new(1.0, 0.0)).x;
        let xl = self.support_min(Point::new(-1.0, 0.0)).x;
        let ys = self.support_min(Point::new(0.0, 1.0)).y;
        let yl = self.support_min(Point::new(0.0, -1.0)).y;
        (Point::new(xs, ys), Point::new(xl, yl))
    }
}

fn min_over_angle(f: impl Fn(f64) -> f64) -> f64 {
    let n = 720;
    let step = TAU / n as f64;
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for k in 0..n {
        let t = step * k as f64;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    for _ in 0..80 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    best.min(f(0.5 * (a + b)))
}

/// Projection onto the axis-aligned ellipse `(x/a)² + (y/b)² ≤ 1`.
///
/// Newton on the multiplier `t ≥ 0` of the stationarity condition
/// `q_i = a_i² p_i / (t + a_i²)`, with a bisection fallback.
fn project_axis_ellipse(a: f64, b: f64, p: Point) -> Point {
    if (p.x / a).powi(2) + (p.y / b).powi(2) <= 1.0 {
        return p;
    }
    let (x, y) = (p.x.abs(), p.y.abs());
    let (a2, b2) = (a * a, b * b);
    let f = |t: f64| (a * x / (t + a2)).powi(2) + (b * y / (t + b2)).powi(2) - 1.0;
    let df = |t: f64| -2.0 * a2 * x * x / (t + a2).powi(3) - 2.0 * b2 * y * y / (t + b2).powi(3);
    let mut t = 0.0;
    let mut converged = false;
    for _ in 0..ELLIPSE_NEWTON_ITERS {
        let step = f(t) / df(t);
        let next = t - step;
        if !next.is_finite() || next < 0.0 {
            break;
        }
        if (next - t).abs() <= ELLIPSE_NEWTON_TOL * (1.0 + next) {
            t = next;
            converged = true;
            break;
        }
        t = next;
    }
    if !converged {
        let mut lo = 0.0;
        let mut hi = 2.0 * a.max(b) * (x + y) + a2 + b2;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t = 0.5 * (lo + hi);
    }
    let q = Point::new(a2 * x / (t + a2), b2 * y / (t + b2));
    Point::new(q.x.copysign(p.x), q.y.copysign(p.y))
}

pub(crate) fn polygon_edges(v: &[Point]) -> impl Iterator<Item = Segment> + '_ {
    let n = v.len();
    let count = match n {
        0 | 1 => 0,
        2 => 1,
        _ => n,
    };
    (0..count).map(move |i| Segment::new(v[i], v[(i + 1) % n]))
}

pub(crate) fn polygon_contains_exact(v: &[Point], p: Point) -> bool {
    v.len() >= 3 && polygon_edges(v).all(|e| (e.b - e.a).cross(p - e.a) >= 0.0)
}

fn project_polygon(v: &[Point], p: Point) -> Point {
    if v.len() == 1 {
        return v[0];
    }
    if polygon_contains_exact(v, p) {
        return p;
    }
    let mut best = v[0];
    let mut best_d = f64::INFINITY;
    for e in polygon_edges(v) {
        let q = e.project(p);
        let d = q.dist(p);
        if d < best_d {
            best_d = d;
            best = q;
        }
    }
    best
}

/// Convex hull in counter-clockwise order without collinear points.
/// Degenerate inputs give one or two points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.dist(*b) <= 1e-12);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Clips a convex polygon with the halfplane `⟨n, x⟩ ≥ h`.
pub fn clip_halfplane(poly: &[Point], n: Point, h: f64) -> Vec<Point> {
    let mut out = Vec::new();
    let k = poly.len();
    for i in 0..k {
        let p = poly[i];
        let q = poly[(i + 1) % k];
        let sp = n.dot(p) - h;
        let sq = n.dot(q) - h;
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        }
    }
    convex_hull(&out)
}
