use std::ops::{Add, Div, Mul, Neg, Sub};


/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn from_polar(radius: f64, angle: f64) -> Point {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector in the same direction, or `None` for (near) zero vectors.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 1e-300).then(|| self / n)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Closed segment `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Parameter in `[0, 1]` of the point of the segment closest to `p`.
    pub fn closest_param(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm_sq();
        if len2 == 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(d) / len2).clamp(0.0, 1.0)
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    pub fn project(&self, p: Point) -> Point {
        self.at(self.closest_param(p))
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        self.project(p).dist(p)
    }

    /// Closest pair of points between two segments: `(distance, on self, on other)`.
    pub fn closest_pair(&self, other: &Segment) -> (f64, Point, Point) {
        if let Some(x) = self.intersection(other) {
            return (0.0, x, x);
        }
        let candidates = [
            (self.a, other.project(self.a)),
            (self.b, other.project(self.b)),
            (self.project(other.a), other.a),
            (self.project(other.b), other.b),
        ];
        let mut best = (f64::INFINITY, self.a, other.a);
        for (p, q) in candidates {
            let d = p.dist(q);
            if d < best.0 {
                best = (d, p, q);
            }
        }
        best
    }

    /// A common point of two segments, if any.
    pub fn intersection(&self, other: &Segment) -> Option<Point> {
        let r = self.b - self.a;
        let s = other.b - other.a;
        let denom = r.cross(s);
        let qp = other.a - self.a;
        let scale = r.norm().max(s.norm()).max(1.0);
        if denom.abs() <= 1e-14 * scale * scale {
            // Parallel: touching only if collinear and overlapping.
            if qp.cross(r).abs() > 1e-12 * scale * scale {
                return None;
            }
            for p in [other.a, other.b] {
                if self.dist_to_point(p) <= 1e-12 * scale {
                    return Some(p);
                }
            }
            for p in [self.a, self.b] {
                if other.dist_to_point(p) <= 1e-12 * scale {
                    return Some(p);
                }
            }
            return None;
        }
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            Some(self.at(t))
        } else {
            None
        }
    }
}
