use std::f64::consts::TAU;

use super::point::{Point, Segment};
use super::shape::{polygon_contains_exact, polygon_edges, ConvexShape};
use super::soc::SocSet;
use super::GeometryError;

/// Iteration cap for alternating projections.
const MAX_ALTERNATIONS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Circle { center: Point, radius: f64 },
    Ellipse { center: Point, semi_axes: (f64, f64), rotation: f64 },
    /// Counter-clockwise vertices of a convex polygon.
    Polygon { vertices: Vec<Point> },
    Union { members: Vec<SocSet> },
    /// Breakpoints `A¹ … Aⁿ⁺¹` of a polygonal chain with `n` segments.
    Chain { breakpoints: Vec<Point> },
}

/// A target the route must visit.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    kind: ElementKind,
    discount: f64,
    coverage: f64,
}

impl Element {
    pub fn new(kind: ElementKind, discount: f64) -> Result<Self, GeometryError> {
        Self::with_coverage(kind, discount, 0.0)
    }

    /// `coverage` is only meaningful for chains and must be zero otherwise.
    pub fn with_coverage(kind: ElementKind, discount: f64, coverage: f64) -> Result<Self, GeometryError> {
        if !(discount.is_finite() && discount >= 0.0) {
            return Err(GeometryError::InvalidElement(format!("discount must be ≥ 0, got {discount}")));
        }
        if !(0.0..=1.0).contains(&coverage) {
            return Err(GeometryError::InvalidElement(format!("coverage must be in [0, 1], got {coverage}")));
        }
        validate_kind(&kind)?;
        if coverage != 0.0 && !matches!(kind, ElementKind::Chain { .. }) {
            return Err(GeometryError::InvalidElement("coverage only applies to chains".into()));
        }
        Ok(Self { kind, discount, coverage })
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self, GeometryError> {
        Self::new(ElementKind::Circle { center, radius }, 1.0)
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        Self::new(ElementKind::Polygon { vertices }, 1.0)
    }

    pub fn chain(breakpoints: Vec<Point>, coverage: f64) -> Result<Self, GeometryError> {
        Self::with_coverage(ElementKind::Chain { breakpoints }, 1.0, coverage)
    }

    pub fn kind(&self) -> &ElementKind {
        &self.kind
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    pub fn with_discount(mut self, discount: f64) -> Result<Self, GeometryError> {
        if !(discount.is_finite() && discount >= 0.0) {
            return Err(GeometryError::InvalidElement(format!("discount must be ≥ 0, got {discount}")));
        }
        self.discount = discount;
        Ok(self)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ElementKind::Circle { .. } => "circle",
            ElementKind::Ellipse { .. } => "ellipse",
            ElementKind::Polygon { .. } => "polygon",
            ElementKind::Union { .. } => "union",
            ElementKind::Chain { .. } => "chain",
        }
    }

    /// The element as a single convex set, for circles, ellipses and polygons.
    pub fn convex_shape(&self) -> Option<ConvexShape> {
        match &self.kind {
            ElementKind::Circle { center, radius } => Some(ConvexShape::Disk { center: *center, radius: *radius }),
            ElementKind::Ellipse { center, semi_axes, rotation } => Some(ConvexShape::Ellipse {
                center: *center,
                semi_axes: *semi_axes,
                rotation: *rotation,
            }),
            ElementKind::Polygon { vertices } => Some(ConvexShape::Polygon(vertices.clone())),
            _ => None,
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(
            self.kind,
            ElementKind::Circle { .. } | ElementKind::Ellipse { .. } | ElementKind::Polygon { .. }
        )
    }

    pub fn is_chain(&self) -> bool {
        matches!(self.kind, ElementKind::Chain { .. })
    }

    /// Convex pieces whose union is the element.
    pub fn pieces(&self) -> Vec<ConvexShape> {
        match &self.kind {
            ElementKind::Union { members } => members.iter().cloned().map(ConvexShape::Soc).collect(),
            ElementKind::Chain { breakpoints } => breakpoints
                .windows(2)
                .map(|w| ConvexShape::Polygon(vec![w[0], w[1]]))
                .collect(),
            _ => vec![self.convex_shape().expect("convex element")],
        }
    }

    /// A convex set containing the element.
    pub fn convex_relaxation(&self) -> ConvexShape {
        match &self.kind {
            ElementKind::Chain { breakpoints } => ConvexShape::Polygon(super::convex_hull(breakpoints)),
            ElementKind::Union { .. } => {
                let (lo, hi) = self.bounding_box();
                ConvexShape::Polygon(super::convex_hull(&[
                    lo,
                    Point::new(hi.x, lo.y),
                    hi,
                    Point::new(lo.x, hi.y),
                ]))
            }
            _ => self.convex_shape().expect("convex element"),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for piece in self.pieces() {
            let (a, b) = piece.bounding_box();
            lo = Point::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Point::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        (lo, hi)
    }

    /// A representative point of the element.
    pub fn anchor(&self) -> Point {
        match &self.kind {
            ElementKind::Chain { breakpoints } => {
                // Middle of the chain by parameter.
                self.chain_point_at((breakpoints.len() - 1) as f64 / 2.0).unwrap_or(breakpoints[0])
            }
            ElementKind::Union { members } => members[0].interior_point(),
            _ => self.convex_shape().expect("convex element").anchor(),
        }
    }

    pub fn chain_breakpoints(&self) -> Option<&[Point]> {
        match &self.kind {
            ElementKind::Chain { breakpoints } => Some(breakpoints),
            _ => None,
        }
    }

    /// Number of chain segments `n_v` (zero for other kinds).
    pub fn segment_count(&self) -> usize {
        self.chain_breakpoints().map_or(0, |b| b.len() - 1)
    }

    /// True iff `p` is within Euclidean distance `tol` of the element.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        match &self.kind {
            ElementKind::Union { members } => {
                members.iter().any(|m| m.contains_exact(p, 0.0))
                    || members.iter().any(|m| {
                        p.dist(m.interior_point()) <= m.reach() + tol && m.project(p).dist(p) <= tol
                    })
            }
            ElementKind::Circle { center, radius } => p.dist(*center) <= radius + tol,
            _ => self.project(p).dist(p) <= tol,
        }
    }

    /// Nearest point of the element; ties go to the lowest member or segment index.
    pub fn project(&self, p: Point) -> Point {
        match &self.kind {
            ElementKind::Union { .. } | ElementKind::Chain { .. } => {
                let mut best = p;
                let mut best_d = f64::INFINITY;
                for piece in self.pieces() {
                    let q = piece.project(p);
                    let d = q.dist(p);
                    if d < best_d {
                        best_d = d;
                        best = q;
                    }
                }
                best
            }
            _ => self.convex_shape().expect("convex element").project(p),
        }
    }

    /// Point at parameter `lambda ∈ [0, n]` along a chain.
    pub fn chain_point_at(&self, lambda: f64) -> Result<Point, GeometryError> {
        let bp = self
            .chain_breakpoints()
            .ok_or_else(|| GeometryError::Domain("chain_point_at needs a chain".into()))?;
        let n = bp.len() - 1;
        if !(0.0..=n as f64).contains(&lambda) {
            return Err(GeometryError::Domain(format!("lambda {lambda} outside [0, {n}]")));
        }
        let j = ((lambda.floor() as usize) + 1).min(n);
        let gamma = lambda - (j - 1) as f64;
        Ok(bp[j - 1] * (1.0 - gamma) + bp[j] * gamma)
    }

    /// Parameter of the chain point nearest to `p`.
    pub fn chain_param_of(&self, p: Point) -> Option<f64> {
        let bp = self.chain_breakpoints()?;
        let mut best = (f64::INFINITY, 0.0);
        for (j, w) in bp.windows(2).enumerate() {
            let seg = Segment::new(w[0], w[1]);
            let t = seg.closest_param(p);
            let d = seg.at(t).dist(p);
            if d < best.0 {
                best = (d, j as f64 + t);
            }
        }
        Some(best.1)
    }

    /// Distance from `p` to the boundary of a convex element.
    pub fn boundary_distance(&self, p: Point) -> Option<f64> {
        self.convex_shape().map(|s| s.boundary_distance(p))
    }

    /// Polygon vertices or chain breakpoints.
    fn vertices(&self) -> Option<&[Point]> {
        match &self.kind {
            ElementKind::Polygon { vertices } => Some(vertices),
            ElementKind::Chain { breakpoints } => Some(breakpoints),
            _ => None,
        }
    }

    /// Center and radius of a disk containing a rounded element.
    fn enclosing_disk(&self) -> (Point, f64) {
        match &self.kind {
            ElementKind::Circle { center, radius } => (*center, *radius),
            ElementKind::Ellipse { center, semi_axes, .. } => (*center, semi_axes.0.max(semi_axes.1)),
            _ => {
                let (lo, hi) = self.bounding_box();
                let c = (lo + hi) / 2.0;
                (c, lo.dist(hi) / 2.0 * (1.0 + 1e-12))
            }
        }
    }
}

fn validate_kind(kind: &ElementKind) -> Result<(), GeometryError> {
    let bad = |m: String| Err(GeometryError::InvalidElement(m));
    match kind {
        ElementKind::Circle { center, radius } => {
            if !center.is_finite() || !(radius.is_finite() && *radius > 0.0) {
                return bad(format!("circle needs a finite center and radius > 0, got {radius}"));
            }
        }
        ElementKind::Ellipse { center, semi_axes, rotation } => {
            let (a, b) = *semi_axes;
            if !center.is_finite() || !rotation.is_finite() || !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
            {
                return bad("ellipse needs finite center, rotation and positive semi-axes".into());
            }
        }
        ElementKind::Polygon { vertices } => {
            if vertices.len() < 3 {
                return bad("polygon needs ≥ 3 vertices".into());
            }
            if vertices.iter().any(|p| !p.is_finite()) {
                return bad("polygon vertex is not finite".into());
            }
            let n = vertices.len();
            let scale = vertices.iter().map(|p| p.norm()).fold(1.0, f64::max);
            let mut area = 0.0;
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                if (b - a).cross(c - b) < -1e-12 * scale * scale {
                    return bad("polygon must be convex with counter-clockwise vertices".into());
                }
                area += a.cross(b);
            }
            if area <= 1e-12 * scale * scale {
                return bad("polygon vertices are collinear or clockwise".into());
            }
        }
        ElementKind::Union { members } => {
            if members.is_empty() {
                return bad("union needs ≥ 1 member".into());
            }
        }
        ElementKind::Chain { breakpoints } => {
            if breakpoints.len() < 2 {
                return bad("chain needs ≥ 2 breakpoints".into());
            }
            if breakpoints.iter().any(|p| !p.is_finite()) {
                return bad("chain breakpoint is not finite".into());
            }
            if breakpoints.windows(2).any(|w| w[0].dist(w[1]) <= 0.0) {
                return bad("chain segments must have positive length".into());
            }
        }
    }
    Ok(())
}

fn both_polygonal<'a>(a: &'a ConvexShape, b: &'a ConvexShape) -> Option<(&'a [Point], &'a [Point])> {
    match (a, b) {
        (ConvexShape::Polygon(p), ConvexShape::Polygon(q)) => Some((p, q)),
        _ => None,
    }
}

/// Closest points between two convex pieces.
fn piece_distance(a: &ConvexShape, b: &ConvexShape, tol: f64) -> (f64, Point, Point) {
    if let Some((p, q)) = both_polygonal(a, b) {
        for &v in p {
            if polygon_contains_exact(q, v) {
                return (0.0, v, v);
            }
        }
        for &v in q {
            if polygon_contains_exact(p, v) {
                return (0.0, v, v);
            }
        }
        let mut best = (f64::INFINITY, p[0], q[0]);
        let single = |v: &[Point]| -> Vec<Segment> {
            if v.len() == 1 {
                vec![Segment::new(v[0], v[0])]
            } else {
                polygon_edges(v).collect()
            }
        };
        for ea in single(p) {
            for eb in single(q) {
                let c = ea.closest_pair(&eb);
                if c.0 < best.0 {
                    best = c;
                }
            }
        }
        return best;
    }
    let mut pa = a.anchor();
    let mut pb = b.project(pa);
    for _ in 0..MAX_ALTERNATIONS {
        let na = a.project(pb);
        let nb = b.project(na);
        let moved = na.dist(pa).max(nb.dist(pb));
        pa = na;
        pb = nb;
        if moved < tol / 10.0 {
            break;
        }
    }
    (pa.dist(pb), pa, pb)
}

/// Certified lower bound on the distance between two convex pieces, using the
/// direction between a near-closest pair as separating direction.
fn piece_distance_lower_bound(a: &ConvexShape, b: &ConvexShape, tol: f64) -> f64 {
    let (d, pa, pb) = piece_distance(a, b, tol);
    if d == 0.0 {
        return 0.0;
    }
    let u = (pb - pa) / d;
    let min_b = b.support_value(u);
    let max_a = -a.support_value(-u);
    (min_b - max_a).max(0.0)
}

/// Minimum distance between two elements and a pair attaining it (within `tol`).
pub fn min_distance(a: &Element, b: &Element, tol: f64) -> (f64, Point, Point) {
    let mut best = (f64::INFINITY, Point::ORIGIN, Point::ORIGIN);
    for pa in a.pieces() {
        for pb in b.pieces() {
            let c = piece_distance(&pa, &pb, tol);
            if c.0 < best.0 {
                best = c;
            }
        }
    }
    best
}

/// A lower bound on the set distance that is never above the true value.
pub fn distance_lower_bound(a: &Element, b: &Element, tol: f64) -> f64 {
    let mut best = f64::INFINITY;
    for pa in a.pieces() {
        for pb in b.pieces() {
            best = best.min(piece_distance_lower_bound(&pa, &pb, tol));
        }
    }
    best
}

/// Upper bound on `‖x − y‖` over `x ∈ a`, `y ∈ b`.
///
/// Rounded elements (circles, ellipses, unions) are replaced by enclosing
/// disks; vertex-described elements (polygons, chains) use their vertices.
pub fn max_distance_bound(a: &Element, b: &Element) -> f64 {
    match (a.vertices(), b.vertices()) {
        (Some(va), Some(vb)) => va
            .iter()
            .flat_map(|p| vb.iter().map(move |q| p.dist(*q)))
            .fold(0.0, f64::max),
        (None, Some(v)) | (Some(v), None) => {
            let round = if a.vertices().is_none() { a } else { b };
            let (c, r) = round.enclosing_disk();
            v.iter().map(|p| p.dist(c)).fold(0.0, f64::max) + r
        }
        (None, None) => {
            let (ca, ra) = a.enclosing_disk();
            let (cb, rb) = b.enclosing_disk();
            ca.dist(cb) + ra + rb
        }
    }
}

/// Upper bound on the distance between two points of the same element.
pub fn diameter_bound(e: &Element) -> f64 {
    match &e.kind {
        ElementKind::Circle { radius, .. } => 2.0 * radius,
        ElementKind::Ellipse { semi_axes, .. } => 2.0 * semi_axes.0.max(semi_axes.1),
        ElementKind::Polygon { vertices } => vertices
            .iter()
            .flat_map(|p| vertices.iter().map(move |q| p.dist(*q)))
            .fold(0.0, f64::max),
        ElementKind::Chain { breakpoints } => breakpoints.windows(2).map(|w| w[0].dist(w[1])).sum(),
        ElementKind::Union { .. } => 2.0 * e.enclosing_disk().1,
    }
}

fn max_over_angle(f: impl Fn(f64) -> f64) -> f64 {
    let n = 2048;
    let step = TAU / n as f64;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..n {
        let t = step * k as f64;
        let v = f(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    for _ in 0..80 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) > f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    best.max(f(0.5 * (a + b)))
}

/// Parametric boundary `t ↦ point` of a conic element.
fn conic_boundary(shape: &ConvexShape) -> Option<impl Fn(f64) -> Point + '_> {
    let (center, (a, b), rot) = match shape {
        ConvexShape::Disk { center, radius } => (*center, (*radius, *radius), 0.0),
        ConvexShape::Ellipse { center, semi_axes, rotation } => (*center, *semi_axes, *rotation),
        _ => return None,
    };
    Some(move |t: f64| Point::new(a * t.cos(), b * t.sin()).rotate(rot) + center)
}

/// Whether every point of `inner` lies within `tol` of `outer` (convex elements only).
pub fn element_contains_element(outer: &Element, inner: &Element, tol: f64) -> bool {
    let (Some(out), Some(inn)) = (outer.convex_shape(), inner.convex_shape()) else {
        return false;
    };
    match &out {
        ConvexShape::Polygon(_) => out.to_soc_rows().iter().all(|row| {
            // Linear rows: cᵀx + d ≥ 0 with unit c.
            inn.support_value(row.lin) + row.constant >= -tol
        }),
        ConvexShape::Disk { .. } | ConvexShape::Ellipse { .. } => {
            let (center, (a, b), rot) = match out {
                ConvexShape::Disk { center, radius } => (center, (radius, radius), 0.0),
                ConvexShape::Ellipse { center, semi_axes, rotation } => (center, semi_axes, rotation),
                _ => unreachable!(),
            };
            // Map the outer set to the unit disk.
            let to_unit = |p: Point| {
                let q = (p - center).rotate(-rot);
                Point::new(q.x / a, q.y / b)
            };
            let slack = 1.0 + tol / a.max(b);
            let reach = match &inn {
                ConvexShape::Polygon(v) => v.iter().map(|p| to_unit(*p).norm()).fold(0.0, f64::max),
                ConvexShape::Disk { center: c2, radius } if a == b => (c2.dist(center) + radius) / a,
                _ => {
                    let boundary = conic_boundary(&inn).expect("conic");
                    max_over_angle(|t| to_unit(boundary(t)).norm())
                }
            };
            reach <= slack
        }
        ConvexShape::Soc(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, side: f64) -> Element {
        Element::polygon(vec![
            Point::new(x0, y0),
            Point::new(x0 + side, y0),
            Point::new(x0 + side, y0 + side),
            Point::new(x0, y0 + side),
        ])
        .unwrap()
    }

    fn circle(x: f64, y: f64, r: f64) -> Element {
        Element::circle(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(circle(0.0, 0.0, 1.0).contains(Point::new(0.5, 0.0), 0.0));
        let chain = Element::chain(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], 0.0).unwrap();
        assert!(!chain.contains(Point::new(0.5, 0.1), 0.05));
        assert!(square(0.0, 0.0, 1.0).contains(Point::new(1.0, 1.0), 0.0));
    }

    #[test]
    fn project_examples() {
        assert_eq!(circle(0.0, 0.0, 1.0).project(Point::new(2.0, 0.0)), Point::new(1.0, 0.0));
        let chain = Element::chain(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)],
            0.0,
        )
        .unwrap();
        assert_eq!(chain.project(Point::new(2.0, 0.5)), Point::new(1.0, 0.5));
        let e = Element::new(
            ElementKind::Ellipse { center: Point::ORIGIN, semi_axes: (2.0, 1.0), rotation: 0.0 },
            1.0,
        )
        .unwrap();
        assert!(e.project(Point::new(5.0, 0.0)).dist(Point::new(2.0, 0.0)) < 1e-12);
    }

    #[test]
    fn chain_point_at_examples() {
        let c = Element::chain(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)],
            0.0,
        )
        .unwrap();
        assert_eq!(c.chain_point_at(1.5).unwrap(), Point::new(1.0, 0.5));
        assert_eq!(c.chain_point_at(2.0).unwrap(), Point::new(1.0, 1.0));
        assert!(c.chain_point_at(2.5).is_err());
        assert!(c.chain_point_at(-0.1).is_err());
        let single = Element::chain(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], 0.0).unwrap();
        assert_eq!(single.chain_point_at(0.0).unwrap(), Point::new(0.0, 0.0));
        let long = Element::chain(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)], 0.0).unwrap();
        assert_eq!(long.chain_point_at(0.25).unwrap(), Point::new(0.5, 0.0));
    }

    #[test]
    fn min_distance_examples() {
        let (d, pa, pb) = min_distance(&circle(0.0, 0.0, 1.0), &circle(5.0, 0.0, 1.0), 1e-9);
        assert!((d - 3.0).abs() < 1e-9);
        assert!(pa.dist(Point::new(1.0, 0.0)) < 1e-8 && pb.dist(Point::new(4.0, 0.0)) < 1e-8);
        let (d, pa, pb) = min_distance(&circle(0.0, 0.0, 1.0), &circle(1.0, 0.0, 1.0), 1e-9);
        assert!(d < 1e-8);
        assert!(pa.dist(pb) < 1e-8);
    }

    #[test]
    fn max_distance_examples() {
        assert!((max_distance_bound(&circle(0.0, 0.0, 1.0), &circle(5.0, 0.0, 2.0)) - 8.0).abs() < 1e-12);
        let b = max_distance_bound(&square(0.0, 0.0, 1.0), &square(3.0, 0.0, 1.0));
        assert!((b - 17f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter_bound(&circle(0.0, 0.0, 3.0)), 6.0);
        let c = Element::chain(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 2.0)],
            0.0,
        )
        .unwrap();
        assert_eq!(diameter_bound(&c), 3.0);
        assert!((diameter_bound(&square(0.0, 0.0, 1.0)) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn containment_examples() {
        assert!(element_contains_element(&circle(0.0, 0.0, 5.0), &circle(1.0, 0.0, 1.0), 1e-9));
        assert!(!element_contains_element(&circle(0.0, 0.0, 5.0), &circle(5.0, 0.0, 1.0), 1e-9));
        assert!(element_contains_element(&square(0.0, 0.0, 1.0), &square(0.25, 0.25, 0.5), 1e-9));
        assert!(!element_contains_element(&square(0.25, 0.25, 0.5), &square(0.0, 0.0, 1.0), 1e-9));
        let e = Element::new(
            ElementKind::Ellipse { center: Point::ORIGIN, semi_axes: (4.0, 2.0), rotation: 0.3 },
            1.0,
        )
        .unwrap();
        assert!(element_contains_element(&e, &circle(0.0, 0.0, 1.9), 1e-9));
        assert!(!element_contains_element(&e, &circle(0.0, 0.0, 2.1), 1e-9));
        assert!(element_contains_element(&circle(0.0, 0.0, 4.0), &e, 1e-9));
        let chain = Element::chain(vec![Point::new(0.0, 0.0), Point::new(0.1, 0.0)], 0.0).unwrap();
        assert!(!element_contains_element(&circle(0.0, 0.0, 5.0), &chain, 1e-9));
    }

    #[test]
    fn invalid_elements_rejected() {
        assert!(Element::circle(Point::ORIGIN, 0.0).is_err());
        assert!(Element::chain(vec![Point::ORIGIN], 0.0).is_err());
        let cw = vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)];
        assert!(Element::polygon(cw).is_err());
        let flat = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert!(Element::polygon(flat).is_err());
    }
}
