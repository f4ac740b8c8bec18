//! Distance bounds between and within elements, containment preprocessing
//! and post-hoc validators for solved point placements.

use crate::exec;
use crate::geometry::{
    convex_hull, diameter_bound, distance_lower_bound, element_contains_element, max_distance_bound, Element,
    ElementKind, Point,
};
use crate::instance::Instance;

/// Tolerance passed to the distance computations behind `m`.
pub const DISTANCE_TOL: f64 = 1e-7;
/// Slack used by the containment test of the preprocessing.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// Pairwise and per-element distance bounds of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable {
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    diameter: Vec<f64>,
}

impl BoundsTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Lower bound `m` on `‖x − y‖`, `x ∈ v`, `y ∈ w`; zero on the diagonal.
    pub fn lower(&self, v: usize, w: usize) -> f64 {
        self.lower[v * self.n + w]
    }

    /// Upper bound `M` on `‖x − y‖`, `x ∈ v`, `y ∈ w`.
    pub fn upper(&self, v: usize, w: usize) -> f64 {
        self.upper[v * self.n + w]
    }

    /// Upper bound on the distance between two points of `v`.
    pub fn diameter(&self, v: usize) -> f64 {
        self.diameter[v]
    }

    /// The `m` matrix as rows.
    pub fn lower_matrix(&self) -> Vec<Vec<f64>> {
        self.lower.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// The `M` matrix as rows.
    pub fn upper_matrix(&self) -> Vec<Vec<f64>> {
        self.upper.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

/// Computes `m`, `M` for every pair and the diameter bound of every element.
///
/// `m` is the certified separating-direction bound, so it never exceeds the
/// true set distance even when the underlying distance search is inexact.
pub fn compute_bounds(inst: &Instance) -> BoundsTable {
    let n = inst.len();
    let elements = inst.elements();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (v + 1..n).map(move |w| (v, w))).collect();
    let values = exec::map_slice(&pairs, |&(v, w)| {
        let (a, b) = (&elements[v], &elements[w]);
        let m = distance_lower_bound(a, b, DISTANCE_TOL);
        let big = max_distance_bound(a, b);
        (m.min(big), big)
    });
    let mut lower = vec![0.0; n * n];
    let mut upper = vec![0.0; n * n];
    for (&(v, w), &(m, big)) in pairs.iter().zip(&values) {
        lower[v * n + w] = m;
        lower[w * n + v] = m;
        upper[v * n + w] = big;
        upper[w * n + v] = big;
    }
    let diameter: Vec<f64> = exec::map_slice(elements, diameter_bound);
    for v in 0..n {
        upper[v * n + v] = diameter[v];
    }
    BoundsTable { n, lower, upper, diameter }
}

/// Outcome of the containment preprocessing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Original indices of the kept elements, ascending.
    pub kept: Vec<usize>,
    /// `(deleted, witness)` pairs in deletion order; `deleted ⊇ witness`.
    pub deleted: Vec<(usize, usize)>,
}

impl Reduction {
    pub fn identity(n: usize) -> Self {
        Self { kept: (0..n).collect(), deleted: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.deleted.is_empty()
    }
}

/// Whether `outer` (convex, not a chain) contains all of `inner`.
fn covers(outer: &Element, inner: &Element) -> bool {
    if !outer.is_convex() {
        return false;
    }
    match inner.kind() {
        ElementKind::Chain { breakpoints } => breakpoints.iter().all(|p| outer.contains(*p, CONTAINMENT_TOL)),
        ElementKind::Union { .. } => false,
        _ => element_contains_element(outer, inner, CONTAINMENT_TOL),
    }
}

/// Repeatedly deletes an element that contains another remaining element.
///
/// Candidates are scanned in `(container, contained)` index order. When two
/// elements contain each other the higher index is deleted.
pub fn preprocess(inst: &Instance) -> (Instance, Reduction) {
    let n = inst.len();
    let elements = inst.elements();
    let contains: Vec<Vec<bool>> = exec::map_range(n, |i| {
        (0..n).map(|j| i != j && covers(&elements[i], &elements[j])).collect()
    });
    let mut alive = vec![true; n];
    let mut deleted = Vec::new();
    'scan: loop {
        for i in 0..n {
            for j in 0..n {
                if alive[i] && alive[j] && contains[i][j] && (!contains[j][i] || i > j) {
                    alive[i] = false;
                    deleted.push((i, j));
                    continue 'scan;
                }
            }
        }
        break;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    (inst.subset(&kept), Reduction { kept, deleted })
}

/// Elements whose entry and exit may be merged into one point: convex with
/// discount at least 1.
pub fn collapse_entry_exit(inst: &Instance) -> Vec<bool> {
    inst.elements()
        .iter()
        .map(|e| e.is_convex() && e.discount() >= 1.0)
        .collect()
}

/// Whether the elements are pairwise at positive distance (by the `m` bound).
pub fn pairwise_disjoint(bounds: &BoundsTable) -> bool {
    let n = bounds.len();
    (0..n).all(|v| (v + 1..n).all(|w| bounds.lower(v, w) > 0.0))
}

/// Points `(element, point)` lying farther than `tol` from their element's
/// boundary. Only convex elements with discount at least 1 are checked.
pub fn boundary_violations(inst: &Instance, points: &[(usize, Point)], tol: f64) -> Vec<(usize, f64)> {
    points
        .iter()
        .filter_map(|&(v, p)| {
            let e = inst.element(v);
            if !(e.is_convex() && e.discount() >= 1.0) {
                return None;
            }
            let d = e.boundary_distance(p)?;
            (d > tol).then_some((v, d))
        })
        .collect()
}

/// For all-circle instances: points farther than `tol` outside the convex
/// hull of the circle centers.
pub fn hull_violations(inst: &Instance, points: &[(usize, Point)], tol: f64) -> Vec<(usize, f64)> {
    let centers: Option<Vec<Point>> = inst
        .elements()
        .iter()
        .map(|e| match e.kind() {
            ElementKind::Circle { center, .. } => Some(*center),
            _ => None,
        })
        .collect();
    let Some(centers) = centers else { return Vec::new() };
    let hull = convex_hull(&centers);
    let outside = |p: Point| -> f64 {
        match hull.len() {
            0 => 0.0,
            1 => p.dist(hull[0]),
            _ => {
                let inside = hull.len() >= 3
                    && (0..hull.len()).all(|i| (hull[(i + 1) % hull.len()] - hull[i]).cross(p - hull[i]) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..hull.len())
                        .map(|i| crate::geometry::Segment::new(hull[i], hull[(i + 1) % hull.len()]).dist_to_point(p))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    };
    points
        .iter()
        .filter_map(|&(v, p)| {
            let d = outside(p);
            (d > tol).then_some((v, d))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(x: f64, y: f64, r: f64) -> Element {
        Element::circle(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn two_circles() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0)]).unwrap();
        let b = compute_bounds(&inst);
        assert!((b.lower(0, 1) - 3.0).abs() < 1e-7);
        assert!((b.upper(1, 0) - 7.0).abs() < 1e-12);
        assert_eq!(b.diameter(0), 2.0);
        assert_eq!(b.diameter(1), 2.0);
        assert!(pairwise_disjoint(&b));
    }

    #[test]
    fn overlapping_squares() {
        let sq = Element::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let inst = Instance::new("t", vec![sq.clone(), sq]).unwrap();
        assert_eq!(compute_bounds(&inst).lower(0, 1), 0.0);
    }

    #[test]
    fn superset_deleted() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(0.0, 0.0, 5.0)]).unwrap();
        let (reduced, red) = preprocess(&inst);
        assert_eq!(red.kept, vec![0]);
        assert_eq!(red.deleted, vec![(1, 0)]);
        assert_eq!(reduced.len(), 1);
    }

    #[test]
    fn disjoint_identity_and_nested_triple() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0)]).unwrap();
        assert!(preprocess(&inst).1.is_identity());
        let nested = Instance::new(
            "t",
            vec![circle(0.0, 0.0, 3.0), circle(0.0, 0.0, 2.0), circle(0.0, 0.0, 1.0)],
        )
        .unwrap();
        let (reduced, red) = preprocess(&nested);
        assert_eq!(red.kept, vec![2]);
        assert_eq!(reduced.len(), 1);
        assert!(preprocess(&reduced).1.is_identity());
    }

    #[test]
    fn equal_sets_keep_lower_index() {
        let inst = Instance::new("t", vec![circle(1.0, 1.0, 2.0), circle(1.0, 1.0, 2.0)]).unwrap();
        assert_eq!(preprocess(&inst).1.deleted, vec![(1, 0)]);
    }

    #[test]
    fn chains_never_deleted() {
        let chain = Element::chain(vec![Point::new(-10.0, 0.0), Point::new(10.0, 0.0)], 0.0).unwrap();
        let inst = Instance::new("t", vec![chain, circle(0.0, 0.0, 1.0)]).unwrap();
        assert!(preprocess(&inst).1.is_identity());
        let small = Element::chain(vec![Point::new(-0.5, 0.0), Point::new(0.5, 0.0)], 0.0).unwrap();
        let inst = Instance::new("t", vec![small, circle(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(preprocess(&inst).1.deleted, vec![(1, 0)]);
    }

    #[test]
    fn validators() {
        let inst = Instance::new("t", vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0)]).unwrap();
        assert!(boundary_violations(&inst, &[(0, Point::new(1.0, 0.0))], 1e-9).is_empty());
        assert_eq!(boundary_violations(&inst, &[(0, Point::new(0.5, 0.0))], 1e-9).len(), 1);
        assert!(hull_violations(&inst, &[(0, Point::new(1.0, 0.0))], 1e-9).is_empty());
        assert_eq!(hull_violations(&inst, &[(0, Point::new(0.0, 1.0))], 1e-9).len(), 1);
    }
}
