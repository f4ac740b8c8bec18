//! Translation of elements into solver blocks, and the enumeration of the
//! discrete choices of chains and unions.

use super::convex::{ConvexProblem, CoordSet, Part, Term};
use crate::geometry::{clip_halfplane, ConvexShape, Element, ElementKind, Point};

/// A part of a chain's parameter square: entry on segment `entry_seg`, exit
/// on segment `exit_seg`, `(λ_entry, λ_exit)` restricted to `region`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ChainChoice {
    pub entry_seg: usize,
    pub exit_seg: usize,
    pub region: Vec<Point>,
}

/// Discrete alternatives of a nonconvex element.
#[derive(Debug, Clone)]
pub(crate) enum Choices {
    Chain(Vec<ChainChoice>),
    /// `(entry member, exit member)` pairs.
    Union(Vec<(usize, usize)>),
}

impl Choices {
    pub fn len(&self) -> usize {
        match self {
            Choices::Chain(c) => c.len(),
            Choices::Union(c) => c.len(),
        }
    }
}

/// How one element enters the convex problem.
#[derive(Debug, Clone)]
pub(crate) enum Block {
    /// Entry and exit coincide in a convex shape.
    Collapsed(ConvexShape),
    /// Independent entry and exit shapes.
    Split(ConvexShape, ConvexShape),
    /// A chain restricted to one choice.
    ChainRegion { breakpoints: Vec<Point>, choice: ChainChoice },
    /// Convex hull relaxation of a chain: `(entry, exit)` is a convex
    /// combination of the listed pairs.
    ChainHull(Vec<(Point, Point)>),
}

/// Chain point at global parameter `λ`, on the given segment.
pub(crate) fn chain_point(breakpoints: &[Point], seg: usize, lambda: f64) -> Point {
    let u = breakpoints[seg + 1] - breakpoints[seg];
    breakpoints[seg] + u * (lambda - seg as f64)
}

pub(crate) fn chain_choices(breakpoints: &[Point], coverage: f64) -> Vec<ChainChoice> {
    let n = breakpoints.len() - 1;
    let need = coverage * n as f64;
    let mut out = Vec::new();
    for entry_seg in 0..n {
        for exit_seg in 0..n {
            let (a, b) = (entry_seg as f64, exit_seg as f64);
            let square = vec![
                Point::new(a, b),
                Point::new(a + 1.0, b),
                Point::new(a + 1.0, b + 1.0),
                Point::new(a, b + 1.0),
            ];
            if need <= 0.0 {
                out.push(ChainChoice { entry_seg, exit_seg, region: square });
                continue;
            }
            for normal in [Point::new(-1.0, 1.0), Point::new(1.0, -1.0)] {
                let region = clip_halfplane(&square, normal, need);
                if !region.is_empty() {
                    out.push(ChainChoice { entry_seg, exit_seg, region });
                }
            }
        }
    }
    out
}

/// The discrete alternatives of an element, or `None` for convex elements.
pub(crate) fn element_choices(e: &Element, collapse: bool) -> Option<Choices> {
    match e.kind() {
        ElementKind::Chain { breakpoints } => Some(Choices::Chain(chain_choices(breakpoints, e.coverage()))),
        ElementKind::Union { members } => {
            let k = members.len();
            let pairs = if collapse && e.discount() >= 1.0 {
                (0..k).map(|i| (i, i)).collect()
            } else {
                (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect()
            };
            Some(Choices::Union(pairs))
        }
        _ => None,
    }
}

fn convex_block(shape: ConvexShape, discount: f64, collapse: bool) -> Block {
    if collapse && discount >= 1.0 {
        Block::Collapsed(shape)
    } else {
        Block::Split(shape.clone(), shape)
    }
}

/// The block of element `e` under an optional choice index.
pub(crate) fn element_block(e: &Element, choices: Option<&Choices>, choice: Option<usize>, collapse: bool) -> Block {
    match (e.kind(), choices) {
        (ElementKind::Chain { breakpoints }, Some(Choices::Chain(list))) => match choice {
            Some(i) => Block::ChainRegion { breakpoints: breakpoints.clone(), choice: list[i].clone() },
            None => {
                let mut pairs: Vec<(Point, Point)> = Vec::new();
                for c in list {
                    for v in &c.region {
                        let pair = (
                            chain_point(breakpoints, c.entry_seg, v.x),
                            chain_point(breakpoints, c.exit_seg, v.y),
                        );
                        let dup = pairs
                            .iter()
                            .any(|q| q.0.dist(pair.0) <= 1e-12 && q.1.dist(pair.1) <= 1e-12);
                        if !dup {
                            pairs.push(pair);
                        }
                    }
                }
                Block::ChainHull(pairs)
            }
        },
        (ElementKind::Union { members }, Some(Choices::Union(list))) => match choice {
            Some(i) => {
                let (a, b) = list[i];
                if a == b {
                    convex_block(ConvexShape::Soc(members[a].clone()), e.discount(), collapse)
                } else {
                    Block::Split(ConvexShape::Soc(members[a].clone()), ConvexShape::Soc(members[b].clone()))
                }
            }
            None => {
                let (lo, hi) = e.bounding_box();
                let bbox = ConvexShape::Polygon(vec![lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)]);
                convex_block(bbox, e.discount(), collapse)
            }
        },
        _ => convex_block(e.convex_shape().expect("convex element"), e.discount(), collapse),
    }
}

/// An affine planar expression in the coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Affine {
    constant: Point,
    parts: Vec<Part>,
}

impl Affine {
    fn coord(c: usize) -> Self {
        Affine { constant: Point::ORIGIN, parts: vec![Part { coord: c, cols: vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0)] }] }
    }

    pub fn eval(&self, problem: &ConvexProblem, z: &[f64]) -> Point {
        self.parts.iter().fold(self.constant, |acc, part| {
            let o = problem.offset(part.coord);
            part.cols
                .iter()
                .enumerate()
                .fold(acc, |a, (j, col)| a + *col * z[o + j])
        })
    }

    /// `self − other` scaled by `weight`, as a term.
    fn minus(&self, other: &Affine, weight: f64) -> Term {
        let mut parts = self.parts.clone();
        for p in &other.parts {
            let neg: Vec<Point> = p.cols.iter().map(|c| -*c).collect();
            match parts.iter_mut().find(|q| q.coord == p.coord) {
                Some(q) => {
                    for (a, b) in q.cols.iter_mut().zip(&neg) {
                        *a = *a + *b;
                    }
                }
                None => parts.push(Part { coord: p.coord, cols: neg }),
            }
        }
        parts.retain(|p| p.cols.iter().any(|c| *c != Point::ORIGIN));
        Term { weight, constant: self.constant - other.constant, parts }
    }
}

/// A convex problem for a tour and one block per element.
pub(crate) struct Assembly {
    pub problem: ConvexProblem,
    pub entry: Vec<Affine>,
    pub exit: Vec<Affine>,
    /// First coordinate of each element's block.
    pub first_coord: Vec<usize>,
    pub blocks: Vec<Block>,
}

impl Assembly {
    pub fn new(order: &[usize], discounts: &[f64], blocks: Vec<Block>) -> Self {
        let n = blocks.len();
        let mut sets = Vec::new();
        let mut entry = Vec::with_capacity(n);
        let mut exit = Vec::with_capacity(n);
        let mut first_coord = Vec::with_capacity(n);
        for block in &blocks {
            let c = sets.len();
            first_coord.push(c);
            match block {
                Block::Collapsed(shape) => {
                    sets.push(CoordSet::Shape(shape.clone()));
                    entry.push(Affine::coord(c));
                    exit.push(Affine::coord(c));
                }
                Block::Split(a, b) => {
                    sets.push(CoordSet::Shape(a.clone()));
                    sets.push(CoordSet::Shape(b.clone()));
                    entry.push(Affine::coord(c));
                    exit.push(Affine::coord(c + 1));
                }
                Block::ChainRegion { breakpoints, choice } => {
                    sets.push(CoordSet::Shape(ConvexShape::Polygon(choice.region.clone())));
                    let (se, sx) = (choice.entry_seg, choice.exit_seg);
                    let ue = breakpoints[se + 1] - breakpoints[se];
                    let ux = breakpoints[sx + 1] - breakpoints[sx];
                    entry.push(Affine {
                        constant: breakpoints[se] - ue * se as f64,
                        parts: vec![Part { coord: c, cols: vec![ue, Point::ORIGIN] }],
                    });
                    exit.push(Affine {
                        constant: breakpoints[sx] - ux * sx as f64,
                        parts: vec![Part { coord: c, cols: vec![Point::ORIGIN, ux] }],
                    });
                }
                Block::ChainHull(pairs) => {
                    // Weights sum to one, so columns are taken relative to the
                    // mean pair; this keeps them at the scale of the chain.
                    sets.push(CoordSet::Simplex(pairs.len()));
                    let k = pairs.len() as f64;
                    let me = pairs.iter().fold(Point::ORIGIN, |a, p| a + p.0) / k;
                    let mx = pairs.iter().fold(Point::ORIGIN, |a, p| a + p.1) / k;
                    entry.push(Affine {
                        constant: me,
                        parts: vec![Part { coord: c, cols: pairs.iter().map(|p| p.0 - me).collect() }],
                    });
                    exit.push(Affine {
                        constant: mx,
                        parts: vec![Part { coord: c, cols: pairs.iter().map(|p| p.1 - mx).collect() }],
                    });
                }
            }
        }
        let mut terms = Vec::new();
        for k in 0..order.len() {
            let (v, w) = (order[k], order[(k + 1) % order.len()]);
            terms.push(exit[v].minus(&entry[w], 1.0));
        }
        for v in 0..n {
            if discounts[v] > 0.0 && !matches!(blocks[v], Block::Collapsed(_)) {
                terms.push(entry[v].minus(&exit[v], discounts[v]));
            }
        }
        Assembly { problem: ConvexProblem::new(sets, terms), entry, exit, first_coord, blocks }
    }

    /// A feasible starting vector near the hinted entry and exit points.
    pub fn initial(&self, entry_hint: &[Point], exit_hint: &[Point]) -> Vec<f64> {
        let mut z = vec![0.0; self.problem.dim()];
        for (v, block) in self.blocks.iter().enumerate() {
            let c = self.first_coord[v];
            let o = self.problem.offset(c);
            match block {
                Block::Collapsed(shape) => {
                    let p = shape.project(entry_hint[v]);
                    z[o] = p.x;
                    z[o + 1] = p.y;
                }
                Block::Split(a, b) => {
                    let (p, q) = (a.project(entry_hint[v]), b.project(exit_hint[v]));
                    z[o..o + 4].copy_from_slice(&[p.x, p.y, q.x, q.y]);
                }
                Block::ChainRegion { breakpoints, choice } => {
                    let l = region_params(breakpoints, choice, entry_hint[v], exit_hint[v]).0;
                    z[o] = l.x;
                    z[o + 1] = l.y;
                }
                Block::ChainHull(pairs) => {
                    let best = (0..pairs.len())
                        .min_by(|&i, &j| {
                            let di = pairs[i].0.dist(entry_hint[v]) + pairs[i].1.dist(exit_hint[v]);
                            let dj = pairs[j].0.dist(entry_hint[v]) + pairs[j].1.dist(exit_hint[v]);
                            di.total_cmp(&dj)
                        })
                        .unwrap_or(0);
                    z[o + best] = 1.0;
                }
            }
        }
        z
    }

    pub fn decode(&self, z: &[f64]) -> (Vec<Point>, Vec<Point>, Vec<Option<(f64, f64)>>) {
        let entry: Vec<Point> = self.entry.iter().map(|a| a.eval(&self.problem, z)).collect();
        let exit: Vec<Point> = self.exit.iter().map(|a| a.eval(&self.problem, z)).collect();
        let lambda = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, b)| match b {
                Block::ChainRegion { .. } => {
                    let o = self.problem.offset(self.first_coord[v]);
                    Some((z[o], z[o + 1]))
                }
                _ => None,
            })
            .collect();
        (entry, exit, lambda)
    }
}

/// Chain parameter of the point of the chain nearest to `p` (lowest parameter on ties).
pub(crate) fn nearest_param(breakpoints: &[Point], p: Point) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for s in 0..breakpoints.len() - 1 {
        let seg = crate::geometry::Segment::new(breakpoints[s], breakpoints[s + 1]);
        let t = seg.closest_param(p);
        let d = seg.at(t).dist(p);
        if d < best.0 {
            best = (d, s as f64 + t);
        }
    }
    best.1
}

/// Parameters in `choice.region` close to the hinted points, and the summed
/// distance of the resulting chain points to the hints.
pub(crate) fn region_params(breakpoints: &[Point], choice: &ChainChoice, entry: Point, exit: Point) -> (Point, f64) {
    let raw = Point::new(nearest_param(breakpoints, entry), nearest_param(breakpoints, exit));
    let l = ConvexShape::Polygon(choice.region.clone()).project(raw);
    let d = chain_point(breakpoints, choice.entry_seg, l.x).dist(entry)
        + chain_point(breakpoints, choice.exit_seg, l.y).dist(exit);
    (l, d)
}

/// How far relaxed points are from the element's choice `i`.
pub(crate) fn choice_distance(e: &Element, choices: &Choices, i: usize, entry: Point, exit: Point) -> f64 {
    match (e.kind(), choices) {
        (ElementKind::Chain { breakpoints }, Choices::Chain(list)) => region_params(breakpoints, &list[i], entry, exit).1,
        (ElementKind::Union { members }, Choices::Union(list)) => {
            let (a, b) = list[i];
            members[a].project(entry).dist(entry) + members[b].project(exit).dist(exit)
        }
        _ => 0.0,
    }
}
