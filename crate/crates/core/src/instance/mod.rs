//! Problem instances: data model, the random generation protocol and the
//! JSON instance file.

mod io;
mod rng;

use std::f64::consts::TAU;

use crate::geometry::{Element, ElementKind, GeometryError, Point};

pub use io::{read_instance, write_instance};
pub use rng::StreamRng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{}: {message}", location(.element))]
    Field { element: Option<usize>, message: String },
    #[error("{}: {source}", location(.element))]
    Validation {
        element: Option<usize>,
        #[source]
        source: GeometryError,
    },
}

fn location(element: &Option<usize>) -> String {
    match element {
        Some(i) => format!("element {i}"),
        None => "document".to_string(),
    }
}

/// An ordered collection of elements; element indices form the vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub seed: u64,
    /// Radii class 1..=4 of generated instances.
    pub radii_class: Option<u8>,
    /// Shape mode 1..=4 of generated instances.
    pub mode: Option<u8>,
    elements: Vec<Element>,
}

impl Instance {
    pub fn new(name: impl Into<String>, elements: Vec<Element>) -> Result<Self, InstanceError> {
        if elements.is_empty() {
            return Err(InstanceError::Argument("an instance needs at least one element".into()));
        }
        Ok(Self {
            name: name.into(),
            seed: 0,
            radii_class: None,
            mode: None,
            elements,
        })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, v: usize) -> &Element {
        &self.elements[v]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// A new instance restricted to `indices` (in that order), keeping metadata.
    pub fn subset(&self, indices: &[usize]) -> Instance {
        Instance {
            name: self.name.clone(),
            seed: self.seed,
            radii_class: self.radii_class,
            mode: self.mode,
            elements: indices.iter().map(|&i| self.elements[i].clone()).collect(),
        }
    }

    /// Same instance with every discount factor replaced.
    pub fn with_discount(&self, discount: f64) -> Result<Instance, InstanceError> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.clone()
                    .with_discount(discount)
                    .map_err(|source| InstanceError::Validation { element: Some(i), source })
            })
            .collect::<Result<_, _>>()?;
        Ok(Instance { elements, ..self.clone() })
    }
}

/// Radius range of each radii class.
pub fn radius_range(radii_class: u8) -> Option<(f64, f64)> {
    match radii_class {
        1 => Some((0.0, 5.0)),
        2 => Some((5.0, 10.0)),
        3 => Some((10.0, 15.0)),
        4 => Some((15.0, 20.0)),
        _ => None,
    }
}

/// Side of the square `[0, SQUARE]²` holding centers and breakpoints.
pub const SQUARE: f64 = 100.0;
/// Breakpoints per generated chain.
pub const CHAIN_BREAKPOINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Circle,
    Polygon,
    Chain,
}

/// Generates a random instance.
///
/// Per element, in order: the shape (mode 4 only; elements 0, 1, 2 are a
/// circle, a polygon and a chain, later ones uniform over the three), the
/// radius `r`, then the center `(uniform(0,100), uniform(0,100))`. Polygons
/// draw a vertex count `3 + below(8)` and a phase in `[0, 2π)` and are regular
/// with circumradius `r`. Chains start at the center and take 3 steps of length
/// exactly `r` in a uniform direction, redrawing directions that leave the
/// square (64 tries, then heading to the square center); the coverage is
/// drawn last. All discounts are 1.
pub fn generate(size: usize, radii_class: u8, mode: u8, seed: u64) -> Result<Instance, InstanceError> {
    if size < 2 {
        return Err(InstanceError::Argument(format!("size must be ≥ 2, got {size}")));
    }
    let (lo, hi) = radius_range(radii_class)
        .ok_or_else(|| InstanceError::Argument(format!("radii class must be 1..=4, got {radii_class}")))?;
    if !(1..=4).contains(&mode) {
        return Err(InstanceError::Argument(format!("mode must be 1..=4, got {mode}")));
    }
    let mut rng = StreamRng::new(seed);
    let mut elements = Vec::with_capacity(size);
    for i in 0..size {
        let shape = match mode {
            1 => Shape::Circle,
            2 => Shape::Polygon,
            3 => Shape::Chain,
            _ if i < 3 => [Shape::Circle, Shape::Polygon, Shape::Chain][i],
            _ => [Shape::Circle, Shape::Polygon, Shape::Chain][rng.below(3)],
        };
        let r = rng.uniform(lo, hi);
        let center = Point::new(rng.uniform(0.0, SQUARE), rng.uniform(0.0, SQUARE));
        let element = match shape {
            Shape::Circle => Element::circle(center, r),
            Shape::Polygon => {
                let k = 3 + rng.below(8);
                let phase = rng.uniform(0.0, TAU);
                let vertices = (0..k)
                    .map(|j| center + Point::from_polar(r, phase + TAU * j as f64 / k as f64))
                    .collect();
                Element::polygon(vertices)
            }
            Shape::Chain => {
                let mut breakpoints = vec![center];
                for _ in 1..CHAIN_BREAKPOINTS {
                    let last = *breakpoints.last().unwrap();
                    breakpoints.push(chain_step(&mut rng, last, r));
                }
                let coverage = rng.uniform(0.0, 1.0);
                Element::with_coverage(ElementKind::Chain { breakpoints }, 1.0, coverage)
            }
        }
        .map_err(|source| InstanceError::Validation { element: Some(i), source })?;
        elements.push(element);
    }
    Ok(Instance {
        name: format!("xppn-n{size}-r{radii_class}-m{mode}-s{seed}"),
        seed,
        radii_class: Some(radii_class),
        mode: Some(mode),
        elements,
    })
}

fn inside_square(p: Point) -> bool {
    (0.0..=SQUARE).contains(&p.x) && (0.0..=SQUARE).contains(&p.y)
}

fn chain_step(rng: &mut StreamRng, from: Point, r: f64) -> Point {
    for _ in 0..64 {
        let next = from + Point::from_polar(r, rng.uniform(0.0, TAU));
        if inside_square(next) {
            return next;
        }
    }
    let to_center = Point::new(SQUARE / 2.0, SQUARE / 2.0) - from;
    match to_center.normalized() {
        Some(u) => from + u * r,
        None => from + Point::new(r, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate(12, 3, 4, 99).unwrap();
        let b = generate(12, 3, 4, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(write_instance(&a), write_instance(&b));
        assert_ne!(a, generate(12, 3, 4, 100).unwrap());
    }

    #[test]
    fn circles_class_one() {
        let inst = generate(10, 1, 1, 5).unwrap();
        assert_eq!(inst.len(), 10);
        for e in inst.elements() {
            let ElementKind::Circle { center, radius } = e.kind() else { panic!("not a circle") };
            assert!(*radius > 0.0 && *radius <= 5.0);
            assert!(inside_square(*center));
        }
    }

    #[test]
    fn chains_have_exact_spacing() {
        let inst = generate(5, 4, 3, 11).unwrap();
        for e in inst.elements() {
            let bp = e.chain_breakpoints().expect("chain");
            assert_eq!(bp.len(), CHAIN_BREAKPOINTS);
            let r = bp[0].dist(bp[1]);
            assert!((15.0..=20.0).contains(&r));
            for w in bp.windows(2) {
                assert!((w[0].dist(w[1]) - r).abs() < 1e-9);
            }
            assert!(bp.iter().all(|p| inside_square(*p)));
            assert!((0.0..=1.0).contains(&e.coverage()));
        }
    }

    #[test]
    fn polygons_are_regular() {
        let inst = generate(20, 2, 2, 3).unwrap();
        for e in inst.elements() {
            let ElementKind::Polygon { vertices } = e.kind() else { panic!("not a polygon") };
            assert!((3..=10).contains(&vertices.len()));
        }
    }

    #[test]
    fn mixture_has_every_kind() {
        for seed in 0..20 {
            let inst = generate(3, 2, 4, seed).unwrap();
            let names: Vec<_> = inst.elements().iter().map(|e| e.kind_name()).collect();
            assert_eq!(names, ["circle", "polygon", "chain"]);
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(generate(1, 1, 1, 0), Err(InstanceError::Argument(_))));
        assert!(matches!(generate(5, 0, 1, 0), Err(InstanceError::Argument(_))));
        assert!(matches!(generate(5, 1, 5, 0), Err(InstanceError::Argument(_))));
    }
}
