//! Planar primitives for the element shapes: membership, projection, chain
//! parameterization and pairwise distance bounds.

mod element;
mod point;
mod shape;
mod soc;

pub use element::{
    diameter_bound, distance_lower_bound, element_contains_element, max_distance_bound, min_distance,
    Element, ElementKind,
};
pub use point::{Point, Segment};
pub use shape::{clip_halfplane, convex_hull, ConvexShape};
pub use soc::{SocRow, SocSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("domain error: {0}")]
    Domain(String),
}
