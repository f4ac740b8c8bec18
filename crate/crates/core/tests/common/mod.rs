#![allow(dead_code)]

use proptest::prelude::*;
use xppn::geometry::{convex_hull, ConvexShape, Element, ElementKind, Point, SocSet};

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

pub fn circle(x: f64, y: f64, r: f64) -> Element {
    Element::circle(pt(x, y), r).unwrap()
}

pub fn square(x0: f64, y0: f64, side: f64) -> Element {
    Element::polygon(vec![pt(x0, y0), pt(x0 + side, y0), pt(x0 + side, y0 + side), pt(x0, y0 + side)]).unwrap()
}

fn coord() -> impl Strategy<Value = f64> {
    0.0..100.0
}

pub fn circle_strategy() -> impl Strategy<Value = Element> {
    (coord(), coord(), 0.5..20.0).prop_map(|(x, y, r)| circle(x, y, r))
}

pub fn ellipse_strategy() -> impl Strategy<Value = Element> {
    (coord(), coord(), 0.5..15.0, 0.5..15.0, 0.0..std::f64::consts::PI).prop_map(|(x, y, a, b, rot)| {
        Element::new(ElementKind::Ellipse { center: pt(x, y), semi_axes: (a, b), rotation: rot }, 1.0).unwrap()
    })
}

pub fn polygon_strategy() -> impl Strategy<Value = Element> {
    (coord(), coord(), prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..9))
        .prop_filter_map("degenerate hull", |(x, y, offs)| {
            let hull = convex_hull(&offs.iter().map(|&(dx, dy)| pt(x + dx, y + dy)).collect::<Vec<_>>());
            Element::polygon(hull).ok()
        })
}

pub fn chain_strategy() -> impl Strategy<Value = Element> {
    (coord(), coord(), prop::collection::vec((1.0..15.0f64, 0.0..std::f64::consts::TAU), 1..4), 0.0..1.0f64).prop_map(
        |(x, y, steps, alpha)| {
            let mut pts = vec![pt(x, y)];
            for (len, ang) in steps {
                let last = *pts.last().unwrap();
                pts.push(last + Point::from_polar(len, ang));
            }
            Element::chain(pts, alpha).unwrap()
        },
    )
}

pub fn union_strategy() -> impl Strategy<Value = Element> {
    (coord(), coord(), 1.0..8.0f64, 0.5..8.0f64, 1.0..10.0f64).prop_map(|(x, y, r, side, shift)| {
        let disk = ConvexShape::Disk { center: pt(x, y), radius: r };
        let sq = ConvexShape::Polygon(vec![
            pt(x + shift, y),
            pt(x + shift + side, y),
            pt(x + shift + side, y + side),
            pt(x + shift, y + side),
        ]);
        let members = [disk, sq].iter().map(|s| SocSet::new(s.to_soc_rows()).unwrap()).collect();
        Element::new(ElementKind::Union { members }, 1.0).unwrap()
    })
}

pub fn element_strategy() -> impl Strategy<Value = Element> {
    prop_oneof![circle_strategy(), ellipse_strategy(), polygon_strategy(), chain_strategy(), union_strategy()]
}

pub fn convex_strategy() -> impl Strategy<Value = Element> {
    prop_oneof![circle_strategy(), ellipse_strategy(), polygon_strategy()]
}
