//! SVG drawing of an instance with a route.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use xppn::geometry::{ElementKind, Point};
use xppn::instance::Instance;
use xppn::touring::TourSolution;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;
const UNION_SAMPLES: usize = 96;
const MARKER: f64 = 5.0;

/// Maps world coordinates onto the canvas with y pointing up.
struct View {
    min: Point,
    max_y: f64,
    scale: f64,
}

impl View {
    fn new(inst: &Instance, sol: &TourSolution) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let boxes = inst.elements().iter().map(|e| e.bounding_box());
        let points = sol.points().into_iter().map(|(_, p)| (p, p));
        for (a, b) in boxes.chain(points) {
            lo = Point::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Point::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
        View { min: lo, max_y: hi.y, scale: (CANVAS - 2.0 * MARGIN) / span }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (MARGIN + (p.x - self.min.x) * self.scale, MARGIN + (self.max_y - p.y) * self.scale)
    }

    fn len(&self, d: f64) -> f64 {
        d * self.scale
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn path_points(view: &View, pts: impl IntoIterator<Item = Point>) -> String {
    pts.into_iter()
        .map(|p| {
            let (x, y) = view.map(p);
            format!("{},{}", num(x), num(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn line(out: &mut String, view: &View, a: Point, b: Point, class: &str) {
    let (x1, y1) = view.map(a);
    let (x2, y2) = view.map(b);
    let _ = writeln!(
        out,
        r#"  <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(x1),
        num(y1),
        num(x2),
        num(y2)
    );
}

/// Renders `sol` over `inst`. The output depends only on the inputs.
pub fn svg(inst: &Instance, sol: &TourSolution) -> String {
    let view = View::new(inst, sol);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{c}" height="{h}" viewBox="0 0 {c} {h}">"#,
        c = CANVAS,
        h = CANVAS + MARGIN
    );
    out += "  <style>\n\
            \x20   .element { fill: #cfe3f5; fill-opacity: 0.6; stroke: #3a6d99; stroke-width: 1 }\n\
            \x20   .chain { fill: none; stroke: #3a6d99; stroke-width: 2 }\n\
            \x20   .outer { stroke: #222; stroke-width: 1.5 }\n\
            \x20   .inner { stroke: #c0392b; stroke-width: 1.5; stroke-dasharray: 4 3 }\n\
            \x20   .point { fill: #c0392b }\n\
            \x20   text { font-family: sans-serif; font-size: 12px }\n\
            \x20 </style>\n";

    for (v, e) in inst.elements().iter().enumerate() {
        match e.kind() {
            ElementKind::Circle { center, radius } => {
                let (x, y) = view.map(*center);
                let _ = writeln!(
                    out,
                    r#"  <circle class="element" id="e{v}" cx="{}" cy="{}" r="{}"/>"#,
                    num(x),
                    num(y),
                    num(view.len(*radius))
                );
            }
            ElementKind::Ellipse { center, semi_axes, rotation } => {
                let (x, y) = view.map(*center);
                let _ = writeln!(
                    out,
                    r#"  <ellipse class="element" id="e{v}" cx="{}" cy="{}" rx="{}" ry="{}" transform="rotate({} {} {})"/>"#,
                    num(x),
                    num(y),
                    num(view.len(semi_axes.0)),
                    num(view.len(semi_axes.1)),
                    num(-rotation.to_degrees()),
                    num(x),
                    num(y)
                );
            }
            ElementKind::Polygon { vertices } => {
                let _ = writeln!(
                    out,
                    r#"  <polygon class="element" id="e{v}" points="{}"/>"#,
                    path_points(&view, vertices.iter().copied())
                );
            }
            ElementKind::Union { members } => {
                let _ = writeln!(out, r#"  <g id="e{v}">"#);
                for m in members {
                    let ring = (0..UNION_SAMPLES).map(|k| m.boundary_at(TAU * k as f64 / UNION_SAMPLES as f64));
                    let _ = writeln!(out, r#"    <polygon class="element" points="{}"/>"#, path_points(&view, ring));
                }
                out += "  </g>\n";
            }
            ElementKind::Chain { breakpoints } => {
                let _ = writeln!(
                    out,
                    r#"  <polyline class="chain" id="e{v}" points="{}"/>"#,
                    path_points(&view, breakpoints.iter().copied())
                );
            }
        }
        let (x, y) = view.map(e.anchor());
        let _ = writeln!(out, r#"  <text x="{}" y="{}">{v}</text>"#, num(x + 4.0), num(y - 4.0));
    }

    for (v, w) in sol.tour.edges() {
        line(&mut out, &view, sol.exit[v], sol.entry[w], "outer");
    }
    for v in 0..sol.entry.len() {
        if sol.entry[v].dist(sol.exit[v]) > 0.0 {
            line(&mut out, &view, sol.entry[v], sol.exit[v], "inner");
        }
    }
    for (_, p) in sol.points() {
        let (x, y) = view.map(p);
        let _ = writeln!(
            out,
            r#"  <rect class="point" x="{}" y="{}" width="{m}" height="{m}"/>"#,
            num(x - MARKER / 2.0),
            num(y - MARKER / 2.0),
            m = MARKER
        );
    }
    let _ = writeln!(
        out,
        r#"  <text x="{}" y="{}">{}: {} elements, tour {}, cost {:.6}</text>"#,
        MARGIN,
        CANVAS + MARGIN / 2.0,
        inst.name,
        inst.len(),
        sol.tour,
        sol.cost
    );
    out += "</svg>\n";
    out
}
