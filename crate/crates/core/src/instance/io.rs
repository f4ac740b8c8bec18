//! JSON instance file.
//!
//! ```text
//! {
//!   "name": "demo",
//!   "seed": 7,
//!   "radii_class": 1,
//!   "mode": null,
//!   "elements": [
//!     {"kind": "circle", "center": [x, y], "radius": r, "discount": f},
//!     {"kind": "ellipse", "center": [x, y], "semi_axes": [a, b], "rotation": t, "discount": f},
//!     {"kind": "polygon", "vertices": [[x, y], ...], "discount": f},
//!     {"kind": "union", "members": [{"rows": [{"B": [[a, b], [c, d]], "b": [x, y], "c": [x, y], "d": v}]}], "discount": f},
//!     {"kind": "chain", "breakpoints": [[x, y], ...], "coverage": a, "discount": f}
//!   ]
//! }
//! ```
//!
//! Reals are written with 17 significant digits so they read back exactly.
//! `discount` defaults to 1 and `coverage` to 0 when absent.

use serde_json::{Map, Value};

use super::{Instance, InstanceError};
use crate::geometry::{Element, ElementKind, Point, SocRow, SocSet};

pub(crate) fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn pair(p: Point) -> String {
    format!("[{}, {}]", real(p.x), real(p.y))
}

fn points(ps: &[Point]) -> String {
    let items: Vec<String> = ps.iter().map(|p| pair(*p)).collect();
    format!("[{}]", items.join(", "))
}

fn soc_row(r: &SocRow) -> String {
    format!(
        "{{\"B\": [{}, {}], \"b\": {}, \"c\": {}, \"d\": {}}}",
        pair(Point::new(r.mat[0][0], r.mat[0][1])),
        pair(Point::new(r.mat[1][0], r.mat[1][1])),
        pair(r.offset),
        pair(r.lin),
        real(r.constant)
    )
}

fn element_json(e: &Element) -> String {
    let body = match e.kind() {
        ElementKind::Circle { center, radius } => {
            format!("\"kind\": \"circle\", \"center\": {}, \"radius\": {}", pair(*center), real(*radius))
        }
        ElementKind::Ellipse { center, semi_axes, rotation } => format!(
            "\"kind\": \"ellipse\", \"center\": {}, \"semi_axes\": {}, \"rotation\": {}",
            pair(*center),
            pair(Point::new(semi_axes.0, semi_axes.1)),
            real(*rotation)
        ),
        ElementKind::Polygon { vertices } => {
            format!("\"kind\": \"polygon\", \"vertices\": {}", points(vertices))
        }
        ElementKind::Union { members } => {
            let ms: Vec<String> = members
                .iter()
                .map(|m| {
                    let rows: Vec<String> = m.rows().iter().map(soc_row).collect();
                    format!("{{\"rows\": [{}]}}", rows.join(", "))
                })
                .collect();
            format!("\"kind\": \"union\", \"members\": [{}]", ms.join(", "))
        }
        ElementKind::Chain { breakpoints } => format!(
            "\"kind\": \"chain\", \"breakpoints\": {}, \"coverage\": {}",
            points(breakpoints),
            real(e.coverage())
        ),
    };
    format!("{{{body}, \"discount\": {}}}", real(e.discount()))
}

fn optional_u8(v: Option<u8>) -> String {
    v.map_or_else(|| "null".to_string(), |x| x.to_string())
}

/// Canonical text of an instance.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::from("{\n");
    out += &format!("  \"name\": {},\n", Value::String(inst.name.clone()));
    out += &format!("  \"seed\": {},\n", inst.seed);
    out += &format!("  \"radii_class\": {},\n", optional_u8(inst.radii_class));
    out += &format!("  \"mode\": {},\n", optional_u8(inst.mode));
    out += "  \"elements\": [\n";
    let n = inst.elements.len();
    for (i, e) in inst.elements.iter().enumerate() {
        out += "    ";
        out += &element_json(e);
        out += if i + 1 < n { ",\n" } else { "\n" };
    }
    out += "  ]\n}\n";
    out
}

struct Ctx {
    element: Option<usize>,
}

impl Ctx {
    fn err(&self, message: impl Into<String>) -> InstanceError {
        InstanceError::Field { element: self.element, message: message.into() }
    }

    fn field<'a>(&self, obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, InstanceError> {
        obj.get(key).ok_or_else(|| self.err(format!("missing field `{key}`")))
    }

    fn number(&self, v: &Value, what: &str) -> Result<f64, InstanceError> {
        v.as_f64().ok_or_else(|| self.err(format!("`{what}` must be a number")))
    }

    fn array<'a>(&self, v: &'a Value, what: &str) -> Result<&'a Vec<Value>, InstanceError> {
        v.as_array().ok_or_else(|| self.err(format!("`{what}` must be an array")))
    }

    fn point(&self, v: &Value, what: &str) -> Result<Point, InstanceError> {
        match self.array(v, what)?.as_slice() {
            [x, y] => Ok(Point::new(self.number(x, what)?, self.number(y, what)?)),
            _ => Err(self.err(format!("`{what}` must be a pair of numbers"))),
        }
    }

    fn points(&self, v: &Value, what: &str) -> Result<Vec<Point>, InstanceError> {
        self.array(v, what)?.iter().map(|p| self.point(p, what)).collect()
    }

    fn real_field(&self, obj: &Map<String, Value>, key: &str) -> Result<f64, InstanceError> {
        self.number(self.field(obj, key)?, key)
    }

    fn soc_row(&self, v: &Value) -> Result<SocRow, InstanceError> {
        let obj = v.as_object().ok_or_else(|| self.err("cone row must be an object"))?;
        let mat = match self.array(self.field(obj, "B")?, "B")?.as_slice() {
            [r0, r1] => {
                let (a, b) = (self.point(r0, "B")?, self.point(r1, "B")?);
                [[a.x, a.y], [b.x, b.y]]
            }
            _ => return Err(self.err("`B` must be a 2x2 matrix")),
        };
        Ok(SocRow {
            mat,
            offset: self.point(self.field(obj, "b")?, "b")?,
            lin: self.point(self.field(obj, "c")?, "c")?,
            constant: self.real_field(obj, "d")?,
        })
    }

    fn element(&self, v: &Value) -> Result<Element, InstanceError> {
        let obj = v.as_object().ok_or_else(|| self.err("element must be an object"))?;
        let kind_name = self
            .field(obj, "kind")?
            .as_str()
            .ok_or_else(|| self.err("`kind` must be a string"))?;
        let discount = match obj.get("discount") {
            Some(d) => self.number(d, "discount")?,
            None => 1.0,
        };
        let coverage = match obj.get("coverage") {
            Some(c) => self.number(c, "coverage")?,
            None => 0.0,
        };
        let kind = match kind_name {
            "circle" => ElementKind::Circle {
                center: self.point(self.field(obj, "center")?, "center")?,
                radius: self.real_field(obj, "radius")?,
            },
            "ellipse" => {
                let axes = self.point(self.field(obj, "semi_axes")?, "semi_axes")?;
                ElementKind::Ellipse {
                    center: self.point(self.field(obj, "center")?, "center")?,
                    semi_axes: (axes.x, axes.y),
                    rotation: self.real_field(obj, "rotation")?,
                }
            }
            "polygon" => ElementKind::Polygon {
                vertices: self.points(self.field(obj, "vertices")?, "vertices")?,
            },
            "union" => {
                let members = self
                    .array(self.field(obj, "members")?, "members")?
                    .iter()
                    .map(|m| {
                        let mobj = m.as_object().ok_or_else(|| self.err("union member must be an object"))?;
                        let rows = self
                            .array(self.field(mobj, "rows")?, "rows")?
                            .iter()
                            .map(|r| self.soc_row(r))
                            .collect::<Result<Vec<_>, _>>()?;
                        SocSet::new(rows).map_err(|source| InstanceError::Validation { element: self.element, source })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                ElementKind::Union { members }
            }
            "chain" => ElementKind::Chain {
                breakpoints: self.points(self.field(obj, "breakpoints")?, "breakpoints")?,
            },
            other => return Err(self.err(format!("unknown kind `{other}`"))),
        };
        Element::with_coverage(kind, discount, coverage)
            .map_err(|source| InstanceError::Validation { element: self.element, source })
    }
}

fn optional_class(ctx: &Ctx, obj: &Map<String, Value>, key: &str) -> Result<Option<u8>, InstanceError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => match v.as_u64() {
            Some(x @ 1..=4) => Ok(Some(x as u8)),
            _ => Err(ctx.err(format!("`{key}` must be an integer in 1..=4 or null"))),
        },
    }
}

/// Parses an instance file.
pub fn read_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let top = Ctx { element: None };
    let obj = doc.as_object().ok_or_else(|| top.err("top level must be an object"))?;
    let name = match obj.get("name") {
        Some(v) => v.as_str().ok_or_else(|| top.err("`name` must be a string"))?.to_string(),
        None => String::new(),
    };
    let seed = match obj.get("seed") {
        Some(v) => v.as_u64().ok_or_else(|| top.err("`seed` must be an unsigned integer"))?,
        None => 0,
    };
    let radii_class = optional_class(&top, obj, "radii_class")?;
    let mode = optional_class(&top, obj, "mode")?;
    let elements = top
        .array(top.field(obj, "elements")?, "elements")?
        .iter()
        .enumerate()
        .map(|(i, v)| Ctx { element: Some(i) }.element(v))
        .collect::<Result<Vec<_>, _>>()?;
    let mut inst = Instance::new(name, elements)?;
    inst.seed = seed;
    inst.radii_class = radii_class;
    inst.mode = mode;
    Ok(inst)
}
