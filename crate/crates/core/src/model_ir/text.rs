//! Canonical model text.
//!
//! ```text
//! XPPN-MODEL v1
//! counts <vars> <linear> <soc> <objective> <annotations>
//! VARS
//! <name> <continuous|binary|integer> <lower> <upper>
//! LINEAR
//! <<=|=|>=> <rhs> <name>:<coef> ...
//! SOC
//! <k> | <const> <name>:<coef> ... | ... | <const> <name>:<coef> ...
//! OBJ
//! <const> <name>:<coef> ...
//! ANNOT
//! <L<i>|S<i>> <tag>
//! ```
//!
//! A `SOC` line lists `k` affine rows of the norm then the right-hand side.
//! Sections with a zero count are omitted. Reals use 17 significant digits
//! and coefficients are sorted by name, so output is byte-stable.

use std::collections::BTreeMap;

use super::{Affine, LinearConstraint, Model, ModelError, Sense, SocConstraint, VarKind, Variable};

const HEADER: &str = "XPPN-MODEL v1";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn terms(coefs: &BTreeMap<String, f64>) -> String {
    coefs.iter().map(|(n, c)| format!(" {n}:{}", real(*c))).collect()
}

fn affine(a: &Affine) -> String {
    format!("{}{}", real(a.constant), terms(&a.coefs))
}

fn has_objective(m: &Model) -> bool {
    m.objective.constant != 0.0 || !m.objective.coefs.is_empty()
}

pub fn export_model(m: &Model) -> String {
    let n_obj = usize::from(has_objective(m));
    let n_annot = m.linear.len() + m.soc.len();
    let mut out = format!("{HEADER}\ncounts {} {} {} {} {}\n", m.variables.len(), m.linear.len(), m.soc.len(), n_obj, n_annot);
    if !m.variables.is_empty() {
        out += "VARS\n";
        for v in &m.variables {
            out += &format!("{} {} {} {}\n", v.name, v.kind.as_str(), real(v.lower), real(v.upper));
        }
    }
    if !m.linear.is_empty() {
        out += "LINEAR\n";
        for c in &m.linear {
            out += &format!("{} {}{}\n", c.sense.as_str(), real(c.rhs), terms(&c.coefs));
        }
    }
    if !m.soc.is_empty() {
        out += "SOC\n";
        for c in &m.soc {
            out += &c.rows.len().to_string();
            for r in c.rows.iter().chain(std::iter::once(&c.rhs)) {
                out += &format!(" | {}", affine(r));
            }
            out += "\n";
        }
    }
    if n_obj == 1 {
        out += &format!("OBJ\n{}\n", affine(&m.objective));
    }
    if n_annot > 0 {
        out += "ANNOT\n";
        for (i, c) in m.linear.iter().enumerate() {
            out += &format!("L{i} {}\n", c.tag);
        }
        for (i, c) in m.soc.iter().enumerate() {
            out += &format!("S{i} {}\n", c.tag);
        }
    }
    out
}

struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, line: usize, message: impl Into<String>) -> ModelError {
        ModelError::Parse { line, message: message.into() }
    }

    fn next(&mut self) -> Result<(usize, &'a str), ModelError> {
        let last = self.lines.last().map_or(1, |l| l.0);
        let l = self.lines.get(self.at).copied().ok_or_else(|| self.err(last + 1, "unexpected end of input"))?;
        self.at += 1;
        Ok(l)
    }

    fn section(&mut self, name: &str, count: usize) -> Result<Vec<(usize, &'a str)>, ModelError> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let (no, l) = self.next()?;
        if l != name {
            return Err(self.err(no, format!("expected section `{name}`")));
        }
        (0..count).map(|_| self.next()).collect()
    }
}

fn parse_real(s: &str, line: usize) -> Result<f64, ModelError> {
    s.parse::<f64>().map_err(|_| ModelError::Parse { line, message: format!("bad number `{s}`") })
}

fn parse_affine(s: &str, line: usize) -> Result<Affine, ModelError> {
    let mut parts = s.split_whitespace();
    let constant = parse_real(parts.next().ok_or(ModelError::Parse { line, message: "empty expression".into() })?, line)?;
    let mut coefs = BTreeMap::new();
    for t in parts {
        let (name, c) = t.rsplit_once(':').ok_or(ModelError::Parse { line, message: format!("bad term `{t}`") })?;
        coefs.insert(name.to_string(), parse_real(c, line)?);
    }
    Ok(Affine { constant, coefs })
}

pub fn import_model(text: &str) -> Result<Model, ModelError> {
    let mut r = Reader { lines: text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect(), at: 0 };
    let (no, h) = r.next()?;
    if h != HEADER {
        return Err(r.err(no, format!("expected `{HEADER}`")));
    }
    let (no, c) = r.next()?;
    let counts: Vec<usize> = c
        .strip_prefix("counts ")
        .map(|rest| rest.split_whitespace().filter_map(|s| s.parse().ok()).collect())
        .unwrap_or_default();
    if counts.len() != 5 {
        return Err(r.err(no, "expected `counts` with five integers"));
    }
    let mut m = Model::default();
    for (no, l) in r.section("VARS", counts[0])? {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(r.err(no, "variable lines have four fields"));
        }
        let kind = match f[1] {
            "continuous" => VarKind::Continuous,
            "binary" => VarKind::Binary,
            "integer" => VarKind::Integer,
            k => return Err(r.err(no, format!("unknown kind `{k}`"))),
        };
        m.variables.push(Variable { name: f[0].into(), kind, lower: parse_real(f[2], no)?, upper: parse_real(f[3], no)? });
    }
    for (no, l) in r.section("LINEAR", counts[1])? {
        let (sense, rest) = l.split_once(' ').ok_or(r.err(no, "missing right-hand side"))?;
        let sense = match sense {
            "<=" => Sense::Le,
            "=" => Sense::Eq,
            ">=" => Sense::Ge,
            s => return Err(r.err(no, format!("unknown sense `{s}`"))),
        };
        let a = parse_affine(rest, no)?;
        m.linear.push(LinearConstraint { coefs: a.coefs, sense, rhs: a.constant, tag: String::new() });
    }
    for (no, l) in r.section("SOC", counts[2])? {
        let mut parts = l.split(" | ");
        let k: usize = parts.next().and_then(|s| s.parse().ok()).ok_or(r.err(no, "missing row count"))?;
        let affs = parts.map(|s| parse_affine(s, no)).collect::<Result<Vec<_>, _>>()?;
        if affs.len() != k + 1 {
            return Err(r.err(no, format!("expected {} expressions", k + 1)));
        }
        let mut rows = affs;
        let rhs = rows.pop().expect("k + 1 expressions");
        m.soc.push(SocConstraint { rows, rhs, tag: String::new() });
    }
    for (no, l) in r.section("OBJ", counts[3])? {
        m.objective = parse_affine(l, no)?;
    }
    for (no, l) in r.section("ANNOT", counts[4])? {
        let (id, tag) = l.split_once(' ').ok_or(r.err(no, "annotation needs an id and a tag"))?;
        let slot = match (id.as_bytes().first(), id[1..].parse::<usize>()) {
            (Some(b'L'), Ok(i)) if i < m.linear.len() => &mut m.linear[i].tag,
            (Some(b'S'), Ok(i)) if i < m.soc.len() => &mut m.soc[i].tag,
            _ => return Err(r.err(no, format!("unknown constraint `{id}`"))),
        };
        *slot = tag.to_string();
    }
    if let Some(&(no, _)) = r.lines.get(r.at) {
        return Err(r.err(no, "trailing content"));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::compute_bounds;
    use crate::model_ir::build_mtz;

    #[test]
    fn variables_only() {
        let mut m = Model::default();
        m.add_var("a", VarKind::Continuous, 0.0, f64::INFINITY);
        let t = export_model(&m);
        assert_eq!(t, "XPPN-MODEL v1\ncounts 1 0 0 0 0\nVARS\na continuous 0.0000000000000000e0 inf\n");
        assert_eq!(import_model(&t).unwrap(), m);
    }

    #[test]
    fn mtz_round_trip() {
        let inst = crate::instance::generate(3, 2, 4, 1).unwrap();
        let m = build_mtz(&inst, &compute_bounds(&inst));
        let t = export_model(&m);
        let back = import_model(&t).unwrap();
        assert_eq!(export_model(&back), t);
        let declared: usize = t.lines().nth(1).unwrap().split_whitespace().skip(1).map(|s| s.parse::<usize>().unwrap()).sum();
        let sections = t.lines().filter(|l| ["VARS", "LINEAR", "SOC", "OBJ", "ANNOT"].contains(l)).count();
        assert_eq!(t.lines().count(), 2 + sections + declared);
    }

    #[test]
    fn diagnostics() {
        let err = import_model("XPPN-MODEL v1\ncounts 1 0 0 0 0\nVARS\na real 0 1\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 4, .. }));
    }
}
