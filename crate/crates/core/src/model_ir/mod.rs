//! Mixed-integer conic models of the problem: construction of the compact
//! (MTZ), subtour-elimination and stage-indexed formulations, assignment
//! checking, subtour separation and a canonical text format.
//!
//! Variable names:
//!
//! | name | meaning |
//! |------|---------|
//! | `z_v_w` | edge `v → w` used (SEC symmetric: `v < w`, either direction) |
//! | `d_out_v_w`, `p_v_w` | exit of `v` to entry of `w` distance, and its product with `z_v_w` |
//! | `d_in_v` | entry to exit distance inside `v` |
//! | `s_v` | visit position |
//! | `x1_v_x`, `x1_v_y` / `x2_v_x`, `x2_v_y` | exit / entry point |
//! | `lam1_v`, `gam1_v_j`, `mu1_v_j` (and `…2…`) | chain parameter, breakpoint weight, segment choice |
//! | `lmin_v`, `lmax_v`, `u_v` | coverage split and direction of a chain |
//! | `chi1_v_j`, `chi2_v_j` | union member holding the exit / entry |
//! | `y_v_t` | element `v` visited at stage `t` |

mod build;
mod text;

use std::collections::BTreeMap;
use std::fmt;

pub use build::{
    build_mtz, build_sec, build_time_dependent, mtz_assignment, sec_assignment, time_assignment, TimeParams,
};
pub use text::{export_model, import_model};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("assignment has no value for `{0}`")]
    MissingVariable(String),
    #[error("constraint {constraint} refers to undeclared variable `{name}`")]
    Undeclared { constraint: String, name: String },
    #[error("edge ({0}, {1}) has non-integral value {2}")]
    NonIntegral(usize, usize, f64),
    #[error("edge ({0}, {1}) is outside 0..{2}")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("model text, line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Continuous => "continuous",
            VarKind::Binary => "binary",
            VarKind::Integer => "integer",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// `constant + Σ coef · var`, coefficients keyed by variable name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Affine {
    pub constant: f64,
    pub coefs: BTreeMap<String, f64>,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, coefs: BTreeMap::new() }
    }

    pub fn var(name: impl Into<String>, coef: f64) -> Self {
        Self::constant(0.0).plus(name, coef)
    }

    /// Adds `coef · name`, merging repeated names.
    pub fn plus(mut self, name: impl Into<String>, coef: f64) -> Self {
        if coef != 0.0 {
            *self.coefs.entry(name.into()).or_insert(0.0) += coef;
        }
        self
    }

    pub fn plus_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn eval(&self, values: &BTreeMap<String, f64>) -> Result<f64, ModelError> {
        self.coefs.iter().try_fold(self.constant, |acc, (name, c)| {
            values.get(name).map(|v| acc + c * v).ok_or_else(|| ModelError::MissingVariable(name.clone()))
        })
    }
}

/// `Σ coef · var  sense  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefs: BTreeMap<String, f64>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: String,
}

/// `‖(rows[0], rows[1], …)‖ ≤ rhs` with every entry affine.
#[derive(Debug, Clone, PartialEq)]
pub struct SocConstraint {
    pub rows: Vec<Affine>,
    pub rhs: Affine,
    pub tag: String,
}

/// A minimization model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model {
    pub variables: Vec<Variable>,
    pub linear: Vec<LinearConstraint>,
    pub soc: Vec<SocConstraint>,
    pub objective: Affine,
}

impl Model {
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) {
        let (lower, upper) = if kind == VarKind::Binary { (0.0, 1.0) } else { (lower, upper) };
        self.variables.push(Variable { name: name.into(), kind, lower, upper });
    }

    pub fn add_linear(&mut self, expr: Affine, sense: Sense, rhs: f64, tag: impl Into<String>) {
        self.linear.push(LinearConstraint { coefs: expr.coefs, sense, rhs: rhs - expr.constant, tag: tag.into() });
    }

    pub fn add_soc(&mut self, rows: Vec<Affine>, rhs: Affine, tag: impl Into<String>) {
        self.soc.push(SocConstraint { rows, rhs, tag: tag.into() });
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn count(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    /// Names of variables whose name starts with `prefix`.
    pub fn names_with_prefix(&self, prefix: &str) -> Vec<&str> {
        self.variables.iter().filter(|v| v.name.starts_with(prefix)).map(|v| v.name.as_str()).collect()
    }

    /// Linear rows whose tag starts with `tag`.
    pub fn rows_tagged(&self, tag: &str) -> Vec<&LinearConstraint> {
        self.linear.iter().filter(|c| c.tag.starts_with(tag)).collect()
    }

    /// Checks that every referenced variable is declared and every constraint tagged.
    pub fn validate(&self) -> Result<(), ModelError> {
        let declared: std::collections::BTreeSet<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
        let check = |id: String, names: &mut dyn Iterator<Item = &String>| -> Result<(), ModelError> {
            for n in names {
                if !declared.contains(n.as_str()) {
                    return Err(ModelError::Undeclared { constraint: id, name: n.clone() });
                }
            }
            Ok(())
        };
        for (i, c) in self.linear.iter().enumerate() {
            check(format!("L{i}"), &mut c.coefs.keys())?;
            if c.tag.is_empty() {
                return Err(ModelError::Mismatch(format!("L{i} has no annotation")));
            }
        }
        for (i, c) in self.soc.iter().enumerate() {
            check(format!("S{i}"), &mut c.rows.iter().chain(std::iter::once(&c.rhs)).flat_map(|a| a.coefs.keys()))?;
            if c.tag.is_empty() {
                return Err(ModelError::Mismatch(format!("S{i} has no annotation")));
            }
        }
        check("objective".into(), &mut self.objective.coefs.keys())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Bound,
    Integrality,
    Linear,
    Soc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `L<i>`, `S<i>` or a variable name.
    pub subject: String,
    pub tag: String,
    pub amount: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {} [{}] by {:.3e}", self.kind, self.subject, self.tag, self.amount)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
    pub objective: f64,
}

/// Variable values keyed by name.
pub type Assignment = BTreeMap<String, f64>;

/// Every bound, integrality, linear and conic violation larger than `tol`.
pub fn check_assignment(model: &Model, assignment: &Assignment, tol: f64) -> Result<CheckReport, ModelError> {
    let mut violations = Vec::new();
    for v in &model.variables {
        let x = *assignment.get(&v.name).ok_or_else(|| ModelError::MissingVariable(v.name.clone()))?;
        let out = (v.lower - x).max(x - v.upper);
        if out > tol {
            violations.push(Violation { kind: ViolationKind::Bound, subject: v.name.clone(), tag: "bounds".into(), amount: out });
        }
        if v.kind != VarKind::Continuous {
            let frac = (x - x.round()).abs();
            if frac > tol {
                violations.push(Violation {
                    kind: ViolationKind::Integrality,
                    subject: v.name.clone(),
                    tag: v.kind.as_str().into(),
                    amount: frac,
                });
            }
        }
    }
    for (i, c) in model.linear.iter().enumerate() {
        let lhs = Affine { constant: 0.0, coefs: c.coefs.clone() }.eval(assignment)?;
        let amount = match c.sense {
            Sense::Le => lhs - c.rhs,
            Sense::Ge => c.rhs - lhs,
            Sense::Eq => (lhs - c.rhs).abs(),
        };
        if amount > tol {
            violations.push(Violation { kind: ViolationKind::Linear, subject: format!("L{i}"), tag: c.tag.clone(), amount });
        }
    }
    for (i, c) in model.soc.iter().enumerate() {
        let mut sq = 0.0;
        for r in &c.rows {
            let v = r.eval(assignment)?;
            sq += v * v;
        }
        let amount = sq.sqrt() - c.rhs.eval(assignment)?;
        if amount > tol {
            violations.push(Violation { kind: ViolationKind::Soc, subject: format!("S{i}"), tag: c.tag.clone(), amount });
        }
    }
    let objective = model.objective.eval(assignment)?;
    Ok(CheckReport { violations, objective })
}

/// Connected components of the support graph of an integral edge vector on
/// `n` vertices, smallest first (ties by smallest vertex). Empty when the
/// support is a single component spanning all vertices.
pub fn separate_sec(n: usize, z: &[((usize, usize), f64)]) -> Result<Vec<Vec<usize>>, ModelError> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for &((v, w), value) in z {
        if v >= n || w >= n {
            return Err(ModelError::EdgeOutOfRange(v, w, n));
        }
        if (value - value.round()).abs() > 1e-9 || !(0.0..=1.0).contains(&value.round()) {
            return Err(ModelError::NonIntegral(v, w, value));
        }
        if value.round() == 1.0 {
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    if groups.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(vs: &[usize]) -> Vec<((usize, usize), f64)> {
        (0..vs.len()).map(|k| ((vs[k], vs[(k + 1) % vs.len()]), 1.0)).collect()
    }

    #[test]
    fn separation() {
        assert!(separate_sec(5, &cycle(&[0, 3, 1, 4, 2])).unwrap().is_empty());
        let mut z = cycle(&[0, 1, 2]);
        z.extend(cycle(&[3, 4, 5]));
        assert_eq!(separate_sec(6, &z).unwrap(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let mut z = cycle(&[0, 1, 2, 3]);
        z.extend(cycle(&[4, 5]));
        assert_eq!(separate_sec(6, &z).unwrap()[0], vec![4, 5]);
        assert!(matches!(separate_sec(3, &[((0, 1), 0.5)]), Err(ModelError::NonIntegral(0, 1, _))));
    }

    #[test]
    fn integrality_and_bounds() {
        let mut m = Model::default();
        m.add_var("z_0_1", VarKind::Binary, 0.0, 1.0);
        m.add_linear(Affine::var("z_0_1", 1.0), Sense::Le, 1.0, "(test)");
        let a: Assignment = [("z_0_1".to_string(), 0.5)].into_iter().collect();
        let r = check_assignment(&m, &a, 1e-6).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].subject, "z_0_1");
        assert_eq!(r.violations[0].kind, ViolationKind::Integrality);
        assert!(matches!(check_assignment(&m, &Assignment::new(), 1e-6), Err(ModelError::MissingVariable(_))));
    }
}
