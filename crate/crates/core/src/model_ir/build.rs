use super::{Affine, Assignment, Model, ModelError, Sense, VarKind};
use crate::bounds::BoundsTable;
use crate::geometry::{ElementKind, Point, SocRow};
use crate::instance::Instance;
use crate::touring::TourSolution;

const INF: f64 = f64::INFINITY;

fn x(i: u8, v: usize, c: char) -> String {
    format!("x{i}_{v}_{c}")
}

fn z(v: usize, w: usize) -> String {
    format!("z_{v}_{w}")
}

fn d_out(v: usize, w: usize) -> String {
    format!("d_out_{v}_{w}")
}

fn p(v: usize, w: usize) -> String {
    format!("p_{v}_{w}")
}

fn d_in(v: usize) -> String {
    format!("d_in_{v}")
}

/// `B x + b` and `cᵀx + d` of a row over the point variables `x{i}_v_*`.
fn row_parts(row: &SocRow, i: u8, v: usize) -> ([Affine; 2], Affine) {
    let lhs = [0, 1].map(|r| {
        Affine::constant(if r == 0 { row.offset.x } else { row.offset.y })
            .plus(x(i, v, 'x'), row.mat[r][0])
            .plus(x(i, v, 'y'), row.mat[r][1])
    });
    let rhs = Affine::constant(row.constant).plus(x(i, v, 'x'), row.lin.x).plus(x(i, v, 'y'), row.lin.y);
    (lhs, rhs)
}

struct Builder<'a> {
    inst: &'a Instance,
    bounds: &'a BoundsTable,
    model: Model,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a Instance, bounds: &'a BoundsTable) -> Self {
        Self { inst, bounds, model: Model::default() }
    }

    /// Point variables and the membership rows of every element.
    fn domains(&mut self) {
        for v in 0..self.inst.len() {
            let (lo, hi) = self.inst.element(v).bounding_box();
            for i in [1, 2] {
                self.model.add_var(x(i, v, 'x'), VarKind::Continuous, lo.x, hi.x);
                self.model.add_var(x(i, v, 'y'), VarKind::Continuous, lo.y, hi.y);
            }
            self.domain(v);
        }
    }

    fn domain(&mut self, v: usize) {
        let e = self.inst.element(v);
        match e.kind() {
            ElementKind::Union { members } => {
                let (lo, hi) = e.bounding_box();
                let corners = [lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
                for i in [1u8, 2] {
                    let mut pick = Affine::constant(0.0);
                    for (j, member) in members.iter().enumerate() {
                        let chi = format!("chi{i}_{v}_{j}");
                        self.model.add_var(&chi, VarKind::Binary, 0.0, 1.0);
                        pick = pick.plus(&chi, 1.0);
                        for row in member.rows() {
                            let big = corners.iter().map(|&c| row.violation(c)).fold(0.0, f64::max);
                            let (lhs, rhs) = row_parts(row, i, v);
                            let rhs = rhs.plus_constant(big).plus(&chi, -big);
                            if row.is_linear() {
                                self.model.add_linear(rhs, Sense::Ge, 0.0, format!("(U-C) member {j} halfplane"));
                            } else {
                                self.model.add_soc(lhs.to_vec(), rhs, format!("(U-C) member {j} cone"));
                            }
                        }
                    }
                    self.model.add_linear(pick, Sense::Eq, 1.0, "(U-C) one member");
                }
            }
            ElementKind::Chain { breakpoints } => self.chain(v, breakpoints, e.coverage()),
            _ => {
                let shape = e.convex_shape().expect("convex element");
                for i in [1u8, 2] {
                    for row in shape.to_soc_rows() {
                        let (lhs, rhs) = row_parts(&row, i, v);
                        if row.is_linear() {
                            self.model.add_linear(rhs, Sense::Ge, 0.0, "(C-C) halfplane");
                        } else {
                            self.model.add_soc(lhs.to_vec(), rhs, "(C-C) cone");
                        }
                    }
                }
            }
        }
    }

    fn chain(&mut self, v: usize, a: &[Point], coverage: f64) {
        let n = a.len() - 1;
        let nf = n as f64;
        let big = nf + 1.0;
        let m = &mut self.model;
        for i in [1u8, 2] {
            let lam = format!("lam{i}_{v}");
            let gam = |j: usize| format!("gam{i}_{v}_{j}");
            let mu = |j: usize| format!("mu{i}_{v}_{j}");
            m.add_var(&lam, VarKind::Continuous, 0.0, nf);
            for j in 0..=n {
                m.add_var(gam(j), VarKind::Continuous, 0.0, 1.0);
            }
            for j in 0..n {
                m.add_var(mu(j), VarKind::Binary, 0.0, 1.0);
            }
            for j in 0..n {
                let jf = j as f64;
                let link = Affine::var(&lam, 1.0).plus(gam(j + 1), -1.0);
                m.add_linear(link.clone().plus(mu(j), -big), Sense::Ge, jf - big, "(P-C) segment lower limit");
                m.add_linear(link.plus(mu(j), big), Sense::Le, jf + big, "(P-C) segment upper limit");
            }
            m.add_linear(Affine::var(gam(0), 1.0).plus(mu(0), -1.0), Sense::Le, 0.0, "(P-C) weight on chosen segment");
            for j in 1..n {
                m.add_linear(
                    Affine::var(gam(j), 1.0).plus(mu(j - 1), -1.0).plus(mu(j), -1.0),
                    Sense::Le,
                    0.0,
                    "(P-C) weight on chosen segment",
                );
            }
            m.add_linear(Affine::var(gam(n), 1.0).plus(mu(n - 1), -1.0), Sense::Le, 0.0, "(P-C) weight on chosen segment");
            let one_mu = (0..n).fold(Affine::constant(0.0), |acc, j| acc.plus(mu(j), 1.0));
            m.add_linear(one_mu, Sense::Eq, 1.0, "(P-C) one segment");
            let one_gam = (0..=n).fold(Affine::constant(0.0), |acc, j| acc.plus(gam(j), 1.0));
            m.add_linear(one_gam, Sense::Eq, 1.0, "(P-C) convex weights");
            for (c, coord) in [('x', 0), ('y', 1)] {
                let expr = (0..=n).fold(Affine::var(x(i, v, c), 1.0), |acc, j| {
                    acc.plus(gam(j), if coord == 0 { -a[j].x } else { -a[j].y })
                });
                m.add_linear(expr, Sense::Eq, 0.0, "(P-C) point from weights");
            }
        }
        let (lmin, lmax, u) = (format!("lmin_{v}"), format!("lmax_{v}"), format!("u_{v}"));
        m.add_var(&lmin, VarKind::Continuous, 0.0, nf);
        m.add_var(&lmax, VarKind::Continuous, 0.0, nf);
        m.add_var(&u, VarKind::Binary, 0.0, 1.0);
        m.add_linear(
            Affine::var(format!("lam1_{v}"), 1.0).plus(format!("lam2_{v}"), -1.0).plus(&lmax, -1.0).plus(&lmin, 1.0),
            Sense::Eq,
            0.0,
            "(alpha-C) split of the parameter difference",
        );
        m.add_linear(Affine::var(&lmax, 1.0).plus(&lmin, 1.0), Sense::Ge, coverage * nf, "(alpha-C) coverage");
        m.add_linear(Affine::var(&lmax, 1.0).plus(&u, nf), Sense::Le, nf, "(alpha-C) direction");
        m.add_linear(Affine::var(&lmin, 1.0).plus(&u, -nf), Sense::Le, 0.0, "(alpha-C) direction");
    }

    fn norm_rows(a: (u8, usize), b: (u8, usize), scale: f64) -> Vec<Affine> {
        ['x', 'y']
            .iter()
            .map(|&c| Affine::var(x(a.0, a.1, c), scale).plus(x(b.0, b.1, c), -scale))
            .collect()
    }

    /// Distance, product and McCormick rows of directed pair `(v, w)`,
    /// exit of `v` to entry of `w`, guarded by binary `zname`.
    fn edge(&mut self, v: usize, w: usize, names: (&str, &str, &str), scale: f64, tag: &str) {
        let (zn, dn, pn) = names;
        let big = scale * self.bounds.upper(v, w);
        let small = scale * self.bounds.lower(v, w);
        let m = &mut self.model;
        m.add_var(dn, VarKind::Continuous, 0.0, INF);
        m.add_var(pn, VarKind::Continuous, 0.0, INF);
        m.add_soc(Self::norm_rows((1, v), (2, w), scale), Affine::var(dn, 1.0), format!("{tag}(D1)"));
        m.add_linear(Affine::var(pn, 1.0).plus(dn, -1.0).plus(zn, -big), Sense::Ge, -big, format!("{tag}(LIN-Mc)"));
        m.add_linear(Affine::var(pn, 1.0).plus(zn, -small), Sense::Ge, 0.0, format!("{tag}(valid) p_e >= m_e z_e"));
        self.model.objective = std::mem::take(&mut self.model.objective).plus(pn, 1.0);
    }

    fn inner(&mut self) {
        for v in 0..self.inst.len() {
            let m = &mut self.model;
            m.add_var(d_in(v), VarKind::Continuous, 0.0, INF);
            m.add_soc(Self::norm_rows((1, v), (2, v), 1.0), Affine::var(d_in(v), 1.0), "(D2)");
            m.add_linear(Affine::var(d_in(v), 1.0), Sense::Le, self.bounds.diameter(v), "(valid) d_v <= M_v");
            let f = self.inst.element(v).discount();
            m.objective = std::mem::take(&mut m.objective).plus(d_in(v), f);
        }
    }

    /// Directed edge variables and rows for all ordered pairs.
    fn directed_edges(&mut self) {
        let n = self.inst.len();
        for v in 0..n {
            for w in 0..n {
                if v != w {
                    self.model.add_var(z(v, w), VarKind::Binary, 0.0, 1.0);
                    self.edge(v, w, (&z(v, w), &d_out(v, w), &p(v, w)), 1.0, "");
                }
            }
        }
    }

    fn assignment_rows(&mut self) {
        let n = self.inst.len();
        for v in 0..n {
            let out = (0..n).filter(|&w| w != v).fold(Affine::constant(0.0), |a, w| a.plus(z(v, w), 1.0));
            self.model.add_linear(out, Sense::Eq, 1.0, "(C1)");
        }
        for v in 0..n {
            let inc = (0..n).filter(|&w| w != v).fold(Affine::constant(0.0), |a, w| a.plus(z(w, v), 1.0));
            self.model.add_linear(inc, Sense::Eq, 1.0, "(C2)");
        }
    }
}

/// The compact formulation with order variables.
///
/// Vertex 0 is the depot (`s_0 = 1`). Two rows differ from their printed
/// form: (MTZ1) is stated for arcs not entering the depot, since the
/// closing arc cannot satisfy it, and (MTZ4) reads its binary as `z_v_w`,
/// because with `z_w_v` every tour violates it.
pub fn build_mtz(inst: &Instance, bounds: &BoundsTable) -> Model {
    let mut b = Builder::new(inst, bounds);
    let n = inst.len();
    let nf = n as f64;
    b.domains();
    b.directed_edges();
    b.inner();
    b.assignment_rows();
    let s = |v: usize| format!("s_{v}");
    let m = &mut b.model;
    for v in 0..n {
        m.add_var(s(v), VarKind::Integer, 1.0, nf);
    }
    for v in 0..n {
        for w in 1..n {
            if v != w {
                m.add_linear(Affine::var(z(v, w), nf).plus(s(v), 1.0).plus(s(w), -1.0), Sense::Le, nf - 1.0, "(MTZ1)");
            }
        }
    }
    m.add_linear(Affine::var(s(0), 1.0), Sense::Eq, 1.0, "(MTZ2)");
    for v in 1..n {
        m.add_linear(Affine::var(s(v), 1.0), Sense::Ge, 2.0, "(MTZ3)");
        m.add_linear(Affine::var(s(v), 1.0), Sense::Le, nf, "(MTZ3)");
    }
    for v in 0..n {
        for w in 1..n {
            if v != w {
                m.add_linear(
                    Affine::var(s(v), 1.0).plus(s(w), -1.0).plus(z(v, w), nf),
                    Sense::Le,
                    nf - 1.0,
                    "(MTZ4) binary read as z_v_w; coincides with (MTZ1), possibly redundant",
                );
            }
        }
    }
    for v in 1..n {
        for w in 0..n {
            if v != w {
                m.add_linear(
                    Affine::var(s(v), 1.0).plus(s(w), -1.0).plus(z(w, v), nf - 2.0),
                    Sense::Le,
                    nf - 1.0,
                    "(MTZ5) as printed, possibly redundant",
                );
            }
        }
    }
    b.model
}

/// The subtour-elimination formulation without its exponential family.
///
/// The symmetric variant has one binary per unordered pair `v < w` and
/// degree-two rows; its distance rows measure exit of `v` to entry of `w`,
/// which equals the traversed distance when entry and exit coincide.
pub fn build_sec(inst: &Instance, bounds: &BoundsTable, symmetric: bool) -> (Model, String) {
    let mut b = Builder::new(inst, bounds);
    let n = inst.len();
    b.domains();
    if symmetric {
        for v in 0..n {
            for w in v + 1..n {
                b.model.add_var(z(v, w), VarKind::Binary, 0.0, 1.0);
                b.edge(v, w, (&z(v, w), &d_out(v, w), &p(v, w)), 1.0, "");
            }
        }
        b.inner();
        for v in 0..n {
            let deg = (0..n)
                .filter(|&w| w != v)
                .fold(Affine::constant(0.0), |a, w| a.plus(z(v.min(w), v.max(w)), 1.0));
            b.model.add_linear(deg, Sense::Eq, 2.0, "(sSEC) degree two");
        }
    } else {
        b.directed_edges();
        b.inner();
        b.assignment_rows();
    }
    let note = format!(
        "subtour elimination rows (one per vertex subset, {} in total) are not materialized; \
         check integral edge values with separate_sec and add the returned subsets as cuts",
        if n >= 2 { format!("2^{n} - 2") } else { "0".into() }
    );
    (b.model, note)
}

/// Stage-dependent scaling of distances and discounts, indexed by stage
/// `t = 0..n` (stage `t + 1` in the one-based notation of variable names).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeParams {
    /// `outer[t][v][w]` scales the distance from `v` to `w` leaving at stage `t`.
    pub outer: Vec<Vec<Vec<f64>>>,
    /// `inner[t][v]` scales the distance inside `v` at stage `t`.
    pub inner: Vec<Vec<f64>>,
    /// `discount[t][v]`.
    pub discount: Vec<Vec<f64>>,
}

impl TimeParams {
    /// Unit scaling and the elements' own discounts at every stage.
    pub fn uniform(inst: &Instance) -> Self {
        let n = inst.len();
        let f: Vec<f64> = inst.elements().iter().map(|e| e.discount()).collect();
        Self { outer: vec![vec![vec![1.0; n]; n]; n], inner: vec![vec![1.0; n]; n], discount: vec![f; n] }
    }

    fn check(&self, n: usize) -> Result<(), ModelError> {
        let ok = self.outer.len() == n
            && self.outer.iter().all(|m| m.len() == n && m.iter().all(|r| r.len() == n))
            && self.inner.len() == n
            && self.inner.iter().all(|r| r.len() == n)
            && self.discount.len() == n
            && self.discount.iter().all(|r| r.len() == n);
        if ok {
            Ok(())
        } else {
            Err(ModelError::Mismatch(format!("stage parameters must cover {n} stages of {n} elements")))
        }
    }
}

fn y(v: usize, t: usize) -> String {
    format!("y_{v}_{}", t + 1)
}

/// The stage-indexed formulation. Products of distances and stage binaries
/// are linearized like (LIN-Mc); the transition from the last stage back to
/// the first closes the route.
pub fn build_time_dependent(inst: &Instance, bounds: &BoundsTable, params: &TimeParams) -> Result<Model, ModelError> {
    let n = inst.len();
    params.check(n)?;
    let mut b = Builder::new(inst, bounds);
    b.domains();
    for v in 0..n {
        for t in 0..n {
            b.model.add_var(y(v, t), VarKind::Binary, 0.0, 1.0);
        }
    }
    for t in 0..n {
        for v in 0..n {
            for w in 0..n {
                if v == w {
                    continue;
                }
                let s = t + 1;
                let (zn, dn, pn) = (format!("z_{v}_{w}_{s}"), format!("d_out_{v}_{w}_{s}"), format!("p_{v}_{w}_{s}"));
                b.model.add_var(&zn, VarKind::Binary, 0.0, 1.0);
                b.edge(v, w, (&zn, &dn, &pn), params.outer[t][v][w], "stage ");
                let next = (t + 1) % n;
                let tag = if t + 1 < n { "stage transition" } else { "stage closing transition" };
                b.model.add_linear(Affine::var(y(v, t), 1.0).plus(y(w, next), 1.0).plus(&zn, -1.0), Sense::Le, 1.0, tag);
            }
        }
    }
    for t in 0..n {
        for v in 0..n {
            let s = t + 1;
            let (dn, qn) = (format!("d_in_{v}_{s}"), format!("q_{v}_{s}"));
            let scale = params.inner[t][v];
            let big = scale * bounds.diameter(v);
            let m = &mut b.model;
            m.add_var(&dn, VarKind::Continuous, 0.0, INF);
            m.add_var(&qn, VarKind::Continuous, 0.0, INF);
            m.add_soc(Builder::norm_rows((1, v), (2, v), scale), Affine::var(&dn, 1.0), "stage (D2)");
            m.add_linear(
                Affine::var(&qn, 1.0).plus(&dn, -1.0).plus(y(v, t), -big),
                Sense::Ge,
                -big,
                "stage inner (LIN-Mc) with y",
            );
            m.objective = std::mem::take(&mut m.objective).plus(&qn, params.discount[t][v]);
        }
    }
    for t in 0..n {
        let row = (0..n).fold(Affine::constant(0.0), |a, v| a.plus(y(v, t), 1.0));
        b.model.add_linear(row, Sense::Eq, 1.0, "stage holds one element");
    }
    for v in 0..n {
        let row = (0..n).fold(Affine::constant(0.0), |a, t| a.plus(y(v, t), 1.0));
        b.model.add_linear(row, Sense::Eq, 1.0, "element visited once");
    }
    Ok(b.model)
}

/// Point, chain, union and inner-distance values shared by all formulations.
fn point_values(inst: &Instance, sol: &TourSolution, a: &mut Assignment) {
    for (v, e) in inst.elements().iter().enumerate() {
        let (ex, en) = (sol.exit[v], sol.entry[v]);
        for (i, pt) in [(1u8, ex), (2, en)] {
            a.insert(x(i, v, 'x'), pt.x);
            a.insert(x(i, v, 'y'), pt.y);
        }
        a.insert(d_in(v), ex.dist(en));
        match e.kind() {
            ElementKind::Chain { breakpoints } => {
                let n = breakpoints.len() - 1;
                let lam = |pt: Point, given: Option<f64>| given.or_else(|| e.chain_param_of(pt)).unwrap_or(0.0);
                let params = sol.lambda[v];
                let l1 = lam(ex, params.map(|c| c.exit));
                let l2 = lam(en, params.map(|c| c.entry));
                for (i, l) in [(1u8, l1), (2, l2)] {
                    let l = l.clamp(0.0, n as f64);
                    let seg = (l.floor() as usize).min(n - 1);
                    let t = l - seg as f64;
                    a.insert(format!("lam{i}_{v}"), l);
                    for j in 0..=n {
                        let g = if j == seg {
                            1.0 - t
                        } else if j == seg + 1 {
                            t
                        } else {
                            0.0
                        };
                        a.insert(format!("gam{i}_{v}_{j}"), g);
                    }
                    for j in 0..n {
                        a.insert(format!("mu{i}_{v}_{j}"), if j == seg { 1.0 } else { 0.0 });
                    }
                }
                let diff = l1 - l2;
                a.insert(format!("lmax_{v}"), diff.max(0.0));
                a.insert(format!("lmin_{v}"), (-diff).max(0.0));
                a.insert(format!("u_{v}"), if diff < 0.0 { 1.0 } else { 0.0 });
            }
            ElementKind::Union { members } => {
                for (i, pt) in [(1u8, ex), (2, en)] {
                    let excess = |j: usize| members[j].rows().iter().map(|r| r.violation(pt)).fold(f64::NEG_INFINITY, f64::max);
                    let best = (0..members.len()).min_by(|&a, &b| excess(a).total_cmp(&excess(b))).unwrap_or(0);
                    for j in 0..members.len() {
                        a.insert(format!("chi{i}_{v}_{j}"), if j == best { 1.0 } else { 0.0 });
                    }
                }
            }
            _ => {}
        }
    }
}

fn directed_edge_values(inst: &Instance, sol: &TourSolution, a: &mut Assignment) {
    let n = inst.len();
    let used: Vec<(usize, usize)> = sol.tour.edges().collect();
    for v in 0..n {
        for w in 0..n {
            if v != w {
                let on = if used.contains(&(v, w)) { 1.0 } else { 0.0 };
                let d = sol.exit[v].dist(sol.entry[w]);
                a.insert(z(v, w), on);
                a.insert(d_out(v, w), d);
                a.insert(p(v, w), on * d);
            }
        }
    }
}

/// Values of every variable of [`build_mtz`] induced by a solution.
pub fn mtz_assignment(inst: &Instance, sol: &TourSolution) -> Assignment {
    let mut a = Assignment::new();
    point_values(inst, sol, &mut a);
    directed_edge_values(inst, sol, &mut a);
    for (k, &v) in sol.tour.order().iter().enumerate() {
        a.insert(format!("s_{v}"), (k + 1) as f64);
    }
    a
}

/// Values of every variable of [`build_sec`] induced by a solution.
pub fn sec_assignment(inst: &Instance, sol: &TourSolution, symmetric: bool) -> Assignment {
    let mut a = Assignment::new();
    point_values(inst, sol, &mut a);
    if symmetric {
        let n = inst.len();
        let used: Vec<(usize, usize)> = sol.tour.edges().map(|(v, w)| (v.min(w), v.max(w))).collect();
        for v in 0..n {
            for w in v + 1..n {
                let on = if used.contains(&(v, w)) { 1.0 } else { 0.0 };
                let d = sol.exit[v].dist(sol.entry[w]);
                a.insert(z(v, w), on);
                a.insert(d_out(v, w), d);
                a.insert(p(v, w), on * d);
            }
        }
    } else {
        directed_edge_values(inst, sol, &mut a);
    }
    a
}

/// Values of every variable of [`build_time_dependent`] induced by a
/// solution, visiting `sol.tour.order()[t]` at stage `t`.
pub fn time_assignment(inst: &Instance, sol: &TourSolution, params: &TimeParams) -> Assignment {
    let n = inst.len();
    let mut a = Assignment::new();
    point_values(inst, sol, &mut a);
    let order = sol.tour.order();
    for t in 0..n {
        for v in 0..n {
            let here = if order[t] == v { 1.0 } else { 0.0 };
            a.insert(y(v, t), here);
            let s = t + 1;
            let inner = params.inner[t][v] * sol.exit[v].dist(sol.entry[v]);
            a.insert(format!("d_in_{v}_{s}"), inner);
            a.insert(format!("q_{v}_{s}"), here * inner);
            for w in 0..n {
                if v == w {
                    continue;
                }
                let on = if order[t] == v && order[(t + 1) % n] == w { 1.0 } else { 0.0 };
                let d = params.outer[t][v][w] * sol.exit[v].dist(sol.entry[w]);
                a.insert(format!("z_{v}_{w}_{s}"), on);
                a.insert(format!("d_out_{v}_{w}_{s}"), d);
                a.insert(format!("p_{v}_{w}_{s}"), on * d);
            }
        }
    }
    a
}
