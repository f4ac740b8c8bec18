//! Solution file.
//!
//! ```text
//! XPPN-SOLUTION v1
//! instance <name>
//! status <certified|approximate|evaluated>
//! cost <real>
//! lower_bound <real>
//! tour <v0> <v1> ...
//! point <v> <entry x> <entry y> <exit x> <exit y>
//! lambda <v> <entry λ> <exit λ>
//! edge <v> <w> <cost>
//! inner <v> <cost>
//! end
//! ```
//!
//! `point` and `inner` lines are in element order, `lambda` lines only for
//! chains, `edge` lines in tour order. Reals carry 17 significant digits.

use super::{ChainParams, SolveStats, SolveStatus, Tour, TourSolution, TouringError};
use crate::geometry::Point;

const HEADER: &str = "XPPN-SOLUTION v1";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_solution(sol: &TourSolution, instance_name: &str) -> String {
    let mut out = format!("{HEADER}\n");
    out += &format!("instance {instance_name}\n");
    out += &format!("status {}\n", sol.status.as_str());
    out += &format!("cost {}\n", real(sol.cost));
    out += &format!("lower_bound {}\n", real(sol.lower_bound));
    let order: Vec<String> = sol.tour.order().iter().map(usize::to_string).collect();
    out += &format!("tour {}\n", order.join(" "));
    for v in 0..sol.entry.len() {
        out += &format!(
            "point {v} {} {} {} {}\n",
            real(sol.entry[v].x),
            real(sol.entry[v].y),
            real(sol.exit[v].x),
            real(sol.exit[v].y)
        );
    }
    for (v, l) in sol.lambda.iter().enumerate() {
        if let Some(l) = l {
            out += &format!("lambda {v} {} {}\n", real(l.entry), real(l.exit));
        }
    }
    for ((v, w), c) in sol.tour.edges().zip(&sol.out_costs) {
        out += &format!("edge {v} {w} {}\n", real(*c));
    }
    for (v, c) in sol.in_costs.iter().enumerate() {
        out += &format!("inner {v} {}\n", real(*c));
    }
    out += "end\n";
    out
}

/// A parsed solution file and the instance name it names.
pub fn read_solution(text: &str) -> Result<(TourSolution, String), TouringError> {
    let err = |line: usize, message: String| TouringError::Parse { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(err(1, format!("expected `{HEADER}`"))),
    }
    let mut name = String::new();
    let mut status = None;
    let (mut cost, mut lower_bound) = (None, None);
    let mut order = None;
    let mut points: Vec<(usize, Point, Point)> = Vec::new();
    let mut lambdas: Vec<(usize, ChainParams)> = Vec::new();
    let mut out_costs = Vec::new();
    let mut inner: Vec<(usize, f64)> = Vec::new();
    let mut ended = false;
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let num = |i: usize| -> Result<f64, TouringError> {
            fields
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| err(no, format!("`{key}` needs a number in field {}", i + 1)))
        };
        let idx = |i: usize| -> Result<usize, TouringError> {
            fields
                .get(i)
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| err(no, format!("`{key}` needs an index in field {}", i + 1)))
        };
        match key {
            "instance" => name = rest.to_string(),
            "status" => {
                status = Some(match rest {
                    "certified" => SolveStatus::Certified,
                    "approximate" => SolveStatus::Approximate,
                    "evaluated" => SolveStatus::Evaluated,
                    other => return Err(err(no, format!("unknown status `{other}`"))),
                })
            }
            "cost" => cost = Some(num(0)?),
            "lower_bound" => lower_bound = Some(num(0)?),
            "tour" => {
                order = Some((0..fields.len()).map(idx).collect::<Result<Vec<_>, _>>()?);
            }
            "point" => points.push((idx(0)?, Point::new(num(1)?, num(2)?), Point::new(num(3)?, num(4)?))),
            "lambda" => lambdas.push((idx(0)?, ChainParams { entry: num(1)?, exit: num(2)? })),
            "edge" => out_costs.push(num(2)?),
            "inner" => inner.push((idx(0)?, num(1)?)),
            "end" => {
                ended = true;
                break;
            }
            other => return Err(err(no, format!("unknown record `{other}`"))),
        }
    }
    if !ended {
        return Err(err(text.lines().count(), "missing `end`".into()));
    }
    let order = order.ok_or_else(|| err(0, "missing `tour`".into()))?;
    let tour = Tour::new(order)?;
    let n = tour.len();
    if points.len() != n || points.iter().enumerate().any(|(i, p)| p.0 != i) {
        return Err(err(0, format!("expected `point` lines for elements 0..{n} in order")));
    }
    let mut lambda = vec![None; n];
    for (v, l) in lambdas {
        if v >= n {
            return Err(err(0, format!("lambda for unknown element {v}")));
        }
        lambda[v] = Some(l);
    }
    let mut in_costs = vec![0.0; n];
    for (v, c) in inner {
        if v >= n {
            return Err(err(0, format!("inner cost for unknown element {v}")));
        }
        in_costs[v] = c;
    }
    let sol = TourSolution {
        tour,
        entry: points.iter().map(|p| p.1).collect(),
        exit: points.iter().map(|p| p.2).collect(),
        lambda,
        out_costs,
        in_costs,
        cost: cost.ok_or_else(|| err(0, "missing `cost`".into()))?,
        lower_bound: lower_bound.unwrap_or(0.0),
        status: status.unwrap_or(SolveStatus::Evaluated),
        stats: SolveStats::default(),
    };
    Ok((sol, name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Element;
    use crate::instance::Instance;
    use crate::touring::{solve_fixed_tour, SubproblemConfig};

    #[test]
    fn round_trip() {
        let chain = Element::chain(vec![Point::new(0.0, 5.0), Point::new(3.0, 5.0), Point::new(3.0, 8.0)], 0.3).unwrap();
        let inst = Instance::new(
            "demo",
            vec![Element::circle(Point::ORIGIN, 1.0).unwrap(), chain, Element::circle(Point::new(6.0, 0.0), 1.0).unwrap()],
        )
        .unwrap();
        let sol = solve_fixed_tour(&inst, &Tour::identity(3), &SubproblemConfig::default()).unwrap();
        let text = write_solution(&sol, "demo");
        let (back, name) = read_solution(&text).unwrap();
        assert_eq!(name, "demo");
        assert_eq!(write_solution(&back, &name), text);
        assert_eq!(back.entry, sol.entry);
        assert_eq!(back.lambda, sol.lambda);
    }

    #[test]
    fn bad_header() {
        assert!(matches!(read_solution("nope\n"), Err(TouringError::Parse { line: 1, .. })));
    }
}
