mod common;

use common::*;
use proptest::prelude::*;
use xppn::benders::{
    benders_solve, canonical_tours, cut_value, master_solve, BendersConfig, BendersCut, BendersResult, BendersStatus,
    Eps,
};
use xppn::bounds::compute_bounds;
use xppn::geometry::Point;
use xppn::instance::{generate, Instance};
use xppn::touring::{solve_fixed_tour, SubproblemConfig, Tour};
use xppn_oracles::{circle_brute_force, circles, distinct_cycles, exhaustive_optimum, held_karp, random_order, rng};

fn solve(inst: &Instance) -> BendersResult {
    benders_solve(inst, Eps::default(), &BendersConfig::default()).unwrap()
}

fn assert_monotone_log(res: &BendersResult) {
    for w in res.log.windows(2) {
        assert!(w[1].lower_bound >= w[0].lower_bound, "LB fell: {} -> {}", w[0].lower_bound, w[1].lower_bound);
        assert!(w[1].upper_bound <= w[0].upper_bound, "UB rose: {} -> {}", w[0].upper_bound, w[1].upper_bound);
    }
}

#[test]
fn cuts_never_exceed_the_subproblem_cost() {
    let cfg = SubproblemConfig::default();
    for seed in 0..3 {
        let inst = generate(6, 1 + seed as u8, 1 + seed as u8, seed).unwrap();
        let bounds = compute_bounds(&inst);
        let mut r = rng(seed);
        for _ in 0..4 {
            let source = Tour::new(random_order(6, &mut r)).unwrap();
            let sol = solve_fixed_tour(&inst, &source, &cfg).unwrap();
            let cut = BendersCut::from_tour(&bounds, &source, sol.lower_bound.min(sol.cost));
            assert!((cut_value(&cut, &source) - sol.lower_bound.min(sol.cost)).abs() <= 1e-9);
            for _ in 0..10 {
                let other = Tour::new(random_order(6, &mut r)).unwrap();
                let truth = solve_fixed_tour(&inst, &other, &cfg).unwrap().cost;
                assert!(cut_value(&cut, &other) <= truth + 1e-6, "{} > {truth}", cut_value(&cut, &other));
            }
        }
    }
}

#[test]
fn master_matches_brute_force_min_max() {
    let inst = generate(6, 2, 1, 11).unwrap();
    let bounds = compute_bounds(&inst);
    let mut r = rng(11);
    let cuts: Vec<BendersCut> = (0..6)
        .map(|k| {
            let t = Tour::new(random_order(6, &mut r)).unwrap();
            BendersCut::from_tour(&bounds, &t, 100.0 + 10.0 * k as f64)
        })
        .collect();
    let tours = distinct_cycles(6);
    assert_eq!(tours.len(), 60);
    let value = |o: &Vec<usize>| {
        let t = Tour::new(o.clone()).unwrap();
        cuts.iter().map(|c| cut_value(c, &t)).fold(f64::NEG_INFINITY, f64::max)
    };
    let brute = tours.iter().map(value).fold(f64::INFINITY, f64::min);
    let (tour, lb) = master_solve(&cuts, 6, &BendersConfig::default()).unwrap();
    assert!((lb - brute).abs() <= 1e-9, "{lb} vs {brute}");
    assert!((value(&tour.order().to_vec()) - lb).abs() <= 1e-9);

    // The depth-first master on the same cuts.
    let dfs = BendersConfig { enum_threshold: 3, ..BendersConfig::default() };
    let (_, lb_dfs) = master_solve(&cuts, 6, &dfs).unwrap();
    assert!((lb_dfs - brute).abs() <= 1e-9, "{lb_dfs} vs {brute}");
}

#[test]
fn three_far_circles_match_the_grid() {
    let inst = Instance::new("far", vec![circle(10.0, 10.0, 1.0), circle(90.0, 15.0, 2.0), circle(40.0, 85.0, 1.5)]).unwrap();
    let res = solve(&inst);
    let grid = circle_brute_force(&circles(&inst).unwrap());
    assert_eq!(res.status, BendersStatus::Optimal);
    assert!((res.upper_bound - grid).abs() <= 1e-3 * grid, "{} vs {grid}", res.upper_bound);
}

#[test]
fn point_circles_reduce_to_the_tsp() {
    use rand::Rng;
    let mut r = rng(77);
    let points: Vec<Point> = (0..8).map(|_| pt(r.gen_range(0.0..100.0), r.gen_range(0.0..100.0))).collect();
    let inst = Instance::new("points", points.iter().map(|p| circle(p.x, p.y, 1e-12)).collect()).unwrap();
    let res = benders_solve(&inst, Eps::Absolute(1e-7), &BendersConfig::default()).unwrap();
    let hk = held_karp(&points);
    assert!((res.upper_bound - hk).abs() <= 1e-6, "{} vs {hk}", res.upper_bound);
    assert_monotone_log(&res);
}

#[test]
fn circles_through_one_point_cost_nothing() {
    let radius = 5.0;
    let inst = Instance::new(
        "star",
        (0..5)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 5.0;
                circle(50.0 + radius * a.cos(), 50.0 + radius * a.sin(), radius)
            })
            .collect(),
    )
    .unwrap();
    let res = solve(&inst);
    assert!(res.upper_bound <= 1e-4, "{}", res.upper_bound);
    assert!(res.iterations <= 2, "{}", res.iterations);
}

fn small_circles() -> impl Strategy<Value = Instance> {
    (3usize..=6, 1u8..=2, any::<u64>()).prop_map(|(n, r, s)| generate(n, r, 1, s).unwrap())
}

fn small_mixed() -> impl Strategy<Value = Instance> {
    (3usize..=5, 1u8..=4, 1u8..=4, any::<u64>()).prop_map(|(n, r, m, s)| generate(n, r, m, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn matches_exhaustive_enumeration(inst in small_circles()) {
        let res = solve(&inst);
        let best = exhaustive_optimum(&inst, &SubproblemConfig::default());
        prop_assert!(res.upper_bound <= best.cost + res.eps + 1e-6, "{} vs {}", res.upper_bound, best.cost);
        prop_assert!(res.lower_bound <= best.cost + 1e-6);
        prop_assert_eq!(res.status, BendersStatus::Optimal);
    }

    #[test]
    fn bounds_are_monotone_and_cuts_are_bounded(inst in small_mixed()) {
        let res = solve(&inst);
        assert_monotone_log(&res);
        prop_assert!(res.lower_bound <= res.upper_bound + 1e-9);
        prop_assert!(res.cuts.len() <= canonical_tours(inst.len()).len() + 2);
        prop_assert!((res.best.cost - res.upper_bound).abs() <= 1e-9);
    }
}
