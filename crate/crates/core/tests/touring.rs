mod common;

use common::*;
use proptest::prelude::*;
use xppn::bounds::{compute_bounds, pairwise_disjoint};
use xppn::geometry::Point;
use xppn::instance::{generate, Instance};
use xppn::touring::{evaluate, solve_fixed_tour, SubproblemConfig, Tour, TourSolution};
use xppn_oracles::{circle_cycle_oracle, circles, random_order, rng, sample_points};

fn solve(inst: &Instance, tour: &Tour) -> TourSolution {
    solve_fixed_tour(inst, tour, &SubproblemConfig::default()).unwrap()
}

#[test]
fn four_circles_match_the_angular_grid() {
    let inst = generate(4, 2, 1, 7).unwrap();
    let tour = Tour::new(vec![0, 2, 1, 3]).unwrap();
    let sol = solve(&inst, &tour);
    let grid = circle_cycle_oracle(&circles(&inst).unwrap(), tour.order());

    const FROZEN: f64 = 220.583_498_696_471_1;
    assert!((grid - FROZEN).abs() < 1e-6, "{grid}");
    assert!((sol.cost - grid).abs() <= 5e-3 * grid, "{} vs {grid}", sol.cost);
    assert!(sol.cost <= grid + 1e-6);
}

#[test]
fn three_collinear_circles_by_hand() {
    let inst = Instance::new("line", vec![circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 1.0), circle(10.0, 0.0, 1.0)]).unwrap();
    let tour = Tour::identity(3);
    let entry = [pt(1.0, 0.0), pt(4.0, 0.0), pt(9.0, 0.0)];
    let exit = [pt(1.0, 0.0), pt(6.0, 0.0), pt(9.0, 0.0)];
    let sol = evaluate(&inst, &tour, &entry, &exit).unwrap();
    // 1→4, 6→9, 9→1 outside, 4→6 inside.
    let by_hand = 3.0 + 3.0 + 8.0 + 2.0;
    assert_eq!(by_hand, 16.0);
    let edges: f64 = sol.out_costs.iter().sum::<f64>() + sol.in_costs.iter().sum::<f64>();
    assert!((sol.cost - by_hand).abs() < 1e-12 && (edges - sol.cost).abs() < 1e-12);

    // With every element met at one point the optimum is the doubled span.
    let best = solve(&inst, &tour);
    assert!((best.cost - 16.0).abs() < 1e-6, "{}", best.cost);
}

#[test]
fn overlap_can_force_an_interior_point() {
    // The best route dips from C to the tops of A and D and back up to E.
    // B covers the stretch between A and D without containing either, so
    // with B's cost-free detour removed the optimum is unchanged and B's
    // point lies on that stretch, inside B.
    let c = circle(-10.0, 10.0, 0.5);
    let a = circle(0.0, 0.0, 1.0);
    let b = circle(0.75, 0.0, 1.2);
    let d = circle(1.5, 0.0, 1.0);
    let e = circle(10.0, 10.0, 0.5);
    let with_b = Instance::new("lens", vec![c.clone(), a.clone(), b, d.clone(), e.clone()]).unwrap();
    let without_b = Instance::new("lens", vec![c, a, d, e]).unwrap();
    let sol = solve(&with_b, &Tour::identity(5));
    let reference = solve(&without_b, &Tour::identity(4));
    assert!((sol.cost - reference.cost).abs() < 1e-6, "{} vs {}", sol.cost, reference.cost);
    let inside = |p: Point| with_b.element(2).boundary_distance(p).unwrap();
    assert!(inside(reference.exit[1]) > 0.1 && inside(reference.entry[2]) > 0.1);
    assert!(inside(sol.entry[2]) > 0.1, "{:?}", sol.entry[2]);
}

/// The instance relabeled so that the mirror image of `tour` is the
/// identity, and the mirrored solution on it.
fn mirrored(inst: &Instance, sol: &TourSolution) -> (Instance, Vec<Point>, Vec<Point>) {
    let order = sol.tour.order();
    let n = order.len();
    let old: Vec<usize> = (0..n).map(|k| order[(n - k) % n]).collect();
    let elements = old.iter().map(|&v| inst.element(v).clone()).collect();
    let entry = old.iter().map(|&v| sol.exit[v]).collect();
    let exit = old.iter().map(|&v| sol.entry[v]).collect();
    (Instance::new("mirror", elements).unwrap(), entry, exit)
}

fn instance_and_tour() -> impl Strategy<Value = (Instance, Tour)> {
    (3usize..6, 1u8..=4, 1u8..=4, any::<u64>()).prop_map(|(n, r, m, seed)| {
        let inst = generate(n, r, m, seed).unwrap();
        let tour = Tour::new(random_order(n, &mut rng(seed))).unwrap();
        (inst, tour)
    })
}

fn convex_instance_and_tour() -> impl Strategy<Value = (Instance, Tour)> {
    (3usize..7, 1u8..=4, 1u8..=2, any::<u64>()).prop_map(|(n, r, m, seed)| {
        let inst = generate(n, r, m, seed).unwrap();
        let tour = Tour::new(random_order(n, &mut rng(seed))).unwrap();
        (inst, tour)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn solutions_are_feasible_and_descent_is_monotone((inst, tour) in instance_and_tour()) {
        let sol = solve(&inst, &tour);
        for (v, p) in sol.points() {
            prop_assert!(inst.element(v).contains(p, 1e-6));
        }
        for (v, e) in inst.elements().iter().enumerate() {
            if e.is_chain() {
                let l = sol.lambda[v].expect("chain parameters");
                prop_assert!((l.entry - l.exit).abs() >= e.coverage() * e.segment_count() as f64 - 1e-6);
            }
        }
        let parts: f64 = sol.out_costs.iter().sum::<f64>() + sol.in_costs.iter().sum::<f64>();
        prop_assert!((parts - sol.cost).abs() <= 1e-9 * (1.0 + sol.cost));
        for sweeps in &sol.stats.sweeps {
            prop_assert!(sweeps.windows(2).all(|w| w[1] <= w[0]), "{sweeps:?}");
        }
        prop_assert!(sol.lower_bound <= sol.cost + 1e-9);
    }

    #[test]
    fn mirrored_traversal_has_the_same_cost((inst, tour) in instance_and_tour()) {
        let sol = solve(&inst, &tour);
        let (mirror, entry, exit) = mirrored(&inst, &sol);
        let n = inst.len();
        let lambda: Vec<_> = (0..n)
            .map(|k| sol.lambda[sol.tour.order()[(n - k) % n]].map(|l| xppn::touring::ChainParams { entry: l.exit, exit: l.entry }))
            .collect();
        let back = xppn::touring::evaluate_with_params(&mirror, &Tour::identity(n), &entry, &exit, Some(&lambda)).unwrap();
        prop_assert!((back.cost - sol.cost).abs() <= 1e-7, "{} vs {}", back.cost, sol.cost);
        let resolved = solve(&mirror, &Tour::identity(n));
        prop_assert!((resolved.cost - sol.cost).abs() <= 1e-6 * (1.0 + sol.cost), "{} vs {}", resolved.cost, sol.cost);
    }

    #[test]
    fn unit_discount_meets_each_convex_element_once_on_its_boundary((inst, tour) in convex_instance_and_tour()) {
        let sol = solve(&inst, &tour);
        for v in 0..inst.len() {
            prop_assert!(sol.entry[v].dist(sol.exit[v]) <= 1e-5);
        }
        if pairwise_disjoint(&compute_bounds(&inst)) {
            for (v, p) in sol.points() {
                let d = inst.element(v).boundary_distance(p).expect("convex element");
                prop_assert!(d <= 1e-4, "element {v}: {d}");
            }
        }
    }

    #[test]
    fn cost_is_convex_in_the_points((inst, tour) in convex_instance_and_tour(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let draws: Vec<Vec<Point>> = inst.elements().iter().map(|e| sample_points(e, 4, &mut r)).collect();
        let pick = |k: usize| draws.iter().map(|d| d[k]).collect::<Vec<_>>();
        let (e1, x1, e2, x2) = (pick(0), pick(1), pick(2), pick(3));
        let mid = |a: &[Point], b: &[Point]| a.iter().zip(b).map(|(p, q)| p.lerp(*q, 0.5)).collect::<Vec<_>>();
        let c1 = evaluate(&inst, &tour, &e1, &x1).unwrap().cost;
        let c2 = evaluate(&inst, &tour, &e2, &x2).unwrap().cost;
        let cm = evaluate(&inst, &tour, &mid(&e1, &e2), &mid(&x1, &x2)).unwrap().cost;
        prop_assert!(cm <= 0.5 * (c1 + c2) + 1e-9);
    }
}
