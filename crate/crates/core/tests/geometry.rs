mod common;

use common::*;
use proptest::prelude::*;
use xppn::geometry::{
    diameter_bound, max_distance_bound, min_distance, ConvexShape, Element, ElementKind, Point, SocSet,
};
use xppn_oracles::{rng, sample_points};

fn square_boundary(x0: f64, y0: f64, side: f64, step: f64) -> Vec<Point> {
    let k = (side / step).round() as usize;
    let mut out = Vec::new();
    for i in 0..k {
        let t = i as f64 * step;
        out.extend([pt(x0 + t, y0), pt(x0 + side, y0 + t), pt(x0 + side - t, y0 + side), pt(x0, y0 + side - t)]);
    }
    out
}

#[test]
fn square_to_chain_distance_matches_dense_sampling() {
    let sq = square(0.0, 0.0, 1.0);
    let chain = Element::chain(vec![pt(3.0, 0.0), pt(3.0, 2.0)], 0.0).unwrap();
    let (d, pa, pb) = min_distance(&sq, &chain, 1e-7);

    let step = 1e-3;
    let a = square_boundary(0.0, 0.0, 1.0, step);
    let b: Vec<Point> = (0..=2000).map(|i| pt(3.0, i as f64 * step)).collect();
    let sampled = a.iter().flat_map(|p| b.iter().map(move |q| p.dist(*q))).fold(f64::INFINITY, f64::min);

    const FROZEN: f64 = 2.0;
    assert!((sampled - FROZEN).abs() < 1e-12);
    assert!((d - FROZEN).abs() < 1e-6, "{d}");
    assert!((pa.x - 1.0).abs() < 1e-6 && (pb.x - 3.0).abs() < 1e-6);
    assert!((pa.y - pb.y).abs() < 1e-6 && (-1e-9..=1.0 + 1e-9).contains(&pa.y));
}

#[test]
fn ellipse_to_square_bound_covers_sampled_maximum() {
    let ell = Element::new(ElementKind::Ellipse { center: pt(0.0, 0.0), semi_axes: (2.0, 1.0), rotation: 0.0 }, 1.0).unwrap();
    let sq = square(5.0, 0.0, 1.0);
    let bound = max_distance_bound(&ell, &sq);

    const FROZEN: f64 = 8.082_762_530_298_219;
    assert!((FROZEN - (37f64.sqrt() + 2.0)).abs() < 1e-12);
    assert!((bound - FROZEN).abs() < 1e-9, "{bound}");

    let ring: Vec<Point> =
        (0..6284).map(|i| i as f64 * 1e-3).map(|t| pt(2.0 * t.cos(), t.sin())).collect();
    let edge = square_boundary(5.0, 0.0, 1.0, 1e-3);
    let sampled = ring.iter().flat_map(|p| edge.iter().map(move |q| p.dist(*q))).fold(0.0, f64::max);
    assert!(sampled <= bound + 1e-9, "{sampled} > {bound}");
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn projection_lands_in_the_element(e in element_strategy(), x in -20.0..120.0f64, y in -20.0..120.0f64) {
        let q = e.project(pt(x, y));
        prop_assert!(e.contains(q, 1e-9), "{q:?}");
    }

    #[test]
    fn projection_is_nearest(e in element_strategy(), x in -20.0..120.0f64, y in -20.0..120.0f64, seed in any::<u64>()) {
        let p = pt(x, y);
        let d = e.project(p).dist(p);
        for q in sample_points(&e, 1000, &mut rng(seed)) {
            prop_assert!(d <= q.dist(p) + 1e-9, "{d} > {}", q.dist(p));
        }
    }

    #[test]
    fn min_distance_is_symmetric(a in element_strategy(), b in element_strategy()) {
        let tol = 1e-7;
        let (dab, pa, pb) = min_distance(&a, &b, tol);
        let (dba, _, _) = min_distance(&b, &a, tol);
        prop_assert!((dab - dba).abs() <= 1e-9_f64.max(tol), "{dab} vs {dba}");
        prop_assert!((pa.dist(pb) - dab).abs() <= tol, "{} vs {dab}", pa.dist(pb));
        prop_assert!(a.contains(pa, 1e-6) && b.contains(pb, 1e-6));
    }

    #[test]
    fn distances_are_sandwiched(a in element_strategy(), b in element_strategy(), seed in any::<u64>()) {
        let (lo, _, _) = min_distance(&a, &b, 1e-7);
        let hi = max_distance_bound(&a, &b);
        let mut r = rng(seed);
        let (qa, qb) = (sample_points(&a, 1000, &mut r), sample_points(&b, 1000, &mut r));
        for d in qa.iter().zip(&qb).map(|(p, q)| p.dist(*q)) {
            prop_assert!(lo <= d + 1e-9 && d <= hi + 1e-9, "{lo} <= {d} <= {hi}");
        }
    }

    #[test]
    fn diameter_bounds_every_pair(e in element_strategy(), seed in any::<u64>()) {
        let m = diameter_bound(&e);
        let q = sample_points(&e, 1000, &mut rng(seed));
        for d in q[..500].iter().zip(&q[500..]).map(|(a, b)| a.dist(*b)) {
            prop_assert!(d <= m + 1e-9);
        }
    }

    #[test]
    fn chain_parameterization_is_lipschitz(e in chain_strategy(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let bp = e.chain_breakpoints().unwrap();
        let n = (bp.len() - 1) as f64;
        let longest = bp.windows(2).map(|w| w[0].dist(w[1])).fold(0.0, f64::max);
        let (l1, l2) = (s * n, t * n);
        let gap = e.chain_point_at(l1).unwrap().dist(e.chain_point_at(l2).unwrap());
        prop_assert!(gap <= longest * (l1 - l2).abs() + 1e-9);
    }

    #[test]
    fn disk_cone_rows_agree_with_the_disk(x in 0.0..100.0f64, y in 0.0..100.0f64, r in 0.5..20.0f64, seed in any::<u64>()) {
        use rand::Rng;
        let set = SocSet::new(ConvexShape::Disk { center: pt(x, y), radius: r }.to_soc_rows()).unwrap();
        let mut g = rng(seed);
        for _ in 0..1000 {
            let p = pt(x + g.gen_range(-2.0 * r..2.0 * r), y + g.gen_range(-2.0 * r..2.0 * r));
            let analytic = p.dist(pt(x, y)) - r;
            if analytic.abs() > 1e-9 {
                prop_assert_eq!(set.contains_exact(p, 0.0), analytic < 0.0);
            }
        }
    }
}
