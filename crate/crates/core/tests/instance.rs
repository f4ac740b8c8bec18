use proptest::prelude::*;
use xppn::geometry::ElementKind;
use xppn::instance::{generate, read_instance, write_instance};

fn anchors(e: &xppn::geometry::Element) -> Vec<xppn::geometry::Point> {
    match e.kind() {
        ElementKind::Circle { center, .. } => vec![*center],
        ElementKind::Polygon { vertices } => {
            let n = vertices.len() as f64;
            vec![vertices.iter().fold(xppn::geometry::Point::ORIGIN, |a, p| a + *p) / n]
        }
        ElementKind::Chain { breakpoints } => breakpoints.clone(),
        _ => vec![],
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn generation_is_a_function_of_its_arguments(size in 2usize..15, r in 1u8..=4, m in 1u8..=4, seed in any::<u64>()) {
        let a = generate(size, r, m, seed).unwrap();
        prop_assert_eq!(&a, &generate(size, r, m, seed).unwrap());
        prop_assert_eq!(write_instance(&a), write_instance(&generate(size, r, m, seed).unwrap()));
        prop_assert_ne!(&a, &generate(size, r, m, seed.wrapping_add(1)).unwrap());
    }

    #[test]
    fn centers_and_breakpoints_stay_in_the_square(size in 2usize..15, r in 1u8..=4, m in 1u8..=4, seed in any::<u64>()) {
        for e in generate(size, r, m, seed).unwrap().elements() {
            for p in anchors(e) {
                prop_assert!((-1e-9..=100.0 + 1e-9).contains(&p.x) && (-1e-9..=100.0 + 1e-9).contains(&p.y), "{p:?}");
            }
        }
    }

    #[test]
    fn mixtures_have_every_kind(size in 3usize..15, r in 1u8..=4, seed in any::<u64>()) {
        let inst = generate(size, r, 4, seed).unwrap();
        for kind in ["circle", "polygon", "chain"] {
            prop_assert!(inst.elements().iter().any(|e| e.kind_name() == kind));
        }
    }

    #[test]
    fn files_round_trip(size in 2usize..10, r in 1u8..=4, m in 1u8..=4, seed in any::<u64>()) {
        let a = generate(size, r, m, seed).unwrap();
        let text = write_instance(&a);
        let b = read_instance(&text).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(write_instance(&b), text);
    }
}
