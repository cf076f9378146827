use menuex_core::cli_io::{emit_scenario, parse_scenario_str, Rational};
use menuex_core::exhaustiveness::is_exhaustive;
use menuex_core::extremality::{extract_decomposition, is_extreme_finite, verify_certificate, ExtremalityVerdict};
use menuex_core::model::{AllocationSpace, Scenario};
use menuex_core::random::random_scenario;
use menuex_geometry::scalar::{add, ratio, scale};
use menuex_geometry::{GeneratorSet, Polyhedron, Scalar, Vector};
use proptest::prelude::*;

fn verdicts(s: &Scenario) -> (bool, bool) {
    let m = s.extended_menu().unwrap();
    let extreme = is_extreme_finite(&m, &s.space).unwrap().is_extreme();
    let exhaustive = is_exhaustive(&m, &s.space).unwrap().exhaustive;
    (extreme, exhaustive)
}

fn image(p: &[Scalar], lambda: &Scalar, t: &[Scalar]) -> Vector {
    add(&scale(lambda, p), t)
}

/// The scenario under `x ↦ λx + t`, applied to the allocation space, its veto and the menu.
fn transformed(s: &Scenario, lambda: &Scalar, t: &[Scalar]) -> Scenario {
    let d = s.dim();
    let vertices = s.space.vertices().iter().map(|v| image(v, lambda, t)).collect();
    let poly = Polyhedron::from_generators(d, &GeneratorSet::polytope(vertices)).unwrap();
    let veto = s.space.veto().map(|v| image(v, lambda, t));
    let space = AllocationSpace::from_halfspaces(d, poly.halfspaces(), veto).unwrap();
    let items = s.menu.items.iter().map(|p| image(p, lambda, t)).collect();
    Scenario::new(&s.label, space, s.cone.clone(), items).unwrap()
}

fn instance() -> impl Strategy<Value = Scenario> {
    (2usize..=3, 0u64..4000).prop_map(|(d, i)| random_scenario(d, 77, i).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdicts_ignore_item_order(s in instance(), r in 0usize..8) {
        let mut items = s.menu.items.clone();
        items.reverse();
        let n = items.len();
        items.rotate_left(r % n);
        let shuffled = s.with_items(&s.label, items).unwrap();
        prop_assert_eq!(verdicts(&s), verdicts(&shuffled));
    }

    #[test]
    fn verdicts_are_affine_invariant(s in instance(), l in 1i64..=5, q in 1i64..=3, t in proptest::collection::vec(-3i64..=3, 3)) {
        let lambda = ratio(l, q);
        let shift: Vector = t.iter().take(s.dim()).map(|&x| ratio(x, 2)).collect();
        prop_assert_eq!(verdicts(&s), verdicts(&transformed(&s, &lambda, &shift)));
    }

    #[test]
    fn scenario_files_round_trip(s in instance()) {
        let text = serde_json::to_string(&emit_scenario(&s)).unwrap();
        let back = parse_scenario_str(&text).unwrap();
        prop_assert_eq!(&back.menu.items, &s.menu.items);
        prop_assert_eq!(back.space.vertices(), s.space.vertices());
        prop_assert_eq!(back.space.veto(), s.space.veto());
        prop_assert_eq!(back.cone.polar_rays(), s.cone.polar_rays());
        prop_assert_eq!(verdicts(&back), verdicts(&s));
    }

    #[test]
    fn tampered_certificates_are_rejected(s in instance()) {
        let m = s.extended_menu().unwrap();
        if let ExtremalityVerdict::NotExtreme(dir) = is_extreme_finite(&m, &s.space).unwrap() {
            let cert = extract_decomposition(&m, &s.space, &s.cone, &dir).unwrap();
            prop_assert!(verify_certificate(&cert, &m, &s.space, &s.cone).is_ok());
            let mut forged = cert.clone();
            forged.menu_minus = cert.menu_plus.clone();
            prop_assert!(verify_certificate(&forged, &m, &s.space, &s.cone).is_err());
        }
    }

    #[test]
    fn rationals_round_trip_through_json(p in -1000i64..=1000, q in 1i64..=1000) {
        let r = Rational(ratio(p, q));
        let text = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&text).unwrap(), r);
    }
}
