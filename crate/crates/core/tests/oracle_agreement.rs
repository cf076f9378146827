use menuex_core::exhaustiveness::{homothety_cross_check, is_exhaustive};
use menuex_core::extremality::{
    def_polytope_cross_check, extract_decomposition, is_extreme_finite, verify_certificate, ExtremalityVerdict,
};
use menuex_core::planar::classify_2d;
use menuex_core::random::random_scenario;
use menuex_geometry::scalar::format_vec;

fn check(d: usize, n: u64, seed: u64) {
    let mut extreme = 0;
    for i in 0..n {
        let s = random_scenario(d, seed, i).unwrap();
        let m = s.extended_menu().unwrap();
        let verdict = is_extreme_finite(&m, &s.space).unwrap();
        let lifted = def_polytope_cross_check(&m, &s.space).unwrap();
        let items: Vec<String> = s.menu.items.iter().map(|p| format_vec(p)).collect();
        assert_eq!(verdict.is_extreme(), lifted, "{} {:?}", s.label, items);
        if d == 2 {
            let p = classify_2d(&m, &s.space, s.cone.is_unrestricted()).unwrap();
            assert_eq!(
                verdict.is_extreme(),
                p.is_extreme(),
                "{} {:?} cone {:?} verts {:?} planar {:?}",
                s.label,
                items,
                s.cone.rays(),
                m.vertices(),
                p
            );
        }
        let exh = is_exhaustive(&m, &s.space).unwrap().exhaustive;
        if m.vertices().len() >= 2 {
            assert_eq!(exh, homothety_cross_check(&m, &s.space).unwrap(), "{}", s.label);
        }
        match verdict {
            ExtremalityVerdict::Extreme => {
                extreme += 1;
                assert!(exh);
            }
            ExtremalityVerdict::NotExtreme(dir) => {
                let cert = extract_decomposition(&m, &s.space, &s.cone, &dir).unwrap();
                assert!(verify_certificate(&cert, &m, &s.space, &s.cone).is_ok());
            }
        }
    }
    println!("d={d}: {extreme}/{n} extreme");
}

#[test]
fn random_oracles_agree_in_the_plane() {
    check(2, 200, 21);
}

#[test]
fn random_oracles_agree_in_three_dimensions() {
    check(3, 200, 22);
}

#[test]
fn random_oracles_agree_in_four_dimensions() {
    check(4, 200, 23);
}
