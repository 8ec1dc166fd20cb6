use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;

use gsl_core::cclab::{
    complex_validate, euler_characteristic_report, homology_rank, instance_rng, mapping_cone, quotient_complex,
    random_complex, random_cycles, ChainMap, FreeComplex, FuzzParams,
};
use gsl_core::fox::alexander_complex;
use gsl_core::milnor::{mu_table_with, parse_link};
use gsl_core::nilq::{magnus_image, truncated_quotient, witt};
use gsl_core::{Bounds, Exec, Presentation, Word};
use rand::Rng;

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    fs::read_to_string(p).unwrap()
}

fn word() -> impl Strategy<Value = Word> {
    proptest::collection::vec((0usize..3, prop_oneof![Just(-1i64), Just(1i64), Just(2i64)]), 0..7)
        .prop_map(|runs| Word::from_runs(runs).reduced())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn alexander_complexes_are_complexes(rels in proptest::collection::vec(word(), 0..3)) {
        let p = Presentation::new("P", vec!["a".into(), "b".into(), "c".into()], rels, false).unwrap();
        let c = FreeComplex::from_alexander(&alexander_complex(&p).unwrap());
        prop_assert!(complex_validate(&c).valid);
        let e = euler_characteristic_report(&c);
        prop_assert!(!e.falsification);
    }

    #[test]
    fn magnus_is_multiplicative(u in word(), v in word()) {
        let uv = magnus_image(&u.concat(&v), 3, 3);
        let prod = magnus_image(&u, 3, 3).mul(&magnus_image(&v, 3, 3));
        prop_assert_eq!(uv.coeff_vector(), prod.coeff_vector());
    }

    #[test]
    fn identity_cones_are_acyclic(seed in 0u64..1000) {
        let c = random_complex(&mut instance_rng(seed, 0), &FuzzParams::default());
        let cone = mapping_cone(&ChainMap::identity(&c)).unwrap();
        prop_assert!(complex_validate(&cone).valid);
        for p in 0..=cone.top() {
            prop_assert_eq!(homology_rank(&cone, p), 0);
        }
    }

    #[test]
    fn quotient_complexes_stay_complexes(seed in 0u64..1000) {
        let mut rng = instance_rng(seed, 1);
        let c = random_complex(&mut rng, &FuzzParams::default());
        let p = rng.gen_range(0..=c.top());
        let cycles = random_cycles(&mut rng, &c, p);
        let d = quotient_complex(&c, &cycles, p).unwrap();
        prop_assert!(complex_validate(&d).valid);
        prop_assert!(homology_rank(&d, p) <= homology_rank(&c, p));
        for q in 0..p {
            prop_assert_eq!(homology_rank(&d, q), homology_rank(&c, q));
        }
    }
}

#[test]
fn lcs_of_free_products_with_relators_is_bounded_by_witt() {
    let b = Bounds::default();
    let rels = [
        "rel x^-1 y^-1 x y",
        "rel y^-1 x^-1 y x y^-1 x^-1 y^-1 x y^2",
        "rel x^2 y^-3",
        "rel x y x^-1 y^-2",
    ];
    for r in rels {
        let p = gsl_core::presentations::parse_presentation(&format!("gens x y\n{r}\n")).unwrap();
        let nq = truncated_quotient(&p, 4, &b).unwrap();
        for (k, &l) in nq.l().iter().enumerate() {
            assert!(l as u64 <= witt(2, k as u64 + 1), "{r}: l_{} = {l}", k + 1);
        }
    }
}

#[test]
fn milnor_stable_under_rewrite_depth() {
    let b = Bounds::default();
    for name in ["hopf_wirtinger.lnk", "borromean.lnk", "hopf.lnk"] {
        let l = parse_link(&data(name)).unwrap();
        let base = mu_table_with(&l, 3, 2, &b, Exec::Sequential).unwrap();
        for depth in 3..=5 {
            let t = mu_table_with(&l, 3, depth, &b, Exec::Parallel).unwrap();
            assert_eq!(t.entries, base.entries, "{name} at depth {depth}");
        }
    }
}
