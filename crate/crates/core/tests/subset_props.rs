use std::collections::BTreeSet;
use std::sync::Arc;

use ends_core::group::{ball, MarkedGroup};
use ends_core::report::rng;
use ends_core::subset::boundary::{boundary_decode, boundary_encode, boundary_pairs};
use ends_core::subset::cosets::project_h_invariant;
use ends_core::subset::expr::{parse_set, render};
use ends_core::subset::sample::random_commensurated;
use ends_core::subset::verify::{is_left_commensurated_up_to, quotient_eq};
use ends_core::subset::{Subgroup, Subset, SubsetSpec};
use proptest::prelude::*;

fn groups() -> [Arc<MarkedGroup>; 2] {
    [MarkedGroup::free_abelian(1).unwrap(), MarkedGroup::free(2).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn boolean_combinations_stay_commensurated(seed in any::<u64>(), which in 0usize..2) {
        let g = groups()[which].clone();
        let mut r = rng(seed);
        let a = random_commensurated(&g, 2, false, &mut r);
        let b = random_commensurated(&g, 2, false, &mut r);
        let combos = [
            a.clone(),
            b.clone(),
            a.clone().union(b.clone()),
            a.clone().intersection(b.clone()),
            a.clone().complement(),
        ];
        for spec in combos {
            let s = Subset::new(&g, spec).unwrap();
            let v = is_left_commensurated_up_to(&s, 6).unwrap();
            prop_assert!(v.is_exact(), "{} on {}: {:?}", s, g.spec(), v);
        }
    }

    #[test]
    fn decode_retracts_encode(seed in any::<u64>(), which in 0usize..2) {
        let g = groups()[which].clone();
        let u = Subset::new(&g, random_commensurated(&g, 2, true, &mut rng(seed))).unwrap();
        let k = boundary_encode(&u, 5).unwrap();
        let back = boundary_decode(&k, 5).unwrap();
        for x in ball(&g, 5).unwrap().elements() {
            prop_assert_eq!(back.contains(x), u.contains(x), "{} at {}", u, g.format(x));
        }
    }

    #[test]
    fn boundary_fixes_a_set_up_to_complement(seed in any::<u64>(), which in 0usize..2) {
        let g = groups()[which].clone();
        let u = Subset::new(&g, random_commensurated(&g, 2, false, &mut rng(seed))).unwrap();
        let pairs = boundary_pairs(&u, 5).unwrap();
        prop_assert_eq!(&pairs, &boundary_pairs(&u.complement(), 5).unwrap());
        let normalised = if u.contains(&g.identity()) { u.clone() } else { u.complement() };
        let decoded = boundary_decode(&boundary_encode(&normalised, 5).unwrap(), 5).unwrap();
        for x in ball(&g, 5).unwrap().elements() {
            prop_assert_eq!(decoded.contains(x), normalised.contains(x));
            prop_assert_eq!(!decoded.contains(x), normalised.complement().contains(x));
        }
    }

    #[test]
    fn empty_boundary_means_constant(seed in any::<u64>()) {
        let f2 = MarkedGroup::free(2).unwrap();
        let u = Subset::new(&f2, random_commensurated(&f2, 2, false, &mut rng(seed))).unwrap();
        if boundary_pairs(&u, 6).unwrap().is_empty() {
            let b = ball(&f2, 5).unwrap();
            let inside = b.elements().iter().filter(|x| u.contains(x)).count();
            prop_assert!(inside == 0 || inside == b.len());
        }
    }

    #[test]
    fn expressions_round_trip(seed in any::<u64>(), which in 0usize..2) {
        let g = groups()[which].clone();
        let spec = random_commensurated(&g, 3, false, &mut rng(seed));
        let text = render(&g, &spec);
        let parsed = parse_set(&g, &text).unwrap();
        prop_assert_eq!(render(&g, &parsed), text);
        let (a, b) = (Subset::new(&g, spec).unwrap(), Subset::new(&g, parsed).unwrap());
        for x in ball(&g, 4).unwrap().elements() {
            prop_assert_eq!(a.contains(x), b.contains(x));
        }
    }

    #[test]
    fn quotient_eq_ignores_finite_edits(seed in any::<u64>(), which in 0usize..2) {
        let g = groups()[which].clone();
        let mut r = rng(seed);
        let spec = random_commensurated(&g, 2, false, &mut r);
        let x = ends_core::subset::sample::random_element(&g, 4, &mut r);
        let a = Subset::new(&g, spec.clone()).unwrap();
        let (add, remove) = if a.contains(&x) {
            (BTreeSet::new(), BTreeSet::from([x]))
        } else {
            (BTreeSet::from([x]), BTreeSet::new())
        };
        let b = Subset::new(&g, spec.edited(add, remove)).unwrap();
        prop_assert!(quotient_eq(&a, &b, 6).unwrap().is_exact());
    }
}

#[test]
fn kernel_contains_the_constants() {
    for g in groups() {
        for text in ["all", "none"] {
            let u = Subset::parse(&g, text).unwrap();
            assert!(boundary_pairs(&u, 6).unwrap().is_empty());
        }
        let ray = Subset::parse(&g, if g.free_rank().is_some() { "cone(a)" } else { "ray" }).unwrap();
        assert!(!boundary_pairs(&ray, 6).unwrap().is_empty());
    }
}

#[test]
fn projection_vanishes_off_exceptions() {
    let g = MarkedGroup::parse("free_product([free_abelian(2), cyclic(2)])").unwrap();
    let u = Subset::parse(&g, "edit(last(2); +{a1}; -{b})").unwrap();
    let h = Subgroup::Factor(0);
    let p = project_h_invariant(&u, h, 6).unwrap();
    let b = ball(&g, 6).unwrap();
    let differ = b
        .elements()
        .iter()
        .filter(|x| g.word_length(&h.coset_rep(&g, x)) + 2 <= 6)
        .filter(|x| p.subset.contains(x) != u.contains(x))
        .count();
    let exceptional: usize = p.cosets.iter().map(|c| c.exceptions).sum();
    assert_eq!(differ, exceptional);
    assert_eq!(exceptional, 2);
    assert!(matches!(p.subset.spec(), SubsetSpec::CosetUnion { .. }));
}
