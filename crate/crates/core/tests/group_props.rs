use std::collections::HashSet;
use std::sync::Arc;

use ends_core::cayley::{estimate_end_count_window, separates_in, EndVerdict};
use ends_core::group::{ball, Letter, MarkedGroup};
use proptest::prelude::*;

const SPECS: [&str; 6] = [
    "free(3)",
    "free_abelian(2)",
    "free_product([cyclic(3), free(1)])",
    "sym(4)",
    "sum_z2(5)",
    "sym_chain(4)",
];

fn group(i: usize) -> Arc<MarkedGroup> {
    MarkedGroup::parse(SPECS[i]).unwrap()
}

fn word_strategy() -> impl Strategy<Value = (usize, Vec<(bool, usize)>)> {
    (0..SPECS.len(), prop::collection::vec((any::<bool>(), 0usize..64), 0..12))
}

fn letters(g: &MarkedGroup, raw: &[(bool, usize)]) -> Vec<Letter> {
    let n = g.generators().len();
    raw.iter()
        .map(|&(neg, i)| {
            let l = (i % n) as Letter + 1;
            if neg {
                -l
            } else {
                l
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduce_is_idempotent((i, raw) in word_strategy()) {
        let g = group(i);
        let x = g.reduce(&letters(&g, &raw)).unwrap();
        prop_assert!(g.contains(&x));
        let again = g.reduce(&g.word_of(&x)).unwrap();
        prop_assert_eq!(again, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn multiplication_is_associative(
        (i, a) in word_strategy(),
        b in prop::collection::vec((any::<bool>(), 0usize..64), 0..8),
        c in prop::collection::vec((any::<bool>(), 0usize..64), 0..8),
    ) {
        let g = group(i);
        let x = g.reduce(&letters(&g, &a)).unwrap();
        let y = g.reduce(&letters(&g, &b)).unwrap();
        let z = g.reduce(&letters(&g, &c)).unwrap();
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
        prop_assert!(g.is_identity(&g.mul(&x, &g.inverse(&x))));
        prop_assert!(g.word_length(&g.mul(&x, &y)) <= g.word_length(&x) + g.word_length(&y));
    }

    #[test]
    fn level_of_product_is_at_most_the_max(a in 0usize..10_000, b in 0usize..10_000, chain in 0usize..2) {
        let g = if chain == 0 { MarkedGroup::sum_z2(7).unwrap() } else { MarkedGroup::sym_chain(5).unwrap() };
        let all = g.table_elements().unwrap();
        let (x, y) = (&all[a % all.len()], &all[b % all.len()]);
        let l = |z| g.level(z).unwrap();
        prop_assert!(l(&g.mul(x, y)) <= l(x).max(l(y)));
    }
}

#[test]
fn balls_grow_and_free_spheres_match() {
    for k in 1..=3usize {
        let g = MarkedGroup::free(k).unwrap();
        let big = ball(&g, 5).unwrap();
        for r in 0..5 {
            let small = ball(&g, r).unwrap();
            assert!(small.elements().iter().all(|x| big.contains(x)));
            assert_eq!(&big.elements()[..small.len()], small.elements());
        }
        let sizes = big.sphere_sizes();
        for (r, &size) in sizes.iter().enumerate().skip(1) {
            assert_eq!(size, 2 * k * (2 * k - 1).pow(r as u32 - 1), "F_{k}, r = {r}");
        }
    }
    for spec in SPECS {
        let g = MarkedGroup::parse(spec).unwrap();
        let b = ball(&g, 4).unwrap();
        let total: usize = b.sphere_sizes().iter().sum();
        assert_eq!(total, b.len(), "{spec}");
    }
}

#[test]
fn annulus_counts() {
    let f2 = MarkedGroup::free(2).unwrap();
    let est = estimate_end_count_window(&f2, 8, 2).unwrap();
    for &(r, c) in &est.counts {
        assert_eq!(c, 4 * 3usize.pow(r), "r = {r}");
    }
    assert!(est.counts.windows(2).all(|w| w[0].1 <= w[1].1));
    for spec in ["free_abelian(1)", "free_product([cyclic(2), cyclic(2)])"] {
        let g = MarkedGroup::parse(spec).unwrap();
        let est = estimate_end_count_window(&g, 9, 2).unwrap();
        assert!(est.counts.iter().all(|&(_, c)| c == 2), "{spec}: {:?}", est.counts);
        assert_eq!(est.verdict, EndVerdict::Two);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn separation_is_symmetric_and_monotone(
        xi in 0usize..10_000,
        yi in 0usize..10_000,
        cut in prop::collection::hash_set(0usize..10_000, 0..6),
        extra in prop::collection::hash_set(0usize..10_000, 0..6),
    ) {
        thread_local! {
            static BALL: ends_core::Ball = ball(&MarkedGroup::free(2).unwrap(), 5).unwrap();
        }
        BALL.with(|b| {
            let inner = ball(b.group(), 2).unwrap().len();
            let n = b.len();
            let (x, y) = (xi % n, yi % n);
            let f: HashSet<usize> = cut.iter().map(|i| i % inner).filter(|&i| i != x && i != y).collect();
            let mut f2: HashSet<usize> = f.clone();
            f2.extend(extra.iter().map(|i| i % n).filter(|&i| i != x && i != y));
            let (ex, ey) = (b.element(x), b.element(y));
            let s = separates_in(b, &f, ex, ey).unwrap();
            prop_assert_eq!(s, separates_in(b, &f, ey, ex).unwrap());
            if s {
                prop_assert!(separates_in(b, &f2, ex, ey).unwrap());
            }
            Ok(())
        })?;
    }
}
