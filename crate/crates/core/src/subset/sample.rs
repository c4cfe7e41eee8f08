//! Seeded random left-commensurated subset descriptions, for sweeps.

use std::collections::BTreeSet;

use rand::Rng;

use super::{membership, SubsetSpec};
use crate::group::{Element, GroupKind, Letter, MarkedGroup};

/// A product of at most `len` random Cayley steps.
pub fn random_element<R: Rng>(g: &MarkedGroup, len: usize, rng: &mut R) -> Element {
    let steps = g.steps();
    let n = rng.gen_range(0..=len);
    (0..n).fold(g.identity(), |x, _| g.mul(&x, &steps[rng.gen_range(0..steps.len())]))
}

fn random_word<R: Rng>(rank: usize, len: usize, rng: &mut R) -> Vec<Letter> {
    let mut w: Vec<Letter> = Vec::new();
    while w.len() < len {
        let i = rng.gen_range(1..=rank as Letter);
        let l = if rng.gen_bool(0.5) { i } else { -i };
        if w.last() != Some(&-l) {
            w.push(l);
        }
    }
    w
}

fn random_elements<R: Rng>(g: &MarkedGroup, rng: &mut R) -> BTreeSet<Element> {
    let n = rng.gen_range(0..=3);
    (0..n).map(|_| random_element(g, 3, rng)).collect()
}

fn atom<R: Rng>(g: &MarkedGroup, rng: &mut R) -> SubsetSpec {
    let structured = match g.kind() {
        GroupKind::Free { rank } => {
            let len = rng.gen_range(0..=2);
            Some(SubsetSpec::SuffixCone(random_word(*rank, len, rng)))
        }
        GroupKind::FreeAbelian { rank: 1 } => {
            Some(SubsetSpec::HalfSpace { coord: 0, min: rng.gen_range(-3..=3) })
        }
        _ => None,
    };
    match (rng.gen_range(0..4), structured) {
        (0, _) => SubsetSpec::Finite(random_elements(g, rng)),
        (1, _) => SubsetSpec::Cofinite(random_elements(g, rng)),
        (_, Some(s)) => s,
        (_, None) => SubsetSpec::Finite(random_elements(g, rng)),
    }
}

fn combine<R: Rng>(g: &MarkedGroup, depth: u32, rng: &mut R) -> SubsetSpec {
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(g, rng);
    }
    match rng.gen_range(0..3) {
        0 => SubsetSpec::Union(vec![combine(g, depth - 1, rng), combine(g, depth - 1, rng)]),
        1 => SubsetSpec::Intersection(vec![combine(g, depth - 1, rng), combine(g, depth - 1, rng)]),
        _ => SubsetSpec::Complement(Box::new(combine(g, depth - 1, rng))),
    }
}

/// A Boolean combination of commensurated atoms (cones in free groups,
/// half-lines in `Z`, finite and cofinite sets elsewhere). With
/// `with_identity`, the identity is added when missing.
pub fn random_commensurated<R: Rng>(g: &MarkedGroup, depth: u32, with_identity: bool, rng: &mut R) -> SubsetSpec {
    let spec = combine(g, depth, rng);
    if with_identity && !membership(g, &spec, &g.identity()) {
        SubsetSpec::Union(vec![spec, SubsetSpec::Finite(BTreeSet::from([g.identity()]))])
    } else {
        spec
    }
}
