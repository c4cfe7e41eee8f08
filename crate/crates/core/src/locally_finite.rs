//! Chain levels on ascending unions of finite groups.
//!
//! All checks quantify over the truncation `G_N` given by the group.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ball, Element, MarkedGroup};
use crate::subset::verify::{Evidence, Status, Verdict, Witness};
use crate::subset::{NatSet, Subset, SubsetSpec};

fn need_union(g: &MarkedGroup) -> Result<usize> {
    g.level_sizes()
        .map(|s| s.len())
        .ok_or_else(|| Error::domain(format!("{} is not an ascending union", g.spec())))
}

/// `min{n : x ∈ G_n}`.
pub fn level(g: &MarkedGroup, x: &Element) -> Result<u32> {
    need_union(g)?;
    if !g.contains(x) {
        return Err(Error::domain(format!("{x:?} is not an element of {}", g.spec())));
    }
    Ok(g.level(x).expect("ascending union element"))
}

/// `|ℓ⁻¹(n)| = |G_n| − |G_{n−1}|` for `n = 1..=N`.
pub fn fiber_sizes(g: &MarkedGroup) -> Result<Vec<usize>> {
    need_union(g)?;
    let sizes = g.level_sizes().expect("ascending union");
    Ok(sizes.iter().enumerate().map(|(i, &s)| s - if i == 0 { 0 } else { sizes[i - 1] }).collect())
}

/// First `h` among `hs` with `ℓ(h) > ℓ(g)` but `ℓ(gh)` or `ℓ(hg)` different from `ℓ(h)`.
fn first_violation<'a>(g: &MarkedGroup, x: &Element, hs: &'a [Element]) -> (usize, Option<&'a Element>) {
    let lx = g.level(x).expect("ascending union element");
    let mut checked = 0;
    for h in hs {
        let lh = g.level(h).expect("ascending union element");
        if lh <= lx {
            continue;
        }
        checked += 1;
        if g.level(&g.mul(x, h)) != Some(lh) || g.level(&g.mul(h, x)) != Some(lh) {
            return (checked, Some(h));
        }
    }
    (checked, None)
}

fn violation_witness(g: &MarkedGroup, x: &Element, h: &Element) -> Witness {
    Witness {
        side: None,
        translator: Some(g.format(x)),
        element: Some(g.format(h)),
        detail: format!(
            "ℓ(h) = {}, ℓ(gh) = {}, ℓ(hg) = {}",
            g.level(h).unwrap_or(0),
            g.level(&g.mul(x, h)).unwrap_or(0),
            g.level(&g.mul(h, x)).unwrap_or(0)
        ),
    }
}

/// Checks `ℓ(gh) = ℓ(hg) = ℓ(h)` for every `h ∈ ball(R)` with `ℓ(h) > ℓ(g)`.
pub fn verify_bi_invariance(group: &Arc<MarkedGroup>, x: &Element, r: u32) -> Result<Verdict> {
    level(group, x)?;
    let b = ball(group, r)?;
    let (checked, bad) = first_violation(group, x, b.elements());
    if let Some(h) = bad {
        return Ok(Verdict::refuted(violation_witness(group, x, h)));
    }
    let whole = b.len() == group.level_sizes().and_then(|s| s.last().copied()).unwrap_or(0);
    Ok(Verdict {
        status: if whole { Status::VerifiedExact } else { Status::VerifiedToRadius { radius: r } },
        witness: None,
        evidence: vec![Evidence { side: None, translator: Some(group.format(x)), sizes: vec![checked], support: None }],
    })
}

/// The bi-invariance check for one `g` against every `h` of the truncation.
pub fn verify_bi_invariance_on_truncation(group: &Arc<MarkedGroup>, x: &Element) -> Result<Verdict> {
    level(group, x)?;
    let all = group.table_elements().expect("ascending union");
    let (checked, bad) = first_violation(group, x, &all);
    if let Some(h) = bad {
        return Ok(Verdict::refuted(violation_witness(group, x, h)));
    }
    Ok(Verdict {
        status: Status::VerifiedExact,
        witness: None,
        evidence: vec![Evidence { side: None, translator: Some(group.format(x)), sizes: vec![checked], support: None }],
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    pub chain_length: usize,
    pub order: usize,
    pub checked_pairs: usize,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// The bi-invariance check for every `g` of the truncation `G_N`.
pub fn verify_bi_invariance_all(group: &Arc<MarkedGroup>) -> Result<ExhaustiveReport> {
    let chain_length = need_union(group)?;
    let all = group.table_elements().expect("ascending union");
    let results: Vec<(usize, Option<&Element>)> =
        all.par_iter().map(|x| first_violation(group, x, &all)).collect();
    let checked_pairs = results.iter().map(|r| r.0).sum();
    let verdict = match results.iter().zip(&all).find_map(|((_, bad), x)| bad.map(|h| (x, h))) {
        Some((x, h)) => Verdict::refuted(violation_witness(group, x, h)),
        None => Verdict::exact(),
    };
    Ok(ExhaustiveReport { chain_length, order: all.len(), checked_pairs, verdict })
}

/// `ℓ⁻¹(A)` as a subset of the group.
pub fn levelset(group: &Arc<MarkedGroup>, a: NatSet) -> Result<Subset> {
    Subset::new(group, SubsetSpec::LevelSet(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_examples() {
        let g = MarkedGroup::sum_z2(6).unwrap();
        assert_eq!(level(&g, &g.parse_element("e3").unwrap()).unwrap(), 3);
        assert_eq!(level(&g, &g.identity()).unwrap(), 1);
        let s = MarkedGroup::sym_chain(6).unwrap();
        assert_eq!(level(&s, &s.parse_element("(4 5)").unwrap()).unwrap(), 5);
        assert!(level(&MarkedGroup::free(1).unwrap(), &Element::Word(vec![])).is_err());
    }

    #[test]
    fn fibers() {
        let g = MarkedGroup::sum_z2(4).unwrap();
        assert_eq!(fiber_sizes(&g).unwrap(), vec![2, 2, 4, 8]);
        let s = MarkedGroup::sym_chain(4).unwrap();
        assert_eq!(fiber_sizes(&s).unwrap(), vec![1, 1, 4, 18]);
    }

    #[test]
    fn bi_invariance_examples() {
        let g = MarkedGroup::sum_z2(8).unwrap();
        assert!(verify_bi_invariance(&g, &g.parse_element("e2").unwrap(), 6).unwrap().is_verified());
        assert!(verify_bi_invariance(&g, &g.identity(), 6).unwrap().is_verified());
        let s = MarkedGroup::sym_chain(5).unwrap();
        assert!(verify_bi_invariance(&s, &s.parse_element("(1 2)").unwrap(), 4).unwrap().is_verified());
        let e2 = g.parse_element("e2").unwrap();
        assert!(verify_bi_invariance_on_truncation(&g, &e2).unwrap().is_exact());
        let report = verify_bi_invariance_all(&MarkedGroup::sym_chain(5).unwrap()).unwrap();
        assert!(report.verdict.is_exact());
        assert!(report.checked_pairs > 0);
    }

    #[test]
    fn disjoint_level_sets() {
        let g = MarkedGroup::sum_z2(8).unwrap();
        let even = levelset(&g, NatSet::evens()).unwrap();
        let odd = levelset(&g, NatSet::Progression { start: 1, step: 2 }).unwrap();
        let all = g.table_elements().unwrap();
        assert!(all.iter().all(|x| !(even.contains(x) && odd.contains(x))));
        assert!(all.iter().filter(|x| even.contains(x)).count() > 100);
        assert!(all.iter().filter(|x| odd.contains(x)).count() > 50);
        let none = levelset(&g, NatSet::Finite(Default::default())).unwrap();
        assert!(all.iter().all(|x| !none.contains(x)));
    }
}
