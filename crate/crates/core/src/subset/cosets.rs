//! Right-coset analysis of subsets: the H-invariant projection and the
//! finite set of cosets a left-H-commensurated subset cuts properly.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::verify::{check_translators, Verdict};
use super::{Side, Subgroup, Subset, SubsetSpec};
use crate::error::{Error, Result};
use crate::group::{ball, Element};

struct CosetSample {
    rep: Element,
    /// `(|h|, h·rep ∈ U)` for the sampled `h ∈ H`.
    members: Vec<(u32, bool)>,
    depth: u32,
}

/// Groups `ball(R)` by right `H`-coset, keeping cosets whose canonical
/// representative has length at most `R - 2`.
fn coset_samples(u: &Subset, h: Subgroup, r: u32) -> Result<Vec<CosetSample>> {
    let g = u.group();
    let b = ball(g, r)?;
    let mut by_rep: BTreeMap<usize, CosetSample> = BTreeMap::new();
    for x in b.elements() {
        let rep = h.coset_rep(g, x);
        let Some(k) = b.index_of(&rep) else { continue };
        let len_rep = b.length(k);
        if len_rep + 2 > r {
            continue;
        }
        let hx = g.mul(x, &g.inverse(&rep));
        by_rep
            .entry(k)
            .or_insert_with(|| CosetSample { rep, members: Vec::new(), depth: r - len_rep })
            .members
            .push((g.word_length(&hx), u.contains(x)));
    }
    Ok(by_rep.into_values().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CosetClass {
    Finite,
    Cofinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetReport {
    pub rep: String,
    pub class: CosetClass,
    /// Sampled elements whose membership disagrees with the class.
    pub exceptions: usize,
    pub sampled: usize,
}

#[derive(Debug, Clone)]
pub struct Projection {
    /// Union of the cosets on which `U` is cofinite.
    pub subset: Subset,
    pub cosets: Vec<CosetReport>,
}

/// Replaces `U` by the union of the right `H`-cosets it almost fills.
///
/// A coset is classified from the outer half of its sample; mixed
/// membership there is reported as inconclusive.
pub fn project_h_invariant(u: &Subset, h: Subgroup, r: u32) -> Result<Projection> {
    let g = u.group();
    if !matches!(h, Subgroup::Factor(_)) {
        return Err(Error::precondition("the projection needs a free factor as subgroup"));
    }
    h.validate(g)?;
    if h.is_finite(g) {
        return Err(Error::precondition(format!("{h} of {} is finite", g.spec())));
    }
    let mut reps = BTreeSet::new();
    let mut cosets = Vec::new();
    for sample in coset_samples(u, h, r)? {
        let outer: Vec<bool> = sample
            .members
            .iter()
            .filter(|(len, _)| 2 * len > sample.depth)
            .map(|&(_, m)| m)
            .collect();
        let class = if outer.iter().all(|&m| m) {
            CosetClass::Cofinite
        } else if outer.iter().all(|&m| !m) {
            CosetClass::Finite
        } else {
            return Err(Error::Inconclusive(format!(
                "coset {h}·{} is neither finite nor cofinite within radius {r}",
                g.format(&sample.rep)
            )));
        };
        let full = class == CosetClass::Cofinite;
        if full {
            reps.insert(sample.rep.clone());
        }
        cosets.push(CosetReport {
            rep: g.format(&sample.rep),
            class,
            exceptions: sample.members.iter().filter(|&&(_, m)| m != full).count(),
            sampled: sample.members.len(),
        });
    }
    let subset = Subset::new(g, SubsetSpec::CosetUnion { subgroup: h, reps })?;
    Ok(Projection { subset, cosets })
}

#[derive(Debug, Clone)]
pub struct ExceptionCosets {
    pub precondition: Verdict,
    /// Representatives of the sampled cosets cut properly by `X`.
    pub reps: Vec<Element>,
    pub sampled_cosets: usize,
}

/// Cosets `Hg` within the ball on which `X ∩ Hg ∉ {∅, Hg}`.
///
/// `X` is first checked to be left-`H`-commensurated; a refutation is
/// returned as a precondition error carrying the witness.
pub fn exception_cosets(x: &Subset, h: Subgroup, r: u32) -> Result<ExceptionCosets> {
    let g = x.group();
    h.validate(g)?;
    let precondition = check_translators(x, &h.translators(g), &[Side::Left], r)?;
    if precondition.is_refuted() {
        let w = precondition.witness.as_ref().expect("refutations carry witnesses");
        return Err(Error::precondition(format!(
            "not left-{h}-commensurated: translator {}, element {} ({})",
            w.translator.as_deref().unwrap_or("?"),
            w.element.as_deref().unwrap_or("?"),
            w.detail
        )));
    }
    let samples = coset_samples(x, h, r)?;
    let sampled_cosets = samples.len();
    let reps = samples
        .into_iter()
        .filter(|s| s.members.iter().any(|m| m.1) && s.members.iter().any(|m| !m.1))
        .map(|s| s.rep)
        .collect();
    Ok(ExceptionCosets { precondition, reps, sampled_cosets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::MarkedGroup;

    #[test]
    fn suffix_set_projects_to_full_or_empty_cosets() {
        let g = MarkedGroup::parse("free_product([free_abelian(2), free(1)])").unwrap();
        let u = Subset::parse(&g, "suffix(2, !finite{1})").unwrap();
        let p = project_h_invariant(&u, Subgroup::Factor(0), 5).unwrap();
        assert!(p.cosets.iter().all(|c| c.exceptions == 0));
        assert!(p.cosets.iter().any(|c| c.class == CosetClass::Cofinite));
        assert!(p.cosets.iter().any(|c| c.class == CosetClass::Finite));
    }

    #[test]
    fn edits_vanish() {
        let g = MarkedGroup::parse("free_product([free_abelian(2), free(1)])").unwrap();
        let u = Subset::parse(&g, "edit(coset(factor 1; b); +{a1, 1}; -{b})").unwrap();
        let p = project_h_invariant(&u, Subgroup::Factor(0), 5).unwrap();
        assert_eq!(p.subset, Subset::parse(&g, "coset(factor 1; b)").unwrap());
        let all = Subset::parse(&g, "all").unwrap();
        let p = project_h_invariant(&all, Subgroup::Factor(0), 4).unwrap();
        let b = ball(&g, 2).unwrap();
        assert!(b.elements().iter().all(|x| p.subset.contains(x)));
    }

    #[test]
    fn mixed_coset_is_inconclusive() {
        let g = MarkedGroup::parse("free_product([free_abelian(1), free(1)])").unwrap();
        let u = Subset::parse(&g, "suffix(1, ray)").unwrap();
        assert!(matches!(
            project_h_invariant(&u, Subgroup::Factor(0), 5),
            Err(Error::Inconclusive(_))
        ));
    }

    #[test]
    fn last_letter_exceptions() {
        let g = MarkedGroup::parse("free_product([cyclic(3), cyclic(4)])").unwrap();
        let x = Subset::parse(&g, "last(1)").unwrap();
        let e = exception_cosets(&x, Subgroup::Factor(0), 6).unwrap();
        assert!(e.precondition.is_exact());
        assert_eq!(e.reps, vec![g.identity()]);
        let all = Subset::parse(&g, "all").unwrap();
        assert!(exception_cosets(&all, Subgroup::Factor(0), 6).unwrap().reps.is_empty());
        let c = Subset::parse(&g, "coset(factor 1; b)").unwrap();
        assert!(exception_cosets(&c, Subgroup::Factor(0), 6).unwrap().reps.is_empty());
        let first = Subset::parse(&g, "first(2)").unwrap();
        assert!(matches!(exception_cosets(&first, Subgroup::Factor(0), 6), Err(Error::Precondition(_))));
    }
}
