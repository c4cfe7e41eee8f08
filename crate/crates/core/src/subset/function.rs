//! Integer-valued functions on groups that are almost invariant under left
//! translation, assembled from subsets, last-letter types and levels.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{left_support, membership, validate, Support, SubsetSpec};
use crate::error::{Error, Result};
use crate::free_product::last_letter_type_unchecked;
use crate::group::{ball, Element, MarkedGroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Zero,
    /// `value` on the subset, 0 elsewhere.
    Indicator { set: SubsetSpec, value: i64 },
    LastLetterType,
    Level,
    Sum(Vec<Rule>),
}

impl Rule {
    fn validate(&self, g: &MarkedGroup) -> Result<()> {
        match self {
            Rule::Zero => Ok(()),
            Rule::Indicator { set, .. } => validate(g, set),
            Rule::LastLetterType if g.factors().is_empty() => {
                Err(Error::domain(format!("last letter types need a free product, got {}", g.spec())))
            }
            Rule::Level if g.level_sizes().is_none() => {
                Err(Error::domain(format!("levels need an ascending union, got {}", g.spec())))
            }
            Rule::LastLetterType | Rule::Level => Ok(()),
            Rule::Sum(v) => v.iter().try_for_each(|r| r.validate(g)),
        }
    }

    pub fn eval(&self, g: &MarkedGroup, x: &Element) -> i64 {
        match self {
            Rule::Zero => 0,
            Rule::Indicator { set, value } => {
                if membership(g, set, x) {
                    *value
                } else {
                    0
                }
            }
            Rule::LastLetterType => last_letter_type_unchecked(x) as i64,
            Rule::Level => g.level(x).unwrap_or(0) as i64,
            Rule::Sum(v) => v.iter().map(|r| r.eval(g, x)).sum(),
        }
    }

    /// Region containing `{x : f(s⁻¹x) ≠ f(x)}`, when known.
    pub fn support(&self, g: &MarkedGroup, s: &Element) -> Option<Support> {
        match self {
            Rule::Zero => Some(Support::empty()),
            Rule::Indicator { set, .. } => left_support(g, set, s),
            Rule::LastLetterType => match s {
                Element::Syllables(v) if v.len() <= 1 => Some(Support::within_radius(g.word_length(s))),
                _ => None,
            },
            Rule::Level => g.level(s).map(Support::within_level),
            Rule::Sum(v) => v
                .iter()
                .try_fold(Support::empty(), |acc, r| Some(acc.join(r.support(g, s)?))),
        }
    }
}

/// One term `f_n` of a chain, with generators of the subgroup `G_n` under
/// which it should be left invariant.
#[derive(Debug, Clone)]
pub struct ChainTerm {
    pub translators: Vec<Element>,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermReport {
    pub index: usize,
    /// Pairs `(t, x)` in the sample with `f_n(t·x) ≠ f_n(x)`.
    pub invariance_defects: usize,
    pub image: BTreeSet<i64>,
}

#[derive(Debug, Clone)]
pub struct AlmostInvariantFunction {
    pub group: Arc<MarkedGroup>,
    pub rule: Rule,
    pub sample_radius: u32,
    pub image: BTreeSet<i64>,
    /// The sampled image contains every nonzero term value, so it grows
    /// with the chain.
    pub unbounded_in_sample: bool,
    pub terms: Vec<TermReport>,
}

impl AlmostInvariantFunction {
    pub fn eval(&self, x: &Element) -> i64 {
        self.rule.eval(&self.group, x)
    }

    pub fn support(&self, s: &Element) -> Option<Support> {
        self.rule.support(&self.group, s)
    }
}

/// Builds `f = Σ f_n` from a chain normalised by `f_n(o) = 0` and
/// `f_n(G) ⊆ {0, n}`, checking both conditions on `ball(R)`.
pub fn assemble_untame_witness(
    group: &Arc<MarkedGroup>,
    chain: Vec<ChainTerm>,
    basepoint: &Element,
    r: u32,
) -> Result<AlmostInvariantFunction> {
    if !group.contains(basepoint) {
        return Err(Error::domain("basepoint is not a group element"));
    }
    let b = ball(group, r)?;
    let mut terms = Vec::new();
    for (k, term) in chain.iter().enumerate() {
        let n = k as i64 + 1;
        term.rule.validate(group)?;
        if term.rule.eval(group, basepoint) != 0 {
            return Err(Error::precondition(format!("f_{n} does not vanish at the basepoint")));
        }
        let image: BTreeSet<i64> = b.elements().iter().map(|x| term.rule.eval(group, x)).collect();
        if let Some(bad) = image.iter().find(|&&v| v != 0 && v != n) {
            return Err(Error::precondition(format!("f_{n} takes the value {bad}, outside {{0, {n}}}")));
        }
        let invariance_defects = term
            .translators
            .iter()
            .map(|t| {
                b.elements()
                    .iter()
                    .filter(|x| term.rule.eval(group, &group.mul(t, x)) != term.rule.eval(group, x))
                    .count()
            })
            .sum();
        terms.push(TermReport { index: k + 1, invariance_defects, image });
    }
    let rule = Rule::Sum(chain.into_iter().map(|t| t.rule).collect());
    let image: BTreeSet<i64> = b.elements().iter().map(|x| rule.eval(group, x)).collect();
    let unbounded_in_sample = terms
        .iter()
        .filter(|t| t.image.len() > 1)
        .all(|t| image.contains(&(t.index as i64)))
        && terms.iter().any(|t| t.image.len() > 1);
    Ok(AlmostInvariantFunction { group: group.clone(), rule, sample_radius: r, image, unbounded_in_sample, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_star(n: usize) -> Arc<MarkedGroup> {
        MarkedGroup::free_product((0..n).map(|_| MarkedGroup::cyclic(2).unwrap()).collect()).unwrap()
    }

    #[test]
    fn last_letter_chain_is_unbounded() {
        let n = 5;
        let g = z2_star(n);
        let chain = (1..=n)
            .map(|k| ChainTerm {
                translators: (0..k - 1).flat_map(|i| crate::subset::Subgroup::Factor(i).translators(&g)).collect(),
                rule: Rule::Indicator { set: SubsetSpec::LastLetterType([k].into()), value: k as i64 },
            })
            .collect();
        let f = assemble_untame_witness(&g, chain, &g.identity(), n as u32).unwrap();
        assert_eq!(f.image, (0..=n as i64).collect());
        assert!(f.unbounded_in_sample);
        let b = ball(&g, 3).unwrap();
        for x in b.elements() {
            assert_eq!(f.eval(x), last_letter_type_unchecked(x) as i64);
        }
        for t in &f.terms {
            assert_eq!(t.invariance_defects, 0, "term {}", t.index);
        }
    }

    #[test]
    fn zero_and_single_term_chains() {
        let g = z2_star(3);
        let zero = (0..3).map(|_| ChainTerm { translators: vec![], rule: Rule::Zero }).collect();
        let f = assemble_untame_witness(&g, zero, &g.identity(), 3).unwrap();
        assert_eq!(f.image, BTreeSet::from([0]));
        assert!(!f.unbounded_in_sample);
        let single = vec![ChainTerm {
            translators: vec![],
            rule: Rule::Indicator { set: SubsetSpec::FirstSyllable(0), value: 1 },
        }];
        let f = assemble_untame_witness(&g, single.clone(), &g.identity(), 3).unwrap();
        let b = ball(&g, 3).unwrap();
        assert!(b.elements().iter().all(|x| f.eval(x) == single[0].rule.eval(&g, x)));
    }

    #[test]
    fn normalisation_enforced() {
        let g = z2_star(2);
        let bad_base = vec![ChainTerm { translators: vec![], rule: Rule::Indicator { set: SubsetSpec::all(), value: 1 } }];
        assert!(matches!(
            assemble_untame_witness(&g, bad_base, &g.identity(), 2),
            Err(Error::Precondition(_))
        ));
        let bad_image = vec![ChainTerm {
            translators: vec![],
            rule: Rule::Indicator { set: SubsetSpec::FirstSyllable(0), value: 3 },
        }];
        assert!(matches!(
            assemble_untame_witness(&g, bad_image, &g.identity(), 2),
            Err(Error::Precondition(_))
        ));
    }
}
