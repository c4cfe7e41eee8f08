//! Symbolic subsets of marked groups with exact membership.
//!
//! A [`Subset`] pairs a [`SubsetSpec`] with its group. Besides membership,
//! each variant knows (when it can) a closed-form region containing the
//! translate differences `sA △ A` and `As △ A`; the verifiers use these
//! certificates to upgrade ball sweeps to exact verdicts.

pub mod boundary;
pub mod cosets;
pub mod expr;
pub mod function;
pub mod sample;
pub mod verify;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, GroupKind, Letter, MarkedGroup, Syllable};

/// A subset of the natural numbers with a finite description.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NatSet {
    Finite(BTreeSet<u64>),
    /// `{start, start + step, start + 2·step, …}`; `step = 0` is `{start}`.
    Progression { start: u64, step: u64 },
    Complement(Box<NatSet>),
    Union(Box<NatSet>, Box<NatSet>),
    Intersection(Box<NatSet>, Box<NatSet>),
}

impl NatSet {
    pub fn all() -> Self {
        NatSet::Progression { start: 0, step: 1 }
    }

    pub fn evens() -> Self {
        NatSet::Progression { start: 0, step: 2 }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            NatSet::Finite(s) => s.contains(&n),
            NatSet::Progression { start, step } => {
                n >= *start && if *step == 0 { n == *start } else { (n - start).is_multiple_of(*step) }
            }
            NatSet::Complement(a) => !a.contains(n),
            NatSet::Union(a, b) => a.contains(n) || b.contains(n),
            NatSet::Intersection(a, b) => a.contains(n) && b.contains(n),
        }
    }
}

impl fmt::Display for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatSet::Finite(s) => {
                let items: Vec<String> = s.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            NatSet::Progression { start, step } => write!(f, "ap({start}, {step})"),
            NatSet::Complement(a) => write!(f, "!{a}"),
            NatSet::Union(a, b) => write!(f, "({a} | {b})"),
            NatSet::Intersection(a, b) => write!(f, "({a} & {b})"),
        }
    }
}

/// Subgroups whose right cosets can be enumerated and recognised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subgroup {
    Whole,
    Trivial,
    /// Free factor, 0-based.
    Factor(usize),
}

impl Subgroup {
    fn validate(&self, g: &MarkedGroup) -> Result<()> {
        if let Subgroup::Factor(i) = self {
            g.factor(*i)?;
        }
        Ok(())
    }

    pub fn contains(&self, g: &MarkedGroup, x: &Element) -> bool {
        match self {
            Subgroup::Whole => true,
            Subgroup::Trivial => g.is_identity(x),
            Subgroup::Factor(i) => match x {
                Element::Syllables(s) => s.is_empty() || (s.len() == 1 && s[0].factor == *i),
                _ => false,
            },
        }
    }

    /// The canonical representative of the right coset `Hx`.
    pub fn coset_rep(&self, g: &MarkedGroup, x: &Element) -> Element {
        match (self, x) {
            (Subgroup::Whole, _) => g.identity(),
            (Subgroup::Trivial, _) => x.clone(),
            (Subgroup::Factor(i), Element::Syllables(s)) if s.first().is_some_and(|y| y.factor == *i) => {
                Element::Syllables(s[1..].to_vec())
            }
            _ => x.clone(),
        }
    }

    /// Elements generating the subgroup (Cayley steps of a factor, embedded).
    pub fn translators(&self, g: &MarkedGroup) -> Vec<Element> {
        match self {
            Subgroup::Whole => g.steps().to_vec(),
            Subgroup::Trivial => Vec::new(),
            Subgroup::Factor(i) => g.factors()[*i]
                .steps()
                .iter()
                .map(|h| g.embed(*i, h).expect("factor element"))
                .collect(),
        }
    }

    pub fn is_finite(&self, g: &MarkedGroup) -> bool {
        match self {
            Subgroup::Whole => g.is_finite(),
            Subgroup::Trivial => true,
            Subgroup::Factor(i) => g.factors()[*i].is_finite(),
        }
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subgroup::Whole => write!(f, "whole"),
            Subgroup::Trivial => write!(f, "trivial"),
            Subgroup::Factor(i) => write!(f, "factor {}", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SubsetSpec {
    Finite(BTreeSet<Element>),
    /// Everything except the listed elements.
    Cofinite(BTreeSet<Element>),
    /// Reduced words of a free group ending with `w`.
    SuffixCone(Vec<Letter>),
    /// Union of the right cosets `H·g` for the listed canonical representatives.
    CosetUnion { subgroup: Subgroup, reps: BTreeSet<Element> },
    /// `{g : suf_H(g) ∈ target}` for the factor `H`; `target` lives in `H`.
    FreeProductSuffixSet { factor: usize, target: Box<SubsetSpec> },
    /// Elements whose last syllable lies in one of the listed factors
    /// (1-based); index 0 stands for the identity.
    LastLetterType(BTreeSet<usize>),
    /// Elements whose first syllable lies in the factor (0-based).
    FirstSyllable(usize),
    /// Elements of an ascending union whose chain level lies in the set.
    LevelSet(NatSet),
    /// Elements whose word length lies in the set.
    LengthSet(NatSet),
    /// `{v ∈ Z^d : v[coord] ≥ min}`.
    HalfSpace { coord: usize, min: i64 },
    Union(Vec<SubsetSpec>),
    Intersection(Vec<SubsetSpec>),
    Complement(Box<SubsetSpec>),
    /// `(base ∪ add) ∖ remove`, with `add` and `remove` disjoint.
    Edited { base: Box<SubsetSpec>, add: BTreeSet<Element>, remove: BTreeSet<Element> },
    /// `base · by`.
    RightTranslate { base: Box<SubsetSpec>, by: Element },
}

impl SubsetSpec {
    pub fn empty() -> Self {
        SubsetSpec::Finite(BTreeSet::new())
    }

    pub fn all() -> Self {
        SubsetSpec::Cofinite(BTreeSet::new())
    }

    pub fn complement(self) -> Self {
        match self {
            SubsetSpec::Complement(a) => *a,
            SubsetSpec::Finite(s) => SubsetSpec::Cofinite(s),
            SubsetSpec::Cofinite(s) => SubsetSpec::Finite(s),
            other => SubsetSpec::Complement(Box::new(other)),
        }
    }

    pub fn union(self, other: Self) -> Self {
        match self {
            SubsetSpec::Union(mut v) => {
                v.push(other);
                SubsetSpec::Union(v)
            }
            a => SubsetSpec::Union(vec![a, other]),
        }
    }

    pub fn intersection(self, other: Self) -> Self {
        match self {
            SubsetSpec::Intersection(mut v) => {
                v.push(other);
                SubsetSpec::Intersection(v)
            }
            a => SubsetSpec::Intersection(vec![a, other]),
        }
    }

    pub fn edited(self, add: BTreeSet<Element>, remove: BTreeSet<Element>) -> Self {
        let add = add.difference(&remove).cloned().collect();
        SubsetSpec::Edited { base: Box::new(self), add, remove }
    }

    pub fn right_translate(self, by: Element) -> Self {
        SubsetSpec::RightTranslate { base: Box::new(self), by }
    }
}

/// Where a translate difference can be nonzero: inside the ball of radius
/// `radius`, or among elements of chain level at most `level`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
}

impl Support {
    pub fn empty() -> Self {
        Support::default()
    }

    pub fn within_radius(r: u32) -> Self {
        Support { radius: Some(r), level: None }
    }

    pub fn within_level(n: u32) -> Self {
        Support { radius: None, level: Some(n) }
    }

    pub fn join(self, other: Support) -> Support {
        let max = |a: Option<u32>, b: Option<u32>| match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) | (None, x) => x,
        };
        Support { radius: max(self.radius, other.radius), level: max(self.level, other.level) }
    }

    pub fn covers(&self, g: &MarkedGroup, x: &Element) -> bool {
        self.radius.is_some_and(|r| g.word_length(x) <= r)
            || self.level.is_some_and(|n| g.level(x).is_some_and(|l| l <= n))
    }
}

fn max_length(g: &MarkedGroup, s: &BTreeSet<Element>) -> u32 {
    s.iter().map(|x| g.word_length(x)).max().unwrap_or(0)
}

fn single_syllable(x: &Element) -> Option<&Syllable> {
    match x {
        Element::Syllables(s) if s.len() == 1 => Some(&s[0]),
        _ => None,
    }
}

fn membership(g: &MarkedGroup, spec: &SubsetSpec, x: &Element) -> bool {
    match spec {
        SubsetSpec::Finite(s) => s.contains(x),
        SubsetSpec::Cofinite(s) => !s.contains(x),
        SubsetSpec::SuffixCone(w) => match x {
            Element::Word(v) => v.ends_with(w),
            _ => false,
        },
        SubsetSpec::CosetUnion { subgroup, reps } => reps.contains(&subgroup.coset_rep(g, x)),
        SubsetSpec::FreeProductSuffixSet { factor, target } => {
            let h = crate::free_product::h_suffix_unchecked(g, x, *factor);
            membership(&g.factors()[*factor], target, &h)
        }
        SubsetSpec::LastLetterType(set) => set.contains(&crate::free_product::last_letter_type_unchecked(x)),
        SubsetSpec::FirstSyllable(i) => match x {
            Element::Syllables(s) => s.first().is_some_and(|y| y.factor == *i),
            _ => false,
        },
        SubsetSpec::LevelSet(n) => g.level(x).is_some_and(|l| n.contains(l as u64)),
        SubsetSpec::LengthSet(n) => n.contains(g.word_length(x) as u64),
        SubsetSpec::HalfSpace { coord, min } => match x {
            Element::Vector(v) => v[*coord] >= *min,
            _ => false,
        },
        SubsetSpec::Union(v) => v.iter().any(|a| membership(g, a, x)),
        SubsetSpec::Intersection(v) => v.iter().all(|a| membership(g, a, x)),
        SubsetSpec::Complement(a) => !membership(g, a, x),
        SubsetSpec::Edited { base, add, remove } => {
            !remove.contains(x) && (add.contains(x) || membership(g, base, x))
        }
        SubsetSpec::RightTranslate { base, by } => membership(g, base, &g.mul(x, &g.inverse(by))),
    }
}

fn validate(g: &MarkedGroup, spec: &SubsetSpec) -> Result<()> {
    let elements = |s: &BTreeSet<Element>| -> Result<()> {
        match s.iter().find(|x| !g.contains(x)) {
            Some(x) => Err(Error::domain(format!("{x:?} is not an element of {}", g.spec()))),
            None => Ok(()),
        }
    };
    let need_free_product = |what: &str| -> Result<()> {
        if g.factors().is_empty() {
            Err(Error::domain(format!("{what} needs a free product, got {}", g.spec())))
        } else {
            Ok(())
        }
    };
    match spec {
        SubsetSpec::Finite(s) | SubsetSpec::Cofinite(s) => elements(s),
        SubsetSpec::SuffixCone(w) => {
            if !matches!(g.kind(), GroupKind::Free { .. }) {
                return Err(Error::domain(format!("cones need a free group, got {}", g.spec())));
            }
            if !g.contains(&Element::Word(w.clone())) {
                return Err(Error::domain(format!("cone word {w:?} is not a reduced word")));
            }
            Ok(())
        }
        SubsetSpec::CosetUnion { subgroup, reps } => {
            subgroup.validate(g)?;
            elements(reps)?;
            if reps.iter().any(|r| &subgroup.coset_rep(g, r) != r) {
                return Err(Error::domain("coset representatives must be canonical"));
            }
            Ok(())
        }
        SubsetSpec::FreeProductSuffixSet { factor, target } => {
            need_free_product("suffix sets")?;
            validate(g.factor(*factor)?, target)
        }
        SubsetSpec::LastLetterType(set) => {
            need_free_product("last-letter sets")?;
            match set.iter().find(|&&i| i > g.factors().len()) {
                Some(i) => Err(Error::domain(format!("no factor with index {i}"))),
                None => Ok(()),
            }
        }
        SubsetSpec::FirstSyllable(i) => {
            need_free_product("first-syllable sets")?;
            g.factor(*i).map(|_| ())
        }
        SubsetSpec::LevelSet(_) => {
            if g.level_sizes().is_none() {
                return Err(Error::domain(format!("level sets need an ascending union, got {}", g.spec())));
            }
            Ok(())
        }
        SubsetSpec::LengthSet(_) => Ok(()),
        SubsetSpec::HalfSpace { coord, .. } => match g.kind() {
            GroupKind::FreeAbelian { rank } if coord < rank => Ok(()),
            _ => Err(Error::domain(format!("half-space coordinate {} invalid for {}", coord + 1, g.spec()))),
        },
        SubsetSpec::Union(v) | SubsetSpec::Intersection(v) => v.iter().try_for_each(|a| validate(g, a)),
        SubsetSpec::Complement(a) => validate(g, a),
        SubsetSpec::Edited { base, add, remove } => {
            elements(add)?;
            elements(remove)?;
            if add.intersection(remove).next().is_some() {
                return Err(Error::domain("edit sets must be disjoint"));
            }
            validate(g, base)
        }
        SubsetSpec::RightTranslate { base, by } => {
            elements(&BTreeSet::from([by.clone()]))?;
            validate(g, base)
        }
    }
}

/// Closed-form region containing `sA △ A`, when one is known.
fn left_support(g: &MarkedGroup, spec: &SubsetSpec, s: &Element) -> Option<Support> {
    let len_s = g.word_length(s);
    match spec {
        SubsetSpec::Finite(f) | SubsetSpec::Cofinite(f) => {
            Some(Support::within_radius(max_length(g, f) + len_s))
        }
        SubsetSpec::SuffixCone(w) => Some(Support::within_radius(len_s + w.len() as u32)),
        SubsetSpec::CosetUnion { subgroup, reps } => {
            if subgroup.contains(g, s) {
                Some(Support::empty())
            } else if subgroup.is_finite(g) {
                let order = match subgroup {
                    Subgroup::Factor(i) => g.factors()[*i].order().unwrap_or(1) as u32,
                    _ => 1,
                };
                let h_len = if order > 1 { 1 } else { 0 };
                Some(Support::within_radius(max_length(g, reps) + h_len + len_s))
            } else {
                None
            }
        }
        SubsetSpec::FreeProductSuffixSet { factor, target } => {
            let syl = single_syllable(s)?;
            if syl.factor != *factor {
                return Some(Support::empty());
            }
            let h = &g.factors()[*factor];
            let inner = left_support(h, target, &syl.element)
                .or_else(|| h.is_finite().then(Support::empty))?;
            if inner.level.is_some() {
                return None;
            }
            // outside H the suffix is unchanged, so differences lie in H
            let r = if h.is_finite() { 1 } else { inner.radius.unwrap_or(0) };
            Some(Support::within_radius(r))
        }
        SubsetSpec::LastLetterType(_) => single_syllable(s).map(|_| Support::within_radius(len_s)),
        SubsetSpec::FirstSyllable(_) => None,
        SubsetSpec::LevelSet(_) => g.level(s).map(Support::within_level),
        SubsetSpec::LengthSet(_) => None,
        SubsetSpec::HalfSpace { coord, min } => {
            let Element::Vector(v) = s else { return None };
            if v[*coord] == 0 {
                Some(Support::empty())
            } else if v.len() == 1 {
                Some(Support::within_radius(min.unsigned_abs() as u32 + len_s))
            } else {
                None
            }
        }
        SubsetSpec::Union(v) | SubsetSpec::Intersection(v) => v
            .iter()
            .try_fold(Support::empty(), |acc, a| Some(acc.join(left_support(g, a, s)?))),
        SubsetSpec::Complement(a) => left_support(g, a, s),
        SubsetSpec::Edited { base, add, remove } => {
            let edits = max_length(g, add).max(max_length(g, remove));
            Some(left_support(g, base, s)?.join(Support::within_radius(edits + len_s)))
        }
        SubsetSpec::RightTranslate { base, by } => {
            // s(Ag) △ Ag = (sA △ A)·g
            let inner = left_support(g, base, s)?;
            let len_g = g.word_length(by);
            Some(Support {
                radius: inner.radius.map(|r| r + len_g),
                level: inner.level.map(|n| n.max(g.level(by).unwrap_or(0))),
            })
        }
    }
}

/// Closed-form region containing `As △ A`, when one is known.
fn right_support(g: &MarkedGroup, spec: &SubsetSpec, s: &Element) -> Option<Support> {
    if g.is_abelian() {
        return left_support(g, spec, s);
    }
    let len_s = g.word_length(s);
    match spec {
        SubsetSpec::Finite(f) | SubsetSpec::Cofinite(f) => {
            Some(Support::within_radius(max_length(g, f) + len_s))
        }
        SubsetSpec::LevelSet(_) => g.level(s).map(Support::within_level),
        SubsetSpec::FirstSyllable(_) => single_syllable(s).map(|_| Support::within_radius(len_s)),
        SubsetSpec::CosetUnion { subgroup: Subgroup::Whole, .. } => Some(Support::empty()),
        SubsetSpec::Union(v) | SubsetSpec::Intersection(v) => v
            .iter()
            .try_fold(Support::empty(), |acc, a| Some(acc.join(right_support(g, a, s)?))),
        SubsetSpec::Complement(a) => right_support(g, a, s),
        SubsetSpec::Edited { base, add, remove } => {
            let edits = max_length(g, add).max(max_length(g, remove));
            Some(right_support(g, base, s)?.join(Support::within_radius(edits + len_s)))
        }
        _ => None,
    }
}

/// A subset of a specific marked group.
#[derive(Debug, Clone)]
pub struct Subset {
    group: Arc<MarkedGroup>,
    spec: SubsetSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Subset {
    pub fn new(group: &Arc<MarkedGroup>, spec: SubsetSpec) -> Result<Self> {
        validate(group, &spec)?;
        Ok(Subset { group: group.clone(), spec })
    }

    pub fn parse(group: &Arc<MarkedGroup>, text: &str) -> Result<Self> {
        Self::new(group, expr::parse_set(group, text)?)
    }

    pub fn group(&self) -> &Arc<MarkedGroup> {
        &self.group
    }

    pub fn spec(&self) -> &SubsetSpec {
        &self.spec
    }

    pub fn into_spec(self) -> SubsetSpec {
        self.spec
    }

    pub fn contains(&self, x: &Element) -> bool {
        membership(&self.group, &self.spec, x)
    }

    pub fn complement(&self) -> Subset {
        Subset { group: self.group.clone(), spec: self.spec.clone().complement() }
    }

    /// Certified region containing `sA △ A` (left) or `As △ A` (right).
    pub fn support(&self, side: Side, s: &Element) -> Option<Support> {
        let certified = match side {
            Side::Left => left_support(&self.group, &self.spec, s),
            Side::Right => right_support(&self.group, &self.spec, s),
        };
        certified.or_else(|| {
            self.group
                .is_finite()
                .then(|| Support::within_radius(self.group.table_elements().map_or(0, |all| {
                    all.iter().map(|x| self.group.word_length(x)).max().unwrap_or(0)
                })))
        })
    }

    /// Membership of the translate `sA` (left) or `As` (right) at `x`.
    pub fn translate_contains(&self, side: Side, s: &Element, x: &Element) -> bool {
        let g = &self.group;
        let y = match side {
            Side::Left => g.mul(&g.inverse(s), x),
            Side::Right => g.mul(x, &g.inverse(s)),
        };
        self.contains(&y)
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.spec == other.spec
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&expr::render(&self.group, &self.spec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ball;

    #[test]
    fn natset_membership() {
        assert!(NatSet::evens().contains(4));
        assert!(!NatSet::evens().contains(3));
        assert!(NatSet::Progression { start: 3, step: 0 }.contains(3));
        assert!(!NatSet::Progression { start: 3, step: 0 }.contains(6));
        let odd_or_small = NatSet::Union(
            Box::new(NatSet::Complement(Box::new(NatSet::evens()))),
            Box::new(NatSet::Finite([0, 2].into())),
        );
        assert!(odd_or_small.contains(2) && odd_or_small.contains(7) && !odd_or_small.contains(4));
    }

    #[test]
    fn cone_membership_is_suffix() {
        let f2 = MarkedGroup::free(2).unwrap();
        let cone = Subset::parse(&f2, "cone(ab)").unwrap();
        assert!(cone.contains(&f2.parse_element("Bab").unwrap()));
        assert!(!cone.contains(&f2.parse_element("ba").unwrap()));
    }

    #[test]
    fn invalid_specs_rejected() {
        let z = MarkedGroup::free_abelian(1).unwrap();
        assert!(Subset::new(&z, SubsetSpec::SuffixCone(vec![1])).is_err());
        assert!(Subset::new(&z, SubsetSpec::LevelSet(NatSet::evens())).is_err());
        assert!(Subset::new(&z, SubsetSpec::HalfSpace { coord: 1, min: 0 }).is_err());
        let f2 = MarkedGroup::free(2).unwrap();
        assert!(Subset::new(&f2, SubsetSpec::SuffixCone(vec![1, -1])).is_err());
    }

    #[test]
    fn coset_reps_are_canonical() {
        let g = MarkedGroup::parse("free_product([free_abelian(2), free(1)])").unwrap();
        let h = Subgroup::Factor(0);
        let b = ball(&g, 3).unwrap();
        for x in b.elements() {
            let r = h.coset_rep(&g, x);
            let quotient = g.mul(x, &g.inverse(&r));
            assert!(h.contains(&g, &quotient));
            assert_eq!(h.coset_rep(&g, &r), r);
        }
    }

    #[test]
    fn supports_cover_differences() {
        let cases = [
            ("free(2)", "cone(ab) | finite{a, BB}"),
            ("free(2)", "edit(!cone(b); +{b}; -{1})"),
            ("free_abelian(1)", "half(1, 2)"),
            ("free_product([cyclic(3), free(1)])", "suffix(2, cone(a)) & last(1, 2)"),
            ("sum_z2(5)", "level(ap(0, 2))"),
            ("free_product([cyclic(2), cyclic(2)])", "first(1)"),
        ];
        for (spec, set) in cases {
            let g = MarkedGroup::parse(spec).unwrap();
            let a = Subset::parse(&g, set).unwrap();
            let b = ball(&g, 6).unwrap();
            for side in [Side::Left, Side::Right] {
                for s in g.steps() {
                    let Some(sup) = a.support(side, s) else { continue };
                    for x in b.elements() {
                        if a.translate_contains(side, s, x) != a.contains(x) {
                            assert!(sup.covers(&g, x), "{spec} {set} {side:?} {}", g.format(x));
                        }
                    }
                }
            }
        }
    }
}
