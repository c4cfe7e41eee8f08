//! Commensuration, bi-commensuration and quotient-by-finite checks.
//!
//! Exact verdicts come from closed-form supports; the ball sweep still runs
//! and any difference found outside the certified region is reported as a
//! refutation. Without a certificate the sweep requires the difference
//! counts to be constant over the top three radii.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Side, Subset, SubsetSpec, Support};
use crate::ends::cone::ConeSet;
use crate::error::{Error, Result};
use crate::group::{ball, Ball, Element, MarkedGroup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    VerifiedExact,
    VerifiedToRadius { radius: u32 },
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub detail: String,
}

/// `sizes[r]` is the size of the difference inside the ball of radius `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translator: Option<String>,
    pub sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Support>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    pub fn exact() -> Self {
        Verdict { status: Status::VerifiedExact, witness: None, evidence: Vec::new() }
    }

    pub fn refuted(witness: Witness) -> Self {
        Verdict { status: Status::Refuted, witness: Some(witness), evidence: Vec::new() }
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::VerifiedExact
    }

    pub fn is_verified(&self) -> bool {
        !self.is_refuted()
    }

    /// Refutation wins, then radius-bounded, then exact. Evidence is concatenated.
    pub fn and(mut self, other: Verdict) -> Verdict {
        self.evidence.extend(other.evidence);
        let status = match (&self.status, &other.status) {
            (Status::Refuted, _) => Status::Refuted,
            (_, Status::Refuted) => {
                self.witness = other.witness;
                Status::Refuted
            }
            (Status::VerifiedToRadius { radius: a }, Status::VerifiedToRadius { radius: b }) => {
                Status::VerifiedToRadius { radius: (*a).min(*b) }
            }
            (Status::VerifiedToRadius { radius }, _) | (_, Status::VerifiedToRadius { radius }) => {
                Status::VerifiedToRadius { radius: *radius }
            }
            _ => Status::VerifiedExact,
        };
        self.status = status;
        self
    }
}

/// `(gA △ A) ∩ ball(R)`, in BFS order.
pub fn translate_difference(a: &Subset, g: &Element, r: u32) -> Result<Vec<Element>> {
    let group = a.group();
    if !group.contains(g) {
        return Err(Error::domain(format!("{g:?} is not an element of {}", group.spec())));
    }
    let b = ball(group, r)?;
    Ok(b.elements()
        .iter()
        .filter(|x| a.translate_contains(Side::Left, g, x) != a.contains(x))
        .cloned()
        .collect())
}

fn sizes_by_radius(b: &Ball, diff: &[usize]) -> Vec<usize> {
    let mut sizes = vec![0usize; b.radius() as usize + 1];
    for &i in diff {
        sizes[b.length(i) as usize] += 1;
    }
    for r in 1..sizes.len() {
        sizes[r] += sizes[r - 1];
    }
    sizes
}

/// Whether the sizes are constant on the top three radii.
fn stable(sizes: &[usize]) -> bool {
    let top = &sizes[sizes.len().saturating_sub(3)..];
    top.iter().all(|&x| x == top[0])
}

fn check_one(a: &Subset, b: &Ball, side: Side, s: &Element) -> (Evidence, Option<Witness>, bool) {
    let g = a.group();
    let diff: Vec<usize> = (0..b.len())
        .filter(|&i| a.translate_contains(side, s, b.element(i)) != a.contains(b.element(i)))
        .collect();
    let sizes = sizes_by_radius(b, &diff);
    let support = a.support(side, s);
    let witness = |x: usize, detail: String| Witness {
        side: Some(side),
        translator: Some(g.format(s)),
        element: Some(g.format(b.element(x))),
        detail,
    };
    let (w, exact) = match support {
        Some(sup) => {
            let stray = diff.iter().find(|&&i| !sup.covers(g, b.element(i)));
            (stray.map(|&i| witness(i, "difference outside the certified support".into())), true)
        }
        None if stable(&sizes) => (None, false),
        None => {
            let cut = b.radius().saturating_sub(2);
            let first = diff.iter().find(|&&i| b.length(i) > cut).copied().unwrap_or(diff[0]);
            (Some(witness(first, format!("difference keeps growing: sizes {sizes:?}"))), false)
        }
    };
    let evidence = Evidence { side: Some(side), translator: Some(g.format(s)), sizes, support };
    (evidence, w, exact)
}

/// Checks that `sA △ A` (or `As △ A`) is finite for every translator.
pub fn check_translators(a: &Subset, translators: &[Element], sides: &[Side], r: u32) -> Result<Verdict> {
    let b = ball(a.group(), r)?;
    let jobs: Vec<(Side, &Element)> = sides
        .iter()
        .flat_map(|&side| translators.iter().map(move |s| (side, s)))
        .collect();
    let results: Vec<_> = jobs.par_iter().map(|&(side, s)| check_one(a, &b, side, s)).collect();
    let mut verdict = Verdict::exact();
    let mut all_exact = true;
    for (evidence, witness, exact) in results {
        verdict.evidence.push(evidence);
        all_exact &= exact;
        if verdict.witness.is_none() {
            verdict.witness = witness;
        }
    }
    verdict.status = if verdict.witness.is_some() {
        Status::Refuted
    } else if all_exact {
        Status::VerifiedExact
    } else {
        Status::VerifiedToRadius { radius: r }
    };
    Ok(verdict)
}

pub fn is_left_commensurated_up_to(a: &Subset, r: u32) -> Result<Verdict> {
    check_translators(a, a.group().steps(), &[Side::Left], r)
}

pub fn is_bicommensurated_up_to(a: &Subset, r: u32) -> Result<Verdict> {
    check_translators(a, a.group().steps(), &[Side::Left, Side::Right], r)
}

fn same_group(a: &Arc<MarkedGroup>, b: &Arc<MarkedGroup>) -> bool {
    Arc::ptr_eq(a, b) || (a.spec() == b.spec() && a.is_symmetric() == b.is_symmetric())
}

/// The expression with every finite edit forgotten.
fn modulo_finite(spec: &SubsetSpec) -> SubsetSpec {
    match spec {
        SubsetSpec::Finite(_) => SubsetSpec::empty(),
        SubsetSpec::Cofinite(_) => SubsetSpec::all(),
        SubsetSpec::Edited { base, .. } => modulo_finite(base),
        SubsetSpec::Union(v) => flatten(v, true),
        SubsetSpec::Intersection(v) => flatten(v, false),
        SubsetSpec::Complement(a) => modulo_finite(a).complement(),
        other => other.clone(),
    }
}

/// Canonical n-ary union (`union = true`) or intersection of reduced terms.
fn flatten(terms: &[SubsetSpec], union: bool) -> SubsetSpec {
    let (unit, absorbing) = if union {
        (SubsetSpec::empty(), SubsetSpec::all())
    } else {
        (SubsetSpec::all(), SubsetSpec::empty())
    };
    let mut out: Vec<SubsetSpec> = Vec::new();
    for t in terms.iter().map(modulo_finite) {
        let parts = match t {
            SubsetSpec::Union(v) if union => v,
            SubsetSpec::Intersection(v) if !union => v,
            t => vec![t],
        };
        for p in parts {
            if p == absorbing {
                return absorbing;
            }
            if p != unit && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort_by_cached_key(|t| format!("{t:?}"));
    match out.len() {
        0 => unit,
        1 => out.pop().expect("one term"),
        _ if union => SubsetSpec::Union(out),
        _ => SubsetSpec::Intersection(out),
    }
}

/// Decides whether `A △ B` is finite.
pub fn quotient_eq(a: &Subset, b: &Subset, r: u32) -> Result<Verdict> {
    let g = a.group();
    if !same_group(g, b.group()) {
        return Err(Error::domain(format!(
            "subsets of different groups: {} and {}",
            g.spec(),
            b.group().spec()
        )));
    }
    let bl = ball(g, r)?;
    let diff: Vec<usize> = (0..bl.len())
        .filter(|&i| a.contains(bl.element(i)) != b.contains(bl.element(i)))
        .collect();
    let evidence = vec![Evidence { side: None, translator: None, sizes: sizes_by_radius(&bl, &diff), support: None }];
    let outermost = diff.last().map(|&i| g.format(bl.element(i)));

    if let Some(rank) = g.free_rank() {
        if let (Some(ca), Some(cb)) = (ConeSet::from_spec(rank, a.spec()), ConeSet::from_spec(rank, b.spec())) {
            if ca == cb {
                return Ok(Verdict { status: Status::VerifiedExact, witness: None, evidence });
            }
            let sym = ca.symmetric_difference(&cb);
            let detail = format!("infinite difference: the cones {} differ", sym.render(g));
            return Ok(Verdict {
                status: Status::Refuted,
                witness: Some(Witness { side: None, translator: None, element: outermost, detail }),
                evidence,
            });
        }
    }
    if modulo_finite(a.spec()) == modulo_finite(b.spec()) {
        return Ok(Verdict { status: Status::VerifiedExact, witness: None, evidence });
    }
    let cut = r.saturating_sub(2);
    match diff.iter().rev().find(|&&i| bl.length(i) > cut) {
        None => Ok(Verdict { status: Status::VerifiedToRadius { radius: r }, witness: None, evidence }),
        Some(&i) => Ok(Verdict {
            status: Status::Refuted,
            witness: Some(Witness {
                side: None,
                translator: None,
                element: Some(g.format(bl.element(i))),
                detail: format!("difference reaches radius {}", bl.length(i)),
            }),
            evidence,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(spec: &str, text: &str) -> Subset {
        Subset::parse(&MarkedGroup::parse(spec).unwrap(), text).unwrap()
    }

    #[test]
    fn ray_shift_exposes_origin() {
        let a = set("free_abelian(1)", "half(1, 0)");
        let t = a.group().parse_element("t").unwrap();
        let d = translate_difference(&a, &t, 5).unwrap();
        assert_eq!(d, vec![a.group().identity()]);
        let all = set("free(2)", "all");
        let g = all.group().parse_element("abA").unwrap();
        assert!(translate_difference(&all, &g, 4).unwrap().is_empty());
    }

    #[test]
    fn cone_difference_stabilizes() {
        let a = set("free(2)", "cone(b)");
        let s = a.group().parse_element("a").unwrap();
        let sizes: Vec<usize> = (2..7).map(|r| translate_difference(&a, &s, r).unwrap().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }

    #[test]
    fn left_commensuration_examples() {
        assert!(is_left_commensurated_up_to(&set("free(2)", "cone(ab)"), 6).unwrap().is_exact());
        assert!(is_left_commensurated_up_to(&set("free(2)", "finite{a, b}"), 6).unwrap().is_exact());
        let v = is_left_commensurated_up_to(&set("free(2)", "length(ap(0, 2))"), 6).unwrap();
        assert!(v.is_refuted());
        assert_eq!(v.witness.unwrap().translator.as_deref(), Some("a"));
    }

    #[test]
    fn bicommensuration_examples() {
        assert!(is_bicommensurated_up_to(&set("free_abelian(1)", "half(1, 0)"), 6).unwrap().is_exact());
        let v = is_bicommensurated_up_to(&set("free_product([cyclic(2), cyclic(2)])", "first(1)"), 6).unwrap();
        assert!(v.is_refuted());
        assert!(v.witness.is_some());
        assert!(is_bicommensurated_up_to(&set("sum_z2(8)", "level(ap(0, 2))"), 6).unwrap().is_exact());
    }

    #[test]
    fn quotient_examples() {
        let g = MarkedGroup::free(2).unwrap();
        let a = Subset::parse(&g, "cone(a)").unwrap();
        let edited = Subset::parse(&g, "edit(cone(a); +{b}; -{a})").unwrap();
        assert!(quotient_eq(&a, &edited, 6).unwrap().is_exact());
        let b = Subset::parse(&g, "cone(b)").unwrap();
        assert!(quotient_eq(&a, &b, 6).unwrap().is_refuted());
        let all = Subset::parse(&g, "all").unwrap();
        let cof = Subset::parse(&g, "cofinite{a, bb}").unwrap();
        assert!(quotient_eq(&all, &cof, 6).unwrap().is_exact());
        let z = MarkedGroup::free_abelian(1).unwrap();
        let ray = Subset::parse(&z, "half(1, 0)").unwrap();
        let shifted = Subset::parse(&z, "half(1, 3)").unwrap();
        assert_eq!(quotient_eq(&ray, &shifted, 8).unwrap().status, Status::VerifiedToRadius { radius: 8 });
        let neg = Subset::parse(&z, "!half(1, 0)").unwrap();
        assert!(quotient_eq(&ray, &neg, 8).unwrap().is_refuted());
    }

    #[test]
    fn verdict_serializes_flat() {
        let v = Verdict { status: Status::VerifiedToRadius { radius: 4 }, witness: None, evidence: vec![] };
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"{"status":"verified_to_radius","radius":4,"evidence":[]}"#);
        assert_eq!(serde_json::from_str::<Verdict>(&text).unwrap(), v);
    }
}
