//! Last-letter types and H-suffixes on free products.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ball, Element, MarkedGroup};
use crate::subset::verify::{is_left_commensurated_up_to, Verdict};
use crate::subset::{Subset, SubsetSpec};

fn need_free_product(g: &MarkedGroup) -> Result<()> {
    if g.factors().is_empty() {
        Err(Error::domain(format!("{} is not a free product", g.spec())))
    } else {
        Ok(())
    }
}

/// 1-based factor of the last syllable; 0 for the identity.
pub fn last_letter_type(g: &MarkedGroup, x: &Element) -> Result<usize> {
    need_free_product(g)?;
    if !g.contains(x) {
        return Err(Error::domain(format!("{x:?} is not an element of {}", g.spec())));
    }
    Ok(last_letter_type_unchecked(x))
}

pub(crate) fn last_letter_type_unchecked(x: &Element) -> usize {
    match x {
        Element::Syllables(s) => s.last().map_or(0, |y| y.factor + 1),
        _ => 0,
    }
}

/// `{h ∈ ball(R) : f(g·h) ≠ f(h)}` for the last-letter-type map `f`.
pub fn coupme_difference_set(g: &Arc<MarkedGroup>, x: &Element, r: u32) -> Result<Vec<Element>> {
    last_letter_type(g, x)?;
    let b = ball(g, r)?;
    Ok(b.elements()
        .iter()
        .filter(|h| last_letter_type_unchecked(&g.mul(x, h)) != last_letter_type_unchecked(h))
        .cloned()
        .collect())
}

/// The last syllable of `x` when it lies in factor `h` (0-based), else the
/// identity of that factor.
pub fn h_suffix(g: &MarkedGroup, x: &Element, h: usize) -> Result<Element> {
    need_free_product(g)?;
    g.factor(h)?;
    if !g.contains(x) {
        return Err(Error::domain(format!("{x:?} is not an element of {}", g.spec())));
    }
    Ok(h_suffix_unchecked(g, x, h))
}

pub(crate) fn h_suffix_unchecked(g: &MarkedGroup, x: &Element, h: usize) -> Element {
    match x {
        Element::Syllables(s) => match s.last() {
            Some(y) if y.factor == h => y.element.clone(),
            _ => g.factors()[h].identity(),
        },
        _ => g.factors()[h].identity(),
    }
}

/// `M′ = {g : suf_H(g) ∈ M}` for a left-`H`-commensurated `M ⊆ H`.
///
/// `M` is verified inside `H` at radius `r` first; a refutation becomes a
/// precondition error.
pub fn lift_commensurated(g: &Arc<MarkedGroup>, h: usize, m: &Subset, r: u32) -> Result<(Subset, Verdict)> {
    need_free_product(g)?;
    let factor = g.factor(h)?;
    if !Arc::ptr_eq(factor, m.group()) && factor.spec() != m.group().spec() {
        return Err(Error::domain(format!("M is a subset of {}, not of factor {}", m.group().spec(), h + 1)));
    }
    let verdict = is_left_commensurated_up_to(m, r)?;
    if verdict.is_refuted() {
        let w = verdict.witness.as_ref().expect("refutations carry witnesses");
        return Err(Error::precondition(format!(
            "M is not left-commensurated in {}: {}",
            factor.spec(),
            w.detail
        )));
    }
    let lifted = Subset::new(
        g,
        SubsetSpec::FreeProductSuffixSet { factor: h, target: Box::new(m.spec().clone()) },
    )?;
    Ok((lifted, verdict))
}

/// Comparison of `M′ ∖ t⁻¹M′` (over `ball(G, R)`) with `M ∖ t⁻¹M` (over
/// the `H`-elements of the same ball), and of `M′ ∩ H` with `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCheck {
    pub translator: String,
    pub lifted_difference: Vec<String>,
    pub factor_difference: Vec<String>,
    pub differences_agree: bool,
    pub restriction_agrees: bool,
}

pub fn check_lift(lifted: &Subset, m: &Subset, h: usize, t: &Element, r: u32) -> Result<LiftCheck> {
    let g = lifted.group();
    let th = g.embed(h, t)?;
    let b = ball(g, r)?;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut restriction_agrees = true;
    for x in b.elements() {
        if lifted.contains(x) && !lifted.contains(&g.mul(&th, x)) {
            lhs.push(x.clone());
        }
        if let Element::Syllables(s) = x {
            if s.len() <= 1 {
                let y = s.first().map_or_else(|| m.group().identity(), |syl| syl.element.clone());
                if s.first().is_none_or(|syl| syl.factor == h) {
                    if m.contains(&y) && !m.contains(&m.group().mul(t, &y)) {
                        rhs.push(x.clone());
                    }
                    restriction_agrees &= lifted.contains(x) == m.contains(&y);
                }
            }
        }
    }
    Ok(LiftCheck {
        translator: m.group().format(t),
        differences_agree: lhs == rhs,
        lifted_difference: lhs.iter().map(|x| g.format(x)).collect(),
        factor_difference: rhs.iter().map(|x| g.format(x)).collect(),
        restriction_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g12() -> Arc<MarkedGroup> {
        MarkedGroup::parse("free_product([cyclic(5), cyclic(3)])").unwrap()
    }

    #[test]
    fn last_letter_examples() {
        let g = g12();
        assert_eq!(last_letter_type(&g, &g.identity()).unwrap(), 0);
        assert_eq!(last_letter_type(&g, &g.parse_element("a*b").unwrap()).unwrap(), 2);
        assert_eq!(last_letter_type(&g, &g.parse_element("a").unwrap()).unwrap(), 1);
        let f2 = MarkedGroup::free(2).unwrap();
        assert!(last_letter_type(&f2, &f2.identity()).is_err());
    }

    #[test]
    fn single_syllable_differences() {
        let g = g12();
        for s in g.generators() {
            let d = coupme_difference_set(&g, s, 5).unwrap();
            let allowed = [g.identity(), g.inverse(s)];
            assert!(d.iter().all(|x| allowed.contains(x)), "{}", g.format(s));
        }
        assert!(coupme_difference_set(&g, &g.identity(), 5).unwrap().is_empty());
    }

    #[test]
    fn multi_syllable_difference_stabilizes() {
        let g = g12();
        let x = g.parse_element("a^2*b*a").unwrap();
        let sizes: Vec<usize> = (4..7).map(|r| coupme_difference_set(&g, &x, r).unwrap().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }

    #[test]
    fn suffix_examples() {
        let g = MarkedGroup::parse("free_product([free_abelian(1), cyclic(3)])").unwrap();
        let lh = g.parse_element("b*a^2").unwrap();
        assert_eq!(h_suffix(&g, &lh, 0).unwrap(), Element::Vector(vec![2]));
        let hl = g.parse_element("a^2*b").unwrap();
        assert_eq!(h_suffix(&g, &hl, 0).unwrap(), Element::Vector(vec![0]));
        assert_eq!(h_suffix(&g, &g.identity(), 0).unwrap(), Element::Vector(vec![0]));
    }

    #[test]
    fn lift_of_ray() {
        let g = MarkedGroup::parse("free_product([free_abelian(1), free_abelian(1)])").unwrap();
        let h = g.factor(0).unwrap().clone();
        let m = Subset::parse(&h, "half(1, 1)").unwrap();
        let (lifted, verdict) = lift_commensurated(&g, 0, &m, 6).unwrap();
        assert!(verdict.is_exact());
        for t in ["t", "T", "t^2"] {
            let c = check_lift(&lifted, &m, 0, &h.parse_element(t).unwrap(), 6).unwrap();
            assert!(c.differences_agree && c.restriction_agrees, "{c:?}");
        }
        let bad = Subset::parse(&h, "length(even)").unwrap();
        assert!(matches!(lift_commensurated(&g, 0, &bad, 6), Err(Error::Precondition(_))));
    }
}
