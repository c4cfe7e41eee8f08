//! Boundary encodings of subsets: the Cayley edges crossing a subset, and
//! the reconstruction of the subset from crossing parity.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use super::{Side, Subset, SubsetSpec};
use crate::error::{Error, Result};
use crate::group::{ball, Element, MarkedGroup};

/// Ordered pairs `(g, s·g)` with `s` a Cayley step and exactly one endpoint
/// in the subset. Both orientations of each crossing edge are stored.
#[derive(Debug, Clone)]
pub struct BoundaryEncoding {
    pub group: Arc<MarkedGroup>,
    pub pairs: BTreeSet<(Element, Element)>,
    pub radius: u32,
    /// Radius past which no further pairs exist, when certified.
    pub support_radius: Option<u32>,
}

impl BoundaryEncoding {
    /// Whether every pair of the full boundary is within the encoded radius.
    pub fn is_complete(&self) -> bool {
        self.support_radius.is_some_and(|r| r < self.radius)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn formatted_pairs(&self) -> Vec<(String, String)> {
        self.pairs.iter().map(|(a, b)| (self.group.format(a), self.group.format(b))).collect()
    }
}

/// The crossing pairs inside `ball(R)`, without the `1 ∈ U` normalisation.
/// `U` and its complement give the same pairs.
pub fn boundary_pairs(u: &Subset, r: u32) -> Result<BTreeSet<(Element, Element)>> {
    let b = ball(u.group(), r)?;
    let member: Vec<bool> = b.elements().iter().map(|x| u.contains(x)).collect();
    let mut pairs = BTreeSet::new();
    for i in 0..b.len() {
        for j in b.left_neighbors(i) {
            if member[i] != member[j] {
                pairs.insert((b.element(i).clone(), b.element(j).clone()));
            }
        }
    }
    Ok(pairs)
}

/// All boundary pairs of `U` with both endpoints in `ball(R)`.
pub fn boundary_encode(u: &Subset, r: u32) -> Result<BoundaryEncoding> {
    let g = u.group();
    if !u.contains(&g.identity()) {
        return Err(Error::precondition("the subset must contain the identity"));
    }
    let pairs = boundary_pairs(u, r)?;
    // a crossing edge (x, sx) has x or sx in sU △ U
    let support_radius = g
        .steps()
        .iter()
        .map(|s| u.support(Side::Left, s).and_then(|sup| sup.level.is_none().then_some(sup.radius.unwrap_or(0))))
        .try_fold(0u32, |acc, r| r.map(|r| acc.max(r)));
    Ok(BoundaryEncoding { group: g.clone(), pairs, radius: r, support_radius })
}

/// The elements of `ball(R)` reached from the identity by a path crossing
/// the encoding an even number of times.
///
/// Every step of a path counts, the first one included. A pair of paths
/// that disagree means the encoding is not a boundary; the offending edge
/// is reported.
pub fn boundary_decode(k: &BoundaryEncoding, r: u32) -> Result<Subset> {
    let g = &k.group;
    let b = ball(g, r)?;
    let mut parity: Vec<Option<bool>> = vec![None; b.len()];
    parity[0] = Some(false);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let p = parity[i].expect("queued elements are labelled");
        for j in b.left_neighbors(i) {
            let edge = (b.element(i).clone(), b.element(j).clone());
            let q = p ^ k.pairs.contains(&edge);
            match parity[j] {
                None => {
                    parity[j] = Some(q);
                    queue.push_back(j);
                }
                Some(existing) if existing != q => {
                    return Err(Error::InvalidEncoding { from: g.format(&edge.0), to: g.format(&edge.1) });
                }
                Some(_) => {}
            }
        }
    }
    let even = (0..b.len())
        .filter(|&i| parity[i] == Some(false))
        .map(|i| b.element(i).clone())
        .collect();
    Subset::new(g, SubsetSpec::Finite(even))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_in_z() {
        let z = MarkedGroup::free_abelian(1).unwrap();
        let ray = Subset::parse(&z, "ray").unwrap();
        let k = boundary_encode(&ray, 5).unwrap();
        let t_inv = z.parse_element("T").unwrap();
        let expected = BTreeSet::from([(t_inv.clone(), z.identity()), (z.identity(), t_inv)]);
        assert_eq!(k.pairs, expected);
        assert!(k.is_complete());
        let back = boundary_decode(&k, 5).unwrap();
        let b = ball(&z, 5).unwrap();
        for x in b.elements() {
            assert_eq!(back.contains(x), ray.contains(x));
        }
    }

    #[test]
    fn whole_group_and_empty_encoding() {
        let f2 = MarkedGroup::free(2).unwrap();
        let all = Subset::parse(&f2, "all").unwrap();
        let k = boundary_encode(&all, 4).unwrap();
        assert!(k.is_empty());
        let back = boundary_decode(&k, 4).unwrap();
        assert!(ball(&f2, 4).unwrap().elements().iter().all(|x| back.contains(x)));
    }

    #[test]
    fn cone_boundary_stabilizes() {
        let f2 = MarkedGroup::free(2).unwrap();
        let u = Subset::parse(&f2, "cone(b) | finite{1}").unwrap();
        let sizes: Vec<usize> = (3..7).map(|r| boundary_encode(&u, r).unwrap().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }

    #[test]
    fn identity_required() {
        let f2 = MarkedGroup::free(2).unwrap();
        let u = Subset::parse(&f2, "cone(a)").unwrap();
        assert!(matches!(boundary_encode(&u, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn inconsistent_encoding_rejected() {
        let z2 = MarkedGroup::free_abelian(2).unwrap();
        let x = z2.parse_element("x").unwrap();
        let k = BoundaryEncoding {
            group: z2.clone(),
            pairs: BTreeSet::from([(z2.identity(), x.clone()), (x, z2.identity())]),
            radius: 3,
            support_radius: None,
        };
        assert!(matches!(boundary_decode(&k, 3), Err(Error::InvalidEncoding { .. })));
    }
}
