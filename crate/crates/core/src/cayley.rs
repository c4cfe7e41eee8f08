//! End counting from annuli of Cayley balls, and separation queries.
//!
//! Edges are `x → s·x` for `s` in the Cayley generating set, so components
//! pair with left-commensurated subsets.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ball, Ball, Element, MarkedGroup};

#[derive(Debug, Clone)]
pub struct Component {
    pub elements: Vec<Element>,
    pub touches_outer: bool,
}

/// Connected components of `ball(R) ∖ ball(r)`.
#[derive(Debug, Clone)]
pub struct ComplementComponents {
    pub inner: u32,
    pub outer: u32,
    pub components: Vec<Component>,
}

impl ComplementComponents {
    pub fn unbounded_count(&self) -> usize {
        self.components.iter().filter(|c| c.touches_outer).count()
    }
}

pub fn complement_components(group: &Arc<MarkedGroup>, r: u32, outer: u32) -> Result<ComplementComponents> {
    if r >= outer {
        return Err(Error::domain(format!("need r < R, got r = {r}, R = {outer}")));
    }
    let b = ball(group, outer)?;
    Ok(components_in(&b, r))
}

/// Components of the annulus between `r` and the radius of `b`.
pub fn components_in(b: &Ball, r: u32) -> ComplementComponents {
    let outer = b.radius();
    let start = b.within(r).end;
    let n = b.len() - start;
    let mut uf = UnionFind::<usize>::new(n);
    for i in start..b.len() {
        for j in b.left_neighbors(i) {
            if j >= start {
                uf.union(i - start, j - start);
            }
        }
    }
    // components are numbered by their first element in BFS order
    let mut slot = vec![usize::MAX; n];
    let mut components: Vec<Component> = Vec::new();
    for k in 0..n {
        let root = uf.find(k);
        if slot[root] == usize::MAX {
            slot[root] = components.len();
            components.push(Component { elements: Vec::new(), touches_outer: false });
        }
        let c = &mut components[slot[root]];
        c.elements.push(b.element(start + k).clone());
        if b.length(start + k) == outer {
            c.touches_outer = true;
        }
    }
    ComplementComponents { inner: r, outer, components }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndVerdict {
    Zero,
    One,
    Two,
    Many,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndCountEstimate {
    pub window: u32,
    /// `(r, number of components of ball(r + window) ∖ ball(r) touching the outer sphere)`.
    pub counts: Vec<(u32, usize)>,
    pub verdict: EndVerdict,
}

pub fn estimate_end_count(group: &Arc<MarkedGroup>, r_max: u32) -> Result<EndCountEstimate> {
    estimate_end_count_window(group, r_max, 2)
}

pub fn estimate_end_count_window(group: &Arc<MarkedGroup>, r_max: u32, window: u32) -> Result<EndCountEstimate> {
    if window == 0 || r_max < window + 1 {
        return Err(Error::domain(format!(
            "need r_max ≥ window + 1 (window {window}), got r_max = {r_max}"
        )));
    }
    let b = ball(group, r_max)?;
    let counts: Vec<(u32, usize)> = (1..=r_max - window)
        .map(|r| {
            let sub = truncate(&b, r + window);
            (r, components_in(&sub, r).unbounded_count())
        })
        .collect();
    let values: Vec<usize> = counts.iter().map(|c| c.1).collect();
    Ok(EndCountEstimate { window, verdict: classify(&values), counts })
}

fn truncate(b: &Ball, r: u32) -> Ball {
    if r >= b.radius() {
        b.clone()
    } else {
        ball(b.group(), r).expect("sub-ball of an existing ball fits the cap")
    }
}

/// Growth on the last three radii means many ends; a constant value of 0, 1
/// or 2 on the second half of the radii gives that count.
pub fn classify(counts: &[usize]) -> EndVerdict {
    let n = counts.len();
    if n >= 3 && counts[n - 3] < counts[n - 2] && counts[n - 2] < counts[n - 1] {
        return EndVerdict::Many;
    }
    if n == 0 {
        return EndVerdict::Inconclusive;
    }
    let tail = &counts[n / 2..];
    let last = counts[n - 1];
    if tail.iter().all(|&c| c == last) {
        match last {
            0 => return EndVerdict::Zero,
            1 => return EndVerdict::One,
            2 => return EndVerdict::Two,
            _ => {}
        }
    }
    EndVerdict::Inconclusive
}

/// Whether `x` and `y` lie in distinct components of `ball(R) ∖ F`.
pub fn separates(group: &Arc<MarkedGroup>, f: &[Element], x: &Element, y: &Element, outer: u32) -> Result<bool> {
    let b = ball(group, outer)?;
    let removed: HashSet<usize> = f.iter().filter_map(|z| b.index_of(z)).collect();
    separates_in(&b, &removed, x, y)
}

/// As [`separates`], with `F` given by ball indices.
pub fn separates_in(b: &Ball, removed: &HashSet<usize>, x: &Element, y: &Element) -> Result<bool> {
    let g = b.group();
    let locate = |z: &Element| -> Result<usize> {
        let i = b
            .index_of(z)
            .ok_or_else(|| Error::precondition(format!("{} is outside the ball of radius {}", g.format(z), b.radius())))?;
        if removed.contains(&i) {
            return Err(Error::precondition(format!("{} lies in the removed set", g.format(z))));
        }
        Ok(i)
    };
    let (xi, yi) = (locate(x)?, locate(y)?);
    if xi == yi {
        return Ok(false);
    }
    let mut seen = vec![false; b.len()];
    seen[xi] = true;
    let mut queue = VecDeque::from([xi]);
    while let Some(i) = queue.pop_front() {
        for j in b.left_neighbors(i) {
            if j == yi {
                return Ok(false);
            }
            if !seen[j] && !removed.contains(&j) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationWitness {
    pub radius: u32,
    /// A smallest separating set found: a single geodesic vertex when one
    /// exists, otherwise the whole ball of that radius.
    pub cut: Vec<Element>,
}

/// Least radius of a finite `F ⊆ ball(R)` separating `x` from `y` inside `b`.
///
/// Enlarging `F` to the full ball of its radius keeps it separating, so it
/// suffices to try `F = ball(ρ)` for increasing `ρ`; singleton cuts on the
/// geodesics to `x` and `y` are then tried to exhibit a minimal witness.
pub fn min_separating_radius(b: &Ball, x: &Element, y: &Element) -> Result<Option<SeparationWitness>> {
    let g = b.group();
    let limit = g.word_length(x).min(g.word_length(y));
    for rho in 0..limit {
        let removed: HashSet<usize> = b.within(rho).collect();
        if !separates_in(b, &removed, x, y)? {
            continue;
        }
        for z in geodesic_vertices(g, x).into_iter().chain(geodesic_vertices(g, y)) {
            if g.word_length(&z) != rho {
                continue;
            }
            let single = HashSet::from([b.index_of(&z).expect("geodesic vertex lies in the ball")]);
            if separates_in(b, &single, x, y)? {
                return Ok(Some(SeparationWitness { radius: rho, cut: vec![z] }));
            }
        }
        let cut = b.within(rho).map(|i| b.element(i).clone()).collect();
        return Ok(Some(SeparationWitness { radius: rho, cut }));
    }
    Ok(None)
}

/// Vertices `1, s_1, s_2 s_1, …, x` of the geodesic for the word `s_k … s_1`.
fn geodesic_vertices(g: &MarkedGroup, x: &Element) -> Vec<Element> {
    let word = g.word_of(x);
    let mut out = vec![g.identity()];
    let mut acc = g.identity();
    for &l in word.iter().rev() {
        acc = g.mul(&g.generator(l).expect("letter from word_of"), &acc);
        out.push(acc.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(spec: &str) -> Arc<MarkedGroup> {
        MarkedGroup::parse(spec).unwrap()
    }

    #[test]
    fn line_has_two_components() {
        let c = complement_components(&group("free_abelian(1)"), 1, 6).unwrap();
        assert_eq!(c.components.len(), 2);
        assert!(c.components.iter().all(|c| c.touches_outer));
    }

    #[test]
    fn grid_has_one_component() {
        let c = complement_components(&group("free_abelian(2)"), 2, 8).unwrap();
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.unbounded_count(), 1);
    }

    #[test]
    fn tree_components() {
        let f2 = group("free(2)");
        let c = complement_components(&f2, 1, 5).unwrap();
        assert_eq!(c.components.len(), 12);
        assert_eq!(c.unbounded_count(), 12);
    }

    #[test]
    fn verdicts() {
        assert_eq!(estimate_end_count(&group("free_abelian(1)"), 6).unwrap().verdict, EndVerdict::Two);
        assert_eq!(
            estimate_end_count(&group("free_product([cyclic(2), cyclic(2)])"), 6).unwrap().verdict,
            EndVerdict::Two
        );
        let e = estimate_end_count(&group("free_product([cyclic(2), cyclic(3)])"), 9).unwrap();
        assert_eq!(e.verdict, EndVerdict::Many, "{:?}", e.counts);
        assert_eq!(estimate_end_count(&group("sym(3)"), 6).unwrap().verdict, EndVerdict::Zero);
        let f2 = estimate_end_count(&group("free(2)"), 6).unwrap();
        assert_eq!(f2.counts.iter().map(|c| c.1).collect::<Vec<_>>(), vec![12, 36, 108, 324]);
    }

    #[test]
    fn classify_rules() {
        assert_eq!(classify(&[3, 2, 2, 2]), EndVerdict::Two);
        assert_eq!(classify(&[1, 2, 1, 2]), EndVerdict::Inconclusive);
        assert_eq!(classify(&[5, 4, 5, 6]), EndVerdict::Many);
        assert_eq!(classify(&[4, 4, 4]), EndVerdict::Inconclusive);
    }

    #[test]
    fn separation_examples() {
        let z = group("free_abelian(1)");
        let t = |n: i64| Element::Vector(vec![n]);
        assert!(separates(&z, &[z.identity()], &t(2), &t(-2), 5).unwrap());
        let z2 = group("free_abelian(2)");
        let b = ball(&z2, 4).unwrap();
        let removed = HashSet::from([0usize]);
        for x in &b.elements()[1..6] {
            for y in &b.elements()[1..6] {
                assert!(!separates_in(&b, &removed, x, y).unwrap());
            }
        }
        let f2 = group("free(2)");
        let a = f2.parse_element("a").unwrap();
        let bb = f2.parse_element("b").unwrap();
        assert!(separates(&f2, &[f2.identity()], &a, &bb, 4).unwrap());
        assert!(matches!(
            separates(&f2, std::slice::from_ref(&a), &a, &bb, 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oracle_finds_geodesic_cut() {
        let f2 = group("free(2)");
        let b = ball(&f2, 8).unwrap();
        let x = f2.parse_element("aaabab").unwrap();
        let y = f2.parse_element("bbbbab").unwrap();
        let w = min_separating_radius(&b, &x, &y).unwrap().unwrap();
        assert_eq!(w.radius, 3);
        assert_eq!(w.cut, vec![f2.parse_element("bab").unwrap()]);
    }
}
