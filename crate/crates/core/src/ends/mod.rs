//! Ends of free groups as eventually periodic left-infinite reduced words.
//!
//! The end `…ppp·t` is approached by the suffixes of the word, which form a
//! ray of left-multiplication edges from the identity. Right translation by
//! a group element rewrites only the right-hand seam.

pub mod cone;
pub mod holder;

use std::collections::HashSet;

use crate::cayley::{min_separating_radius, SeparationWitness};
use crate::error::{Error, Result};
use crate::group::{push_reduced, Ball, Element, Letter, MarkedGroup};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeGroupEnd {
    rank: usize,
    /// Letters nearest the group, read left to right.
    tail: Vec<Letter>,
    /// Repeated to the left of the tail.
    period: Vec<Letter>,
}

fn reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::with_capacity(word.len());
    push_reduced(&mut out, word);
    out
}

fn primitive_root(p: &[Letter]) -> Vec<Letter> {
    let n = p.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| p[i] == p[i - d]))
        .map(|d| p[..d].to_vec())
        .expect("d = n always works")
}

impl FreeGroupEnd {
    /// Normalises `…ppp·t` into its unique canonical form.
    pub fn new(rank: usize, tail: &[Letter], period: &[Letter]) -> Result<Self> {
        let bad = |l: &Letter| *l == 0 || l.unsigned_abs() as usize > rank;
        if tail.iter().chain(period).any(bad) {
            return Err(Error::domain(format!("letter outside the free group of rank {rank}")));
        }
        let mut p = reduce(period);
        if p.is_empty() {
            return Err(Error::domain("the period of an end must be a nontrivial word"));
        }
        // p = u q u⁻¹ gives …qqq·u⁻¹t
        let mut k = 0;
        while p[k] == -p[p.len() - 1 - k] {
            k += 1;
        }
        let u_inv: Vec<Letter> = p[p.len() - k..].to_vec();
        p = p[k..p.len() - k].to_vec();
        let mut t = u_inv;
        t.extend_from_slice(tail);
        let mut t = reduce(&t);
        // cancellation at the seam rotates the period
        while !t.is_empty() && *p.last().unwrap() == -t[0] {
            p.rotate_right(1);
            t.remove(0);
        }
        p = primitive_root(&p);
        // a tail continuing the period is absorbed into it
        while !t.is_empty() && t[0] == p[0] {
            p.rotate_left(1);
            t.remove(0);
        }
        Ok(FreeGroupEnd { rank, tail: t, period: p })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tail(&self) -> &[Letter] {
        &self.tail
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    /// The `k`-th letter counted from the right, starting at 0.
    pub fn letter(&self, k: usize) -> Letter {
        let t = self.tail.len();
        if k < t {
            self.tail[t - 1 - k]
        } else {
            let p = self.period.len();
            self.period[p - 1 - (k - t) % p]
        }
    }

    /// The last `n` letters, as a reduced word.
    pub fn approximant(&self, n: usize) -> Vec<Letter> {
        let mut w: Vec<Letter> = (0..n).map(|k| self.letter(k)).collect();
        w.reverse();
        w
    }

    pub fn ends_with(&self, w: &[Letter]) -> bool {
        w.iter().rev().enumerate().all(|(k, &l)| self.letter(k) == l)
    }

    /// `tail|period` in the group's generator labels.
    pub fn parse(group: &MarkedGroup, text: &str) -> Result<Self> {
        let rank = group
            .free_rank()
            .ok_or_else(|| Error::domain(format!("{} is not a free group", group.spec())))?;
        let (tail, period) = text
            .split_once('|')
            .ok_or_else(|| Error::parse(0, "end literals are written `tail|period`"))?;
        let word = |s: &str| -> Result<Vec<Letter>> {
            match group.parse_element(s)? {
                Element::Word(w) => Ok(w),
                _ => unreachable!("free group elements are words"),
            }
        };
        Self::new(rank, &word(tail)?, &word(period)?)
    }

    pub fn render(&self, group: &MarkedGroup) -> String {
        let show = |w: &[Letter]| {
            if w.is_empty() {
                String::new()
            } else {
                group.format(&Element::Word(w.to_vec()))
            }
        };
        format!("{}|{}", show(&self.tail), show(&self.period))
    }
}

/// Length of the longest common suffix; `None` for equal ends.
pub fn common_suffix_depth(a: &FreeGroupEnd, b: &FreeGroupEnd) -> Result<Option<u32>> {
    if a.rank != b.rank {
        return Err(Error::domain("ends of free groups of different ranks"));
    }
    if a == b {
        return Ok(None);
    }
    let bound = a.tail.len().max(b.tail.len()) + a.period.len() + b.period.len();
    Ok((0..=bound).find(|&k| a.letter(k) != b.letter(k)).map(|k| k as u32))
}

/// `exp(−D)`, and 0 for equal ends.
pub fn end_distance(a: &FreeGroupEnd, b: &FreeGroupEnd) -> Result<f64> {
    Ok(match common_suffix_depth(a, b)? {
        None => 0.0,
        Some(d) => (-(d as f64)).exp(),
    })
}

/// The end `…ppp·t·g`.
pub fn right_translate_end(a: &FreeGroupEnd, g: &[Letter]) -> Result<FreeGroupEnd> {
    let mut t = a.tail.clone();
    t.extend_from_slice(g);
    FreeGroupEnd::new(a.rank, &t, &a.period)
}

/// Least radius of a finite set separating depth-`approx` approximants of
/// the two ends inside `b`, by exhaustive search.
pub fn oracle_separation(
    b: &Ball,
    x: &FreeGroupEnd,
    y: &FreeGroupEnd,
    approx: usize,
) -> Result<Option<SeparationWitness>> {
    if b.group().free_rank() != Some(x.rank) || x.rank != y.rank {
        return Err(Error::domain("the ball must be taken in the ends' free group"));
    }
    if approx as u32 > b.radius() {
        return Err(Error::domain("approximants must lie inside the ball"));
    }
    let ex = Element::Word(x.approximant(approx));
    let ey = Element::Word(y.approximant(approx));
    if ex == ey {
        return Ok(None);
    }
    min_separating_radius(b, &ex, &ey)
}

/// A deterministic list of distinct ends with short tails and periods.
pub fn enumerate_ends(rank: usize, max_tail: usize, max_period: usize) -> Vec<FreeGroupEnd> {
    let words = |n: usize| -> Vec<Vec<Letter>> {
        let mut layer = vec![Vec::new()];
        let mut all = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &layer {
                for l in (1..=rank as Letter).flat_map(|i| [i, -i]) {
                    if w.last() != Some(&-l) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in words(max_period).into_iter().filter(|w| !w.is_empty()) {
        for t in words(max_tail) {
            if let Ok(e) = FreeGroupEnd::new(rank, &t, &p) {
                if seen.insert(e.clone()) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// A fixed list of `n` pairs of distinct ends of `F_rank` with common-suffix
/// depth at most `max_depth`, cycling through the depths `0..=max_depth`.
pub fn metric_corpus(rank: usize, n: usize, max_depth: u32) -> Vec<(FreeGroupEnd, FreeGroupEnd)> {
    let ends = enumerate_ends(rank, 3, 2);
    let mut buckets: Vec<Vec<(FreeGroupEnd, FreeGroupEnd)>> = vec![Vec::new(); max_depth as usize + 1];
    let stride = 7;
    for (i, a) in ends.iter().enumerate() {
        let b = &ends[(i * stride + 1) % ends.len()];
        if let Ok(Some(d)) = common_suffix_depth(a, b) {
            if d <= max_depth {
                buckets[d as usize].push((a.clone(), b.clone()));
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    while out.len() < n && buckets.iter().any(|b| k < b.len()) {
        for b in &buckets {
            if out.len() < n && k < b.len() {
                out.push(b[k].clone());
            }
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> std::sync::Arc<MarkedGroup> {
        MarkedGroup::free(2).unwrap()
    }

    fn end(s: &str) -> FreeGroupEnd {
        FreeGroupEnd::parse(&f2(), s).unwrap()
    }

    #[test]
    fn normal_forms() {
        assert_eq!(end("a|a"), end("|a"));
        assert_eq!(end("|aa"), end("|a"));
        assert_eq!(end("|bab").render(&f2()), "|bab");
        assert_eq!(end("|baB").render(&f2()), "B|a");
        assert_eq!(end("A|a"), end("|a"));
        assert_eq!(end("|abB"), end("|a"));
        assert_eq!(end("ab|ab"), end("|ab"));
        assert_eq!(end("a|ab"), end("|ba"));
        assert!(FreeGroupEnd::parse(&f2(), "a|1").is_err());
    }

    #[test]
    fn depth_examples() {
        assert_eq!(common_suffix_depth(&end("|a"), &end("b|a")).unwrap(), Some(0));
        assert_eq!(common_suffix_depth(&end("|a"), &end("|a")).unwrap(), None);
        assert_eq!(common_suffix_depth(&end("a|b"), &end("|a")).unwrap(), Some(1));
        assert_eq!(end_distance(&end("|a"), &end("|a")).unwrap(), 0.0);
        assert_eq!(end_distance(&end("|a"), &end("|b")).unwrap(), 1.0);
    }

    #[test]
    fn translation() {
        assert_eq!(right_translate_end(&end("|a"), &[-1]).unwrap(), end("|a"));
        assert_eq!(right_translate_end(&end("b|a"), &[2, 1]).unwrap(), end("bba|a"));
        let w = end("aB|ab");
        let g = [2, 2, -1];
        let back = right_translate_end(&right_translate_end(&w, &g).unwrap(), &[1, -2, -2]).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn oracle_matches_depth() {
        let b = crate::group::ball(&f2(), 8).unwrap();
        for (x, y) in [("ab|a", "bb|a"), ("|a", "|b"), ("ba|b", "|ab")] {
            let (x, y) = (end(x), end(y));
            let d = common_suffix_depth(&x, &y).unwrap().unwrap();
            let w = oracle_separation(&b, &x, &y, 7).unwrap().unwrap();
            assert_eq!(w.radius, d, "{x:?} {y:?}");
        }
    }

    #[test]
    fn corpus_covers_every_depth() {
        let c = metric_corpus(2, 50, 4);
        assert_eq!(c.len(), 50);
        let depths: HashSet<u32> = c.iter().map(|(a, b)| common_suffix_depth(a, b).unwrap().unwrap()).collect();
        assert_eq!(depths, (0..=4).collect());
    }

    #[test]
    fn enumeration_is_canonical() {
        let ends = enumerate_ends(2, 2, 2);
        let set: HashSet<_> = ends.iter().collect();
        assert_eq!(set.len(), ends.len());
        for e in &ends {
            assert_eq!(&FreeGroupEnd::new(2, e.tail(), e.period()).unwrap(), e);
        }
    }
}
