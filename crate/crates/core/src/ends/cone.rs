//! Clopen subsets of the boundary of a free group, as finite unions of cones.
//!
//! The cone of a reduced word `w` is the set of ends whose last letters
//! spell `w`; on the group it is the set of reduced words ending with `w`.
//! Two subsets of the group that differ by a finite set have the same
//! boundary trace, so a `ConeSet` also names a class modulo finite sets.

use crate::error::{Error, Result};
use crate::group::{push_reduced, Element, Letter, MarkedGroup};
use crate::subset::{Subgroup, SubsetSpec};

use super::FreeGroupEnd;

/// `a` is a suffix of `b`, so the cone of `b` lies inside the cone of `a`.
pub fn is_suffix(a: &[Letter], b: &[Letter]) -> bool {
    a.len() <= b.len() && b[b.len() - a.len()..] == *a
}

/// Cones of two words meet iff one word is a suffix of the other.
pub fn cones_disjoint(a: &[Letter], b: &[Letter]) -> bool {
    !is_suffix(a, b) && !is_suffix(b, a)
}

/// The words `x·w` one letter longer than `w`.
pub fn children(rank: usize, w: &[Letter]) -> Vec<Vec<Letter>> {
    (1..=rank as Letter)
        .flat_map(|i| [i, -i])
        .filter(|&x| w.first() != Some(&-x))
        .map(|x| {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(x);
            v.extend_from_slice(w);
            v
        })
        .collect()
}

fn check_word(rank: usize, w: &[Letter]) -> Result<()> {
    if w.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > rank) {
        return Err(Error::domain(format!("letter outside the free group of rank {rank}")));
    }
    if w.windows(2).any(|p| p[0] == -p[1]) {
        return Err(Error::domain(format!("{w:?} is not a reduced word")));
    }
    Ok(())
}

/// Splits the cone of `w` into two disjoint nonempty subcones.
pub fn split_cone(rank: usize, w: &[Letter]) -> Result<[Vec<Letter>; 2]> {
    if rank < 2 {
        return Err(Error::Unsupported(format!(
            "cones of the free group of rank {rank} are single points"
        )));
    }
    check_word(rank, w)?;
    let x = match w.first() {
        None => return Ok([vec![1], vec![2]]),
        Some(f) => (1..=rank as Letter).find(|&i| i != f.abs()).expect("rank ≥ 2"),
    };
    let with = |l: Letter| {
        let mut v = vec![l];
        v.extend_from_slice(w);
        v
    };
    Ok([with(x), with(-x)])
}

/// An end in the cone of `w`.
pub fn cone_point(rank: usize, w: &[Letter]) -> Result<FreeGroupEnd> {
    check_word(rank, w)?;
    let x = if w.first() == Some(&-1) { -1 } else { 1 };
    FreeGroupEnd::new(rank, w, &[x])
}

/// A finite union of cones in canonical form: the maximal cones it contains.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConeSet {
    rank: usize,
    words: Vec<Vec<Letter>>,
}

impl ConeSet {
    pub fn empty(rank: usize) -> Self {
        ConeSet { rank, words: Vec::new() }
    }

    pub fn full(rank: usize) -> Self {
        ConeSet { rank, words: vec![Vec::new()] }
    }

    pub fn cone(rank: usize, w: &[Letter]) -> Result<Self> {
        check_word(rank, w)?;
        Ok(Self::normalized(rank, vec![w.to_vec()]))
    }

    pub fn from_words(rank: usize, words: Vec<Vec<Letter>>) -> Result<Self> {
        for w in &words {
            check_word(rank, w)?;
        }
        Ok(Self::normalized(rank, words))
    }

    fn normalized(rank: usize, mut words: Vec<Vec<Letter>>) -> Self {
        loop {
            words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            let mut kept: Vec<Vec<Letter>> = Vec::new();
            for w in words {
                if !kept.iter().any(|k| is_suffix(k, &w)) {
                    kept.push(w);
                }
            }
            let merge = kept.iter().filter(|w| !w.is_empty()).find_map(|w| {
                let parent = &w[1..];
                let kids = children(rank, parent);
                kids.iter().all(|c| kept.contains(c)).then(|| parent.to_vec())
            });
            match merge {
                None => {
                    kept.sort();
                    return ConeSet { rank, words: kept };
                }
                Some(p) => {
                    kept.retain(|w| !is_suffix(&p, w));
                    kept.push(p);
                    words = kept;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The maximal cones, as pairwise disjoint suffix words.
    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    pub fn contains_end(&self, e: &FreeGroupEnd) -> bool {
        self.words.iter().any(|w| e.ends_with(w))
    }

    /// Membership of a reduced word in the group subset named by the cones.
    pub fn contains_word(&self, x: &[Letter]) -> bool {
        self.words.iter().any(|w| is_suffix(w, x))
    }

    pub fn union(&self, other: &Self) -> Self {
        let words = self.words.iter().chain(&other.words).cloned().collect();
        Self::normalized(self.rank, words)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut words = Vec::new();
        for a in &self.words {
            for b in &other.words {
                if is_suffix(a, b) {
                    words.push(b.clone());
                } else if is_suffix(b, a) {
                    words.push(a.clone());
                }
            }
        }
        Self::normalized(self.rank, words)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        self.complement_below(&[], &mut out);
        Self::normalized(self.rank, out)
    }

    fn complement_below(&self, w: &[Letter], out: &mut Vec<Vec<Letter>>) {
        if self.words.iter().any(|s| is_suffix(s, w)) {
            return;
        }
        if !self.words.iter().any(|s| is_suffix(w, s)) {
            out.push(w.to_vec());
            return;
        }
        for c in children(self.rank, w) {
            self.complement_below(&c, out);
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.difference(other).union(&other.difference(self))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// `{ω·g : ω ∈ self}`.
    pub fn right_translate(&self, g: &[Letter]) -> Result<Self> {
        check_word(self.rank, g)?;
        let mut pending: Vec<Vec<Letter>> = self.words.clone();
        let mut out = Vec::new();
        while let Some(w) = pending.pop() {
            if w.len() <= g.len() {
                pending.extend(children(self.rank, &w));
                continue;
            }
            let mut t = w;
            push_reduced(&mut t, g);
            out.push(t);
        }
        Ok(Self::normalized(self.rank, out))
    }

    /// The subset of the group formed by the union of the cones.
    pub fn to_spec(&self) -> SubsetSpec {
        if self.is_full() {
            return SubsetSpec::all();
        }
        match self.words.len() {
            0 => SubsetSpec::empty(),
            1 => SubsetSpec::SuffixCone(self.words[0].clone()),
            _ => SubsetSpec::Union(self.words.iter().cloned().map(SubsetSpec::SuffixCone).collect()),
        }
    }

    /// The boundary trace of a subset description, when it is a Boolean
    /// combination of cones up to finite edits.
    pub fn from_spec(rank: usize, spec: &SubsetSpec) -> Option<Self> {
        let fold = |v: &[SubsetSpec], start: Self, op: fn(&Self, &Self) -> Self| -> Option<Self> {
            v.iter().try_fold(start, |acc, s| Some(op(&acc, &Self::from_spec(rank, s)?)))
        };
        match spec {
            SubsetSpec::Finite(_) => Some(Self::empty(rank)),
            SubsetSpec::Cofinite(_) => Some(Self::full(rank)),
            SubsetSpec::SuffixCone(w) => Self::cone(rank, w).ok(),
            SubsetSpec::CosetUnion { subgroup: Subgroup::Whole, reps } => {
                Some(if reps.is_empty() { Self::empty(rank) } else { Self::full(rank) })
            }
            SubsetSpec::CosetUnion { subgroup: Subgroup::Trivial, .. } => Some(Self::empty(rank)),
            SubsetSpec::Union(v) => fold(v, Self::empty(rank), Self::union),
            SubsetSpec::Intersection(v) => fold(v, Self::full(rank), Self::intersection),
            SubsetSpec::Complement(a) => Some(Self::from_spec(rank, a)?.complement()),
            SubsetSpec::Edited { base, .. } => Self::from_spec(rank, base),
            SubsetSpec::RightTranslate { base, by: Element::Word(g) } => {
                Self::from_spec(rank, base)?.right_translate(g).ok()
            }
            _ => None,
        }
    }

    pub fn render(&self, g: &MarkedGroup) -> String {
        if self.is_empty() {
            return "none".into();
        }
        if self.is_full() {
            return "all".into();
        }
        self.words
            .iter()
            .map(|w| format!("cone({})", g.format(&Element::Word(w.clone()))))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}
