//! Empirical comparison of the end metrics of two bases of a free group.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{common_suffix_depth, FreeGroupEnd};
use crate::error::{Error, Result};
use crate::group::{push_reduced, Letter};

const REWRITE_DEPTH: usize = 12;
const REWRITE_STATES: usize = 1 << 20;

pub const MIN_PAIRS: usize = 10;

/// A basis of `F_k` given by words in the standard letters, with each
/// standard letter rewritten as a word in the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    rank: usize,
    words: Vec<Vec<Letter>>,
    /// `rewrite[i]` spells standard letter `i + 1` in basis letters.
    rewrite: Vec<Vec<Letter>>,
}

impl Basis {
    pub fn standard(rank: usize) -> Self {
        let words = (1..=rank as Letter).map(|i| vec![i]).collect::<Vec<_>>();
        Basis { rank, rewrite: words.clone(), words }
    }

    /// Finds the rewriting by breadth-first search in the subgroup the words
    /// generate.
    pub fn new(rank: usize, words: Vec<Vec<Letter>>) -> Result<Self> {
        if words.len() != rank {
            return Err(Error::precondition(format!(
                "a basis of the free group of rank {rank} has {rank} elements, got {}",
                words.len()
            )));
        }
        let mut reduced = Vec::new();
        for w in &words {
            if w.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > rank) {
                return Err(Error::domain(format!("letter outside the free group of rank {rank}")));
            }
            let mut r = Vec::new();
            push_reduced(&mut r, w);
            reduced.push(r);
        }
        let inverse = |w: &[Letter]| w.iter().rev().map(|l| -l).collect::<Vec<_>>();
        let steps: Vec<(Letter, Vec<Letter>)> = reduced
            .iter()
            .enumerate()
            .flat_map(|(i, w)| [(i as Letter + 1, w.clone()), (-(i as Letter) - 1, inverse(w))])
            .collect();
        let mut path: HashMap<Vec<Letter>, Vec<Letter>> = HashMap::from([(Vec::new(), Vec::new())]);
        let mut queue = VecDeque::from([Vec::<Letter>::new()]);
        let mut rewrite: Vec<Option<Vec<Letter>>> = vec![None; rank];
        while let Some(x) = queue.pop_front() {
            let p = path[&x].clone();
            if p.len() >= REWRITE_DEPTH || path.len() > REWRITE_STATES {
                break;
            }
            for (label, s) in &steps {
                let mut y = x.clone();
                push_reduced(&mut y, s);
                if path.contains_key(&y) {
                    continue;
                }
                let mut q = p.clone();
                q.push(*label);
                if let [l] = y[..] {
                    if l > 0 && rewrite[l as usize - 1].is_none() {
                        rewrite[l as usize - 1] = Some(q.clone());
                    }
                }
                path.insert(y.clone(), q);
                queue.push_back(y);
            }
            if rewrite.iter().all(Option::is_some) {
                break;
            }
        }
        let rewrite = rewrite
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::precondition("the words do not generate the free group within the search bound"))?;
        Ok(Basis { rank, words: reduced, rewrite })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }

    fn spell(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in w {
            let r = &self.rewrite[l.unsigned_abs() as usize - 1];
            if l > 0 {
                push_reduced(&mut out, r);
            } else {
                let inv: Vec<Letter> = r.iter().rev().map(|x| -x).collect();
                push_reduced(&mut out, &inv);
            }
        }
        out
    }

    /// The same end, written in basis letters.
    pub fn express(&self, e: &FreeGroupEnd) -> Result<FreeGroupEnd> {
        if e.rank() != self.rank {
            return Err(Error::domain("end and basis belong to free groups of different ranks"));
        }
        FreeGroupEnd::new(self.rank, &self.spell(e.tail()), &self.spell(e.period()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDepths {
    pub d1: u32,
    pub d2: u32,
}

/// Ratios `D₂/D₁` bound `α` in `d₂ ≈ d₁^α`, and `D₁/D₂` bound `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub pairs: usize,
    /// Pairs with a zero depth in either metric carry no exponent information.
    pub informative_pairs: usize,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub depths: Vec<PairDepths>,
}

pub fn holder_compare(b1: &Basis, b2: &Basis, sample: &[(FreeGroupEnd, FreeGroupEnd)]) -> Result<HolderEstimate> {
    if b1.rank != b2.rank {
        return Err(Error::precondition("bases of free groups of different ranks"));
    }
    let distinct: Vec<&(FreeGroupEnd, FreeGroupEnd)> = sample.iter().filter(|(x, y)| x != y).collect();
    if distinct.len() < MIN_PAIRS {
        return Err(Error::precondition(format!(
            "{} pairs of distinct ends; at least {MIN_PAIRS} are needed",
            distinct.len()
        )));
    }
    let depth = |b: &Basis, x: &FreeGroupEnd, y: &FreeGroupEnd| -> Result<u32> {
        Ok(common_suffix_depth(&b.express(x)?, &b.express(y)?)?.expect("distinct ends stay distinct"))
    };
    let depths = distinct
        .par_iter()
        .map(|(x, y)| Ok(PairDepths { d1: depth(b1, x, y)?, d2: depth(b2, x, y)? }))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<(f64, f64)> = depths
        .iter()
        .filter(|p| p.d1 > 0 && p.d2 > 0)
        .map(|p| (p.d2 as f64 / p.d1 as f64, p.d1 as f64 / p.d2 as f64))
        .collect();
    let fold = |f: fn(f64, f64) -> f64, pick: fn(&(f64, f64)) -> f64| ratios.iter().map(pick).reduce(f);
    Ok(HolderEstimate {
        pairs: depths.len(),
        informative_pairs: ratios.len(),
        alpha_min: fold(f64::min, |r| r.0),
        alpha_max: fold(f64::max, |r| r.0),
        beta_min: fold(f64::min, |r| r.1),
        beta_max: fold(f64::max, |r| r.1),
        depths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::enumerate_ends;

    fn sample() -> Vec<(FreeGroupEnd, FreeGroupEnd)> {
        let ends = enumerate_ends(2, 2, 2);
        ends.iter().zip(ends.iter().skip(7)).map(|(x, y)| (x.clone(), y.clone())).collect()
    }

    #[test]
    fn rewriting() {
        let b = Basis::new(2, vec![vec![1], vec![1, 2]]).unwrap();
        assert_eq!(b.rewrite, vec![vec![1], vec![-1, 2]]);
        assert!(Basis::new(2, vec![vec![1], vec![1, 1]]).is_err());
        let e = FreeGroupEnd::new(2, &[2], &[1]).unwrap();
        assert_eq!(b.express(&e).unwrap(), FreeGroupEnd::new(2, &[-1, 2], &[1]).unwrap());
    }

    #[test]
    fn identical_bases() {
        let b = Basis::standard(2);
        let est = holder_compare(&b, &b, &sample()).unwrap();
        for v in [est.alpha_min, est.alpha_max, est.beta_min, est.beta_max] {
            assert!((v.unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn different_bases() {
        let b2 = Basis::new(2, vec![vec![1], vec![1, 2]]).unwrap();
        let est = holder_compare(&Basis::standard(2), &b2, &sample()).unwrap();
        assert!(est.informative_pairs > 0);
        assert!(est.alpha_min.unwrap() > 0.0 && est.alpha_max.unwrap().is_finite());
    }

    #[test]
    fn too_few_pairs() {
        let e = FreeGroupEnd::new(2, &[], &[1]).unwrap();
        let same = vec![(e.clone(), e); 20];
        let b = Basis::standard(2);
        assert!(matches!(holder_compare(&b, &b, &same), Err(Error::Precondition(_))));
    }
}
