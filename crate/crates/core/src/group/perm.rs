//! Finite permutation groups stored as explicit element tables.
//!
//! A [`PermTable`] is built level by level: level `n` closes the elements
//! collected so far under the generators of levels `1..=n`. A plain finite
//! group is a single-level table; an ascending chain `G_1 ⊆ G_2 ⊆ …` keeps
//! the first level at which each element appears.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Perm = Box<[u8]>;

/// Orders up to this bound get a precomputed multiplication table.
const TABLE_LIMIT: usize = 1024;

#[derive(Debug, Clone)]
pub struct PermTable {
    degree: usize,
    perms: Vec<Perm>,
    index: HashMap<Perm, u32>,
    inverse: Vec<u32>,
    levels: Vec<u32>,
    level_sizes: Vec<usize>,
    mul: Option<Vec<u32>>,
}

pub fn identity_perm(degree: usize) -> Perm {
    (0..degree).map(|i| i as u8).collect()
}

/// `(g·h)(x) = g(h(x))`.
pub fn compose(g: &[u8], h: &[u8]) -> Perm {
    h.iter().map(|&x| g[x as usize]).collect()
}

pub fn invert(g: &[u8]) -> Perm {
    let mut out = vec![0u8; g.len()];
    for (i, &x) in g.iter().enumerate() {
        out[x as usize] = i as u8;
    }
    out.into_boxed_slice()
}

/// Extends a permutation of a smaller point set by fixed points.
pub fn widen(g: &[u8], degree: usize) -> Perm {
    let mut out: Vec<u8> = g.to_vec();
    out.extend((g.len()..degree).map(|i| i as u8));
    out.into_boxed_slice()
}

/// Builds a permutation from 1-based cycles, e.g. `[[1, 2], [3, 4, 5]]`.
pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Perm> {
    let mut p: Vec<u8> = (0..degree).map(|i| i as u8).collect();
    for cycle in cycles {
        for &pt in cycle {
            if pt == 0 || pt > degree {
                return Err(Error::domain(format!("point {pt} outside 1..={degree}")));
            }
        }
        // cycles are applied right to left, matching `compose`
        let mut c: Vec<u8> = (0..degree).map(|i| i as u8).collect();
        for (k, &pt) in cycle.iter().enumerate() {
            let next = cycle[(k + 1) % cycle.len()];
            c[pt - 1] = (next - 1) as u8;
        }
        p = compose(&p, &c).into_vec();
    }
    Ok(p.into_boxed_slice())
}

/// Disjoint-cycle notation with 1-based points; `()` for the identity.
pub fn cycle_string(p: &[u8]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = p[x] as usize;
        }
        out.push('(');
        out.push_str(&cycle.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

impl PermTable {
    /// Closes a chain of generator sets. `level_gens[n]` are the generators
    /// added at level `n + 1`. Fails when more than `cap` elements appear.
    pub fn chain(degree: usize, level_gens: &[Vec<Perm>], cap: usize) -> Result<Self> {
        if degree > u8::MAX as usize + 1 {
            return Err(Error::domain(format!("permutation degree {degree} too large")));
        }
        let id = identity_perm(degree);
        let mut perms = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut levels = vec![1u32];
        let mut level_sizes = Vec::with_capacity(level_gens.len());
        let mut gens: Vec<Perm> = Vec::new();
        for (n, new_gens) in level_gens.iter().enumerate() {
            for g in new_gens {
                if g.len() != degree {
                    return Err(Error::domain("generator degree mismatch"));
                }
                gens.push(g.clone());
            }
            let mut cursor = 0;
            while cursor < perms.len() {
                let x = perms[cursor].clone();
                for s in &gens {
                    let y = compose(&x, s);
                    if !index.contains_key(&y) {
                        if perms.len() >= cap {
                            return Err(Error::Resource {
                                what: "permutation group closure".into(),
                                cap,
                            });
                        }
                        index.insert(y.clone(), perms.len() as u32);
                        perms.push(y);
                        levels.push(n as u32 + 1);
                    }
                }
                cursor += 1;
            }
            level_sizes.push(perms.len());
        }
        if level_sizes.is_empty() {
            level_sizes.push(1);
        }
        let inverse = perms.iter().map(|p| index[&invert(p)]).collect();
        let mut table = PermTable {
            degree,
            perms,
            index,
            inverse,
            levels,
            level_sizes,
            mul: None,
        };
        if table.order() <= TABLE_LIMIT {
            let n = table.order();
            let mut mul = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let p = compose(&table.perms[i], &table.perms[j]);
                    mul.push(table.index[&p]);
                }
            }
            table.mul = Some(mul);
        }
        Ok(table)
    }

    pub fn single(degree: usize, gens: Vec<Perm>, cap: usize) -> Result<Self> {
        Self::chain(degree, &[gens], cap)
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn perm(&self, i: u32) -> &[u8] {
        &self.perms[i as usize]
    }

    pub fn lookup(&self, p: &[u8]) -> Option<u32> {
        self.index.get(p).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => {
                let p = compose(&self.perms[a as usize], &self.perms[b as usize]);
                self.index[&p]
            }
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// First chain level containing element `a` (1-based).
    pub fn level(&self, a: u32) -> u32 {
        self.levels[a as usize]
    }

    /// `|G_n|` for each level `n = 1, 2, …`.
    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn chain_length(&self) -> usize {
        self.level_sizes.len()
    }

    pub fn is_commutative_on(&self, elems: &[u32]) -> bool {
        elems
            .iter()
            .all(|&a| elems.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }
}
