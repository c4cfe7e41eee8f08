//! Marked groups with canonical normal forms.
//!
//! Every supported kind has a solvable word problem by construction: free
//! groups (reduced words), finite permutation groups (element tables), free
//! products (alternating syllables), ascending unions of finite groups
//! (tables with chain levels) and free abelian groups (exponent vectors).
//! Two elements are equal iff their normal forms are identical, so
//! [`Element`] derives `Eq`, `Hash` and `Ord` structurally.

mod ball;
mod parse;
pub mod perm;

use std::fmt::Write as _;
use std::sync::Arc;

pub use ball::{ball, Ball};
pub use parse::{parse_group, parse_group_file};

use crate::error::{Error, Result};
use perm::{cycle_string, from_cycles, widen, Perm, PermTable};

/// Signed generator index: `+(i+1)` is generator `i`, `-(i+1)` its inverse.
pub type Letter = i32;

pub const DEFAULT_MAX_ELEMENTS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Reduced word of a free group.
    Word(Vec<Letter>),
    /// Index into the element table of a finite group or ascending union.
    Perm(u32),
    /// Alternating syllables of a free product.
    Syllables(Vec<Syllable>),
    /// Exponent vector of a free abelian group.
    Vector(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    /// 0-based factor position. Factor *indices* as seen by
    /// `last_letter_type` are this plus one.
    pub factor: usize,
    pub element: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiniteFamily {
    Cyclic(usize),
    Symmetric(usize),
    Other,
}

#[derive(Debug)]
pub enum GroupKind {
    Free { rank: usize },
    Finite { table: PermTable, family: FiniteFamily },
    FreeProduct { factors: Vec<Arc<MarkedGroup>>, offsets: Vec<usize> },
    AscendingUnion { table: PermTable, cycle_display: bool },
    FreeAbelian { rank: usize },
}

/// A group together with an ordered finite generating list.
#[derive(Debug)]
pub struct MarkedGroup {
    spec: String,
    kind: GroupKind,
    generators: Vec<Element>,
    labels: Vec<String>,
    symmetric: bool,
    /// Cayley generating set: the generators, plus inverses when symmetric.
    steps: Vec<Element>,
    step_letters: Vec<Letter>,
    /// BFS distance and geodesic parent `(prev, letter)` for table kinds.
    geodesics: Option<(Vec<u32>, Vec<(u32, Letter)>)>,
    max_elements: usize,
}

impl MarkedGroup {
    fn build(
        spec: String,
        kind: GroupKind,
        generators: Vec<Element>,
        labels: Vec<String>,
        symmetric: bool,
        max_elements: usize,
    ) -> Result<Arc<Self>> {
        let mut g = MarkedGroup {
            spec,
            kind,
            generators,
            labels,
            symmetric,
            steps: Vec::new(),
            step_letters: Vec::new(),
            geodesics: None,
            max_elements,
        };
        if !symmetric && !g.is_table_kind() {
            return Err(Error::domain(
                "non-symmetric generating lists are only supported for finite groups",
            ));
        }
        let id = g.identity();
        let mut steps: Vec<Element> = Vec::new();
        let mut letters = Vec::new();
        for (i, s) in g.generators.iter().enumerate() {
            let letter = i as Letter + 1;
            let mut candidates = vec![(s.clone(), letter)];
            if symmetric {
                candidates.push((g.inverse(s), -letter));
            }
            for (c, l) in candidates {
                if c != id && !steps.contains(&c) {
                    steps.push(c);
                    letters.push(l);
                }
            }
        }
        g.steps = steps;
        g.step_letters = letters;
        if g.is_table_kind() {
            g.geodesics = Some(g.table_geodesics());
        }
        Ok(Arc::new(g))
    }

    fn table_geodesics(&self) -> (Vec<u32>, Vec<(u32, Letter)>) {
        let table = self.table().expect("table kind");
        let n = table.order();
        let mut dist = vec![u32::MAX; n];
        let mut parent = vec![(0u32, 0 as Letter); n];
        dist[0] = 0;
        let mut queue = std::collections::VecDeque::from([0u32]);
        let step_idx: Vec<u32> = self
            .steps
            .iter()
            .map(|s| match s {
                Element::Perm(i) => *i,
                _ => unreachable!(),
            })
            .collect();
        while let Some(x) = queue.pop_front() {
            for (k, &s) in step_idx.iter().enumerate() {
                let y = table.mul(s, x);
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    parent[y as usize] = (x, self.step_letters[k]);
                    queue.push_back(y);
                }
            }
        }
        (dist, parent)
    }

    // ---- constructors ----

    pub fn free(rank: usize) -> Result<Arc<Self>> {
        let generators = (1..=rank as Letter).map(|l| Element::Word(vec![l])).collect();
        let labels = (0..rank).map(|i| letter_label(i, rank)).collect();
        Self::build(
            format!("free({rank})"),
            GroupKind::Free { rank },
            generators,
            labels,
            true,
            DEFAULT_MAX_ELEMENTS,
        )
    }

    pub fn free_abelian(rank: usize) -> Result<Arc<Self>> {
        let generators = (0..rank)
            .map(|i| {
                let mut v = vec![0i64; rank];
                v[i] = 1;
                Element::Vector(v)
            })
            .collect();
        let labels: Vec<String> = match rank {
            1 => vec!["t".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            _ => (1..=rank).map(|i| format!("x{i}")).collect(),
        };
        Self::build(
            format!("free_abelian({rank})"),
            GroupKind::FreeAbelian { rank },
            generators,
            labels,
            true,
            DEFAULT_MAX_ELEMENTS,
        )
    }

    pub fn cyclic(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::domain("cyclic(0) is not a finite group"));
        }
        let rot: Perm = (0..n).map(|i| ((i + 1) % n) as u8).collect();
        let table = PermTable::single(n, vec![rot.clone()], DEFAULT_MAX_ELEMENTS)?;
        let gen = Element::Perm(table.lookup(&rot).expect("generator in table"));
        Self::build(
            format!("cyclic({n})"),
            GroupKind::Finite { table, family: FiniteFamily::Cyclic(n) },
            vec![gen],
            vec!["a".into()],
            true,
            DEFAULT_MAX_ELEMENTS,
        )
    }

    /// `S_n` generated by the adjacent transpositions `(i i+1)`.
    pub fn symmetric(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::domain("sym(0) is not defined"));
        }
        let gens: Vec<Perm> = (1..n)
            .map(|i| from_cycles(n, &[vec![i, i + 1]]))
            .collect::<Result<_>>()?;
        let table = PermTable::single(n, gens.clone(), DEFAULT_MAX_ELEMENTS)?;
        let generators = gens
            .iter()
            .map(|p| Element::Perm(table.lookup(p).expect("generator in table")))
            .collect();
        let labels = (1..n).map(|i| format!("s{i}")).collect();
        Self::build(
            format!("sym({n})"),
            GroupKind::Finite { table, family: FiniteFamily::Symmetric(n) },
            generators,
            labels,
            true,
            DEFAULT_MAX_ELEMENTS,
        )
    }

    /// Free product whose generating list is the union of the factors'
    /// lists; finite factors contribute all their non-identity elements.
    pub fn free_product(factors: Vec<Arc<MarkedGroup>>) -> Result<Arc<Self>> {
        if factors.is_empty() {
            return Err(Error::domain("free product needs at least one factor"));
        }
        if factors.len() > 26 {
            return Err(Error::domain("at most 26 free factors are supported"));
        }
        let mut generators = Vec::new();
        let mut labels = Vec::new();
        let mut offsets = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            if f.order() == Some(1) {
                return Err(Error::domain(format!("factor {} is trivial", i + 1)));
            }
            offsets.push(generators.len());
            let prefix = (b'a' + i as u8) as char;
            let wrap = |e: Element| Element::Syllables(vec![Syllable { factor: i, element: e }]);
            if let GroupKind::Finite { table, family } = &f.kind {
                for j in 1..table.order() as u32 {
                    generators.push(wrap(Element::Perm(j)));
                    labels.push(match family {
                        // table index j of a cyclic group is the j-th power
                        FiniteFamily::Cyclic(_) if j == 1 => prefix.to_string(),
                        FiniteFamily::Cyclic(_) => format!("{prefix}^{j}"),
                        _ => format!("{prefix}{}", cycle_string(table.perm(j))),
                    });
                }
            } else {
                let single = f.generators.len() == 1;
                for (j, g) in f.generators.iter().enumerate() {
                    generators.push(wrap(g.clone()));
                    labels.push(if single {
                        prefix.to_string()
                    } else {
                        format!("{prefix}{}", j + 1)
                    });
                }
            }
        }
        let spec = format!(
            "free_product([{}])",
            factors.iter().map(|f| f.spec.as_str()).collect::<Vec<_>>().join(", ")
        );
        Self::build(
            spec,
            GroupKind::FreeProduct { factors, offsets },
            generators,
            labels,
            true,
            DEFAULT_MAX_ELEMENTS,
        )
    }

    /// Ascending union of finite permutation groups `G_1 ⊆ G_2 ⊆ …`, each
    /// acting on an initial segment of the points; inclusions are checked.
    pub fn ascending_union(members: Vec<Arc<MarkedGroup>>) -> Result<Arc<Self>> {
        if members.is_empty() {
            return Err(Error::domain("ascending union needs at least one member"));
        }
        let mut degree = 1;
        for m in &members {
            match &m.kind {
                GroupKind::Finite { table, .. } => degree = degree.max(table.degree()),
                _ => {
                    return Err(Error::domain(format!(
                        "ascending union members must be finite permutation groups, got {}",
                        m.spec
                    )))
                }
            }
        }
        let member_gens: Vec<Vec<Perm>> = members
            .iter()
            .map(|m| {
                let t = m.table().expect("finite member");
                m.generators
                    .iter()
                    .map(|g| widen(t.perm(perm_index(g)), degree))
                    .collect()
            })
            .collect();
        for n in 1..members.len() {
            let next = m_table_widened(&members[n], degree)?;
            for g in &member_gens[n - 1] {
                if next.lookup(g).is_none() {
                    return Err(Error::domain(format!(
                        "{} is not contained in {}",
                        members[n - 1].spec,
                        members[n].spec
                    )));
                }
            }
        }
        let spec = format!(
            "ascending_union([{}])",
            members.iter().map(|m| m.spec.as_str()).collect::<Vec<_>>().join(", ")
        );
        let cycle_display = !members
            .iter()
            .all(|m| matches!(m.kind, GroupKind::Finite { family: FiniteFamily::Cyclic(_), .. }));
        Self::union_from_levels(spec, degree, member_gens, None, cycle_display)
    }

    fn union_from_levels(
        spec: String,
        degree: usize,
        level_gens: Vec<Vec<Perm>>,
        labels: Option<Vec<String>>,
        cycle_display: bool,
    ) -> Result<Arc<Self>> {
        let table = PermTable::chain(degree, &level_gens, DEFAULT_MAX_ELEMENTS)?;
        let mut generators = Vec::new();
        for p in level_gens.iter().flatten() {
            let e = Element::Perm(table.lookup(p).expect("generator in table"));
            if e != Element::Perm(0) && !generators.contains(&e) {
                generators.push(e);
            }
        }
        let labels = labels.unwrap_or_else(|| (1..=generators.len()).map(|i| format!("g{i}")).collect());
        Self::build(
            spec,
            GroupKind::AscendingUnion { table, cycle_display },
            generators,
            labels,
            true,
            DEFAULT_MAX_ELEMENTS,
        )
    }

    /// `G_n = (Z/2)^n`, with `e_k` the transposition `(2k-1 2k)`, for `n ≤ depth`.
    pub fn sum_z2(depth: usize) -> Result<Arc<Self>> {
        if depth == 0 || 2 * depth > 256 {
            return Err(Error::domain("sum_z2 depth must be in 1..=128"));
        }
        let degree = 2 * depth;
        let level_gens = (0..depth)
            .map(|k| Ok(vec![from_cycles(degree, &[vec![2 * k + 1, 2 * k + 2]])?]))
            .collect::<Result<Vec<_>>>()?;
        let labels = (1..=depth).map(|k| format!("e{k}")).collect();
        Self::union_from_levels(format!("sum_z2({depth})"), degree, level_gens, Some(labels), false)
    }

    /// `S_1 ⊂ S_2 ⊂ … ⊂ S_depth`; level `n` adds the transposition `(n-1 n)`.
    pub fn sym_chain(depth: usize) -> Result<Arc<Self>> {
        if depth == 0 {
            return Err(Error::domain("sym_chain depth must be positive"));
        }
        let mut level_gens = vec![Vec::new()];
        for n in 2..=depth {
            level_gens.push(vec![from_cycles(depth, &[vec![n - 1, n]])?]);
        }
        let labels = (1..depth).map(|i| format!("s{i}")).collect();
        Self::union_from_levels(format!("sym_chain({depth})"), depth, level_gens, Some(labels), true)
    }

    pub fn parse(spec: &str) -> Result<Arc<Self>> {
        parse_group(spec)
    }

    /// Same group with a different generating-list policy or element cap.
    pub fn with_options(&self, symmetric: bool, max_elements: usize) -> Result<Arc<Self>> {
        let kind = match &self.kind {
            GroupKind::Free { rank } => GroupKind::Free { rank: *rank },
            GroupKind::FreeAbelian { rank } => GroupKind::FreeAbelian { rank: *rank },
            GroupKind::Finite { table, family } => GroupKind::Finite {
                table: table.clone(),
                family: family.clone(),
            },
            GroupKind::AscendingUnion { table, cycle_display } => GroupKind::AscendingUnion {
                table: table.clone(),
                cycle_display: *cycle_display,
            },
            GroupKind::FreeProduct { factors, offsets } => GroupKind::FreeProduct {
                factors: factors.clone(),
                offsets: offsets.clone(),
            },
        };
        Self::build(
            self.spec.clone(),
            kind,
            self.generators.clone(),
            self.labels.clone(),
            symmetric,
            max_elements,
        )
    }

    // ---- accessors ----

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The Cayley generating set `T` used for word length and edges.
    pub fn steps(&self) -> &[Element] {
        &self.steps
    }

    pub fn max_elements(&self) -> usize {
        self.max_elements
    }

    pub fn free_rank(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Free { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn factors(&self) -> &[Arc<MarkedGroup>] {
        match &self.kind {
            GroupKind::FreeProduct { factors, .. } => factors,
            _ => &[],
        }
    }

    pub fn factor(&self, i: usize) -> Result<&Arc<MarkedGroup>> {
        self.factors()
            .get(i)
            .ok_or_else(|| Error::domain(format!("{} has no factor {}", self.spec, i + 1)))
    }

    fn table(&self) -> Option<&PermTable> {
        match &self.kind {
            GroupKind::Finite { table, .. } | GroupKind::AscendingUnion { table, .. } => Some(table),
            _ => None,
        }
    }

    fn is_table_kind(&self) -> bool {
        self.table().is_some()
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite { table, .. } => Some(table.order()),
            GroupKind::FreeProduct { factors, .. } if factors.len() == 1 => factors[0].order(),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            GroupKind::Free { rank } => *rank <= 1,
            GroupKind::FreeAbelian { .. } => true,
            GroupKind::Finite { table, .. } | GroupKind::AscendingUnion { table, .. } => {
                let gens: Vec<u32> = self.generators.iter().map(perm_index).collect();
                table.is_commutative_on(&gens)
            }
            GroupKind::FreeProduct { factors, .. } => factors.len() == 1 && factors[0].is_abelian(),
        }
    }

    // ---- arithmetic ----

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::Free { .. } => Element::Word(Vec::new()),
            GroupKind::Finite { .. } | GroupKind::AscendingUnion { .. } => Element::Perm(0),
            GroupKind::FreeProduct { .. } => Element::Syllables(Vec::new()),
            GroupKind::FreeAbelian { rank } => Element::Vector(vec![0; *rank]),
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        match g {
            Element::Word(w) => w.is_empty(),
            Element::Perm(i) => *i == 0,
            Element::Syllables(s) => s.is_empty(),
            Element::Vector(v) => v.iter().all(|&x| x == 0),
        }
    }

    /// Whether `g` is a well-formed normal form of this group.
    pub fn contains(&self, g: &Element) -> bool {
        match (&self.kind, g) {
            (GroupKind::Free { rank }, Element::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupKind::Finite { table, .. }, Element::Perm(i))
            | (GroupKind::AscendingUnion { table, .. }, Element::Perm(i)) => {
                (*i as usize) < table.order()
            }
            (GroupKind::FreeProduct { factors, .. }, Element::Syllables(s)) => {
                s.iter().all(|syl| {
                    syl.factor < factors.len()
                        && factors[syl.factor].contains(&syl.element)
                        && !factors[syl.factor].is_identity(&syl.element)
                }) && s.windows(2).all(|p| p[0].factor != p[1].factor)
            }
            (GroupKind::FreeAbelian { rank }, Element::Vector(v)) => v.len() == *rank,
            _ => false,
        }
    }

    fn check(&self, g: &Element) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::domain(format!("{g:?} is not an element of {}", self.spec)))
        }
    }

    /// Product `g·h` of elements known to belong to this group.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        match (&self.kind, g, h) {
            (GroupKind::Free { .. }, Element::Word(a), Element::Word(b)) => {
                let mut out = a.clone();
                push_reduced(&mut out, b);
                Element::Word(out)
            }
            (GroupKind::Finite { table, .. }, Element::Perm(a), Element::Perm(b))
            | (GroupKind::AscendingUnion { table, .. }, Element::Perm(a), Element::Perm(b)) => {
                Element::Perm(table.mul(*a, *b))
            }
            (GroupKind::FreeProduct { factors, .. }, Element::Syllables(a), Element::Syllables(b)) => {
                let mut out = a.clone();
                let mut rest = b.iter();
                let mut pending = rest.next().cloned();
                while let Some(next) = pending.take() {
                    match out.last() {
                        Some(last) if last.factor == next.factor => {
                            let f = &factors[next.factor];
                            let merged = f.mul(&last.element, &next.element);
                            out.pop();
                            if f.is_identity(&merged) {
                                pending = rest.next().cloned();
                            } else {
                                out.push(Syllable { factor: next.factor, element: merged });
                                break;
                            }
                        }
                        _ => {
                            out.push(next);
                            break;
                        }
                    }
                }
                out.extend(rest.cloned());
                Element::Syllables(out)
            }
            (GroupKind::FreeAbelian { .. }, Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => panic!("mul: operands do not belong to {}", self.spec),
        }
    }

    pub fn inverse(&self, g: &Element) -> Element {
        match (&self.kind, g) {
            (GroupKind::Free { .. }, Element::Word(w)) => {
                Element::Word(w.iter().rev().map(|l| -l).collect())
            }
            (GroupKind::Finite { table, .. }, Element::Perm(i))
            | (GroupKind::AscendingUnion { table, .. }, Element::Perm(i)) => {
                Element::Perm(table.inv(*i))
            }
            (GroupKind::FreeProduct { factors, .. }, Element::Syllables(s)) => Element::Syllables(
                s.iter()
                    .rev()
                    .map(|syl| Syllable {
                        factor: syl.factor,
                        element: factors[syl.factor].inverse(&syl.element),
                    })
                    .collect(),
            ),
            (GroupKind::FreeAbelian { .. }, Element::Vector(v)) => {
                Element::Vector(v.iter().map(|x| -x).collect())
            }
            _ => panic!("inverse: operand does not belong to {}", self.spec),
        }
    }

    /// Checked product; cross-group operands are a domain error.
    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn invert(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(self.inverse(g))
    }

    pub fn generator(&self, letter: Letter) -> Result<Element> {
        let i = letter.unsigned_abs() as usize;
        if letter == 0 || i > self.generators.len() {
            return Err(Error::domain(format!(
                "generator index {letter} invalid for {} ({} generators)",
                self.spec,
                self.generators.len()
            )));
        }
        let g = &self.generators[i - 1];
        Ok(if letter > 0 { g.clone() } else { self.inverse(g) })
    }

    /// Normal form of a word in signed generator indices.
    pub fn reduce(&self, word: &[Letter]) -> Result<Element> {
        if let GroupKind::Free { rank } = self.kind {
            let mut out = Vec::with_capacity(word.len());
            for &l in word {
                if l == 0 || l.unsigned_abs() as usize > rank {
                    return Err(Error::domain(format!("generator index {l} invalid for {}", self.spec)));
                }
                push_reduced(&mut out, &[l]);
            }
            return Ok(Element::Word(out));
        }
        let mut acc = self.identity();
        for &l in word {
            acc = self.mul(&acc, &self.generator(l)?);
        }
        Ok(acc)
    }

    /// Word length with respect to the Cayley generating set.
    pub fn word_length(&self, g: &Element) -> u32 {
        match (&self.kind, g) {
            (GroupKind::Free { .. }, Element::Word(w)) => w.len() as u32,
            (GroupKind::FreeAbelian { .. }, Element::Vector(v)) => {
                v.iter().map(|x| x.unsigned_abs() as u32).sum()
            }
            (_, Element::Perm(i)) => self.geodesics.as_ref().expect("table kind").0[*i as usize],
            (GroupKind::FreeProduct { factors, .. }, Element::Syllables(s)) => s
                .iter()
                .map(|syl| {
                    let f = &factors[syl.factor];
                    if f.is_finite() {
                        1
                    } else {
                        f.word_length(&syl.element)
                    }
                })
                .sum(),
            _ => panic!("word_length: operand does not belong to {}", self.spec),
        }
    }

    /// A geodesic word (signed generator indices) representing `g`.
    pub fn word_of(&self, g: &Element) -> Vec<Letter> {
        match (&self.kind, g) {
            (GroupKind::Free { .. }, Element::Word(w)) => w.clone(),
            (GroupKind::FreeAbelian { .. }, Element::Vector(v)) => {
                let mut out = Vec::new();
                for (i, &x) in v.iter().enumerate() {
                    let l = (i as Letter + 1) * x.signum() as Letter;
                    out.extend(std::iter::repeat_n(l, x.unsigned_abs() as usize));
                }
                out
            }
            (_, Element::Perm(i)) => {
                let (_, parent) = self.geodesics.as_ref().expect("table kind");
                let mut out = Vec::new();
                let mut x = *i;
                while x != 0 {
                    let (prev, l) = parent[x as usize];
                    out.push(l);
                    x = prev;
                }
                out
            }
            (GroupKind::FreeProduct { factors, offsets }, Element::Syllables(s)) => {
                let mut out = Vec::new();
                for syl in s {
                    let f = &factors[syl.factor];
                    let off = offsets[syl.factor] as Letter;
                    match (&f.kind, &syl.element) {
                        (GroupKind::Finite { .. }, Element::Perm(j)) => out.push(off + *j as Letter),
                        _ => out.extend(
                            f.word_of(&syl.element)
                                .into_iter()
                                .map(|l| l.signum() * (l.abs() + off)),
                        ),
                    }
                }
                out
            }
            _ => panic!("word_of: operand does not belong to {}", self.spec),
        }
    }

    /// Chain level `min{n : g ∈ G_n}` for ascending unions.
    pub fn level(&self, g: &Element) -> Option<u32> {
        match (&self.kind, g) {
            (GroupKind::AscendingUnion { table, .. }, Element::Perm(i)) => Some(table.level(*i)),
            _ => None,
        }
    }

    /// `|G_n|` for `n = 1..=N` of an ascending union.
    pub fn level_sizes(&self) -> Option<&[usize]> {
        match &self.kind {
            GroupKind::AscendingUnion { table, .. } => Some(table.level_sizes()),
            _ => None,
        }
    }

    /// All elements of a finite group or of the truncation `G_N`.
    pub fn table_elements(&self) -> Option<Vec<Element>> {
        self.table()
            .map(|t| (0..t.order() as u32).map(Element::Perm).collect())
    }

    /// Underlying permutation of a table element.
    pub fn permutation(&self, g: &Element) -> Option<&[u8]> {
        match (self.table(), g) {
            (Some(t), Element::Perm(i)) => Some(t.perm(*i)),
            _ => None,
        }
    }

    pub fn from_permutation(&self, p: &[u8]) -> Result<Element> {
        let t = self
            .table()
            .ok_or_else(|| Error::domain(format!("{} is not a permutation group", self.spec)))?;
        let p = widen(p, t.degree());
        t.lookup(&p)
            .map(Element::Perm)
            .ok_or_else(|| Error::domain(format!("{} is not in {}", cycle_string(&p), self.spec)))
    }

    /// Embeds an element of factor `i` as a one-syllable element.
    pub fn embed(&self, i: usize, h: &Element) -> Result<Element> {
        let f = self.factor(i)?;
        f.check(h)?;
        Ok(if f.is_identity(h) {
            Element::Syllables(Vec::new())
        } else {
            Element::Syllables(vec![Syllable { factor: i, element: h.clone() }])
        })
    }

    // ---- text ----

    fn inverse_label(label: &str) -> String {
        let mut chars = label.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => c.to_ascii_uppercase().to_string(),
            _ => format!("{label}^-1"),
        }
    }

    /// Labels recognised by the element parser: generators and inverses.
    pub(crate) fn label_table(&self) -> Vec<(String, Element)> {
        let mut out = Vec::new();
        for (label, g) in self.labels.iter().zip(&self.generators) {
            out.push((label.clone(), g.clone()));
            out.push((Self::inverse_label(label), self.inverse(g)));
        }
        out
    }

    pub fn format(&self, g: &Element) -> String {
        if self.is_identity(g) {
            return "1".into();
        }
        match &self.kind {
            GroupKind::Finite { table, family: FiniteFamily::Symmetric(_) | FiniteFamily::Other }
            | GroupKind::AscendingUnion { table, cycle_display: true } => {
                return cycle_string(table.perm(perm_index(g)));
            }
            _ => {}
        }
        let word = self.word_of(g);
        let juxtapose = matches!(self.kind, GroupKind::Free { .. })
            && self.labels.iter().all(|l| l.len() == 1);
        if juxtapose {
            return word
                .iter()
                .map(|&l| {
                    let label = &self.labels[l.unsigned_abs() as usize - 1];
                    if l > 0 {
                        label.clone()
                    } else {
                        Self::inverse_label(label)
                    }
                })
                .collect();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < word.len() {
            let l = word[i];
            let mut run = 1;
            while i + run < word.len() && word[i + run] == l {
                run += 1;
            }
            if !out.is_empty() {
                out.push('*');
            }
            let label = &self.labels[l.unsigned_abs() as usize - 1];
            let single_lower = label.len() == 1 && label.chars().all(|c| c.is_ascii_lowercase());
            if l < 0 && single_lower {
                out.push_str(&Self::inverse_label(label));
                if run > 1 {
                    let _ = write!(out, "^{run}");
                }
            } else {
                out.push_str(label);
                let exp = if l > 0 { run as i64 } else { -(run as i64) };
                if exp != 1 {
                    let _ = write!(out, "^{exp}");
                }
            }
            i += run;
        }
        out
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        parse::parse_element(self, text)
    }
}

fn perm_index(g: &Element) -> u32 {
    match g {
        Element::Perm(i) => *i,
        _ => panic!("expected a table element"),
    }
}

fn m_table_widened(m: &MarkedGroup, degree: usize) -> Result<PermTable> {
    let t = m.table().expect("finite member");
    let gens = m
        .generators
        .iter()
        .map(|g| widen(t.perm(perm_index(g)), degree))
        .collect();
    PermTable::single(degree, gens, m.max_elements)
}

fn letter_label(i: usize, rank: usize) -> String {
    if rank <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// Appends `word` to the reduced word `out`, cancelling at the seam.
pub(crate) fn push_reduced(out: &mut Vec<Letter>, word: &[Letter]) {
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_cancellation() {
        let f2 = MarkedGroup::free(2).unwrap();
        assert_eq!(f2.reduce(&[1, -1, 2]).unwrap(), Element::Word(vec![2]));
        assert!(f2.is_identity(&f2.reduce(&[]).unwrap()));
        let ab = f2.reduce(&[1, 2]).unwrap();
        assert_eq!(f2.invert(&ab).unwrap(), Element::Word(vec![-2, -1]));
        assert_eq!(f2.format(&f2.inverse(&ab)), "BA");
    }

    #[test]
    fn invalid_generator_index() {
        let f2 = MarkedGroup::free(2).unwrap();
        assert!(matches!(f2.reduce(&[3]), Err(Error::Domain(_))));
        assert!(matches!(f2.reduce(&[0]), Err(Error::Domain(_))));
    }

    #[test]
    fn syllables_merge_then_concatenate() {
        let g = MarkedGroup::free_product(vec![
            MarkedGroup::cyclic(5).unwrap(),
            MarkedGroup::cyclic(3).unwrap(),
        ])
        .unwrap();
        let a = g.embed(0, &g.factor(0).unwrap().generators()[0].clone()).unwrap();
        let b = g.embed(1, &g.factor(1).unwrap().generators()[0].clone()).unwrap();
        let binv = g.inverse(&b);
        let w = [a.clone(), b, binv, a.clone()]
            .iter()
            .fold(g.identity(), |acc, x| g.mul(&acc, x));
        let a2 = g.mul(&a, &a);
        assert_eq!(w, a2);
        match &w {
            Element::Syllables(s) => assert_eq!(s.len(), 1),
            _ => unreachable!(),
        }
        assert_eq!(g.format(&w), "a^2");
    }

    #[test]
    fn abelian_length() {
        let z = MarkedGroup::free_abelian(1).unwrap();
        let t5 = z.reduce(&[1; 5]).unwrap();
        assert_eq!(z.word_length(&t5), 5);
        assert_eq!(z.format(&t5), "t^5");
        assert_eq!(z.format(&z.inverse(&t5)), "T^5");
    }

    #[test]
    fn cross_group_operands_rejected() {
        let f2 = MarkedGroup::free(2).unwrap();
        let z = MarkedGroup::free_abelian(1).unwrap();
        let t = z.generator(1).unwrap();
        assert!(matches!(f2.multiply(&t, &t), Err(Error::Domain(_))));
        assert!(matches!(f2.multiply(&Element::Word(vec![3]), &f2.identity()), Err(Error::Domain(_))));
    }

    #[test]
    fn trivial_factor_rejected() {
        let r = MarkedGroup::free_product(vec![MarkedGroup::cyclic(1).unwrap(), MarkedGroup::free(1).unwrap()]);
        assert!(r.is_err());
    }

    #[test]
    fn union_levels() {
        let g = MarkedGroup::sum_z2(4).unwrap();
        let e3 = g.parse_element("e3").unwrap();
        assert_eq!(g.level(&e3), Some(3));
        assert_eq!(g.level(&g.identity()), Some(1));
        let s = MarkedGroup::sym_chain(6).unwrap();
        let t45 = s.parse_element("(4 5)").unwrap();
        assert_eq!(s.level(&t45), Some(5));
    }

    #[test]
    fn chain_must_be_nested() {
        let bad = MarkedGroup::ascending_union(vec![
            MarkedGroup::cyclic(3).unwrap(),
            MarkedGroup::symmetric(2).unwrap(),
        ]);
        assert!(bad.is_err());
        let good = MarkedGroup::ascending_union(vec![
            MarkedGroup::symmetric(2).unwrap(),
            MarkedGroup::symmetric(3).unwrap(),
        ])
        .unwrap();
        assert_eq!(good.level_sizes().unwrap(), &[2, 6]);
    }

    #[test]
    fn non_symmetric_lists_only_for_finite_groups() {
        assert!(MarkedGroup::free(2).unwrap().with_options(false, 100).is_err());
        let c = MarkedGroup::cyclic(5).unwrap().with_options(false, 100).unwrap();
        assert_eq!(c.steps().len(), 1);
        assert_eq!(c.word_length(&c.inverse(&c.generators()[0])), 4);
    }
}
