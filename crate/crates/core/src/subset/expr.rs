//! The set-expression language used on the command line.
//!
//! ```text
//! expr   := inter (('|' | '-') inter)*
//! inter  := unary ('&' unary)*
//! unary  := '!' unary | '(' expr ')' | atom
//! atom   := all | none | finite{x, …} | cofinite{x, …} | cone(w)
//!         | coset(whole|trivial|factor N; g, …) | suffix(N, expr) | last(i, …)
//!         | first(N) | level(nat) | length(nat) | half(coord, min) | ray
//!         | edit(expr; +{x, …}; -{x, …}) | rtranslate(expr; g)
//! nat    := natand ('|' natand)* ; natand := natun ('&' natun)*
//! natun  := '!' natun | '(' nat ')' | {n, …} | even | odd | all | from(n) | ap(start, step)
//! ```
//!
//! Factor and coordinate numbers are 1-based. Elements use the group's
//! literal syntax.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{NatSet, Subgroup, SubsetSpec};
use crate::error::{Error, Result};
use crate::group::{Element, MarkedGroup};

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let n = rest.find(|c: char| !(c.is_ascii_alphabetic() || c == '_')).unwrap_or(rest.len());
        self.pos += n;
        &rest[..n]
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let sign = usize::from(rest.starts_with('-'));
        let digits = rest[sign..].find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len() - sign);
        self.pos += sign + digits;
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "expected an integer"))
    }

    fn natural(&mut self) -> Result<u64> {
        let at = self.pos;
        u64::try_from(self.integer()?).map_err(|_| Error::parse(at, "expected a non-negative integer"))
    }

    fn index(&mut self) -> Result<usize> {
        let at = self.pos;
        match self.natural()? {
            0 => Err(Error::parse(at, "indices are 1-based")),
            n => Ok(n as usize - 1),
        }
    }

    /// Raw text up to one of `stops` outside parentheses.
    fn raw_until(&mut self, stops: &[char]) -> &'a str {
        let start = self.pos;
        let mut depth = 0i32;
        for (k, c) in self.text[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth > 0 => depth -= 1,
                c if depth == 0 && stops.contains(&c) => {
                    self.pos = start + k;
                    return &self.text[start..self.pos];
                }
                _ => {}
            }
        }
        self.pos = self.text.len();
        &self.text[start..]
    }

    fn element(&mut self, g: &MarkedGroup, stops: &[char]) -> Result<Element> {
        self.skip_ws();
        let at = self.pos;
        let raw = self.raw_until(stops);
        g.parse_element(raw).map_err(|e| match e {
            Error::Parse { pos, msg } => Error::parse(at + pos, msg),
            other => other,
        })
    }

    fn element_list(&mut self, g: &MarkedGroup) -> Result<BTreeSet<Element>> {
        self.expect('{')?;
        let mut out = BTreeSet::new();
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            out.insert(self.element(g, &[',', '}'])?);
            if self.eat('}') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn expr(&mut self, g: &Arc<MarkedGroup>) -> Result<SubsetSpec> {
        let first = self.inter(g)?;
        let mut terms = vec![first];
        loop {
            if self.eat('|') {
                terms.push(self.inter(g)?);
            } else if self.eat('-') {
                let rhs = self.inter(g)?;
                let lhs = if terms.len() == 1 { terms.pop().unwrap() } else { SubsetSpec::Union(std::mem::take(&mut terms)) };
                terms.push(SubsetSpec::Intersection(vec![lhs, SubsetSpec::Complement(Box::new(rhs))]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { SubsetSpec::Union(terms) })
    }

    fn inter(&mut self, g: &Arc<MarkedGroup>) -> Result<SubsetSpec> {
        let mut terms = vec![self.unary(g)?];
        while self.eat('&') {
            terms.push(self.unary(g)?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { SubsetSpec::Intersection(terms) })
    }

    fn unary(&mut self, g: &Arc<MarkedGroup>) -> Result<SubsetSpec> {
        if self.eat('!') {
            return Ok(SubsetSpec::Complement(Box::new(self.unary(g)?)));
        }
        if self.eat('(') {
            let e = self.expr(g)?;
            self.expect(')')?;
            return Ok(e);
        }
        self.atom(g)
    }

    fn atom(&mut self, g: &Arc<MarkedGroup>) -> Result<SubsetSpec> {
        let at = self.pos;
        let name = self.ident();
        let spec = match name {
            "all" => SubsetSpec::all(),
            "none" => SubsetSpec::empty(),
            "ray" => SubsetSpec::HalfSpace { coord: 0, min: 0 },
            "finite" => SubsetSpec::Finite(self.element_list(g)?),
            "cofinite" => SubsetSpec::Cofinite(self.element_list(g)?),
            "cone" => {
                self.expect('(')?;
                let w = self.element(g, &[')'])?;
                self.expect(')')?;
                match w {
                    Element::Word(w) => SubsetSpec::SuffixCone(w),
                    _ => return Err(Error::parse(at, "cones need a free group")),
                }
            }
            "coset" => {
                self.expect('(')?;
                let sub_at = self.pos;
                let subgroup = match self.ident() {
                    "whole" => Subgroup::Whole,
                    "trivial" => Subgroup::Trivial,
                    "factor" => Subgroup::Factor(self.index()?),
                    other => return Err(Error::parse(sub_at, format!("unknown subgroup `{other}`"))),
                };
                self.expect(';')?;
                let mut reps = BTreeSet::new();
                if self.peek() != Some(')') {
                    loop {
                        let x = self.element(g, &[',', ')'])?;
                        subgroup_check(g, &subgroup, sub_at)?;
                        reps.insert(subgroup.coset_rep(g, &x));
                        if !self.eat(',') {
                            break;
                        }
                    }
                }
                self.expect(')')?;
                SubsetSpec::CosetUnion { subgroup, reps }
            }
            "suffix" => {
                self.expect('(')?;
                let i = self.index()?;
                let h = g.factor(i).map_err(|_| Error::parse(at, format!("no factor {}", i + 1)))?.clone();
                self.expect(',')?;
                let target = self.expr(&h)?;
                self.expect(')')?;
                SubsetSpec::FreeProductSuffixSet { factor: i, target: Box::new(target) }
            }
            "last" => {
                self.expect('(')?;
                let mut set = BTreeSet::from([self.natural()? as usize]);
                while self.eat(',') {
                    set.insert(self.natural()? as usize);
                }
                self.expect(')')?;
                SubsetSpec::LastLetterType(set)
            }
            "first" => {
                self.expect('(')?;
                let i = self.index()?;
                self.expect(')')?;
                SubsetSpec::FirstSyllable(i)
            }
            "level" | "length" => {
                self.expect('(')?;
                let n = self.nat()?;
                self.expect(')')?;
                if name == "level" {
                    SubsetSpec::LevelSet(n)
                } else {
                    SubsetSpec::LengthSet(n)
                }
            }
            "half" => {
                self.expect('(')?;
                let coord = self.index()?;
                self.expect(',')?;
                let min = self.integer()?;
                self.expect(')')?;
                SubsetSpec::HalfSpace { coord, min }
            }
            "edit" => {
                self.expect('(')?;
                let base = self.expr(g)?;
                let mut add = BTreeSet::new();
                let mut remove = BTreeSet::new();
                while self.eat(';') {
                    if self.eat('+') {
                        add.extend(self.element_list(g)?);
                    } else if self.eat('-') {
                        remove.extend(self.element_list(g)?);
                    } else {
                        return Err(Error::parse(self.pos, "expected `+{…}` or `-{…}`"));
                    }
                }
                self.expect(')')?;
                SubsetSpec::Edited { base: Box::new(base), add, remove }
            }
            "rtranslate" => {
                self.expect('(')?;
                let base = self.expr(g)?;
                self.expect(';')?;
                let by = self.element(g, &[')'])?;
                self.expect(')')?;
                SubsetSpec::RightTranslate { base: Box::new(base), by }
            }
            "" => return Err(Error::parse(at, "expected a set expression")),
            other => return Err(Error::parse(at, format!("unknown set constructor `{other}`"))),
        };
        Ok(spec)
    }

    fn nat(&mut self) -> Result<NatSet> {
        let mut acc = self.nat_and()?;
        while self.eat('|') {
            acc = NatSet::Union(Box::new(acc), Box::new(self.nat_and()?));
        }
        Ok(acc)
    }

    fn nat_and(&mut self) -> Result<NatSet> {
        let mut acc = self.nat_unary()?;
        while self.eat('&') {
            acc = NatSet::Intersection(Box::new(acc), Box::new(self.nat_unary()?));
        }
        Ok(acc)
    }

    fn nat_unary(&mut self) -> Result<NatSet> {
        if self.eat('!') {
            return Ok(NatSet::Complement(Box::new(self.nat_unary()?)));
        }
        if self.eat('(') {
            let n = self.nat()?;
            self.expect(')')?;
            return Ok(n);
        }
        if self.eat('{') {
            let mut set = BTreeSet::new();
            if !self.eat('}') {
                loop {
                    set.insert(self.natural()?);
                    if self.eat('}') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            return Ok(NatSet::Finite(set));
        }
        let at = self.pos;
        match self.ident() {
            "even" => Ok(NatSet::evens()),
            "odd" => Ok(NatSet::Progression { start: 1, step: 2 }),
            "all" => Ok(NatSet::all()),
            "from" => {
                self.expect('(')?;
                let start = self.natural()?;
                self.expect(')')?;
                Ok(NatSet::Progression { start, step: 1 })
            }
            "ap" => {
                self.expect('(')?;
                let start = self.natural()?;
                self.expect(',')?;
                let step = self.natural()?;
                self.expect(')')?;
                Ok(NatSet::Progression { start, step })
            }
            other => Err(Error::parse(at, format!("unknown set of naturals `{other}`"))),
        }
    }
}

fn subgroup_check(g: &MarkedGroup, subgroup: &Subgroup, at: usize) -> Result<()> {
    match subgroup {
        Subgroup::Factor(i) if *i >= g.factors().len() => {
            Err(Error::parse(at, format!("no factor {} in {}", i + 1, g.spec())))
        }
        _ => Ok(()),
    }
}

pub fn parse_set(g: &Arc<MarkedGroup>, text: &str) -> Result<SubsetSpec> {
    let mut p = Parser { text, pos: 0 };
    let spec = p.expr(g)?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(Error::parse(p.pos, "trailing input after set expression"));
    }
    Ok(spec)
}

fn list(g: &MarkedGroup, s: &BTreeSet<Element>) -> String {
    s.iter().map(|x| g.format(x)).collect::<Vec<_>>().join(", ")
}

/// Renders a spec in the expression syntax; parsing the result gives it back.
pub fn render(g: &MarkedGroup, spec: &SubsetSpec) -> String {
    match spec {
        SubsetSpec::Finite(s) => format!("finite{{{}}}", list(g, s)),
        SubsetSpec::Cofinite(s) => format!("cofinite{{{}}}", list(g, s)),
        SubsetSpec::SuffixCone(w) => format!("cone({})", g.format(&Element::Word(w.clone()))),
        SubsetSpec::CosetUnion { subgroup, reps } => format!("coset({subgroup}; {})", list(g, reps)),
        SubsetSpec::FreeProductSuffixSet { factor, target } => {
            format!("suffix({}, {})", factor + 1, render(&g.factors()[*factor], target))
        }
        SubsetSpec::LastLetterType(set) => format!(
            "last({})",
            set.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        ),
        SubsetSpec::FirstSyllable(i) => format!("first({})", i + 1),
        SubsetSpec::LevelSet(n) => format!("level({n})"),
        SubsetSpec::LengthSet(n) => format!("length({n})"),
        SubsetSpec::HalfSpace { coord, min } => format!("half({}, {min})", coord + 1),
        SubsetSpec::Union(v) if v.is_empty() => "none".into(),
        SubsetSpec::Intersection(v) if v.is_empty() => "all".into(),
        SubsetSpec::Union(v) => format!("({})", v.iter().map(|a| render(g, a)).collect::<Vec<_>>().join(" | ")),
        SubsetSpec::Intersection(v) => {
            format!("({})", v.iter().map(|a| render(g, a)).collect::<Vec<_>>().join(" & "))
        }
        SubsetSpec::Complement(a) => format!("!{}", render(g, a)),
        SubsetSpec::Edited { base, add, remove } => {
            format!("edit({}; +{{{}}}; -{{{}}})", render(g, base), list(g, add), list(g, remove))
        }
        SubsetSpec::RightTranslate { base, by } => format!("rtranslate({}; {})", render(g, base), g.format(by)),
    }
}
