//! Group-spec expressions, group-spec files and element literals.

use std::sync::Arc;

use serde::Deserialize;

use super::perm::from_cycles;
use super::{Element, MarkedGroup, DEFAULT_MAX_ELEMENTS};
use crate::error::{Error, Result};

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

enum Arg {
    Int(usize),
    List(Vec<Arc<MarkedGroup>>),
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().map_or(0, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
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

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += len;
        &self.text[start..start + len]
    }

    fn group(&mut self) -> Result<Arc<MarkedGroup>> {
        let start = self.pos;
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if name.is_empty() {
            return Err(Error::parse(self.pos, "expected a group constructor"));
        }
        self.expect('(')?;
        let arg = if self.eat('[') {
            let mut items = vec![self.group()?];
            while self.eat(',') {
                items.push(self.group()?);
            }
            self.expect(']')?;
            Arg::List(items)
        } else {
            let at = self.pos;
            let digits = self.take_while(|c| c.is_ascii_digit());
            Arg::Int(
                digits
                    .parse()
                    .map_err(|_| Error::parse(at, "expected a non-negative integer"))?,
            )
        };
        self.expect(')')?;
        let int = |arg: Arg| match arg {
            Arg::Int(n) => Ok(n),
            Arg::List(_) => Err(Error::parse(start, format!("{name} takes an integer argument"))),
        };
        match name {
            "free" => MarkedGroup::free(int(arg)?),
            "cyclic" => MarkedGroup::cyclic(int(arg)?),
            "sym" => MarkedGroup::symmetric(int(arg)?),
            "free_abelian" => MarkedGroup::free_abelian(int(arg)?),
            "sum_z2" => MarkedGroup::sum_z2(int(arg)?),
            "sym_chain" => MarkedGroup::sym_chain(int(arg)?),
            "free_product" | "ascending_union" => {
                let Arg::List(items) = arg else {
                    return Err(Error::parse(start, format!("{name} takes a list `[...]`")));
                };
                if name == "free_product" {
                    MarkedGroup::free_product(items)
                } else {
                    MarkedGroup::ascending_union(items)
                }
            }
            other => Err(Error::UnknownConstructor(other.to_string())),
        }
    }
}

/// Parses a group-spec expression such as `free_product([cyclic(2), free(1)])`.
pub fn parse_group(spec: &str) -> Result<Arc<MarkedGroup>> {
    let mut c = Cursor { text: spec, pos: 0 };
    let g = c.group()?;
    c.skip_ws();
    if c.pos != spec.len() {
        return Err(Error::parse(c.pos, "trailing input after group spec"));
    }
    Ok(g)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    group: String,
    symmetric: Option<bool>,
    max_elements: Option<usize>,
}

/// Parses a TOML group-spec file (`group = "..."`, plus optional
/// `symmetric` and `max_elements`).
pub fn parse_group_file(text: &str) -> Result<Arc<MarkedGroup>> {
    let file: GroupFile = toml::from_str(text).map_err(|e| {
        Error::parse(e.span().map_or(0, |s| s.start), e.message().to_string())
    })?;
    let g = parse_group(&file.group)?;
    let symmetric = file.symmetric.unwrap_or(true);
    let cap = file.max_elements.unwrap_or(DEFAULT_MAX_ELEMENTS);
    if symmetric && cap == DEFAULT_MAX_ELEMENTS {
        Ok(g)
    } else {
        g.with_options(symmetric, cap)
    }
}

pub(super) fn parse_element(group: &MarkedGroup, text: &str) -> Result<Element> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "1" || trimmed == "id" {
        return Ok(group.identity());
    }
    if trimmed.starts_with('(') && group.table().is_some() {
        return parse_cycles(group, trimmed);
    }
    let labels = group.label_table();
    let mut acc = group.identity();
    let bytes = text.as_bytes();
    let mut pos = 0;
    while pos < text.len() {
        if matches!(bytes[pos], b'*' | b'.') || bytes[pos].is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let rest = &text[pos..];
        let (label, g) = labels
            .iter()
            .filter(|(l, _)| rest.starts_with(l.as_str()))
            .max_by_key(|(l, _)| l.len())
            .ok_or_else(|| Error::parse(pos, format!("no generator label matches `{rest}`")))?;
        pos += label.len();
        let mut exp: i64 = 1;
        if text[pos..].starts_with('^') {
            pos += 1;
            let start = pos;
            if text[pos..].starts_with('-') {
                pos += 1;
            }
            while pos < text.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            exp = text[start..pos]
                .parse()
                .map_err(|_| Error::parse(start, "expected an integer exponent"))?;
        }
        let base = if exp < 0 { group.inverse(g) } else { g.clone() };
        for _ in 0..exp.unsigned_abs() {
            acc = group.mul(&acc, &base);
        }
    }
    Ok(acc)
}

fn parse_cycles(group: &MarkedGroup, text: &str) -> Result<Element> {
    let degree = group.table().expect("table kind").degree();
    let mut cycles = Vec::new();
    let mut rest = text;
    let mut offset = 0;
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('(') else {
            return Err(Error::parse(offset, "expected `(`"));
        };
        let close = body
            .find(')')
            .ok_or_else(|| Error::parse(offset, "unclosed cycle"))?;
        let points = body[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| Error::parse(offset, format!("bad point `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
        let consumed = close + 2;
        offset += consumed;
        rest = rest[consumed..].trim_start();
    }
    let p = from_cycles(degree, &cycles)?;
    group.from_permutation(&p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_specs() {
        let g = parse_group("free_product([cyclic(2), free_abelian(2), free(1)])").unwrap();
        assert_eq!(g.factors().len(), 3);
        assert_eq!(g.spec(), "free_product([cyclic(2), free_abelian(2), free(1)])");
    }

    #[test]
    fn unknown_constructor_is_named() {
        match parse_group("heisenberg(3)") {
            Err(Error::UnknownConstructor(name)) => assert_eq!(name, "heisenberg"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_group("free(2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_group("free(2) x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn toml_file() {
        let g = parse_group_file("group = \"cyclic(6)\"\nsymmetric = false\nmax_elements = 50\n").unwrap();
        assert!(!g.is_symmetric());
        assert_eq!(g.max_elements(), 50);
        assert!(parse_group_file("group = \"free(2)\"\nsymmetric = false\n").is_err());
    }

    #[test]
    fn element_literals() {
        let f2 = parse_group("free(2)").unwrap();
        assert_eq!(f2.parse_element("abA").unwrap(), Element::Word(vec![1, 2, -1]));
        assert_eq!(f2.parse_element("a^-2 * b").unwrap(), Element::Word(vec![-1, -1, 2]));
        assert!(f2.is_identity(&f2.parse_element("1").unwrap()));
        assert!(f2.parse_element("c").is_err());
        let z = parse_group("free_abelian(1)").unwrap();
        assert_eq!(z.parse_element("t^5").unwrap(), Element::Vector(vec![5]));
        let s4 = parse_group("sym(4)").unwrap();
        let t = s4.parse_element("(1 3)(2 4)").unwrap();
        assert_eq!(s4.format(&t), "(1 3)(2 4)");
        let fp = parse_group("free_product([cyclic(5), cyclic(2)])").unwrap();
        let x = fp.parse_element("a^3*b*a").unwrap();
        assert_eq!(fp.format(&x), "a^3*b*a");
        assert_eq!(fp.word_length(&x), 3);
    }

    #[test]
    fn format_round_trips() {
        for spec in [
            "free(2)",
            "free_abelian(2)",
            "sum_z2(4)",
            "sym_chain(4)",
            "free_product([cyclic(3), sym(3), free_abelian(1)])",
        ] {
            let g = parse_group(spec).unwrap();
            let b = super::super::ball(&g, 3).unwrap();
            for x in b.elements() {
                let text = g.format(x);
                assert_eq!(&g.parse_element(&text).unwrap(), x, "{spec}: {text}");
            }
        }
    }
}
