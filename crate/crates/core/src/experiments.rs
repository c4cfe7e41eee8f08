//! The named experiments behind the `endsctl` subcommands. Each returns a
//! [`Report`] whose JSON depends only on its arguments and seed.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cayley::estimate_end_count_window;
use crate::ends::cone::{cone_point, cones_disjoint, is_suffix, split_cone};
use crate::ends::holder::{holder_compare, Basis};
use crate::ends::{common_suffix_depth, end_distance, oracle_separation, FreeGroupEnd};
use crate::error::{Error, Result};
use crate::free_product::{check_lift, last_letter_type, lift_commensurated};
use crate::group::{ball, Element, Letter, MarkedGroup};
use crate::locally_finite::{levelset, verify_bi_invariance_all, verify_bi_invariance_on_truncation};
use crate::report::{rng, Report};
use crate::subset::boundary::{boundary_decode, boundary_encode, boundary_pairs};
use crate::subset::sample::{random_commensurated, random_element};
use crate::subset::verify::{check_translators, Evidence, Status, Verdict, Witness};
use crate::subset::{NatSet, Side, Subset};
use crate::tree::BassSerreTree;

fn command(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|s| s.to_string()).collect()
}

fn bounded(radius: u32, sizes: Vec<usize>) -> Verdict {
    Verdict {
        status: Status::VerifiedToRadius { radius },
        witness: None,
        evidence: vec![Evidence { side: None, translator: None, sizes, support: None }],
    }
}

fn exact_with(sizes: Vec<usize>) -> Verdict {
    Verdict {
        status: Status::VerifiedExact,
        witness: None,
        evidence: vec![Evidence { side: None, translator: None, sizes, support: None }],
    }
}

fn refuted(translator: Option<String>, element: Option<String>, detail: String) -> Verdict {
    Verdict::refuted(Witness { side: None, translator, element, detail })
}

fn to_value(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable result")
}

/// Annulus component counts and the end-count verdict.
pub fn ends_estimate(g: &Arc<MarkedGroup>, rmax: u32, window: u32) -> Result<Report> {
    let est = estimate_end_count_window(g, rmax, window)?;
    let mut r = Report::new(
        command(&["ends", "estimate", "--group", g.spec(), "--rmax", &rmax.to_string()]),
        Some(g.spec().into()),
        0,
    );
    r.param("rmax", rmax).param("window", window);
    r.results = to_value(&est);
    Ok(r)
}

/// `last_letter_type(g·h) = last_letter_type(h)` on seeded random pairs with
/// `g` a Cayley step (a single syllable) and `h ∉ {1, g⁻¹}`, `|h| ≤ radius`.
pub fn verify_coupme(g: &Arc<MarkedGroup>, pairs: usize, radius: u32, seed: u64) -> Result<Report> {
    last_letter_type(g, &g.identity())?;
    let mut rand = rng(seed);
    let mut failures = Vec::new();
    for _ in 0..pairs {
        let s = g.steps().choose(&mut rand).expect("free products have steps").clone();
        let s_inv = g.inverse(&s);
        let h = loop {
            let h = random_element(g, radius as usize, &mut rand);
            if !g.is_identity(&h) && h != s_inv {
                break h;
            }
        };
        let (before, after) = (last_letter_type(g, &h)?, last_letter_type(g, &g.mul(&s, &h))?);
        if before != after {
            failures.push((s, h, before, after));
        }
    }
    let mut r = Report::new(
        command(&["verify", "coupme", "--group", g.spec(), "--pairs", &pairs.to_string(), "--radius", &radius.to_string()]),
        Some(g.spec().into()),
        seed,
    );
    r.param("pairs", pairs).param("radius", radius);
    let verdict = match failures.first() {
        None => bounded(radius, vec![pairs]),
        Some((s, h, before, after)) => refuted(
            Some(g.format(s)),
            Some(g.format(h)),
            format!("last letter type {before} becomes {after}"),
        ),
    };
    r.check("last letter type is invariant under single syllables", verdict);
    r.results = json!({ "pairs": pairs, "exceptions": failures.len() });
    Ok(r)
}

/// The lift `M′ = {g : suf_H(g) ∈ M}` of `M ⊆ H` for the factor `factor`
/// (0-based), compared with `M` on `ball(radius)` for each translator.
pub fn verify_freepro_inj(
    g: &Arc<MarkedGroup>,
    factor: usize,
    m_expr: &str,
    translators: &[String],
    radius: u32,
) -> Result<Report> {
    let h = g.factor(factor)?.clone();
    let m = Subset::parse(&h, m_expr)?;
    let (lifted, pre) = lift_commensurated(g, factor, &m, radius)?;
    let mut r = Report::new(
        command(&["verify", "freepro-inj", "--group", g.spec(), "--factor", &(factor + 1).to_string(), "--set", m_expr]),
        Some(g.spec().into()),
        0,
    );
    r.param("factor", factor + 1).param("set", m_expr).param("translators", translators).param("radius", radius);
    r.check("M is left-commensurated in H", pre);
    let mut results = Vec::new();
    for t in translators {
        let te = h.parse_element(t)?;
        let c = check_lift(&lifted, &m, factor, &te, radius)?;
        let verdict = if c.differences_agree && c.restriction_agrees {
            bounded(radius, vec![c.lifted_difference.len()])
        } else {
            let detail = if c.differences_agree {
                "M′ ∩ H differs from M".to_string()
            } else {
                format!("M′ ∖ h⁻¹M′ = {:?} but M ∖ h⁻¹M = {:?}", c.lifted_difference, c.factor_difference)
            };
            refuted(Some(t.clone()), None, detail)
        };
        r.check(format!("lift difference for h = {t}"), verdict);
        results.push(c);
    }
    r.results = to_value(results);
    Ok(r)
}

/// Bi-invariance of the chain level (for one `g`, or exhaustively) and
/// bi-commensuration of the even-level set.
pub fn verify_notame(g: &Arc<MarkedGroup>, element: Option<&str>, radius: u32) -> Result<Report> {
    let mut cmd = command(&["verify", "notame", "--group", g.spec()]);
    if let Some(x) = element {
        cmd.extend(command(&["--g", x]));
    }
    let mut r = Report::new(cmd, Some(g.spec().into()), 0);
    r.param("radius", radius);
    match element {
        Some(x) => {
            let xe = g.parse_element(x)?;
            r.param("g", x);
            r.check(format!("level bi-invariance for g = {x}"), verify_bi_invariance_on_truncation(g, &xe)?);
        }
        None => {
            let rep = verify_bi_invariance_all(g)?;
            r.results = json!({
                "chain_length": rep.chain_length,
                "order": rep.order,
                "checked_pairs": rep.checked_pairs,
            });
            r.check("level bi-invariance for every g", rep.verdict);
        }
    }
    let even = levelset(g, NatSet::evens())?;
    r.check(
        "even-level set is bi-commensurated",
        check_translators(&even, g.steps(), &[Side::Left, Side::Right], radius)?,
    );
    Ok(r)
}

/// Boundary round-trips for seeded random commensurated `U ∋ 1`, cycling
/// through `groups`, and the kernel property one radius further out.
pub fn verify_cardbool(groups: &[Arc<MarkedGroup>], count: usize, radius: u32, seed: u64) -> Result<Report> {
    if groups.is_empty() {
        return Err(Error::domain("no groups given"));
    }
    let mut rand = rng(seed);
    let balls = groups.iter().map(|g| ball(g, radius)).collect::<Result<Vec<_>>>()?;
    let mut round_trip_failure = None;
    let mut kernel_failure = None;
    let mut kernel_cases = 0;
    for i in 0..count {
        let k = i % groups.len();
        let (g, b) = (&groups[k], &balls[k]);
        let u = Subset::new(g, random_commensurated(g, 2, true, &mut rand))?;
        let back = boundary_decode(&boundary_encode(&u, radius)?, radius)?;
        if round_trip_failure.is_none() {
            if let Some(x) = b.elements().iter().find(|x| back.contains(x) != u.contains(x)) {
                round_trip_failure = Some((u.to_string(), g.format(x)));
            }
        }
        if boundary_pairs(&u, radius + 1)?.is_empty() {
            kernel_cases += 1;
            let inside = b.elements().iter().filter(|x| u.contains(x)).count();
            if inside != 0 && inside != b.len() && kernel_failure.is_none() {
                kernel_failure = Some(u.to_string());
            }
        }
    }
    let specs: Vec<&str> = groups.iter().map(|g| g.spec()).collect();
    let mut r = Report::new(
        command(&["verify", "cardbool", "--count", &count.to_string(), "--radius", &radius.to_string()]),
        Some(specs.join(", ")),
        seed,
    );
    r.param("groups", &specs).param("count", count).param("radius", radius);
    r.check(
        "decode(encode(U)) = U",
        match round_trip_failure {
            None => bounded(radius, vec![count]),
            Some((u, x)) => refuted(Some(u), Some(x), "decoded set disagrees with U".into()),
        },
    );
    r.check(
        "empty boundary implies a constant set",
        match kernel_failure {
            None => bounded(radius, vec![kernel_cases]),
            Some(u) => refuted(Some(u), None, "empty boundary but U is not constant on the ball".into()),
        },
    );
    r.results = json!({ "sets": count, "kernel_cases": kernel_cases });
    Ok(r)
}

/// Tree axioms, `M_s ⊆ {s⁻¹}` for every generator `s`, and pairwise
/// disjointness of the translates `M·h` over the nontrivial `h` in the first
/// factor.
pub fn verify_tree_disjoint(g: &Arc<MarkedGroup>, depth: u32, radius: u32) -> Result<Report> {
    if depth <= radius {
        return Err(Error::Precondition(format!("tree depth {depth} must exceed the ball radius {radius}")));
    }
    let tree = BassSerreTree::from_free_product(g, depth)?;
    let mut r = Report::new(
        command(&["verify", "tree-disjoint", "--group", g.spec(), "--depth", &depth.to_string(), "--radius", &radius.to_string()]),
        Some(g.spec().into()),
        0,
    );
    r.param("depth", depth).param("radius", radius);
    let ax = tree.check_axioms();
    r.check(
        "truncated tree is a tree",
        if ax.holds() {
            exact_with(vec![ax.vertices, ax.edges])
        } else {
            refuted(None, None, format!("{ax:?}"))
        },
    );
    for s in g.generators() {
        let ms = tree.commensuration_witness(s, radius)?;
        let s_inv = g.inverse(s);
        let name = format!("M_s ⊆ s⁻¹F for s = {}", g.format(s));
        let verdict = match ms.iter().find(|x| **x != s_inv) {
            None => bounded(radius, vec![ms.len()]),
            Some(x) => refuted(Some(g.format(s)), Some(g.format(x)), "element of M_s other than s⁻¹".into()),
        };
        r.check(name, verdict);
    }
    let h = g.factor(0)?;
    let nontrivial: Vec<Element> = match h.table_elements() {
        Some(all) => all.into_iter().skip(1).collect(),
        None => ball(h, 2)?.elements()[1..].to_vec(),
    };
    let translators = nontrivial.iter().map(|x| g.embed(0, x)).collect::<Result<Vec<_>>>()?;
    r.check("translates M·h are pairwise disjoint", tree.disjoint_translates(&translators, radius)?);
    Ok(r)
}

/// Commensuration of a set expression on the chosen sides.
pub fn verify_commensurated(g: &Arc<MarkedGroup>, set: &str, sides: &[Side], radius: u32) -> Result<Report> {
    let a = Subset::parse(g, set)?;
    let side_names: Vec<&str> = sides
        .iter()
        .map(|s| match s {
            Side::Left => "left",
            Side::Right => "right",
        })
        .collect();
    let mut r = Report::new(
        command(&["verify", "commensurated", "--group", g.spec(), "--set", set, "--side", &side_names.join(",")]),
        Some(g.spec().into()),
        0,
    );
    r.param("set", a.to_string()).param("sides", &side_names).param("radius", radius);
    r.check(format!("{} commensurated", side_names.join(" and ")), check_translators(&a, g.steps(), sides, radius)?);
    Ok(r)
}

/// Bi-commensuration of a set expression.
pub fn verify_biends(g: &Arc<MarkedGroup>, set: &str, radius: u32) -> Result<Report> {
    let mut r = verify_commensurated(g, set, &[Side::Left, Side::Right], radius)?;
    r.command = command(&["verify", "biends", "--group", g.spec(), "--set", set, "--radius", &radius.to_string()]);
    Ok(r)
}

#[derive(Debug, Clone, Serialize)]
struct PairResult {
    x: String,
    y: String,
    depth: Option<u32>,
    distance: f64,
    oracle: Option<u32>,
}

/// Closed-form depth against the separation oracle on `ball(ball_radius)`
/// with depth-`approx` approximants, plus the ultrametric inequality on
/// seeded triples drawn from the ends involved.
pub fn ends_metric(
    g: &Arc<MarkedGroup>,
    pairs: &[(FreeGroupEnd, FreeGroupEnd)],
    ball_radius: u32,
    approx: usize,
    triples: usize,
    seed: u64,
) -> Result<Report> {
    let b = ball(g, ball_radius)?;
    let rows = pairs
        .par_iter()
        .map(|(x, y)| {
            let depth = common_suffix_depth(x, y)?;
            let in_range = depth.is_some_and(|d| (d as usize) < approx);
            let oracle = if in_range { oracle_separation(&b, x, y, approx)?.map(|w| w.radius) } else { None };
            Ok(PairResult { x: x.render(g), y: y.render(g), depth, distance: end_distance(x, y)?, oracle })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = Report::new(
        command(&["ends", "metric", "--group", g.spec()]),
        Some(g.spec().into()),
        seed,
    );
    r.param("pairs", pairs.len()).param("ball_radius", ball_radius).param("approximant", approx).param("triples", triples);
    let compared: Vec<&PairResult> = rows.iter().filter(|p| p.depth.is_some_and(|d| (d as usize) < approx)).collect();
    r.check(
        "separation oracle equals common-suffix depth",
        match compared.iter().find(|p| p.oracle != p.depth) {
            None => bounded(ball_radius, vec![compared.len()]),
            Some(p) => refuted(
                Some(p.x.clone()),
                Some(p.y.clone()),
                format!("depth {:?} but oracle radius {:?}", p.depth, p.oracle),
            ),
        },
    );
    let mut pool: Vec<FreeGroupEnd> = pairs.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
    pool.sort();
    pool.dedup();
    let mut rand = rng(seed);
    let mut violation = None;
    if !pool.is_empty() {
        for _ in 0..triples {
            let t: Vec<&FreeGroupEnd> = (0..3).map(|_| pool.choose(&mut rand).expect("nonempty pool")).collect();
            let d = |a: &FreeGroupEnd, b: &FreeGroupEnd| common_suffix_depth(a, b).map(|d| d.map_or(u64::MAX, u64::from));
            // d(a, c) ≤ max(d(a, b), d(b, c)) in depths
            if d(t[0], t[2])? < d(t[0], t[1])?.min(d(t[1], t[2])?) && violation.is_none() {
                violation = Some(format!("{}, {}, {}", t[0].render(g), t[1].render(g), t[2].render(g)));
            }
        }
    }
    r.check(
        "ultrametric inequality",
        match violation {
            None => exact_with(vec![triples]),
            Some(t) => refuted(Some(t), None, "d(a, c) > max(d(a, b), d(b, c))".into()),
        },
    );
    r.results = to_value(rows);
    Ok(r)
}

/// Depth ratios between the end metrics of two bases.
pub fn ends_holder(
    g: &Arc<MarkedGroup>,
    genset1: &[Vec<Letter>],
    genset2: &[Vec<Letter>],
    sample: &[(FreeGroupEnd, FreeGroupEnd)],
) -> Result<Report> {
    let rank = g.free_rank().ok_or_else(|| Error::domain(format!("{} is not a free group", g.spec())))?;
    let b1 = Basis::new(rank, genset1.to_vec())?;
    let b2 = Basis::new(rank, genset2.to_vec())?;
    let est = holder_compare(&b1, &b2, sample)?;
    let show = |b: &Basis| -> Vec<String> { b.words().iter().map(|w| g.format(&Element::Word(w.clone()))).collect() };
    let mut r = Report::new(command(&["ends", "holder", "--group", g.spec()]), Some(g.spec().into()), 0);
    r.param("genset1", show(&b1)).param("genset2", show(&b2)).param("pairs", sample.len());
    r.results = to_value(est);
    Ok(r)
}

/// Every cone of depth at most `depth` splits into two disjoint nonempty
/// subcones, and `depth` rounds of splitting from the root give `2^depth`
/// pairwise disjoint cones.
pub fn cone_splitting(g: &Arc<MarkedGroup>, depth: u32) -> Result<Report> {
    let rank = g.free_rank().ok_or_else(|| Error::domain(format!("{} is not a free group", g.spec())))?;
    let b = ball(g, depth)?;
    let mut failure = None;
    for x in b.elements() {
        let Element::Word(w) = x else { unreachable!("free group elements are words") };
        let [c1, c2] = split_cone(rank, w)?;
        let ok = cones_disjoint(&c1, &c2)
            && is_suffix(w, &c1)
            && is_suffix(w, &c2)
            && cone_point(rank, &c1)?.ends_with(&c1)
            && cone_point(rank, &c2)?.ends_with(&c2);
        if !ok && failure.is_none() {
            failure = Some(g.format(x));
        }
    }
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..depth {
        level = level.iter().map(|w| split_cone(rank, w)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    }
    let distinct: BTreeSet<&Vec<Letter>> = level.iter().collect();
    let disjoint = level.iter().enumerate().all(|(i, a)| level[i + 1..].iter().all(|c| cones_disjoint(a, c)));
    let mut r = Report::new(
        command(&["ends", "split", "--group", g.spec(), "--depth", &depth.to_string()]),
        Some(g.spec().into()),
        0,
    );
    r.param("depth", depth);
    r.check(
        "every cone splits into two disjoint nonempty subcones",
        match failure {
            None => exact_with(vec![b.len()]),
            Some(w) => refuted(Some(w), None, "split cones are not disjoint nonempty subcones".into()),
        },
    );
    let expected = 1usize << depth;
    r.check(
        "iterated splitting gives pairwise disjoint cones",
        if disjoint && distinct.len() == expected {
            exact_with(vec![level.len()])
        } else {
            refuted(None, None, format!("{} cones, {} distinct, disjoint: {disjoint}", level.len(), distinct.len()))
        },
    );
    let by_len: HashMap<usize, usize> = level.iter().fold(HashMap::new(), |mut m, w| {
        *m.entry(w.len()).or_default() += 1;
        m
    });
    r.results = json!({ "cones": level.len(), "depths": by_len.keys().collect::<BTreeSet<_>>() });
    Ok(r)
}
