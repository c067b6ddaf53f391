use std::collections::VecDeque;

use num::rational::BigRational;
use num::{BigUint, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use schreier::builders::spec::GraphSpec;
use schreier::builders::{complete_ball, free_ball};
use schreier::cycles::essential_girth_profile;
use schreier::irs::{invariance_diagnostic, stabilizer_sample, uniform_conjugate};
use schreier::local::{bs_statistics, fix_counts_all, fix_density as word_fix_density, local_approx_check, tree_ball};
use schreier::spectral::{
    distribution_operator_norm, estimate_rho_returns, estimate_rho_returns_core, markov_spectrum,
    product_return_bound, ramanujan_check, SpectralOptions,
};
use schreier::walks::{
    conditioned_prefix_probability, count_returns, count_walks, different_check, prefix_bound, returning_words,
};
use schreier::{sgf, Error, GenSet, PermAction, Result, SchreierGraph, Word};

use crate::report::{big, float, rational, rationals, Outcome};
use crate::{
    BallDistanceArgs, BsStatsArgs, BuildArgs, CyclesArgs, DifferentArgs, FixDensityArgs, GraphArgs, IrsArgs,
    LekvArgs, ModifiedArgs, ReturningArgs, RhoEstimateArgs, SubgroupNormArgs, Triv1Args, Triv2Args, WalksArgs,
};

pub fn spec(s: &str) -> Result<GraphSpec> {
    GraphSpec::parse(s)
}

pub fn graph(s: &str) -> Result<SchreierGraph> {
    spec(s)?.graph()
}

pub fn action(s: &str) -> Result<PermAction> {
    spec(s)?.action()
}

/// `F<m>` is the free group of rank `m`; anything else is a builder spec.
/// Infinite groups are truncated at `radius` (a spec's own radius wins when larger).
pub fn group_graph(s: &str, radius: u32) -> Result<SchreierGraph> {
    if let Some(m) = s.strip_prefix('F').and_then(|m| m.parse::<usize>().ok()) {
        return Ok(free_ball(m, radius));
    }
    let sp = spec(s)?;
    match (&sp, sp.core()?) {
        (GraphSpec::Free { radius: r, .. } | GraphSpec::Fold { radius: r, .. }, Some(core)) if !core.is_complete() => {
            Ok(complete_ball(&core, r.unwrap_or(0).max(radius)))
        }
        _ => sp.graph(),
    }
}

pub fn words(gens: &GenSet, list: &str) -> Result<Vec<Word>> {
    list.split(',').map(|w| gens.parse_word(w.trim())).collect()
}

fn show(gens: &GenSet, w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.display(gens).to_string()
    }
}

fn show_all(gens: &GenSet, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| show(gens, w)).collect()
}

/// Every word of length exactly `len`, reduced or not.
pub fn all_words(gens: &GenSet, len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| (0..gens.degree()).map(move |l| w.concat(&Word::new(vec![l]))))
            .collect();
    }
    out
}

fn graph_summary(g: &SchreierGraph) -> Value {
    json!({
        "vertices": g.vertex_count(),
        "degree": g.degree(),
        "generators": g.gens().names(),
        "truncation": g.truncation(),
    })
}

pub fn build(a: &BuildArgs) -> Result<Outcome> {
    Ok(Outcome::text(sgf::serialize(&graph(&a.spec)?)))
}

pub fn spectrum(a: &GraphArgs) -> Result<Outcome> {
    let g = graph(&a.graph)?;
    if !g.is_finite() {
        return Err(Error::InvalidParameters("spectrum needs a finite graph".into()));
    }
    if g.vertex_count() > a.dense_limit {
        return Err(Error::TooLargeForDense { n: g.vertex_count(), limit: a.dense_limit });
    }
    let s = markov_spectrum(&g)?;
    Ok(Outcome::report(json!({
        "graph": graph_summary(&g),
        "bipartite": g.is_bipartite(),
        "eigenvalues": s,
    })))
}

pub fn rho_estimate(a: &RhoEstimateArgs) -> Result<Outcome> {
    let sp = spec(&a.graph)?;
    let unbounded = matches!(sp, GraphSpec::Free { radius: None, .. } | GraphSpec::Fold { radius: None, .. });
    let est = match sp.core()? {
        Some(core) if unbounded && !core.is_complete() => estimate_rho_returns_core(&core, a.horizon, a.exact_limit),
        _ => estimate_rho_returns(&sp.graph()?, a.horizon, a.exact_limit)?,
    };
    Ok(Outcome::report(serde_json::to_value(&est).unwrap_or_default()))
}

pub fn ramanujan(a: &GraphArgs) -> Result<Outcome> {
    let g = graph(&a.graph)?;
    let opts = SpectralOptions { dense_limit: a.dense_limit, ..SpectralOptions::default() };
    let v = ramanujan_check(&g, &opts)?;
    Ok(Outcome::report(json!({
        "rho0": v.report.rho0,
        "threshold": v.threshold,
        "verdict": v.verdict,
        "verdict_excluding_minus_one": v.verdict_excluding_minus_one,
        "report": v.report,
    })))
}

pub fn walks(a: &WalksArgs) -> Result<Outcome> {
    let g = graph(&a.graph)?;
    let t = count_walks(&g, a.from, a.length)?;
    let mut out = json!({
        "graph": graph_summary(&g),
        "from": a.from,
        "length": a.length,
        "returns": big(t.returns(a.length)),
        "return_probability": rational(&t.probability(a.from, a.length)),
    });
    if let Some(y) = a.to {
        if y >= g.vertex_count() {
            return Err(Error::InvalidParameters(format!("vertex {y} out of range")));
        }
        out["to"] = json!({ "vertex": y, "count": big(t.count(y, a.length)), "probability": rational(&t.probability(y, a.length)) });
    }
    if a.row {
        out["row"] = Value::Array(t.row(a.length).iter().map(big).collect());
    }
    Ok(Outcome::report(out))
}

pub fn different(a: &DifferentArgs) -> Result<Outcome> {
    let g = group_graph(&a.group.group, a.max_n as u32)?;
    let rows = different_check(&g, 0, a.max_n)?;
    let holds = rows.iter().all(|r| r.left_holds && r.right_holds);
    let table: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "max_offdiagonal": big(&r.max_offdiagonal),
                "returns": big(&r.returns),
                "bound": big(&r.bound),
                "left_holds": r.left_holds,
                "right_holds": r.right_holds,
            })
        })
        .collect();
    Ok(Outcome::asserted(json!({ "graph": graph_summary(&g), "rows": table }), holds))
}

pub fn returning_vs_rw(a: &ReturningArgs) -> Result<Outcome> {
    let g = group_graph(&a.group.group, a.n as u32)?;
    let gens = g.gens().clone();
    let mut rows = Vec::new();
    let mut holds = true;
    let returns = count_returns(&g, 0, a.n, a.n.max(1))?;
    let vacuous = returns.exact[a.n] == BigUint::zero();
    for l in 0..=a.max_prefix.min(a.n) {
        if vacuous {
            break;
        }
        let bound = prefix_bound(gens.degree(), l);
        for w in all_words(&gens, l) {
            let p = conditioned_prefix_probability(&g, 0, &w, a.n)?;
            let ok = p >= bound;
            holds &= ok;
            rows.push(json!({ "prefix": show(&gens, &w), "probability": rational(&p), "bound": rational(&bound), "holds": ok }));
        }
    }
    Ok(Outcome::asserted(json!({ "graph": graph_summary(&g), "n": a.n, "vacuous": vacuous, "rows": rows }), holds))
}

fn enumerated(g: &SchreierGraph, n: usize, guard: u64) -> Result<schreier::walks::ReturningWordSet> {
    let set = returning_words(g, n, guard)?;
    if set.words.is_none() {
        return Err(Error::GuardExceeded { count: set.count.to_string(), limit: guard });
    }
    Ok(set)
}

pub fn triv1(a: &Triv1Args) -> Result<Outcome> {
    let g = group_graph(&a.group.group, a.n.div_ceil(2) as u32)?;
    let gens = g.gens().clone();
    let set = enumerated(&g, a.n, a.guard)?;
    let mut rows = Vec::new();
    let mut holds = true;
    let vacuous = set.words.as_ref().is_some_and(|w| w.is_empty());
    for k in 0..=a.max_k {
        if a.n <= 2 * k || vacuous {
            continue;
        }
        let bound = prefix_bound(gens.degree(), k);
        for b in all_words(&gens, k) {
            let p = set.prefix_probability(&b)?;
            let ok = p >= bound;
            holds &= ok;
            rows.push(json!({ "prefix": show(&gens, &b), "probability": rational(&p), "bound": rational(&bound), "holds": ok }));
        }
    }
    Ok(Outcome::asserted(
        json!({ "graph": graph_summary(&g), "n": a.n, "returning_words": big(&set.count), "vacuous": vacuous, "rows": rows }),
        holds,
    ))
}

pub fn triv2(a: &Triv2Args) -> Result<Outcome> {
    let g = group_graph(&a.group.group, a.n.div_ceil(2) as u32)?;
    let set = enumerated(&g, a.n, a.guard)?;
    let mut comparisons = 0usize;
    let mut failures = Vec::new();
    if set.words.as_ref().is_some_and(|w| !w.is_empty()) {
        for k in 1..=a.n {
            let base = set.segment_distribution(0, k)?;
            for t in 1..a.n {
                comparisons += 1;
                if set.segment_distribution(t, k)? != base {
                    failures.push(json!({ "t": t, "k": k }));
                }
            }
        }
    }
    let holds = failures.is_empty();
    Ok(Outcome::asserted(
        json!({
            "graph": graph_summary(&g),
            "n": a.n,
            "returning_words": big(&set.count),
            "closed_under_rotation": set.closed_under_rotation()?,
            "comparisons": comparisons,
            "failures": failures,
        }),
        holds,
    ))
}

/// A word for every point of a regular action, by breadth-first search from 0.
fn element_words(act: &PermAction) -> Result<Vec<Word>> {
    if !act.is_regular() {
        return Err(Error::InvalidParameters("the action must be regular".into()));
    }
    let mut found: Vec<Option<Word>> = vec![None; act.degree()];
    found[0] = Some(Word::empty());
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for l in 0..act.gens().degree() {
            let y = act.apply(x, l);
            if found[y].is_none() {
                found[y] = found[x].as_ref().map(|w| w.concat(&Word::new(vec![l])));
                queue.push_back(y);
            }
        }
    }
    Ok(found.into_iter().flatten().collect())
}

/// One to three random elements, each together with its inverse.
fn random_support(act: &PermAction, elems: &[Word], rng: &mut ChaCha8Rng) -> Vec<Word> {
    let k = rng.random_range(1..=3);
    let mut out = Vec::new();
    for _ in 0..k {
        let w = elems[rng.random_range(0..elems.len())].clone();
        let inv = w.inverse(act.gens());
        let same = act.word_permutation(&w) == act.word_permutation(&inv);
        out.push(w);
        if !same {
            out.push(inv);
        }
    }
    out
}

pub fn tolerance(t: f64, positive: bool) -> Result<()> {
    if t.is_nan() || t < 0.0 || (positive && t == 0.0) {
        return Err(Error::InvalidParameters(format!("tolerance {t} must be {}", if positive { "positive" } else { "nonnegative" })));
    }
    Ok(())
}

pub fn modified_rw(a: &ModifiedArgs) -> Result<Outcome> {
    tolerance(a.tolerance, false)?;
    let act = action(&a.action)?;
    let gens = act.gens().clone();
    let sequences: Vec<Vec<Vec<Word>>> = if a.support.is_empty() {
        let elems = element_words(&act)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..a.sequences)
            .map(|_| {
                let len = rng.random_range(1..=a.max_length.max(1));
                (0..len).map(|_| random_support(&act, &elems, &mut rng)).collect()
            })
            .collect()
    } else {
        vec![a.support.iter().map(|s| words(&gens, s)).collect::<Result<_>>()?]
    };
    let mut rows = Vec::new();
    let mut holds = true;
    for seq in &sequences {
        let p = product_return_bound(&act, seq, a.tolerance)?;
        holds &= p.holds;
        rows.push(json!({
            "supports": seq.iter().map(|s| show_all(&gens, s)).collect::<Vec<_>>(),
            "probability": rational(&p.probability_exact),
            "norms": p.norms,
            "bound": p.bound,
            "holds": p.holds,
        }));
    }
    Ok(Outcome::asserted(json!({ "points": act.degree(), "rows": rows }), holds))
}

pub fn subgroup_norm(a: &SubgroupNormArgs) -> Result<Outcome> {
    tolerance(a.tolerance, false)?;
    let act = action(&a.action)?;
    let gens = act.gens().clone();
    let supports: Vec<Vec<Word>> = if a.support.is_empty() {
        let elems = element_words(&act)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..a.count).map(|_| random_support(&act, &elems, &mut rng)).collect()
    } else {
        a.support.iter().map(|s| words(&gens, s)).collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    let mut holds = true;
    for s in &supports {
        let r = distribution_operator_norm(&act, s)?;
        let ok = r.multiset_gap <= a.tolerance;
        holds &= ok;
        rows.push(json!({
            "support": show_all(&gens, s),
            "norm": r.norm,
            "index": r.index,
            "spectrum": r.spectrum,
            "subgroup_spectrum": r.subgroup_spectrum,
            "multiset_gap": r.multiset_gap,
            "holds": ok,
        }));
    }
    Ok(Outcome::asserted(json!({ "points": act.degree(), "rows": rows }), holds))
}

pub fn lekv(a: &LekvArgs) -> Result<Outcome> {
    let actions: Vec<PermAction> = a.action.iter().map(|s| action(s)).collect::<Result<_>>()?;
    let listed = match (&a.words, actions.first()) {
        (Some(list), Some(first)) => Some(words(first.gens(), list)?),
        _ => None,
    };
    let rep = local_approx_check(&actions, listed.as_deref(), a.radius)?;
    let gens = actions[0].gens().clone();
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .zip(&a.action)
        .map(|(r, id)| {
            json!({
                "action": id,
                "points": r.n,
                "tree_fraction": rational(&r.tree_fraction),
                "fix_densities": rationals(&r.fix_densities),
                "upper_holds": r.upper_holds,
                "fix_sum": rational(&r.fix_sum),
                "lower_holds": r.lower_holds,
            })
        })
        .collect();
    Ok(Outcome::asserted(
        json!({ "radius": rep.radius, "words": show_all(&gens, &rep.words), "rows": rows }),
        rep.all_hold(),
    ))
}

pub fn bs_stats(a: &BsStatsArgs) -> Result<Outcome> {
    let act = action(&a.graph)?;
    let dist = bs_statistics(&act, a.radius)?;
    let tree = tree_ball(act.gens(), a.radius);
    let classes: Vec<Value> = dist
        .classes
        .iter()
        .map(|(h, (count, b))| json!({ "hash": h, "count": count, "ball_vertices": b.vertex_count, "frequency": rational(&dist.frequency(h)) }))
        .collect();
    Ok(Outcome::report(json!({
        "points": act.degree(),
        "radius": a.radius,
        "class_count": classes.len(),
        "tree_hash": tree.hash(),
        "tree_fraction": rational(&dist.frequency_of(&tree)),
        "classes": classes,
    })))
}

pub fn ball_distance(a: &BallDistanceArgs) -> Result<Outcome> {
    let g1 = graph(&a.graph)?;
    let g2 = match &a.other {
        Some(s) => graph(s)?,
        None => g1.clone(),
    };
    for (g, v) in [(&g1, a.root), (&g2, a.other_root)] {
        if v >= g.vertex_count() {
            return Err(Error::InvalidParameters(format!("vertex {v} out of range")));
        }
    }
    let d = schreier::local::ball_distance(&g1, a.root, &g2, a.other_root, a.max_radius)?;
    Ok(Outcome::report(json!({
        "agree_up_to": d.agree_up_to,
        "capped": d.capped,
        "max_radius": d.max_radius,
        "distance": rational(&d.value()),
    })))
}

pub fn fix_density(a: &FixDensityArgs) -> Result<Outcome> {
    let act = action(&a.action)?;
    let gens = act.gens().clone();
    let rows: Vec<Value> = if a.word.is_empty() {
        let n = BigRational::from_integer(act.degree().into());
        fix_counts_all(&act, a.max_len)
            .into_iter()
            .map(|(w, c)| json!({ "word": show(&gens, &w), "fixed": c, "density": rational(&(BigRational::from_integer(c.into()) / &n)) }))
            .collect()
    } else {
        a.word
            .iter()
            .map(|s| {
                let w = gens.parse_word(s)?;
                Ok(json!({ "word": show(&gens, &w), "density": rational(&word_fix_density(&act, &w)?) }))
            })
            .collect::<Result<_>>()?
    };
    Ok(Outcome::report(json!({ "points": act.degree(), "rows": rows })))
}

pub fn cycles(a: &CyclesArgs) -> Result<Outcome> {
    let graphs: Vec<(String, SchreierGraph)> =
        a.graph.iter().map(|s| Ok((s.clone(), graph(s)?))).collect::<Result<_>>()?;
    let profile = essential_girth_profile(&graphs, a.max_len)?;
    Ok(Outcome::report(serde_json::to_value(&profile).unwrap_or_default()))
}

pub fn irs_sample(a: &IrsArgs, threads: usize) -> Result<Outcome> {
    let act = action(&a.action)?;
    let mut e = if a.exact { uniform_conjugate(&act) } else { stabilizer_sample(&act, a.count, a.seed)? };
    e.provenance.source = a.action.clone();
    e.provenance.threads = threads;
    let inv = invariance_diagnostic(&e, a.radius)?;
    let rows: Vec<Value> = inv
        .rows
        .iter()
        .map(|r| json!({ "generator": r.name, "tv": rational(&r.tv), "mc_radius": r.mc_radius.map(float) }))
        .collect();
    let mut out = json!({
        "kind": e.kind,
        "provenance": e.provenance,
        "orbit_graphs": e.graphs.len(),
        "samples": e.samples.len(),
        "invariance": { "radius": inv.radius, "exactly_invariant": inv.exactly_invariant(), "max_tv": inv.max_tv(), "rows": rows },
    });
    if !a.summary {
        out["ensemble"] = e.to_json();
    }
    Ok(Outcome::report(out))
}
