use serde_json::{json, Value};

use schreier::builders::{random_perm_model, stallings_core, trivial_core, CoreGraph};
use schreier::cycles::cycle_profile;
use schreier::irs::{rational_f64, uniform_conjugate};
use schreier::spectral::{
    estimate_rho_returns, estimate_rho_returns_core, ramanujan_check, rho0, tree_rho, ReturnsEstimate,
    SpectralOptions,
};
use schreier::{GenSet, Result, SchreierGraph};

use crate::commands::{action, graph, tolerance};
use crate::report::Outcome;
use crate::{FiniteIrsArgs, KestenArgs, RamanujanGirthArgs, RandomSequenceArgs};

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

fn estimate_json(e: &ReturnsEstimate) -> Value {
    json!({
        "lower_bound": e.lower_bound,
        "extrapolated": e.extrapolated,
        "monotone_exact": e.monotone_exact,
        "exact_horizon": e.exact_horizon,
    })
}

fn compare_cores(name: &str, sub: &CoreGraph, gens: &GenSet, a: &KestenArgs) -> Result<Outcome> {
    tolerance(a.tolerance, true)?;
    let sch = estimate_rho_returns_core(sub, a.horizon, a.exact_limit);
    let cay = estimate_rho_returns_core(&trivial_core(gens), a.horizon, a.exact_limit);
    let gap = (sch.lower_bound - cay.lower_bound).abs();
    let tree = tree_rho(gens.degree());
    Ok(Outcome::report(json!({
        "subgroup": name,
        "horizon": a.horizon,
        "schreier": estimate_json(&sch),
        "cayley": estimate_json(&cay),
        "tree_rho": tree,
        "gap": gap,
        "extrapolated_gap": (sch.extrapolated - cay.extrapolated).abs(),
        "within_tolerance": gap <= a.tolerance,
        "below_tree_rho": sch.lower_bound < tree && cay.lower_bound < tree,
        // Return roots never exceed the spectral radius, so this certifies a strict inequality.
        "schreier_bound_exceeds_tree_rho": sch.lower_bound > tree,
    })))
}

pub fn kesten_amenable(a: &KestenArgs) -> Result<Outcome> {
    let gens = GenSet::free(2);
    let sub = stallings_core(&gens, &[gens.parse_word("a")?])?;
    compare_cores("<a> in F2", &sub, &gens, a)
}

pub fn nonamenable(a: &KestenArgs) -> Result<Outcome> {
    let gens = GenSet::free(4);
    let sub = stallings_core(&gens, &[gens.parse_word("a")?, gens.parse_word("b")?])?;
    compare_cores("<a,b> in F4", &sub, &gens, a)
}

pub fn kesten_finite_irs(a: &FiniteIrsArgs) -> Result<Outcome> {
    let act = action(&a.action)?;
    let e = uniform_conjugate(&act);
    let cay = estimate_rho_returns_core(&trivial_core(act.gens()), a.horizon, 256);
    let mut weights = vec![0.0; e.graphs.len()];
    for s in &e.samples {
        weights[s.graph] += rational_f64(&s.weight);
    }
    let mut rows = Vec::new();
    for (g, w) in e.graphs.iter().zip(&weights) {
        let est = estimate_rho_returns(g, a.horizon, 256)?;
        rows.push(json!({
            "vertices": g.vertex_count(),
            "weight": w,
            // Constants are fixed by the Markov operator of a finite graph.
            "rho": 1.0,
            "returns_lower_bound": est.lower_bound,
        }));
    }
    Ok(Outcome::report(json!({
        "action": a.action,
        "points": act.degree(),
        "orbits": rows,
        "cayley": estimate_json(&cay),
        "tree_rho": tree_rho(act.gens().degree()),
        "strict": 1.0 > cay.lower_bound,
    })))
}

struct SequenceRun {
    n: usize,
    seed: u64,
    graph: SchreierGraph,
    rho0: f64,
}

fn run_sequence(a: &RandomSequenceArgs) -> Result<Vec<SequenceRun>> {
    let mut out = Vec::new();
    for &n in &a.sizes {
        for seed in 1..=a.seeds {
            let g = random_perm_model(a.rank, n, seed);
            let r = rho0(&g)?.rho0;
            out.push(SequenceRun { n, seed, graph: g, rho0: r });
        }
    }
    Ok(out)
}

fn by_size(a: &RandomSequenceArgs, runs: &[SequenceRun]) -> Vec<Value> {
    a.sizes
        .iter()
        .map(|&n| {
            let rs: Vec<f64> = runs.iter().filter(|r| r.n == n).map(|r| r.rho0).collect();
            json!({
                "n": n,
                "rho0": rs,
                "min": rs.iter().copied().fold(f64::INFINITY, f64::min),
                "median": median(&rs),
                "max": rs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

pub fn alon_boppana(a: &RandomSequenceArgs) -> Result<Outcome> {
    tolerance(a.tolerance, true)?;
    let runs = run_sequence(a)?;
    let tree = tree_rho(2 * a.rank);
    let largest = a.sizes.iter().copied().max().unwrap_or(0);
    let min_last = runs.iter().filter(|r| r.n == largest).map(|r| r.rho0).fold(f64::INFINITY, f64::min);
    Ok(Outcome::report(json!({
        "tree_rho": tree,
        "sizes": by_size(a, &runs),
        "largest": largest,
        "min_rho0_at_largest": min_last,
        "within_tolerance": min_last >= tree - a.tolerance,
    })))
}

pub fn ramanujan_girth(a: &RamanujanGirthArgs) -> Result<Outcome> {
    let runs = run_sequence(&a.sequence)?;
    let opts = SpectralOptions::default();
    let tree = tree_rho(2 * a.sequence.rank);
    let mut rows = Vec::new();
    for r in &runs {
        let p = cycle_profile(&format!("randperm:m={},n={},seed={}", a.sequence.rank, r.n, r.seed), &r.graph, a.max_len)?;
        rows.push(json!({
            "n": r.n,
            "seed": r.seed,
            "rho0": r.rho0,
            "verdict": r.rho0 <= tree,
            "girth": p.girth,
            "cycle_densities": p.densities,
        }));
    }
    let mut medians = Vec::new();
    for &n in &a.sequence.sizes {
        let sel: Vec<&Value> = rows.iter().filter(|r| r["n"] == json!(n)).collect();
        let dens: Vec<f64> = (0..a.max_len)
            .map(|l| median(&sel.iter().map(|r| r["cycle_densities"][l].as_f64().unwrap_or(0.0)).collect::<Vec<_>>()))
            .collect();
        medians.push(json!({ "n": n, "cycle_densities": dens }));
    }
    let lps = graph(&a.lps)?;
    let v = ramanujan_check(&lps, &opts)?;
    let p = cycle_profile(&a.lps, &lps, a.max_len)?;
    Ok(Outcome::report(json!({
        "tree_rho": tree,
        "random": rows,
        "random_medians": medians,
        "lps": {
            "spec": a.lps,
            "vertices": lps.vertex_count(),
            "degree": lps.degree(),
            "rho0": v.report.rho0,
            "threshold": v.threshold,
            "verdict": v.verdict,
            "girth": p.girth,
            "cycle_counts": p.counts,
            "cycle_densities": p.densities,
        },
    })))
}
