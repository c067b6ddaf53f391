//! Exact walk counting and returning-word statistics.

use std::collections::BTreeMap;

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};

use crate::builders::CoreGraph;
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{Endpoint, SchreierGraph};
use crate::words::{GenSet, Word};

/// Exact big-integer counting is used up to this many steps by default;
/// longer horizons continue in log-space floating point.
pub const DEFAULT_EXACT_LIMIT: usize = 256;

/// Default cap on explicitly listed tuples.
pub const DEFAULT_ENUMERATION_GUARD: u64 = 10_000_000;

/// A walk-count recurrence `next[s] = Σ mult · cur[src]` over states.
///
/// For a finite or truncated graph the states are its vertices. For the
/// infinite Schreier graph of a free group given by its core, the free trees
/// hanging off missing slots are lumped by (attachment vertex, depth); all
/// vertices of one class carry the same count.
#[derive(Debug, Clone)]
pub struct WalkChain {
    degree: usize,
    incoming: Vec<Vec<(u32, u32)>>,
    class_size: Vec<BigUint>,
    depth_cap: Option<usize>,
    graph_states: usize,
}

impl WalkChain {
    pub fn from_graph(g: &SchreierGraph) -> Self {
        let incoming = (0..g.vertex_count())
            .map(|v| {
                let mut inc: Vec<(u32, u32)> = Vec::with_capacity(g.degree());
                for (_, w) in g.neighbors(v) {
                    match inc.iter_mut().find(|(s, _)| *s == w as u32) {
                        Some(e) => e.1 += 1,
                        None => inc.push((w as u32, 1)),
                    }
                }
                inc
            })
            .collect();
        WalkChain {
            degree: g.degree(),
            incoming,
            class_size: vec![BigUint::one(); g.vertex_count()],
            depth_cap: None,
            graph_states: g.vertex_count(),
        }
    }

    /// Lumped chain of the infinite Schreier graph with core `core`, tracking
    /// tree depths up to `depth_cap`. Walks deeper than the cap are dropped,
    /// so returns to core vertices are exact for `2 · depth_cap + 1` steps
    /// and every count is exact for `depth_cap` steps.
    pub fn cover(core: &CoreGraph, depth_cap: usize) -> Self {
        let d = core.degree();
        let cn = core.vertex_count();
        let mut base = vec![usize::MAX; cn];
        let mut next_state = cn;
        for (c, b) in base.iter_mut().enumerate() {
            if core.missing_slots(c) > 0 && depth_cap > 0 {
                *b = next_state;
                next_state += depth_cap;
            }
        }
        let mut incoming = vec![Vec::new(); next_state];
        let mut class_size = vec![BigUint::one(); next_state];
        let branch = (d - 1) as u32;
        for c in 0..cn {
            let inc: &mut Vec<(u32, u32)> = &mut incoming[c];
            for l in 0..d {
                if let Some(w) = core.next(c, l) {
                    match inc.iter_mut().find(|(s, _)| *s == w as u32) {
                        Some(e) => e.1 += 1,
                        None => inc.push((w as u32, 1)),
                    }
                }
            }
            let m = core.missing_slots(c);
            if base[c] == usize::MAX {
                continue;
            }
            incoming[c].push((base[c] as u32, m as u32));
            for k in 1..=depth_cap {
                let s = base[c] + k - 1;
                let parent = if k == 1 { c } else { s - 1 };
                let mut inc = vec![(parent as u32, 1)];
                if k < depth_cap && branch > 0 {
                    inc.push(((s + 1) as u32, branch));
                }
                incoming[s] = inc;
                class_size[s] = BigUint::from(m) * BigUint::from(d - 1).pow((k - 1) as u32);
            }
        }
        WalkChain { degree: d, incoming, class_size, depth_cap: Some(depth_cap), graph_states: cn }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn state_count(&self) -> usize {
        self.incoming.len()
    }

    /// Number of graph vertices represented by state `s`.
    pub fn class_size(&self, s: usize) -> &BigUint {
        &self.class_size[s]
    }

    /// States that are actual vertices (graph vertices or core vertices).
    pub fn vertex_states(&self) -> usize {
        self.graph_states
    }

    pub fn depth_cap(&self) -> Option<usize> {
        self.depth_cap
    }

    pub fn step(&self, cur: &[BigUint]) -> Vec<BigUint> {
        exec::map_range(self.incoming.len(), |s| {
            let mut acc = BigUint::zero();
            for &(src, m) in &self.incoming[s] {
                let c = &cur[src as usize];
                if c.is_zero() {
                    continue;
                }
                if m == 1 {
                    acc += c;
                } else {
                    acc += c * m;
                }
            }
            acc
        })
    }

    /// One step on probabilities (divides by the degree).
    pub fn step_float(&self, cur: &[f64]) -> Vec<f64> {
        let d = self.degree as f64;
        exec::map_range(self.incoming.len(), |s| {
            self.incoming[s].iter().map(|&(src, m)| m as f64 * cur[src as usize]).sum::<f64>() / d
        })
    }

    fn start(&self, origin: usize) -> Vec<BigUint> {
        let mut v = vec![BigUint::zero(); self.incoming.len()];
        v[origin] = BigUint::one();
        v
    }
}

/// Exact counts `|P_{x,v,n}|` for all vertices `v` and `n ≤ horizon`.
#[derive(Debug, Clone)]
pub struct WalkTable {
    pub origin: usize,
    pub horizon: usize,
    pub degree: usize,
    counts: Vec<Vec<BigUint>>,
}

impl WalkTable {
    pub fn count(&self, v: usize, n: usize) -> &BigUint {
        &self.counts[n][v]
    }

    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.counts[n]
    }

    pub fn returns(&self, n: usize) -> &BigUint {
        &self.counts[n][self.origin]
    }

    /// `p_{x,v,n} = |P_{x,v,n}| / dⁿ`.
    pub fn probability(&self, v: usize, n: usize) -> BigRational {
        ratio(self.count(v, n), &BigUint::from(self.degree).pow(n as u32))
    }
}

pub(crate) fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

fn require_radius(g: &SchreierGraph, x: usize, required: usize) -> Result<()> {
    if let Some(r) = g.boundary_distance(x) {
        if (r as usize) < required {
            return Err(Error::InsufficientRadius { required: required as u32, available: r });
        }
    }
    Ok(())
}

/// Exact walk counts from `x` for up to `horizon` steps. On a truncated graph
/// `x` must be at distance at least `horizon` from the boundary.
pub fn count_walks(g: &SchreierGraph, x: usize, horizon: usize) -> Result<WalkTable> {
    require_radius(g, x, horizon)?;
    let chain = WalkChain::from_graph(g);
    let mut counts = Vec::with_capacity(horizon + 1);
    counts.push(chain.start(x));
    for n in 0..horizon {
        let next = chain.step(&counts[n]);
        counts.push(next);
    }
    Ok(WalkTable { origin: x, horizon, degree: g.degree(), counts })
}

/// Streams the rows `n = 0..=horizon` of exact counts without storing them.
pub fn for_each_row(chain: &WalkChain, origin: usize, horizon: usize, mut f: impl FnMut(usize, &[BigUint])) {
    let mut cur = chain.start(origin);
    f(0, &cur);
    for n in 1..=horizon {
        cur = chain.step(&cur);
        f(n, &cur);
    }
}

/// Return counts `|P_{x,x,n}|` and return probabilities for `n ≤ horizon`.
#[derive(Debug, Clone)]
pub struct ReturnSeries {
    pub degree: usize,
    pub horizon: usize,
    /// Exact counts for `n ≤ min(horizon, exact_limit)`.
    pub exact: Vec<BigUint>,
    /// `ln p_{x,x,n}` for every `n ≤ horizon` (`-inf` when zero).
    pub log_prob: Vec<f64>,
    pub exact_limit: usize,
}

impl ReturnSeries {
    /// Horizon reached in exact arithmetic.
    pub fn exact_horizon(&self) -> usize {
        self.exact.len() - 1
    }

    pub fn switched_to_log_space(&self) -> bool {
        self.horizon > self.exact_horizon()
    }

    pub fn probability(&self, n: usize) -> Option<BigRational> {
        self.exact
            .get(n)
            .map(|c| ratio(c, &BigUint::from(self.degree).pow(n as u32)))
    }

    /// `r_n = p_{x,x,2n}^{1/(2n)}`, for `n ≥ 1` and `2n ≤ horizon`.
    pub fn root(&self, n: usize) -> f64 {
        (self.log_prob[2 * n] / (2 * n) as f64).exp()
    }
}

pub(crate) fn big_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Return series of `chain` from `origin`. The caller guarantees the chain
/// is exact for returns up to `horizon`.
pub fn return_series(chain: &WalkChain, origin: usize, horizon: usize, exact_limit: usize) -> ReturnSeries {
    let d = chain.degree();
    let ln_d = (d as f64).ln();
    let mut exact = Vec::new();
    let mut log_prob = Vec::with_capacity(horizon + 1);
    let mut cur = chain.start(origin);
    let last_exact = horizon.min(exact_limit);
    exact.push(cur[origin].clone());
    log_prob.push(0.0);
    for n in 1..=last_exact {
        cur = chain.step(&cur);
        log_prob.push(big_ln(&cur[origin]) - n as f64 * ln_d);
        exact.push(cur[origin].clone());
    }
    if horizon > last_exact {
        // Continue on probabilities, renormalising every step.
        let top = cur.iter().map(|c| c.bits()).max().unwrap_or(0);
        let shift = top.saturating_sub(60);
        let mut p: Vec<f64> = cur.iter().map(|c| (c >> shift).to_f64().unwrap_or(0.0)).collect();
        let mut scale = shift as f64 * std::f64::consts::LN_2 - last_exact as f64 * ln_d;
        for _ in last_exact + 1..=horizon {
            p = chain.step_float(&p);
            let m = p.iter().cloned().fold(0.0f64, f64::max);
            if m > 0.0 {
                for x in p.iter_mut() {
                    *x /= m;
                }
                scale += m.ln();
            }
            let v = p[origin];
            log_prob.push(if v > 0.0 { v.ln() + scale } else { f64::NEG_INFINITY });
        }
    }
    ReturnSeries { degree: d, horizon, exact, log_prob, exact_limit }
}

/// Return counts at `x`, requiring boundary distance `≥ ⌈horizon/2⌉`.
pub fn count_returns(g: &SchreierGraph, x: usize, horizon: usize, exact_limit: usize) -> Result<ReturnSeries> {
    require_radius(g, x, horizon.div_ceil(2))?;
    Ok(return_series(&WalkChain::from_graph(g), x, horizon, exact_limit))
}

/// Return counts at the root of the infinite Schreier graph with this core.
pub fn count_returns_core(core: &CoreGraph, horizon: usize, exact_limit: usize) -> ReturnSeries {
    let chain = WalkChain::cover(core, horizon.div_ceil(2));
    return_series(&chain, 0, horizon, exact_limit)
}

/// `r_n ≤ r_{n+1}` checked exactly, i.e. `C_{2n}^{n+1} ≤ C_{2n+2}^n` for the
/// return counts `C`. Returns the first `n` where it fails.
pub fn first_monotonicity_violation(series: &ReturnSeries, max_half: usize) -> Option<usize> {
    for n in 1..max_half {
        if 2 * n + 2 > series.exact_horizon() {
            break;
        }
        let lhs = series.exact[2 * n].pow((n + 1) as u32);
        let rhs = series.exact[2 * n + 2].pow(n as u32);
        if lhs > rhs {
            return Some(n);
        }
    }
    None
}

/// Pairs `(m, n)` with `C_{2(m+n)} < C_{2m} · C_{2n}` (supermultiplicativity failures).
pub fn supermultiplicativity_violations(series: &ReturnSeries) -> Vec<(usize, usize)> {
    let half = series.exact_horizon() / 2;
    let mut out = Vec::new();
    for m in 1..=half {
        for n in m..=half - m {
            if series.exact[2 * (m + n)] < &series.exact[2 * m] * &series.exact[2 * n] {
                out.push((m, n));
            }
        }
    }
    out
}

/// Returning-word set `A_H(S,n)` for `H` the stabilizer of the root.
#[derive(Debug, Clone)]
pub struct ReturningWordSet {
    pub gens: GenSet,
    pub n: usize,
    pub count: BigUint,
    /// Explicit tuples in lexicographic order, when within the guard.
    pub words: Option<Vec<Word>>,
}

/// Lists (or counts, beyond `guard` tuples) the words of length `n` that
/// read closed walks at the root.
pub fn returning_words(g: &SchreierGraph, n: usize, guard: u64) -> Result<ReturningWordSet> {
    require_radius(g, 0, n.div_ceil(2))?;
    let d = g.degree();
    let total = BigUint::from(d).pow(n as u32);
    if total > BigUint::from(guard) {
        let series = count_returns(g, 0, n, n.max(1))?;
        return Ok(ReturningWordSet { gens: g.gens().clone(), n, count: series.exact[n].clone(), words: None });
    }
    let dist = g.distances(0);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn dfs(g: &SchreierGraph, dist: &[u32], v: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) {
        let left = n - cur.len();
        if left == 0 {
            if v == 0 {
                out.push(Word::new(cur.clone()));
            }
            return;
        }
        for l in 0..g.degree() {
            if let Some(w) = g.next(v, l) {
                if (dist[w] as usize) < left {
                    cur.push(l);
                    dfs(g, dist, w, n, cur, out);
                    cur.pop();
                }
            }
        }
    }
    dfs(g, &dist, 0, n, &mut cur, &mut out);
    Ok(ReturningWordSet { gens: g.gens().clone(), n, count: BigUint::from(out.len()), words: Some(out) })
}

impl ReturningWordSet {
    fn listed(&self) -> Result<&[Word]> {
        self.words
            .as_deref()
            .ok_or_else(|| Error::Unsupported("returning-word set is count-only (guard exceeded)".into()))
    }

    /// Distribution of the cyclic segment `(a_t, …, a_{t+k-1})` over the
    /// uniform measure on the set, as `(segment, probability)` in label order.
    pub fn segment_distribution(&self, t: usize, k: usize) -> Result<Vec<(Word, BigRational)>> {
        let words = self.listed()?;
        if self.n == 0 || k > self.n {
            return Err(Error::InvalidParameters(format!("segment length {k} needs 1 ≤ k ≤ n = {}", self.n)));
        }
        if words.is_empty() {
            return Ok(Vec::new());
        }
        let mut freq: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for w in words {
            let seg: Vec<usize> = (0..k).map(|i| w.letters()[(t + i) % self.n]).collect();
            *freq.entry(seg).or_insert(0) += 1;
        }
        let total = BigUint::from(words.len());
        Ok(freq
            .into_iter()
            .map(|(seg, c)| (Word::new(seg), ratio(&BigUint::from(c), &total)))
            .collect())
    }

    /// Probability that the first `|b|` letters equal `b`. Requires `n > 2|b|`
    /// and a nonempty set.
    pub fn prefix_probability(&self, b: &Word) -> Result<BigRational> {
        let words = self.listed()?;
        if b.is_empty() {
            return Ok(BigRational::one());
        }
        if self.n <= 2 * b.len() {
            return Err(Error::InvalidParameters(format!("prefix length {} needs n > {}", b.len(), 2 * b.len())));
        }
        if words.is_empty() {
            return Err(Error::InvalidParameters(format!("no returning words of length {}", self.n)));
        }
        let hits = words.iter().filter(|w| w.letters().starts_with(b.letters())).count();
        Ok(ratio(&BigUint::from(hits), &BigUint::from(words.len())))
    }

    /// Whether every cyclic rotation of every listed word is listed.
    pub fn closed_under_rotation(&self) -> Result<bool> {
        let words = self.listed()?;
        let set: std::collections::HashSet<&Word> = words.iter().collect();
        Ok(words.iter().all(|w| (1..w.len().max(1)).all(|k| set.contains(&w.rotate(k)))))
    }
}

/// `d^{-2k}`, the lower bound for prefix probabilities.
pub fn prefix_bound(d: usize, k: usize) -> BigRational {
    ratio(&BigUint::one(), &BigUint::from(d).pow(2 * k as u32))
}

/// `P((w₁,…,w_l) = a | w ∈ P_{x,x,n})`. The formula is valid on
/// vertex-transitive graphs; finite inputs are checked, truncated inputs are
/// the caller's declaration.
pub fn conditioned_prefix_probability(g: &SchreierGraph, x: usize, a: &Word, n: usize) -> Result<BigRational> {
    a.check(g.gens())?;
    let l = a.len();
    if n < 2 * l {
        return Err(Error::InvalidParameters(format!("need n ≥ 2l, got n={n}, l={l}")));
    }
    if g.is_finite() && !crate::local::is_vertex_transitive(g) {
        return Err(Error::NotVertexTransitive);
    }
    require_radius(g, x, n.div_ceil(2))?;
    let y = match g.walk_endpoint(x, a) {
        Endpoint::Vertex(y) => y,
        Endpoint::Boundary => return Err(Error::BoundaryReached),
    };
    let chain = WalkChain::from_graph(g);
    let mut back = BigUint::zero();
    let mut total = BigUint::zero();
    for_each_row(&chain, x, n, |m, row| {
        if m == n - l {
            back = row[y].clone();
        }
        if m == n {
            total = row[x].clone();
        }
    });
    if total.is_zero() {
        return Err(Error::InvalidParameters(format!("no returning walks of length {n}")));
    }
    Ok(ratio(&back, &total))
}

/// Steps `t` at which the walk of `w` from the root traverses a loop.
pub fn coincidence_index_set(g: &SchreierGraph, w: &Word) -> Result<Vec<usize>> {
    w.check(g.gens())?;
    let mut v = 0;
    let mut out = Vec::new();
    for (t, &l) in w.letters().iter().enumerate() {
        let next = g.next(v, l).ok_or(Error::BoundaryReached)?;
        if next == v {
            out.push(t);
        }
        v = next;
    }
    Ok(out)
}

/// One row of the two-sided comparison `|P_{x,y,n}| ≤ |P_{x,x,n}| ≤ d²|P_{x,x,n-2}|`.
#[derive(Debug, Clone)]
pub struct DifferentRow {
    pub n: usize,
    pub max_offdiagonal: BigUint,
    pub returns: BigUint,
    pub bound: BigUint,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// Checks both inequalities for every even `2 ≤ n ≤ max_n` and every `y`.
/// On truncated graphs `x` must be at distance `≥ max_n` from the boundary
/// so every `y` is counted exactly.
pub fn different_check(g: &SchreierGraph, x: usize, max_n: usize) -> Result<Vec<DifferentRow>> {
    require_radius(g, x, max_n)?;
    let chain = WalkChain::from_graph(g);
    let d2 = BigUint::from(g.degree() * g.degree());
    let mut rows = Vec::new();
    let mut prev_returns = BigUint::one();
    let mut last_even = BigUint::one();
    for_each_row(&chain, x, max_n, |n, row| {
        if n % 2 == 1 {
            return;
        }
        if n == 0 {
            last_even = row[x].clone();
            return;
        }
        prev_returns.clone_from(&last_even);
        let returns = row[x].clone();
        let max_off = row.iter().max().cloned().unwrap_or_default();
        let bound = &d2 * &prev_returns;
        rows.push(DifferentRow {
            n,
            left_holds: max_off <= returns,
            right_holds: returns <= bound,
            max_offdiagonal: max_off,
            returns: returns.clone(),
            bound,
        });
        last_even = returns;
    });
    Ok(rows)
}
