//! Spectra of the Markov operator `M = A/d`, the spectral radius `ρ₀` on
//! zero-sum functions, return-probability estimates of `ρ` for infinite
//! graphs, and operator norms of random group elements.

pub mod dense;
pub mod lanczos;

use nalgebra::DMatrix;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::builders::{from_perm_action, CoreGraph};
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{PermAction, SchreierGraph};
use crate::walks::{self, ReturnSeries};
use crate::words::{GenSet, Word};

pub use lanczos::{extreme_eigenvalues, Extremes, LanczosOptions, SymmetricOperator};

/// Largest graph accepted by the full-spectrum solvers.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dense,
    Iterative,
    ReturnsExtrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Full spectra are computed up to this many vertices.
    pub dense_limit: usize,
    /// Above this size `rho0` uses the dense path only when the slot table
    /// has a narrow band (banded reduction); otherwise Lanczos.
    pub full_dense_limit: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { dense_limit: DENSE_LIMIT, full_dense_limit: 1024, lanczos: LanczosOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub degree: usize,
    pub vertices: usize,
    /// `max |λ|` over the nontrivial spectrum.
    pub rho0: f64,
    /// Largest nontrivial eigenvalue (sign-sensitive).
    pub rho0_nonneg: f64,
    /// `ρ₀` with one eigenvalue `−1` removed when the graph is bipartite.
    pub rho0_excluding_minus_one: f64,
    pub min_eigenvalue: f64,
    pub bipartite: bool,
    pub method: Method,
    pub solver: &'static str,
    pub error_bound: f64,
    pub converged: bool,
    pub iterations: usize,
    pub eigenvalue_sample: Option<Vec<f64>>,
}

/// Markov operator of a finite graph as a sparse symmetric operator.
pub struct MarkovOperator<'a> {
    graph: &'a SchreierGraph,
}

impl<'a> MarkovOperator<'a> {
    pub fn new(graph: &'a SchreierGraph) -> Self {
        MarkovOperator { graph }
    }
}

impl SymmetricOperator for MarkovOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let d = self.graph.degree();
        let slots = self.graph.slots();
        let inv_d = 1.0 / d as f64;
        exec::fill(y, |v| {
            let mut acc = 0.0;
            for &t in &slots[v * d..(v + 1) * d] {
                acc += x[t as usize];
            }
            acc * inv_d
        });
    }
}

fn require_finite(g: &SchreierGraph) -> Result<()> {
    if !g.is_finite() {
        return Err(Error::Unsupported("spectra need a finite, untruncated graph".into()));
    }
    Ok(())
}

/// Half-bandwidth of the adjacency matrix in the canonical numbering.
pub fn bandwidth(g: &SchreierGraph) -> usize {
    (0..g.vertex_count())
        .flat_map(|v| g.neighbors(v).map(move |(_, w)| v.abs_diff(w)))
        .max()
        .unwrap_or(0)
}

fn lower_entries(g: &SchreierGraph) -> Vec<(usize, usize, f64)> {
    let inv_d = 1.0 / g.degree() as f64;
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        for (_, w) in g.neighbors(v) {
            if w <= v {
                out.push((v, w, inv_d));
            }
        }
    }
    out
}

fn narrow_band(n: usize, b: usize) -> bool {
    b * 16 <= n
}

/// All eigenvalues of `M`, in descending order.
pub fn markov_spectrum(g: &SchreierGraph) -> Result<Vec<f64>> {
    markov_spectrum_with(g, &SpectralOptions::default()).map(|(v, _)| v)
}

fn markov_spectrum_with(g: &SchreierGraph, opts: &SpectralOptions) -> Result<(Vec<f64>, &'static str)> {
    require_finite(g)?;
    let n = g.vertex_count();
    if n > opts.dense_limit {
        return Err(Error::TooLargeForDense { n, limit: opts.dense_limit });
    }
    let b = bandwidth(g);
    let (mut vals, solver) = if narrow_band(n, b) {
        (dense::banded_eigenvalues(n, b, &lower_entries(g)), "banded-givens-ql")
    } else {
        let mut m = DMatrix::zeros(n, n);
        for (i, j, v) in lower_entries(g) {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        (dense::dense_eigenvalues(m), "dense-symmetric")
    };
    vals.reverse();
    Ok((vals, solver))
}

fn dense_report(g: &SchreierGraph, opts: &SpectralOptions) -> Result<SpectralReport> {
    let (vals, solver) = markov_spectrum_with(g, opts)?;
    let n = vals.len();
    let bipartite = g.is_bipartite();
    let nontrivial = &vals[1.min(n)..];
    let rho0 = nontrivial.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let rho0_nonneg = nontrivial.first().copied().unwrap_or(0.0);
    let min_eigenvalue = *vals.last().unwrap_or(&1.0);
    let rho0_excluding_minus_one = if bipartite && !nontrivial.is_empty() {
        nontrivial[..nontrivial.len() - 1].iter().map(|x| x.abs()).fold(0.0, f64::max)
    } else {
        rho0
    };
    let error_bound = (n as f64) * 64.0 * f64::EPSILON;
    let sample = if n <= 64 { Some(vals.clone()) } else { None };
    Ok(SpectralReport {
        degree: g.degree(),
        vertices: n,
        rho0: rho0.min(1.0),
        rho0_nonneg,
        rho0_excluding_minus_one: rho0_excluding_minus_one.min(1.0),
        min_eigenvalue,
        bipartite,
        method: Method::Dense,
        solver,
        error_bound,
        converged: true,
        iterations: 0,
        eigenvalue_sample: sample,
    })
}

fn iterative_report(g: &SchreierGraph, opts: &SpectralOptions) -> SpectralReport {
    let n = g.vertex_count();
    let op = MarkovOperator::new(g);
    let c = 1.0 / (n as f64).sqrt();
    let constant = vec![c; n];
    let ex = extreme_eigenvalues(&op, std::slice::from_ref(&constant), &opts.lanczos);
    let bipartite = g.is_bipartite();
    let mut error_bound = ex.error_bound();
    let mut converged = ex.converged;
    let mut iterations = ex.iterations;
    let rho0 = ex.max.abs().max(ex.min.abs()).min(1.0);
    let rho0_excluding_minus_one = if bipartite {
        let colours = g.bipartition().expect("bipartite");
        let sign: Vec<f64> = colours.iter().map(|&k| if k == 0 { c } else { -c }).collect();
        let ex2 = extreme_eigenvalues(&op, &[constant, sign], &opts.lanczos);
        error_bound = error_bound.max(ex2.error_bound());
        converged &= ex2.converged;
        iterations += ex2.iterations;
        ex2.max.abs().max(ex2.min.abs()).min(1.0)
    } else {
        rho0
    };
    SpectralReport {
        degree: g.degree(),
        vertices: n,
        rho0: if bipartite { 1.0 } else { rho0 },
        rho0_nonneg: ex.max,
        rho0_excluding_minus_one,
        min_eigenvalue: ex.min,
        bipartite,
        method: Method::Iterative,
        solver: "lanczos",
        error_bound,
        converged,
        iterations,
        eigenvalue_sample: None,
    }
}

/// `ρ₀` of a finite connected graph: dense for graphs up to
/// `full_dense_limit` vertices or with a narrow band up to `dense_limit`,
/// deflated Lanczos otherwise.
pub fn rho0_with(g: &SchreierGraph, opts: &SpectralOptions) -> Result<SpectralReport> {
    require_finite(g)?;
    let n = g.vertex_count();
    let dense_ok = n <= opts.full_dense_limit || (n <= opts.dense_limit && narrow_band(n, bandwidth(g)));
    if dense_ok {
        dense_report(g, opts)
    } else {
        Ok(iterative_report(g, opts))
    }
}

pub fn rho0(g: &SchreierGraph) -> Result<SpectralReport> {
    rho0_with(g, &SpectralOptions::default())
}

/// Forces the iterative path (for cross-checking the dense path).
pub fn rho0_iterative(g: &SchreierGraph, opts: &LanczosOptions) -> Result<SpectralReport> {
    require_finite(g)?;
    Ok(iterative_report(g, &SpectralOptions { lanczos: *opts, ..SpectralOptions::default() }))
}

/// Return-probability estimate of `ρ` for an infinite graph.
#[derive(Debug, Clone, Serialize)]
pub struct ReturnsEstimate {
    pub degree: usize,
    pub horizon: usize,
    /// `(2n, r_n)` with `r_n = p_{2n}^{1/(2n)}`.
    pub roots: Vec<(usize, f64)>,
    /// `r_n` at the horizon; a lower bound for `ρ`.
    pub lower_bound: f64,
    /// Richardson extrapolation of `sqrt(p_{2n}/p_{2n-2})`, a heuristic.
    pub extrapolated: f64,
    /// Exact check of `r_n ≤ r_{n+1}` over the exact range.
    pub monotone_exact: bool,
    pub exact_horizon: usize,
    pub log_space_used: bool,
    pub method: Method,
}

/// Three-point polynomial extrapolation to `h = 0`.
pub fn richardson(points: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for (i, &(hi, yi)) in points.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(hj, _)) in points.iter().enumerate() {
            if i != j {
                w *= (0.0 - hj) / (hi - hj);
            }
        }
        acc += w * yi;
    }
    acc
}

fn estimate_from_series(series: &ReturnSeries) -> ReturnsEstimate {
    let half = series.horizon / 2;
    let roots: Vec<(usize, f64)> = (1..=half).map(|n| (2 * n, series.root(n))).collect();
    let lower_bound = roots.last().map_or(0.0, |r| r.1);
    let ratio_at = |n: usize| ((series.log_prob[2 * n] - series.log_prob[2 * n - 2]) / 2.0).exp();
    let extrapolated = if half >= 8 {
        let picks = [half, half.div_ceil(2), half.div_ceil(4)];
        let pts: Vec<(f64, f64)> = picks.iter().map(|&n| (1.0 / n as f64, ratio_at(n))).collect();
        richardson(&pts)
    } else if half >= 1 {
        ratio_at(half)
    } else {
        0.0
    };
    ReturnsEstimate {
        degree: series.degree,
        horizon: series.horizon,
        lower_bound,
        extrapolated,
        monotone_exact: walks::first_monotonicity_violation(series, half).is_none(),
        exact_horizon: series.exact_horizon(),
        log_space_used: series.switched_to_log_space(),
        roots,
        method: Method::ReturnsExtrapolation,
    }
}

/// Estimates `ρ` at the root of a truncated graph from return probabilities
/// up to `horizon` steps.
pub fn estimate_rho_returns(g: &SchreierGraph, horizon: usize, exact_limit: usize) -> Result<ReturnsEstimate> {
    let series = walks::count_returns(g, 0, horizon, exact_limit)?;
    Ok(estimate_from_series(&series))
}

/// The same estimate for the infinite Schreier graph given by a free-group core.
pub fn estimate_rho_returns_core(core: &CoreGraph, horizon: usize, exact_limit: usize) -> ReturnsEstimate {
    estimate_from_series(&walks::count_returns_core(core, horizon, exact_limit))
}

fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Spectral radius of the `d`-regular tree, `2√(d−1)/d` (1 for `d ≤ 2`),
/// rounded to 12 significant digits.
pub fn tree_rho(d: usize) -> f64 {
    if d <= 2 {
        return 1.0;
    }
    round12(2.0 * ((d - 1) as f64).sqrt() / d as f64)
}

/// Return-count estimate of the tree's spectral radius, for cross-checking
/// [`tree_rho`]: the tree is the Cayley graph of a free product of `d`
/// copies of `Z/2`.
pub fn tree_rho_by_returns(d: usize, horizon: usize) -> ReturnsEstimate {
    let names: Vec<String> = (0..d).map(|k| format!("s{k}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let gens = GenSet::involutions(&refs).expect("distinct names");
    let core = crate::builders::trivial_core(&gens);
    estimate_rho_returns_core(&core, horizon, walks::DEFAULT_EXACT_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamanujanVerdict {
    pub report: SpectralReport,
    pub threshold: f64,
    /// `ρ₀ ≤ ρ(T_d) + error`.
    pub verdict: bool,
    /// Same with one `−1` removed for bipartite graphs.
    pub verdict_excluding_minus_one: bool,
}

pub fn ramanujan_check(g: &SchreierGraph, opts: &SpectralOptions) -> Result<RamanujanVerdict> {
    let report = rho0_with(g, opts)?;
    let threshold = tree_rho(g.degree());
    let slack = report.error_bound + 1e-12;
    Ok(RamanujanVerdict {
        verdict: report.rho0 <= threshold + slack,
        verdict_excluding_minus_one: report.rho0_excluding_minus_one <= threshold + slack,
        threshold,
        report,
    })
}

/// The support elements as labels of a new generating set `g0, g1, …`, the
/// `k`-th copy of an element paired with the `k`-th copy of its inverse.
fn support_action(act: &PermAction, support: &[Word]) -> Result<PermAction> {
    if support.is_empty() {
        return Err(Error::InvalidParameters("empty support".into()));
    }
    let perms: Vec<Vec<u32>> = support
        .iter()
        .map(|w| {
            w.check(act.gens())?;
            Ok(act.word_permutation(w))
        })
        .collect::<Result<_>>()?;
    let inverse = |p: &[u32]| {
        let mut q = vec![0u32; p.len()];
        for (x, &y) in p.iter().enumerate() {
            q[y as usize] = x as u32;
        }
        q
    };
    let mut inv = vec![usize::MAX; perms.len()];
    for i in 0..perms.len() {
        if inv[i] != usize::MAX {
            continue;
        }
        let target = inverse(&perms[i]);
        if target == perms[i] {
            inv[i] = i;
            continue;
        }
        let j = (i + 1..perms.len())
            .find(|&j| inv[j] == usize::MAX && perms[j] == target)
            .ok_or_else(|| Error::InvalidParameters("support is not closed under inverses".into()))?;
        inv[i] = j;
        inv[j] = i;
    }
    let names = (0..perms.len()).map(|i| format!("g{i}")).collect();
    PermAction::new(GenSet::new(names, inv)?, perms)
}

/// Spectrum (descending) of the averaged permutation operator over `support`.
pub fn operator_spectrum(act: &PermAction, support: &[Word]) -> Result<Vec<f64>> {
    let sub = support_action(act, support)?;
    let n = sub.degree();
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense { n, limit: DENSE_LIMIT });
    }
    let k = support.len() as f64;
    let mut m = DMatrix::zeros(n, n);
    for l in 0..support.len() {
        for x in 0..n {
            m[(x, sub.apply(x, l))] += 1.0 / k;
        }
    }
    let mut vals = dense::dense_eigenvalues(m);
    vals.reverse();
    Ok(vals)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupNorm {
    pub norm: f64,
    pub spectrum: Vec<f64>,
    /// Spectrum of the Cayley graph of the subgroup generated by the support.
    pub subgroup_spectrum: Vec<f64>,
    pub index: usize,
    /// Largest gap between `spectrum` and `index` copies of `subgroup_spectrum`.
    pub multiset_gap: f64,
}

/// Operator norm of the uniform element of `support` (words, so the identity
/// is the empty word) acting on functions on the group of a regular action,
/// with the subgroup-Cayley comparison.
pub fn distribution_operator_norm(act: &PermAction, support: &[Word]) -> Result<SubgroupNorm> {
    if !act.is_regular() {
        return Err(Error::InvalidParameters("operator norms need a regular action".into()));
    }
    let spectrum = operator_spectrum(act, support)?;
    let cayley = from_perm_action(&support_action(act, support)?, 0);
    let subgroup_spectrum = markov_spectrum(&cayley)?;
    let index = act.degree() / cayley.vertex_count();
    let mut copies: Vec<f64> = subgroup_spectrum.iter().flat_map(|&x| std::iter::repeat_n(x, index)).collect();
    copies.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let multiset_gap = if copies.len() == spectrum.len() {
        spectrum.iter().zip(&copies).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let norm = spectrum.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(SubgroupNorm { norm, spectrum, subgroup_spectrum, index, multiset_gap })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductBound {
    pub probability: f64,
    #[serde(skip)]
    pub probability_exact: BigRational,
    pub norms: Vec<f64>,
    pub bound: f64,
    pub holds: bool,
}

/// `P(g₁⋯g_k = e) ≤ Π ‖M(g_i)‖` for independent uniform elements of the
/// given symmetric supports in a regular action, with `P` computed exactly.
pub fn product_return_bound(act: &PermAction, supports: &[Vec<Word>], tol: f64) -> Result<ProductBound> {
    if !act.is_regular() {
        return Err(Error::InvalidParameters("product bounds need a regular action".into()));
    }
    let n = act.degree();
    let mut dist = vec![BigRational::zero(); n];
    dist[0] = BigRational::one();
    let mut norms = Vec::with_capacity(supports.len());
    for s in supports {
        norms.push(distribution_operator_norm(act, s)?.norm);
        let sub = support_action(act, s)?;
        let w = BigRational::new(1.into(), (s.len() as u64).into());
        let mut next = vec![BigRational::zero(); n];
        for x in 0..n {
            if dist[x].is_zero() {
                continue;
            }
            let share = &dist[x] * &w;
            for l in 0..s.len() {
                next[sub.apply(x, l)] += &share;
            }
        }
        dist = next;
    }
    let p = dist[0].clone();
    let probability = p.numer().to_f64().unwrap_or(f64::NAN) / p.denom().to_f64().unwrap_or(f64::NAN);
    let bound: f64 = norms.iter().product();
    Ok(ProductBound { probability, holds: probability <= bound + tol, probability_exact: p, norms, bound })
}
