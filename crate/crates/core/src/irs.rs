//! Empirical invariant random subgroups, represented by weighted rooted
//! Schreier graphs (the stabilizer of the root point).

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::builders::from_perm_action;
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{PermAction, SchreierGraph};
use crate::local::ball;
use crate::sgf;
use crate::words::GenSet;

/// Samples drawn per independent random stream.
pub const SAMPLE_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Provenance {
    pub source: String,
    pub seed: Option<u64>,
    pub sample_count: usize,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootedSample {
    /// Index into [`IrsEnsemble::graphs`].
    pub graph: usize,
    pub root: usize,
    pub weight: BigRational,
}

#[derive(Debug, Clone)]
pub struct IrsEnsemble {
    pub graphs: Vec<SchreierGraph>,
    pub samples: Vec<RootedSample>,
    pub kind: EnsembleKind,
    pub provenance: Provenance,
}

fn rational(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_json(x: &BigRational) -> Value {
    json!({ "num": x.numer().to_string(), "den": x.denom().to_string() })
}

pub fn rational_f64(x: &BigRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => f64::NAN,
    }
}

/// Orbit graphs of an action together with the vertex of every point.
struct Orbits {
    graphs: Vec<SchreierGraph>,
    /// point → (graph index, vertex).
    place: Vec<(usize, usize)>,
}

fn orbits(act: &PermAction) -> Orbits {
    let n = act.degree();
    let d = act.gens().degree();
    let mut place = vec![(usize::MAX, 0); n];
    let mut graphs = Vec::new();
    for base in 0..n {
        if place[base].0 != usize::MAX {
            continue;
        }
        let g = from_perm_action(act, base);
        let gi = graphs.len();
        // Simultaneous BFS matches points to canonical vertices.
        place[base] = (gi, 0);
        let mut queue = std::collections::VecDeque::from([(base, 0usize)]);
        while let Some((x, v)) = queue.pop_front() {
            for l in 0..d {
                let y = act.apply(x, l);
                if place[y].0 == usize::MAX {
                    let w = g.next(v, l).expect("orbit graphs are complete");
                    place[y] = (gi, w);
                    queue.push_back((y, w));
                }
            }
        }
        graphs.push(g);
    }
    Orbits { graphs, place }
}

impl IrsEnsemble {
    pub fn gens(&self) -> &GenSet {
        self.graphs[0].gens()
    }

    pub fn weight_sum(&self) -> BigRational {
        self.samples.iter().fold(BigRational::zero(), |acc, s| acc + &s.weight)
    }

    /// Point mass at one rooted graph.
    pub fn point_mass(g: SchreierGraph, root: usize, source: &str) -> IrsEnsemble {
        IrsEnsemble {
            graphs: vec![g],
            samples: vec![RootedSample { graph: 0, root, weight: BigRational::one() }],
            kind: EnsembleKind::Exact,
            provenance: Provenance { source: source.into(), seed: None, sample_count: 1, threads: 1 },
        }
    }

    /// Every vertex of a finite graph as root with weight `1/n`.
    pub fn uniform_roots(g: SchreierGraph, source: &str) -> IrsEnsemble {
        let n = g.vertex_count();
        IrsEnsemble {
            graphs: vec![g],
            samples: (0..n).map(|v| RootedSample { graph: 0, root: v, weight: rational(1, n) }).collect(),
            kind: EnsembleKind::Exact,
            provenance: Provenance { source: source.into(), seed: None, sample_count: n, threads: 1 },
        }
    }

    /// Distribution of rooted `r`-ball classes, optionally after moving every
    /// root along `label`.
    pub fn ball_distribution(&self, r: u32, moved: Option<usize>) -> Result<WeightedBalls> {
        let hashes = exec::map_slice(&self.samples, |s| -> Result<String> {
            let g = &self.graphs[s.graph];
            let root = match moved {
                None => s.root,
                Some(l) => g.next(s.root, l).ok_or(Error::BoundaryReached)?,
            };
            Ok(ball(g, root, r)?.hash())
        });
        let mut classes = BTreeMap::new();
        for (h, s) in hashes.into_iter().zip(&self.samples) {
            *classes.entry(h?).or_insert_with(BigRational::zero) += &s.weight;
        }
        Ok(WeightedBalls { radius: r, classes })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "provenance": self.provenance,
            "graphs": self.graphs.iter().map(sgf::serialize).collect::<Vec<_>>(),
            "samples": self.samples.iter().map(|s| json!({
                "graph": s.graph,
                "root": s.root,
                "weight": rational_json(&s.weight),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Ball-class hash → probability.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBalls {
    pub radius: u32,
    pub classes: BTreeMap<String, BigRational>,
}

impl WeightedBalls {
    pub fn probability(&self, hash: &str) -> BigRational {
        self.classes.get(hash).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_variation(&self, other: &WeightedBalls) -> BigRational {
        let mut acc = BigRational::zero();
        for k in self.classes.keys().chain(other.classes.keys().filter(|k| !self.classes.contains_key(*k))) {
            let diff = self.probability(k) - other.probability(k);
            acc += if diff < BigRational::zero() { -diff } else { diff };
        }
        acc / BigRational::from_integer(2.into())
    }
}

/// Stabilizers of `count` independent uniform points. Chunk `c` of
/// [`SAMPLE_CHUNK`] samples draws from `ChaCha8Rng::seed_from_u64(seed)` on
/// stream `c`, so the result does not depend on the thread count.
pub fn stabilizer_sample(act: &PermAction, count: usize, seed: u64) -> Result<IrsEnsemble> {
    if count == 0 {
        return Err(Error::InvalidParameters("count must be at least 1".into()));
    }
    let n = act.degree();
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let points: Vec<Vec<usize>> = exec::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
        (0..len).map(|_| rng.random_range(0..n)).collect()
    });
    let mut hits = vec![0usize; n];
    for x in points.into_iter().flatten() {
        hits[x] += 1;
    }
    let orbit = orbits(act);
    let mut samples = Vec::new();
    for (x, &k) in hits.iter().enumerate() {
        if k > 0 {
            let (graph, root) = orbit.place[x];
            samples.push(RootedSample { graph, root, weight: rational(k, count) });
        }
    }
    Ok(compact(IrsEnsemble {
        graphs: orbit.graphs,
        samples,
        kind: EnsembleKind::Sampled,
        provenance: Provenance {
            source: format!("action on {n} points"),
            seed: Some(seed),
            sample_count: count,
            threads: exec::current_threads(),
        },
    }))
}

/// The exact ensemble of stabilizers of a uniform point.
pub fn uniform_conjugate(act: &PermAction) -> IrsEnsemble {
    let n = act.degree();
    let orbit = orbits(act);
    let samples = (0..n)
        .map(|x| {
            let (graph, root) = orbit.place[x];
            RootedSample { graph, root, weight: rational(1, n) }
        })
        .collect();
    IrsEnsemble {
        graphs: orbit.graphs,
        samples,
        kind: EnsembleKind::Exact,
        provenance: Provenance {
            source: format!("action on {n} points"),
            seed: None,
            sample_count: n,
            threads: 1,
        },
    }
}

/// Drops orbit graphs that no sample uses.
fn compact(mut e: IrsEnsemble) -> IrsEnsemble {
    let mut remap = vec![usize::MAX; e.graphs.len()];
    let mut kept = Vec::new();
    for s in &mut e.samples {
        if remap[s.graph] == usize::MAX {
            remap[s.graph] = kept.len();
            kept.push(s.graph);
        }
        s.graph = remap[s.graph];
    }
    let mut graphs: Vec<Option<SchreierGraph>> = e.graphs.into_iter().map(Some).collect();
    e.graphs = kept.iter().map(|&i| graphs[i].take().expect("kept once")).collect();
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceRow {
    pub label: usize,
    pub name: String,
    pub tv: BigRational,
    /// Monte Carlo scale `sqrt(classes / samples)` for sampled ensembles.
    pub mc_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub radius: u32,
    pub kind: EnsembleKind,
    pub rows: Vec<InvarianceRow>,
}

impl InvarianceReport {
    pub fn exactly_invariant(&self) -> bool {
        self.rows.iter().all(|r| r.tv.is_zero())
    }

    pub fn max_tv(&self) -> f64 {
        self.rows.iter().map(|r| rational_f64(&r.tv)).fold(0.0, f64::max)
    }
}

/// Total variation between the `r`-ball distribution and the distribution
/// after moving every root along each generator.
pub fn invariance_diagnostic(e: &IrsEnsemble, r: u32) -> Result<InvarianceReport> {
    let base = e.ball_distribution(r, None)?;
    let mut rows = Vec::new();
    for l in 0..e.gens().degree() {
        let moved = e.ball_distribution(r, Some(l))?;
        let mc_radius = match e.kind {
            EnsembleKind::Exact => None,
            EnsembleKind::Sampled => {
                let k = base.classes.len().max(moved.classes.len()) as f64;
                Some((k / e.provenance.sample_count as f64).sqrt())
            }
        };
        rows.push(InvarianceRow { label: l, name: e.gens().name(l).to_string(), tv: base.total_variation(&moved), mc_radius });
    }
    Ok(InvarianceReport { radius: r, kind: e.kind, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub radius: u32,
    /// TV between ensembles `i` and `i+1`.
    pub consecutive: Vec<BigRational>,
    /// TV of each ensemble against the limit, when one is given.
    pub to_limit: Option<Vec<BigRational>>,
    /// Whether the distances to the limit never increase.
    pub nonincreasing: Option<bool>,
}

pub fn weak_convergence_diagnostic(seq: &[IrsEnsemble], limit: Option<&IrsEnsemble>, r: u32) -> Result<ConvergenceReport> {
    let gens = seq.first().map(|e| e.gens()).or(limit.map(|e| e.gens()));
    for e in seq.iter().chain(limit) {
        if Some(e.gens()) != gens {
            return Err(Error::InvalidGenSet("ensembles use different generating sets".into()));
        }
    }
    let dists = seq.iter().map(|e| e.ball_distribution(r, None)).collect::<Result<Vec<_>>>()?;
    let consecutive = dists.windows(2).map(|w| w[0].total_variation(&w[1])).collect();
    let to_limit = match limit {
        Some(l) => {
            let ld = l.ball_distribution(r, None)?;
            Some(dists.iter().map(|d| d.total_variation(&ld)).collect::<Vec<_>>())
        }
        None => None,
    };
    let nonincreasing = to_limit.as_ref().map(|t: &Vec<BigRational>| t.windows(2).all(|w| w[1] <= w[0]));
    Ok(ConvergenceReport { radius: r, consecutive, to_limit, nonincreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{cycle, random_perm_action};
    use crate::local::bs_statistics;

    #[test]
    fn uniform_conjugate_of_cycle() {
        let act = PermAction::cyclic(6).unwrap();
        let e = uniform_conjugate(&act);
        assert_eq!(e.samples.len(), 6);
        assert_eq!(e.graphs.len(), 1);
        assert_eq!(e.weight_sum(), BigRational::one());
        let d = e.ball_distribution(2, None).unwrap();
        assert_eq!(d.classes.len(), 1);
        assert!(invariance_diagnostic(&e, 2).unwrap().exactly_invariant());
    }

    #[test]
    fn matches_ball_statistics() {
        let act = random_perm_action(2, 50, 4);
        let e = uniform_conjugate(&act);
        let d = e.ball_distribution(2, None).unwrap();
        if e.graphs.len() == 1 {
            let bs = bs_statistics(&e.graphs[0], 2).unwrap();
            for (h, (_, _)) in &bs.classes {
                assert_eq!(d.probability(h), bs.frequency(h));
            }
        }
    }

    #[test]
    fn sampling_is_thread_independent() {
        let act = random_perm_action(2, 300, 1);
        let a = stabilizer_sample(&act, 3000, 9).unwrap();
        let b = exec::sequential(|| stabilizer_sample(&act, 3000, 9).unwrap());
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.weight_sum(), BigRational::one());
    }

    #[test]
    fn special_root_is_not_invariant() {
        let e = IrsEnsemble::point_mass(cycle(5), 0, "c5");
        assert!(invariance_diagnostic(&e, 1).unwrap().exactly_invariant());
        let act = PermAction::from_generators(GenSet::free(1), &[vec![1, 2, 0, 3]]).unwrap();
        let e = uniform_conjugate(&act);
        assert_eq!(e.graphs.len(), 2);
        assert!(invariance_diagnostic(&e, 2).unwrap().exactly_invariant());
    }

    #[test]
    fn fixed_special_root_is_detected() {
        // a = (0 1 2), b = (1 2): only vertex 0 carries a b-loop.
        let act = PermAction::from_generators(GenSet::free(2), &[vec![1, 2, 0], vec![0, 2, 1]]).unwrap();
        let g = from_perm_action(&act, 0);
        let e = IrsEnsemble::point_mass(g, 0, "special root");
        let rep = invariance_diagnostic(&e, 1).unwrap();
        assert!(rep.rows[0].tv > BigRational::zero());
        assert!(invariance_diagnostic(&uniform_conjugate(&act), 1).unwrap().exactly_invariant());
    }
}
