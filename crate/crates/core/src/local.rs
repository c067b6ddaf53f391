//! Rooted balls, the ball metric, Benjamini–Schramm statistics and
//! fixed-point densities.
//!
//! The `R`-ball around `v` consists of the vertices within distance `R` of
//! `v` together with every edge-slot of the vertices at distance `< R`.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{One, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::builders::{complete_ball, trivial_core};
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{Labeled, PermAction, SchreierGraph};
use crate::walks::ratio;
use crate::words::{reduced_words, GenSet, Word};

/// Default largest radius compared by [`ball_distance`].
pub const DEFAULT_MAX_RADIUS: u32 = 32;

/// Canonical form of a labeled rooted ball: vertices are named in
/// breadth-first discovery order, slots read in label order; for each vertex
/// at distance `< R` the encoding lists the names of its `d` neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedBall {
    pub radius: u32,
    pub degree: usize,
    pub vertex_count: usize,
    pub encoding: Vec<u32>,
}

impl RootedBall {
    pub fn bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.encoding.len());
        out.extend_from_slice(&self.radius.to_le_bytes());
        out.extend_from_slice(&(self.degree as u32).to_le_bytes());
        for x in &self.encoding {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    /// SHA-256 of [`RootedBall::bytes`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The canonical `r`-ball around `v`. Fails when a vertex at distance `< r`
/// is a boundary vertex.
pub fn ball<G: Labeled + ?Sized>(g: &G, v: usize, r: u32) -> Result<RootedBall> {
    let d = g.gens().degree();
    let mut ids: HashMap<usize, u32> = HashMap::new();
    let mut order = vec![v];
    let mut depth = vec![0u32];
    ids.insert(v, 0);
    let mut encoding = Vec::new();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        let du = depth[head];
        head += 1;
        if du >= r {
            continue;
        }
        if g.is_boundary(u) {
            return Err(Error::InsufficientRadius { required: r, available: du });
        }
        for l in 0..d {
            let w = g
                .step(u, l)
                .ok_or(Error::InsufficientRadius { required: r, available: du })?;
            let id = *ids.entry(w).or_insert_with(|| {
                order.push(w);
                depth.push(du + 1);
                (order.len() - 1) as u32
            });
            encoding.push(id);
        }
    }
    Ok(RootedBall { radius: r, degree: d, vertex_count: order.len(), encoding })
}

/// Label-preserving vertex transitivity of a finite graph: the canonical
/// numbering from every vertex gives the same slot table.
pub fn is_vertex_transitive(g: &SchreierGraph) -> bool {
    let n = g.vertex_count();
    let flags = exec::map_range(n, |v| v == 0 || g.rerooted(v).slots() == g.slots());
    flags.into_iter().all(|b| b)
}

/// Result of comparing two rooted graphs radius by radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallDistance {
    /// Largest radius (up to the cap) with isomorphic balls.
    pub agree_up_to: u32,
    /// True when balls agreed up to the cap, so the distance is only `≤ 1/cap`.
    pub capped: bool,
    pub max_radius: u32,
}

impl BallDistance {
    /// `1 / max(k, 1)` for the agreement radius `k`.
    pub fn value(&self) -> BigRational {
        ratio(&BigUint::one(), &BigUint::from(self.agree_up_to.max(1)))
    }
}

pub fn ball_distance<G1, G2>(g1: &G1, root1: usize, g2: &G2, root2: usize, max_radius: u32) -> Result<BallDistance>
where
    G1: Labeled + ?Sized,
    G2: Labeled + ?Sized,
{
    if g1.gens() != g2.gens() {
        return Err(Error::InvalidParameters("graphs are labeled by different generating sets".into()));
    }
    for k in 1..=max_radius {
        let a = ball(g1, root1, k)?;
        let b = ball(g2, root2, k)?;
        if a != b {
            return Ok(BallDistance { agree_up_to: k - 1, capped: false, max_radius });
        }
    }
    Ok(BallDistance { agree_up_to: max_radius, capped: true, max_radius })
}

/// Frequencies of ball classes under a uniformly random root.
#[derive(Debug, Clone)]
pub struct BallDistribution {
    pub radius: u32,
    pub total: u64,
    /// Ball hash → (number of roots, representative ball).
    pub classes: BTreeMap<String, (u64, RootedBall)>,
}

impl BallDistribution {
    pub fn frequency(&self, hash: &str) -> BigRational {
        let c = self.classes.get(hash).map_or(0, |e| e.0);
        ratio(&BigUint::from(c), &BigUint::from(self.total))
    }

    pub fn frequency_of(&self, b: &RootedBall) -> BigRational {
        self.frequency(&b.hash())
    }

    pub fn frequencies(&self) -> Vec<(String, BigRational)> {
        self.classes.keys().map(|h| (h.clone(), self.frequency(h))).collect()
    }
}

/// Exact ball statistics over all points of a finite graph or action.
pub fn bs_statistics<G: Labeled + Sync + ?Sized>(g: &G, r: u32) -> Result<BallDistribution> {
    let n = g.vertex_count();
    let balls = exec::map_range(n, |v| ball(g, v, r));
    let mut classes: BTreeMap<String, (u64, RootedBall)> = BTreeMap::new();
    for b in balls {
        let b = b?;
        classes.entry(b.hash()).or_insert_with(|| (0, b)).0 += 1;
    }
    Ok(BallDistribution { radius: r, total: n as u64, classes })
}

/// The `r`-ball of the Cayley graph of the free product defined by `gens`
/// (the free group when no label is involutive).
pub fn tree_ball(gens: &GenSet, r: u32) -> RootedBall {
    let g = complete_ball(&trivial_core(gens), r);
    ball(&g, 0, r).expect("root of a completed ball has full radius")
}

pub fn fix_count(act: &PermAction, w: &Word) -> usize {
    act.word_permutation(w)
        .iter()
        .enumerate()
        .filter(|&(x, &y)| x as u32 == y)
        .count()
}

/// `|Fix(w)| / n`.
pub fn fix_density(act: &PermAction, w: &Word) -> Result<BigRational> {
    w.check(act.gens())?;
    Ok(ratio(&BigUint::from(fix_count(act, w)), &BigUint::from(act.degree())))
}

/// Fixed-point counts of every reduced nonempty word of length `≤ max_len`,
/// by depth-first extension of permutation images.
pub fn fix_counts_all(act: &PermAction, max_len: usize) -> Vec<(Word, usize)> {
    let n = act.degree();
    let mut out = Vec::new();
    let start: Vec<u32> = (0..n as u32).collect();
    fn go(act: &PermAction, img: &[u32], word: &mut Vec<usize>, max_len: usize, out: &mut Vec<(Word, usize)>) {
        if word.len() == max_len {
            return;
        }
        let gens = act.gens();
        for l in 0..gens.degree() {
            if let Some(&prev) = word.last() {
                if gens.inv(prev) == l {
                    continue;
                }
            }
            let p = act.perm(l);
            let next: Vec<u32> = img.iter().map(|&y| p[y as usize]).collect();
            word.push(l);
            let fixed = next.iter().enumerate().filter(|&(x, &y)| x as u32 == y).count();
            out.push((Word::new(word.clone()), fixed));
            go(act, &next, word, max_len, out);
            word.pop();
        }
    }
    go(act, &start, &mut Vec::new(), max_len, &mut out);
    out
}

/// Both displayed local-approximation inequalities for one action.
#[derive(Debug, Clone)]
pub struct LekvRow {
    pub n: usize,
    /// `P(G, R, α_R)`: fraction of points whose `R`-ball is the tree ball.
    pub tree_fraction: BigRational,
    /// Fixed-point density of each listed word.
    pub fix_densities: Vec<BigRational>,
    /// `fix(w) ≤ 1 − P` for each listed word.
    pub upper_holds: Vec<bool>,
    /// `Σ fix(w)` over all reduced nonempty words of length `≤ 2R`.
    pub fix_sum: BigRational,
    /// `P ≥ 1 − Σ fix(w)`.
    pub lower_holds: bool,
}

impl LekvRow {
    pub fn all_hold(&self) -> bool {
        self.lower_holds && self.upper_holds.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone)]
pub struct LekvReport {
    pub radius: u32,
    pub words: Vec<Word>,
    pub rows: Vec<LekvRow>,
}

impl LekvReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(LekvRow::all_hold)
    }
}

/// Checks, for each action, that `fix(w) ≤ 1 − P(G,R,α_R)` for each listed
/// word and that `P(G,R,α_R) ≥ 1 − Σ_w fix(w)` with the sum over all reduced
/// nonempty words of length `≤ 2R`. With `words = None` the list is that same
/// complete set.
pub fn local_approx_check(actions: &[PermAction], words: Option<&[Word]>, r: u32) -> Result<LekvReport> {
    let gens = match actions.first() {
        Some(a) => a.gens().clone(),
        None => return Err(Error::InvalidParameters("no actions given".into())),
    };
    if actions.iter().any(|a| a.gens() != &gens) {
        return Err(Error::InvalidParameters("actions use different generating sets".into()));
    }
    let list: Vec<Word> = match words {
        Some(ws) => {
            for w in ws {
                w.check(&gens)?;
                if w.is_empty() || !w.is_reduced(&gens) {
                    return Err(Error::InvalidWord(format!(
                        "`{}` must be reduced and nonempty",
                        w.display(&gens)
                    )));
                }
            }
            ws.to_vec()
        }
        None => (1..=2 * r as usize).flat_map(|k| reduced_words(&gens, k)).collect(),
    };
    let tree = tree_ball(&gens, r);
    let tree_hash = tree.hash();
    let mut rows = Vec::new();
    for act in actions {
        let n = act.degree();
        let dist = bs_statistics(act, r)?;
        let p = dist.frequency(&tree_hash);
        let one_minus_p = BigRational::one() - &p;
        let fix_densities: Vec<BigRational> = list
            .iter()
            .map(|w| ratio(&BigUint::from(fix_count(act, w)), &BigUint::from(n)))
            .collect();
        let upper_holds = fix_densities.iter().map(|f| f <= &one_minus_p).collect();
        let total: usize = fix_counts_all(act, 2 * r as usize).iter().map(|(_, c)| c).sum();
        let fix_sum = ratio(&BigUint::from(total), &BigUint::from(n));
        let lower_holds = p >= BigRational::one() - &fix_sum;
        rows.push(LekvRow { n, tree_fraction: p, fix_densities, upper_holds, fix_sum, lower_holds });
    }
    Ok(LekvReport { radius: r, words: list, rows })
}

/// Total variation distance between two ball distributions.
pub fn total_variation(a: &BallDistribution, b: &BallDistribution) -> BigRational {
    let mut keys: Vec<&String> = a.classes.keys().chain(b.classes.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut acc = BigRational::zero();
    for k in keys {
        let diff = a.frequency(k) - b.frequency(k);
        acc += if diff < BigRational::zero() { -diff } else { diff };
    }
    acc / BigRational::from_integer(2.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{cycle, free_ball, stallings_core};

    #[test]
    fn cycle_balls_are_all_equal() {
        let g = cycle(6);
        let b0 = ball(&g, 0, 1).unwrap();
        assert_eq!(b0.vertex_count, 3);
        for v in 1..6 {
            assert_eq!(ball(&g, v, 1).unwrap(), b0);
        }
        assert_eq!(bs_statistics(&g, 1).unwrap().classes.len(), 1);
        assert!(is_vertex_transitive(&g));
    }

    #[test]
    fn distance_between_cycles() {
        let d = ball_distance(&cycle(6), 0, &cycle(8), 0, 32).unwrap();
        assert_eq!(d.agree_up_to, 2);
        assert_eq!(d.value(), ratio(&1u32.into(), &2u32.into()));
        let same = ball_distance(&cycle(6), 0, &cycle(6), 3, 32).unwrap();
        assert!(same.capped);
    }

    #[test]
    fn loop_separates_from_tree() {
        let g = GenSet::free(2);
        let core = stallings_core(&g, &[g.parse_word("a").unwrap()]).unwrap();
        let sch = complete_ball(&core, 3);
        let tree = free_ball(2, 3);
        assert_ne!(ball(&sch, 0, 1).unwrap(), ball(&tree, 0, 1).unwrap());
        let d = ball_distance(&sch, 0, &tree, 0, 32).unwrap();
        assert_eq!(d.value(), BigRational::one());
        assert!(ball_distance(&tree, 0, &tree, 0, 32).is_err());
    }

    #[test]
    fn fix_density_examples() {
        let act = PermAction::cyclic(6).unwrap();
        let t3 = act.gens().parse_word("t^3").unwrap();
        let t6 = act.gens().parse_word("t^6").unwrap();
        assert!(fix_density(&act, &t3).unwrap().is_zero());
        assert!(fix_density(&act, &t6).unwrap().is_one());
    }

    #[test]
    fn fix_counts_enumerate_reduced_words() {
        let act = PermAction::cyclic(5).unwrap();
        let all = fix_counts_all(&act, 5);
        assert_eq!(all.len(), 10);
        let fixed: Vec<_> = all.iter().filter(|(_, c)| *c > 0).collect();
        assert_eq!(fixed.len(), 2);
    }
}
