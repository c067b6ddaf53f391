//! Constructors for Schreier graphs.

mod fold;
mod lps;
mod named;
pub mod spec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{PermAction, SchreierGraph, NO_EDGE};
use crate::words::GenSet;

pub use fold::{complete_ball, fold, free_ball, stallings_core, trivial_core, CoreGraph};
pub use lps::{legendre, lps_generators, lps_graph, Quaternion};
pub use named::{c4_klein, cycle, k4, petersen, s3_transpositions, s3_transpositions_action};

/// The orbit graph of `base`, rooted at `base`.
pub fn from_perm_action(act: &PermAction, base: usize) -> SchreierGraph {
    let orbit = act.orbit(base);
    let d = act.gens().degree();
    let mut index = vec![NO_EDGE; act.degree()];
    for (i, &x) in orbit.iter().enumerate() {
        index[x] = i as u32;
    }
    let mut next = vec![NO_EDGE; orbit.len() * d];
    for (i, &x) in orbit.iter().enumerate() {
        for l in 0..d {
            next[i * d + l] = index[act.apply(x, l)];
        }
    }
    SchreierGraph::finite(act.gens().clone(), 0, next).expect("orbit graph of an action is valid")
}

/// `m` independent uniform permutations of `0..n` (seeded Fisher–Yates),
/// acting as the free generators `a, b, ...`.
pub fn random_perm_action(m: usize, n: usize, seed: u64) -> PermAction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let images: Vec<Vec<u32>> = (0..m)
        .map(|_| {
            let mut p: Vec<u32> = (0..n as u32).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    PermAction::from_generators(GenSet::free(m), &images).expect("shuffles are permutations")
}

/// The random `2m`-regular Schreier graph on the orbit of 0. The orbit may
/// be smaller than `n` when the sampled action is not transitive.
pub fn random_perm_model(m: usize, n: usize, seed: u64) -> SchreierGraph {
    from_perm_action(&random_perm_action(m, n, seed), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_orbit_graph() {
        let g = from_perm_action(&PermAction::cyclic(6).unwrap(), 0);
        assert_eq!(g.vertex_count(), 6);
        assert!(g.is_finite());
    }

    #[test]
    fn identity_and_swap_give_loops() {
        let gens = GenSet::free(2);
        let act = PermAction::from_generators(gens, &[vec![0, 1], vec![1, 0]]).unwrap();
        let g = from_perm_action(&act, 0);
        assert_eq!(g.vertex_count(), 2);
        for v in 0..2 {
            assert_eq!(g.next(v, 0), Some(v));
            assert_eq!(g.next(v, 1), Some(v));
            assert_eq!(g.neighbors(v).count(), 4);
        }
    }

    #[test]
    fn random_model_is_deterministic() {
        let a = random_perm_model(2, 100, 7);
        let b = random_perm_model(2, 100, 7);
        assert_eq!(a, b);
        assert!((0..a.vertex_count()).all(|v| a.neighbors(v).count() == 4));
        let one = random_perm_model(2, 1, 3);
        assert_eq!(one.vertex_count(), 1);
        assert!((0..4).all(|l| one.next(0, l) == Some(0)));
    }
}
