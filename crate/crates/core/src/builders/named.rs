//! Small named graphs used throughout the tests and the CLI.

use crate::graph::{PermAction, SchreierGraph};
use crate::words::GenSet;

use super::from_perm_action;

/// The cycle `C_n` as the Schreier graph of `Z/n` with generator `t`.
pub fn cycle(n: usize) -> SchreierGraph {
    from_perm_action(&PermAction::cyclic(n).expect("n ≥ 1"), 0)
}

/// Petersen graph labeled by a 2-factor `a` (outer pentagon and inner
/// pentagram) and the involutive spoke matching `m`.
pub fn petersen() -> SchreierGraph {
    let gens = GenSet::new(vec!["a".into(), "A".into(), "m".into()], vec![1, 0, 2]).expect("valid");
    let mut a = vec![0u32; 10];
    for i in 0..5 {
        a[i] = ((i + 1) % 5) as u32;
        a[5 + i] = (5 + (i + 2) % 5) as u32;
    }
    let m: Vec<u32> = (0..10).map(|i| ((i + 5) % 10) as u32).collect();
    let act = PermAction::from_generators(gens, &[a, m]).expect("valid");
    from_perm_action(&act, 0)
}

/// `K₄` as the Cayley graph of `Z/2 × Z/2` with the three involutions.
pub fn k4() -> SchreierGraph {
    let gens = GenSet::involutions(&["x", "y", "z"]).expect("valid");
    let flip = |mask: u32| (0..4u32).map(|v| v ^ mask).collect::<Vec<_>>();
    let act = PermAction::from_generators(gens, &[flip(1), flip(2), flip(3)]).expect("valid");
    from_perm_action(&act, 0)
}

/// `C₄` as the Cayley graph of `Z/2 × Z/2` with two involutions.
pub fn c4_klein() -> SchreierGraph {
    let gens = GenSet::involutions(&["x", "y"]).expect("valid");
    let flip = |mask: u32| (0..4u32).map(|v| v ^ mask).collect::<Vec<_>>();
    let act = PermAction::from_generators(gens, &[flip(1), flip(2)]).expect("valid");
    from_perm_action(&act, 0)
}

/// Regular action of `S₃` with the three transpositions as involutive labels.
pub fn s3_transpositions_action() -> PermAction {
    let gens = GenSet::involutions(&["x", "y", "z"]).expect("valid");
    let t12 = vec![1, 0, 2];
    let t13 = vec![2, 1, 0];
    let t23 = vec![0, 2, 1];
    PermAction::regular(gens, &[t12, t13, t23], &[]).expect("valid")
}

/// Cayley graph of `S₃` with respect to all transpositions (`K₃,₃`).
pub fn s3_transpositions() -> SchreierGraph {
    from_perm_action(&s3_transpositions_action(), 0)
}
