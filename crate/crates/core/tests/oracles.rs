//! Frozen values checked against independent brute-force oracles.

use num::rational::BigRational;
use num::BigUint;

use schreier::builders::{
    complete_ball, cycle, free_ball, from_perm_action, k4, lps_graph, petersen, random_perm_model,
    s3_transpositions_action, stallings_core, trivial_core,
};
use schreier::cycles::{count_cycles, cycles_through, girth};
use schreier::spectral::{markov_spectrum, rho0, rho0_iterative, tree_rho, tree_rho_by_returns, LanczosOptions};
use schreier::walks::{coincidence_index_set, count_returns, count_walks, returning_words};
use schreier::{GenSet, PermAction, SchreierGraph};

/// Walk endpoint by explicit word enumeration.
fn brute_walk_counts(g: &SchreierGraph, x: usize, n: usize) -> Vec<u64> {
    let d = g.degree();
    let mut counts = vec![0u64; g.vertex_count()];
    for code in 0..d.pow(n as u32) {
        let mut v = x;
        let mut c = code;
        for _ in 0..n {
            v = g.next(v, c % d).unwrap();
            c /= d;
        }
        counts[v] += 1;
    }
    counts
}

#[test]
fn tree_returns_by_enumeration() {
    let ball = free_ball(2, 4);
    let brute = brute_walk_counts(&ball, 0, 4);
    assert_eq!(brute[0], 28);
    let table = count_walks(&ball, 0, 3).unwrap();
    let brute3 = brute_walk_counts(&ball, 0, 3);
    for (v, &b) in brute3.iter().enumerate() {
        assert_eq!(table.count(v, 3), &BigUint::from(b));
    }
    let series = count_returns(&ball, 0, 6, 64).unwrap();
    let expect = [1u32, 0, 4, 0, 28, 0, 232];
    for (n, &e) in expect.iter().enumerate() {
        assert_eq!(series.exact[n], BigUint::from(e));
    }
}

#[test]
fn cycle_walks_by_enumeration() {
    let g = cycle(6);
    let table = count_walks(&g, 0, 3).unwrap();
    let antipode = g.distances(0).iter().position(|&d| d == 3).unwrap();
    assert_eq!(table.count(antipode, 3), &BigUint::from(2u32));
    let brute = brute_walk_counts(&g, 0, 5);
    let table = count_walks(&g, 0, 5).unwrap();
    for (v, &b) in brute.iter().enumerate() {
        assert_eq!(table.count(v, 5), &BigUint::from(b));
    }
}

#[test]
fn returning_words_examples() {
    let gens = GenSet::free(2);
    let ball = free_ball(2, 2);
    let two = returning_words(&ball, 2, 1_000_000).unwrap();
    assert_eq!(two.count, BigUint::from(4u32));
    let four = returning_words(&ball, 4, 1_000_000).unwrap();
    assert_eq!(four.count, BigUint::from(28u32));
    let dist = four.segment_distribution(0, 1).unwrap();
    assert!(dist.iter().all(|(_, p)| *p == BigRational::new(1.into(), 4.into())));
    assert_eq!(four.prefix_probability(&gens.parse_word("a").unwrap()).unwrap(), BigRational::new(1.into(), 4.into()));

    // Both a and A traverse the a-loop of Sch(F₂/⟨a⟩).
    let core = stallings_core(&gens, &[gens.parse_word("a").unwrap()]).unwrap();
    let sch = complete_ball(&core, 3);
    let one = returning_words(&sch, 1, 1_000_000).unwrap();
    assert_eq!(one.count, BigUint::from(2u32));
    let w = gens.parse_word("a b a B").unwrap();
    assert_eq!(coincidence_index_set(&sch, &w).unwrap(), vec![0]);
}

/// Cycles by subset enumeration: for each `L`-subset containing its minimum
/// as a fixed start, sum multiplicity products over cyclic orders, halved.
fn brute_cycles(g: &SchreierGraph, len: usize) -> u64 {
    let n = g.vertex_count();
    let mult = |a: usize, b: usize| g.multiplicity(a, b) as u64;
    if len == 1 {
        return (0..n)
            .map(|v| {
                let slots = g.neighbors(v).filter(|&(_, w)| w == v);
                slots.map(|(l, _)| if g.gens().is_involutive(l) { 2 } else { 1 }).sum::<u64>() / 2
            })
            .sum();
    }
    if len == 2 {
        return (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| mult(a, b) * mult(a, b).saturating_sub(1) / 2).sum();
    }
    let mut total = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != len {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let mut rest = verts[1..].to_vec();
        total += permutations_weight(verts[0], &mut rest, 0, &mult);
    }
    total / 2
}

fn permutations_weight(first: usize, rest: &mut [usize], k: usize, mult: &dyn Fn(usize, usize) -> u64) -> u64 {
    if k == rest.len() {
        let mut w = mult(first, rest[0]);
        for i in 0..rest.len() - 1 {
            w *= mult(rest[i], rest[i + 1]);
        }
        return w * mult(rest[rest.len() - 1], first);
    }
    let mut total = 0;
    for i in k..rest.len() {
        rest.swap(k, i);
        total += permutations_weight(first, rest, k + 1, mult);
        rest.swap(k, i);
    }
    total
}

#[test]
fn cycle_counts_match_subset_oracle() {
    let mut graphs = vec![petersen(), k4(), cycle(7), cycle(2), from_perm_action(&s3_transpositions_action(), 0)];
    for seed in 0..6 {
        graphs.push(random_perm_model(2, 6 + seed as usize, seed));
        graphs.push(random_perm_model(1, 9, seed));
    }
    for g in &graphs {
        if g.vertex_count() > 12 {
            continue;
        }
        for len in 1..=8.min(g.vertex_count()) {
            assert_eq!(count_cycles(g, len).unwrap(), brute_cycles(g, len), "n={} L={len}", g.vertex_count());
        }
    }
}

#[test]
fn named_cycle_values() {
    assert_eq!(girth(&petersen()).unwrap(), Some(5));
    assert_eq!(count_cycles(&petersen(), 5).unwrap(), 12);
    assert_eq!(count_cycles(&k4(), 3).unwrap(), 4);
    assert_eq!(girth(&cycle(6)).unwrap(), Some(6));
    let gens = GenSet::free(2);
    let core = stallings_core(&gens, &[gens.parse_word("a").unwrap()]).unwrap();
    let one = stallings_core(&gens, &[gens.parse_word("a").unwrap(), gens.parse_word("b").unwrap()]).unwrap();
    assert!(!core.is_complete());
    assert_eq!(girth(&one.to_graph().unwrap()).unwrap(), Some(1));
}

#[test]
fn girth_agrees_with_first_nonzero_count() {
    for seed in 0..8 {
        let g = random_perm_model(2, 40, seed);
        let gir = girth(&g).unwrap().unwrap();
        let first = (1..=12).find(|&l| count_cycles(&g, l).unwrap() > 0).unwrap();
        assert_eq!(gir, first);
    }
}

#[test]
fn lps_triangles_by_two_counters() {
    let g = lps_graph(17, 13).unwrap();
    assert_eq!(g.vertex_count(), 1092);
    let total = count_cycles(&g, 3).unwrap();
    assert_eq!(cycles_through(&g, 0, 3).unwrap() * 1092, total * 3);
    assert_eq!(total, 1092);
    assert_eq!(girth(&g).unwrap(), Some(3));
}

#[test]
fn closed_form_spectra() {
    let s = markov_spectrum(&k4()).unwrap();
    assert!((s[0] - 1.0).abs() < 1e-12 && s[1..].iter().all(|x| (x + 1.0 / 3.0).abs() < 1e-12));
    // Petersen adjacency eigenvalues 3, 1 (×5), −2 (×4).
    let p = markov_spectrum(&petersen()).unwrap();
    assert!(p[1..6].iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
    assert!(p[6..].iter().all(|x| (x + 2.0 / 3.0).abs() < 1e-12));
    // ⟨(123)⟩ inside S₃ is C₃.
    let act = s3_transpositions_action();
    let gens = act.gens().clone();
    let c = gens.parse_word("x y").unwrap();
    let sub = PermAction::from_generators(GenSet::free_named(&["r"]).unwrap(), &[act.word_permutation(&c)]).unwrap();
    let tri = markov_spectrum(&from_perm_action(&sub, 0)).unwrap();
    assert_eq!(tri.len(), 3);
    assert!((tri[1] + 0.5).abs() < 1e-12 && (tri[2] + 0.5).abs() < 1e-12);
    for n in [5usize, 8, 13] {
        let r = rho0(&cycle(n)).unwrap().rho0;
        let oracle = (1..n).map(|k| (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos().abs()).fold(0.0, f64::max);
        assert!((r - oracle).abs() < 1e-12);
    }
}

#[test]
fn dense_and_iterative_agree() {
    for (n, seed) in [(200, 1u64), (500, 2), (900, 3)] {
        let g = random_perm_model(2, n, seed);
        let a = rho0(&g).unwrap();
        let b = rho0_iterative(&g, &LanczosOptions::default()).unwrap();
        assert!((a.rho0 - b.rho0).abs() < 1e-6);
        assert!(b.converged && b.error_bound <= 1e-8);
    }
}

#[test]
fn tree_rho_matches_return_extrapolation() {
    for d in [3usize, 4, 6] {
        let est = tree_rho_by_returns(d, 400);
        assert!((est.extrapolated - tree_rho(d)).abs() < 1e-4, "d={d}");
        assert!(est.lower_bound < tree_rho(d));
    }
}

#[test]
fn free_cover_matches_materialized_ball() {
    let gens = GenSet::free(2);
    let core = stallings_core(&gens, &[gens.parse_word("a^2").unwrap(), gens.parse_word("b a B").unwrap()]).unwrap();
    let ball = complete_ball(&core, 6);
    let a = count_returns(&ball, 0, 12, 64).unwrap();
    let b = schreier::walks::count_returns_core(&core, 12, 64);
    assert_eq!(a.exact, b.exact);
    let t = schreier::walks::count_returns_core(&trivial_core(&gens), 8, 64);
    assert_eq!(t.exact[8], BigUint::from(2092u32));
}
