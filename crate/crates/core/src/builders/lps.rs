//! The Lubotzky–Phillips–Sarnak Cayley graphs `X^{p,q}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::SchreierGraph;
use crate::words::GenSet;

/// Integer quaternion `a + b i + c j + d k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quaternion {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Quaternion {
    pub fn norm(&self) -> i64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion { a: self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol `(a/q)` for an odd prime `q`: 1, -1 or 0.
pub fn legendre(a: u64, q: u64) -> i32 {
    match pow_mod(a, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// The `p + 1` solutions of `a²+b²+c²+d² = p` with `a` odd positive and
/// `b, c, d` even, in lexicographic order.
pub fn lps_generators(p: i64) -> Vec<Quaternion> {
    let mut out = Vec::new();
    let bound = (p as f64).sqrt() as i64 + 1;
    for a in (1..=bound).step_by(2) {
        for b in (-bound..=bound).filter(|x| x % 2 == 0) {
            for c in (-bound..=bound).filter(|x| x % 2 == 0) {
                for d in (-bound..=bound).filter(|x| x % 2 == 0) {
                    let q = Quaternion { a, b, c, d };
                    if q.norm() == p {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

type Mat = [u32; 4];

fn mat_mul(x: &Mat, y: &Mat, q: u64) -> Mat {
    let m = |i: usize, j: usize| {
        (x[2 * i] as u64 * y[j] as u64 + x[2 * i + 1] as u64 * y[2 + j] as u64) % q
    };
    [m(0, 0) as u32, m(0, 1) as u32, m(1, 0) as u32, m(1, 1) as u32]
}

/// Scales so the first nonzero entry is 1: the lexicographically smallest
/// scalar multiple, used as the identity of a projective class.
fn normalize(x: &Mat, q: u64) -> Mat {
    let lead = *x.iter().find(|&&e| e != 0).expect("invertible matrix is nonzero") as u64;
    let s = pow_mod(lead, q - 2, q);
    [
        (x[0] as u64 * s % q) as u32,
        (x[1] as u64 * s % q) as u32,
        (x[2] as u64 * s % q) as u32,
        (x[3] as u64 * s % q) as u32,
    ]
}

fn residue(v: i64, q: u64) -> u64 {
    v.rem_euclid(q as i64) as u64
}

/// The `(p+1)`-regular graph `X^{p,q}`: the Cayley graph of `PSL₂(q)` when
/// `p` is a square mod `q`, otherwise of `PGL₂(q)` (then bipartite).
pub fn lps_graph(p: u64, q: u64) -> Result<SchreierGraph> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::InvalidParameters(format!("p={p} and q={q} must both be prime")));
    }
    if p == q {
        return Err(Error::InvalidParameters("p and q must differ".into()));
    }
    if p % 4 != 1 || q % 4 != 1 {
        return Err(Error::InvalidParameters(format!("p={p} and q={q} must both be 1 mod 4")));
    }
    if q * q <= 4 * p {
        return Err(Error::InvalidParameters(format!("need q > 2√p, got q={q}, p={p}")));
    }
    if q > 1000 {
        return Err(Error::InvalidParameters(format!("q={q} is beyond the supported size (q ≤ 1000)")));
    }
    let i = (1..q)
        .find(|&x| x * x % q == q - 1)
        .expect("-1 is a square modulo a prime 1 mod 4");
    let quats = lps_generators(p as i64);
    let d = quats.len();
    let mats: Vec<Mat> = quats
        .iter()
        .map(|h| {
            let m = [
                (residue(h.a, q) + residue(h.b, q) * i) % q,
                (residue(h.c, q) + residue(h.d, q) * i) % q,
                (residue(-h.c, q) + residue(h.d, q) * i) % q,
                (residue(h.a, q) + residue(-h.b, q) * i) % q,
            ];
            normalize(&[m[0] as u32, m[1] as u32, m[2] as u32, m[3] as u32], q)
        })
        .collect();
    let inv: Vec<usize> = quats
        .iter()
        .map(|h| quats.iter().position(|x| *x == h.conj()).expect("conjugate is a generator"))
        .collect();
    let names: Vec<String> = (0..d).map(|k| format!("s{k}")).collect();
    let gens = GenSet::new(names, inv)?;

    let identity: Mat = [1, 0, 0, 1];
    let mut elems = vec![identity];
    let mut index: HashMap<Mat, u32> = HashMap::from([(identity, 0)]);
    let mut next: Vec<u32> = Vec::new();
    let mut head = 0;
    while head < elems.len() {
        let g = elems[head];
        head += 1;
        for s in &mats {
            let h = normalize(&mat_mul(&g, s, q), q);
            let id = *index.entry(h).or_insert_with(|| {
                elems.push(h);
                (elems.len() - 1) as u32
            });
            next.push(id);
        }
    }
    SchreierGraph::finite(gens, 0, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        assert_eq!(lps_generators(5).len(), 6);
        assert_eq!(lps_generators(13).len(), 14);
        assert_eq!(lps_generators(17).len(), 18);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(17, 13), 1);
        assert_eq!(legendre(5, 13), -1);
    }

    #[test]
    fn parameter_checks() {
        assert!(lps_graph(5, 3).is_err());
        assert!(lps_graph(5, 5).is_err());
        assert!(lps_graph(7, 13).is_err());
        assert!(lps_graph(15, 13).is_err());
    }

    #[test]
    fn small_lps_sizes() {
        // 13 is a square mod 17; |PSL₂(17)| = 17·288/2.
        let g = lps_graph(13, 17).unwrap();
        assert_eq!(g.vertex_count(), 2448);
        assert_eq!(g.degree(), 14);
        assert!(!g.is_bipartite());
    }
}
