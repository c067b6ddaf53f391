//! Lanczos iteration with full reorthogonalisation for the extreme
//! eigenvalues of a symmetric operator restricted to the orthogonal
//! complement of a few known eigenvectors.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::tridiagonal_eigen;
use crate::exec;

/// A symmetric linear operator on `R^dim`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Convergence when the Ritz residual `|β_k s_k|` drops below this.
    pub tol: f64,
    /// Total matrix-vector products across restarts.
    pub max_iterations: usize,
    /// Krylov basis size before an explicit restart.
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-9, max_iterations: 10_000, krylov_dim: 400, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub max: f64,
    pub min: f64,
    pub max_residual: f64,
    pub min_residual: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

impl Extremes {
    pub fn error_bound(&self) -> f64 {
        self.max_residual.max(self.min_residual).max(1e-14)
    }
}

fn project_out(w: &mut [f64], basis: &[Vec<f64>]) {
    if basis.is_empty() {
        return;
    }
    let coeffs = exec::map_slice(basis, |q| exec::dot(q, w));
    exec::for_each_chunk(w, exec::REDUCTION_CHUNK, |c, chunk| {
        let lo = c * exec::REDUCTION_CHUNK;
        for (q, &a) in basis.iter().zip(&coeffs) {
            let len = chunk.len();
            for (x, &y) in chunk.iter_mut().zip(&q[lo..lo + len]) {
                *x -= a * y;
            }
        }
    });
}

fn normalize(w: &mut [f64]) -> f64 {
    let norm = exec::dot(w, w).sqrt();
    if norm > 0.0 {
        for x in w.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Largest and smallest eigenvalues of `op` on the orthogonal complement of
/// the orthonormal vectors `deflate`.
pub fn extreme_eigenvalues<O: SymmetricOperator>(op: &O, deflate: &[Vec<f64>], opts: &LanczosOptions) -> Extremes {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    project_out(&mut start, deflate);
    project_out(&mut start, deflate);
    if normalize(&mut start) == 0.0 {
        return Extremes {
            max: 0.0,
            min: 0.0,
            max_residual: 0.0,
            min_residual: 0.0,
            iterations: 0,
            restarts: 0,
            converged: true,
        };
    }
    let room = n.saturating_sub(deflate.len()).max(1);
    let kmax = opts.krylov_dim.min(room).max(1);
    let mut total = 0;
    let mut restarts = 0;
    let mut best = Extremes {
        max: f64::NEG_INFINITY,
        min: f64::INFINITY,
        max_residual: f64::INFINITY,
        min_residual: f64::INFINITY,
        iterations: 0,
        restarts: 0,
        converged: false,
    };
    loop {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];
        let mut exhausted = false;
        let mut current = best;
        for j in 0..kmax {
            op.apply(&basis[j], &mut w);
            total += 1;
            project_out(&mut w, deflate);
            let a = exec::dot(&basis[j], &w);
            alpha.push(a);
            // Two passes of classical Gram–Schmidt against the whole basis.
            project_out(&mut w, &basis);
            project_out(&mut w, &basis);
            project_out(&mut w, deflate);
            let b = exec::dot(&w, &w).sqrt();
            beta.push(b);
            let k = j + 1;
            exhausted = b < 1e-12 || k == room;
            let check = exhausted || k == kmax || k % 5 == 0 || total >= opts.max_iterations;
            if check {
                current = ritz_extremes(&alpha, &beta, total, restarts);
                if current.converged_at(opts.tol) || exhausted {
                    current.converged = true;
                    return current;
                }
            }
            if total >= opts.max_iterations {
                current.converged = false;
                return current;
            }
            if k == kmax {
                break;
            }
            let next: Vec<f64> = w.iter().map(|x| x / b).collect();
            basis.push(next);
        }
        if exhausted {
            return current;
        }
        // Restart from the sum of the two extreme Ritz vectors.
        restarts += 1;
        best = current;
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (mut imax, mut imin) = (0, 0);
        for i in 0..k {
            if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                imax = i;
            }
            if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                imin = i;
            }
        }
        let mut next = vec![0.0; n];
        exec::for_each_chunk(&mut next, exec::REDUCTION_CHUNK, |c, chunk| {
            let lo = c * exec::REDUCTION_CHUNK;
            let len = chunk.len();
            for (i, q) in basis.iter().enumerate() {
                let a = eig.eigenvectors[(i, imax)] + eig.eigenvectors[(i, imin)];
                for (x, &y) in chunk.iter_mut().zip(&q[lo..lo + len]) {
                    *x += a * y;
                }
            }
        });
        project_out(&mut next, deflate);
        if normalize(&mut next) == 0.0 {
            return current;
        }
        start = next;
    }
}

impl Extremes {
    fn converged_at(&self, tol: f64) -> bool {
        self.max_residual < tol && self.min_residual < tol
    }
}

fn ritz_extremes(alpha: &[f64], beta: &[f64], iterations: usize, restarts: usize) -> Extremes {
    let k = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = beta.to_vec();
    let mut z = vec![0.0; k];
    z[k - 1] = 1.0;
    if tridiagonal_eigen(&mut d, &mut e, Some(&mut z)).is_err() {
        return Extremes {
            max: f64::NAN,
            min: f64::NAN,
            max_residual: f64::INFINITY,
            min_residual: f64::INFINITY,
            iterations,
            restarts,
            converged: false,
        };
    }
    let last_beta = beta[k - 1];
    let (mut imax, mut imin) = (0, 0);
    for i in 0..k {
        if d[i] > d[imax] {
            imax = i;
        }
        if d[i] < d[imin] {
            imin = i;
        }
    }
    Extremes {
        max: d[imax],
        min: d[imin],
        max_residual: (last_beta * z[imax]).abs(),
        min_residual: (last_beta * z[imin]).abs(),
        iterations,
        restarts,
        converged: false,
    }
}
