//! Full spectra of symmetric matrices: banded Givens reduction to
//! tridiagonal form for narrow bands, nalgebra's dense solver otherwise, and
//! an implicit QL solver for tridiagonal matrices.

use nalgebra::DMatrix;

/// Lower band of a symmetric matrix, `width` subdiagonals stored per column.
struct Band {
    n: usize,
    width: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, width: usize) -> Self {
        Band { n, width, data: vec![0.0; n * (width + 1)] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let off = i - j;
        (off <= self.width).then_some(j * (self.width + 1) + off)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| self.data[k])
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        match self.idx(i, j) {
            Some(k) => self.data[k] = v,
            None => debug_assert!(v.abs() < 1e-300, "fill outside stored band"),
        }
    }

    /// Applies the rotation in the `(p, p+1)` plane chosen to annihilate the
    /// entry `(p+1, j0)`.
    fn rotate_out(&mut self, p: usize, j0: usize) {
        let q = p + 1;
        let a = self.get(p, j0);
        let b = self.get(q, j0);
        if b == 0.0 {
            return;
        }
        let r = a.hypot(b);
        let (c, s) = (a / r, b / r);
        let lo = p.saturating_sub(self.width);
        let hi = (q + self.width).min(self.n - 1);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let x = self.get(p, j);
            let y = self.get(q, j);
            if x == 0.0 && y == 0.0 {
                continue;
            }
            self.set(p, j, c * x + s * y);
            self.set(q, j, -s * x + c * y);
        }
        let (app, aqq, apq) = (self.get(p, p), self.get(q, q), self.get(p, q));
        self.set(p, p, c * c * app + 2.0 * c * s * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * c * s * apq + c * c * aqq);
        self.set(p, q, (c * c - s * s) * apq + c * s * (aqq - app));
        self.set(q, j0, 0.0);
    }
}

/// Eigenvalues (ascending) of the symmetric matrix with the given lower
/// entries `(i, j, value)`, `i ≥ j`, all within half-bandwidth `bandwidth`.
/// Cost `O(n² · bandwidth)`.
pub fn banded_eigenvalues(n: usize, bandwidth: usize, entries: &[(usize, usize, f64)]) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let mut band = Band::new(n, bandwidth + 1);
    for &(i, j, v) in entries {
        debug_assert!(i >= j && i - j <= bandwidth);
        let k = band.idx(i, j).expect("entry inside band");
        band.data[k] += v;
    }
    // Reduce the half-bandwidth one step at a time, chasing each bulge off
    // the end of the matrix.
    for b in (2..=bandwidth).rev() {
        for k in 0..n.saturating_sub(b) {
            let mut p = k + b - 1;
            let mut j0 = k;
            loop {
                band.rotate_out(p, j0);
                // The rotation creates a bulge at (p + 1 + b, p).
                let bulge_row = p + 1 + b;
                if bulge_row >= n || band.get(bulge_row, p) == 0.0 {
                    break;
                }
                j0 = p;
                p = bulge_row - 1;
            }
        }
    }
    let mut diag: Vec<f64> = (0..n).map(|i| band.get(i, i)).collect();
    let mut off: Vec<f64> = (0..n).map(|i| if i + 1 < n { band.get(i + 1, i) } else { 0.0 }).collect();
    tridiagonal_eigen(&mut diag, &mut off, None).expect("QL converges on banded reductions");
    diag.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    diag
}

/// Eigenvalues (ascending) of a dense symmetric matrix.
pub fn dense_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v
}

/// Implicit QL on the tridiagonal matrix with diagonal `d` and off-diagonal
/// `e` (`e[i]` couples `i` and `i+1`; the last entry is ignored). On return
/// `d` holds the eigenvalues, unsorted. If `z` is given it must hold one row
/// of the identity-initialised eigenvector matrix (e.g. the last row) and is
/// updated to that row of the eigenvector matrix.
#[allow(clippy::result_unit_err)]
pub fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<(), ()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, b: usize, seed: u64) -> (Vec<(usize, usize, f64)>, DMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::new();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in j..(j + b + 1).min(n) {
                let v: f64 = rng.random_range(-1.0..1.0);
                entries.push((i, j, v));
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        (entries, m)
    }

    #[test]
    fn banded_matches_dense() {
        for (n, b, seed) in [(1, 0, 1), (2, 1, 2), (7, 2, 3), (30, 3, 4), (40, 5, 5), (25, 24, 6)] {
            let (entries, m) = random_band(n, b, seed);
            let band = banded_eigenvalues(n, b, &entries);
            let dense = dense_eigenvalues(m);
            for (x, y) in band.iter().zip(&dense) {
                assert!((x - y).abs() < 1e-10, "n={n} b={b}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn ql_tracks_eigenvector_row() {
        // Path on 3 vertices: eigenvalues -√2, 0, √2.
        let mut d = vec![0.0; 3];
        let mut e = vec![1.0, 1.0, 0.0];
        let mut z = vec![0.0, 0.0, 1.0];
        tridiagonal_eigen(&mut d, &mut e, Some(&mut z)).unwrap();
        let norm: f64 = z.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let mut s = d.clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((s[0] + 2f64.sqrt()).abs() < 1e-12 && s[1].abs() < 1e-12);
    }
}
