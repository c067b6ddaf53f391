//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these dispatch to rayon. Without it,
//! or inside [`sequential`], they run on the calling thread. Every helper
//! produces results in index order and reduces in a fixed order, so output is
//! bit-identical whatever the thread count.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Floating-point reductions are split into chunks of this many elements;
/// partial sums are combined left to right.
pub const REDUCTION_CHUNK: usize = 4096;

/// Runs `f` with all helpers forced onto the calling thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

/// Whether helpers called from this thread will use the thread pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Runs `f` inside a pool capped at `threads` workers (0 = library default).
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 1 {
        return sequential(f);
    }
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// Number of worker threads the helpers would use from this thread.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            return rayon::current_num_threads();
        }
    }
    1
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && items.len() > 1 {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Fills `out[i] = f(i)`, possibly in parallel.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && out.len() > 1 {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(i, x)| *x = f(i));
            return;
        }
    }
    for (i, x) in out.iter_mut().enumerate() {
        *x = f(i);
    }
}

/// Applies `f` to fixed-size chunks of `out` (chunk index, chunk).
pub fn for_each_chunk<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && out.len() > chunk {
            use rayon::prelude::*;
            out.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            return;
        }
    }
    for (i, c) in out.chunks_mut(chunk).enumerate() {
        f(i, c);
    }
}

/// Deterministic dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let chunks = a.len().div_ceil(REDUCTION_CHUNK);
    let partial = map_range(chunks, |c| {
        let lo = c * REDUCTION_CHUNK;
        let hi = (lo + REDUCTION_CHUNK).min(a.len());
        a[lo..hi].iter().zip(&b[lo..hi]).map(|(x, y)| x * y).sum::<f64>()
    });
    partial.into_iter().sum()
}

/// Deterministic sum.
pub fn sum(a: &[f64]) -> f64 {
    let chunks = a.len().div_ceil(REDUCTION_CHUNK);
    let partial = map_range(chunks, |c| {
        let lo = c * REDUCTION_CHUNK;
        let hi = (lo + REDUCTION_CHUNK).min(a.len());
        a[lo..hi].iter().sum::<f64>()
    });
    partial.into_iter().sum()
}
