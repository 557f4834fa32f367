//! Data-parallel plumbing shared by the Monte Carlo engine, the spam scan,
//! and parameter sweeps.
//!
//! Both entry points return results in index order, and every caller reduces
//! the returned vector sequentially, so outputs are bit-identical whether the
//! `parallel` feature is enabled or not and whatever the thread count is.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f` over `0..n`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluates `f` over `0..n` sequentially (the `parallel` feature is off).
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Always-sequential variant; the reference lane for benches and
/// determinism tests.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
