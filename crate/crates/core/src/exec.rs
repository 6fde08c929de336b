//! Data-parallel map helpers with a sequential fallback.
//!
//! All parallel execution in the crate funnels through `map_range`: work is
//! split by index, outputs are collected in index order, and any reduction
//! happens sequentially afterwards, so results are identical with and without
//! the `parallel` feature and across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every index in `0..n` and returns outputs in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Applies `f` to every index in `0..n` and returns outputs in index order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}
