//! Batch execution over independent indices.
//!
//! Per-coordinate work in this crate is embarrassingly parallel: every
//! coordinate (and every repair pair) is solved independently and collected
//! in index order, so the parallel and sequential paths are observationally
//! identical. The `parallel` feature swaps the implementation, not the API.

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}
