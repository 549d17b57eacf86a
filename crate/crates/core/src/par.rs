//! Thin switch between rayon and sequential iteration.
//!
//! Every parallel region here partitions work into independent items whose
//! arithmetic order does not depend on the schedule, so results are bitwise
//! identical with or without the `parallel` feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(j, column)` for every `rows`-long chunk of `data`.
pub(crate) fn for_each_column<F>(data: &mut [f64], rows: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(rows)
        .enumerate()
        .for_each(|(j, col)| f(j, col));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(rows)
        .enumerate()
        .for_each(|(j, col)| f(j, col));
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Whether this build runs parallel regions on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Short name of the active backend.
pub const fn backend() -> &'static str {
    if is_parallel() {
        "parallel"
    } else {
        "sequential"
    }
}

/// Runs `f` with parallel regions limited to `threads` workers.
///
/// `threads = 0` keeps the global pool. Without the `parallel` feature this
/// just calls `f`.
pub fn with_threads<T, F>(threads: usize, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    #[cfg(feature = "parallel")]
    {
        if threads > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                return pool.install(f);
            }
        }
        f()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
