//! Data-parallel helpers with a sequential fallback.
//!
//! With the `rayon` feature enabled, [`Execution::Parallel`] partitions work
//! across the rayon pool; without it every call runs on the current thread.
//! Results are identical in both modes.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "rayon") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether work will actually be spread over multiple threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "rayon") && self == Execution::Parallel
    }
}

/// Threads a parallel call can use.
pub fn worker_count() -> usize {
    #[cfg(feature = "rayon")]
    return rayon::current_num_threads();
    #[cfg(not(feature = "rayon"))]
    1
}

/// Chunk size for range partitioning; large enough that per-chunk overhead
/// disappears next to a few million modular evaluations.
#[cfg(feature = "rayon")]
const CHUNK: u64 = 1 << 14;

/// `true` iff `pred` holds for every value in `range`.
pub fn all_in_range<F>(exec: Execution, range: Range<u64>, pred: F) -> bool
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "rayon")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        let (start, end) = (range.start, range.end);
        let chunks = end.saturating_sub(start).div_ceil(CHUNK);
        return (0..chunks).into_par_iter().all(|c| {
            let lo = start + c * CHUNK;
            let hi = (lo + CHUNK).min(end);
            (lo..hi).all(&pred)
        });
    }
    let _ = exec;
    range.into_iter().all(pred)
}

/// `items.iter().map(f).collect()`, in parallel when requested.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "rayon")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// `range.map(f).collect()`, in parallel when requested.
pub fn map_range<R, F>(exec: Execution, range: Range<u64>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    #[cfg(feature = "rayon")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}
