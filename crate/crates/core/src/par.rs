//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature the map runs on the current rayon pool;
//! without it, sequentially. Results always come back in input order, so
//! reductions over them do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Whether this build evaluates work items concurrently.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
