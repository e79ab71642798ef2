//! Execution mode for data-parallel loops.
//!
//! Every parallel loop in the crate is an order-preserving map followed by a
//! sequential merge, so both modes produce bit-identical results.

/// How data-parallel work is scheduled.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled and
    /// falls back to sequential execution otherwise.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Below this many items the parallel mode runs sequentially.
const MIN_PARALLEL_LEN: usize = 32;

pub(crate) fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel && items.len() >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = (exec, MIN_PARALLEL_LEN);
    items.iter().map(f).collect()
}
