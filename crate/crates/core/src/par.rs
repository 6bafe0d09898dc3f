//! Data-parallel helpers with a sequential fallback.
//!
//! All reductions built on top of these helpers combine with `max`, which is
//! order independent, so results do not depend on the thread schedule.

/// Execution strategy for the embarrassingly parallel scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is off.
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

/// Evaluates `f` on `0..n` and returns the results in index order.
pub fn map_indices<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Runs two closures, concurrently when allowed.
pub fn join<A, B, RA, RB>(exec: Exec, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => rayon::join(a, b),
        _ => (a(), b()),
    }
}
