use alloc::vec;
use alloc::vec::Vec;

/// Schedules independent Monte Carlo runs.
///
/// Implementations may evaluate runs in any order or in parallel. The
/// engine only relies on two guarantees: `map_runs` returns results indexed
/// by run, and `sum_runs` adds integer tallies, so the outcome never depends
/// on scheduling.
pub trait Executor {
    /// `f(run)` for every run in `0..n_runs`, returned in run order.
    fn map_runs<T, F>(&self, n_runs: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;

    /// Element-wise sum of the `width` counters each run adds to.
    fn sum_runs<F>(&self, n_runs: u64, width: usize, f: F) -> Vec<u64>
    where
        F: Fn(u64, &mut [u64]) + Sync + Send;
}

/// Single-threaded executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_runs<T, F>(&self, n_runs: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..n_runs).map(f).collect()
    }

    fn sum_runs<F>(&self, n_runs: u64, width: usize, f: F) -> Vec<u64>
    where
        F: Fn(u64, &mut [u64]) + Sync + Send,
    {
        let mut acc = vec![0u64; width];
        for run in 0..n_runs {
            f(run, &mut acc);
        }
        acc
    }
}
