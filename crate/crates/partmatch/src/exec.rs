use partmatch_core::simulate::Executor;
use rayon::prelude::*;

/// Work-stealing executor on the current rayon pool.
///
/// Results are identical to [`partmatch_core::simulate::Sequential`]:
/// `map_runs` collects in run order and `sum_runs` only adds integers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map_runs<T, F>(&self, n_runs: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..n_runs as usize).into_par_iter().map(|r| f(r as u64)).collect()
    }

    fn sum_runs<F>(&self, n_runs: u64, width: usize, f: F) -> Vec<u64>
    where
        F: Fn(u64, &mut [u64]) + Sync + Send,
    {
        (0..n_runs as usize)
            .into_par_iter()
            .with_min_len(64)
            .fold(
                || vec![0u64; width],
                |mut acc, r| {
                    f(r as u64, &mut acc);
                    acc
                },
            )
            .reduce(
                || vec![0u64; width],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, rayon::ThreadPoolBuildError> {
    match threads {
        None => Ok(f()),
        Some(t) => Ok(rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(f)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use partmatch_core::simulate::Sequential;

    #[test]
    fn agrees_with_sequential() {
        let f = |run: u64, acc: &mut [u64]| {
            acc[(run % 3) as usize] += run;
            acc[3] += 1;
        };
        for threads in [1, 2, 8] {
            let (sum, map) =
                with_threads(Some(threads), || (Rayon.sum_runs(1001, 4, f), Rayon.map_runs(257, |r| r * r))).unwrap();
            assert_eq!(sum, Sequential.sum_runs(1001, 4, f));
            assert_eq!(map, Sequential.map_runs(257, |r| r * r));
        }
    }

    #[test]
    fn zero_runs() {
        assert_eq!(Rayon.sum_runs(0, 2, |_, _| {}), vec![0, 0]);
        assert!(Rayon.map_runs(0, |r| r).is_empty());
    }
}
