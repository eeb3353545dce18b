//! Ensemble execution of independent simulation runs.
//!
//! Each run owns its own noise stream (seed = base seed + run index), so
//! runs are embarrassingly parallel. With the `parallel` feature (on by
//! default) runs are dispatched through rayon; without it the same code
//! runs sequentially.

use crate::error::Result;

/// Run `job(i)` for `i` in `0..n_runs` and collect the results in run
/// order. Fails fast on the first error.
#[cfg(feature = "parallel")]
pub fn run_indexed<T, F>(n_runs: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n_runs).into_par_iter().map(job).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_indexed<T, F>(n_runs: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    run_indexed_sequential(n_runs, job)
}

/// Sequential reference path; also the comparison baseline for benches.
pub fn run_indexed_sequential<T, F>(n_runs: usize, job: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    (0..n_runs).map(job).collect()
}

/// Cap the rayon worker count. No-op without the `parallel` feature or
/// when `jobs` is 0 (auto).
pub fn configure_jobs(jobs: usize) {
    #[cfg(feature = "parallel")]
    if jobs > 0 {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn results_arrive_in_run_order() {
        let out = run_indexed(32, |i| Ok(i * i)).unwrap();
        assert_eq!(out, (0..32).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let par = run_indexed(16, |i| Ok(i as f64 * 1.5)).unwrap();
        let seq = run_indexed_sequential(16, |i| Ok(i as f64 * 1.5)).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn errors_propagate() {
        let out: Result<Vec<usize>> = run_indexed(8, |i| {
            if i == 3 {
                Err(Error::EmptyInput)
            } else {
                Ok(i)
            }
        });
        assert!(out.is_err());
    }
}
