//! Data-parallel evaluation over independent instances.
//!
//! With the `parallel` feature each item runs on the rayon pool; without it,
//! or when `parallel` is false, items run in order on the calling thread.
//! Solvers themselves are always sequential. `MGCBS_WORKERS` caps the pool
//! size.

use std::time::Duration;

use crate::algorithm::{Algorithm, RunReport};
use crate::error::SearchError;
use crate::graph::{Graph, Instance};

pub const WORKERS_ENV: &str = "MGCBS_WORKERS";

pub fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Maps `f` over `items`, preserving order.
pub fn run_batch<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        let run = || items.par_iter().map(&f).collect();
        return match worker_count().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
            Some(pool) => pool.install(run),
            None => run(),
        };
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Solves every instance with one algorithm.
pub fn solve_batch(
    graph: &Graph,
    instances: &[Instance],
    algorithm: Algorithm,
    budget: Duration,
    parallel: bool,
) -> Vec<Result<RunReport, SearchError>> {
    run_batch(instances, parallel, |inst| algorithm.solve(graph, inst, budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let xs: Vec<u64> = (0..200).collect();
        let seq = run_batch(&xs, false, |x| x * x);
        let par = run_batch(&xs, true, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[13], 169);
    }
}
