//! Data-parallel driving of many solver runs.
//!
//! Solves, oracle decisions, and generation are pure functions over immutable
//! inputs, so fuzz corpora and benchmark sweeps parallelize trivially. With
//! the `parallel` feature (on by default) these helpers fan out over rayon;
//! without it they degrade to plain loops with identical results. The
//! explicitly sequential twins stay available either way so the two modes can
//! be benchmarked against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::model::{Graph, Request};
use crate::rat::Rat;
use crate::solver::{solve, PathResult};

/// Applies `f` to every input. Output order matches input order no matter
/// how the work is scheduled.
pub fn run<T, U, F>(inputs: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        inputs.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        inputs.iter().map(f).collect()
    }
}

/// Sequential twin of [`run`].
pub fn run_sequential<T, U, F>(inputs: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    inputs.iter().map(f).collect()
}

/// Solves every instance at the same epsilon.
pub fn solve_batch(instances: &[(Graph, Request)], epsilon: &Rat) -> Vec<Result<PathResult>> {
    run(instances, |(graph, request)| solve(graph, request, epsilon))
}

/// Sequential twin of [`solve_batch`].
pub fn solve_batch_sequential(
    instances: &[(Graph, Request)],
    epsilon: &Rat,
) -> Vec<Result<PathResult>> {
    run_sequential(instances, |(graph, request)| solve(graph, request, epsilon))
}
