//! Data-parallel helpers over independent work items.
//!
//! Sifting one signal is inherently sequential, but decompositions of
//! different signals, different strategies on one signal, and the rows of a
//! covariance matrix are independent. With the `parallel` feature these run on
//! the rayon pool; without it [`Execution::Parallel`] degrades to a plain loop.
//! Results are returned in input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::emd::{decompose, Decomposition, SiftConfig, Strategy};
use crate::error::Result;
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn from_flag(parallel: bool) -> Self {
        if parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

pub fn decompose_many(signals: &[Signal], config: &SiftConfig, exec: Execution) -> Vec<Result<Decomposition>> {
    map(exec, signals, |s| decompose(s, config))
}

/// Decomposes one input under several strategies, all reading the same data.
pub fn decompose_strategies(
    signal: &Signal,
    config: &SiftConfig,
    strategies: &[Strategy],
    exec: Execution,
) -> Vec<(Strategy, Result<Decomposition>)> {
    map(exec, strategies, |&s| (s, decompose(signal, &config.with_strategy(s))))
}
