//! Batch versions of the main operations over many quivers.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs
//! on the rayon pool; without it both modes run sequentially. Results are
//! always returned in input order and do not depend on the mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::classify::{classify, Classification};
use crate::divergence::{divergence_witness, DivergenceCertificate};
use crate::error::Result;
use crate::orbit::{random_alternating_sequence, run_orbit, OrbitSummary, SummaryAccumulator};
use crate::quiver::ExchangeTriple;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually uses more than one thread in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn classify_all(quivers: &[ExchangeTriple], exec: Execution) -> Vec<Classification> {
    map(quivers, exec, classify)
}

pub fn witness_all(
    quivers: &[ExchangeTriple],
    target: f64,
    exec: Execution,
) -> Vec<Result<DivergenceCertificate>> {
    map(quivers, exec, |b| divergence_witness(b, target))
}

/// Orbit `n` uses seed `seed + n`; records are summarized as they stream.
pub fn orbit_summaries(
    quivers: &[ExchangeTriple],
    length: usize,
    seed: u64,
    exec: Execution,
) -> Vec<Result<OrbitSummary>> {
    let jobs: Vec<(u64, ExchangeTriple)> = quivers
        .iter()
        .enumerate()
        .map(|(n, b)| (seed.wrapping_add(n as u64), *b))
        .collect();
    map(&jobs, exec, |(s, b)| {
        let seq = random_alternating_sequence(length, *s);
        let mut acc = SummaryAccumulator::default();
        for record in run_orbit(b, &seq) {
            acc.push(&record?);
        }
        acc.finish(*s)
    })
}
