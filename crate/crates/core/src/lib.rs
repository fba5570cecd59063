//! Mutation of rank-3 quivers with real weights.
//!
//! A quiver is stored as the signed upper triangle `(b12, b23, b13)` of its
//! skew-symmetric exchange matrix. On top of [`mutate`] the crate provides:
//!
//! * [`classify`]: whether the mutation class is bounded, decided from the
//!   largest weight and the Markov constant of one representative;
//! * [`divergence_witness`]: a certified mutation sequence driving the norm
//!   past a target for unbounded classes;
//! * seeded random orbits with CSV, JSON and SVG export;
//! * hyperbolic and spherical realizations used to cross-check mutation.
//!
//! ```
//! use qmut_core::{classify, divergence_witness, ExchangeTriple};
//!
//! let markov = ExchangeTriple::cyclic(2.0, 2.0, 2.0)?;
//! assert!(classify(&markov).bounded);
//!
//! let b = ExchangeTriple::cyclic(2.0, 2.0, 0.5)?;
//! let cert = divergence_witness(&b, 1e6)?;
//! cert.verify(&b)?;
//! assert!(cert.achieved_norm >= 1e6);
//! # Ok::<(), qmut_core::Error>(())
//! ```

pub mod appendix;
pub mod classify;
pub mod divergence;
mod error;
pub mod geometry;
pub mod orbit;
pub mod plot;
pub mod quiver;
pub mod sweep;

pub use classify::{classify, is_markov_quiver, norm_bound, Classification, Reason};
pub use divergence::{
    acyclic_to_cyclic, alternating_blowup, divergence_witness, mu_star_blowup, mu_star_step,
    sharpness_probe, DivergenceCertificate, ProbeOutcome, ProbeReport, Strategy,
};
pub use error::{Error, Result};
pub use orbit::{orbit_summary, random_alternating_sequence, run_orbit, OrbitRecord, OrbitSummary};
pub use quiver::{
    canonicalize, is_cyclic, markov_constant, mutate, mutate_sequence, norm, CanonicalForm, Edge,
    ExchangeTriple, MutationSequence, Orientation, Vertex,
};
pub use sweep::Execution;
