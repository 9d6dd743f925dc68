//! Simulation and verification tools for a five-spin NMR realization of
//! quantum order-finding on permutations of four elements.
//!
//! The register holds a three-qubit exponent register (spins 1..=3) and a
//! two-qubit target register (spins 4..=5). Modules:
//!
//! - [`sim`]: dense state-vector and density-operator simulation.
//! - [`perm`]: permutations on four elements and the controlled-power oracle.
//! - [`circuits`]: the QFT, the full order-finding circuit, native pulse-level
//!   sequences and their verification.
//! - [`prodops`]: product-operator bookkeeping for temporally labelled
//!   effective pure state preparation.
//! - [`measurement`]: outcome distributions, ensemble observables, and the
//!   optimal guessing strategy.
//! - [`spectra`]: readout spectra for a weakly coupled five-spin molecule.
//! - [`classical`]: the classical one- and two-query games.

pub mod circuits;
pub mod classical;
pub mod cli;
pub mod error;
pub mod exec;
pub mod lp;
pub mod measurement;
pub mod perm;
pub mod prodops;
pub mod report;
pub mod sim;
pub mod spectra;

pub use error::{Error, Result};
pub use exec::Execution;
