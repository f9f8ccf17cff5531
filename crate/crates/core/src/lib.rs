//! Desk-scale models of rare-earth-ion quantum-computing hardware.
//!
//! The crate covers the quantitative building blocks of a single-crystal,
//! frequency-addressed ion processor: cavity emission and photon-detection
//! budgets ([`cavity`]), pairwise dipole-dipole interactions
//! ([`interactions`]), stochastic dopant placement ([`crystal`]), analytic
//! gate-error budgets ([`gates`]), single-shot readout simulation
//! ([`readout`]), the Line/Starfish qubit-discovery protocols
//! ([`nodesearch`]), and repeater-chain fidelity algebra ([`network`]).
//!
//! All Monte Carlo entry points are deterministic given a master seed and
//! produce identical results at any parallelism level; see [`exec`].

pub mod cavity;
pub mod crystal;
pub mod error;
pub mod exec;
pub mod gates;
pub mod interactions;
pub mod network;
pub mod nodesearch;
pub mod readout;
pub mod validate;

pub(crate) mod spatial;

pub use error::{Error, Result};

/// A computed value plus a flag raised when the inputs lie outside the range
/// where the underlying closed form is trustworthy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Flagged {
    pub value: f64,
    pub beyond_validity: bool,
}
