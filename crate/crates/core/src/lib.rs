//! Models for characterising single-photon sources.
//!
//! The crate covers the quantitative chain from a source model to the
//! numbers reported for it:
//!
//! - [`fock`]: photon-number distributions, loss channels, threshold
//!   detectors, permanents and determinants of small interferometer matrices.
//! - [`spdc`]: two-mode squeezed pair sources, heralded `g2(0)` and the
//!   effective two-photon indistinguishability under losses.
//! - [`emitter`]: quantum-dot / micropillar figures of merit (Purcell factor,
//!   mode fraction, out-coupling, brightness, jitter and precession limits).
//! - [`hom`]: two-photon interference with partial distinguishability and the
//!   double-pulse peak-area model.
//! - [`tcspc`]: correlation-histogram synthesis, separable peak fitting and
//!   extraction of `g2(0)` and `M` with uncertainties.
//! - [`fom`]: figure-of-merit records, the reference dataset and the SPDC
//!   limit curve.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the scenario
//! runner and threaded Monte Carlo drivers live in the `photonsrc` crate.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod linalg;
mod math;

pub mod emitter;
pub mod fock;
pub mod fom;
pub mod hom;
pub mod rng;
pub mod spdc;
pub mod tcspc;

pub use error::{Error, Result};
