//! Coherence-driven variable density sampling.
//!
//! This crate holds the numerical core: matrix-free orthonormal bases, the
//! coherence diagonals and functionals built from their cross-Gram matrix,
//! the projections and proximity operators used by the sampling-profile
//! optimizer, the optimizer itself, random index selection and sparse signal
//! generation, and an equality-constrained basis-pursuit solver.
//!
//! Everything here is `no_std` and only needs `alloc`. File formats, the
//! Monte-Carlo harness and the command line live in the `vds` crate.
//!
//! The main entry points are:
//!
//! * [`transforms::BasisPair`] for the sensing/sparsity pair and the masked
//!   operator `A_Ω = Φ†_Ω Ψ`,
//! * [`coherence::build_b`] / [`coherence::build_c`] and the `mu_*` functions,
//! * [`optimize::optimize_profile`] for the profile optimization,
//! * [`sampling`] for Bernoulli / i.i.d. index selection and test signals,
//! * [`recovery::basis_pursuit`] for ℓ1 reconstruction.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coherence;
pub mod error;
pub mod optimize;
pub mod profile;
pub mod prox;
pub mod recovery;
pub mod sampling;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use profile::SamplingProfile;
pub use transforms::{Basis, BasisKind, BasisPair};
