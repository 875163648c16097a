//! Quantum state transfer in pure- and mixed-state spin chains.
//!
//! The crate is organized around a free-fermion core and an exact dense
//! reference:
//!
//! - [`chain`] builds coupling distributions (homogeneous, engineered
//!   perfect-transfer, dipolar-from-geometry, disordered) and transfer timing.
//! - [`propagator`] diagonalizes the single-particle hopping matrix and
//!   evaluates transfer amplitudes, Slater determinants in higher excitation
//!   manifolds, mixed-state overlaps and polarization correlations.
//! - [`logical`] evaluates two-spin logical-qubit transport and the
//!   entanglement fidelity.
//! - [`mqc`] computes multiple-quantum-coherence intensities, analytically and
//!   by phase cycling over the dense oracle.
//! - [`oracle`] is the exact `2^n`-dimensional reference every analytic path
//!   is checked against.
//!
//! Conventions used throughout: `ħ = 1`, couplings are angular frequencies,
//! sites are 1-based in the public API, `|0⟩` is the `σ_z = +1` state and
//! `|1⟩` is an excitation, and in dense matrices site 1 is the most
//! significant bit of the basis index.

pub mod chain;
pub mod error;
pub mod logical;
pub mod mqc;
pub mod oracle;
pub mod output;
pub mod pauli;
pub mod propagator;
pub mod tridiag;

pub use chain::{ChainSpec, Couplings, DipolarGeometry, Model, TransferTiming, Truncation};
pub use error::{Error, Result};
pub use pauli::{DeviationState, Pauli, PauliString, PauliSum};
pub use propagator::{Propagator, SpectralDecomposition};

pub use num_complex::Complex64;
