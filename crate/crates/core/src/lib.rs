//! Dynamics of two electron-spin qubits coupled to nuclear spin baths.
//!
//! The two qubits interact with the nuclei through an isotropic Heisenberg
//! hyperfine coupling and with each other through Heisenberg exchange. Two
//! geometries are covered:
//!
//! * [`separate`]: each qubit sees its own bath and the exchange is zero;
//! * [`common`]: both qubits see the same bath, with symmetric or asymmetric
//!   hyperfine strengths and arbitrary exchange.
//!
//! States are carried as vector and tensor polarizations
//! ([`TwoQubitState`]); [`oracle`] provides brute-force evolution in the full
//! qubit+bath Hilbert space for small baths, which every closed form in this
//! crate is tested against. [`optimizer`] covers the short-time decoherence
//! rate and its minimization over pure two-qubit states.
//!
//! Units: `hbar = 1`, couplings are energies (inverse times).

pub mod analysis;
pub mod bath;
pub mod common;
mod error;
pub mod optimizer;
pub mod oracle;
pub mod polarization;
pub mod separate;
pub mod series;
mod spin;

pub use bath::{BathDistribution, GaussianVariant, Moment};
pub use common::CommonBathSystem;
pub use error::{Error, Result};
pub use polarization::{DensityMatrix4, NamedState, TwoQubitState};
pub use separate::SeparateBathSystem;
pub use series::TimeSeries;
pub use spin::Spin;

pub use nalgebra::{Matrix3, Vector3};
pub use num_complex::Complex64;
