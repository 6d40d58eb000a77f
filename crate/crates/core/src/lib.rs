//! Covariance estimation of malicious jamming and interference-nulling
//! receive beamforming for a secure spatial-modulation link.
//!
//! A transmitter (Alice) sends spatial-modulation symbols plus artificial
//! noise to a receiver (Bob) while a full-duplex attacker (Mallory) both
//! eavesdrops and jams. Bob never observes Mallory's channel directly; he
//! estimates the covariance of the received jamming from a quiet training
//! slot and uses the estimate to null the interference subspace.
//!
//! The crate is organized as:
//!
//! - [`numerics`] -- dense complex linear algebra (Hermitian eigensolver,
//!   Givens rotations, null-space projectors, Gaussian sampling),
//! - [`system`] -- the two-slot signal model and scenario generation,
//! - [`rank`] -- AIC model-order detection of the interference rank,
//! - [`estimators`] -- SCM, truncated-EVD, PCA-EVD and joint-diagonalization
//!   covariance estimators,
//! - [`beamform`] -- zero-forcing-constrained receive beamformer and the
//!   SJNR / NMSE / secrecy-rate / FLOP metrics,
//! - [`sim`] -- the seeded parallel Monte Carlo experiment runner and its
//!   CSV / plot-script outputs.

pub mod beamform;
pub mod estimators;
pub mod numerics;
pub mod rank;
pub mod sim;
pub mod system;

pub use numerics::{ComplexMatrix, ComplexVector, EigenDecomposition, GivensRotation, HermitianMatrix};
pub use estimators::{CovarianceEstimate, Method};
pub use system::{ChannelSet, SystemConfig, TransmitSymbol};
