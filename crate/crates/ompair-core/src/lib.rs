//! Dynamics of two coupled optomechanical oscillators with either
//! separate-bath (SB) or common-bath (CB) mechanical dissipation.
//!
//! The crate covers the full pipeline from parameter ingestion to
//! observables:
//!
//! * [`params`] - physical and dimensionless parameter sets, bath topology,
//!   thermal occupancy, normal modes of the mechanical pair.
//! * [`classical`] - nonlinear mean-field equations and their adaptive
//!   integration (limit cycles, self-sustained oscillations).
//! * [`sync`] - delay-scanned Pearson correlation between the mechanical
//!   positions, period estimation, synchronization thresholds and maps.
//! * [`linear`] - classical fixed points, the 8x8 drift and noise matrices
//!   of the linearized fluctuation dynamics, stability and Hopf crossings.
//! * [`gaussian`] - steady-state covariance (Lyapunov equation), logarithmic
//!   negativity, symplectic spectra and effective phonon occupancy.
//!
//! Everything works in the dimensionless units where the cavity decay rate
//! is 1. All types are plain immutable values, safe to share across workers.
//! The crate is `no_std` (with `alloc`); IO, configuration and the
//! experiment runner live in the companion CLI crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classical;
mod fft;
pub mod gaussian;
pub mod linear;
pub mod ode;
pub mod params;
pub mod sync;

pub use classical::{ClassicalState, Trajectory};
pub use gaussian::{CovarianceMatrix, QuantumResult};
pub use linear::{DriftMatrix, FixedPoint, NoiseMatrix};
pub use params::{BathKind, NormalModes, PhysicalParams, SystemParams};
pub use sync::SyncResult;
