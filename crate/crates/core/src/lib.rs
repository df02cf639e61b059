//! Perturbative dynamics and information-metric tools for a harmonically
//! driven two-level system.
//!
//! * [`qcore`]: system, drive and control-parameter types.
//! * [`perturbation`]: first-order amplitudes, the perturbed ground state and
//!   the first-order Hamiltonian.
//! * [`propagator`]: exact RK4 propagation used as the reference oracle.
//! * [`infometric`]: fidelity-susceptibility metric, its high-frequency limit,
//!   the third-order tensor and the Finsler line element.
//! * [`noise`]: noise spectrum, its δ-line transform and the `(t, ω)` grid.

pub mod error;
pub mod format;
pub mod heatmap;
pub mod infometric;
pub mod noise;
pub mod perturbation;
pub mod propagator;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::{
    bohr_frequency, validate_drive, ComplexValue, Conjugation, ControlParams, DriveOperator,
    DriveSpec, Level, Mat2, State2, TwoLevelSystem, C64,
};
