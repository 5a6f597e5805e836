//! Exchange interaction and charge noise of a two-electron double quantum
//! dot in the Hund-Mulliken picture.
//!
//! The pipeline runs [`model`] → [`potential`] → [`orbitals`] →
//! [`integrals`] → [`hamiltonian`] → [`noise`]. Every stage is a pure
//! function of its inputs.

pub mod config;
pub mod csv;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod integrals;
pub mod model;
pub mod noise;
pub mod orbitals;
pub mod potential;
pub mod roots;
pub mod validation;

pub use error::{DqdError, Result};
pub use model::{
    derive_constants, validate_params, ControlScheme, DerivedConstants, DeviceParams, Impurity,
    ValidationReport,
};
pub use orbitals::OrbitalBasis;
pub use potential::{eval_potential, potential_constraint_report, ConfinementPotential};
