//! Exceptional and regular spectra of the asymmetric quantum Rabi model.

pub mod bargmann;
pub mod bethe;
pub mod constraint;
pub mod error;
pub mod model;
pub mod ode;
pub mod poly;
pub mod potentials;
pub mod schrodinger;
pub mod verify;

pub use bethe::{solve_bethe, to_gaudin, BetheRoots, GaudinParams};
pub use constraint::{qes_points, QesPoint, QesSearch};
pub use error::{Error, Result};
pub use model::{qes_energy, regular_spectrum, Branch, EnergyLevel, ModelParams, Spectrum};
pub use potentials::{Form, PotentialKind, PotentialSpec};
pub use verify::{run_verification, VerifyConfig, VerifyReport};
