//! Zero-energy s-wave scattering lengths of short-range radial potentials.
//!
//! The crate integrates the zero-energy radial Schrödinger equation in one,
//! two and three dimensions, extracts the scattering length from the
//! asymptotic form of the wavefunction, locates the couplings at which new
//! bound states appear, and evaluates pole-sum approximants for the
//! attractive Gaussian well
//!
//! ```text
//! V(y) = -(η/2) exp(-y²)
//! ```
//!
//! in units where the range `L = 1` and `ħ²/μ = 1`. Two independent
//! routes to the same numbers live in [`oracles`]: a direct solve of the
//! integral (Volterra) form of the equation and the power-series
//! construction of the one-dimensional solution.
//!
//! ```
//! use scatlen::{scattering_length, Dim, SolverConfig};
//!
//! let a = scattering_length(Dim::Three, 1.0, &SolverConfig::default()).unwrap();
//! assert!((a.value + 0.692_192_703_6).abs() < 1e-8);
//! ```

pub mod approximants;
pub mod consts;
mod dim;
pub mod error;
pub mod extraction;
mod integrator;
pub mod oracles;
pub mod poles;
pub mod potentials;
pub mod radial_solver;
pub mod sensitivity;

pub use approximants::{
    builtin_models, eval_closed_form, eval_model, fit_model, ApproximantModel, ClosedFormLevel,
    FitReport, FitSpec, FitTarget, ModelForm,
};
pub use dim::Dim;
pub use error::{Error, Result};
pub use extraction::{extract, extract_1d3d, extract_2d, scattering_length, ScatteringLength};
pub use poles::{enumerate_poles, find_pole, PoleEntry, PoleScanConfig, PoleSet};
pub use potentials::{gaussian, validate, Coupling, RadialPotential, TailClass, ValidityReport};
pub use radial_solver::{
    convergence_scan, integrate_phi2d, integrate_u, RadialSolution, ScanAxis, ScanTable,
    SolverConfig,
};
pub use sensitivity::{pole_sensitivity, truncate_digits, SensitivityReport, REFERENCE_W1};
