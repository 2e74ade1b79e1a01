//! Independent routes to the scattering length, used to cross-check the
//! differential-equation solver.
//!
//! * [`volterra`] solves the integral form of the zero-energy equation on a
//!   grid by forward substitution.
//! * [`series`] builds the 1D solution from its power series.
//! * [`closed_form`] holds the analytic zeroth and first iterates of the
//!   integral equation.

pub mod closed_form;
pub mod series;
pub mod volterra;

pub use closed_form::closed_form_ls;
pub use series::{series_a1d, series_state, SeriesState};
pub use volterra::{ls_coefficients, ls_solve, LsGrid};
