//! Radial potentials in dimensionless units.
//!
//! Lengths are measured in units of the potential range `L` and energies in
//! units of `ħ²/(μL²)`. In these units the Gaussian well depends on the single
//! coupling `η = V₀μ/ħ²`, and every solver in the crate works with
//! dimensionless quantities only. [`Coupling::from_physical`] and
//! [`to_physical_length`] convert at the boundary.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Large-distance decay class of a potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TailClass {
    Gaussian,
    Exponential,
    /// Decays like `r^{-(n + excess)}` in `n` dimensions.
    Power { excess: f64 },
}

/// Dimensionless well depth `η = V₀μ/ħ²`; positive values are attractive.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(eta: f64) -> Result<Self> {
        if eta.is_finite() {
            Ok(Coupling(eta))
        } else {
            Err(Error::InvalidArgument(format!("coupling must be finite, got {eta}")))
        }
    }

    /// `η = V₀ μ / ħ²` from a well depth parameter `V₀` (the Gaussian is
    /// `-V₀/(2L²) exp(-r²/L²)`), reduced mass and `ħ` in any consistent units.
    pub fn from_physical(v0: f64, reduced_mass: f64, hbar: f64) -> Result<Self> {
        Coupling::new(v0 * reduced_mass / (hbar * hbar))
    }

    /// Inverse of [`Coupling::from_physical`].
    pub fn to_physical(self, reduced_mass: f64, hbar: f64) -> f64 {
        self.0 * hbar * hbar / reduced_mass
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_free(self) -> bool {
        self.0 == 0.0
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "η = {}", self.0)
    }
}

/// Converts a dimensionless length (e.g. `a_s/L`) back to physical units.
pub fn to_physical_length(dimensionless: f64, range: f64) -> f64 {
    dimensionless * range
}

/// A spherically symmetric potential together with the metadata that decides
/// whether the zero-energy boundary conditions at the origin apply.
///
/// The origin exponent and tail class are declared, never inferred.
#[derive(Clone)]
pub struct RadialPotential {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    char_length: f64,
    origin_exponent: f64,
    tail: TailClass,
}

impl RadialPotential {
    pub fn new<F>(eval: F, char_length: f64, origin_exponent: f64, tail: TailClass) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialPotential {
            eval: Arc::new(eval),
            char_length,
            origin_exponent,
            tail,
        }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn char_length(&self) -> f64 {
        self.char_length
    }

    /// Leading divergence exponent `s` in `V ~ r^{-s}` near the origin.
    pub fn origin_exponent(&self) -> f64 {
        self.origin_exponent
    }

    pub fn tail(&self) -> TailClass {
        self.tail
    }
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential")
            .field("char_length", &self.char_length)
            .field("origin_exponent", &self.origin_exponent)
            .field("tail", &self.tail)
            .finish_non_exhaustive()
    }
}

/// The attractive Gaussian well `V(y) = -(η/2) exp(-y²)`.
pub fn gaussian(eta: Coupling) -> RadialPotential {
    let half = 0.5 * eta.value();
    RadialPotential::new(move |y| -half * (-y * y).exp(), 1.0, 0.0, TailClass::Gaussian)
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `s < 1`: the conditions `Φ(0) = 1`, `Φ'(0) = 0` hold.
    pub origin_ok: bool,
    /// The tail decays fast enough for a scattering length to exist.
    pub tail_ok: bool,
    pub diagnostics: Vec<String>,
}

impl ValidityReport {
    pub fn is_admissible(&self) -> bool {
        self.origin_ok && self.tail_ok
    }

    /// Converts a rejection into an error carrying every diagnostic.
    pub fn admit(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::Inadmissible(self.diagnostics.join("; ")))
        }
    }
}

/// Checks the declared metadata of `pot` against the admission rules of the
/// radial solvers.
pub fn validate(pot: &RadialPotential) -> ValidityReport {
    let mut diagnostics = Vec::new();

    let s = pot.origin_exponent();
    let origin_ok = s.is_finite() && s < 1.0;
    if !origin_ok {
        diagnostics.push(format!(
            "origin divergence r^-{s} with s >= 1: modified boundary conditions required"
        ));
    }

    let tail_ok = match pot.tail() {
        TailClass::Gaussian | TailClass::Exponential => true,
        TailClass::Power { excess } => excess > 0.0 && excess.is_finite(),
    };
    if !tail_ok {
        diagnostics.push(
            "tail decays no faster than r^-n: scattering length undefined".to_string(),
        );
    }

    let l = pot.char_length();
    if !(l.is_finite() && l > 0.0) {
        diagnostics.push(format!("characteristic length must be positive, got {l}"));
        return ValidityReport {
            origin_ok,
            tail_ok: false,
            diagnostics,
        };
    }

    ValidityReport {
        origin_ok,
        tail_ok,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(v: f64) -> Coupling {
        Coupling::new(v).unwrap()
    }

    #[test]
    fn free_gaussian_vanishes() {
        let v = gaussian(eta(0.0));
        for y in [0.0, 0.3, 1.0, 5.0] {
            assert_eq!(v.eval(y), 0.0);
        }
    }

    #[test]
    fn gaussian_direct_values() {
        let v = gaussian(eta(2.0));
        assert_eq!(v.eval(0.0), -1.0);
        assert!((v.eval(1.0) + (-1.0f64).exp()).abs() < 1e-16);
        assert!((v.eval(1.0) + 0.367_879).abs() < 1e-6);

        let barrier = gaussian(eta(-10.0));
        assert_eq!(barrier.eval(0.0), 5.0);
    }

    #[test]
    fn gaussian_metadata() {
        let v = gaussian(eta(1.0));
        assert_eq!(v.char_length(), 1.0);
        assert_eq!(v.origin_exponent(), 0.0);
        assert_eq!(v.tail(), TailClass::Gaussian);
        assert!(validate(&v).is_admissible());
    }

    #[test]
    fn weak_origin_divergence_is_admitted() {
        let v = RadialPotential::new(
            |r: f64| -r.powf(-0.5) * (-r * r).exp(),
            1.0,
            0.5,
            TailClass::Gaussian,
        );
        let report = validate(&v);
        assert!(report.is_admissible(), "{report:?}");
    }

    #[test]
    fn strong_origin_divergence_is_rejected() {
        let v = RadialPotential::new(|r: f64| -r.powf(-1.5), 1.0, 1.5, TailClass::Gaussian);
        let report = validate(&v);
        assert!(!report.origin_ok);
        let err = report.admit().unwrap_err();
        assert!(err.to_string().contains("modified boundary conditions required"));
    }

    #[test]
    fn slow_power_tail_is_rejected() {
        let v = RadialPotential::new(|r: f64| 1.0 / (1.0 + r.powi(3)), 1.0, 0.0, TailClass::Power {
            excess: 0.0,
        });
        assert!(!validate(&v).tail_ok);

        let ok = RadialPotential::new(|r: f64| 1.0 / (1.0 + r.powi(5)), 1.0, 0.0, TailClass::Power {
            excess: 0.5,
        });
        assert!(validate(&ok).is_admissible());
    }

    #[test]
    fn coupling_rejects_nonfinite() {
        assert!(Coupling::new(f64::NAN).is_err());
        assert!(Coupling::new(f64::INFINITY).is_err());
    }

    #[test]
    fn physical_round_trip() {
        let c = Coupling::from_physical(3.0, 0.5, 2.0).unwrap();
        assert!((c.value() - 0.375).abs() < 1e-15);
        assert!((c.to_physical(0.5, 2.0) - 3.0).abs() < 1e-15);
        assert_eq!(to_physical_length(0.7, 2.0), 1.4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn even_and_monotone(e in 1e-3f64..50.0, y in 0.0f64..6.0, dy in 1e-3f64..1.0) {
                let v = gaussian(eta(e));
                prop_assert_eq!(v.eval(y), v.eval(-y));
                prop_assert!(v.eval(y + dy) >= v.eval(y));
            }

            #[test]
            fn linear_in_coupling(e1 in -40.0f64..40.0, e2 in 0.1f64..40.0, y in 0.0f64..4.0) {
                let v1 = gaussian(eta(e1)).eval(y);
                let v2 = gaussian(eta(e2)).eval(y);
                prop_assert!((v1 / v2 - e1 / e2).abs() <= 1e-12 * (1.0 + (e1 / e2).abs()));
            }

            #[test]
            fn gaussian_always_admissible(e in -1e6f64..1e6) {
                prop_assert!(validate(&gaussian(eta(e))).is_admissible());
            }
        }
    }
}
