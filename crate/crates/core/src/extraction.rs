//! Scattering lengths from the asymptotic form of the zero-energy solution.
//!
//! Outside the range of the potential the solution is, up to normalization,
//!
//! ```text
//! 1D, 3D:  u(r) = r - a
//! 2D:      Φ(r) = ln(2r/a) - γ
//! ```
//!
//! so `a` follows from the value and slope at any radius in that region.

use serde::{Deserialize, Serialize};

use crate::consts::EULER_GAMMA;
use crate::error::{Error, Result};
use crate::potentials::{gaussian, Coupling, RadialPotential};
use crate::radial_solver::{integrate_to, RadialSolution, SolverConfig};
use crate::Dim;

/// Relative size of the normalized slope below which a solution is treated
/// as sitting on a bound-state threshold.
pub const NEAR_POLE_THRESHOLD: f64 = 1e-8;

/// Cutoff ladder used by [`scattering_length`], as multiples of `r_max`.
pub const CUTOFF_LADDER: [f64; 4] = [0.6, 0.8, 1.0, 1.2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringLength {
    pub dim: Dim,
    /// Signed infinity when the scattering length diverges. In 2D the value
    /// saturates at the `f64` range; `log_value` keeps the exact logarithm.
    pub value: f64,
    /// `ln a`, present in 2D only.
    pub log_value: Option<f64>,
    /// Same units as `value` (as `ln a` in 2D).
    pub err_estimate: f64,
    pub near_pole: bool,
    pub converged: bool,
}

impl ScatteringLength {
    /// True when the value is trustworthy as a plain number.
    pub fn is_clean(&self) -> bool {
        self.converged && !self.near_pole && self.value.is_finite()
    }
}

/// `a = r - u/u'`.
pub fn extract_1d3d(sol: &RadialSolution, dim: Dim) -> Result<ScatteringLength> {
    if dim == Dim::Two {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "use extract_2d",
        });
    }
    if sol.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: sol.dim,
        });
    }
    let (r, u, du) = (sol.r_end, sol.value, sol.derivative);
    let near_pole = (du * r).abs() < NEAR_POLE_THRESHOLD * u.abs();
    let value = if du == 0.0 { f64::INFINITY } else { r - u / du };
    Ok(ScatteringLength {
        dim,
        value,
        log_value: None,
        err_estimate: 0.0,
        near_pole,
        converged: true,
    })
}

/// `a = 2r exp(-Φ/(rΦ') - γ)`.
pub fn extract_2d(sol: &RadialSolution) -> Result<ScatteringLength> {
    if sol.dim != Dim::Two {
        return Err(Error::DimensionMismatch {
            expected: Dim::Two,
            found: sol.dim,
        });
    }
    let (r, phi, dphi) = (sol.r_end, sol.value, sol.derivative);
    let slope = r * dphi;
    let near_pole = slope.abs() < NEAR_POLE_THRESHOLD * phi.abs();
    let log_value = if slope == 0.0 {
        f64::INFINITY
    } else {
        (2.0 * r).ln() - phi / slope - EULER_GAMMA
    };
    Ok(ScatteringLength {
        dim: Dim::Two,
        value: positive_exp(log_value),
        log_value: Some(log_value),
        err_estimate: 0.0,
        near_pole,
        converged: true,
    })
}

/// `exp(x)` kept strictly positive and finite for finite `x`.
pub(crate) fn positive_exp(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::INFINITY
    } else {
        x.exp().clamp(f64::MIN_POSITIVE, f64::MAX)
    }
}

/// Dispatches on the dimension recorded in `sol`.
pub fn extract(sol: &RadialSolution) -> Result<ScatteringLength> {
    match sol.dim {
        Dim::Two => extract_2d(sol),
        d => extract_1d3d(sol, d),
    }
}

/// Scattering length of the Gaussian well with coupling `eta`.
pub fn scattering_length(dim: Dim, eta: f64, cfg: &SolverConfig) -> Result<ScatteringLength> {
    scattering_length_of(dim, &gaussian(Coupling::new(eta)?), cfg)
}

/// Evaluates the extractor on the cutoff ladder `{0.6, 0.8, 1.0, 1.2}·r_max`
/// and returns the value at the last rung. The error estimate is the spread
/// of the last two rungs; the result is marked unconverged when that spread
/// grew compared with the previous pair and exceeds `10^-8` of the value.
pub fn scattering_length_of(
    dim: Dim,
    pot: &RadialPotential,
    cfg: &SolverConfig,
) -> Result<ScatteringLength> {
    let radii: Vec<f64> = CUTOFF_LADDER.iter().map(|f| f * cfg.r_max).collect();
    let sols = integrate_to(dim, pot, cfg, &radii)?;
    let rungs = sols.iter().map(extract).collect::<Result<Vec<_>>>()?;
    let key = |a: &ScatteringLength| a.log_value.unwrap_or(a.value);

    let n = rungs.len();
    let last = key(&rungs[n - 1]);
    let spread = |i: usize| (key(&rungs[i + 1]) - key(&rungs[i])).abs();
    let (d_prev, d_last) = (spread(n - 3), spread(n - 2));

    let mut out = rungs[n - 1].clone();
    if !last.is_finite() {
        out.err_estimate = f64::INFINITY;
        out.near_pole = true;
        return Ok(out);
    }
    out.err_estimate = if d_last.is_nan() { f64::INFINITY } else { d_last };
    let floor = 1e-8 * last.abs().max(1.0);
    out.converged = d_last <= d_prev.max(floor);
    out.near_pole |= rungs[n - 2].near_pole;
    Ok(out)
}
