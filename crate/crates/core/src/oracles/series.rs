//! Power-series construction of the 1D zero-energy solution.
//!
//! Writing `u(r) = Σ b_k r^{2k}` for the even 1D solution of
//! `u'' = -η exp(-r²) u` gives, with `b₀ = 1`,
//!
//! ```text
//! b_k = η / (2k(2k-1)) · Σ_{l=0}^{k-1} (-1)^{l+1} b_{k-1-l} / l!
//! ```
//!
//! and the scattering length follows from the moments
//!
//! ```text
//! c₀ = Σ_k k! b_k / 2,    d = Σ_k (2k-1)!! b_k / 2^{k+1},    a = (1 + η c₀) / (d √π η).
//! ```
//!
//! The sums are accumulated through `β_k = k! b_k`, which obeys a recurrence
//! with binomial weights and never needs `k!` itself. The moment series only
//! settle for small `|η|` and a large number of terms; [`series_a1d`] refuses
//! to return a value whose last term is not negligible.

use serde::{Deserialize, Serialize};

use crate::consts::SQRT_PI;
use crate::error::{Error, Result};
use crate::extraction::ScatteringLength;
use crate::Dim;

/// Upper bound on the last term of either moment series, relative to the
/// moment, for the sums to count as converged.
pub const SERIES_TOLERANCE: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesState {
    pub eta: f64,
    pub order: usize,
    /// `b_0..=b_K`; zero where `b_k` underflows.
    pub b: Vec<f64>,
    /// `k! b_k`.
    pub scaled: Vec<f64>,
    pub c0: f64,
    pub d: f64,
    /// Largest magnitude among the two terms added at `k = K`.
    pub last_term: f64,
    pub converged: bool,
}

/// Coefficients and moment sums up to order `k_max`.
pub fn series_state(eta: f64, k_max: usize) -> Result<SeriesState> {
    if !eta.is_finite() {
        return Err(Error::InvalidArgument(format!("coupling must be finite, got {eta}")));
    }
    let mut scaled = Vec::with_capacity(k_max + 1);
    let mut b = Vec::with_capacity(k_max + 1);
    scaled.push(1.0);
    b.push(1.0);

    // binomial coefficients C(k-1, ·)
    let mut binom: Vec<f64> = vec![1.0];
    let mut factorial = 1.0f64;
    // (2k-1)!! / (2^{k+1} k!)
    let mut ratio = 0.5;
    let mut c0 = 0.5;
    let mut d = 0.5;
    let mut last_term = 0.5;

    for k in 1..=k_max {
        if k > 1 {
            let mut next = vec![1.0; k];
            for l in 1..k - 1 {
                next[l] = binom[l - 1] + binom[l];
            }
            binom = next;
        }
        let sum: f64 = (0..k)
            .map(|l| {
                let sign = if l % 2 == 0 { -1.0 } else { 1.0 };
                sign * binom[l] * scaled[k - 1 - l]
            })
            .sum();
        let beta = eta / (2.0 * (2 * k - 1) as f64) * sum;
        scaled.push(beta);
        factorial *= k as f64;
        b.push(beta / factorial);

        ratio *= (2 * k - 1) as f64 / (2 * k) as f64;
        let (tc, td) = (0.5 * beta, beta * ratio);
        c0 += tc;
        d += td;
        last_term = tc.abs().max(td.abs());
    }

    let converged = last_term.is_finite()
        && k_max > 0
        && last_term <= SERIES_TOLERANCE * c0.abs().max(d.abs()).max(1.0);
    Ok(SeriesState {
        eta,
        order: k_max,
        b,
        scaled,
        c0,
        d,
        last_term,
        converged,
    })
}

/// The 1D scattering length from the series moments.
///
/// Fails with [`Error::SeriesNotConverged`] when the last term of either
/// moment is not negligible.
pub fn series_a1d(eta: f64, k_max: usize) -> Result<ScatteringLength> {
    if eta == 0.0 {
        return Err(Error::InvalidArgument("the series needs a nonzero coupling".into()));
    }
    let st = series_state(eta, k_max)?;
    let value = (1.0 + eta * st.c0) / (st.d * SQRT_PI * eta);
    if !st.converged {
        return Err(Error::SeriesNotConverged {
            k: k_max,
            last_term: st.last_term,
            estimate: value,
        });
    }
    Ok(ScatteringLength {
        dim: Dim::One,
        value,
        log_value: None,
        err_estimate: st.last_term * value.abs(),
        near_pole: st.d.abs() < 1e-10,
        converged: true,
    })
}
