//! Zeroth and first iterates of the integral equations, in closed form.
//!
//! Iterating the integral equation from the free solution gives `c₁` and
//! `c₂` as polynomials in `η`; the scattering length is then formed with the
//! same expressions used by [`super::volterra`]. At order zero the results
//! coincide with the first closed forms of [`crate::approximants`]; at order
//! one they reproduce the improved forms up to terms of order `η`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::consts::{EULER_GAMMA, SQRT_PI};
use crate::error::{Error, Result};
use crate::Dim;

fn coefficients(dim: Dim, eta: f64, order: u8) -> (f64, f64) {
    let g = EULER_GAMMA;
    let e2 = eta * eta;
    match (dim, order) {
        (Dim::Three, 0) => (-eta / 2.0, -eta * SQRT_PI / 4.0),
        (Dim::Three, _) => (
            -eta / 2.0 + e2 * (0.25 - PI / 16.0),
            -eta * SQRT_PI / 4.0 + e2 * SQRT_PI * (0.125 - 1.0 / (8.0 * SQRT_2)),
        ),
        (Dim::One, 0) => (-eta * SQRT_PI / 2.0, -eta / 2.0),
        (Dim::One, _) => (
            -eta * SQRT_PI / 2.0 + 0.5 * e2 * SQRT_PI * (1.0 / SQRT_2 - 0.5),
            -eta / 2.0 + e2 * PI / 16.0,
        ),
        (Dim::Two, 0) => (eta * g / 4.0, -eta / 2.0),
        (Dim::Two, _) => {
            let i1 = -g / 4.0;
            let i2 = (g * g + PI * PI / 6.0) / 8.0;
            let i3 = (g * LN_2 + 0.5 * LN_2 * LN_2 + PI * PI / 12.0) / 4.0;
            (
                eta * g / 4.0 + 0.25 * e2 * (g * i1 + 2.0 * i2 - i3),
                -eta / 2.0 + e2 * LN_2 / 8.0,
            )
        }
    }
}

/// Scattering length from the order-`order` iterate (`order ∈ {0, 1}`).
/// Diverging inputs give signed infinities, as do `η = 0` in 1D and 2D.
pub fn closed_form_ls(dim: Dim, eta: f64, order: u8) -> Result<f64> {
    if order > 1 {
        return Err(Error::InvalidArgument(format!("order must be 0 or 1, got {order}")));
    }
    let (c1, c2) = coefficients(dim, eta, order);
    Ok(match dim {
        Dim::Three => c2 / (c1 + 1.0),
        Dim::One => (c2 - 1.0) / c1,
        Dim::Two => ((c1 - 1.0) / c2 - EULER_GAMMA + LN_2).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximants::{eval_closed_form, ClosedFormLevel};

    #[test]
    fn order_zero_is_first_closed_form() {
        for eta in [-7.3, -0.4, 0.01, 0.9, 1.7, 2.5, 9.0, 13.2] {
            for dim in Dim::ALL {
                let a = closed_form_ls(dim, eta, 0).unwrap();
                let b = eval_closed_form(dim, ClosedFormLevel::First, eta);
                assert!((a / b - 1.0).abs() < 1e-13, "{dim} η={eta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn order_one_approaches_improved_form() {
        for eta in [1e-2, 2e-2] {
            let a = closed_form_ls(Dim::One, eta, 1).unwrap();
            let b = eval_closed_form(Dim::One, ClosedFormLevel::Improved, eta);
            assert!((a - b).abs() < 2.0 * eta, "η={eta}: {a} vs {b}");

            let a = closed_form_ls(Dim::Two, eta, 1).unwrap().ln();
            let b = eval_closed_form(Dim::Two, ClosedFormLevel::Improved, eta).ln();
            assert!((a - b).abs() < 2.0 * eta, "η={eta}: {a} vs {b}");
        }
    }

    #[test]
    fn order_one_is_second_order_born_in_3d() {
        // a/η = -√π/4 + O(η); the order-one iterate carries the O(η) term
        // exactly, so it beats order zero against the numerical value
        let eta = 0.05;
        let exact = crate::scattering_length(Dim::Three, eta, &Default::default()).unwrap().value;
        let e0 = (closed_form_ls(Dim::Three, eta, 0).unwrap() - exact).abs();
        let e1 = (closed_form_ls(Dim::Three, eta, 1).unwrap() - exact).abs();
        assert!(e1 < 0.1 * e0, "{e0} {e1}");
    }

    #[test]
    fn rejects_higher_orders() {
        assert!(closed_form_ls(Dim::Three, 1.0, 2).is_err());
    }
}
