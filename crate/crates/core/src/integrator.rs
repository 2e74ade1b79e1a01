//! Adaptive Dormand–Prince 5(4) integration of two-component linear systems.
//!
//! Only linear homogeneous right-hand sides are integrated here, so the state
//! may be rescaled by any positive factor at any time. The integrator uses
//! that to keep deep-well solutions finite: once the state magnitude passes
//! [`RESCALE_THRESHOLD`] it is divided by its magnitude and the logarithm of
//! the removed factor is accumulated separately.

use crate::error::{Error, Result};

pub(crate) const RESCALE_THRESHOLD: f64 = 1e150;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

pub(crate) type State = [f64; 2];

#[derive(Clone, Copy, Debug)]
pub(crate) struct StepControl {
    /// Relative and absolute local error tolerance per step.
    pub tol: f64,
    pub max_steps: usize,
    pub record: bool,
}

/// State at one requested stopping radius.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Checkpoint {
    pub r: f64,
    pub y: State,
    /// Natural log of the factor divided out of `y` so far.
    pub log_scale: f64,
    /// Sign changes of `y[0]` on the integrated interval.
    pub interior_nodes: usize,
}

#[derive(Debug, Default)]
pub(crate) struct Run {
    pub checkpoints: Vec<Checkpoint>,
    /// Accepted steps as `(r, y, log_scale)`.
    pub trajectory: Vec<(f64, State, f64)>,
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

#[inline]
fn scaled_norm(v: &State, y: &State, tol: f64) -> f64 {
    let e0 = v[0] / (tol + tol * y[0].abs());
    let e1 = v[1] / (tol + tol * y[1].abs());
    (0.5 * (e0 * e0 + e1 * e1)).sqrt()
}

fn initial_step<F>(rhs: &F, r0: f64, y0: &State, f0: &State, tol: f64, span: f64) -> f64
where
    F: Fn(f64, &State) -> State,
{
    let d0 = scaled_norm(y0, y0, tol);
    let d1 = scaled_norm(f0, y0, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs(r0 + h0, &y1);
    let df = [f1[0] - f0[0], f1[1] - f0[1]];
    let d2 = scaled_norm(&df, y0, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = rhs(r, y)` from `r0` through every radius in `stops`
/// (strictly increasing, all greater than `r0`), landing on each exactly.
pub(crate) fn integrate<F>(
    rhs: F,
    r0: f64,
    y0: State,
    stops: &[f64],
    ctl: &StepControl,
) -> Result<Run>
where
    F: Fn(f64, &State) -> State,
{
    debug_assert!(stops.windows(2).all(|w| w[0] < w[1]));
    let mut run = Run::default();
    let Some(&r_final) = stops.last() else {
        return Ok(run);
    };
    if stops[0] <= r0 {
        return Err(Error::InvalidConfig(format!(
            "stop radius {} not beyond start {r0}",
            stops[0]
        )));
    }
    let tol = ctl.tol;

    let mut r = r0;
    let mut y = y0;
    let mut log_scale = 0.0;
    let mut nodes = 0usize;
    let mut last_sign = y[0].signum() * (y[0] != 0.0) as i32 as f64;
    let mut k1 = rhs(r, &y);
    let mut h = initial_step(&rhs, r, &y, &k1, tol, r_final - r0);
    let mut steps = 0usize;
    let mut rejected_last = false;
    let mut next_stop = 0usize;

    if ctl.record {
        run.trajectory.push((r, y, log_scale));
    }

    while next_stop < stops.len() {
        let target = stops[next_stop];
        let remaining = target - r;
        let mut landing = false;
        if h >= remaining || remaining - h <= 1e-12 * target.abs().max(1.0) {
            h = remaining;
            landing = true;
        }
        if h <= 1e-14 * r.abs().max(1e-300) {
            return Err(Error::StepUnderflow { r });
        }
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::StepBudget {
                max_steps: ctl.max_steps,
                r,
            });
        }

        let k2 = rhs(r + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(r + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(r + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            r + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            r + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let r_new = if landing { target } else { r + h };
        let k7 = rhs(r_new, &y_new);

        let err_vec = [
            h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
            h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
        ];
        let big = [y[0].abs().max(y_new[0].abs()), y[1].abs().max(y_new[1].abs())];
        let err = {
            let e0 = err_vec[0] / (tol + tol * big[0]);
            let e1 = err_vec[1] / (tol + tol * big[1]);
            (0.5 * (e0 * e0 + e1 * e1)).sqrt()
        };

        if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
            if !(y[0].is_finite() && y[1].is_finite()) {
                return Err(Error::NonFinite { r });
            }
            h *= FAC_MIN;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            // accepted
            let s = y_new[0].signum() * (y_new[0] != 0.0) as i32 as f64;
            if s != 0.0 {
                if last_sign != 0.0 && s != last_sign {
                    nodes += 1;
                }
                last_sign = s;
            }
            r = r_new;
            y = y_new;
            k1 = k7;

            let mag = y[0].abs().max(y[1].abs());
            if mag > RESCALE_THRESHOLD {
                y = [y[0] / mag, y[1] / mag];
                k1 = [k1[0] / mag, k1[1] / mag];
                log_scale += mag.ln();
            }
            if ctl.record {
                run.trajectory.push((r, y, log_scale));
            }

            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if rejected_last {
                fac = fac.min(1.0);
            }
            rejected_last = false;
            let h_prop = h * fac;

            if landing {
                run.checkpoints.push(Checkpoint {
                    r,
                    y,
                    log_scale,
                    interior_nodes: nodes,
                });
                next_stop += 1;
                // the proposal was made for a possibly truncated step
                h = h_prop.max(h);
            } else {
                h = h_prop;
            }
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            rejected_last = true;
        }
    }
    Ok(run)
}
