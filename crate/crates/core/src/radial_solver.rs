//! Outward integration of the zero-energy radial equation.
//!
//! In one and three dimensions the equation is solved for `u` (with
//! `u = rΦ` in 3D and `u = Φ` in 1D), which obeys
//!
//! ```text
//! u''(r) = 2 V(r) u(r)
//! ```
//!
//! in both cases; only the starting data differ. In two dimensions the
//! first-derivative term cannot be removed this way and `Φ` itself is
//! integrated from a small offset `ε` to avoid the `1/r` singularity:
//!
//! ```text
//! Φ''(r) + Φ'(r)/r = 2 V(r) Φ(r),   Φ(ε) = 1,  Φ'(ε) = 0.
//! ```

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::MAX_ACCURACY_EXPONENT;
use crate::error::{Error, Result};
use crate::extraction::{extract, ScatteringLength};
use crate::integrator::{self, Checkpoint, StepControl};
use crate::potentials::{gaussian, validate, Coupling, RadialPotential};
use crate::Dim;

/// Numerical parameters of a radial solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Accuracy exponent: the local error tolerance per step is `10^-p`.
    /// Values above 13 are accepted but clamped, double precision cannot
    /// honour them.
    pub p: u32,
    pub r_max: f64,
    /// Start offset for the 2D solve; ignored in 1D and 3D.
    pub epsilon: f64,
    pub max_steps: usize,
    pub record_trajectory: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 11,
            r_max: 10.0,
            epsilon: 1e-6,
            max_steps: 1_000_000,
            record_trajectory: false,
        }
    }
}

impl SolverConfig {
    pub fn with_p(mut self, p: u32) -> Self {
        self.p = p;
        self
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_trajectory(mut self, record: bool) -> Self {
        self.record_trajectory = record;
        self
    }

    /// The effective exponent after clamping to what `f64` can resolve.
    pub fn effective_p(&self) -> u32 {
        self.p.min(MAX_ACCURACY_EXPONENT)
    }

    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.effective_p() as i32))
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 {
            return Err(Error::InvalidConfig(format!("p must be at least 3, got {}", self.p)));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::InvalidConfig(format!("r_max must be positive, got {}", self.r_max)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.epsilon >= self.r_max {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} must be below r_max {}",
                self.epsilon, self.r_max
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Non-fatal remarks about this configuration for the given potential.
    pub fn warnings(&self, pot: &RadialPotential) -> Vec<String> {
        let mut out = Vec::new();
        if self.r_max < 5.0 * pot.char_length() {
            out.push(format!(
                "r_max = {} is below five characteristic lengths ({})",
                self.r_max,
                5.0 * pot.char_length()
            ));
        }
        if self.p > MAX_ACCURACY_EXPONENT {
            out.push(format!(
                "p = {} exceeds double precision; using {}",
                self.p, MAX_ACCURACY_EXPONENT
            ));
        }
        out
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            tol: self.tolerance(),
            max_steps: self.max_steps,
            record: self.record_trajectory,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub r: f64,
    pub value: f64,
    pub derivative: f64,
    /// `value` and `derivative` are to be multiplied by `exp(log_scale)`.
    pub log_scale: f64,
}

/// Endpoint data of one radial solve.
///
/// For 1D and 3D `value`/`derivative` hold `u` and `u'`; for 2D they hold `Φ`
/// and `Φ'`. Both may carry a common factor `exp(-log_scale)` removed to
/// prevent overflow, which leaves every ratio unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub dim: Dim,
    pub r_end: f64,
    pub value: f64,
    pub derivative: f64,
    pub log_scale: f64,
    /// Sign changes of the solution on `(0, r_end]`.
    pub interior_nodes: usize,
    /// Zero-energy bound states: the interior nodes plus the node that the
    /// asymptotic straight line (or logarithm in 2D) still has beyond `r_end`.
    pub nodes: usize,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl RadialSolution {
    fn from_checkpoint(dim: Dim, c: &Checkpoint) -> Self {
        let [value, derivative] = c.y;
        let tail = usize::from(value * derivative < 0.0);
        RadialSolution {
            dim,
            r_end: c.r,
            value,
            derivative,
            log_scale: c.log_scale,
            interior_nodes: c.interior_nodes,
            nodes: c.interior_nodes + tail,
            trajectory: None,
        }
    }
}

fn admit(pot: &RadialPotential, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    validate(pot).admit()
}

fn u_rhs(pot: &RadialPotential) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |r, y| [y[1], 2.0 * pot.eval(r) * y[0]]
}

fn phi_rhs(pot: &RadialPotential) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |r, y| [y[1], 2.0 * pot.eval(r) * y[0] - y[1] / r]
}

fn boundary_data(dim: Dim) -> Result<[f64; 2]> {
    match dim {
        Dim::One => Ok([1.0, 0.0]),
        Dim::Three => Ok([0.0, 1.0]),
        Dim::Two => Err(Error::UnsupportedDimension {
            dim,
            reason: "the u-form applies to one and three dimensions only",
        }),
    }
}

/// Solves at every radius in `radii` (strictly increasing) in a single pass.
pub fn integrate_to(
    dim: Dim,
    pot: &RadialPotential,
    cfg: &SolverConfig,
    radii: &[f64],
) -> Result<Vec<RadialSolution>> {
    admit(pot, cfg)?;
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    let ctl = cfg.step_control();
    let run = match dim {
        Dim::Two => {
            if radii.first().is_some_and(|&r| r <= cfg.epsilon) {
                return Err(Error::InvalidConfig(format!(
                    "radius {} not beyond epsilon {}",
                    radii[0], cfg.epsilon
                )));
            }
            integrator::integrate(phi_rhs(pot), cfg.epsilon, [1.0, 0.0], radii, &ctl)?
        }
        _ => integrator::integrate(u_rhs(pot), 0.0, boundary_data(dim)?, radii, &ctl)?,
    };
    let mut out: Vec<RadialSolution> = run
        .checkpoints
        .iter()
        .map(|c| RadialSolution::from_checkpoint(dim, c))
        .collect();
    if ctl.record {
        let traj: Vec<TrajectoryPoint> = run
            .trajectory
            .iter()
            .map(|&(r, [value, derivative], log_scale)| TrajectoryPoint {
                r,
                value,
                derivative,
                log_scale,
            })
            .collect();
        if let Some(last) = out.last_mut() {
            last.trajectory = Some(traj);
        }
    }
    Ok(out)
}

/// Integrates the u-form equation with the dimension's boundary data.
pub fn integrate_u(dim: Dim, pot: &RadialPotential, cfg: &SolverConfig) -> Result<RadialSolution> {
    if dim == Dim::Two {
        return Err(Error::UnsupportedDimension {
            dim,
            reason: "use integrate_phi2d",
        });
    }
    single(integrate_to(dim, pot, cfg, &[cfg.r_max])?)
}

/// Integrates `u'' = 2Vu` from `r = 0` with arbitrary starting data.
///
/// The 1D and 3D problems share this kernel; `dim` only tags the result.
pub fn integrate_u_from(
    dim: Dim,
    pot: &RadialPotential,
    cfg: &SolverConfig,
    start: [f64; 2],
) -> Result<RadialSolution> {
    admit(pot, cfg)?;
    let run = integrator::integrate(u_rhs(pot), 0.0, start, &[cfg.r_max], &cfg.step_control())?;
    Ok(RadialSolution::from_checkpoint(dim, &run.checkpoints[0]))
}

pub fn integrate_phi2d(pot: &RadialPotential, cfg: &SolverConfig) -> Result<RadialSolution> {
    single(integrate_to(Dim::Two, pot, cfg, &[cfg.r_max])?)
}

/// Dispatches to [`integrate_u`] or [`integrate_phi2d`].
pub fn solve(dim: Dim, pot: &RadialPotential, cfg: &SolverConfig) -> Result<RadialSolution> {
    match dim {
        Dim::Two => integrate_phi2d(pot, cfg),
        _ => integrate_u(dim, pot, cfg),
    }
}

fn single(mut v: Vec<RadialSolution>) -> Result<RadialSolution> {
    v.pop()
        .ok_or_else(|| Error::InvalidArgument("no radius requested".into()))
}

/// Parameter varied by a [`convergence_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    Precision,
    Cutoff,
    Epsilon,
}

impl ScanAxis {
    fn apply(self, base: &SolverConfig, x: f64) -> Result<SolverConfig> {
        let cfg = match self {
            ScanAxis::Precision => {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(Error::InvalidArgument(format!("invalid p = {x}")));
                }
                base.with_p(x.round() as u32)
            }
            ScanAxis::Cutoff => base.with_r_max(x),
            ScanAxis::Epsilon => base.with_epsilon(x),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for ScanAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanAxis::Precision => "p",
            ScanAxis::Cutoff => "r_max",
            ScanAxis::Epsilon => "epsilon",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub axis_value: f64,
    pub eta: f64,
    /// `None` when the cell failed; see `failure`.
    pub rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub dim: Dim,
    pub axis: ScanAxis,
    pub reference: SolverConfig,
    /// Ordered by grid value, then by η in input order.
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub const CSV_HEADER: [&'static str; 3] = ["axis_value", "eta", "rel_error"];

    /// Rows for one η, in grid order.
    pub fn series(&self, eta: f64) -> Vec<&ScanRow> {
        self.rows.iter().filter(|r| r.eta == eta).collect()
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.rel_error.is_none()).count()
    }

    /// CSV with a header row; failed cells are written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // writing to a Vec cannot fail
        w.write_record(Self::CSV_HEADER).unwrap();
        for row in &self.rows {
            let err = row
                .rel_error
                .map_or_else(|| "nan".to_string(), |e| format!("{e:.16e}"));
            w.write_record([
                format!("{:.16e}", row.axis_value),
                format!("{:.16e}", row.eta),
                err,
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan table serializes")
    }
}

/// `|ã/a - 1|`, evaluated through logarithms in 2D where `a` may overflow.
pub(crate) fn relative_deviation(approx: &ScatteringLength, reference: &ScatteringLength) -> f64 {
    match (approx.log_value, reference.log_value) {
        (Some(la), Some(lr)) => (la - lr).exp_m1().abs(),
        _ if reference.value == 0.0 => approx.value.abs(),
        _ => (approx.value / reference.value - 1.0).abs(),
    }
}

fn single_extraction(dim: Dim, eta: f64, cfg: &SolverConfig) -> Result<ScatteringLength> {
    let pot = gaussian(Coupling::new(eta)?);
    extract(&solve(dim, &pot, cfg)?)
}

/// Relative deviation of the single-cutoff scattering length from its value
/// at `reference`, as one parameter of the solver is varied over `grid`.
///
/// Cells are evaluated in parallel; a failing cell is recorded in its row and
/// does not abort the scan.
pub fn convergence_scan(
    dim: Dim,
    etas: &[f64],
    axis: ScanAxis,
    grid: &[f64],
    reference: &SolverConfig,
) -> Result<ScanTable> {
    reference.validate()?;
    let refs: Vec<Result<ScatteringLength>> = etas
        .par_iter()
        .map(|&eta| single_extraction(dim, eta, reference))
        .collect();

    let cells: Vec<(f64, usize)> = grid
        .iter()
        .flat_map(|&x| (0..etas.len()).map(move |i| (x, i)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(x, i)| {
            let eta = etas[i];
            let outcome = refs[i].clone().and_then(|reference_a| {
                let cfg = axis.apply(reference, x)?;
                let a = single_extraction(dim, eta, &cfg)?;
                Ok(relative_deviation(&a, &reference_a))
            });
            match outcome {
                Ok(e) => ScanRow {
                    axis_value: x,
                    eta,
                    rel_error: Some(e),
                    failure: None,
                },
                Err(err) => ScanRow {
                    axis_value: x,
                    eta,
                    rel_error: None,
                    failure: Some(err.to_string()),
                },
            }
        })
        .collect();

    Ok(ScanTable {
        dim,
        axis,
        reference: *reference,
        rows,
    })
}
