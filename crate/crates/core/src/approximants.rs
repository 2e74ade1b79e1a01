//! Closed-form and pole-sum approximations of the Gaussian scattering length.
//!
//! The pole-sum models are
//!
//! ```text
//! 3D:  a(η) = Σ α_i η/(η - W_i)
//! 1D:  a(η) = √(2/π) + 2/(√π η) + Σ α_i η/(η - W_i)
//! 2D:  a(η) = √8 exp(-3γ/2 + 2/η + Σ α_i η/(η - W_i))
//! ```
//!
//! with `W_i` the bound-state thresholds. Given the `W_i`, every model is
//! linear in the weights `α_i` (2D after taking logarithms), which is how
//! [`fit_model`] determines them.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{EULER_GAMMA, SQRT_PI};
use crate::error::{Error, Result};
use crate::extraction::scattering_length;
use crate::poles::PoleSet;
use crate::radial_solver::SolverConfig;
use crate::Dim;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelForm {
    RationalSum,
    ExponentialSum,
}

impl ModelForm {
    pub fn for_dim(dim: Dim) -> Self {
        match dim {
            Dim::Two => ModelForm::ExponentialSum,
            _ => ModelForm::RationalSum,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormLevel {
    First,
    Improved,
}

/// Published thresholds, shared by every order of a table.
const W_3D: [f64; 4] = [2.68400465092, 17.7956995472, 45.5734799205, 85.9634003809];
const W_1D: [f64; 4] = [8.6490975, 30.106280, 64.193333, 110.88204];
const W_2D: [f64; 4] = [11.076903, 35.081301, 71.774188, 121.10485];

const ALPHA_3D: [&[f64]; 4] = [
    &[1.11942413969],
    &[1.12031910105, 0.378402820446],
    &[1.12034867267, 0.322141242778, 0.332600792963],
    &[1.12034897387, 0.326461774698, 0.135560767226, 0.375312300726],
];
const ALPHA_1D: [&[f64]; 4] = [
    &[0.52689372],
    &[0.51419392, 0.35899733],
    &[0.51460375, 0.20675606, 0.36766012],
    &[0.51459468, 0.24033314, 0.040512694, 0.44420188],
];
const ALPHA_2D: [&[f64]; 4] = [
    &[0.33553384],
    &[0.30476380, 0.20423041],
    &[0.30609585, 0.10986740, 0.19295017],
    &[0.30605919, 0.13171195, 0.017845686, 0.22077743],
];

/// The published thresholds for `dim`.
pub fn published_poles(dim: Dim) -> [f64; 4] {
    match dim {
        Dim::One => W_1D,
        Dim::Two => W_2D,
        Dim::Three => W_3D,
    }
}

/// Pole-sum model of order `n`.
///
/// The 3D model of order zero is the first closed form `(√π/2) η/(η-2)`,
/// stored as a single pole at `W = 2`; every other model holds `n` poles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct ApproximantModel {
    dim: Dim,
    order: usize,
    w: Vec<f64>,
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    dim: Dim,
    n: usize,
    #[serde(rename = "W")]
    w: Vec<f64>,
    alpha: Vec<f64>,
    form: ModelForm,
}

impl TryFrom<ModelRepr> for ApproximantModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        if r.form != ModelForm::for_dim(r.dim) {
            return Err(Error::InvalidModel(format!("form {:?} does not match {}", r.form, r.dim)));
        }
        ApproximantModel::new(r.dim, r.n, r.w, r.alpha)
    }
}

impl From<ApproximantModel> for ModelRepr {
    fn from(m: ApproximantModel) -> Self {
        ModelRepr {
            dim: m.dim,
            n: m.order,
            form: m.form(),
            w: m.w,
            alpha: m.alpha,
        }
    }
}

impl ApproximantModel {
    pub fn new(dim: Dim, order: usize, w: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        let expected = if dim == Dim::Three && order == 0 { 1 } else { order };
        if w.len() != expected || alpha.len() != expected {
            return Err(Error::InvalidModel(format!(
                "order {order} in {dim} needs {expected} poles and weights, got {} and {}",
                w.len(),
                alpha.len()
            )));
        }
        if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidModel("pole positions must be positive".into()));
        }
        if w.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidModel("pole positions must increase strictly".into()));
        }
        if alpha.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel("weights must be finite".into()));
        }
        Ok(ApproximantModel {
            dim,
            order,
            w,
            alpha,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn form(&self) -> ModelForm {
        ModelForm::for_dim(self.dim)
    }

    /// The same model with the first pole moved to `w1`.
    pub fn with_first_pole(&self, w1: f64) -> Result<Self> {
        let mut w = self.w.clone();
        match w.first_mut() {
            Some(first) => *first = w1,
            None => return Err(Error::InvalidModel("model has no poles".into())),
        }
        ApproximantModel::new(self.dim, self.order, w, self.alpha.clone())
    }

    fn pole_sum(&self, eta: f64) -> f64 {
        self.w
            .iter()
            .zip(&self.alpha)
            .map(|(w, a)| a * eta / (eta - w))
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

/// The η-dependent terms outside the pole sum: the additive offset in 1D
/// and 3D, the exponent offset (including `ln √8`) in 2D.
pub fn analytic_offset(dim: Dim, eta: f64) -> f64 {
    match dim {
        Dim::Three => 0.0,
        Dim::One => (2.0 / PI).sqrt() + 2.0 / (SQRT_PI * eta),
        Dim::Two => 8f64.sqrt().ln() - 1.5 * EULER_GAMMA + 2.0 / eta,
    }
}

/// Model value; signed infinity at a pole, and at `η = 0` in 1D and 2D.
pub fn eval_model(m: &ApproximantModel, eta: f64) -> f64 {
    match m.dim {
        Dim::Two => eval_model_log(m, eta).exp(),
        d => analytic_offset(d, eta) + m.pole_sum(eta),
    }
}

/// `ln a` of a 2D model, finite wherever [`eval_model`] over- or underflows.
/// For 1D and 3D models this is `ln |a|`.
pub fn eval_model_log(m: &ApproximantModel, eta: f64) -> f64 {
    match m.dim {
        Dim::Two => analytic_offset(Dim::Two, eta) + m.pole_sum(eta),
        _ => eval_model(m, eta).abs().ln(),
    }
}

/// The lowest-order analytic approximations.
pub fn eval_closed_form(dim: Dim, level: ClosedFormLevel, eta: f64) -> f64 {
    match (dim, level) {
        (Dim::Three, _) => 0.5 * SQRT_PI * eta / (eta - 2.0),
        (Dim::One, ClosedFormLevel::First) => 1.0 / SQRT_PI + FRAC_2_SQRT_PI / eta,
        (Dim::One, ClosedFormLevel::Improved) => (2.0 / PI).sqrt() + FRAC_2_SQRT_PI / eta,
        (Dim::Two, ClosedFormLevel::First) => 2.0 * (2.0 / eta - 1.5 * EULER_GAMMA).exp(),
        (Dim::Two, ClosedFormLevel::Improved) => 8f64.sqrt() * (2.0 / eta - 1.5 * EULER_GAMMA).exp(),
    }
}

/// The published model of order `n ∈ 0..=4`.
pub fn builtin_models(dim: Dim, n: usize) -> Result<ApproximantModel> {
    if n == 0 {
        return match dim {
            Dim::Three => ApproximantModel::new(dim, 0, vec![2.0], vec![0.5 * SQRT_PI]),
            _ => ApproximantModel::new(dim, 0, vec![], vec![]),
        };
    }
    let alphas = match dim {
        Dim::One => ALPHA_1D,
        Dim::Two => ALPHA_2D,
        Dim::Three => ALPHA_3D,
    };
    let alpha = alphas.get(n - 1).ok_or(Error::UnknownModel { dim, n })?;
    ApproximantModel::new(dim, n, published_poles(dim)[..n].to_vec(), alpha.to_vec())
}

/// Quantity whose squared residuals are minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    /// Residuals in `a` itself. Linear in 1D and 3D; in 2D solved by
    /// Gauss–Newton started from the [`FitTarget::LogValue`] solution.
    Value,
    /// Residuals in `ln a` (2D only), linear in the weights.
    LogValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    pub intervals: Vec<[f64; 2]>,
    /// Uniform samples per interval, endpoints included.
    pub grid: usize,
    /// Samples closer than this to any threshold are dropped.
    pub pole_exclusion: f64,
    pub target: FitTarget,
}

impl FitSpec {
    /// Intervals used for the published tables, 400 samples each.
    pub fn standard(dim: Dim) -> Self {
        let intervals = match dim {
            Dim::Three => vec![[0.0, 2.68], [2.69, 14.0]],
            Dim::One => vec![[1.0, 8.0]],
            Dim::Two => vec![[1.0, 10.0]],
        };
        FitSpec {
            intervals,
            grid: 400,
            pole_exclusion: 0.05,
            target: FitTarget::Value,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.intervals.is_empty() {
            return Err(Error::InvalidFitSpec("no intervals".into()));
        }
        if let Some(iv) = self
            .intervals
            .iter()
            .find(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::InvalidFitSpec(format!("bad interval {iv:?}")));
        }
        if self.grid < 2 || self.grid < 10 * n {
            return Err(Error::InvalidFitSpec(format!(
                "grid of {} samples is too coarse for {n} poles",
                self.grid
            )));
        }
        if !(self.pole_exclusion >= 0.0) {
            return Err(Error::InvalidFitSpec("negative pole exclusion".into()));
        }
        Ok(())
    }

    fn excluded(&self, eta: f64, poles: &[f64]) -> bool {
        poles.iter().any(|w| (eta - w).abs() < self.pole_exclusion)
    }

    /// Sample couplings: the uniform grid on each interval minus pole windows.
    pub fn sample_etas(&self, poles: &[f64]) -> Vec<f64> {
        let n = self.grid.max(2);
        self.intervals
            .iter()
            .flat_map(|&[lo, hi]| (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .filter(|&eta| !self.excluded(eta, poles))
            .collect()
    }
}

/// Numerical scattering lengths at the sample couplings of `spec`.
///
/// Samples whose value is flagged or diverging are dropped.
pub fn sample_data(
    dim: Dim,
    spec: &FitSpec,
    poles: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<(f64, f64)>> {
    let etas = spec.sample_etas(poles);
    let values = etas
        .par_iter()
        .map(|&eta| scattering_length(dim, eta, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(etas
        .into_iter()
        .zip(values)
        .filter(|(_, a)| a.is_clean())
        .map(|(eta, a)| (eta, a.value))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: ApproximantModel,
    pub target: FitTarget,
    pub samples: usize,
    /// Residuals `model - data` in `a`, over the samples used.
    pub rms_residual: f64,
    pub max_residual: f64,
    pub iterations: usize,
}

/// Residual statistics of `m` against data, in `a`.
pub fn residuals(m: &ApproximantModel, data: &[(f64, f64)]) -> (f64, f64) {
    let mut sq = 0.0;
    let mut max = 0.0f64;
    for &(eta, a) in data {
        let d = (eval_model(m, eta) - a).abs();
        sq += d * d;
        max = max.max(d);
    }
    ((sq / data.len().max(1) as f64).sqrt(), max)
}

/// Least-squares solution of `A x ≈ y` by Householder QR.
fn least_squares(a: DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::RankDeficient { n, samples: m });
    }
    let qr = a.qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    if diag.iter().any(|&d| !(d > 1e-12 * largest)) {
        return Err(Error::RankDeficient { n, samples: m });
    }
    let rhs = qr.q().transpose() * y;
    r.solve_upper_triangular(&rhs)
        .ok_or(Error::RankDeficient { n, samples: m })
}

fn design(data: &[(f64, f64)], w: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(data.len(), w.len(), |i, j| {
        let eta = data[i].0;
        eta / (eta - w[j])
    })
}

/// Fits the weights of an order-`n` model with the first `n` thresholds of
/// `poles` held fixed.
pub fn fit_model(
    dim: Dim,
    n: usize,
    poles: &PoleSet,
    spec: &FitSpec,
    data: &[(f64, f64)],
) -> Result<FitReport> {
    if poles.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: poles.dim,
        });
    }
    spec.validate(n)?;
    if n > poles.len() {
        return Err(Error::InvalidFitSpec(format!(
            "order {n} needs {n} thresholds, only {} given",
            poles.len()
        )));
    }
    if spec.target == FitTarget::LogValue && dim != Dim::Two {
        return Err(Error::InvalidFitSpec("log-value target applies to 2D only".into()));
    }
    let all_w = poles.positions();
    let data: Vec<(f64, f64)> = data
        .iter()
        .copied()
        .filter(|&(eta, a)| eta.is_finite() && a.is_finite() && !spec.excluded(eta, &all_w))
        .filter(|&(eta, a)| dim == Dim::Three || (eta != 0.0 && (dim == Dim::One || a > 0.0)))
        .collect();

    let finish = |model: ApproximantModel, iterations: usize| {
        let (rms, max) = residuals(&model, &data);
        FitReport {
            model,
            target: spec.target,
            samples: data.len(),
            rms_residual: rms,
            max_residual: max,
            iterations,
        }
    };

    if n == 0 {
        return Ok(finish(builtin_models(dim, 0)?, 0));
    }
    if data.len() < n {
        return Err(Error::RankDeficient {
            n,
            samples: data.len(),
        });
    }
    let w = all_w[..n].to_vec();
    let a = design(&data, &w);

    let linear_target: DVector<f64> = match dim {
        Dim::Two => DVector::from_iterator(
            data.len(),
            data.iter().map(|&(eta, v)| v.ln() - analytic_offset(dim, eta)),
        ),
        _ => DVector::from_iterator(
            data.len(),
            data.iter().map(|&(eta, v)| v - analytic_offset(dim, eta)),
        ),
    };
    let alpha = least_squares(a.clone(), &linear_target)?;
    let model = ApproximantModel::new(dim, n, w.clone(), alpha.iter().copied().collect())?;
    if dim != Dim::Two || spec.target == FitTarget::LogValue {
        return Ok(finish(model, 1));
    }

    let (model, iterations) = gauss_newton_2d(model, &data, &a)?;
    Ok(finish(model, iterations))
}

/// Minimizes the squared residuals in `a` for a 2D model by damped
/// Gauss–Newton iterations on the weights.
fn gauss_newton_2d(
    start: ApproximantModel,
    data: &[(f64, f64)],
    basis: &DMatrix<f64>,
) -> Result<(ApproximantModel, usize)> {
    let sse = |m: &ApproximantModel| -> f64 {
        data.iter()
            .map(|&(eta, a)| (eval_model(m, eta) - a).powi(2))
            .sum()
    };
    let mut model = start;
    let mut current = sse(&model);
    let mut iterations = 1;
    for _ in 0..100 {
        iterations += 1;
        let values: Vec<f64> = data.iter().map(|&(eta, _)| eval_model(&model, eta)).collect();
        let jac = DMatrix::from_fn(data.len(), model.order, |i, j| values[i] * basis[(i, j)]);
        let neg_res = DVector::from_iterator(
            data.len(),
            data.iter().zip(&values).map(|(&(_, a), v)| a - v),
        );
        let delta = least_squares(jac, &neg_res)?;

        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-6 {
            let alpha: Vec<f64> = model
                .alpha
                .iter()
                .zip(delta.iter())
                .map(|(a, d)| a + step * d)
                .collect();
            let trial = ApproximantModel::new(Dim::Two, model.order, model.w.clone(), alpha)?;
            let s = sse(&trial);
            if s <= current {
                accepted = Some((trial, s));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, s)) = accepted else {
            break;
        };
        let scale = 1.0 + model.alpha.iter().map(|a| a.abs()).fold(0.0, f64::max);
        let moved = step * delta.amax();
        model = trial;
        current = s;
        if moved <= 1e-13 * scale {
            break;
        }
    }
    Ok((model, iterations))
}
