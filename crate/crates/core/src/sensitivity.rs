//! How the precision of the first threshold limits the 3D model near it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximants::{eval_model, ApproximantModel};
use crate::error::{Error, Result};
use crate::extraction::scattering_length;
use crate::radial_solver::SolverConfig;
use crate::Dim;

/// Rounds `w` to `ndigit` digits after the decimal point.
pub fn truncate_digits(w: f64, ndigit: u32) -> Result<f64> {
    if ndigit == 0 || ndigit > 17 {
        return Err(Error::InvalidArgument(format!("ndigit must be in 1..=17, got {ndigit}")));
    }
    let text = format!("{:.*}", ndigit as usize, w);
    Ok(text.parse().expect("formatted float parses"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub ndigit: Vec<u32>,
    pub eta_grid: Vec<f64>,
    /// Numerical scattering lengths; `None` where the reference was unusable.
    pub reference: Vec<Option<f64>>,
    /// `errors[i][j] = |model(ndigit[i]) − reference|` at `eta_grid[j]`.
    pub errors: Vec<Vec<Option<f64>>>,
    pub reference_w1: f64,
}

impl SensitivityReport {
    pub const CSV_HEADER: [&'static str; 3] = ["ndigit", "eta", "abs_error"];

    /// `|model − reference| / |reference|`.
    pub fn relative_error(&self, i: usize, j: usize) -> Option<f64> {
        Some(self.errors[i][j]? / self.reference[j]?.abs())
    }

    /// CSV with a header row; masked cells are written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER).unwrap();
        for (i, nd) in self.ndigit.iter().enumerate() {
            for (j, eta) in self.eta_grid.iter().enumerate() {
                let err = self.errors[i][j].map_or_else(|| "nan".to_string(), |e| format!("{e:.16e}"));
                w.write_record([nd.to_string(), format!("{eta:.16e}"), err]).unwrap();
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Solver settings for reference values: the finest tolerance `f64` supports.
pub fn reference_config() -> SolverConfig {
    SolverConfig::default().with_p(13)
}

/// Numerical 3D scattering lengths on `etas`, masking flagged values.
pub fn reference_values(etas: &[f64], cfg: &SolverConfig) -> Vec<Option<f64>> {
    etas.par_iter()
        .map(|&eta| {
            scattering_length(Dim::Three, eta, cfg)
                .ok()
                .filter(|a| a.is_clean())
                .map(|a| a.value)
        })
        .collect()
}

/// High-precision position of the first 3D threshold.
pub const REFERENCE_W1: f64 = 2.684004650924;

/// Tabulates `|model − reference|` for copies of `model` whose first pole
/// is [`REFERENCE_W1`] rounded to each entry of `ndigits`; every other
/// parameter is kept.
pub fn pole_sensitivity(
    model: &ApproximantModel,
    ndigits: &[u32],
    eta_grid: &[f64],
    reference: &[Option<f64>],
) -> Result<SensitivityReport> {
    pole_sensitivity_with(model, REFERENCE_W1, ndigits, eta_grid, reference)
}

/// As [`pole_sensitivity`] with the untruncated first pole given explicitly.
pub fn pole_sensitivity_with(
    model: &ApproximantModel,
    w1: f64,
    ndigits: &[u32],
    eta_grid: &[f64],
    reference: &[Option<f64>],
) -> Result<SensitivityReport> {
    if model.dim() != Dim::Three {
        return Err(Error::UnsupportedDimension {
            dim: model.dim(),
            reason: "the sensitivity study concerns the 3D model",
        });
    }
    if reference.len() != eta_grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} reference values for {} couplings",
            reference.len(),
            eta_grid.len()
        )));
    }
    let errors = ndigits
        .iter()
        .map(|&nd| {
            let m = model.with_first_pole(truncate_digits(w1, nd)?)?;
            Ok(eta_grid
                .iter()
                .zip(reference)
                .map(|(&eta, r)| r.map(|r| (eval_model(&m, eta) - r).abs()))
                .collect())
        })
        .collect::<Result<Vec<Vec<Option<f64>>>>>()?;
    Ok(SensitivityReport {
        ndigit: ndigits.to_vec(),
        eta_grid: eta_grid.to_vec(),
        reference: reference.to_vec(),
        errors,
        reference_w1: w1,
    })
}
