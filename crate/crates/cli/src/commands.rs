//! One function per subcommand. Each returns its result in both formats and
//! leaves file handling to `main`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use scatlen::approximants::{published_poles, sample_data};
use scatlen::oracles::{ls_solve, series_a1d, LsGrid};
use scatlen::sensitivity::{pole_sensitivity_with, reference_config, reference_values};
use scatlen::{
    builtin_models, convergence_scan, enumerate_poles, fit_model, scattering_length,
    ApproximantModel, Dim, FitSpec, FitTarget, PoleScanConfig, PoleSet, ScanAxis,
    ScatteringLength, SolverConfig, REFERENCE_W1,
};

use crate::grid::Range;
use crate::output::{num, opt, Format, Rendered};
use crate::Failure;

fn dim_of(d: u8) -> Dim {
    // the parser restricts d to 1..=3
    Dim::try_from(d).expect("dimension validated by the parser")
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<scatlen::Error> for Failure {
    fn from(e: scatlen::Error) -> Self {
        use scatlen::Error::*;
        match e {
            InvalidDimension(_) | InvalidConfig(_) | InvalidArgument(_) | UnknownModel { .. }
            | InvalidFitSpec(_) | InvalidModel(_) | NoSignChange { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SolverArgs {
    /// Accuracy exponent: local error tolerance 10^-p.
    #[arg(long, default_value_t = 11)]
    pub p: u32,
    #[arg(long = "rmax", default_value_t = 10.0)]
    pub r_max: f64,
    /// 2D start offset.
    #[arg(long = "eps", default_value_t = 1e-6)]
    pub epsilon: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let cfg = SolverConfig::default()
            .with_p(self.p)
            .with_r_max(self.r_max)
            .with_epsilon(self.epsilon);
        cfg.validate()?;
        Ok(cfg)
    }
}

// compute

#[derive(Args, Clone, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ComputeArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
    #[arg(long, required_unless_present = "eta_range", conflicts_with = "eta_range")]
    pub eta: Option<f64>,
    /// start:stop:step
    #[arg(long)]
    pub eta_range: Option<Range>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Serialize)]
struct ComputeRow {
    eta: f64,
    a_s: f64,
    log_a_s: Option<f64>,
    err_estimate: f64,
    near_pole: bool,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl ComputeRow {
    fn new(eta: f64, r: scatlen::Result<ScatteringLength>) -> Self {
        match r {
            Ok(a) => ComputeRow {
                eta,
                a_s: a.value,
                log_a_s: a.log_value,
                err_estimate: a.err_estimate,
                near_pole: a.near_pole,
                converged: a.converged,
                error: None,
            },
            Err(e) => ComputeRow {
                eta,
                a_s: f64::NAN,
                log_a_s: None,
                err_estimate: f64::NAN,
                near_pole: false,
                converged: false,
                error: Some(e.to_string()),
            },
        }
    }

    fn clean(&self) -> bool {
        self.error.is_none() && self.converged && !self.near_pole && self.a_s.is_finite()
    }
}

pub fn compute(args: &ComputeArgs) -> Result<Rendered, Failure> {
    let dim = dim_of(args.dim);
    let cfg = args.solver.config()?;
    let etas = match (args.eta, args.eta_range) {
        (Some(eta), _) => vec![eta],
        (None, Some(r)) => r.points(),
        (None, None) => unreachable!("the parser requires one of them"),
    };
    if let Some(bad) = etas.iter().find(|e| !e.is_finite()) {
        return Err(usage(format!("coupling must be finite, got {bad}")));
    }
    let rows: Vec<ComputeRow> = etas
        .par_iter()
        .map(|&eta| ComputeRow::new(eta, scattering_length(dim, eta, &cfg)))
        .collect();
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("η = {}: {}", r.eta, r.error.as_deref().unwrap_or_default());
    }
    let flagged = rows.iter().any(|r| !r.clean());
    Ok(Rendered::new(
        "compute.v1",
        Format::Csv,
        &["eta", "a_s", "log_a_s", "err_estimate", "near_pole", "converged"],
        rows.iter().map(|r| {
            vec![
                num(r.eta),
                num(r.a_s),
                opt(r.log_a_s),
                num(r.err_estimate),
                r.near_pole.to_string(),
                r.converged.to_string(),
            ]
        }),
        &rows,
        flagged,
    ))
}

// poles

#[derive(Args, Clone, Debug, Serialize)]
pub struct PolesArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
    /// Upper end of the coupling scan.
    #[arg(long = "max")]
    pub eta_max: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Coarse scan spacing.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long, default_value_t = 13)]
    pub p: u32,
    #[arg(long = "rmax", default_value_t = 12.0)]
    pub r_max: f64,
}

pub fn poles(args: &PolesArgs) -> Result<Rendered, Failure> {
    let cfg = PoleScanConfig {
        solver: SolverConfig::default().with_p(args.p).with_r_max(args.r_max),
        step: args.step,
        tol: args.tol,
    };
    if !(args.tol > 0.0) {
        return Err(usage(format!("tolerance must be positive, got {}", args.tol)));
    }
    let set = enumerate_poles(dim_of(args.dim), args.eta_max, &cfg)?;
    for w in &set.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Rendered::new(
        "poles.v1",
        Format::Json,
        &["index", "w", "bracket_lo", "bracket_hi", "residual"],
        set.poles.iter().enumerate().map(|(i, p)| {
            vec![
                (i + 1).to_string(),
                num(p.w),
                num(p.bracket[0]),
                num(p.bracket[1]),
                num(p.residual),
            ]
        }),
        &set,
        false,
    ))
}

// fit

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum TargetArg {
    Value,
    LogValue,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct FitArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
    pub n: u8,
    /// Fit interval `lo:hi`; repeatable. Defaults to the standard intervals.
    #[arg(long = "interval", value_parser = parse_interval)]
    pub intervals: Vec<[f64; 2]>,
    /// Samples per interval.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// Samples closer than this to a threshold are dropped.
    #[arg(long, default_value_t = 0.05)]
    pub exclusion: f64,
    #[arg(long, value_enum, default_value_t = TargetArg::Value)]
    pub target: TargetArg,
    /// Locate the thresholds numerically instead of using the published ones.
    #[arg(long)]
    pub scan_poles: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

fn parse_interval(s: &str) -> Result<[f64; 2], String> {
    let bounds = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    match bounds[..] {
        [lo, hi] if lo < hi => Ok([lo, hi]),
        _ => Err(format!("expected lo:hi with lo < hi, got '{s}'")),
    }
}

fn pole_set(dim: Dim, scan: bool) -> Result<PoleSet, Failure> {
    if scan {
        Ok(enumerate_poles(dim, table_eta_max(dim), &PoleScanConfig::default())?)
    } else {
        Ok(PoleSet::from_positions(dim, &published_poles(dim)))
    }
}

/// Scan limit covering the four tabulated thresholds.
fn table_eta_max(dim: Dim) -> f64 {
    match dim {
        Dim::One => 115.0,
        Dim::Two => 125.0,
        Dim::Three => 90.0,
    }
}

pub fn fit(args: &FitArgs) -> Result<Rendered, Failure> {
    let dim = dim_of(args.dim);
    let mut spec = FitSpec::standard(dim);
    if !args.intervals.is_empty() {
        spec.intervals = args.intervals.clone();
    }
    spec.grid = args.grid;
    spec.pole_exclusion = args.exclusion;
    spec.target = match args.target {
        TargetArg::Value => FitTarget::Value,
        TargetArg::LogValue => FitTarget::LogValue,
    };
    spec.validate(usize::from(args.n))?;
    let poles = pole_set(dim, args.scan_poles)?;
    let data = sample_data(dim, &spec, &poles.positions(), &args.solver.config()?)?;
    let report = fit_model(dim, usize::from(args.n), &poles, &spec, &data)?;
    let m = &report.model;
    Ok(Rendered::new(
        "fit.v1",
        Format::Json,
        &["index", "W", "alpha"],
        m.w().iter().zip(m.alpha()).enumerate().map(|(i, (w, a))| {
            vec![(i + 1).to_string(), num(*w), num(*a)]
        }),
        &report,
        false,
    ))
}

// tables

#[derive(Args, Clone, Debug, Serialize)]
pub struct TablesArgs {
    /// Fit with the published thresholds rather than freshly located ones.
    #[arg(long)]
    pub published_poles: bool,
}

#[derive(Deserialize)]
struct TablesFixture {
    models: Vec<ApproximantModel>,
}

#[derive(Serialize)]
struct TableRow {
    dim: Dim,
    n: usize,
    quantity: &'static str,
    index: usize,
    published: f64,
    regenerated: f64,
    rel_dev: f64,
    tolerance: f64,
    ok: bool,
}

const W_TOLERANCE: f64 = 1e-6;
const ALPHA_TOLERANCE: f64 = 1e-2;

pub fn tables(args: &TablesArgs, fixtures: &Path) -> Result<Rendered, Failure> {
    let path = fixtures.join("published_tables.v1.json");
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let fixture: TablesFixture =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let published: BTreeMap<(Dim, usize), ApproximantModel> = fixture
        .models
        .into_iter()
        .map(|m| ((m.dim(), m.order()), m))
        .collect();
    let lookup = |dim: Dim, n: usize| {
        published
            .get(&(dim, n))
            .ok_or_else(|| usage(format!("fixture has no {dim} model with n = {n}")))
    };

    let cfg = SolverConfig::default();
    let mut rows = Vec::new();
    for dim in [Dim::Three, Dim::One, Dim::Two] {
        let poles = pole_set(dim, !args.published_poles)?;
        let table = lookup(dim, 4)?;
        for (i, (&w, &p)) in poles.positions().iter().zip(table.w()).enumerate() {
            rows.push(row(dim, 4, "W", i + 1, p, w, W_TOLERANCE));
        }
        if poles.len() != table.w().len() {
            return Err(Failure::Internal(format!(
                "{dim}: {} thresholds located, {} published",
                poles.len(),
                table.w().len()
            )));
        }
        let spec = FitSpec::standard(dim);
        let data = sample_data(dim, &spec, &poles.positions(), &cfg)?;
        for n in 1..=4 {
            let fit = fit_model(dim, n, &poles, &spec, &data)?;
            let p = lookup(dim, n)?.alpha()[0];
            rows.push(row(dim, n, "alpha", 1, p, fit.model.alpha()[0], ALPHA_TOLERANCE));
        }
    }
    let flagged = rows.iter().any(|r| !r.ok);
    Ok(Rendered::new(
        "tables.v1",
        Format::Json,
        &["dim", "n", "quantity", "index", "published", "regenerated", "rel_dev", "tolerance", "ok"],
        rows.iter().map(|r| {
            vec![
                r.dim.as_u8().to_string(),
                r.n.to_string(),
                r.quantity.to_string(),
                r.index.to_string(),
                num(r.published),
                num(r.regenerated),
                num(r.rel_dev),
                num(r.tolerance),
                r.ok.to_string(),
            ]
        }),
        &rows,
        flagged,
    ))
}

fn row(
    dim: Dim,
    n: usize,
    quantity: &'static str,
    index: usize,
    published: f64,
    regenerated: f64,
    tolerance: f64,
) -> TableRow {
    let rel_dev = (regenerated / published - 1.0).abs();
    TableRow {
        dim,
        n,
        quantity,
        index,
        published,
        regenerated,
        rel_dev,
        tolerance,
        ok: rel_dev <= tolerance,
    }
}

// converge

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum AxisArg {
    P,
    RMax,
    Epsilon,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ConvergeArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Values of the varied parameter, start:stop:step.
    #[arg(long)]
    pub grid: Range,
    /// Comma-separated couplings.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub eta: Vec<f64>,
    /// Reference solver settings.
    #[arg(long = "ref-p", default_value_t = 13)]
    pub ref_p: u32,
    #[arg(long = "ref-rmax", default_value_t = 10.0)]
    pub ref_r_max: f64,
    #[arg(long = "ref-eps", default_value_t = 1e-6)]
    pub ref_epsilon: f64,
}

pub fn converge(args: &ConvergeArgs) -> Result<Rendered, Failure> {
    let axis = match args.axis {
        AxisArg::P => ScanAxis::Precision,
        AxisArg::RMax => ScanAxis::Cutoff,
        AxisArg::Epsilon => ScanAxis::Epsilon,
    };
    let reference = SolverArgs {
        p: args.ref_p,
        r_max: args.ref_r_max,
        epsilon: args.ref_epsilon,
    }
    .config()?;
    let etas: Vec<f64> = args.eta.clone();
    if etas.is_empty() {
        return Err(usage("at least one coupling required"));
    }
    let table = convergence_scan(dim_of(args.dim), &etas, axis, &args.grid.points(), &reference)?;
    for r in table.rows.iter().filter(|r| r.failure.is_some()) {
        eprintln!("{} = {}, η = {}: {}", axis, r.axis_value, r.eta, r.failure.as_deref().unwrap_or_default());
    }
    Ok(Rendered {
        schema: "converge.v1",
        default_format: Format::Csv,
        csv: table.to_csv(),
        json: table.to_json() + "\n",
        flagged: table.failed() > 0,
    })
}

// sensitivity

#[derive(Args, Clone, Debug, Serialize)]
pub struct SensitivityArgs {
    /// Comma-separated digit counts after the decimal point.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 12])]
    pub ndigit: Vec<u32>,
    #[arg(long)]
    pub eta_range: Range,
    /// Order of the 3D model.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), default_value_t = 4)]
    pub n: u8,
    /// Untruncated first threshold.
    #[arg(long, default_value_t = REFERENCE_W1)]
    pub w1: f64,
}

pub fn sensitivity(args: &SensitivityArgs) -> Result<Rendered, Failure> {
    let model = builtin_models(Dim::Three, usize::from(args.n))?;
    let etas = args.eta_range.points();
    let reference = reference_values(&etas, &reference_config());
    let rep = pole_sensitivity_with(&model, args.w1, &args.ndigit, &etas, &reference)?;
    let flagged = rep.errors.iter().flatten().any(Option::is_none);
    Ok(Rendered {
        schema: "sensitivity.v1",
        default_format: Format::Csv,
        csv: rep.to_csv(),
        json: serde_json::to_string_pretty(&rep).expect("report serializes") + "\n",
        flagged,
    })
}

// oracle

#[derive(Args, Clone, Debug, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
    /// Comma-separated couplings.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub eta: Vec<f64>,
    /// Coarsest Volterra grid.
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 8.0)]
    pub y_max: f64,
    /// Truncation order of the 1D power series.
    #[arg(long, default_value_t = 60)]
    pub series_order: usize,
    /// Agreement required between the methods.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Serialize)]
struct OracleRow {
    dim: Dim,
    eta: f64,
    ode: f64,
    volterra: f64,
    series: Option<f64>,
    spread: f64,
    agree: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

/// Relative distance, through logarithms in 2D.
fn rel(a: &ScatteringLength, b: &ScatteringLength) -> f64 {
    match (a.log_value, b.log_value) {
        (Some(x), Some(y)) => (x - y).exp_m1().abs(),
        _ => (a.value / b.value - 1.0).abs(),
    }
}

pub fn oracle(args: &OracleArgs) -> Result<Rendered, Failure> {
    let dim = dim_of(args.dim);
    let grid = LsGrid {
        y_max: args.y_max,
        nodes: args.nodes,
    };
    grid.validate()?;
    if args.eta.is_empty() {
        return Err(usage("at least one coupling required"));
    }
    let cfg = reference_config();
    let rows = args
        .eta
        .par_iter()
        .map(|&eta| -> Result<OracleRow, Failure> {
            let ode = scattering_length(dim, eta, &cfg)?;
            let ls = ls_solve(dim, eta, &grid)?;
            let mut notes = Vec::new();
            let mut spread = rel(&ls, &ode);
            let series = if dim == Dim::One {
                match series_a1d(eta, args.series_order) {
                    Ok(s) => {
                        spread = spread.max(rel(&s, &ode)).max(rel(&s, &ls));
                        Some(s.value)
                    }
                    Err(e) => {
                        notes.push(format!("series: {e}"));
                        None
                    }
                }
            } else {
                None
            };
            let complete = dim != Dim::One || series.is_some();
            Ok(OracleRow {
                dim,
                eta,
                ode: ode.value,
                volterra: ls.value,
                series,
                spread,
                agree: complete && spread <= args.tol,
                notes,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    for r in &rows {
        for n in &r.notes {
            eprintln!("η = {}: {n}", r.eta);
        }
    }
    let flagged = rows.iter().any(|r| !r.agree);
    Ok(Rendered::new(
        "oracle.v1",
        Format::Csv,
        &["dim", "eta", "ode", "volterra", "series", "spread", "agree"],
        rows.iter().map(|r| {
            vec![
                r.dim.as_u8().to_string(),
                num(r.eta),
                num(r.ode),
                num(r.volterra),
                opt(r.series),
                num(r.spread),
                r.agree.to_string(),
            ]
        }),
        &rows,
        flagged,
    ))
}
