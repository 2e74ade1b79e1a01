//! Bound-state thresholds: the couplings at which the scattering length
//! diverges.
//!
//! The search works on the normalized endpoint slope
//!
//! ```text
//! f(η) = r u'(r) / hypot(u(r), r u'(r))        (Φ in place of u in 2D)
//! ```
//!
//! at a fixed cutoff. It vanishes exactly where `a` diverges, is free of the
//! overflow that plagues `u'` itself in deep wells, and unlike `a` it does
//! not change sign at the zero crossings between poles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{gaussian, Coupling};
use crate::radial_solver::{solve, SolverConfig};
use crate::Dim;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    pub w: f64,
    pub bracket: [f64; 2],
    /// Width of the final bracket.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub dim: Dim,
    pub poles: Vec<PoleEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PoleSet {
    /// A set built from known positions, e.g. a published table.
    pub fn from_positions(dim: Dim, ws: &[f64]) -> Self {
        PoleSet {
            dim,
            poles: ws
                .iter()
                .map(|&w| PoleEntry {
                    w,
                    bracket: [w, w],
                    residual: 0.0,
                })
                .collect(),
            warnings: Vec::new(),
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p.w).collect()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pole set serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleScanConfig {
    pub solver: SolverConfig,
    /// Coarse grid spacing in η.
    pub step: f64,
    /// Target width of each refined bracket.
    pub tol: f64,
}

impl Default for PoleScanConfig {
    fn default() -> Self {
        PoleScanConfig {
            solver: SolverConfig::default().with_p(13).with_r_max(12.0),
            step: 0.5,
            tol: 1e-12,
        }
    }
}

/// Indicator value and bound-state count at one coupling.
#[derive(Clone, Copy, Debug)]
struct Probe {
    eta: f64,
    f: f64,
    nodes: usize,
}

fn probe(dim: Dim, eta: f64, cfg: &SolverConfig) -> Result<Probe> {
    let sol = solve(dim, &gaussian(Coupling::new(eta)?), cfg)?;
    let slope = sol.r_end * sol.derivative;
    let norm = sol.value.hypot(slope);
    Ok(Probe {
        eta,
        f: if norm == 0.0 { 0.0 } else { slope / norm },
        nodes: sol.nodes,
    })
}

/// The normalized endpoint slope `f(η)` at `cfg.r_max`.
pub fn indicator(dim: Dim, eta: f64, cfg: &SolverConfig) -> Result<f64> {
    probe(dim, eta, cfg).map(|p| p.f)
}

/// Refines a bracket `[lo, hi]` with a sign change of the indicator until its
/// width is below `tol`, using the default pole-search solver settings.
pub fn find_pole(dim: Dim, bracket: [f64; 2], tol: f64) -> Result<PoleEntry> {
    find_pole_with(dim, bracket, tol, &PoleScanConfig::default().solver)
}

/// As [`find_pole`] with explicit solver settings.
///
/// Regula falsi with the Illinois modification; a bisection step is forced
/// whenever two consecutive steps fail to halve the bracket.
pub fn find_pole_with(
    dim: Dim,
    bracket: [f64; 2],
    tol: f64,
    cfg: &SolverConfig,
) -> Result<PoleEntry> {
    let [mut a, mut b] = bracket;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!("invalid bracket [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut fa = indicator(dim, a, cfg)?;
    let mut fb = indicator(dim, b, cfg)?;
    let exact = |w: f64| PoleEntry {
        w,
        bracket: [w, w],
        residual: 0.0,
    };
    if fa == 0.0 {
        return Ok(exact(a));
    }
    if fb == 0.0 {
        return Ok(exact(b));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }

    // +1 when the last update moved `a`, -1 when it moved `b`
    let mut side = 0i8;
    let mut width_before = [b - a, b - a];
    for _ in 0..400 {
        let width = b - a;
        if width < tol {
            break;
        }
        let stalled = width > 0.5 * width_before[0];
        let mut x = if stalled {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        if x <= a || x >= b {
            // a and b are adjacent floats
            break;
        }
        let fx = indicator(dim, x, cfg)?;
        width_before = [width_before[1], width];
        if fx == 0.0 {
            return Ok(exact(x));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Ok(PoleEntry {
        w: 0.5 * (a + b),
        bracket: [a, b],
        residual: b - a,
    })
}

/// Smallest coupling probed by the coarse scan. The 1D and 2D indicators
/// vanish identically at `η = 0`, where the free solution is flat.
const SCAN_START: f64 = 1e-3;
const MAX_SUBDIVISION_DEPTH: u32 = 6;

fn coarse_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Brackets containing exactly one threshold each, recursing into cells
/// whose bound-state count jumps by more than one.
fn brackets_in(
    dim: Dim,
    probes: &[Probe],
    cfg: &SolverConfig,
    depth: u32,
    warnings: &mut Vec<String>,
) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    for pair in probes.windows(2) {
        let (l, r) = (pair[0], pair[1]);
        let jump = r.nodes.abs_diff(l.nodes);
        if jump >= 2 && depth < MAX_SUBDIVISION_DEPTH {
            warnings.push(format!(
                "{jump} thresholds in coarse cell [{}, {}]; rescanning finer",
                l.eta, r.eta
            ));
            let fine = coarse_grid(l.eta, r.eta, (r.eta - l.eta) / 8.0)
                .into_par_iter()
                .map(|eta| probe(dim, eta, cfg))
                .collect::<Result<Vec<_>>>()?;
            out.extend(brackets_in(dim, &fine, cfg, depth + 1, warnings)?);
        } else if l.f.signum() != r.f.signum() && l.f != 0.0 && r.f != 0.0 {
            out.push([l.eta, r.eta]);
        }
    }
    Ok(out)
}

/// All thresholds in `(0, eta_max)`.
pub fn enumerate_poles(dim: Dim, eta_max: f64, cfg: &PoleScanConfig) -> Result<PoleSet> {
    if !eta_max.is_finite() {
        return Err(Error::InvalidArgument(format!("eta_max must be finite, got {eta_max}")));
    }
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(Error::InvalidArgument(format!("scan step must be positive, got {}", cfg.step)));
    }
    cfg.solver.validate()?;
    let mut set = PoleSet {
        dim,
        poles: Vec::new(),
        warnings: Vec::new(),
    };
    if eta_max <= SCAN_START {
        return Ok(set);
    }

    let probes = coarse_grid(SCAN_START, eta_max, cfg.step)
        .into_par_iter()
        .map(|eta| probe(dim, eta, &cfg.solver))
        .collect::<Result<Vec<_>>>()?;
    let brackets = brackets_in(dim, &probes, &cfg.solver, 0, &mut set.warnings)?;
    let mut poles = brackets
        .into_par_iter()
        .map(|b| find_pole_with(dim, b, cfg.tol, &cfg.solver))
        .collect::<Result<Vec<_>>>()?;
    poles.retain(|p| p.w < eta_max);
    poles.sort_by(|x, y| x.w.total_cmp(&y.w));
    set.poles = poles;
    Ok(set)
}
