//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p scatlen --test acceptance`.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use scatlen::approximants::{published_poles, residuals, sample_data};
use scatlen::consts::{EULER_GAMMA, SQRT_PI};
use scatlen::oracles::{ls_solve, series_a1d, LsGrid};
use scatlen::radial_solver::ScanRow;
use scatlen::sensitivity::{reference_config, reference_values};
use scatlen::truncate_digits;
use scatlen::{
    builtin_models, convergence_scan, enumerate_poles, eval_model, extract, fit_model,
    pole_sensitivity, scattering_length, Dim, FitSpec, PoleScanConfig, PoleSet, RadialSolution,
    ScanAxis, SolverConfig,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const W1_3D: f64 = 2.684004650924;

fn c1_poles() -> Outcome {
    let start = Instant::now();
    let targets = [(Dim::Three, 90.0), (Dim::One, 115.0), (Dim::Two, 125.0)];
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    let mut pass = true;
    let mut w1 = f64::NAN;
    for (dim, eta_max) in targets {
        match enumerate_poles(dim, eta_max, &PoleScanConfig::default()) {
            Ok(set) => {
                let found = set.positions();
                let published = published_poles(dim);
                if found.len() != published.len() {
                    pass = false;
                    notes.push(format!("{dim}: {} poles found", found.len()));
                    continue;
                }
                for (f, p) in found.iter().zip(published) {
                    worst = worst.max((f / p - 1.0).abs());
                }
                if dim == Dim::Three {
                    w1 = found[0];
                }
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{dim}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let w1_err = (w1 - W1_3D).abs();
    pass &= worst < 1e-6 && w1_err < 1e-9 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "max rel dev {worst:.2e}; W1(3D) = {w1:.13} (|Δ| = {w1_err:.1e}); {:.1}s {}",
            elapsed.as_secs_f64(),
            notes.join(", ")
        ),
    )
}

fn c2_model_residuals() -> Outcome {
    let cfg = SolverConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for dim in [Dim::Three, Dim::One, Dim::Two] {
        let spec = FitSpec::standard(dim);
        let data = match sample_data(dim, &spec, &published_poles(dim), &cfg) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("{dim}: {e}")),
        };
        let maxima: Vec<f64> = (0..=4)
            .map(|n| residuals(&builtin_models(dim, n).unwrap(), &data).1)
            .collect();
        let monotone = maxima.windows(2).all(|w| w[1] < w[0]);
        pass &= monotone && maxima[4] < 1e-3;
        parts.push(format!(
            "{dim} n=0..4 max {}",
            maxima.iter().map(|m| format!("{m:.1e}")).collect::<Vec<_>>().join("/")
        ));
        if dim == Dim::Three {
            let m4 = builtin_models(dim, 4).unwrap();
            let rel = data
                .iter()
                .filter(|(eta, _)| *eta > 0.0 && *eta < 2.68)
                .map(|&(eta, a)| ((eval_model(&m4, eta) - a) / a).abs())
                .fold(0.0, f64::max);
            pass &= rel < 1e-4;
            parts.push(format!("3D n=4 pre-pole rel {rel:.1e}"));
        }
    }
    outcome(pass, parts.join("; "))
}

fn c3_refit() -> Outcome {
    let cfg = SolverConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for dim in [Dim::Three, Dim::One, Dim::Two] {
        let ws = published_poles(dim);
        let spec = FitSpec::standard(dim);
        let data = match sample_data(dim, &spec, &ws, &cfg) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("{dim}: {e}")),
        };
        let poles = PoleSet::from_positions(dim, &ws);
        for n in 1..=4 {
            let published = builtin_models(dim, n).unwrap().alpha()[0];
            match fit_model(dim, n, &poles, &spec, &data) {
                Ok(fit) => {
                    let rel = (fit.model.alpha()[0] / published - 1.0).abs();
                    let ok = rel < 1e-2;
                    pass &= ok;
                    if !ok || n == 1 {
                        parts.push(format!(
                            "{dim} n={n} α1={:.5} vs {published} ({rel:.1e}){}",
                            fit.model.alpha()[0],
                            if ok { "" } else { " MISS" }
                        ));
                    }
                }
                Err(e) => {
                    pass = false;
                    parts.push(format!("{dim} n={n}: {e}"));
                }
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn c4_oracles() -> Outcome {
    let etas = [-5.0, -2.0, -0.5, 0.5, 1.0, 3.0, 5.0, 7.0];
    let cfg = SolverConfig::default().with_p(13);
    let grid = LsGrid::default();
    let mut worst_ls = 0.0f64;
    let mut worst_series = 0.0f64;
    let mut series_failures = Vec::new();
    for dim in Dim::ALL {
        for eta in etas {
            let ode = scattering_length(dim, eta, &cfg).unwrap();
            let ls = ls_solve(dim, eta, &grid).unwrap();
            let rel = match (ode.log_value, ls.log_value) {
                (Some(a), Some(b)) => (a - b).exp_m1().abs(),
                _ => (ls.value / ode.value - 1.0).abs(),
            };
            worst_ls = worst_ls.max(rel);
            if dim == Dim::One {
                match series_a1d(eta, 60) {
                    Ok(s) => worst_series = worst_series.max((s.value / ode.value - 1.0).abs()),
                    Err(_) => series_failures.push(eta),
                }
            }
        }
    }
    let pass = worst_ls < 1e-8 && worst_series < 1e-8 && series_failures.is_empty();
    outcome(
        pass,
        format!(
            "ODE vs Volterra max rel {worst_ls:.1e} (1D/2D/3D); series max rel {worst_series:.1e}, \
             not converged at η = {series_failures:?}"
        ),
    )
}

fn c5_limits() -> Outcome {
    let cfg = SolverConfig::default().with_p(13);
    let a1 = scattering_length(Dim::One, 1e-3, &cfg).unwrap().value;
    let corr = a1 - 2.0 / (SQRT_PI * 1e-3);
    let d1 = (corr - (2.0 / PI).sqrt()).abs();

    let l2 = scattering_length(Dim::Two, 1e-3, &cfg).unwrap().log_value.unwrap();
    let d2 = (l2 - 2.0 / 1e-3 - (1.5 * LN_2 - 1.5 * EULER_GAMMA)).abs();

    let a3 = scattering_length(Dim::Three, 1e-4, &cfg).unwrap().value;
    let d3 = (a3 / 1e-4 / (-SQRT_PI / 4.0) - 1.0).abs();

    outcome(
        d1 < 1e-3 && d2 < 1e-3 && d3 < 1e-4,
        format!("1D |Δ| {d1:.1e}; 2D |Δ| {d2:.1e}; 3D rel {d3:.1e}"),
    )
}

fn c6_extractors() -> Outcome {
    let mut worst = 0.0f64;
    let lengths = [-37.0, -2.5, -0.3, 0.0, 0.05, 0.7, 4.0, 250.0];
    for a in lengths {
        for r in [8.0, 10.0, 12.0] {
            for scale in [1.0, -3e-4, 7e5] {
                for dim in [Dim::One, Dim::Three] {
                    let sol = synthetic(dim, r, scale * (r - a), scale);
                    let got = extract(&sol).unwrap().value;
                    worst = worst.max((got - a).abs() / a.abs().max(1.0));
                }
                if a > 0.0 {
                    let phi = scale * ((2.0 * r / a).ln() - EULER_GAMMA);
                    let got = extract(&synthetic(Dim::Two, r, phi, scale / r)).unwrap().value;
                    worst = worst.max((got - a).abs() / a.max(1.0));
                }
            }
        }
    }
    outcome(worst < 1e-12, format!("max deviation {worst:.1e}"))
}

fn synthetic(dim: Dim, r: f64, value: f64, derivative: f64) -> RadialSolution {
    RadialSolution {
        dim,
        r_end: r,
        value,
        derivative,
        log_scale: 0.0,
        interior_nodes: 0,
        nodes: 0,
        trajectory: None,
    }
}

/// Errors along the grid for one η; `None` entries are failed cells.
fn curve(rows: &[&ScanRow]) -> Vec<f64> {
    rows.iter().map(|r| r.rel_error.unwrap_or(f64::NAN)).collect()
}

/// Decades between the peak error and the plateau (smallest nonzero error),
/// and whether the descent after the peak is monotone. Points before the
/// peak sit in the saturated regime where `|ã/a - 1|` is pinned near 1 and
/// are not part of the decay. A rise by less than a factor of 3 over the
/// lowest error so far counts as noise.
fn decay(errors: &[f64]) -> (f64, bool) {
    let errors: Vec<f64> = errors.iter().cloned().filter(|e| *e != 0.0).collect();
    let (peak_at, peak) = errors
        .iter()
        .cloned()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let floor = errors.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-16);
    let mut lowest = peak;
    let mut monotone = true;
    for &e in &errors[peak_at..] {
        if e > 3.0 * lowest && lowest > 10.0 * floor {
            monotone = false;
        }
        lowest = lowest.min(e);
    }
    ((peak / floor).log10(), monotone)
}

fn c7_scan_shape() -> Outcome {
    let reference = SolverConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();

    let p_grid: Vec<f64> = (3..=13).map(f64::from).collect();
    let etas_2d = [0.002, 1.0, 5.0, 11.0];
    let t = convergence_scan(Dim::Two, &etas_2d, ScanAxis::Precision, &p_grid, &reference).unwrap();
    let mut peaks = Vec::new();
    for eta in etas_2d {
        let c = curve(&t.series(eta));
        let (decades, mono) = decay(&c);
        pass &= decades >= 6.0 && mono;
        peaks.push(c.iter().cloned().fold(0.0, f64::max));
        parts.push(format!("2D p η={eta}: {decades:.1} dec{}", if mono { "" } else { " non-monotone" }));
    }
    let ordered = peaks[0].min(peaks[3]) > peaks[1].max(peaks[2]);
    pass &= ordered;
    parts.push(format!(
        "peak errors {}{}",
        peaks.iter().map(|p| format!("{p:.1e}")).collect::<Vec<_>>().join("/"),
        if ordered { "" } else { " (ordering violated)" }
    ));

    let r_grid: Vec<f64> = (2..=12).map(f64::from).collect();
    for (dim, etas) in [(Dim::Three, vec![1.0, 5.0, 10.0, 14.0]), (Dim::Two, etas_2d.to_vec())] {
        let t = convergence_scan(dim, &etas, ScanAxis::Cutoff, &r_grid, &reference).unwrap();
        let mut min_dec = f64::INFINITY;
        for &eta in &etas {
            let (decades, mono) = decay(&curve(&t.series(eta)));
            pass &= decades >= 6.0 && mono;
            min_dec = min_dec.min(decades);
            if !mono {
                parts.push(format!("{dim} r_max η={eta} non-monotone"));
            }
        }
        parts.push(format!("{dim} r_max min {min_dec:.1} dec"));
    }
    outcome(pass, parts.join("; "))
}

fn c8_sensitivity() -> Outcome {
    let model = builtin_models(Dim::Three, 4).unwrap();
    let offsets = [1e-6, 5e-7, 2e-7, 1e-7];
    let near: Vec<f64> = offsets
        .iter()
        .flat_map(|d| [W1_3D - d, W1_3D + d])
        .collect();
    let reference = reference_values(&near, &reference_config());
    let rep = pole_sensitivity(&model, &[12], &near, &reference).unwrap();
    let rel: Vec<Option<f64>> = (0..near.len()).map(|j| rep.relative_error(0, j)).collect();
    let worst = rel.iter().map(|r| r.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let close_ok = worst < 1e-5;

    // offsets 1e-8..1e-2 from W1 on both sides, twenty per decade
    let mut sweep: Vec<f64> = (-160..=-40)
        .flat_map(|k| {
            let d = 10f64.powf(k as f64 / 20.0);
            [W1_3D - d, W1_3D + d]
        })
        .collect();
    sweep.sort_by(f64::total_cmp);
    let sweep_ref = reference_values(&sweep, &reference_config());
    let rep = pole_sensitivity(&model, &[3, 12], &sweep, &sweep_ref).unwrap();
    let truncated = truncate_digits(W1_3D, 3).unwrap();
    let j = (0..sweep.len())
        .min_by(|&a, &b| (sweep[a] - truncated).abs().total_cmp(&(sweep[b] - truncated).abs()))
        .unwrap();
    let err = |i: usize, j: usize| rep.errors[i][j].unwrap_or(f64::NAN);
    let local_max = err(0, j) > err(0, j - 1) && err(0, j) > err(0, j + 1);
    let spurious_ok = local_max && err(0, j) > 100.0 * err(1, j);
    let spurious_at = sweep[j];

    outcome(
        close_ok && spurious_ok,
        format!(
            "ndigit=12 max rel error {worst:.1e} for |η-W1| <= 1e-6; \
             ndigit=3 (W1 -> {truncated}) local error peak at η = {spurious_at}: {}",
            if spurious_ok { "yes" } else { "no" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("pole reproduction", c1_poles),
        ("model residuals", c2_model_residuals),
        ("refit consistency", c3_refit),
        ("three-way oracle agreement", c4_oracles),
        ("asymptotic limits", c5_limits),
        ("extractor identities", c6_extractors),
        ("convergence-scan shape", c7_scan_shape),
        ("sensitivity study", c8_sensitivity),
    ];
    let results: Vec<(usize, &str, Outcome, f64)> = criteria
        .par_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let t = Instant::now();
            let o = f();
            (i + 1, *name, o, t.elapsed().as_secs_f64())
        })
        .collect();
    let mut failed = 0;
    for (i, name, o, secs) in &results {
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {i} {name}: {} ({secs:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
