use proptest::prelude::*;
use scatlen::approximants::{eval_model_log, published_poles, residuals, sample_data};
use scatlen::poles::find_pole_with;
use scatlen::sensitivity::{reference_config, reference_values};
use scatlen::{
    builtin_models, eval_model, find_pole, fit_model, pole_sensitivity, scattering_length,
    truncate_digits, Dim, FitSpec, PoleScanConfig, PoleSet, SolverConfig, REFERENCE_W1,
};

#[test]
fn scattering_length_flips_across_thresholds() {
    let cfg = SolverConfig::default().with_p(13);
    for dim in Dim::ALL {
        for w in &published_poles(dim)[..2] {
            let lo = scattering_length(dim, w - 1e-3, &cfg).unwrap();
            let hi = scattering_length(dim, w + 1e-3, &cfg).unwrap();
            let (x, y) = match dim {
                Dim::Two => (1.0 / lo.log_value.unwrap(), 1.0 / hi.log_value.unwrap()),
                _ => (lo.value, hi.value),
            };
            assert!(x * y < 0.0, "{dim} W={w}: {x} {y}");
        }
    }
}

#[test]
fn tighter_tolerance_stays_inside_previous_bracket() {
    let cfg = PoleScanConfig::default().solver;
    let coarse = find_pole_with(Dim::One, [8.0, 9.0], 1e-7, &cfg).unwrap();
    let fine = find_pole_with(Dim::One, [8.0, 9.0], 1e-8, &cfg).unwrap();
    assert!((fine.w - coarse.w).abs() < 1e-7);
}

#[test]
fn indicator_pole_matches_sign_change_of_a() {
    let tol = 1e-9;
    let w = find_pole(Dim::Three, [2.0, 3.0], tol).unwrap().w;
    let cfg = SolverConfig::default().with_p(13);
    let a = |eta: f64| scattering_length(Dim::Three, eta, &cfg).unwrap().value;
    assert!(a(w - 2.0 * tol) < 0.0 && a(w + 2.0 * tol) > 0.0);
}

#[test]
fn models_diverge_at_their_poles() {
    for dim in Dim::ALL {
        let m = builtin_models(dim, 4).unwrap();
        for &w in m.w() {
            let (lo, hi) = (w * (1.0 - 1e-9), w * (1.0 + 1e-9));
            if dim == Dim::Two {
                let (x, y) = (eval_model_log(&m, lo), eval_model_log(&m, hi));
                assert!(x.abs() > 1e6 && y.abs() > 1e6 && x * y < 0.0, "{dim} W={w}");
            } else {
                let (x, y) = (eval_model(&m, lo), eval_model(&m, hi));
                assert!(x.abs() > 1e6 && y.abs() > 1e6 && x * y < 0.0, "{dim} W={w}");
            }
        }
    }
}

proptest! {
    #[test]
    fn model_2d_positive(eta in 1e-2f64..125.0, n in 0usize..=4) {
        let m = builtin_models(Dim::Two, n).unwrap();
        prop_assume!(m.w().iter().all(|w| (eta - w).abs() > 1e-6));
        prop_assert!(eval_model(&m, eta) > 0.0);
    }

    #[test]
    fn models_finite_off_poles(eta in -20.0f64..120.0, n in 1usize..=4) {
        prop_assume!(eta.abs() > 1e-2);
        for dim in [Dim::One, Dim::Three] {
            let m = builtin_models(dim, n).unwrap();
            prop_assume!(m.w().iter().all(|w| (eta - w).abs() > 1e-6));
            prop_assert!(eval_model(&m, eta).is_finite());
        }
    }
}

#[test]
fn born_regime_3d_high_orders() {
    let eta = 1e-6;
    let a = scattering_length(Dim::Three, eta, &SolverConfig::default().with_p(13)).unwrap().value;
    for n in [3, 4] {
        let m = builtin_models(Dim::Three, n).unwrap();
        let rel = (eval_model(&m, eta) / a - 1.0).abs();
        assert!(rel < 1e-2, "n={n}: {rel:.2e}");
    }
}

#[test]
fn rms_residual_decreases_with_order() {
    let cfg = SolverConfig::default();
    for dim in Dim::ALL {
        let data = sample_data(dim, &FitSpec::standard(dim), &published_poles(dim), &cfg).unwrap();
        let rms: Vec<f64> = (1..=4)
            .map(|n| residuals(&builtin_models(dim, n).unwrap(), &data).0)
            .collect();
        assert!(rms.windows(2).all(|w| w[1] < w[0]), "{dim}: {rms:?}");
    }
}

#[test]
fn degenerate_fit_is_the_closed_form() {
    let spec = FitSpec::standard(Dim::Two);
    let data = [(1.0, 5.0), (2.0, 2.0)];
    let poles = PoleSet::from_positions(Dim::Two, &published_poles(Dim::Two));
    let fit = fit_model(Dim::Two, 0, &poles, &spec, &data).unwrap();
    assert_eq!(fit.model, builtin_models(Dim::Two, 0).unwrap());
}

#[test]
fn more_digits_never_hurt_away_from_the_pole() {
    let model = builtin_models(Dim::Three, 4).unwrap();
    let etas: Vec<f64> = (0..60)
        .map(|i| 0.5 + 0.05 * i as f64)
        .chain((0..40).map(|i| 2.75 + 0.2 * i as f64))
        .collect();
    let reference = reference_values(&etas, &reference_config());
    let digits: Vec<u32> = (3..=12).collect();
    let rep = pole_sensitivity(&model, &digits, &etas, &reference).unwrap();
    // the model's own residual can cancel part of a truncation shift, so it
    // counts towards the floor along with the reference noise
    let last = digits.len() - 1;
    for j in 0..etas.len() {
        let floor = 2.0 * rep.errors[last][j].unwrap() + 1e-10 * reference[j].unwrap().abs().max(1.0);
        for i in 1..digits.len() {
            let (prev, next) = (rep.errors[i - 1][j].unwrap(), rep.errors[i][j].unwrap());
            assert!(next <= prev + floor, "η={} ndigit={}", etas[j], digits[i]);
        }
    }
}

#[test]
fn twelve_digits_reach_the_reference_pole() {
    assert_eq!(truncate_digits(REFERENCE_W1, 12).unwrap(), REFERENCE_W1);
    let model = builtin_models(Dim::Three, 4).unwrap();
    let etas = [REFERENCE_W1 - 1e-6, REFERENCE_W1 + 1e-6];
    let reference = reference_values(&etas, &reference_config());
    let rep = pole_sensitivity(&model, &[12], &etas, &reference).unwrap();
    for j in 0..2 {
        assert!(rep.relative_error(0, j).unwrap() < 1e-5);
    }
}
