use scatlen::oracles::{closed_form_ls, ls_solve, series_state, LsGrid};
use scatlen::{eval_closed_form, scattering_length, ClosedFormLevel, Dim, SolverConfig};

#[test]
fn doubling_nodes_is_stable() {
    for dim in Dim::ALL {
        for eta in [-2.0, 0.5, 1.0, 5.0] {
            let a = ls_solve(dim, eta, &LsGrid::default()).unwrap();
            let b = ls_solve(dim, eta, &LsGrid { nodes: 4000, ..LsGrid::default() }).unwrap();
            assert!((a.value / b.value - 1.0).abs() < 1e-8, "{dim} η={eta}");
            assert!(a.converged && !a.near_pole);
        }
    }
}

#[test]
fn ode_and_integral_equation_agree() {
    let cfg = SolverConfig::default().with_p(13);
    for dim in Dim::ALL {
        for eta in [-5.0, -0.5, 3.0, 7.0] {
            let ode = scattering_length(dim, eta, &cfg).unwrap();
            let ls = ls_solve(dim, eta, &LsGrid::default()).unwrap();
            let rel = match (ode.log_value, ls.log_value) {
                (Some(x), Some(y)) => (x - y).exp_m1().abs(),
                _ => (ls.value / ode.value - 1.0).abs(),
            };
            assert!(rel < 1e-8, "{dim} η={eta}: {rel:.1e}");
        }
    }
}

#[test]
fn series_coefficients_in_the_weak_limit() {
    let eta = 1e-8;
    let s = series_state(eta, 10).unwrap();
    let mut factorial = 1.0;
    for k in 1..=10usize {
        factorial *= k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let expected = sign / (2.0 * (2 * k - 1) as f64 * factorial);
        let got = s.b[k] / eta;
        assert!((got / expected - 1.0).abs() < 1e-6, "k={k}: {got} vs {expected}");
    }
}

#[test]
fn zeroth_order_iterate_is_the_first_closed_form() {
    for eta in [0.3, 1.0, 1.5] {
        let a = closed_form_ls(Dim::Three, eta, 0).unwrap();
        let b = eval_closed_form(Dim::Three, ClosedFormLevel::First, eta);
        assert!((a / b - 1.0).abs() < 1e-12);
    }
}
