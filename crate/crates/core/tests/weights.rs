//! Weight families: derivatives against finite differences, the three
//! expressions of Γ, the curvature budget, the cutoff and the x log x bound.

mod common;

use approx::assert_relative_eq;
use common::rel;
use lcext::battery::battery;
use lcext::weights::{
    budget_check, budget_grid, build_aux, is_normalized, log_psi_grid, normalisation_constant,
    normalisation_lhs, normalisation_threshold, normalize_psi, xlogx_bound_check, xlogx_grid,
    AuxParams, CutoffProfile, Jet,
};
use proptest::prelude::*;

fn params(sigma: u32, eps: f64, ell: f64) -> AuxParams {
    AuxParams {
        eps,
        ..AuxParams::new(sigma, ell, 1.0)
    }
}

/// Central differences of `f` at `x` with step `h`: `(f′, f″)`.
fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let (fp, f0, fm) = (f(x + h), f(x), f(x - h));
    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
}

/// Compares a jet with finite differences; the second derivative uses a
/// larger step because its truncation and rounding errors balance there.
fn check_jet(name: &str, jet: impl Fn(f64) -> Jet, x: f64) {
    let value = |y: f64| jet(y).value;
    let (d1, _) = central(value, x, x.abs() * 1e-6);
    let (_, d2) = central(value, x, x.abs() * 1e-4);
    let j = jet(x);
    let (d1_fd, d1_jet) = (central(|y| jet(y).value, x, x.abs() * 1e-6).0, j.d1);
    assert!(
        rel(d1_jet, d1) < 1e-5,
        "{name}' at {x}: {d1_jet} vs {d1_fd}"
    );
    // The second derivative of the first-derivative jet is a cleaner oracle.
    let (d2_from_d1, _) = central(|y| jet(y).d1, x, x.abs() * 1e-6);
    assert!(
        rel(j.d2, d2_from_d1) < 1e-5,
        "{name}'' at {x}: {} vs {d2_from_d1}",
        j.d2
    );
    assert!(rel(j.d2, d2) < 1e-3, "{name}'' at {x}: {} vs {d2}", j.d2);
}

#[test]
fn t_jets_match_finite_differences() {
    for sigma in 1..=3 {
        for eps in [1e-3, 0.05, 0.3] {
            for ell in [0.5, 1.0, 2.0] {
                let aux = build_aux(params(sigma, eps, ell)).unwrap();
                let bound = aux.params.t_bound();
                for factor in [1.5, 3.0, 20.0, 1e3, 1e8] {
                    let t = bound * factor;
                    check_jet("nu", |x| aux.nu(x).unwrap(), t);
                    check_jet("eta", |x| aux.eta(x).unwrap(), t);
                    check_jet("log_eta", |x| aux.log_eta(x).unwrap(), t);
                    check_jet("lambda", |x| aux.lambda(x).unwrap(), t);
                    check_jet("gamma", |x| aux.gamma(x).unwrap(), t);
                }
            }
        }
    }
}

#[test]
fn psi_jets_match_finite_differences() {
    for sigma in 1..=3 {
        for eps in [0.01, 0.3] {
            let aux = build_aux(params(sigma, eps, 1.3)).unwrap();
            let bound = aux.params.psi_bound();
            for factor in [1.5, 4.0, 100.0, 1e5] {
                let psi = bound * factor;
                check_jet("mu", |x| aux.mu(x).unwrap(), psi);
                if sigma >= 2 {
                    check_jet("Lambda", |x| aux.big_lambda(x).unwrap(), psi);
                }
            }
        }
    }
}

#[test]
fn mu_is_minus_log_of_eta_times_cubed_log() {
    let aux = build_aux(params(2, 0.05, 1.5)).unwrap();
    for psi in [-3.0, -40.0, -1e4] {
        let w: f64 = -psi;
        let n = (1.5 * w).ln();
        let expected = -(aux.eta_psi(psi).unwrap() * n.powi(3)).ln();
        assert_relative_eq!(aux.mu(psi).unwrap().value, expected, max_relative = 1e-12);
    }
}

#[test]
fn eta_in_psi_is_eta_of_minus_power() {
    for sigma in 1..=3 {
        let aux = build_aux(params(sigma, 0.05, 0.7)).unwrap();
        for psi in [-5.0f64, -60.0] {
            let t = -(-psi).powi(sigma as i32);
            assert_relative_eq!(
                aux.eta_psi(psi).unwrap(),
                aux.eta(t).unwrap().value,
                max_relative = 1e-12
            );
        }
    }
}

/// Γ from the defining combination, from the rearranged form and from the
/// target `ε(1−ε)/(e^ν̃ |t|^{1+ε})` agree on a 10⁴-point log grid.
#[test]
fn gamma_three_ways() {
    let mut worst = 0.0f64;
    for sigma in 1..=3 {
        for eps in [1e-3, 0.05, 0.3] {
            let ell = 1.0;
            let aux = build_aux(params(sigma, eps, ell)).unwrap();
            let lo = 1.1f64.exp();
            let hi = 1e100;
            for i in 0..10_000 {
                let u = (lo.ln() + (hi / lo).ln() * i as f64 / 9_999.0).exp();
                let t = -u;
                let nu = aux.nu(t).unwrap().value;
                let target = eps * (1.0 - eps) / (nu.exp() * u.powf(1.0 + eps));
                let a = aux.gamma_defining(t).unwrap();
                let b = aux.gamma_good_form(t).unwrap();
                let c = aux.gamma(t).unwrap().value;
                worst = worst
                    .max(rel(a, target))
                    .max(rel(b, target))
                    .max(rel(c, target));
            }
        }
    }
    assert!(worst < 1e-8, "worst relative difference {worst}");
}

#[test]
fn budget_passes_after_normalisation() {
    for sigma in 1..=3 {
        for delta in [0.1, 1.0] {
            let p = AuxParams::new(sigma, delta, delta);
            let w_min = normalisation_threshold(&p).unwrap();
            let report = budget_check(&p, &budget_grid(&p, w_min, 2000)).unwrap();
            assert!(
                report.passed(),
                "σ={sigma} δ={delta}: {:?}",
                report.first_failure()
            );
            assert!(report
                .rows
                .iter()
                .all(|r| r.points > 0 || r.min_slack == f64::INFINITY));
        }
    }
}

#[test]
fn budget_fails_on_denormalised_grid_with_witness() {
    for sigma in 1..=3 {
        let p = AuxParams::new(sigma, 1.0, 0.1);
        let near = -p.psi_bound() * 1.01;
        let report = budget_check(&p, &log_psi_grid(near, 1e4, 500)).unwrap();
        let failure = report.first_failure().expect("must fail");
        let w = -failure.witness_psi.unwrap();
        assert!(w < normalisation_threshold(&p).unwrap());
        assert!(normalisation_lhs(&p, w) > p.delta);
    }
}

#[test]
fn normalisation_constant_is_the_sigma_one_threshold() {
    let a = normalisation_constant();
    assert!((a - 4.6805).abs() < 5e-4);
    // With budget δ = ℓ the σ = 1 condition reads 2/(x log(x/e)) + 1/x ≤ 1
    // in x = ℓ|ψ|.
    for ell in [0.5, 1.0, 3.0] {
        let p = AuxParams::new(1, ell, ell);
        assert_relative_eq!(
            normalisation_threshold(&p).unwrap() * ell,
            a,
            max_relative = 1e-10
        );
    }
}

#[test]
fn normalised_battery_charts_satisfy_the_condition() {
    for case in battery() {
        for sigma in 1..=3 {
            let p = AuxParams::new(sigma, 1.0, 0.5);
            let n = normalize_psi(&case.chart, &p).unwrap();
            assert!(is_normalized(&n.chart, &p).unwrap(), "{}", case.name);
            assert!(n.condition_at_sup <= p.delta);
            // Idempotent.
            let again = normalize_psi(&n.chart, &p).unwrap();
            assert_eq!(again.shift, n.shift);
        }
    }
}

#[test]
fn cutoff_profile_shape() {
    let p = CutoffProfile::new(4.0, 2.0, 0.0).unwrap();
    let mut last = 1.0;
    for i in 0..=1000 {
        let t = 0.6 * i as f64 / 1000.0;
        let (v, d1, _) = p.eval(t);
        assert!(v <= last + 1e-15 && (0.0..=1.0).contains(&v));
        assert!(d1 <= 0.0);
        last = v;
        if (0.26..0.49).contains(&t) {
            let (fd, _) = central(|x| p.eval(x).0, t, 1e-6);
            assert!((fd - d1).abs() < 1e-5 * p.sup_theta_prime);
        }
    }
    // Quintic smoothstep: sup|θ′| = (15/8)·AB/(A−B), sup|θ″| = (10/√3)·(AB/(A−B))².
    let slope = p.mean_slope();
    assert_relative_eq!(p.sup_theta_prime, 1.875 * slope, max_relative = 1e-9);
    assert_relative_eq!(
        p.sup_theta_second,
        10.0 / 3f64.sqrt() * slope * slope,
        max_relative = 1e-6
    );
    assert_relative_eq!(p.m_theta_prime(), 56.25, max_relative = 1e-9);
}

#[test]
fn xlogx_bound_holds_on_grids() {
    for eps in [0.01, 0.05, 0.1, 0.25, 0.5, 1.0] {
        for s in [0.0, 1.0, 2.0, 5.0] {
            let grid = xlogx_grid(eps, s, 20_000, 700.0);
            let r = xlogx_bound_check(&grid, eps, s).unwrap();
            assert!(
                r.worst_ratio <= 1.0 + 1e-12,
                "ε={eps} s={s}: {}",
                r.worst_ratio
            );
            if s > 0.0 && s / eps <= 700.0 {
                assert!((r.ratio_at_prediction - 1.0).abs() < 1e-12);
                assert!(rel(r.argmax_neg_log_x, s / eps) < 1e-3);
            }
        }
    }
    assert!(xlogx_bound_check(&[1.0], 0.0, 1.0).is_err());
    assert!(xlogx_bound_check(&[1.0], 0.1, -1.0).is_err());
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(build_aux(params(1, 0.0, 1.0)).is_err());
    assert!(build_aux(params(1, 1.0, 1.0)).is_err());
    assert!(build_aux(params(0, 0.5, 1.0)).is_err());
    assert!(build_aux(params(1, 0.5, -1.0)).is_err());
    let aux = build_aux(params(2, 0.1, 1.0)).unwrap();
    assert!(aux.eta(aux.params.t_bound() * 0.5).is_err());
    assert!(aux.mu(aux.params.psi_bound() * 0.9).is_err());
}

proptest! {
    #[test]
    fn gamma_is_positive_and_matches_target(sigma in 1u32..=3, eps in 0.001f64..0.9, ell in 0.2f64..5.0, k in 0.05f64..200.0) {
        let aux = build_aux(params(sigma, eps, ell)).unwrap();
        let t = aux.params.t_bound() * k.exp();
        let target = aux.gamma(t).unwrap().value;
        let g = aux.gamma_defining(t).unwrap();
        prop_assert!(g > 0.0);
        prop_assert!(rel(g, target) < 1e-7);
    }

    #[test]
    fn lambda_exceeds_zero(sigma in 1u32..=3, eps in 0.001f64..0.99, k in 0.01f64..300.0) {
        let aux = build_aux(params(sigma, eps, 1.0)).unwrap();
        let t = aux.params.t_bound() * k.exp();
        prop_assert!(aux.lambda(t).unwrap().value > 0.0);
    }

    #[test]
    fn normalisation_condition_holds_beyond_threshold(sigma in 1u32..=4, ell in 0.1f64..4.0, delta in 0.05f64..2.0, k in 0.0f64..30.0) {
        let p = AuxParams::new(sigma, ell, delta);
        let w = normalisation_threshold(&p).unwrap() * k.exp();
        prop_assert!(normalisation_lhs(&p, w) <= delta);
    }
}
