//! Continuation-lemma integrals against independent quadrature in the
//! physical radius, the exponent ladder, and the Hörmander curvature bound.

mod common;

use std::f64::consts::PI;

use common::{q, rel};
use lcext::integrability::{
    continuation_ladder, hormander_weight_check, log_pole_integral, log_pole_limit,
    log_weight_membership,
};
use lcext::quadrature::Rule;
use lcext::snc_model::{eval_weight, DiagonalWeight, SncChart};
use proptest::prelude::*;

/// `∫ e^{h(x)} dx` over `[0, x_max]` and `[x_max, 2 x_max]`, with `h` given
/// in log scale, on a unit panel followed by geometric panels.
fn bulk_and_tail(log_integrand: impl Fn(f64) -> f64, x_max: f64) -> (f64, f64) {
    let f = |x: f64| log_integrand(x).exp();
    let geometric = |lo: f64, hi: f64, panels: usize| {
        let ratio = (hi / lo).powf(1.0 / panels as f64);
        let breaks: Vec<f64> = (0..=panels).map(|i| lo * ratio.powi(i as i32)).collect();
        Rule::composite(10, &breaks)
    };
    let bulk =
        Rule::gauss_legendre(20, 0.0, 1.0).integrate(f) + geometric(1.0, x_max, 400).integrate(f);
    let tail = geometric(x_max, 2.0 * x_max, 20).integrate(f);
    (bulk, tail)
}

/// Finiteness of `∫_{|z|<r0} |z|^{2a} |log|z|²|^{2p−s} dλ` decided by
/// quadrature in `r` alone.  The end `r → 0` uses `r = (r0/2) e^{−x}`; for
/// `r0 = 1` the end `r → 1` uses `r = 1 − e^{−x}/2`.
fn membership_oracle(a: i64, p: f64, s: f64, r0: f64) -> bool {
    let qe = 2.0 * p - s;
    let a = a as f64;
    // 2a·log r, taking log r directly so that `a = 0` never meets log 0.
    let log_modulus = |log_r: f64| 2.0 * a * log_r;
    // Near the origin: integrand 2π r · r (Jacobian dr = −r dx).
    let origin = |x: f64| {
        let lr = 0.5f64.ln() + r0.ln() - x;
        log_modulus(lr) + qe * (-2.0 * lr).ln() + 2.0 * lr
    };
    let (bulk, tail) = bulk_and_tail(origin, 2f64.powi(20));
    let origin_ok = bulk.is_finite() && tail.is_finite() && tail <= 1e-3 * bulk;
    if r0 < 1.0 {
        return origin_ok;
    }
    let boundary = |x: f64| {
        let y = 0.5 * (-x).exp();
        let v = if y > 1e-300 {
            -2.0 * (-y).ln_1p()
        } else {
            2.0 * y
        };
        let log_v = if y > 1e-300 {
            v.ln()
        } else {
            2f64.ln() + 0.5f64.ln() - x
        };
        log_modulus((-y).ln_1p()) + qe * log_v + (1.0 - y).ln() + 0.5f64.ln() - x
    };
    let (bulk, tail) = bulk_and_tail(boundary, 500.0);
    let boundary_ok = bulk.is_finite() && tail.is_finite() && tail <= 1e-3 * bulk;
    origin_ok && boundary_ok
}

#[test]
fn membership_sweep_matches_radial_quadrature() {
    let mut mismatches = Vec::new();
    for a in -1..=2 {
        for p in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            for s in [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
                for r0 in [0.5, 1.0] {
                    let m = log_weight_membership(a, p, s, r0).unwrap();
                    let oracle = membership_oracle(a, p, s, r0);
                    if m.finite != oracle || !m.agrees() {
                        mismatches.push((a, p, s, r0, m.finite, m.quadrature_finite, oracle));
                    }
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn membership_values_match_gamma_integrals() {
    // a = 0, r0 = 1: π ∫_0^∞ v^q e^{−v} dv = π Γ(q+1).
    for (qe, gamma) in [(0.0, 1.0), (1.0, 1.0), (2.0, 2.0), (3.0, 6.0)] {
        let m = log_weight_membership(0, qe / 2.0, 0.0, 1.0).unwrap();
        assert!(rel(m.value, PI * gamma) < 1e-8, "q={qe}: {}", m.value);
    }
    // a = −1, q = −2, r0 = e^{−1/2}: π ∫_1^∞ v^{−2} dv = π.
    let m = log_weight_membership(-1, 0.0, 2.0, (-0.5f64).exp()).unwrap();
    assert!(rel(m.value, PI) < 1e-6, "{}", m.value);
    assert!(log_weight_membership(-2, 0.0, 0.0, 0.5).is_err());
    assert!(log_weight_membership(0, 0.0, 0.0, 1.5).is_err());
}

#[test]
fn pole_integrals_match_closed_form_and_limit() {
    let schedule = [0.2, 0.1, 0.05, 0.025];
    for r0 in [(-0.5f64).exp(), (-1.0f64).exp(), (-2.0f64).exp()] {
        let u0 = -(r0 * r0).ln();
        for &e in &schedule {
            let v = log_pole_integral(r0, e).unwrap();
            // ε π ∫_{u0}^∞ v^{−1−2ε} dv = (π/2) u0^{−2ε}.
            assert!(rel(v, 0.5 * PI * u0.powf(-2.0 * e)) < 1e-10);
        }
        let limit = log_pole_limit(r0, &schedule).unwrap();
        assert!(
            rel(limit.limit, 0.5 * PI) < 1e-2,
            "r0={r0}: {}",
            limit.limit
        );
    }
    assert!(log_pole_integral(1.0, 0.1).is_err());
    assert!(log_pole_limit(0.5, &[0.1]).is_err());
}

fn hormander_chart(nu: [i64; 2], radii: [f64; 2]) -> SncChart {
    SncChart {
        n: 2,
        radii: radii.to_vec(),
        phi_l: DiagonalWeight::new(vec![q(0, 1), q(0, 1)], 0.0),
        psi: DiagonalWeight::new(vec![q(nu[0], 1), q(nu[1], 1)], -10.0),
        m0: q(0, 1),
        m1: q(1, 1),
    }
}

#[test]
fn hormander_bound_is_attained_at_the_outer_corner() {
    let chart = hormander_chart([1, 1], [0.9, 0.9]);
    let (sigma, eps, ell, b) = (1, 0.1, 1.0, 1.0);
    let report = hormander_weight_check(&chart, sigma, eps, ell, b, 48).unwrap();
    assert!(report.passed && report.c_prime.is_finite());
    let w = -eval_weight(&chart.psi, &[0.81, 0.81]);
    let n = (ell * w).ln();
    let expected = (f64::from(sigma) * (1.0 - eps) + 3.0 / n + 3.0 / (n * n)) / b;
    assert!(
        rel(report.c_prime, expected) < 1e-9,
        "{} vs {expected}",
        report.c_prime
    );
    assert!(report.ddbar_coefficient_inf < 0.0);
}

#[test]
fn flat_psi_needs_no_correction() {
    let chart = hormander_chart([0, 0], [0.9, 0.9]);
    let report = hormander_weight_check(&chart, 1, 0.1, 1.0, 0.0, 16).unwrap();
    assert!(report.passed);
    assert_eq!(report.c_prime, 0.0);
}

#[test]
fn shrinking_polydiscs_lower_the_bound() {
    let mut last = f64::INFINITY;
    for r in [0.9, 0.5, 0.2, 0.05] {
        let chart = hormander_chart([1, 2], [r, r]);
        let report = hormander_weight_check(&chart, 2, 0.1, 1.0, 1.0, 32).unwrap();
        assert!(report.passed);
        assert!(report.c_prime <= last);
        last = report.c_prime;
    }
}

#[test]
fn flat_comparison_metric_fails_with_witness() {
    let chart = hormander_chart([1, 1], [0.9, 0.9]);
    let report = hormander_weight_check(&chart, 1, 0.1, 1.0, 0.0, 48).unwrap();
    assert!(!report.passed && report.c_prime.is_infinite());
    assert!(report.witness.is_some() && report.message.is_some());
}

#[test]
fn unnormalised_psi_fails_with_witness() {
    let mut chart = hormander_chart([1, 1], [0.9, 0.9]);
    chart.psi.shift = 0.0;
    let report = hormander_weight_check(&chart, 1, 0.1, 1.0, 1.0, 16).unwrap();
    assert!(!report.passed);
    let witness = report.witness.unwrap();
    let r2: Vec<f64> = witness.iter().map(|x| x * x).collect();
    assert!((-eval_weight(&chart.psi, &r2)).ln() <= 0.0);
}

#[test]
fn ladder_rejects_degenerate_splits() {
    assert!(continuation_ladder(3.0, 1.0).is_err());
    assert!(continuation_ladder(3.0, 1.5).is_err());
    assert!(continuation_ladder(3.0, -0.1).is_err());
    assert!(continuation_ladder(0.5, 0.5).is_err());
}

proptest! {
    #[test]
    fn ladder_descends_to_the_unit_interval(s in 1.01f64..20.0, delta in 0.01f64..0.95) {
        let ladder = continuation_ladder(s, delta).unwrap();
        let e = &ladder.exponents;
        prop_assert_eq!(e[0], s);
        prop_assert_eq!(ladder.steps.len(), ((s - 1.0) / (1.0 - delta) - 1e-9).ceil().max(1.0) as usize);
        let last = *e.last().unwrap();
        prop_assert!(last <= 1.0 + 1e-12 && last > 1.0 - (1.0 - delta) - 1e-12);
        for step in &ladder.steps {
            prop_assert!((step.from - step.to - (1.0 - delta)).abs() < 1e-9);
            prop_assert!(rel(step.kernel_integral, PI / delta) < 1e-15);
        }
        // Only the final exponent may reach the unit interval.
        prop_assert!(e[..e.len() - 1].iter().all(|&x| x > 1.0));
    }
}
