//! Test-side oracles shared by the integration tests.  They use plain
//! quadrature only, never the closed forms under test.

#![allow(dead_code)]

use lcext::quadrature::Rule;
use lcext::snc_model::SncChart;
use lcext::{q_to_f64, Q};

/// Geometric panels on `[x0, x1]`, fine near `x0`.
fn geometric_rule(x0: f64, x1: f64, panels: usize, nodes: usize) -> Rule {
    let ratio = (x1 / x0).powf(1.0 / panels as f64);
    let breaks: Vec<f64> = (0..=panels).map(|i| x0 * ratio.powi(i as i32)).collect();
    Rule::composite(nodes, &breaks)
}

/// Decides by quadrature alone whether `∫_0^{1/2} r^{k−1} dr` is finite:
/// in `x = −log r` it is `∫ e^{−k x} dx` over `[log 2, ∞)`; the integral is
/// finite when the piece over `[W, 2W]` is negligible against `[log 2, W]`
/// for a far window `W`.
pub fn radial_integrable(k: f64) -> bool {
    let w = 2f64.powi(23);
    let f = |x: f64| (-k * x).exp();
    let bulk = geometric_rule(2f64.ln(), w, 600, 8).integrate(f);
    let tail = geometric_rule(w, 2.0 * w, 8, 8).integrate(f);
    bulk.is_finite() && tail.is_finite() && tail <= 1e-6 * bulk
}

/// Generator exponents of `𝓘(φ_L + m ψ)` from the numeric scan: per
/// coordinate the least `a ≥ 0` making `|z|^{2a} |z|^{−2 c}` integrable
/// against `r dr`.
pub fn numeric_generator(chart: &SncChart, m: f64) -> Vec<u32> {
    (0..chart.n)
        .map(|j| {
            let c = q_to_f64(chart.phi_l.coeffs[j]) + m * q_to_f64(chart.psi.coeffs[j]);
            (0..200u32)
                .find(|&a| radial_integrable(2.0 * f64::from(a) + 2.0 - 2.0 * c))
                .expect("some power is integrable")
        })
        .collect()
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Relative difference `|a/b − 1|`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}
