//! Weighted-L² hypothesis classes and limit integrals of the continuation
//! lemmas, and the curvature bound of the local Hörmander step.
//!
//! Integrals over a disc in `z₁` are reduced to one-dimensional integrals
//! in `v = −log|z₁|²` (so `dλ = π e^{−v} dv`) before any quadrature.

use std::f64::consts::PI;

use crate::quadrature::{richardson_at_zero, Rule};
use crate::snc_model::{eval_weight, SncChart};
use crate::{q_to_f64, Error, Result};

/// Outcome of [`log_weight_membership`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    /// Decision from the exponent conditions.
    pub finite: bool,
    /// Finiteness as detected by quadrature alone.
    pub quadrature_finite: bool,
    /// `∫ |u|²/|log|z₁|²|^s dλ` over the disc (`+∞` when divergent).
    pub value: f64,
    /// `q = 2p − s`, the power of `v` in the reduced integral.
    pub log_exponent: f64,
}

impl Membership {
    /// `true` when the quadrature agrees with the exponent decision.
    pub fn agrees(&self) -> bool {
        self.finite == self.quadrature_finite
    }
}

/// Window half-widths (in `w = log v`) used to detect divergence.
const WINDOWS: [f64; 7] = [8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0];
/// Relative size below which an end piece counts as a convergent tail.
const TAIL_RATIO: f64 = 1e-8;

fn window_rule(lo: f64, hi: f64) -> Rule {
    let panels = ((hi - lo) / 0.5).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
        .collect();
    Rule::composite(12, &breaks)
}

/// Decides whether `|u|² / |log|z₁|²|^s` is integrable on `|z₁| < r0` for
/// the model `|u| = |z₁|^a |log|z₁|²|^p`, where `a ≥ −1` is an integer
/// (`a = −1` is the singular kernel `1/|z₁|²`) and `r0 ∈ (0, 1]`.
///
/// In `v = −log|z₁|²` the integral is `π ∫_{u₀}^∞ v^q e^{−(a+1)v} dv` with
/// `q = 2p − s` and `u₀ = −log r0²`.  It is finite iff the end `v → ∞`
/// converges (`a + 1 > 0`, or `a = −1` and `q < −1`) and, when `r0 = 1`,
/// the end `v → 0` converges (`q > −1`).  The decision is confirmed by
/// quadrature in `w = log v` over growing windows, comparing each end
/// piece with the bulk.
pub fn log_weight_membership(a: i64, p: f64, s: f64, r0: f64) -> Result<Membership> {
    if a < -1 {
        return Err(Error::Parameter {
            name: "a",
            reason: format!("must be at least -1, got {a}"),
        });
    }
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(Error::Parameter {
            name: "r0",
            reason: format!("must lie in (0, 1], got {r0}"),
        });
    }
    if !(p.is_finite() && s.is_finite()) {
        return Err(Error::Parameter {
            name: "p, s",
            reason: "must be finite".to_string(),
        });
    }
    let q = 2.0 * p - s;
    let rate = (a + 1) as f64;
    let u0 = -(r0 * r0).ln();
    let far_ok = rate > 0.0 || q < -1.0;
    let near_ok = u0 > 0.0 || q > -1.0;
    let finite = far_ok && near_ok;

    // Integrand in w = log v, including the Jacobian v.
    let f = |w: f64| {
        let decay = if rate > 0.0 { rate * w.exp() } else { 0.0 };
        ((q + 1.0) * w - decay).exp()
    };
    let w0 = if u0 > 0.0 { Some(u0.ln()) } else { None };
    let mut quadrature_finite = false;
    let mut value = f64::INFINITY;
    for &h in &WINDOWS {
        let lo = w0.unwrap_or(-h);
        let hi = lo.max(0.0) + h;
        let bulk = window_rule(lo, hi).integrate(f);
        let far = window_rule(hi, hi + h).integrate(f);
        let near = if w0.is_some() {
            0.0
        } else {
            window_rule(lo - h, lo).integrate(f)
        };
        let total = bulk + far + near;
        if total.is_finite() && far <= TAIL_RATIO * total && near <= TAIL_RATIO * total {
            quadrature_finite = true;
            value = PI * total;
            break;
        }
    }
    Ok(Membership {
        finite,
        quadrature_finite,
        value: if finite { value } else { f64::INFINITY },
        log_exponent: q,
    })
}

/// Outcome of [`log_pole_limit`].
#[derive(Debug, Clone, PartialEq)]
pub struct PoleLimit {
    pub eps: Vec<f64>,
    /// `ε ∫_{|z₁|<r0} dλ / (|z₁|² |log|z₁|²|^{1+2ε})` per `ε`.
    pub values: Vec<f64>,
    /// The extrapolated limit `ε → 0⁺`.
    pub limit: f64,
    pub residual: f64,
}

/// The mapped quadrature of `ε π ∫_{u₀}^∞ v^{−1−2ε} dv`: with `v = u₀ e^w`
/// and `w = x/(1−x)` the integrand becomes smooth on `(0, 1)`.
pub fn log_pole_integral(r0: f64, eps: f64) -> Result<f64> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::Parameter {
            name: "r0",
            reason: format!("must lie in (0, 1), got {r0}"),
        });
    }
    if !(eps > 0.0) {
        return Err(Error::Parameter {
            name: "eps",
            reason: format!("must be positive, got {eps}"),
        });
    }
    let u0 = -(r0 * r0).ln();
    // Stretch the map with the decay scale so the mass sits mid-interval.
    let scale = 1.0 / (2.0 * eps);
    let integrand = |x: f64| {
        let w = scale * x / (1.0 - x);
        (-2.0 * eps * w).exp() * scale / ((1.0 - x) * (1.0 - x))
    };
    let breaks: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
    let integral = Rule::composite(24, &breaks).integrate(integrand);
    Ok(eps * PI * u0.powf(-2.0 * eps) * integral)
}

/// Extrapolates [`log_pole_integral`] over `eps_schedule` to `ε → 0⁺`.
pub fn log_pole_limit(r0: f64, eps_schedule: &[f64]) -> Result<PoleLimit> {
    if eps_schedule.len() < 2 {
        return Err(Error::Parameter {
            name: "eps_schedule",
            reason: "needs at least two values".to_string(),
        });
    }
    let values = eps_schedule
        .iter()
        .map(|&e| log_pole_integral(r0, e))
        .collect::<Result<Vec<_>>>()?;
    let ext = richardson_at_zero(eps_schedule, &values);
    Ok(PoleLimit {
        eps: eps_schedule.to_vec(),
        values,
        limit: ext.value,
        residual: ext.residual,
    })
}

/// One descent step of the continuation ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderStep {
    pub from: f64,
    pub to: f64,
    /// Exponent `1 + δ` of the logarithm in the Cauchy–Schwarz split.
    pub split_exponent: f64,
    /// `∫_{|z₁|<e^{−1/2}} dλ/(|z₁|² |log|z₁|²|^{1+δ}) = π/δ`, the kernel
    /// integral the split relies on (finite because `δ > 0`).
    pub kernel_integral: f64,
}

/// The exponent ladder `s, s−1+δ, s−2(1−δ), …` down to a value in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub exponents: Vec<f64>,
    pub steps: Vec<LadderStep>,
}

/// Builds the ladder of exponents for `s > 1` and `δ ∈ (0, 1)`; the number
/// of steps is `⌈(s−1)/(1−δ)⌉`.  Exponents are `s − k(1−δ)` so no rounding
/// accumulates.
pub fn continuation_ladder(s: f64, delta: f64) -> Result<Ladder> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::Parameter {
            name: "s",
            reason: format!("must exceed 1, got {s}"),
        });
    }
    if !(delta > 0.0) {
        return Err(Error::Parameter {
            name: "delta",
            reason: format!("must be positive for the split, got {delta}"),
        });
    }
    if delta >= 1.0 {
        return Err(Error::Parameter {
            name: "delta",
            reason: format!("non-decreasing ladder: s - 1 + delta >= s for delta = {delta}"),
        });
    }
    let step = 1.0 - delta;
    let slack = 1e-12 * s.max(1.0);
    let count = ((s - 1.0 - slack) / step).ceil().max(1.0) as usize;
    let exponents: Vec<f64> = (0..=count)
        .map(|k| {
            let e = s - k as f64 * step;
            // Snap values that land on 1 up to rounding.
            if (e - 1.0).abs() <= slack {
                1.0
            } else {
                e
            }
        })
        .collect();
    let steps = exponents
        .windows(2)
        .map(|pair| LadderStep {
            from: pair[0],
            to: pair[1],
            split_exponent: 1.0 + delta,
            kernel_integral: PI / delta,
        })
        .collect();
    Ok(Ladder { exponents, steps })
}

/// Outcome of [`hormander_weight_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct HormanderReport {
    /// `c′` with `Θ ≥ −c′ ω_b` on the grid (`+∞` when unbounded).
    pub c_prime: f64,
    /// Infimum of the `i∂∂̄ψ` coefficient `−((σ−σε) + 3/log|ℓψ|)/|ψ|`; it
    /// multiplies `i∂∂̄ψ`, which vanishes on the model away from the divisor.
    pub ddbar_coefficient_inf: f64,
    /// Grid point `(|z_j|)` where the bound is attained or first fails.
    pub witness: Option<Vec<f64>>,
    pub points: usize,
    pub passed: bool,
    pub message: Option<String>,
}

/// Checks on a radial grid of the chart's polydisc that the curvature of the
/// weight `φ_L + ψ + log(|ψ|^{σ−σε}(log|ℓψ|)³)` is bounded below by
/// `−c′ ω_b`.
///
/// The `i∂ψ∧∂̄ψ` coefficient is `−C(ψ)` with
/// `C = (σ−σε)/|ψ|² + 3/(|ψ|² N) + 3/(|ψ|² N²)`, `N = log(ℓ|ψ|)`; since
/// `|∂ψ|²_{ω_b} ≤ |ψ|²/b`, it contributes at least `−C|ψ|²/b`.  For `b = 0`
/// the comparison metric is flat and `|∂ψ|² = Σ ν_j²/|z_j|²` is unbounded
/// near the divisor, which is reported as a failure with witness.
pub fn hormander_weight_check(
    chart: &SncChart,
    sigma: u32,
    eps: f64,
    ell: f64,
    b: f64,
    points_per_axis: usize,
) -> Result<HormanderReport> {
    if sigma < 1 {
        return Err(Error::Parameter {
            name: "sigma",
            reason: "must be at least 1".to_string(),
        });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter {
            name: "eps",
            reason: format!("must lie in (0, 1), got {eps}"),
        });
    }
    if !(ell > 0.0) || !(b >= 0.0) || points_per_axis < 2 {
        return Err(Error::Parameter {
            name: "ell, b, points_per_axis",
            reason: format!(
                "need ell > 0, b >= 0 and at least 2 points, got {ell}, {b}, {points_per_axis}"
            ),
        });
    }
    let nu: Vec<f64> = chart.psi.coeffs.iter().map(|&c| q_to_f64(c)).collect();
    let sig = f64::from(sigma) * (1.0 - eps);
    let axes: Vec<Vec<f64>> = chart
        .radii
        .iter()
        .map(|&r| {
            let (lo, hi) = ((r * 1e-12).ln(), r.ln());
            (0..points_per_axis)
                .map(|i| (lo + (hi - lo) * i as f64 / (points_per_axis - 1) as f64).exp())
                .collect()
        })
        .collect();
    let flat = nu.iter().all(|&v| v == 0.0);
    let mut report = HormanderReport {
        c_prime: 0.0,
        ddbar_coefficient_inf: 0.0,
        witness: None,
        points: 0,
        passed: true,
        message: None,
    };
    let mut index = vec![0usize; chart.n];
    let total = points_per_axis.pow(chart.n as u32);
    let mut min_bound = f64::INFINITY;
    for _ in 0..total {
        let r: Vec<f64> = index.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
        let r2: Vec<f64> = r.iter().map(|x| x * x).collect();
        let psi = eval_weight(&chart.psi, &r2);
        let w = -psi;
        let n_log = (ell * w).ln();
        report.points += 1;
        if !(psi < 0.0) || !(n_log > 0.0) {
            report.passed = false;
            report.c_prime = f64::INFINITY;
            report.witness = Some(r);
            report.message = Some(format!(
                "log(ell |psi|) must be positive, got psi = {psi} at the witness"
            ));
            return Ok(report);
        }
        let c2 = (sig + 3.0 / n_log + 3.0 / (n_log * n_log)) / (w * w);
        let ddbar = -(sig + 3.0 / n_log) / w;
        report.ddbar_coefficient_inf = report.ddbar_coefficient_inf.min(ddbar);
        if !flat {
            let bound = if b > 0.0 {
                c2 * w * w / b
            } else {
                c2 * nu.iter().zip(&r2).map(|(v, x)| v * v / x).sum::<f64>()
            };
            min_bound = min_bound.min(bound);
            if bound > report.c_prime {
                report.c_prime = bound;
                report.witness = Some(r);
            }
        }
        // Advance the mixed-radix grid index.
        for slot in index.iter_mut() {
            *slot += 1;
            if *slot < points_per_axis {
                break;
            }
            *slot = 0;
        }
    }
    if b == 0.0 && !flat {
        // The bound grows like |z_j|^{−2} towards the divisor; on a grid
        // spanning twelve decades this exceeds any fixed constant.
        let grows = report.c_prime > 1e6 * min_bound.max(1.0);
        if grows {
            report.passed = false;
            report.c_prime = f64::INFINITY;
            report.message =
                Some("curvature unbounded below: |d psi|^2 blows up near the divisor".to_string());
        }
    }
    Ok(report)
}
