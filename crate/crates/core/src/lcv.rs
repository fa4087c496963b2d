//! The lc-measure `lim_{ε→0⁺} ε ∫ |f|² e^{−φ_L − m1 ψ} / |ψ|^{σ+ε}`.
//!
//! Three independent routes are provided:
//!
//! * [`lcv_integral_eps`] evaluates the ε-integral directly, in the
//!   coordinates `x_j = −ν_j log r_j²` with analytic orthant tails;
//! * [`telescoped_integral_eps`] evaluates the same number after integrating
//!   by parts once per zero-defect coordinate, which moves the whole
//!   integrand onto the (compact) cutoff transition;
//! * [`lcv_closed_form`] evaluates the limit as a restricted integral over
//!   the minimal lc stratum.
//!
//! [`lcv_limit`] runs the first route on an ε-schedule, extrapolates to
//! `ε = 0` and classifies the result as zero, finite or divergent.  The
//! ε-limit is the reference; the closed form is checked against it.
//!
//! Cross terms between distinct monomials vanish after the angular
//! integration, so a sum of terms is handled term by term.

use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};

use crate::multiplier::{defects, jumping_numbers, sigma_f, JumpReport};
use crate::quadrature::{richardson_at_zero, Rule};
use crate::radial::{cutoff_moment, refine, tensor_sum, PowerProfile, TermIntegrand};
use crate::snc_model::{validate_chart, MonomialSection, SncChart, Terms};
use crate::{q_to_f64, Error, Result, Q};

/// Quadrature and classification settings.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Strictly decreasing ε values in `(0, 1/2)`.
    pub eps_schedule: Vec<f64>,
    /// Gauss points per panel on the coarsest refinement level.
    pub nodes_per_axis: usize,
    /// Refinement budget: the node count is doubled up to this value.
    pub max_nodes_per_axis: usize,
    /// Largest sampled magnitude still treated as identically zero.
    pub abs_tol: f64,
    /// Required relative accuracy of a finite extrapolated value.
    pub rel_tol: f64,
    /// Growth per ε-halving at or above which the limit is divergent.
    pub divergence_threshold: f64,
    /// Growth per ε-halving below which the values are decaying like `O(ε)`.
    pub zero_ratio: f64,
    /// Relative agreement required between two quadrature refinements.
    pub quad_rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            eps_schedule: vec![0.2, 0.1, 0.05, 0.025],
            nodes_per_axis: 16,
            max_nodes_per_axis: 128,
            abs_tol: 1e-12,
            rel_tol: 1e-3,
            divergence_threshold: 4.0,
            zero_ratio: 0.75,
            quad_rel_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    /// Checks the spec invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::Parameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.eps_schedule.is_empty() {
            return bad("eps_schedule", "must not be empty");
        }
        if !self.eps_schedule.iter().all(|&e| e > 0.0 && e < 0.5) {
            return bad("eps_schedule", "every ε must lie in (0, 1/2)");
        }
        if !self.eps_schedule.windows(2).all(|w| w[0] > w[1]) {
            return bad("eps_schedule", "must be strictly decreasing");
        }
        if self.nodes_per_axis < 2 || self.max_nodes_per_axis < 2 * self.nodes_per_axis {
            return bad(
                "nodes_per_axis",
                "need nodes_per_axis ≥ 2 and max_nodes_per_axis ≥ 2·nodes_per_axis",
            );
        }
        for (name, v) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("quad_rel_tol", self.quad_rel_tol),
            ("zero_ratio", self.zero_ratio),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, "must be positive and finite");
            }
        }
        if !(self.divergence_threshold > 1.0) {
            return bad("divergence_threshold", "must exceed 1");
        }
        if self.zero_ratio >= 1.0 {
            return bad("zero_ratio", "must be below 1");
        }
        Ok(())
    }
}

/// Trichotomy of an lc-measure limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureClass {
    Zero,
    Finite,
    Divergent,
}

impl MeasureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureClass::Zero => "zero",
            MeasureClass::Finite => "finite",
            MeasureClass::Divergent => "divergent",
        }
    }

    /// The class predicted for `σ` by the minimal-centre codimension `σ_f`.
    pub fn expected(sigma: usize, sigma_f: usize) -> MeasureClass {
        if sigma_f == 0 || sigma > sigma_f {
            MeasureClass::Zero
        } else if sigma == sigma_f {
            MeasureClass::Finite
        } else {
            MeasureClass::Divergent
        }
    }
}

/// Numerical evidence behind a [`MeasureResult`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub eps: Vec<f64>,
    /// `ε · ∫ …` per schedule entry (`+∞` where the integral diverges).
    pub integrals: Vec<f64>,
    /// Estimated quadrature error per schedule entry.
    pub quadrature_errors: Vec<f64>,
    /// Error indicator of the extrapolation to `ε = 0`.
    pub extrapolation_residual: f64,
    /// Ratio of the last two integrals (one ε-halving).
    pub growth_ratio: f64,
}

/// A classified lc-measure limit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub class: MeasureClass,
    /// Present iff `class` is finite.
    pub value: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl MeasureResult {
    fn zero(diagnostics: Diagnostics) -> Self {
        MeasureResult {
            class: MeasureClass::Zero,
            value: None,
            diagnostics,
        }
    }

    /// The value as a number: 0 for zero, `+∞` for divergent.
    pub fn numeric_value(&self) -> f64 {
        match self.class {
            MeasureClass::Zero => 0.0,
            MeasureClass::Finite => self.value.unwrap_or(f64::NAN),
            MeasureClass::Divergent => f64::INFINITY,
        }
    }
}

fn require_valid(chart: &SncChart) -> Result<()> {
    let violations = validate_chart(chart);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "invalid chart: {}",
            violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        )))
    }
}

/// `ε ∫ |f|² e^{−φ_L − m1 ψ} / |ψ|^{σ+ε}` and its quadrature error estimate.
pub fn lcv_integral_eps_with_error(
    chart: &SncChart,
    f: &impl Terms,
    sigma: usize,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    require_valid(chart)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter {
            name: "eps",
            reason: format!("must be positive, got {eps}"),
        });
    }
    let profile = PowerProfile {
        p: sigma as f64 + eps,
    };
    let mut total = 0.0;
    let mut error = 0.0;
    for term in f.terms() {
        let (v, e) = refine(
            |n| TermIntegrand::new(chart, term, n).integrate(&profile),
            spec.nodes_per_axis,
            spec.max_nodes_per_axis,
            spec.quad_rel_tol,
        )?;
        total += v;
        error += e;
    }
    Ok((eps * total, eps * error))
}

/// `ε ∫_polydisc |f|² e^{−φ_L − m1 ψ} / |ψ|^{σ+ε} ω^n/n!`; `+∞` when the
/// integral diverges.  Deterministic for a fixed spec.
pub fn lcv_integral_eps(
    chart: &SncChart,
    f: &impl Terms,
    sigma: usize,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    lcv_integral_eps_with_error(chart, f, sigma, eps, spec).map(|(v, _)| v)
}

/// Evaluates the ε-integral over the schedule and classifies the limit.
///
/// * any infinite value, or growth by at least `divergence_threshold` over
///   the last ε-halving, is divergent;
/// * values below `abs_tol`, or values decaying with ratio below
///   `zero_ratio` whose polynomial extrapolation to `ε = 0` vanishes
///   relative to the samples, are zero;
/// * otherwise the values must be positive, and the limit is obtained by
///   polynomial (Richardson) extrapolation of `log(value)` to `ε = 0`; it is
///   accepted as finite when dropping the largest ε moves it by at most
///   `rel_tol` relative.
///
/// Anything else is reported as [`Error::Inconclusive`].
pub fn lcv_limit(
    chart: &SncChart,
    f: &impl Terms,
    sigma: usize,
    spec: &QuadratureSpec,
) -> Result<MeasureResult> {
    spec.validate()?;
    let mut diagnostics = Diagnostics {
        eps: spec.eps_schedule.clone(),
        ..Diagnostics::default()
    };
    for &eps in &spec.eps_schedule {
        let (v, e) = lcv_integral_eps_with_error(chart, f, sigma, eps, spec)?;
        diagnostics.integrals.push(v);
        diagnostics.quadrature_errors.push(e);
    }
    classify(diagnostics, spec)
}

fn classify(mut diagnostics: Diagnostics, spec: &QuadratureSpec) -> Result<MeasureResult> {
    let values = diagnostics.integrals.clone();
    let n = values.len();
    if values.iter().any(|v| v.is_nan()) {
        return Err(inconclusive("NaN integral", &diagnostics));
    }
    diagnostics.growth_ratio = if n >= 2 {
        growth(values[n - 2], values[n - 1])
    } else {
        f64::NAN
    };
    if values.iter().any(|v| v.is_infinite()) {
        diagnostics.growth_ratio = f64::INFINITY;
        diagnostics.extrapolation_residual = f64::NAN;
        return Ok(MeasureResult {
            class: MeasureClass::Divergent,
            value: None,
            diagnostics,
        });
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale <= spec.abs_tol {
        diagnostics.extrapolation_residual = scale;
        return Ok(MeasureResult::zero(diagnostics));
    }
    if n < 2 {
        return Err(inconclusive(
            "a single ε sample cannot be classified",
            &diagnostics,
        ));
    }
    if diagnostics.growth_ratio >= spec.divergence_threshold {
        diagnostics.extrapolation_residual = f64::NAN;
        return Ok(MeasureResult {
            class: MeasureClass::Divergent,
            value: None,
            diagnostics,
        });
    }
    if diagnostics.growth_ratio < spec.zero_ratio {
        let ext = richardson_at_zero(&diagnostics.eps, &values);
        diagnostics.extrapolation_residual = ext.residual;
        if ext.value.abs() <= 0.05 * scale {
            return Ok(MeasureResult::zero(diagnostics));
        }
        return Err(inconclusive(
            "values decay but do not extrapolate to zero",
            &diagnostics,
        ));
    }
    // A finite limit behaves like `L · exp(−ε E[log|ψ|] + O(ε²))`, so the
    // logarithm is close to linear in ε and extrapolates far more accurately
    // than the values themselves.
    if values.iter().all(|&v| v > 0.0) {
        let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let ext = richardson_at_zero(&diagnostics.eps, &logs);
        let value = ext.value.exp();
        diagnostics.extrapolation_residual = value * ext.residual.exp_m1().abs();
        if diagnostics.extrapolation_residual <= spec.rel_tol * value {
            return Ok(MeasureResult {
                class: MeasureClass::Finite,
                value: Some(value),
                diagnostics,
            });
        }
    } else {
        diagnostics.extrapolation_residual = f64::NAN;
    }
    Err(inconclusive(
        "extrapolated value is not positive or not stable to rel_tol",
        &diagnostics,
    ))
}

fn growth(previous: f64, last: f64) -> f64 {
    if last.is_infinite() {
        f64::INFINITY
    } else if previous == 0.0 {
        if last == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        last / previous
    }
}

fn inconclusive(reason: &str, d: &Diagnostics) -> Error {
    Error::Inconclusive {
        reason: reason.to_string(),
        eps: d.eps.clone(),
        values: d.integrals.clone(),
    }
}

/// Coordinates where the twisted potential `φ̃_L = φ_L + m1 ψ − Σ_{j∈S} log|z_j|²`
/// has coefficient `≥ 1`, i.e. where the klt assumption fails.
pub fn klt_failures(chart: &SncChart, report: &JumpReport) -> Vec<usize> {
    chart
        .coeffs_at(chart.m1)
        .iter()
        .enumerate()
        .filter(|(j, &c)| {
            let twisted = if report.s_components.contains(j) {
                c - Q::one()
            } else {
                c
            };
            twisted >= Q::one()
        })
        .map(|(j, _)| j)
        .collect()
}

/// The closed form of the lc-measure at `σ = σ_f`:
///
/// ```text
///   A² e^{−β − m1 α} (2π)^{σ_f} / ((σ_f − 1)! ∏_{j∈Z} ν_j) · ∏_{k∉Z} 2π ∫_0^{ρ_k} 2 r^{2 d_k − 1} χ_k² dr
/// ```
///
/// summed over the terms whose `σ_f` is maximal, where `Z` is the
/// zero-defect set (the minimal lc stratum of the term) and
/// `d_k = a_k + 1 − c_k(m1)`.  In the stratum integral the monomial enters as
/// `|z_k|^{2 a_k}`; see the test suite for the comparison with the
/// `|z_k|^{a_k}` alternative.
///
/// Returns `(σ_f, result)`; `σ_f = 0` gives the zero measure.
pub fn lcv_closed_form(chart: &SncChart, f: &impl Terms) -> Result<(usize, MeasureResult)> {
    require_valid(chart)?;
    let report = jumping_numbers(chart, chart.m1)?;
    let klt = klt_failures(chart, &report);
    let mut best = 0usize;
    let mut value = 0.0;
    for term in f.terms() {
        let s = sigma_f(chart, &report, term)?;
        let d = defects(chart, term);
        if !klt.is_empty() {
            // Without the klt assumption the stratum integral is still finite
            // when the section vanishes enough along every transverse axis.
            if let Some(k) =
                (0..chart.n).find(|k| !s.zero_defect.contains(k) && !d[*k].is_positive())
            {
                return Err(Error::Precondition(format!(
                    "klt assumption fails at coordinates {klt:?} and the section {:?} \
                     lacks compensating vanishing along coordinate {k} (defect {})",
                    term.exponents, d[k]
                )));
            }
        }
        if s.sigma_f == 0 {
            continue;
        }
        let v = stratum_value(chart, term, &s.zero_defect, 64);
        match s.sigma_f.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = s.sigma_f;
                value = v;
            }
            std::cmp::Ordering::Equal => value += v,
            std::cmp::Ordering::Less => {}
        }
    }
    let result = if best == 0 {
        MeasureResult::zero(Diagnostics::default())
    } else {
        MeasureResult {
            class: MeasureClass::Finite,
            value: Some(value),
            diagnostics: Diagnostics::default(),
        }
    };
    Ok((best, result))
}

fn stratum_value(chart: &SncChart, f: &MonomialSection, zero: &[usize], nodes: usize) -> f64 {
    let m = zero.len();
    let m1 = q_to_f64(chart.m1);
    let d = defects(chart, f);
    let mut v = f.amplitude * f.amplitude * (-chart.phi_l.shift - m1 * chart.psi.shift).exp();
    v *= (2.0 * PI).powi(m as i32) / (1..m).map(|i| i as f64).product::<f64>();
    for (j, &dj) in d.iter().enumerate() {
        if zero.contains(&j) {
            let chi0 = f.cutoff(j, 0.0).0;
            v *= chi0 * chi0 / q_to_f64(chart.psi.coeffs[j]);
        } else {
            v *= cutoff_moment(f, j, q_to_f64(dj), nodes);
        }
    }
    v
}

/// One row of a trichotomy table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrichotomyRow {
    pub sigma: usize,
    pub result: MeasureResult,
}

/// [`lcv_limit`] for `σ = 0, …, n`.
pub fn trichotomy_table(
    chart: &SncChart,
    f: &impl Terms,
    spec: &QuadratureSpec,
) -> Result<Vec<TrichotomyRow>> {
    (0..=chart.n)
        .map(|sigma| lcv_limit(chart, f, sigma, spec).map(|result| TrichotomyRow { sigma, result }))
        .collect()
}

/// `true` iff the classes read divergent … divergent, finite (at `σ_f`),
/// zero … zero, as predicted by `σ_f`.
pub fn table_matches(table: &[TrichotomyRow], sigma_f: usize) -> bool {
    table
        .iter()
        .all(|row| row.result.class == MeasureClass::expected(row.sigma, sigma_f))
}

/// The ε-integral by repeated integration by parts.
///
/// For each zero-defect coordinate the integral over `x_j ∈ [x_ρ, ∞)` is
/// integrated by parts, trading one power of `|ψ|` for the derivative of the
/// cutoff:
///
/// ```text
///   ε ∫ |f|² e^{…} |ψ|^{−p} = (−1)^m ε (2π)^m / (∏_Z ν_j ∏_{i=1}^{m} (p − i))
///                            · ∫ ∏_Z (χ_j²)′(r_j) dr_j · [rest] · |ψ|^{m−p}
/// ```
///
/// with `p = σ + ε` and `m = |Z|`.  The `r_j` integrals run over the compact
/// transitions `[ρ_j/2, ρ_j]`; the remaining coordinates are treated as in
/// [`lcv_integral_eps`].  Defined for `σ ≥ m`; smaller σ give `+∞`.
pub fn telescoped_integral_eps(
    chart: &SncChart,
    f: &MonomialSection,
    sigma: usize,
    eps: f64,
    nodes: usize,
) -> Result<f64> {
    require_valid(chart)?;
    let base = TermIntegrand::new(chart, f, nodes);
    let (constant, full, offset, divergence) = base.parts();
    if divergence.is_some() {
        return Ok(f64::INFINITY);
    }
    let d = defects(chart, f);
    let zero: Vec<usize> = (0..chart.n)
        .filter(|&j| chart.psi.coeffs[j].is_positive() && d[j].is_zero())
        .collect();
    let m = zero.len();
    let p = sigma as f64 + eps;
    if p <= m as f64 {
        return Ok(f64::INFINITY);
    }
    let mut prefactor = eps * constant * if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    for i in 1..=m {
        prefactor /= p - i as f64;
    }
    let mut boundary_rules = Vec::with_capacity(m);
    for &j in &zero {
        let nu = q_to_f64(chart.psi.coeffs[j]);
        prefactor *= 2.0 * PI / nu;
        let rho = f.support_radius[j];
        let gl = Rule::gauss_legendre(4 * nodes, 0.5 * rho, rho);
        let weights = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(&r, &w)| {
                let (chi, dchi) = f.cutoff(j, r);
                w * 2.0 * chi * dchi
            })
            .collect();
        let nodes_x = gl.nodes.iter().map(|&r| -nu * (r * r).ln()).collect();
        boundary_rules.push(Rule {
            nodes: nodes_x,
            weights,
        });
    }
    let mut rules: Vec<&Rule> = boundary_rules.iter().collect();
    rules.extend(full.iter());
    let q = p - m as f64;
    Ok(prefactor * tensor_sum(&rules, offset, &|s: f64| s.powf(-q)))
}
