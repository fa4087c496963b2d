//! The extension estimate on diagonal models: minimal extensions and the
//! staged comparison of their weighted norms with the lc-measure.
//!
//! For a residue class of monomials the weights are radial, so distinct
//! monomials are orthogonal in every weighted L² space considered here.  The
//! minimal extension of a monomial is therefore the monomial itself, and the
//! norm of a sum of distinct monomials is the sum of their norms.
//!
//! [`check_main_estimate`] is a necessary-condition test: the theorem
//! guarantees *some* extension obeys the bound, so the minimal one must.  It
//! is not a proof of the bound.

use num_traits::Signed;

use crate::lcv::{lcv_limit, MeasureClass, QuadratureSpec};
use crate::multiplier::{jumping_numbers, sigma_f, JumpReport};
use crate::radial::{refine, LogDampedProfile, TermIntegrand};
use crate::snc_model::{validate_chart, MonomialSection, MultiMonomialSection, SncChart, Terms};
use crate::weights::{is_normalized, normalize_psi, AuxParams};
use crate::{Error, Result, Q};

/// A minimal extension, or the zero section with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub section: Option<MonomialSection>,
    pub note: Option<String>,
}

/// The weighted-L²-minimal extension of the class of `f` modulo
/// `𝓘(φ_L + m1 ψ)`: `f` itself, or zero when `f` already lies in that ideal.
pub fn minimal_extension(chart: &SncChart, f: &MonomialSection) -> Result<Extension> {
    if !f.in_multiplier(chart, chart.m0) {
        return Err(Error::Precondition(format!(
            "section with exponents {:?} is not in I(phi_L + m0 psi)",
            f.exponents
        )));
    }
    if f.in_multiplier(chart, chart.m1) {
        return Ok(Extension {
            section: None,
            note: Some("section lies in I(phi_L + m1 psi); its class is zero".to_string()),
        });
    }
    Ok(Extension {
        section: Some(f.clone()),
        note: None,
    })
}

/// Parameters of the estimate checks.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateParams {
    /// `ℓ > 0` in `(σ log(ℓ|ψ|))² + 1`.
    pub ell: f64,
    /// Curvature budget used for the normalisation of `ψ`.
    pub delta: f64,
    /// `ε` of the auxiliary weights used for the normalisation.
    pub eps: f64,
    pub spec: QuadratureSpec,
    /// Margin tolerance as a multiple of the larger error estimate.
    pub tolerance_factor: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            ell: 1.0,
            delta: 1.0,
            eps: 0.01,
            spec: QuadratureSpec::default(),
            tolerance_factor: 3.0,
        }
    }
}

impl EstimateParams {
    /// Auxiliary parameters for stage `σ`.
    pub fn aux(&self, sigma: usize) -> AuxParams {
        let mut p = AuxParams::new(sigma as u32, self.ell, self.delta);
        p.eps = self.eps;
        p
    }
}

/// `ψ` shift making the chart normalised for every `σ ∈ 1..=sigma_max`.
pub fn normalize_for_stages(
    chart: &SncChart,
    params: &EstimateParams,
    sigma_max: usize,
) -> Result<SncChart> {
    let mut out = chart.clone();
    for sigma in 1..=sigma_max.max(1) {
        out = normalize_psi(&out, &params.aux(sigma))?.chart;
    }
    Ok(out)
}

/// `∫ |F|² e^{−φ_L − m1 ψ} / (|ψ|^σ ((σ log(ℓ|ψ|))² + 1))` over the polydisc
/// with its quadrature error estimate.  Distinct monomials are orthogonal,
/// so the integral is the sum over terms.
///
/// Requires `ψ` normalised for `σ`; a divergent integral (a term without
/// the vanishing the weight demands) is an error.
pub fn estimate_lhs_with_error(
    chart: &SncChart,
    f: &impl Terms,
    sigma: usize,
    params: &EstimateParams,
) -> Result<(f64, f64)> {
    if sigma == 0 {
        return Err(Error::Parameter {
            name: "sigma",
            reason: "must be at least 1".to_string(),
        });
    }
    if !is_normalized(chart, &params.aux(sigma))? {
        return Err(Error::Precondition(format!(
            "psi is not normalised for sigma = {sigma} (sup psi = {})",
            chart.sup_psi()
        )));
    }
    let profile = LogDampedProfile::new(sigma, params.ell);
    let mut total = 0.0;
    let mut error = 0.0;
    for term in f.terms() {
        let (v, e) = refine(
            |n| TermIntegrand::new(chart, term, n).integrate(&profile),
            params.spec.nodes_per_axis,
            params.spec.max_nodes_per_axis,
            params.spec.quad_rel_tol,
        )?;
        if v.is_infinite() {
            return Err(Error::Divergent(format!(
                "weighted norm of the term with exponents {:?} diverges at sigma = {sigma}",
                term.exponents
            )));
        }
        total += v;
        error += e;
    }
    Ok((total, error))
}

/// [`estimate_lhs_with_error`] without the error estimate.
pub fn estimate_lhs(
    chart: &SncChart,
    f: &impl Terms,
    sigma: usize,
    params: &EstimateParams,
) -> Result<f64> {
    estimate_lhs_with_error(chart, f, sigma, params).map(|(v, _)| v)
}

/// Symbolic certificate of `i∂∂̄(φ_L + (m1 + β) ψ) ≥ 0` for `β ∈ [0, δ]` on
/// a diagonal model: the current is `Σ_j (c_j(m1) + β ν_j) [z_j = 0]` (with
/// positive normalising factors), so it suffices that every `c_j(m1) ≥ 0`
/// and every `ν_j ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureCertificate {
    /// `c_j(m1) = ℓ_j + m1 ν_j`.
    pub coefficients: Vec<Q>,
    pub holds: bool,
}

/// Builds the [`CurvatureCertificate`] of `chart`.
pub fn curvature_certificate(chart: &SncChart) -> CurvatureCertificate {
    let coefficients = chart.coeffs_at(chart.m1);
    let holds = coefficients.iter().all(|c| !c.is_negative())
        && chart.psi.coeffs.iter().all(|c| !c.is_negative());
    CurvatureCertificate {
        coefficients,
        holds,
    }
}

/// One stage of the staged extension.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub sigma: usize,
    /// The extension `F_σ` of this stage (terms with `σ_f = σ`).
    pub extension: Vec<MonomialSection>,
    /// Weighted norm-square of `F_σ`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `(1/σ)·` lc-measure of the residual at `σ`.
    pub rhs: f64,
    pub rhs_error: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub tolerance: f64,
    /// Residual `f − Σ_{i ≥ σ} F_i` after this stage.
    pub residual: Vec<MonomialSection>,
}

impl StageReport {
    pub fn passed(&self) -> bool {
        self.margin >= -self.tolerance
    }
}

/// Per-stage outcome of [`check_main_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    /// For `σ = σ_f` down to 1.
    pub stages: Vec<StageReport>,
    /// Terms of `f` already in `𝓘(φ_L + m1 ψ)`, dropped at the start.
    pub dropped: Vec<MonomialSection>,
    pub certificate: CurvatureCertificate,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(StageReport::passed)
    }

    /// The final residual; empty when every stage consumed its terms.
    pub fn final_residual(&self) -> &[MonomialSection] {
        self.stages.last().map_or(&[], |s| &s.residual)
    }
}

/// Runs the staged extension of `f` and compares each stage with the
/// lc-measure bound `LHS_σ ≤ (1/σ) lcv_σ(residual) + tol`.
///
/// The chart must be valid, satisfy the curvature certificate, and be
/// normalised for every stage (see [`normalize_for_stages`]).  A stage with
/// a negative margin beyond tolerance is reported, never corrected.
pub fn check_main_estimate(
    chart: &SncChart,
    f: &MultiMonomialSection,
    params: &EstimateParams,
) -> Result<ExtensionReport> {
    let violations = validate_chart(chart);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Precondition(format!(
            "invalid chart: {}",
            text.join("; ")
        )));
    }
    let certificate = curvature_certificate(chart);
    if !certificate.holds {
        return Err(Error::Precondition(format!(
            "curvature certificate fails: coefficients of phi_L + m1 psi are {:?}",
            certificate
                .coefficients
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        )));
    }
    let report: JumpReport = jumping_numbers(chart, chart.m1)?;
    let mut residual: Vec<(usize, MonomialSection)> = Vec::new();
    let mut dropped = Vec::new();
    for term in f.terms() {
        let ext = minimal_extension(chart, term)?;
        match ext.section {
            Some(section) => {
                let s = sigma_f(chart, &report, &section)?.sigma_f;
                residual.push((s, section));
            }
            None => dropped.push(term.clone()),
        }
    }
    let sigma_max = residual.iter().map(|(s, _)| *s).max().unwrap_or(0);
    let mut stages = Vec::new();
    for sigma in (1..=sigma_max).rev() {
        let current = MultiMonomialSection::new(residual.iter().map(|(_, t)| t.clone()).collect())?;
        let limit = lcv_limit(chart, &current, sigma, &params.spec)?;
        let (rhs, rhs_error) = match limit.class {
            MeasureClass::Finite | MeasureClass::Zero => {
                let d = &limit.diagnostics;
                let quad = d.quadrature_errors.iter().fold(0.0f64, |m, e| m.max(*e));
                let ext = if d.extrapolation_residual.is_finite() {
                    d.extrapolation_residual
                } else {
                    0.0
                };
                (
                    limit.numeric_value() / sigma as f64,
                    (ext + quad) / sigma as f64,
                )
            }
            MeasureClass::Divergent => {
                return Err(Error::Divergent(format!(
                    "lc-measure of the residual diverges at sigma = {sigma}"
                )));
            }
        };
        let (stage, rest): (Vec<_>, Vec<_>) = residual.into_iter().partition(|(s, _)| *s == sigma);
        residual = rest;
        let extension: Vec<MonomialSection> = stage.into_iter().map(|(_, t)| t).collect();
        let (lhs, lhs_error) = if extension.is_empty() {
            (0.0, 0.0)
        } else {
            estimate_lhs_with_error(
                chart,
                &MultiMonomialSection::new(extension.clone())?,
                sigma,
                params,
            )?
        };
        let tolerance = params.tolerance_factor * lhs_error.max(rhs_error);
        stages.push(StageReport {
            sigma,
            extension,
            lhs,
            lhs_error,
            rhs,
            rhs_error,
            margin: rhs - lhs,
            tolerance,
            residual: residual.iter().map(|(_, t)| t.clone()).collect(),
        });
    }
    Ok(ExtensionReport {
        stages,
        dropped,
        certificate,
    })
}
