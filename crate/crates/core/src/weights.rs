//! Auxiliary weight families of the extension proofs and the checks of
//! their curvature budget.
//!
//! With `u = |t|`, `ℓ^σ` in place of `ℓ`, and `L = log(ℓ^σ u / e)` on the
//! domain `t < −e/ℓ^σ` (where `L > 0`):
//!
//! ```text
//!   ν̃(t)  = −log L                        η̃_ε(t) = u^{1−ε} L
//!   λ̃_ε(t) = η̃_ε (1−ε+1/L)² / (2ε/L + 1/L²)  Γ(t)   = ε(1−ε) / (e^ν̃ u^{1+ε})
//! ```
//!
//! In the ψ variable (`w = |ψ|`, `t = −w^σ`, `M = log(ℓw/e_σ)`,
//! `N = log(ℓw)`, `e_σ = e^{1/σ}`):
//!
//! ```text
//!   e^{−μ̃(ψ)} = η̃_ε(−w^σ) · N³
//!   Λ(ψ)      = (1 − ε + 2/(σM)) · η̃_ε(−w^σ) · σ(σ−1)/w²
//! ```
//!
//! Every derivative is coded from a hand-differentiated closed form.  The
//! tests compare them to finite differences.

use std::f64::consts::E;

use crate::quadrature::{bisect, smoothstep};
use crate::snc_model::SncChart;
use crate::{Error, Result};

/// Parameters of the weight families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    /// `ε ∈ (0, 1)`.
    pub eps: f64,
    /// `ℓ > 0`.
    pub ell: f64,
    /// `σ ≥ 1`.
    pub sigma: u32,
    /// Curvature budget `δ > 0`.
    pub delta: f64,
    /// Cutoff parameter `A > B`.
    pub cut_a: f64,
    /// Cutoff parameter `B > 1`.
    pub cut_b: f64,
    /// Slack `ε₀ ≥ 0` in the cutoff derivative bound.
    pub eps0: f64,
    /// Metric twist `b ≥ 0` of `ω_b`.
    pub b: f64,
    /// Cauchy–Schwarz splitting constant `α > 0`.
    pub alpha: f64,
}

impl AuxParams {
    /// Parameters with the given `σ, ℓ, δ` and defaults `ε = 0.01`,
    /// `A = 4`, `B = 2`, `ε₀ = 0`, `b = 1`, `α = 1`.
    pub fn new(sigma: u32, ell: f64, delta: f64) -> Self {
        AuxParams {
            eps: 0.01,
            ell,
            sigma,
            delta,
            cut_a: 4.0,
            cut_b: 2.0,
            eps0: 0.0,
            b: 1.0,
            alpha: 1.0,
        }
    }

    /// Checks every parameter range.
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::Parameter { name, reason });
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps", format!("must lie in (0, 1), got {}", self.eps));
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return bad("ell", format!("must be positive, got {}", self.ell));
        }
        if self.sigma < 1 {
            return bad("sigma", "must be at least 1".to_string());
        }
        if !(self.delta > 0.0) {
            return bad("delta", format!("must be positive, got {}", self.delta));
        }
        if !(self.cut_b > 1.0 && self.cut_a > self.cut_b) {
            return bad(
                "A, B",
                format!("need A > B > 1, got A = {}, B = {}", self.cut_a, self.cut_b),
            );
        }
        if !(self.eps0 >= 0.0) {
            return bad("eps0", format!("must be non-negative, got {}", self.eps0));
        }
        if !(self.b >= 0.0) {
            return bad("b", format!("must be non-negative, got {}", self.b));
        }
        if !(self.alpha > 0.0) {
            return bad("alpha", format!("must be positive, got {}", self.alpha));
        }
        Ok(())
    }

    /// `e_σ = e^{1/σ}`.
    pub fn e_sigma(&self) -> f64 {
        (1.0 / f64::from(self.sigma)).exp()
    }

    /// Upper end `−e/ℓ^σ` of the t-domain.
    pub fn t_bound(&self) -> f64 {
        -E / self.ell.powi(self.sigma as i32)
    }

    /// Upper end `−e_σ/ℓ` of the ψ-domain.
    pub fn psi_bound(&self) -> f64 {
        -self.e_sigma() / self.ell
    }

    fn sigma_f64(&self) -> f64 {
        f64::from(self.sigma)
    }
}

/// A value with its first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Evaluator of the weight families for fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxWeights {
    pub params: AuxParams,
}

/// Builds the evaluator after validating the parameters.
pub fn build_aux(params: AuxParams) -> Result<AuxWeights> {
    params.validate()?;
    Ok(AuxWeights { params })
}

impl AuxWeights {
    /// `(u, L)` for `t` in the domain.
    fn dom(&self, t: f64) -> Result<(f64, f64)> {
        let bound = self.params.t_bound();
        if !(t < bound) || !t.is_finite() {
            return Err(Error::Domain { t, bound });
        }
        let u = -t;
        let l = (self.params.ell.powi(self.params.sigma as i32) * u).ln() - 1.0;
        Ok((u, l))
    }

    /// `(w, M, N)` for `ψ` in the domain.
    fn dom_psi(&self, psi: f64) -> Result<(f64, f64, f64)> {
        let bound = self.params.psi_bound();
        if !(psi < bound) || !psi.is_finite() {
            return Err(Error::Domain { t: psi, bound });
        }
        let w = -psi;
        let n = (self.params.ell * w).ln();
        Ok((w, n - 1.0 / self.params.sigma_f64(), n))
    }

    /// Converts derivatives in `u = −t` to derivatives in `t`.
    fn jet_t(value: f64, du: f64, duu: f64) -> Jet {
        Jet {
            value,
            d1: -du,
            d2: duu,
        }
    }

    /// `ν̃(t) = −log L`.
    pub fn nu(&self, t: f64) -> Result<Jet> {
        let (u, l) = self.dom(t)?;
        Ok(Self::jet_t(
            -l.ln(),
            -1.0 / (u * l),
            (l + 1.0) / (u * u * l * l),
        ))
    }

    /// `η̃_ε(t) = u^{1−ε} L`.
    pub fn eta(&self, t: f64) -> Result<Jet> {
        let (u, l) = self.dom(t)?;
        let e = self.params.eps;
        let pow = u.powf(-e);
        Ok(Self::jet_t(
            u * pow * l,
            pow * ((1.0 - e) * l + 1.0),
            pow / u * ((1.0 - e) * (1.0 - e * l) - e),
        ))
    }

    /// `log η̃_ε(t)`.
    pub fn log_eta(&self, t: f64) -> Result<Jet> {
        let (u, l) = self.dom(t)?;
        let e = self.params.eps;
        Ok(Self::jet_t(
            (1.0 - e) * u.ln() + l.ln(),
            (1.0 - e) / u + 1.0 / (u * l),
            -(1.0 - e) / (u * u) - (l + 1.0) / (u * u * l * l),
        ))
    }

    /// `λ̃_ε(t) = η̃_ε R(L)` with `R = P²/Q`, `P = 1 + (1−ε)L`, `Q = 1 + 2εL`.
    pub fn lambda(&self, t: f64) -> Result<Jet> {
        let (u, l) = self.dom(t)?;
        let e = self.params.eps;
        let eta = self.eta(t)?;
        let (eta_u, eta_uu) = (-eta.d1, eta.d2);
        let p = 1.0 + (1.0 - e) * l;
        let q = 1.0 + 2.0 * e * l;
        let s = 1.0 - 2.0 * e + e * (1.0 - e) * l;
        let (dp, ds, dq) = (1.0 - e, e * (1.0 - e), 2.0 * e);
        let r = p * p / q;
        let r1 = 2.0 * p * s / (q * q);
        let r2 = 2.0 * ((dp * s + p * ds) * q - 2.0 * p * s * dq) / (q * q * q);
        Ok(Self::jet_t(
            eta.value * r,
            eta_u * r + eta.value * r1 / u,
            eta_uu * r + 2.0 * eta_u * r1 / u + eta.value * (r2 - r1) / (u * u),
        ))
    }

    /// `Γ(t) = ε(1−ε) L / u^{1+ε}` (the closed form the construction aims at).
    pub fn gamma(&self, t: f64) -> Result<Jet> {
        let (u, l) = self.dom(t)?;
        let e = self.params.eps;
        let c = e * (1.0 - e);
        let pow = u.powf(-1.0 - e);
        Ok(Self::jet_t(
            c * l * pow,
            c * pow / u * (1.0 - (1.0 + e) * l),
            c * pow / (u * u) * (-(2.0 + e) * (1.0 - (1.0 + e) * l) - (1.0 + e)),
        ))
    }

    /// `Γ` through its defining combination `η̃ν̃″ − η̃″ − (η̃′)²/λ̃`.
    pub fn gamma_defining(&self, t: f64) -> Result<f64> {
        let eta = self.eta(t)?;
        let nu = self.nu(t)?;
        let lambda = self.lambda(t)?;
        Ok(eta.value * nu.d2 - eta.d2 - eta.d1 * eta.d1 / lambda.value)
    }

    /// `Γ` through `η̃ (ν̃″ − (log η̃)″ − (1 + η̃/λ̃)((log η̃)′)²)`.
    pub fn gamma_good_form(&self, t: f64) -> Result<f64> {
        let eta = self.eta(t)?;
        let nu = self.nu(t)?;
        let lambda = self.lambda(t)?;
        let log_eta = self.log_eta(t)?;
        Ok(eta.value
            * (nu.d2 - log_eta.d2 - (1.0 + eta.value / lambda.value) * log_eta.d1 * log_eta.d1))
    }

    /// `η_ε = η̃_ε(−|ψ|^σ)` as a function of `ψ`.
    pub fn eta_psi(&self, psi: f64) -> Result<f64> {
        let (w, m, _) = self.dom_psi(psi)?;
        let c = self.params.sigma_f64() * (1.0 - self.params.eps);
        Ok(w.powf(c) * self.params.sigma_f64() * m)
    }

    /// `μ̃(ψ) = −log η̃_ε(−|ψ|^σ) − 3 log log(ℓ|ψ|)` with ψ-derivatives.
    pub fn mu(&self, psi: f64) -> Result<Jet> {
        let (w, m, n) = self.dom_psi(psi)?;
        let sigma = self.params.sigma_f64();
        let c = sigma * (1.0 - self.params.eps);
        let value = -(c * w.ln() + (sigma * m).ln()) - 3.0 * n.ln();
        let dw = -c / w - 1.0 / (w * m) - 3.0 / (w * n);
        let dww = c / (w * w) + (m + 1.0) / (w * w * m * m) + 3.0 * (n + 1.0) / (w * w * n * n);
        Ok(Jet {
            value,
            d1: -dw,
            d2: dww,
        })
    }

    /// `Λ(ψ) = σ(σ−1) w^{c−2} (c M + 2)` with `c = σ(1−ε)`, and ψ-derivatives.
    pub fn big_lambda(&self, psi: f64) -> Result<Jet> {
        let (w, m, _) = self.dom_psi(psi)?;
        let sigma = self.params.sigma_f64();
        let c = sigma * (1.0 - self.params.eps);
        let k = c - 2.0;
        let s = sigma * (sigma - 1.0);
        let g = c * m + 2.0;
        let dw = s * w.powf(k - 1.0) * (k * g + c);
        let dww = s * w.powf(k - 2.0) * ((k - 1.0) * (k * g + c) + k * c);
        Ok(Jet {
            value: s * w.powf(k) * g,
            d1: -dw,
            d2: dww,
        })
    }
}

/// The cutoff `θ`: `≡ 1` on `[0, 1/A]`, `≡ 0` on `[1/B, ∞)`, a quintic
/// smoothstep in between (C², non-increasing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    pub a: f64,
    pub b: f64,
    pub eps0: f64,
    /// Measured `sup |θ′|`.
    pub sup_theta_prime: f64,
    /// Measured `sup |θ″|`.
    pub sup_theta_second: f64,
}

impl CutoffProfile {
    /// Builds the profile and measures its derivative bounds on a dense grid
    /// of the transition interval.
    pub fn new(a: f64, b: f64, eps0: f64) -> Result<Self> {
        if !(b > 1.0 && a > b) {
            return Err(Error::Parameter {
                name: "A, B",
                reason: format!("need A > B > 1, got A = {a}, B = {b}"),
            });
        }
        if !(eps0 >= 0.0) {
            return Err(Error::Parameter {
                name: "eps0",
                reason: format!("must be non-negative, got {eps0}"),
            });
        }
        let mut profile = CutoffProfile {
            a,
            b,
            eps0,
            sup_theta_prime: 0.0,
            sup_theta_second: 0.0,
        };
        let (lo, hi) = (1.0 / a, 1.0 / b);
        const POINTS: usize = 20_001;
        for i in 0..POINTS {
            let t = lo + (hi - lo) * i as f64 / (POINTS - 1) as f64;
            let (_, d1, d2) = profile.eval(t);
            profile.sup_theta_prime = profile.sup_theta_prime.max(d1.abs());
            profile.sup_theta_second = profile.sup_theta_second.max(d2.abs());
        }
        Ok(profile)
    }

    /// `(θ, θ′, θ″)` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let (lo, hi) = (1.0 / self.a, 1.0 / self.b);
        let width = hi - lo;
        let (s, ds, dds) = smoothstep((t - lo) / width);
        (1.0 - s, -ds / width, -dds / (width * width))
    }

    /// The slope `AB/(A−B)` of the linear interpolant, a lower bound for
    /// `sup |θ′|` by the mean value theorem.
    pub fn mean_slope(&self) -> f64 {
        self.a * self.b / (self.a - self.b)
    }

    /// `M_θ′ = (sup|θ′| + ε₀)²` from the measured supremum.
    pub fn m_theta_prime(&self) -> f64 {
        (self.sup_theta_prime + self.eps0).powi(2)
    }

    /// `C_θ″ = (sup|θ″|)²` from the measured supremum.
    pub fn c_theta_second(&self) -> f64 {
        self.sup_theta_second.powi(2)
    }
}

/// `(θ, θ′, θ″)` of `profile` at `t`.
pub fn cutoff(profile: &CutoffProfile, t: f64) -> (f64, f64, f64) {
    profile.eval(t)
}

/// The root `a > e` of `2/(a log(a/e)) + 1/a = 1`, by bisection to below
/// `1e−12`.
pub fn normalisation_constant() -> f64 {
    let g = |a: f64| 2.0 / (a * (a.ln() - 1.0)) + 1.0 / a - 1.0;
    bisect(g, E * (1.0 + 1e-12), 100.0, 1e-13)
}

/// Left-hand side of the normalisation condition at `|ψ| = x/ℓ`:
/// `2/(|ψ| log(ℓ|ψ|/e)) + 1/|ψ|` for `σ = 1` and
/// `5/(|ψ| log(ℓ|ψ|/e_σ)) + σ/|ψ|` for `σ ≥ 2`.
pub fn normalisation_lhs(params: &AuxParams, psi_abs: f64) -> f64 {
    let sigma = params.sigma_f64();
    let m = (params.ell * psi_abs).ln() - 1.0 / sigma;
    if params.sigma == 1 {
        2.0 / (psi_abs * m) + 1.0 / psi_abs
    } else {
        5.0 / (psi_abs * m) + sigma / psi_abs
    }
}

/// Smallest `|ψ|` (beyond `e_σ/ℓ`) at which the normalisation condition
/// holds with budget `δ`; the condition is decreasing in `|ψ|`.
pub fn normalisation_threshold(params: &AuxParams) -> Result<f64> {
    params.validate()?;
    let lo = -params.psi_bound() * (1.0 + 1e-12);
    let g = |w: f64| normalisation_lhs(params, w) - params.delta;
    let mut hi = 2.0 * lo;
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    let root = bisect(g, lo, hi, 1e-13 * hi);
    // Step just past the root so the condition holds, not only to rounding.
    let mut w = root * (1.0 + 1e-12);
    while g(w) > 0.0 {
        w *= 1.0 + 1e-12;
    }
    Ok(w)
}

/// Outcome of [`normalize_psi`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub chart: SncChart,
    pub previous_shift: f64,
    pub shift: f64,
    /// Smallest admissible `|ψ|`.
    pub psi_abs_min: f64,
    /// `sup ψ` of the adjusted chart.
    pub sup_psi: f64,
    /// The normalisation condition evaluated at `sup ψ` (where `|ψ|` is
    /// smallest); at most `δ`.
    pub condition_at_sup: f64,
}

/// Lowers the `ψ` shift until `sup ψ ≤ −|ψ|_min`, which makes
/// `ψ < −e_σ/ℓ` and the normalisation condition hold on the whole polydisc.
/// A shift that is already low enough is kept.
pub fn normalize_psi(chart: &SncChart, params: &AuxParams) -> Result<Normalization> {
    let psi_abs_min = normalisation_threshold(params)?;
    let radial = chart.sup_psi() - chart.psi.shift;
    let required = -psi_abs_min - radial;
    let mut shift = chart.psi.shift.min(required);
    let mut adjusted = chart.with_psi_shift(shift);
    // Step down past rounding so that the condition holds exactly.
    while adjusted.sup_psi() > -psi_abs_min {
        shift -= f64::EPSILON * shift.abs().max(psi_abs_min);
        adjusted = chart.with_psi_shift(shift);
    }
    let sup_psi = adjusted.sup_psi();
    Ok(Normalization {
        previous_shift: chart.psi.shift,
        shift,
        psi_abs_min,
        sup_psi,
        condition_at_sup: normalisation_lhs(params, -sup_psi),
        chart: adjusted,
    })
}

/// `true` iff `sup ψ` of the chart already satisfies the normalisation.
pub fn is_normalized(chart: &SncChart, params: &AuxParams) -> Result<bool> {
    Ok(chart.sup_psi() <= -normalisation_threshold(params)?)
}

/// Worst slack of one inequality over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityMargin {
    pub name: &'static str,
    /// Grid points where the inequality was evaluated.
    pub points: usize,
    /// Smallest slack (`≥ 0` means satisfied); `+∞` when no point applies.
    pub min_slack: f64,
    /// ψ where the smallest slack occurs.
    pub witness_psi: Option<f64>,
    pub passed: bool,
}

/// All per-inequality margins of a budget check.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    pub params: AuxParams,
    pub rows: Vec<InequalityMargin>,
}

impl BudgetReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    /// The first violated inequality.
    pub fn first_failure(&self) -> Option<&InequalityMargin> {
        self.rows.iter().find(|r| !r.passed)
    }
}

struct Tracker {
    row: InequalityMargin,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Tracker {
            row: InequalityMargin {
                name,
                points: 0,
                min_slack: f64::INFINITY,
                witness_psi: None,
                passed: true,
            },
        }
    }

    fn push(&mut self, psi: f64, slack: f64) {
        self.row.points += 1;
        if slack < self.row.min_slack || slack.is_nan() {
            self.row.min_slack = slack;
            self.row.witness_psi = Some(psi);
        }
        if !(slack >= 0.0) {
            self.row.passed = false;
        }
    }
}

/// `points` values of ψ, log-spaced in `|ψ| ∈ [lo, hi]`, increasing in `|ψ|`.
pub fn log_psi_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            let s = if points == 1 {
                0.0
            } else {
                i as f64 / (points - 1) as f64
            };
            -(a + (b - a) * s).exp()
        })
        .collect()
}

/// Largest `|t| = |ψ|^σ` placed on a budget grid; beyond it powers such as
/// `|t|^{2+2ε}` leave the double range.
pub const MAX_GRID_T: f64 = 1e150;

/// A budget grid: `points` log-spaced values from `|ψ|_min` to beyond the
/// support of `θ′_ε`, merged with `points` values filling that support
/// `B ≤ |ψ|^{σε} ≤ A`.  Everything is clipped to `|ψ|^σ ≤` [`MAX_GRID_T`].
pub fn budget_grid(params: &AuxParams, psi_abs_min: f64, points: usize) -> Vec<f64> {
    let sigma = params.sigma_f64();
    let se = sigma * params.eps;
    let w_max = MAX_GRID_T.powf(1.0 / sigma);
    let clip = |w: f64| w.max(psi_abs_min).min(w_max);
    let lo_support = clip(params.cut_b.powf(1.0 / se));
    let hi_support = clip(params.cut_a.powf(1.0 / se));
    let hi = clip((10.0 * hi_support).max(1e6).max(10.0 * psi_abs_min));
    let mut grid = log_psi_grid(psi_abs_min, hi, points);
    grid.extend(log_psi_grid(lo_support, hi_support, points));
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    grid
}

/// Checks the curvature budget pointwise on a ψ grid:
///
/// 1. `0 ≤ σ(1−ε)/|ψ| + 2/(|ψ| M) ≤ δ` (the derivative of `ν̃ − log η̃` along ψ);
/// 2. for `σ ≥ 2`, the extra `μ̃` coefficient: the same plus `3/(|ψ| N)` is `≤ δ`;
/// 3. `λ̃_ε > 0`;
/// 4. `(η̃ + λ̃) e^ν̃ ≤ |t|^{1−ε} ((log ℓ^σ|t|)² + 1)`;
/// 5. `μ̃′ ≤ (σ+1)/|ψ|` where `B ≤ |ψ|^{σε} ≤ A` (support of `θ′_ε`);
/// 6. `Λ ≤ 2σ(σ−1) η_ε/|ψ|²` on the same sub-grid;
/// 7. `Γ ≥ 0`;
/// 8. `ε² e^{−ν̃}/(|t|^{2+2ε} Γ) = ε/((1−ε)|t|^{1+ε})` to relative `1e−10`,
///    with `Γ` from its defining combination.
///
/// Slacks are relative where a natural scale exists.  A violated inequality
/// makes the report fail with the witness ψ.
pub fn budget_check(params: &AuxParams, psi_grid: &[f64]) -> Result<BudgetReport> {
    let aux = build_aux(*params)?;
    let sigma = params.sigma_f64();
    let eps = params.eps;
    let se = sigma * eps;
    let mut i_low = Tracker::new("(i) nu' - (log eta)' >= 0");
    let mut i_high = Tracker::new("(i) nu' - (log eta)' <= delta");
    let mut i_mu = Tracker::new("(i') mu coefficient <= delta");
    let mut ii = Tracker::new("(ii) lambda > 0");
    let mut iii = Tracker::new("(iii) (eta + lambda) e^nu bound");
    let mut iv = Tracker::new("(iv) mu' <= (sigma+1)/|psi|");
    let mut v = Tracker::new("(v) Lambda <= 2 sigma (sigma-1) eta/|psi|^2");
    let mut gamma_pos = Tracker::new("Gamma >= 0");
    let mut gamma_eq = Tracker::new("Gamma equality line");
    for &psi in psi_grid {
        let (w, m, n) = aux.dom_psi(psi)?;
        let t = -w.powf(sigma);
        let (u, l) = aux.dom(t)?;
        let coeff = sigma * (1.0 - eps) / w + 2.0 / (w * m);
        i_low.push(psi, coeff);
        i_high.push(psi, params.delta - coeff);
        if params.sigma >= 2 {
            i_mu.push(psi, params.delta - (coeff + 3.0 / (w * n)));
        }
        let eta = aux.eta(t)?.value;
        let lambda = aux.lambda(t)?.value;
        ii.push(psi, lambda / eta);
        let lhs = (eta + lambda) / l;
        let log_full = (params.ell.powi(params.sigma as i32) * u).ln();
        let rhs = u.powf(1.0 - eps) * (log_full * log_full + 1.0);
        iii.push(psi, 1.0 - lhs / rhs);
        let on_support = {
            let x = w.powf(se);
            x >= params.cut_b && x <= params.cut_a
        };
        if on_support {
            let mu1 = aux.mu(psi)?.d1;
            iv.push(psi, 1.0 - mu1 * w / (sigma + 1.0));
            let big_lambda = aux.big_lambda(psi)?.value;
            let bound = 2.0 * sigma * (sigma - 1.0) * aux.eta_psi(psi)? / (w * w);
            let slack = if bound > 0.0 {
                1.0 - big_lambda / bound
            } else {
                bound - big_lambda
            };
            v.push(psi, slack);
        }
        let gamma = aux.gamma_defining(t)?;
        gamma_pos.push(psi, gamma);
        // lhs/rhs of the equality line, simplified to avoid overflowing
        // |t|^{2+2ε}.
        let ratio = eps * (1.0 - eps) * l / (u.powf(1.0 + eps) * gamma);
        gamma_eq.push(psi, 1e-10 - (ratio - 1.0).abs());
    }
    let mut rows = vec![i_low.row, i_high.row];
    if params.sigma >= 2 {
        rows.push(i_mu.row);
    }
    rows.extend([ii.row, iii.row, iv.row, v.row, gamma_pos.row, gamma_eq.row]);
    Ok(BudgetReport {
        params: *params,
        rows,
    })
}

/// Result of [`xlogx_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XlogxReport {
    /// `max x^ε |log x|^s · e^s ε^s / s^s` over the grid.
    pub worst_ratio: f64,
    /// The grid point `−log x` attaining it.
    pub argmax_neg_log_x: f64,
    /// The predicted maximiser `−log x = s/ε`.
    pub predicted_neg_log_x: f64,
    /// The ratio at the predicted maximiser (1 up to rounding).
    pub ratio_at_prediction: f64,
}

/// Ratio `x^ε |log x|^s e^s ε^s / s^s` at `x = e^{−y}`, in log scale
/// (`0⁰ = 1`).
pub fn xlogx_ratio(y: f64, eps: f64, s: f64) -> f64 {
    let slog = |v: f64| if s == 0.0 { 0.0 } else { s * v.ln() };
    (-eps * y + slog(y) + s + slog(eps) - slog(s)).exp()
}

/// Checks `x^ε |log x|^s ≤ s^s/(e^s ε^s)` on a grid given as values
/// `y = −log x > 0` (a log grid in `x`, stored without underflow).
pub fn xlogx_bound_check(neg_log_x_grid: &[f64], eps: f64, s: f64) -> Result<XlogxReport> {
    if !(eps > 0.0) {
        return Err(Error::Parameter {
            name: "eps",
            reason: format!("must be positive, got {eps}"),
        });
    }
    if !(s >= 0.0) {
        return Err(Error::Parameter {
            name: "s",
            reason: format!("must be non-negative, got {s}"),
        });
    }
    let mut worst = f64::NEG_INFINITY;
    let mut argmax = f64::NAN;
    for &y in neg_log_x_grid {
        let r = xlogx_ratio(y, eps, s);
        if r > worst {
            worst = r;
            argmax = y;
        }
    }
    let predicted = s / eps;
    Ok(XlogxReport {
        worst_ratio: worst,
        argmax_neg_log_x: argmax,
        predicted_neg_log_x: predicted,
        ratio_at_prediction: if s == 0.0 {
            1.0
        } else {
            xlogx_ratio(predicted, eps, s)
        },
    })
}

/// A log grid of `points` values `y = −log x` covering `[1e−8, y_max]`
/// together with the predicted maximiser `s/ε`.
pub fn xlogx_grid(eps: f64, s: f64, points: usize, y_max: f64) -> Vec<f64> {
    let (a, b) = (1e-8f64.ln(), y_max.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points.max(2) - 1) as f64).exp())
        .collect();
    if s > 0.0 && s / eps <= y_max {
        grid.push(s / eps);
    }
    grid.sort_by(f64::total_cmp);
    grid
}
