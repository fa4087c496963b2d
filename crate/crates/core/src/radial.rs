//! Tensor-product integration of radial profiles against one monomial term.
//!
//! Every integral in the [`crate::lcv`] and [`crate::estimates`] modules has
//! the shape
//!
//! ```text
//!   ∫_polydisc |f|² e^{−φ_L − m1 ψ} · H(|ψ|) ω^n/n!
//! ```
//!
//! for a monomial term `f = A z^a χ` and a radial profile `H`.  The angular
//! integrals are `2π` each.  A coordinate with `ν_j > 0` is integrated in
//! `x_j = −ν_j log r_j²`, where its factor becomes
//! `(2π/ν_j) e^{−κ_j x_j} χ_j²` with `κ_j = d_j/ν_j` and defect
//! `d_j = a_j + 1 − c_j(m1)`.  Since `|ψ| = Σ x_j + |α|`, the integrand depends on
//! these coordinates only through the sum `s = Σ x_j + |α|`.
//!
//! * Zero-defect coordinates (`κ_j = 0`) are split into the cutoff transition
//!   (Gauss–Legendre) and the tail `χ_j ≡ 1`.  Tails are never discretised:
//!   for each subset `T` of coordinates in their tail the `|T|`-fold integral
//!   `∫_{ℝ₊^T} H(Σ y + C) dy` is the profile's orthant integral, evaluated
//!   analytically where possible.
//! * Positive-defect coordinates get a composite rule on the whole half line,
//!   truncated where `e^{−κ x}` drops below `1e−17`.
//! * Coordinates with `ν_j = 0` factor out as
//!   `2π ∫_0^ρ 2 r^{2d−1} χ² dr`.
//!
//! The outermost tensor axis is distributed over rayon workers; partial sums
//! are collected in node order and reduced pairwise, so results do not
//! depend on the number of threads.

use std::f64::consts::PI;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::multiplier::defects;
use crate::quadrature::{pairwise_sum, Rule};
use crate::snc_model::{MonomialSection, SncChart};
use crate::{q_to_f64, Error, Result};

/// A radial profile `H(s) = s^{−q} g(ln s)` on `s > 0`.
pub(crate) trait RadialProfile: Sync {
    /// The power `q`.
    fn power(&self) -> f64;
    /// The modulation `g(ln s)`.
    fn modulation(&self, ln_s: f64) -> f64;
    /// Whether `∫_{ℝ₊^k} H(Σ y + C) dy` is finite.
    fn orthant_converges(&self, k: usize) -> bool;
    /// `∫_{ℝ₊^k} H(Σ y + C) dy`; `k = 0` is `H(C)`.
    fn orthant(&self, k: usize, c: f64) -> f64;

    fn eval(&self, s: f64) -> f64 {
        s.powf(-self.power()) * self.modulation(s.ln())
    }
}

/// `H(s) = s^{−p}`, with the closed-form orthant integral
/// `C^{k−p} / ∏_{i=1}^{k} (p − i)` for `p > k`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerProfile {
    pub p: f64,
}

impl RadialProfile for PowerProfile {
    fn power(&self) -> f64 {
        self.p
    }

    fn modulation(&self, _ln_s: f64) -> f64 {
        1.0
    }

    fn orthant_converges(&self, k: usize) -> bool {
        self.p > k as f64
    }

    fn orthant(&self, k: usize, c: f64) -> f64 {
        if !self.orthant_converges(k) {
            return f64::INFINITY;
        }
        let denom: f64 = (1..=k).map(|i| self.p - i as f64).product();
        c.powf(k as f64 - self.p) / denom
    }
}

/// `H(s) = 1 / (s^σ ((σ log(ℓ s))² + 1))`, the weight of the extension
/// estimate; its orthant integrals are finite exactly for `k ≤ σ`.
#[derive(Debug, Clone)]
pub(crate) struct LogDampedProfile {
    pub sigma: usize,
    pub ell: f64,
    rule: Rule,
}

impl LogDampedProfile {
    pub fn new(sigma: usize, ell: f64) -> Self {
        LogDampedProfile {
            sigma,
            ell,
            rule: orthant_rule(),
        }
    }
}

impl RadialProfile for LogDampedProfile {
    fn power(&self) -> f64 {
        self.sigma as f64
    }

    fn modulation(&self, ln_s: f64) -> f64 {
        let y = self.sigma as f64 * (self.ell.ln() + ln_s);
        1.0 / (y * y + 1.0)
    }

    fn orthant_converges(&self, k: usize) -> bool {
        k <= self.sigma
    }

    fn orthant(&self, k: usize, c: f64) -> f64 {
        if !self.orthant_converges(k) {
            return f64::INFINITY;
        }
        numeric_orthant(self, &self.rule, k, c)
    }
}

/// Rule on `w ∈ [0, 1]` for the numeric orthant integral.
pub(crate) fn orthant_rule() -> Rule {
    let breaks: Vec<f64> = (0..=16).map(|i| f64::from(i) / 16.0).collect();
    Rule::composite(24, &breaks)
}

/// `(1/(k−1)!) ∫_0^∞ u^{k−1} H(u + C) du` through `u = C(e^v − 1)`,
/// `v = w/(1 − w)`, which turns the power-law tail into a bounded integrand
/// on `[0, 1)`; all factors are formed in logarithmic scale so that large
/// `v` cannot overflow.
pub(crate) fn numeric_orthant(profile: &dyn RadialProfile, rule: &Rule, k: usize, c: f64) -> f64 {
    if k == 0 {
        return profile.eval(c);
    }
    let q = profile.power();
    let kf = k as f64;
    let ln_c = c.ln();
    let factorial: f64 = (1..k).map(|i| i as f64).product();
    let v = rule.integrate(|w| {
        if w >= 1.0 {
            return 0.0;
        }
        let v = w / (1.0 - w);
        let jac = 1.0 / ((1.0 - w) * (1.0 - w));
        let mut ln_mass = (kf - q) * (ln_c + v);
        if k > 1 {
            ln_mass += (kf - 1.0) * (-(-v).exp_m1()).ln();
        }
        ln_mass.exp() * profile.modulation(ln_c + v) * jac
    });
    v / factorial
}

/// A zero-defect coordinate: transition rule plus constant tail density.
#[derive(Debug, Clone)]
struct TailAxis {
    transition: Rule,
    tail_density: f64,
    x_half: f64,
}

/// One monomial term prepared for integration against radial profiles.
#[derive(Debug, Clone)]
pub(crate) struct TermIntegrand {
    /// `A² e^{−β − m1 α} ∏_{ν_k = 0} I_k`.
    constant: f64,
    tails: Vec<TailAxis>,
    full: Vec<Rule>,
    /// `|α|`.
    offset: f64,
    divergence: Option<String>,
}

/// `2π ∫_0^ρ 2 r^{2d−1} χ(r)² dr` for `d > 0` with the quintic cutoff of
/// support `ρ`: exact on `[0, ρ/2]`, Gauss–Legendre on the transition.
pub(crate) fn cutoff_moment(f: &MonomialSection, coord: usize, d: f64, nodes: usize) -> f64 {
    let rho = f.support_radius[coord];
    let inner = (0.5 * rho).powf(2.0 * d) / d;
    let transition = Rule::gauss_legendre(nodes, 0.5 * rho, rho).integrate(|r| {
        let chi = f.cutoff(coord, r).0;
        2.0 * r.powf(2.0 * d - 1.0) * chi * chi
    });
    2.0 * PI * (inner + transition)
}

fn x_of(nu: f64, r: f64) -> f64 {
    -nu * (r * r).ln()
}

fn r_of(nu: f64, x: f64) -> f64 {
    (-x / (2.0 * nu)).exp()
}

/// Composite rule on `[x_h, ∞)` for `e^{−κ x}` times a slowly varying
/// power-law factor whose argument is at least `s_min` there.
fn decay_tail_rule(nodes: usize, x_half: f64, kappa: f64, s_min: f64) -> Rule {
    let scale = 4.0 / kappa;
    let end = x_half + 40.0 / kappa;
    let mut breaks = vec![x_half];
    let mut width = scale.min((0.5 * s_min).max(1e-3));
    let mut x = x_half;
    while x < end {
        x = (x + width).min(end);
        breaks.push(x);
        width = (2.0 * width).min(scale);
    }
    Rule::composite(nodes, &breaks)
}

impl TermIntegrand {
    /// Prepares `f` on `chart` with `nodes` Gauss points per panel.
    pub fn new(chart: &SncChart, f: &MonomialSection, nodes: usize) -> Self {
        let offset = -chart.psi.shift;
        let m1 = q_to_f64(chart.m1);
        let mut constant =
            f.amplitude * f.amplitude * (-chart.phi_l.shift - m1 * chart.psi.shift).exp();
        let mut tails = Vec::new();
        let mut full = Vec::new();
        let mut divergence = None;
        let d = defects(chart, f);
        for (j, &dj) in d.iter().enumerate() {
            let nu_q = chart.psi.coeffs[j];
            let rho = f.support_radius[j];
            if nu_q.is_zero() {
                if !dj.is_positive() {
                    divergence
                        .get_or_insert(format!("coordinate {j} has ν = 0 and defect {} ≤ 0", dj));
                    continue;
                }
                constant *= cutoff_moment(f, j, q_to_f64(dj), nodes);
                continue;
            }
            let nu = q_to_f64(nu_q);
            let x_rho = x_of(nu, rho);
            let x_half = x_of(nu, 0.5 * rho);
            let density = 2.0 * PI / nu;
            if dj.is_negative() {
                divergence.get_or_insert(format!(
                    "coordinate {j} has negative defect {}: the integrand is not integrable at z_{j} = 0",
                    dj
                ));
                continue;
            }
            let kappa = q_to_f64(dj) / nu;
            let cut = move |x: f64| {
                let chi = f.cutoff(j, r_of(nu, x)).0;
                chi * chi
            };
            let transition_nodes = Rule::gauss_legendre(nodes, x_rho, x_half);
            if dj.is_zero() {
                let transition = transition_nodes.with_density(|x| density * cut(x));
                tails.push(TailAxis {
                    transition,
                    tail_density: density,
                    x_half,
                });
            } else {
                let mut rule =
                    transition_nodes.with_density(|x| density * (-kappa * x).exp() * cut(x));
                let tail = decay_tail_rule(nodes, x_half, kappa, x_half + offset)
                    .with_density(|x| density * (-kappa * x).exp());
                rule.append(tail);
                full.push(rule);
            }
        }
        TermIntegrand {
            constant,
            tails,
            full,
            offset,
            divergence,
        }
    }

    /// The integral against `profile`; `+∞` when it diverges.
    pub fn integrate(&self, profile: &dyn RadialProfile) -> f64 {
        if self.divergence.is_some() || !profile.orthant_converges(self.tails.len()) {
            return f64::INFINITY;
        }
        let m = self.tails.len();
        let mut parts = Vec::with_capacity(1 << m);
        for mask in 0u32..(1 << m) {
            let mut k = 0;
            let mut c = self.offset;
            let mut weight = 1.0;
            let mut active: Vec<&Rule> = Vec::with_capacity(m + self.full.len());
            for (i, axis) in self.tails.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    k += 1;
                    c += axis.x_half;
                    weight *= axis.tail_density;
                } else {
                    active.push(&axis.transition);
                }
            }
            active.extend(self.full.iter());
            parts.push(weight * tensor_sum(&active, c, &|s| profile.orthant(k, s)));
        }
        self.constant * pairwise_sum(&parts)
    }

    /// The constant prefactor and the rules of the positive-defect axes,
    /// for alternative integration routes.
    pub fn parts(&self) -> (f64, &[Rule], f64, Option<&str>) {
        (
            self.constant,
            &self.full,
            self.offset,
            self.divergence.as_deref(),
        )
    }
}

/// `Σ_{nodes} ∏ w_i · h(c + Σ x_i)` over the tensor grid of `rules`.
pub(crate) fn tensor_sum(rules: &[&Rule], c: f64, h: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    match rules.split_first() {
        None => h(c),
        Some((outer, rest)) => {
            let partials: Vec<f64> = outer
                .nodes
                .par_iter()
                .zip(outer.weights.par_iter())
                .map(|(&x, &w)| w * nested_sum(rest, c + x, h))
                .collect();
            pairwise_sum(&partials)
        }
    }
}

fn nested_sum(rules: &[&Rule], c: f64, h: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
    match rules.split_first() {
        None => h(c),
        Some((outer, rest)) => outer
            .nodes
            .iter()
            .zip(&outer.weights)
            .map(|(&x, &w)| w * nested_sum(rest, c + x, h))
            .sum(),
    }
}

/// Runs `eval(n)` for `n = nodes, 2·nodes, …` until two successive values
/// agree to `rel_tol`; returns the finer value and the last difference.
pub(crate) fn refine(
    eval: impl Fn(usize) -> f64,
    nodes: usize,
    max_nodes: usize,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let mut n = nodes.max(2);
    let mut previous = eval(n);
    if previous.is_infinite() {
        return Ok((previous, 0.0));
    }
    loop {
        let next_n = 2 * n;
        if next_n > max_nodes.max(2 * nodes) {
            return Err(Error::NonConvergence {
                nodes: n,
                previous,
                last: eval(n),
            });
        }
        let last = eval(next_n);
        let diff = (last - previous).abs();
        if diff <= rel_tol * last.abs() || diff <= f64::MIN_POSITIVE {
            return Ok((last, diff));
        }
        if 2 * next_n > max_nodes {
            return Err(Error::NonConvergence {
                nodes: next_n,
                previous,
                last,
            });
        }
        n = next_n;
        previous = last;
    }
}
