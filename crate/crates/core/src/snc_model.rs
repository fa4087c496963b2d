//! Chart data for a single polydisc with simple-normal-crossing weights.
//!
//! A chart is the polydisc `{|z_j| < R_j}` with two diagonal weights, the
//! line-bundle potential `φ_L` and the singular weight `ψ`, plus the pair of
//! m-values `m0 < m1` that bracket the jumping number under study.  Weight
//! coefficients and m-values are exact rationals so that all integrability
//! thresholds are decided exactly.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::quadrature::smoothstep;
use crate::{q_to_f64, Error, Result, Q};

/// A diagonal weight `w(z) = Σ_j c_j log|z_j|² + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalWeight {
    /// Exponents `c_j` of `log|z_j|²`.
    pub coeffs: Vec<Q>,
    /// Additive constant, natural-log units.
    pub shift: f64,
}

impl DiagonalWeight {
    pub fn new(coeffs: Vec<Q>, shift: f64) -> Self {
        DiagonalWeight { coeffs, shift }
    }

    /// The zero weight on `n` coordinates.
    pub fn zero(n: usize) -> Self {
        DiagonalWeight {
            coeffs: vec![Q::zero(); n],
            shift: 0.0,
        }
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `self + m·other`, exact in the coefficients.
    ///
    /// # Panics
    /// Panics when the dimensions differ.
    pub fn plus_multiple(&self, m: Q, other: &DiagonalWeight) -> DiagonalWeight {
        assert_eq!(self.dim(), other.dim(), "weight dimensions differ");
        DiagonalWeight {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + m * b)
                .collect(),
            shift: self.shift + q_to_f64(m) * other.shift,
        }
    }
}

/// Evaluates `Σ c_j log(point_j) + shift` where `point_j = |z_j|²`.
///
/// A zero modulus contributes `−∞` for a positive coefficient, `+∞` for a
/// negative one and nothing for a zero coefficient; the function never
/// panics on such points.  If both signs meet a zero modulus the result is
/// NaN, which is the honest value of `∞ − ∞`.
///
/// # Panics
/// Panics when `point` and the weight differ in length.
pub fn eval_weight(w: &DiagonalWeight, point: &[f64]) -> f64 {
    assert_eq!(point.len(), w.dim(), "point dimension differs from weight");
    let mut total = w.shift;
    for (&c, &p) in w.coeffs.iter().zip(point) {
        if c.is_zero() {
            continue;
        }
        let c = q_to_f64(c);
        total += if p == 0.0 {
            -c.signum() * f64::INFINITY
        } else {
            c * p.ln()
        };
    }
    total
}

/// One polydisc chart: radii, the weights `φ_L` and `ψ`, and `m0 < m1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SncChart {
    pub n: usize,
    /// Polydisc radii `R_j ∈ (0, 1)`.
    pub radii: Vec<f64>,
    /// Line-bundle potential `φ_L = Σ ℓ_j log|z_j|² + β`.
    pub phi_l: DiagonalWeight,
    /// Singular weight `ψ = Σ ν_j log|z_j|² + α`.
    pub psi: DiagonalWeight,
    pub m0: Q,
    pub m1: Q,
}

impl SncChart {
    /// The weight `φ_L + m ψ`.
    pub fn weight_at(&self, m: Q) -> DiagonalWeight {
        self.phi_l.plus_multiple(m, &self.psi)
    }

    /// Coefficients `c_j(m) = ℓ_j + m ν_j` of `φ_L + m ψ`.
    pub fn coeffs_at(&self, m: Q) -> Vec<Q> {
        self.weight_at(m).coeffs
    }

    /// `sup ψ` over the polydisc, attained on the distinguished boundary
    /// because every coefficient is non-negative.
    pub fn sup_psi(&self) -> f64 {
        let point: Vec<f64> = self.radii.iter().map(|r| r * r).collect();
        eval_weight(&self.psi, &point)
    }

    /// Copy of the chart with a different `ψ` shift.
    pub fn with_psi_shift(&self, shift: f64) -> SncChart {
        let mut chart = self.clone();
        chart.psi.shift = shift;
        chart
    }
}

/// A violated chart or section invariant.  Coordinates are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZeroDimension,
    LengthMismatch {
        field: &'static str,
        len: usize,
        n: usize,
    },
    RadiusOutOfRange {
        coord: usize,
        radius: f64,
    },
    NegativePsiCoefficient {
        coord: usize,
        coeff: Q,
    },
    PositivePsiShift {
        shift: f64,
    },
    NonFiniteShift {
        field: &'static str,
    },
    MValuesOutOfOrder {
        m0: Q,
        m1: Q,
    },
    SupportRadiusOutOfRange {
        section: usize,
        coord: usize,
        support: f64,
        radius: f64,
    },
    NonPositiveAmplitude {
        section: usize,
        amplitude: f64,
    },
    SectionLengthMismatch {
        section: usize,
        len: usize,
        n: usize,
    },
    DuplicateExponents {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "chart dimension must be at least 1"),
            Violation::LengthMismatch { field, len, n } => {
                write!(
                    f,
                    "{field} has {len} entries but the chart dimension is {n}"
                )
            }
            Violation::RadiusOutOfRange { coord, radius } => {
                write!(f, "radius {radius} of coordinate {coord} is not in (0, 1)")
            }
            Violation::NegativePsiCoefficient { coord, coeff } => {
                write!(f, "ψ coefficient negative: ν_{coord} = {coeff}")
            }
            Violation::PositivePsiShift { shift } => {
                write!(f, "sup ψ ≤ 0 fails: ψ shift {shift} is positive")
            }
            Violation::NonFiniteShift { field } => write!(f, "{field} shift is not finite"),
            Violation::MValuesOutOfOrder { m0, m1 } => {
                write!(
                    f,
                    "m-values must satisfy 0 ≤ m0 < m1, got m0 = {m0}, m1 = {m1}"
                )
            }
            Violation::SupportRadiusOutOfRange {
                section,
                coord,
                support,
                radius,
            } => write!(
                f,
                "section {section}: support radius {support} of coordinate {coord} \
                 is not in (0, {radius}]"
            ),
            Violation::NonPositiveAmplitude { section, amplitude } => {
                write!(
                    f,
                    "section {section}: amplitude {amplitude} is not positive"
                )
            }
            Violation::SectionLengthMismatch { section, len, n } => write!(
                f,
                "section {section} has {len} exponents/support radii but the chart dimension is {n}"
            ),
            Violation::DuplicateExponents { first, second } => {
                write!(f, "sections {first} and {second} share an exponent vector")
            }
        }
    }
}

/// Reports every violated chart invariant; an empty list means valid.
pub fn validate_chart(chart: &SncChart) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = chart.n;
    if n == 0 {
        out.push(Violation::ZeroDimension);
    }
    for (field, len) in [
        ("radii", chart.radii.len()),
        ("phiL.coeffs", chart.phi_l.dim()),
        ("psi.coeffs", chart.psi.dim()),
    ] {
        if len != n {
            out.push(Violation::LengthMismatch { field, len, n });
        }
    }
    for (coord, &radius) in chart.radii.iter().enumerate() {
        if !(radius > 0.0 && radius < 1.0) {
            out.push(Violation::RadiusOutOfRange { coord, radius });
        }
    }
    for (coord, &coeff) in chart.psi.coeffs.iter().enumerate() {
        if coeff.is_negative() {
            out.push(Violation::NegativePsiCoefficient { coord, coeff });
        }
    }
    if !chart.psi.shift.is_finite() {
        out.push(Violation::NonFiniteShift { field: "psi" });
    } else if chart.psi.shift > 0.0 {
        out.push(Violation::PositivePsiShift {
            shift: chart.psi.shift,
        });
    }
    if !chart.phi_l.shift.is_finite() {
        out.push(Violation::NonFiniteShift { field: "phiL" });
    }
    if chart.m0.is_negative() || chart.m0 >= chart.m1 {
        out.push(Violation::MValuesOutOfOrder {
            m0: chart.m0,
            m1: chart.m1,
        });
    }
    out
}

/// Reports every violated invariant of the sections against the chart.
pub fn validate_sections(chart: &SncChart, sections: &MultiMonomialSection) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, s) in sections.terms.iter().enumerate() {
        if s.exponents.len() != chart.n || s.support_radius.len() != chart.n {
            out.push(Violation::SectionLengthMismatch {
                section: i,
                len: s.exponents.len().min(s.support_radius.len()),
                n: chart.n,
            });
            continue;
        }
        if !(s.amplitude > 0.0 && s.amplitude.is_finite()) {
            out.push(Violation::NonPositiveAmplitude {
                section: i,
                amplitude: s.amplitude,
            });
        }
        for (coord, (&support, &radius)) in s.support_radius.iter().zip(&chart.radii).enumerate() {
            if !(support > 0.0 && support <= radius) {
                out.push(Violation::SupportRadiusOutOfRange {
                    section: i,
                    coord,
                    support,
                    radius,
                });
            }
        }
    }
    for (i, a) in sections.terms.iter().enumerate() {
        for (j, b) in sections.terms.iter().enumerate().skip(i + 1) {
            if a.exponents == b.exponents {
                out.push(Violation::DuplicateExponents {
                    first: i,
                    second: j,
                });
            }
        }
    }
    out
}

/// The section `amplitude · z^a · χ(z)`, where `χ = ∏ χ_j(|z_j|)` is a
/// radial bump: `χ_j ≡ 1` for `|z_j| ≤ ρ_j/2`, `χ_j ≡ 0` for `|z_j| ≥ ρ_j`,
/// with a quintic smoothstep in between.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialSection {
    /// The exponent vector `a`.
    pub exponents: Vec<u32>,
    pub amplitude: f64,
    /// Bump support radii `ρ_j ≤ R_j`.
    pub support_radius: Vec<f64>,
}

impl MonomialSection {
    pub fn new(exponents: Vec<u32>, amplitude: f64, support_radius: Vec<f64>) -> Self {
        MonomialSection {
            exponents,
            amplitude,
            support_radius,
        }
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Membership in `𝓘(w)`: `a_j > c_j − 1` for every `j` (exact).
    pub fn in_ideal(&self, w: &DiagonalWeight) -> bool {
        self.first_non_integrable(w).is_none()
    }

    /// The first coordinate where `a_j > c_j − 1` fails, if any.
    pub fn first_non_integrable(&self, w: &DiagonalWeight) -> Option<usize> {
        self.exponents
            .iter()
            .zip(&w.coeffs)
            .position(|(&a, &c)| Q::from_integer(i64::from(a)) <= c - Q::from_integer(1))
    }

    /// Membership in `𝓘(φ_L + m ψ)`.
    pub fn in_multiplier(&self, chart: &SncChart, m: Q) -> bool {
        self.in_ideal(&chart.weight_at(m))
    }

    /// The radial cutoff `χ_j(r)` and its derivative in `r`.
    pub fn cutoff(&self, coord: usize, r: f64) -> (f64, f64) {
        let rho = self.support_radius[coord];
        let half = 0.5 * rho;
        let (s, ds, _) = smoothstep((r - half) / half);
        (1.0 - s, -ds / half)
    }

    /// `|f|²` at the point with moduli `r`.
    pub fn modulus_squared(&self, r: &[f64]) -> f64 {
        let mut v = self.amplitude * self.amplitude;
        for (j, (&a, &rj)) in self.exponents.iter().zip(r).enumerate() {
            let chi = self.cutoff(j, rj).0;
            v *= rj.powi(2 * a as i32) * chi * chi;
        }
        v
    }

    /// The same section with exponent `a_j` raised by one (multiplied by `z_j`).
    pub fn times_coordinate(&self, coord: usize) -> MonomialSection {
        let mut s = self.clone();
        s.exponents[coord] += 1;
        s
    }

    /// The same section with amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> MonomialSection {
        let mut s = self.clone();
        s.amplitude *= factor;
        s
    }
}

/// A finite sum of monomial sections with pairwise distinct exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiMonomialSection {
    pub terms: Vec<MonomialSection>,
}

impl MultiMonomialSection {
    /// Builds the sum, rejecting repeated exponent vectors.
    pub fn new(terms: Vec<MonomialSection>) -> Result<Self> {
        for (i, a) in terms.iter().enumerate() {
            if let Some(j) = terms[i + 1..]
                .iter()
                .position(|b| b.exponents == a.exponents)
            {
                return Err(Error::Precondition(format!(
                    "terms {i} and {} share the exponent vector {:?}",
                    i + 1 + j,
                    a.exponents
                )));
            }
        }
        Ok(MultiMonomialSection { terms })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> MultiMonomialSection {
        MultiMonomialSection {
            terms: self.terms.iter().map(|t| t.scaled(factor)).collect(),
        }
    }
}

impl From<MonomialSection> for MultiMonomialSection {
    fn from(s: MonomialSection) -> Self {
        MultiMonomialSection { terms: vec![s] }
    }
}

/// Anything that is a sum of monomial terms.
pub trait Terms {
    fn terms(&self) -> &[MonomialSection];
}

impl Terms for MonomialSection {
    fn terms(&self) -> &[MonomialSection] {
        std::slice::from_ref(self)
    }
}

impl Terms for MultiMonomialSection {
    fn terms(&self) -> &[MonomialSection] {
        &self.terms
    }
}
