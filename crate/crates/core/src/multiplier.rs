//! Exact combinatorics of multiplier ideals on diagonal weights.
//!
//! For `w = Σ c_j log|z_j|²` a monomial `z^a` is square-integrable against
//! `e^{−w}` near the origin iff `a_j > c_j − 1` for every `j`, so
//! `𝓘(w)` is the principal monomial ideal generated by `z^e` with
//! `e_j = min{a ∈ ℤ≥0 : a > c_j − 1} = max(0, ⌊c_j⌋)`.  Along the family
//! `φ_L + m ψ` the generator changes exactly when some `c_j(m) = ℓ_j + m ν_j`
//! with `ν_j > 0` crosses an integer `k ≥ 1`.

use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::snc_model::{DiagonalWeight, MonomialSection, SncChart};
use crate::{Error, Result, Q};

/// A monomial ideal given by its minimal generators (an antichain of
/// exponent vectors under the componentwise order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    n: usize,
    generators: Vec<Vec<u32>>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl MonomialIdeal {
    /// Builds the ideal generated by `gens`, discarding non-minimal
    /// generators and duplicates.  Generators are stored sorted.
    ///
    /// # Panics
    /// Panics when a generator does not have length `n`.
    pub fn from_generators(n: usize, gens: Vec<Vec<u32>>) -> Self {
        assert!(
            gens.iter().all(|g| g.len() == n),
            "generator length differs from n"
        );
        let mut gens: Vec<Vec<u32>> = gens.into_iter().sorted().dedup().collect();
        let mut minimal: Vec<Vec<u32>> = Vec::with_capacity(gens.len());
        // Sorting by total degree guarantees a divisor is seen before any of
        // its multiples.
        gens.sort_by_key(|g| (g.iter().map(|&x| u64::from(x)).sum::<u64>(), g.clone()));
        for g in gens {
            if !minimal.iter().any(|m| divides(m, &g)) {
                minimal.push(g);
            }
        }
        minimal.sort();
        MonomialIdeal {
            n,
            generators: minimal,
        }
    }

    /// The unit ideal (the whole ring).
    pub fn unit(n: usize) -> Self {
        MonomialIdeal {
            n,
            generators: vec![vec![0; n]],
        }
    }

    /// The principal ideal `(z^e)`.
    pub fn principal(e: Vec<u32>) -> Self {
        MonomialIdeal {
            n: e.len(),
            generators: vec![e],
        }
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Minimal generators, sorted lexicographically.
    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    /// The generator if the ideal is principal.
    pub fn principal_generator(&self) -> Option<&[u32]> {
        match self.generators.as_slice() {
            [g] => Some(g),
            _ => None,
        }
    }

    /// `true` for the whole ring.
    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.iter().all(|&x| x == 0))
    }

    /// Membership of the monomial `z^a`.
    pub fn contains(&self, a: &[u32]) -> bool {
        self.generators.iter().any(|g| divides(g, a))
    }

    /// Inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &MonomialIdeal) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Intersection, generated by pairwise least common multiples.
    pub fn intersection(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let gens = self
            .generators
            .iter()
            .cartesian_product(&other.generators)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x.max(y)).collect())
            .collect();
        MonomialIdeal::from_generators(self.n, gens)
    }

    /// Colon ideal `(self : other) = {g : g·other ⊆ self}`; for an inclusion
    /// `self ⊆ other` this is the annihilator of `other/self`.
    pub fn quotient(&self, other: &MonomialIdeal) -> MonomialIdeal {
        other
            .generators
            .iter()
            .map(|g| {
                let gens = self
                    .generators
                    .iter()
                    .map(|h| h.iter().zip(g).map(|(x, y)| x.saturating_sub(*y)).collect())
                    .collect();
                MonomialIdeal::from_generators(self.n, gens)
            })
            .reduce(|acc, i| acc.intersection(&i))
            .unwrap_or_else(|| MonomialIdeal::unit(self.n))
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self
            .generators
            .iter()
            .map(|g| format!("({})", g.iter().join(",")))
            .join(", ");
        write!(f, "<{gens}>")
    }
}

/// Minimal exponent `max(0, ⌊c⌋)` for one coordinate.
fn minimal_exponent(c: Q) -> u32 {
    let floor = c.floor().to_integer();
    u32::try_from(floor.max(0)).expect("exponent fits in u32")
}

/// The multiplier ideal of a diagonal weight: principal with generator
/// `e_j = min{a ∈ ℤ≥0 : a > c_j − 1}`, decided exactly.
pub fn multiplier_ideal(w: &DiagonalWeight) -> MonomialIdeal {
    MonomialIdeal::principal(w.coeffs.iter().map(|&c| minimal_exponent(c)).collect())
}

/// Jumping numbers of `m ↦ 𝓘(φ_L + m ψ)` and the reduced divisor at `m1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    /// Upper end of the scanned range `(0, m_max]`.
    pub m_max: Q,
    /// Jumping numbers in `(0, m_max]`, strictly increasing.
    pub jumps: Vec<Q>,
    /// Coordinates `j` with `ν_j > 0` and `c_j(m1)` an integer `≥ 1`: the
    /// components `{z_j = 0}` of the reduced divisor `S`.
    pub s_components: Vec<usize>,
    /// `true` iff the annihilator of `𝓘(m0)/𝓘(m1)` has all generator
    /// exponents `≤ 1`.
    pub reduced: bool,
    /// The annihilator `(𝓘(m1) : 𝓘(m0))`.
    pub annihilator: MonomialIdeal,
    /// Generator increments `e_j(m1) − e_j(m0)` per coordinate.
    pub increments: Vec<u32>,
    /// Whether `m1` is itself a jumping number.
    pub m1_is_jump: bool,
    /// Jumping numbers strictly between `m0` and `m1`.
    pub interior_jumps: Vec<Q>,
}

impl JumpReport {
    /// Human-readable list of chart inconsistencies found by the scan; empty
    /// when `m1` is a jump, `(m0, m1)` is jump free and `S` is reduced.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.m1_is_jump {
            out.push("m1 is not a jumping number of the family I(phi_L + m psi)".to_string());
        }
        if !self.interior_jumps.is_empty() {
            out.push(format!(
                "the family I(phi_L + m psi) jumps inside (m0, m1) at {}",
                self.interior_jumps.iter().join(", ")
            ));
        }
        if !self.reduced {
            out.push(format!(
                "the annihilator {} does not define a reduced divisor",
                self.annihilator
            ));
        }
        out
    }

    /// `true` when [`JumpReport::issues`] is empty.
    pub fn is_consistent(&self) -> bool {
        self.issues().is_empty()
    }
}

/// Computes `{(k − ℓ_j)/ν_j : ν_j > 0, k ∈ ℤ, k ≥ 1, k > ℓ_j} ∩ (0, m_max]`
/// together with the reduced divisor data at `chart.m1`.
///
/// For `ℓ_j < 0` the integer `k = 0` would give a positive `m` at which the
/// generator does not change (`max(0, ⌊c⌋)` stays 0), so `k ≥ 1` is
/// required in addition to `k > ℓ_j`.
pub fn jumping_numbers(chart: &SncChart, m_max: Q) -> Result<JumpReport> {
    if !m_max.is_positive() {
        return Err(Error::Parameter {
            name: "m_max",
            reason: format!("must be positive, got {m_max}"),
        });
    }
    let jumps = jumps_up_to(chart, m_max);

    let c1 = chart.coeffs_at(chart.m1);
    let s_components = c1
        .iter()
        .zip(&chart.psi.coeffs)
        .enumerate()
        .filter(|(_, (c, nu))| nu.is_positive() && c.is_integer() && **c >= Q::one())
        .map(|(j, _)| j)
        .collect();
    let ideal0 = multiplier_ideal(&chart.weight_at(chart.m0));
    let ideal1 = multiplier_ideal(&chart.weight_at(chart.m1));
    let annihilator = ideal1.quotient(&ideal0);
    let reduced = annihilator
        .generators()
        .iter()
        .all(|g| g.iter().all(|&x| x <= 1));
    let increments = ideal1
        .principal_generator()
        .expect("diagonal ideals are principal")
        .iter()
        .zip(
            ideal0
                .principal_generator()
                .expect("diagonal ideals are principal"),
        )
        .map(|(a, b)| a.saturating_sub(*b))
        .collect();
    let below_m1 = jumps_up_to(chart, chart.m1);
    let m1_is_jump = below_m1.last() == Some(&chart.m1);
    let interior_jumps = below_m1
        .into_iter()
        .filter(|m| *m > chart.m0 && *m < chart.m1)
        .collect();
    Ok(JumpReport {
        m_max,
        jumps,
        s_components,
        reduced,
        annihilator,
        increments,
        m1_is_jump,
        interior_jumps,
    })
}

fn jumps_up_to(chart: &SncChart, m_max: Q) -> Vec<Q> {
    let mut out = Vec::new();
    if !m_max.is_positive() {
        return out;
    }
    for (&l, &nu) in chart.phi_l.coeffs.iter().zip(&chart.psi.coeffs) {
        if !nu.is_positive() {
            continue;
        }
        let mut k = (l.floor().to_integer() + 1).max(1);
        loop {
            let m = (Q::from_integer(k) - l) / nu;
            if m > m_max {
                break;
            }
            out.push(m);
            k += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// An lc stratum `⋂_{j ∈ coords} {z_j = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LcStratum {
    /// 0-based coordinates, increasing.
    pub coords: Vec<usize>,
}

impl LcStratum {
    /// Codimension `|coords|`.
    pub fn codim(&self) -> usize {
        self.coords.len()
    }
}

/// All codimension-`sigma` strata of `S`: the `sigma`-subsets of the
/// components.  `sigma = 0` gives the ambient chart; `sigma > |J|` gives none.
pub fn lc_centres(report: &JumpReport, sigma: usize) -> Vec<LcStratum> {
    report
        .s_components
        .iter()
        .copied()
        .combinations(sigma)
        .map(|coords| LcStratum { coords })
        .collect()
}

/// Defects `d_j = a_j + 1 − c_j(m1)` of a monomial section.
pub fn defects(chart: &SncChart, f: &MonomialSection) -> Vec<Q> {
    f.exponents
        .iter()
        .zip(chart.coeffs_at(chart.m1))
        .map(|(&a, c)| Q::from_integer(i64::from(a) + 1) - c)
        .collect()
}

/// σ_f with the strata that realise it.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaF {
    pub sigma_f: usize,
    /// Components `j ∈ J` with zero defect.
    pub zero_defect: Vec<usize>,
    /// The `σ_f`-subsets of `zero_defect`.
    pub strata: Vec<LcStratum>,
}

/// Codimension of the minimal lc centre relative to `f`: the number of
/// components `j ∈ J` with `a_j + 1 − ℓ_j − m1 ν_j = 0`.
pub fn sigma_f(chart: &SncChart, report: &JumpReport, f: &MonomialSection) -> Result<SigmaF> {
    if let Some(j) = f.first_non_integrable(&chart.weight_at(chart.m0)) {
        return Err(Error::Precondition(format!(
            "section with exponents {:?} is not in I(phi_L + m0 psi): \
             coordinate {j} needs a_{j} > {} but a_{j} = {}",
            f.exponents,
            chart.coeffs_at(chart.m0)[j] - Q::one(),
            f.exponents[j]
        )));
    }
    let d = defects(chart, f);
    let zero_defect: Vec<usize> = report
        .s_components
        .iter()
        .copied()
        .filter(|&j| d[j].is_zero())
        .collect();
    let sigma_f = zero_defect.len();
    let strata = zero_defect
        .iter()
        .copied()
        .combinations(sigma_f)
        .map(|coords| LcStratum { coords })
        .collect();
    Ok(SigmaF {
        sigma_f,
        zero_defect,
        strata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn generators_follow_floor_rule() {
        let w = |c: Vec<Q>| DiagonalWeight::new(c, 0.0);
        assert_eq!(
            multiplier_ideal(&w(vec![q(0, 1)])),
            MonomialIdeal::principal(vec![0])
        );
        assert_eq!(
            multiplier_ideal(&w(vec![q(3, 2)])),
            MonomialIdeal::principal(vec![1])
        );
        assert_eq!(
            multiplier_ideal(&w(vec![q(2, 1), q(1, 2)])),
            MonomialIdeal::principal(vec![2, 0])
        );
        assert_eq!(multiplier_ideal(&w(vec![q(-5, 2)])), MonomialIdeal::unit(1));
    }

    #[test]
    fn antichain_minimisation_and_colon() {
        let i =
            MonomialIdeal::from_generators(2, vec![vec![1, 2], vec![2, 2], vec![0, 3], vec![1, 2]]);
        assert_eq!(i.generators(), &[vec![0, 3], vec![1, 2]]);
        let big = MonomialIdeal::principal(vec![1, 0]);
        let small = MonomialIdeal::principal(vec![2, 1]);
        assert!(small.is_subset_of(&big));
        assert_eq!(small.quotient(&big), MonomialIdeal::principal(vec![1, 1]));
        let meet = MonomialIdeal::principal(vec![1, 0])
            .intersection(&MonomialIdeal::principal(vec![0, 1]));
        assert_eq!(meet, MonomialIdeal::principal(vec![1, 1]));
        assert_eq!(i.to_string(), "<(0,3), (1,2)>");
    }

    #[test]
    fn lc_centre_enumeration() {
        let report = JumpReport {
            m_max: q(1, 1),
            jumps: vec![q(1, 1)],
            s_components: vec![0, 1],
            reduced: true,
            annihilator: MonomialIdeal::principal(vec![1, 1]),
            increments: vec![1, 1],
            m1_is_jump: true,
            interior_jumps: vec![],
        };
        let c1 = lc_centres(&report, 1);
        assert_eq!(
            c1,
            vec![LcStratum { coords: vec![0] }, LcStratum { coords: vec![1] }]
        );
        assert_eq!(
            lc_centres(&report, 2),
            vec![LcStratum { coords: vec![0, 1] }]
        );
        assert_eq!(lc_centres(&report, 0), vec![LcStratum { coords: vec![] }]);
        assert!(lc_centres(&report, 3).is_empty());
    }
}
