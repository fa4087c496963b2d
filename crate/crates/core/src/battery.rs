//! A fixed battery of well-formed charts with monomial sections.
//!
//! Every case satisfies the standing assumptions: the chart validates, `m1`
//! is a jumping number, the family `𝓘(φ_L + m ψ)` is constant on `(m0, m1)`
//! and every section term lies in `𝓘(φ_L + m0 ψ)`.  `m0` is placed halfway
//! between `m1` and the previous jumping number (or 0).

use num_traits::Zero;

use crate::multiplier::jumping_numbers;
use crate::snc_model::{DiagonalWeight, MonomialSection, MultiMonomialSection, SncChart};
use crate::Q;

/// A named chart with its section.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryCase {
    pub name: &'static str,
    pub chart: SncChart,
    pub section: MultiMonomialSection,
}

type Frac = (i64, i64);

struct Spec {
    name: &'static str,
    radii: &'static [f64],
    ell: &'static [Frac],
    beta: f64,
    nu: &'static [Frac],
    alpha: f64,
    m1: Frac,
    terms: &'static [(&'static [u32], f64, &'static [f64])],
}

fn q((n, d): Frac) -> Q {
    Q::new(n, d)
}

fn build(spec: &Spec) -> BatteryCase {
    let n = spec.radii.len();
    let m1 = q(spec.m1);
    let mut chart = SncChart {
        n,
        radii: spec.radii.to_vec(),
        phi_l: DiagonalWeight::new(spec.ell.iter().copied().map(q).collect(), spec.beta),
        psi: DiagonalWeight::new(spec.nu.iter().copied().map(q).collect(), spec.alpha),
        m0: Q::zero(),
        m1,
    };
    let jumps = jumping_numbers(&chart, m1).expect("m1 > 0").jumps;
    let previous = jumps
        .iter()
        .copied()
        .rfind(|m| *m < m1)
        .unwrap_or_else(Q::zero);
    chart.m0 = (previous + m1) / Q::from_integer(2);
    let terms = spec
        .terms
        .iter()
        .map(|(a, amp, rho)| MonomialSection::new(a.to_vec(), *amp, rho.to_vec()))
        .collect();
    BatteryCase {
        name: spec.name,
        chart,
        section: MultiMonomialSection::new(terms).expect("battery terms are distinct"),
    }
}

const SPECS: &[Spec] = &[
    Spec {
        name: "1d-unit",
        radii: &[0.9],
        ell: &[(0, 1)],
        beta: 0.0,
        nu: &[(1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0], 1.0, &[0.5])],
    },
    Spec {
        name: "1d-nu2",
        radii: &[0.8],
        ell: &[(0, 1)],
        beta: 0.0,
        nu: &[(2, 1)],
        alpha: 0.0,
        m1: (1, 2),
        terms: &[(&[0], 1.0, &[0.6])],
    },
    Spec {
        name: "1d-half-ell",
        radii: &[0.9],
        ell: &[(1, 2)],
        beta: 0.3,
        nu: &[(1, 1)],
        alpha: -1.0,
        m1: (1, 2),
        terms: &[(&[0], 2.0, &[0.7])],
    },
    Spec {
        name: "1d-second-jump",
        radii: &[0.9],
        ell: &[(0, 1)],
        beta: 0.0,
        nu: &[(1, 1)],
        alpha: 0.0,
        m1: (2, 1),
        terms: &[(&[1], 1.0, &[0.5])],
    },
    Spec {
        name: "1d-vanishing",
        radii: &[0.9],
        ell: &[(0, 1)],
        beta: 0.0,
        nu: &[(1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[1], 1.0, &[0.5])],
    },
    Spec {
        name: "1d-third-nu",
        radii: &[0.95],
        ell: &[(2, 3)],
        beta: 0.0,
        nu: &[(1, 3)],
        alpha: -0.5,
        m1: (1, 1),
        terms: &[(&[0], 0.8, &[0.9])],
    },
    Spec {
        name: "2d-origin",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-axis",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 1], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-vanishing",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[1, 1], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-nu23-origin",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(2, 1), (3, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[1, 2], 1.0, &[0.6, 0.6])],
    },
    Spec {
        name: "2d-nu23-half",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(2, 1), (3, 1)],
        alpha: 0.0,
        m1: (1, 2),
        terms: &[(&[0, 1], 1.0, &[0.6, 0.6])],
    },
    Spec {
        name: "2d-transverse-klt",
        radii: &[0.9, 0.8],
        ell: &[(0, 1), (1, 2)],
        beta: 0.0,
        nu: &[(1, 1), (0, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.0, &[0.5, 0.7])],
    },
    Spec {
        name: "2d-negative-ell",
        radii: &[0.9, 0.9],
        ell: &[(-1, 2), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (3, 2),
        terms: &[(&[0, 1], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-shifted",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.5,
        nu: &[(1, 1), (1, 1)],
        alpha: -2.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.7, &[0.4, 0.6])],
    },
    Spec {
        name: "2d-mixed-nu",
        radii: &[0.9, 0.9],
        ell: &[(1, 2), (0, 1)],
        beta: 0.0,
        nu: &[(1, 2), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-two-stage",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.0, &[0.5, 0.5]), (&[0, 1], 0.7, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-deep-psi",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: -40.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-second-jump",
        radii: &[0.9, 0.9],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (2, 1),
        terms: &[(&[1, 1], 1.0, &[0.5, 0.5])],
    },
    Spec {
        name: "2d-small-support",
        radii: &[0.5, 0.8],
        ell: &[(0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0], 1.0, &[0.3, 0.6])],
    },
    Spec {
        name: "3d-origin",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(0, 1), (0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0, 0], 1.0, &[0.5, 0.5, 0.5])],
    },
    Spec {
        name: "3d-curve",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(0, 1), (0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0, 1], 1.0, &[0.5, 0.5, 0.5])],
    },
    Spec {
        name: "3d-divisor",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(0, 1), (0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 1, 1], 1.0, &[0.5, 0.5, 0.5])],
    },
    Spec {
        name: "3d-flat-factor",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(0, 1), (0, 1), (1, 3)],
        beta: 0.0,
        nu: &[(1, 1), (1, 1), (0, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0, 0], 1.0, &[0.5, 0.5, 0.6])],
    },
    Spec {
        name: "3d-mixed-nu",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(0, 1), (0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (2, 1), (1, 2)],
        alpha: 0.0,
        m1: (2, 1),
        terms: &[(&[1, 3, 0], 1.0, &[0.5, 0.5, 0.5])],
    },
    Spec {
        name: "3d-decaying-axes",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(1, 2), (0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(2, 1), (1, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 4),
        terms: &[(&[0, 0, 0], 1.0, &[0.5, 0.5, 0.5])],
    },
    Spec {
        name: "3d-one-flat",
        radii: &[0.9, 0.9, 0.9],
        ell: &[(0, 1), (0, 1), (0, 1)],
        beta: 0.0,
        nu: &[(1, 1), (0, 1), (1, 1)],
        alpha: 0.0,
        m1: (1, 1),
        terms: &[(&[0, 0, 1], 1.0, &[0.5, 0.5, 0.5])],
    },
];

/// All battery cases, in a fixed order.
pub fn battery() -> Vec<BatteryCase> {
    SPECS.iter().map(build).collect()
}

/// The battery case with the given name.
pub fn case(name: &str) -> Option<BatteryCase> {
    SPECS.iter().find(|s| s.name == name).map(build)
}
