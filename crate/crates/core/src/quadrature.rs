//! Numerical building blocks: Gauss–Legendre rules on concrete intervals,
//! order-fixed summation, polynomial extrapolation to zero, bracketed root
//! finding and the quintic smoothstep used for every cutoff in the crate.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// A one-dimensional quadrature rule with nodes and weights on a concrete
/// interval.  Weights may already contain a density factor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// `n`-point Gauss–Legendre rule on `[a, b]`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
        let n = NonZeroUsize::new(n.max(1)).expect("max(1) is non-zero");
        let reference = GaussLegendre::new(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut pairs: Vec<(f64, f64)> = reference
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (mid + half * x, half * w))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Rule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Composite rule: an `n`-point Gauss–Legendre rule on every panel
    /// `[breaks[i], breaks[i+1]]`.
    pub fn composite(n: usize, breaks: &[f64]) -> Rule {
        let mut rule = Rule::default();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                rule.append(Rule::gauss_legendre(n, w[0], w[1]));
            }
        }
        rule
    }

    /// Concatenates another rule (used to join adjacent intervals).
    pub fn append(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    /// Multiplies every weight by `density(node)`.
    pub fn with_density(mut self, density: impl Fn(f64) -> f64) -> Rule {
        for (w, &x) in self.weights.iter_mut().zip(&self.nodes) {
            *w *= density(x);
        }
        self
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `true` for the empty rule.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f` with order-fixed pairwise summation.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Pairwise (cascade) summation in a fixed order.  The result depends only
/// on the slice contents, never on how the slice was produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Result of extrapolating a sampled function to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    /// Value of the interpolating polynomial through all samples at 0.
    pub value: f64,
    /// Difference to the extrapolant that omits the sample farthest from 0;
    /// a practical error indicator.
    pub residual: f64,
}

/// Richardson extrapolation to `x = 0`: evaluates the interpolating
/// polynomial of the samples `(xs[i], ys[i])` at the origin by Neville's
/// scheme.
///
/// # Panics
/// Panics when the slices differ in length or are empty.
pub fn richardson_at_zero(xs: &[f64], ys: &[f64]) -> Extrapolation {
    assert_eq!(xs.len(), ys.len(), "sample lengths differ");
    assert!(!xs.is_empty(), "no samples to extrapolate");
    let value = neville_at_zero(xs, ys);
    let residual = if xs.len() == 1 {
        f64::INFINITY
    } else {
        let far = (0..xs.len())
            .max_by(|&i, &j| xs[i].abs().total_cmp(&xs[j].abs()))
            .expect("non-empty");
        let (rx, ry): (Vec<f64>, Vec<f64>) = xs
            .iter()
            .zip(ys)
            .enumerate()
            .filter(|(i, _)| *i != far)
            .map(|(_, (&x, &y))| (x, y))
            .unzip();
        (value - neville_at_zero(&rx, &ry)).abs()
    };
    Extrapolation { value, residual }
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Bisection for a root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs; stops once the bracket is shorter than `tol`.  The
/// iteration is fully deterministic.
///
/// # Panics
/// Panics when the endpoints do not bracket a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    assert!(
        f_lo.signum() != f_hi.signum(),
        "bisection needs a sign change on [{lo}, {hi}]"
    );
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Quintic smoothstep `S(x) = 10x³ − 15x⁴ + 6x⁵` clamped to `[0, 1]`,
/// together with its first two derivatives.  `S` is C² with vanishing first
/// and second derivatives at both ends.
pub fn smoothstep(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if x >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let x2 = x * x;
        let s = x2 * x * (10.0 + x * (-15.0 + 6.0 * x));
        let ds = 30.0 * x2 * (1.0 - x) * (1.0 - x);
        let dds = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
        (s, ds, dds)
    }
}
