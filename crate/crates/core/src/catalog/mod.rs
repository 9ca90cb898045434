//! Catalog of test functions with exact values and exact subdifferentials.
//!
//! Four classes are supported: smooth polynomials in up to four variables,
//! piecewise polynomials of one variable, quadratics restricted to a
//! polyhedron, and any of these plus a quadratic perturbation. Functions
//! outside these classes are out of reach of the closed-form routines.

mod builtin;
mod format;
mod piecewise;
mod poly;
mod polyhedral;
mod subgrad;

pub use builtin::{builtin, catalog_anchors, catalog_entries, CatalogAnchor, CatalogEntry};
pub use format::{parse_spec, parse_spec_value};
pub use piecewise::{Branch, Piecewise, SideLimit};
pub use poly::{Monomial, MultiPoly, Poly1};
pub use polyhedral::{Face, HalfSpace, QuadPolyhedron, MAX_CONSTRAINTS};
pub use subgrad::{SubgradientPiece, SubgradientSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::calculus::QuadraticPerturbation;
use crate::error::{Error, Result};
use crate::linalg;

/// Highest polynomial degree accepted anywhere in the catalog.
pub const MAX_DEGREE: usize = 6;

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

/// Relative tolerance for subgradient membership.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    SmoothPoly(MultiPoly),
    Piecewise1d(Piecewise),
    QuadPolyhedron(QuadPolyhedron),
    Shifted {
        inner: Box<FunctionSpec>,
        perturbation: QuadraticPerturbation,
    },
}

impl FunctionSpec {
    pub fn smooth(poly: MultiPoly) -> Result<Self> {
        if poly.degree() > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree: poly.degree(),
                cap: MAX_DEGREE,
            });
        }
        check_dim(poly.dim())?;
        Ok(FunctionSpec::SmoothPoly(poly))
    }

    pub fn shifted(inner: FunctionSpec, perturbation: QuadraticPerturbation) -> Result<Self> {
        if inner.dim() != perturbation.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                got: perturbation.dim(),
            });
        }
        Ok(FunctionSpec::Shifted {
            inner: Box::new(inner),
            perturbation,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FunctionSpec::SmoothPoly(_) => "smooth-poly",
            FunctionSpec::Piecewise1d(_) => "piecewise-1d",
            FunctionSpec::QuadPolyhedron(_) => "quad-plus-polyhedron",
            FunctionSpec::Shifted { .. } => "shifted",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::SmoothPoly(p) => p.dim(),
            FunctionSpec::Piecewise1d(_) => 1,
            FunctionSpec::QuadPolyhedron(q) => q.dim(),
            FunctionSpec::Shifted { inner, .. } => inner.dim(),
        }
    }

    /// `f(x)`, `+inf` outside the domain.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            FunctionSpec::SmoothPoly(p) => p.eval(x),
            FunctionSpec::Piecewise1d(p) => p.evaluate(x[0]),
            FunctionSpec::QuadPolyhedron(q) => q.evaluate(x),
            FunctionSpec::Shifted { inner, perturbation } => inner.evaluate(x) + perturbation.value(x),
        }
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.evaluate(x).is_finite()
    }

    /// Exact limiting subdifferential.
    pub fn subdifferential(&self, x: &[f64]) -> Result<SubgradientSet> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match self {
            FunctionSpec::SmoothPoly(p) => Ok(SubgradientSet::point(p.gradient(x))),
            FunctionSpec::Piecewise1d(p) => p.subdifferential(x[0]),
            FunctionSpec::QuadPolyhedron(q) => q.subdifferential(x),
            FunctionSpec::Shifted { inner, perturbation } => {
                Ok(inner.subdifferential(x)?.translate(&perturbation.gradient(x)))
            }
        }
    }

    pub fn is_subgradient(&self, x: &[f64], xstar: &[f64]) -> bool {
        self.subdifferential(x)
            .map(|s| s.contains(xstar, MEMBERSHIP_TOL))
            .unwrap_or(false)
    }

    /// Fails with `NotASubgradient` unless `xstar` is in `∂f(x)`.
    pub fn require_subgradient(&self, x: &[f64], xstar: &[f64]) -> Result<()> {
        if xstar.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xstar.len(),
            });
        }
        if !self.in_domain(x) {
            return Err(Error::EmptyDomain { x: x.to_vec() });
        }
        if self.is_subgradient(x, xstar) {
            Ok(())
        } else {
            Err(Error::NotASubgradient {
                x: x.to_vec(),
                xstar: xstar.to_vec(),
            })
        }
    }

    /// Hessian at a point where `f` is C^2 around `x`; `None` at kinks and on
    /// the boundary of a polyhedral domain.
    pub fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        match self {
            FunctionSpec::SmoothPoly(p) => Some(p.hessian(x)),
            FunctionSpec::Piecewise1d(p) => p.second_derivative(x[0]).map(|v| DMatrix::from_element(1, 1, v)),
            FunctionSpec::QuadPolyhedron(q) => {
                if q.feasible(x) && q.active_set(x).is_empty() {
                    Some(q.a().clone())
                } else {
                    None
                }
            }
            FunctionSpec::Shifted { inner, perturbation } => inner.hessian(x).map(|h| h + perturbation.hessian()),
        }
    }

    /// Distance from `x` to the nearest point where `f` stops being smooth,
    /// ignoring such a locus through `x` itself.
    pub fn kink_distance(&self, x: &[f64]) -> f64 {
        match self {
            FunctionSpec::SmoothPoly(_) => f64::INFINITY,
            FunctionSpec::Piecewise1d(p) => p.kink_distance(x[0]),
            FunctionSpec::QuadPolyhedron(q) => q.kink_distance(x),
            FunctionSpec::Shifted { inner, .. } => inner.kink_distance(x),
        }
    }

    /// Special points the graph sampler always includes when they fall in
    /// the window: breakpoints and polyhedron vertices.
    pub fn special_points(&self) -> Vec<Vec<f64>> {
        match self {
            FunctionSpec::SmoothPoly(_) => Vec::new(),
            FunctionSpec::Piecewise1d(p) => p.breakpoints().into_iter().map(|b| vec![b]).collect(),
            FunctionSpec::QuadPolyhedron(q) => q.vertices(),
            FunctionSpec::Shifted { inner, .. } => inner.special_points(),
        }
    }

    /// One-line human description.
    pub fn describe(&self) -> String {
        match self {
            FunctionSpec::SmoothPoly(p) => {
                let terms: Vec<String> = p
                    .terms()
                    .iter()
                    .map(|t| format!("{}*x^{:?}", t.coeff, t.exponents))
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                }
            }
            FunctionSpec::Piecewise1d(p) => p
                .branches()
                .iter()
                .map(|b| {
                    format!(
                        "{}{}, {}{}: {:?}",
                        if b.lo_closed { "[" } else { "(" },
                        b.lo,
                        b.hi,
                        if b.hi_closed { "]" } else { ")" },
                        b.poly.coeffs()
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
            FunctionSpec::QuadPolyhedron(q) => format!(
                "x'Ax/2 + b'x + c with A = {:?}, b = {:?}, c = {}, {} constraint(s)",
                q.a()
                    .row_iter()
                    .map(|r| r.iter().copied().collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                q.b(),
                q.c0(),
                q.constraints().len()
            ),
            FunctionSpec::Shifted { inner, perturbation } => {
                format!("({}) + {}", inner.describe(), perturbation.describe())
            }
        }
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Unsupported(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

/// Outcome of [`regular_subgradient_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularProbe {
    pub pass: bool,
    /// Smallest ratio `(f(x) - f(x̄) - <x̄*, x - x̄>) / |x - x̄|` on the finest
    /// level.
    pub ratio: f64,
    /// Smallest ratio per level, coarse to fine.
    pub level_ratios: Vec<f64>,
    pub tolerance: f64,
}

/// Number of radius halvings in [`regular_subgradient_probe`].
pub const PROBE_LEVELS: usize = 24;

/// Tests `x̄* ∈ ∂̂f(x̄)` numerically: the difference quotient of the
/// linearization error over grids on shrinking boxes `x̄ + r 2^-k [-1, 1]^n`.
pub fn regular_subgradient_probe(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    radius: f64,
    grid: usize,
) -> Result<RegularProbe> {
    if !f.in_domain(xbar) {
        return Err(Error::EmptyDomain { x: xbar.to_vec() });
    }
    if radius <= 0.0 || grid < 2 {
        return Err(Error::InvalidParameter(
            "probe needs radius > 0 and at least 2 grid points".into(),
        ));
    }
    let n = f.dim();
    let fbar = f.evaluate(xbar);
    let unit: Vec<f64> = (0..grid).map(|i| -1.0 + 2.0 * i as f64 / (grid - 1) as f64).collect();
    let total = grid.pow(n as u32);
    let tolerance = 1e-6;
    let mut level_ratios = Vec::with_capacity(PROBE_LEVELS);
    for level in 0..PROBE_LEVELS {
        let r = radius * 0.5f64.powi(level as i32);
        let mut worst = f64::INFINITY;
        for flat in 0..total {
            let mut rem = flat;
            let mut x = Vec::with_capacity(n);
            for i in 0..n {
                x.push(xbar[i] + r * unit[rem % grid]);
                rem /= grid;
            }
            let d: Vec<f64> = x.iter().zip(xbar).map(|(a, b)| a - b).collect();
            let norm = linalg::norm2(&d);
            if norm == 0.0 {
                continue;
            }
            let fx = f.evaluate(&x);
            if fx.is_infinite() {
                continue;
            }
            let ratio = (fx - fbar - linalg::dot(xstar, &d)) / norm;
            worst = worst.min(ratio);
        }
        level_ratios.push(worst);
    }
    let ratio = *level_ratios.last().expect("at least one level");
    Ok(RegularProbe {
        pass: ratio >= -tolerance,
        ratio,
        level_ratios,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_examples() {
        let f2 = builtin("f2_zero").unwrap();
        let r = regular_subgradient_probe(&f2, &[0.0], &[0.0], 0.5, 9).unwrap();
        assert!(r.pass);
        assert_eq!(r.ratio, 0.0);
        let f1 = builtin("f1_neg_quartic").unwrap();
        assert!(regular_subgradient_probe(&f1, &[0.0], &[0.0], 0.5, 9).unwrap().pass);
        let neg = builtin("neg_abs").unwrap();
        let r = regular_subgradient_probe(&neg, &[0.0], &[0.0], 0.5, 9).unwrap();
        assert!(!r.pass);
        assert!((r.ratio + 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(builtin("f1_neg_quartic").unwrap().evaluate(&[1.0]), -1.0);
        assert_eq!(builtin("indicator_halfline").unwrap().evaluate(&[-1.0]), f64::INFINITY);
        assert_eq!(builtin("flagship_jump").unwrap().evaluate(&[0.5]), 0.5);
    }

    #[test]
    fn outside_domain_is_an_error() {
        let f = builtin("indicator_halfline").unwrap();
        assert!(matches!(f.subdifferential(&[-1.0]), Err(Error::EmptyDomain { .. })));
    }
}
