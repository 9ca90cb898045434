//! Quadratic perturbations of functions and the matching transformation of
//! second-order objects.

use nalgebra::{DMatrix, DVector};

use crate::catalog::{FunctionSpec, MultiPoly, Poly1};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::scderiv::PwSet;
use crate::subspace::{PwPair, Subspace};

/// `g(x) = c + b^T x + x^T H x / 2` with `H` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPerturbation {
    c: f64,
    b: Vec<f64>,
    h: DMatrix<f64>,
}

impl QuadraticPerturbation {
    pub fn new(c: f64, b: Vec<f64>, h: DMatrix<f64>) -> Result<Self> {
        let n = b.len();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h.nrows(),
            });
        }
        let scale = linalg::max_abs(&h).max(1.0);
        if linalg::max_abs(&(&h - h.transpose())) > 1e-12 * scale {
            return Err(Error::InvalidParameter("H must be symmetric".into()));
        }
        Ok(Self {
            c,
            b,
            h: linalg::symmetrize(&h),
        })
    }

    /// `g(x) = <y*, x - x̄> + (t/2) |x - x̄|^2`, so `g(x̄) = 0`,
    /// `∇g(x̄) = y*` and `∇²g = t I`.
    pub fn shift(anchor: &[f64], tilt: &[f64], t: f64) -> Self {
        let n = anchor.len();
        let b = anchor.iter().zip(tilt).map(|(&x, &y)| y - t * x).collect();
        let c = -linalg::dot(tilt, anchor) + 0.5 * t * linalg::dot(anchor, anchor);
        Self {
            c,
            b,
            h: DMatrix::identity(n, n) * t,
        }
    }

    /// `g(x) = <y*, x>`.
    pub fn linear(tilt: &[f64]) -> Self {
        let n = tilt.len();
        Self {
            c: 0.0,
            b: tilt.to_vec(),
            h: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn hessian(&self) -> DMatrix<f64> {
        self.h.clone()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        self.c + linalg::dot(&self.b, x) + 0.5 * v.dot(&(&self.h * &v))
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let hx = &self.h * DVector::from_column_slice(x);
        self.b.iter().zip(hx.iter()).map(|(a, b)| a + b).collect()
    }

    /// The perturbation merged with another one.
    pub fn plus(&self, other: &QuadraticPerturbation) -> QuadraticPerturbation {
        QuadraticPerturbation {
            c: self.c + other.c,
            b: self.b.iter().zip(&other.b).map(|(a, b)| a + b).collect(),
            h: &self.h + &other.h,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{} + {:?}'x + x'Hx/2 with H = {:?}",
            self.c,
            self.b,
            self.h
                .row_iter()
                .map(|r| r.iter().copied().collect::<Vec<_>>())
                .collect::<Vec<_>>()
        )
    }

    fn as_poly(&self) -> Result<MultiPoly> {
        MultiPoly::quadratic(self.c, &self.b, &self.h)
    }
}

/// `h = f + g`, merged into the coefficients of `f` when its class allows it.
pub fn add_quadratic(f: &FunctionSpec, q: &QuadraticPerturbation) -> Result<FunctionSpec> {
    if f.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: q.dim(),
        });
    }
    match f {
        FunctionSpec::SmoothPoly(p) => FunctionSpec::smooth(p.add(&q.as_poly()?)?),
        FunctionSpec::Piecewise1d(p) => {
            let add = q.as_poly()?.to_poly1().unwrap_or_else(|| Poly1::constant(0.0));
            Ok(FunctionSpec::Piecewise1d(p.add_poly(&add)?))
        }
        FunctionSpec::QuadPolyhedron(p) => Ok(FunctionSpec::QuadPolyhedron(p.add_quadratic(q.c, &q.b, &q.h)?)),
        FunctionSpec::Shifted { inner, perturbation } => FunctionSpec::shifted((**inner).clone(), perturbation.plus(q)),
    }
}

/// `Ā = [[I, 0], [H, I]]`.
pub fn abar<T: Real>(h: &DMatrix<T>) -> DMatrix<T> {
    let n = h.nrows();
    let mut a = DMatrix::identity(2 * n, 2 * n);
    a.view_mut((n, 0), (n, n)).copy_from(h);
    a
}

/// `{(P, P H P + W)}`: the SC derivative of `f + g` from that of `f`,
/// with `H = ∇²g(x̄)`. The anchor is left unchanged.
pub fn transform_pw<T: Real>(set: &PwSet<T>, h: &DMatrix<T>) -> PwSet<T> {
    let pairs = set
        .pairs()
        .iter()
        .map(|pair| {
            let p = pair.p();
            PwPair::from_trusted(p.clone(), p * h * p + pair.w())
        })
        .collect();
    set.with_pairs(pairs)
}

/// `{Ā L}` for each subspace, re-orthonormalized.
pub fn transform_subspaces<T: Real>(set: &[Subspace<T>], h: &DMatrix<T>) -> Vec<Subspace<T>> {
    let a = abar(h);
    set.iter()
        .map(|l| {
            l.transformed(&a)
                .expect("Ā is invertible, so the image keeps dimension n")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::scderiv::{Anchor, Provenance};

    #[test]
    fn shift_examples() {
        let q = QuadraticPerturbation::shift(&[0.0], &[0.0], 1.0);
        let h = add_quadratic(&builtin("f2_zero").unwrap(), &q).unwrap();
        assert_eq!(h.evaluate(&[2.0]), 2.0);
        let h = add_quadratic(&builtin("abs").unwrap(), &q).unwrap();
        let s = h.subdifferential(&[0.0]).unwrap();
        assert!(s.contains(&[-1.0], 0.0) && s.contains(&[1.0], 0.0));
        let h = add_quadratic(
            &builtin("flagship_jump").unwrap(),
            &QuadraticPerturbation::linear(&[0.2]),
        )
        .unwrap();
        let FunctionSpec::Piecewise1d(p) = h else {
            panic!("piecewise expected")
        };
        assert_eq!(p.branches()[0].poly.coeffs(), &[0.0, 0.2]);
        assert_eq!(p.branches()[1].poly.coeffs(), &[1.0, -0.8]);
    }

    #[test]
    fn shift_has_stated_value_and_gradient() {
        let q = QuadraticPerturbation::shift(&[1.0, -2.0], &[0.5, 0.25], 3.0);
        assert!(q.value(&[1.0, -2.0]).abs() < 1e-15);
        assert_eq!(q.gradient(&[1.0, -2.0]), vec![0.5, 0.25]);
    }

    #[test]
    fn transform_examples() {
        let anchor = Anchor::new(vec![0.0], vec![0.0]);
        let set = PwSet::new(
            vec![PwPair::scalar(1.0, 0.0).unwrap(), PwPair::scalar(0.0, 1.0).unwrap()],
            Provenance::ClosedForm,
            anchor,
        );
        let t: PwSet<f64> = transform_pw(&set, &DMatrix::from_element(1, 1, 0.7));
        assert!((t.pairs()[0].w()[(0, 0)] - 0.7).abs() < 1e-15 || (t.pairs()[1].w()[(0, 0)] - 0.7).abs() < 1e-15);
        let vertical = Subspace::<f64>::vertical(1);
        let moved = transform_subspaces(std::slice::from_ref(&vertical), &DMatrix::from_element(1, 1, 5.0));
        assert!(moved[0].distance(&vertical) < 1e-15);
        let horizontal = Subspace::<f64>::horizontal(1);
        let moved = transform_subspaces(&[horizontal], &DMatrix::from_element(1, 1, 2.0));
        let expected = Subspace::span(&[vec![1.0, 2.0]]).unwrap();
        assert!(moved[0].distance(&expected) < 1e-14);
    }
}
