use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Univariate polynomial, coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1 {
    coeffs: Vec<f64>,
}

impl Poly1 {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly1 {
        Poly1::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly1) -> Poly1 {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly1::new(
            (0..len)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }
}

/// Multivariate polynomial in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    n: usize,
    terms: Vec<Monomial>,
}

impl MultiPoly {
    /// Like terms are merged and zero terms dropped.
    pub fn new(n: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.exponents.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidSpec("non-finite polynomial coefficient".into()));
            }
        }
        let mut merged: Vec<Monomial> = Vec::new();
        for t in terms {
            match merged.iter_mut().find(|m| m.exponents == t.exponents) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|m| m.coeff != 0.0);
        merged.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        Ok(Self { n, terms: merged })
    }

    /// `c + b^T x + x^T H x / 2`.
    pub fn quadratic(c: f64, b: &[f64], h: &DMatrix<f64>) -> Result<Self> {
        let n = b.len();
        let mut terms = vec![Monomial {
            coeff: c,
            exponents: vec![0; n],
        }];
        for (i, &bi) in b.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            terms.push(Monomial {
                coeff: bi,
                exponents: e,
            });
        }
        for i in 0..n {
            for j in i..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                let coeff = if i == j { h[(i, i)] / 2.0 } else { h[(i, j)] };
                terms.push(Monomial { coeff, exponents: e });
            }
        }
        Self::new(n, terms)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * t.exponents
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.partial(x, &[i])).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.partial(x, &[i, j]))
    }

    fn partial(&self, x: &[f64], vars: &[usize]) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            let mut e: Vec<i64> = t.exponents.iter().map(|&v| v as i64).collect();
            let mut c = t.coeff;
            for &v in vars {
                c *= e[v] as f64;
                e[v] -= 1;
            }
            if c == 0.0 {
                continue;
            }
            total += c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>();
        }
        total
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        MultiPoly::new(self.n, terms)
    }

    /// The univariate view of a polynomial in one variable.
    pub fn to_poly1(&self) -> Option<Poly1> {
        if self.n != 1 {
            return None;
        }
        let mut coeffs = vec![0.0; self.degree() + 1];
        for t in &self.terms {
            coeffs[t.exponents[0] as usize] += t.coeff;
        }
        Some(Poly1::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivatives() {
        let p = Poly1::new(vec![1.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.derivative().eval(1.0), -4.0);
        assert_eq!(p.derivative().derivative().eval(1.0), -12.0);
        assert_eq!(Poly1::new(vec![0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn quadratic_round_trip() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let q = MultiPoly::quadratic(0.5, &[1.0, -1.0], &h).unwrap();
        let x = [0.3, -0.7];
        let direct = 0.5 + 0.3 + 0.7 + 0.5 * (2.0 * 0.09 + 2.0 * 0.3 * -0.7 + 3.0 * 0.49);
        assert!((q.eval(&x) - direct).abs() < 1e-14);
        assert!((q.hessian(&x) - h).amax() < 1e-14);
        let g = q.gradient(&x);
        assert!((g[0] - (1.0 + 2.0 * 0.3 - 0.7)).abs() < 1e-14);
    }

    #[test]
    fn like_terms_merge() {
        let a = MultiPoly::new(
            1,
            vec![Monomial {
                coeff: 1.0,
                exponents: vec![2],
            }],
        )
        .unwrap();
        let b = MultiPoly::new(
            1,
            vec![Monomial {
                coeff: -1.0,
                exponents: vec![2],
            }],
        )
        .unwrap();
        assert!(a.add(&b).unwrap().terms().is_empty());
    }
}
