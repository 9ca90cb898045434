//! n-dimensional subspaces of R^n x R^n and their `(P, W)` bases.
//!
//! A subspace `L` is stored through an orthonormal `2n x n` basis. Subspaces
//! that equal their adjoint `L*` are exactly those of the form
//! `rge(P, W) = {(Pp, Wp)}` with `P` a symmetric projector, `W` symmetric and
//! `W(I - P) = I - P`; [`pw_from_subspace`] and [`subspace_from_pw`] convert
//! between the two descriptions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Relative singular value cut-off used when extracting ranks.
const RANK_TOL: f64 = 1e-9;
const PROJECTION_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Orthonormalizes the columns of `spanning` (a `2n x k` matrix) and
    /// checks that they span an n-dimensional subspace.
    pub fn from_spanning(spanning: &DMatrix<T>) -> Result<Self> {
        let rows = spanning.nrows();
        if !rows.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("ambient dimension {rows} is not even")));
        }
        let basis = linalg::column_space(spanning, T::tol(RANK_TOL));
        if basis.ncols() != rows / 2 {
            return Err(Error::RankDeficient {
                rank: basis.ncols(),
                n: rows / 2,
            });
        }
        Ok(Self { basis })
    }

    /// Builds the subspace spanned by the rows-as-vectors in `vectors`.
    pub fn span(vectors: &[Vec<T>]) -> Result<Self> {
        let rows = vectors.first().map_or(0, Vec::len);
        let m = DMatrix::from_fn(rows, vectors.len(), |r, c| vectors[c][r]);
        Self::from_spanning(&m)
    }

    /// The graph `{(u, Bu)}` of a linear map.
    pub fn graph_of(b: &DMatrix<T>) -> Self {
        let n = b.nrows();
        let mut m = DMatrix::zeros(2 * n, n);
        m.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
        m.view_mut((n, 0), (n, n)).copy_from(b);
        Self::from_spanning(&m).expect("graph of a linear map has full rank")
    }

    /// `R^n x {0}`.
    pub fn horizontal(n: usize) -> Self {
        Self::graph_of(&DMatrix::zeros(n, n))
    }

    /// `{0} x R^n`.
    pub fn vertical(n: usize) -> Self {
        let mut m = DMatrix::zeros(2 * n, n);
        m.view_mut((n, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
        Self { basis: m }
    }

    pub fn n(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal `2n x n` basis.
    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn projection_matrix(&self) -> DMatrix<T> {
        projection_matrix(self)
    }

    pub fn distance(&self, other: &Self) -> T {
        dz_distance(self, other)
    }

    pub fn adjoint(&self) -> Self {
        adjoint(self)
    }

    /// Distance of `v` from the subspace, relative to `|v|`.
    pub fn relative_residual(&self, v: &[T]) -> T {
        let v = DMatrix::from_column_slice(v.len(), 1, v);
        let norm = v.norm();
        if norm == T::zero() {
            return T::zero();
        }
        let r = &v - &self.basis * (self.basis.transpose() * &v);
        r.norm() / norm
    }

    /// Applies the linear map `a` (2n x 2n) and re-orthonormalizes.
    pub fn transformed(&self, a: &DMatrix<T>) -> Result<Self> {
        Self::from_spanning(&(a * &self.basis))
    }

    pub fn to_f64(&self) -> Subspace<f64> {
        Subspace {
            basis: self.basis.map(|v| v.to_f64_lossy()),
        }
    }
}

/// `B B^T` for the orthonormal basis `B` of `L`.
pub fn projection_matrix<T: Real>(l: &Subspace<T>) -> DMatrix<T> {
    &l.basis * l.basis.transpose()
}

/// `d_Z(L1, L2) = |P_{L1} - P_{L2}|` in the spectral norm.
pub fn dz_distance<T: Real>(l1: &Subspace<T>, l2: &Subspace<T>) -> T {
    assert_eq!(l1.n(), l2.n(), "subspaces of different ambient spaces");
    linalg::spectral_norm_sym(&(projection_matrix(l1) - projection_matrix(l2)))
}

/// `L* = {(v*, u*) : (u*, -v*) in L^perp}`.
///
/// With `J = [[0, -I], [I, 0]]` this is `J L^perp`; `J` is orthogonal so the
/// complement basis stays orthonormal.
pub fn adjoint<T: Real>(l: &Subspace<T>) -> Subspace<T> {
    let n = l.n();
    let perp = linalg::orthogonal_complement(&l.basis);
    let mut basis = DMatrix::zeros(2 * n, n);
    for c in 0..n {
        for i in 0..n {
            // (a; b) = (u*; -v*)  ->  (v*; u*) = (-b; a)
            basis[(i, c)] = -perp[(n + i, c)];
            basis[(n + i, c)] = perp[(i, c)];
        }
    }
    Subspace { basis }
}

/// Hausdorff distance between two finite sets of subspaces under `d_Z`.
/// Two empty sets are at distance 0; an empty and a nonempty set at `+inf`.
pub fn hausdorff<T: Real>(a: &[Subspace<T>], b: &[Subspace<T>]) -> T {
    if a.is_empty() && b.is_empty() {
        return T::zero();
    }
    if a.is_empty() || b.is_empty() {
        return T::infinity();
    }
    let one_sided = |x: &[Subspace<T>], y: &[Subspace<T>]| {
        x.iter().fold(T::zero(), |acc, l| {
            let d = y
                .iter()
                .map(|m| dz_distance(l, m))
                .fold(T::infinity(), |a, d| if d < a { d } else { a });
            if d > acc {
                d
            } else {
                acc
            }
        })
    };
    let ab = one_sided(a, b);
    let ba = one_sided(b, a);
    if ab > ba {
        ab
    } else {
        ba
    }
}

/// Symmetric matrices `(P, W)` with `P^2 = P` and `W(I - P) = I - P`.
///
/// Both matrices are symmetrized on construction, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PwPair<T: Real> {
    p: DMatrix<T>,
    w: DMatrix<T>,
}

impl<T: Real> PwPair<T> {
    /// Validates the axioms at the default tolerance.
    pub fn new(p: DMatrix<T>, w: DMatrix<T>) -> Result<Self> {
        let report = check_pw_axioms(&p, &w);
        if !report.pass {
            return Err(Error::AxiomViolation(report.summary()));
        }
        Ok(Self {
            p: linalg::symmetrize(&p),
            w: linalg::symmetrize(&w),
        })
    }

    /// Scalar pair for n = 1.
    pub fn scalar(p: T, w: T) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, p), DMatrix::from_element(1, 1, w))
    }

    /// `(I, H)`, the pair of a C^2 function with Hessian `H`.
    pub fn smooth(hessian: DMatrix<T>) -> Result<Self> {
        let n = hessian.nrows();
        Self::new(DMatrix::identity(n, n), hessian)
    }

    /// Diagonal pair; handy in tests.
    pub fn diagonal(p: &[T], w: &[T]) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(p)),
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(w)),
        )
    }

    pub(crate) fn from_trusted(p: DMatrix<T>, w: DMatrix<T>) -> Self {
        Self {
            p: linalg::symmetrize(&p),
            w: linalg::symmetrize(&w),
        }
    }

    pub fn p(&self) -> &DMatrix<T> {
        &self.p
    }

    pub fn w(&self) -> &DMatrix<T> {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// `rge(P, W)`.
    pub fn subspace(&self) -> Subspace<T> {
        subspace_from_pw(self).expect("axioms hold for a constructed pair")
    }

    pub fn axioms(&self) -> AxiomReport {
        check_pw_axioms(&self.p, &self.w)
    }

    pub fn to_f64(&self) -> PwPair<f64> {
        PwPair {
            p: self.p.map(|v| v.to_f64_lossy()),
            w: self.w.map(|v| v.to_f64_lossy()),
        }
    }

    pub fn from_f64(pair: &PwPair<f64>) -> Self {
        Self {
            p: pair.p.map(T::lit),
            w: pair.w.map(T::lit),
        }
    }
}

/// Residuals of the `(P, W)` axioms and the identities they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// `(name, residual)` in max-abs norm, already divided by `scale`.
    pub residuals: Vec<(String, f64)>,
    /// `max(1, max |entry|)` of `P` and `W`.
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> String {
        self.residuals
            .iter()
            .filter(|r| r.1 > self.tolerance)
            .map(|(name, r)| format!("{name} = {r:e}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Checks `P^2 = P`, `W(I-P) = I-P`, symmetry, `PW = WP = PWP` and
/// `W = PWP + (I - P)`, each to `1e-10` relative to the largest entry.
pub fn check_pw_axioms<T: Real>(p: &DMatrix<T>, w: &DMatrix<T>) -> AxiomReport {
    let n = p.nrows();
    let tol = T::tol(1e-10).to_f64_lossy();
    if p.ncols() != n || w.nrows() != n || w.ncols() != n {
        return AxiomReport {
            residuals: vec![("shape".into(), f64::INFINITY)],
            scale: 1.0,
            tolerance: tol,
            pass: false,
        };
    }
    let scale = linalg::max_abs(p).max(linalg::max_abs(w)).max(T::one());
    let id = DMatrix::<T>::identity(n, n);
    let q = &id - p;
    let pw = p * w;
    let wp = w * p;
    let pwp = &pw * p;
    let res = |m: DMatrix<T>| (linalg::max_abs(&m) / scale).to_f64_lossy();
    let residuals = vec![
        ("P^2 - P".to_string(), res(p * p - p)),
        ("W(I-P) - (I-P)".to_string(), res(w * &q - &q)),
        ("P - P^T".to_string(), res(p - p.transpose())),
        ("W - W^T".to_string(), res(w - w.transpose())),
        ("PW - WP".to_string(), res(&pw - &wp)),
        ("PW - PWP".to_string(), res(&pw - &pwp)),
        ("W - (PWP + I - P)".to_string(), res(w - (&pwp + &q))),
    ];
    let pass = residuals.iter().all(|r| r.1 <= tol);
    AxiomReport {
        residuals,
        scale: scale.to_f64_lossy(),
        tolerance: tol,
        pass,
    }
}

/// `rge(P, W) = {(Pp, Wp) : p in R^n}`, orthonormalized.
pub fn subspace_from_pw<T: Real>(pair: &PwPair<T>) -> Result<Subspace<T>> {
    let n = pair.n();
    let mut m = DMatrix::zeros(2 * n, n);
    m.view_mut((0, 0), (n, n)).copy_from(&pair.p);
    m.view_mut((n, 0), (n, n)).copy_from(&pair.w);
    Subspace::from_spanning(&m)
}

/// The unique `(P, W)` with `L = rge(P, W)`, at the default self-adjointness
/// tolerance `1e-10`.
pub fn pw_from_subspace<T: Real>(l: &Subspace<T>) -> Result<PwPair<T>> {
    pw_from_subspace_tol(l, T::tol(1e-10))
}

/// Like [`pw_from_subspace`] with an explicit tolerance on `d_Z(L, L*)`.
///
/// `P` projects onto the image of the x-components of `L`; on `rge P`, `W`
/// is the least-squares solution of `Q^T y = S Q^T x` over the basis columns,
/// and `W` is the identity on `ker P`.
pub fn pw_from_subspace_tol<T: Real>(l: &Subspace<T>, tol: T) -> Result<PwPair<T>> {
    let gap = dz_distance(l, &adjoint(l));
    if gap > tol {
        return Err(not_self_adjoint(l, gap));
    }
    let n = l.n();
    let x = l.basis.rows(0, n).into_owned();
    let y = l.basis.rows(n, n).into_owned();
    // the basis is orthonormal, so singular values of `x` are cosines of
    // principal angles and an absolute threshold applies
    let q = linalg::column_space_abs(&x, T::tol(PROJECTION_RANK_TOL));
    let p = &q * q.transpose();
    let qx = q.transpose() * &x;
    let qy = q.transpose() * &y;
    let s = linalg::symmetrize(&(qy * linalg::pseudo_inverse(&qx, T::tol(RANK_TOL))));
    let id = DMatrix::<T>::identity(n, n);
    let w = &q * s * q.transpose() + (&id - &p);
    let pair = PwPair::from_trusted(p, w);
    let back = subspace_from_pw(&pair)?;
    let err = dz_distance(&back, l);
    if err > tol.max(T::tol(1e-9)) {
        return Err(not_self_adjoint(l, err));
    }
    Ok(pair)
}

fn not_self_adjoint<T: Real>(l: &Subspace<T>, distance: T) -> Error {
    let b = l.basis();
    Error::NotSelfAdjoint {
        distance: distance.to_f64_lossy(),
        basis: (0..b.ncols())
            .map(|c| (0..b.nrows()).map(|r| b[(r, c)].to_f64_lossy()).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(v: &[&[f64]]) -> Subspace<f64> {
        Subspace::span(&v.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let h = Subspace::<f64>::horizontal(1).projection_matrix();
        assert_abs_diff_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), epsilon = 1e-12);
        let d = s(&[&[1.0, 1.0]]).projection_matrix();
        assert_abs_diff_eq!(d, DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]), epsilon = 1e-12);
        let v = Subspace::<f64>::vertical(1).projection_matrix();
        assert_abs_diff_eq!(v, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]), epsilon = 1e-12);
        assert!((&d * &d - &d).amax() < 1e-12);
    }

    #[test]
    fn dz_examples() {
        let h = Subspace::<f64>::horizontal(1);
        let v = Subspace::<f64>::vertical(1);
        let d = s(&[&[1.0, 1.0]]);
        assert_abs_diff_eq!(h.distance(&h), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.distance(&v), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.distance(&h), 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn adjoint_examples() {
        let g = Subspace::<f64>::graph_of(&DMatrix::from_element(1, 1, 3.0));
        assert!(g.distance(&g.adjoint()) < 1e-12);
        let v = Subspace::<f64>::vertical(1);
        assert!(v.distance(&v.adjoint()) < 1e-12);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let l = Subspace::graph_of(&b);
        let lt = Subspace::graph_of(&b.transpose());
        assert!(l.adjoint().distance(&lt) < 1e-12);
        assert!(l.distance(&l.adjoint()) > 0.1);
    }

    #[test]
    fn pw_from_subspace_examples() {
        let v = pw_from_subspace(&Subspace::<f64>::vertical(1)).unwrap();
        assert_abs_diff_eq!(v.p()[(0, 0)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.w()[(0, 0)], 1.0, epsilon = 1e-12);
        let h = pw_from_subspace(&Subspace::<f64>::horizontal(1)).unwrap();
        assert_abs_diff_eq!(h.p()[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.w()[(0, 0)], 0.0, epsilon = 1e-12);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        match pw_from_subspace(&Subspace::graph_of(&b)) {
            Err(Error::NotSelfAdjoint { distance, .. }) => assert!(distance > 0.1),
            other => panic!("expected NotSelfAdjoint, got {other:?}"),
        }
    }

    #[test]
    fn subspace_from_pw_examples() {
        let a = PwPair::scalar(1.0, 2.5).unwrap().subspace();
        assert!(a.distance(&s(&[&[1.0, 2.5]])) < 1e-12);
        let v = PwPair::scalar(0.0, 1.0).unwrap().subspace();
        assert!(v.distance(&Subspace::vertical(1)) < 1e-12);
        let o = PwPair::diagonal(&[1.0, 0.0], &[2.0, 1.0]).unwrap().subspace();
        let expected = s(&[&[1.0, 0.0, 2.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert!(o.distance(&expected) < 1e-12);
    }

    #[test]
    fn axiom_examples() {
        let r = check_pw_axioms(&DMatrix::from_element(1, 1, 0.0), &DMatrix::from_element(1, 1, 1.0));
        assert!(r.pass);
        assert_eq!(r.worst(), 0.0);
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0]));
        assert!(check_pw_axioms(&p, &w).pass);
        assert!(PwPair::scalar(1.0, 0.5).is_ok());
        let bad = check_pw_axioms(&DMatrix::from_element(1, 1, 0.5), &DMatrix::from_element(1, 1, 1.0));
        assert!(!bad.pass);
        assert!(bad.summary().contains("P^2 - P"));
        assert!(PwPair::scalar(0.5, 1.0).is_err());
    }

    #[test]
    fn rank_deficient_spanning_set_is_rejected() {
        let m = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            Subspace::<f64>::from_spanning(&m),
            Err(Error::RankDeficient { rank: 1, n: 2 })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let pair = PwPair::<f32>::diagonal(&[1.0, 0.0], &[2.0, 1.0]).unwrap();
        let l = pair.subspace();
        assert!(l.distance(&l.adjoint()) < 1e-5);
        let back = pw_from_subspace(&l).unwrap();
        assert!((back.w() - pair.w()).amax() < 1e-5);
    }
}
