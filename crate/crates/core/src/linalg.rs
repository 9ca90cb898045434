//! Small dense linear algebra helpers on top of `nalgebra`.
//!
//! Everything here works on matrices of at most 8x8 (subspaces of R^{2n},
//! n <= 4), so eigen-decompositions are used freely.

use nalgebra::DMatrix;

use crate::scalar::Real;

pub(crate) fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let half = T::lit(0.5);
    (m + m.transpose()) * half
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, v| {
        let a = v.abs();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// Eigenvalues (ascending) and matching eigenvectors (columns) of the
/// symmetric part of `m`.
pub(crate) fn sym_eigen<T: Real>(m: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix; `+inf` for the empty matrix.
pub(crate) fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    sym_eigen(m).0.first().copied().unwrap_or_else(T::infinity)
}

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
pub(crate) fn spectral_norm_sym<T: Real>(m: &DMatrix<T>) -> T {
    sym_eigen(m)
        .0
        .into_iter()
        .fold(T::zero(), |acc, v| if v.abs() > acc { v.abs() } else { acc })
}

/// Thin SVD `m = U diag(values) V^T` with values descending, by one-sided
/// Jacobi rotations. nalgebra's bidiagonal iteration sometimes stops on a
/// factorization that is off by 1e-9 or worse for these small matrices;
/// Jacobi is accurate to rounding. Left vectors of zero singular values are
/// zero columns.
pub(crate) struct Svd<T: Real> {
    pub values: Vec<T>,
    pub u: DMatrix<T>,
    pub v: DMatrix<T>,
}

pub(crate) fn svd<T: Real>(m: &DMatrix<T>) -> Svd<T> {
    if m.nrows() < m.ncols() {
        let t = svd(&m.transpose());
        return Svd {
            values: t.values,
            u: t.v,
            v: t.u,
        };
    }
    let n = m.ncols();
    let mut a = m.clone();
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = T::machine_eps();
    for _ in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..n).map(|c| a.column(c).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&c| norms[c]).collect();
    let u = DMatrix::from_fn(m.nrows(), n, |r, k| {
        let c = order[k];
        if norms[c] > T::zero() {
            a[(r, c)] / norms[c]
        } else {
            T::zero()
        }
    });
    let v = DMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Svd { values, u, v }
}

fn rotate<T: Real>(m: &mut DMatrix<T>, i: usize, j: usize, c: T, s: T) {
    for r in 0..m.nrows() {
        let (x, y) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * x - s * y;
        m[(r, j)] = s * x + c * y;
    }
}

/// Singular values (descending) and left singular vectors of `m`.
pub(crate) fn left_svd<T: Real>(m: &DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let s = svd(m);
    (s.values, s.u)
}

/// Orthonormal basis of the column space of `m`. Columns whose singular value
/// is below `rel_tol * sigma_max` are treated as numerically zero.
pub(crate) fn column_space<T: Real>(m: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    let (sv, u) = left_svd(m);
    let top = sv.first().copied().unwrap_or_else(T::zero);
    if top <= T::zero() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let rank = sv.iter().filter(|&&s| s > rel_tol * top).count();
    u.columns(0, rank).into_owned()
}

/// Orthonormal basis of the span of the left singular vectors whose singular
/// value exceeds `tol`.
pub(crate) fn column_space_abs<T: Real>(m: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let (sv, u) = left_svd(m);
    let rank = sv.iter().filter(|&&s| s > tol).count();
    u.columns(0, rank).into_owned()
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `basis`.
pub(crate) fn orthogonal_complement<T: Real>(basis: &DMatrix<T>) -> DMatrix<T> {
    let m = basis.nrows();
    let k = basis.ncols();
    let proj = basis * basis.transpose();
    let (_, vecs) = sym_eigen(&proj);
    // eigenvalues of a projector are 0 (complement) or 1 (range), ascending
    vecs.columns(0, m - k).into_owned()
}

/// Moore-Penrose pseudo inverse through the SVD, dropping singular values
/// below `rel_tol * sigma_max`.
pub(crate) fn pseudo_inverse<T: Real>(m: &DMatrix<T>, rel_tol: T) -> DMatrix<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = svd(m);
    let top = svd.values.first().copied().unwrap_or_else(T::zero);
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in svd.values.iter().enumerate() {
        if s > rel_tol * top && s > T::zero() {
            out += (svd.v.column(i) * svd.u.column(i).transpose()) * (T::one() / s);
        }
    }
    out
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthogonal() {
        let b = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let c = orthogonal_complement(&b);
        assert_eq!(c.ncols(), 2);
        assert!((b.transpose() * &c).amax() < 1e-14);
    }

    #[test]
    fn pseudo_inverse_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = pseudo_inverse(&m, 1e-12);
        assert!((&m * &p * &m - &m).amax() < 1e-12);
    }

    #[test]
    fn svd_recomposes_where_the_default_iteration_does_not() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                0.0904329602569439,
                0.7697475760012669,
                -3.0298593328166744e-16,
                0.3162266693132634,
                0.10895592331691124,
                8.606658648196362e-17,
                0.2424544807526282,
                -0.42921591037550516,
                6.759907552496051e-16,
            ],
        );
        let s = svd(&m);
        let back = &s.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.values.clone())) * s.v.transpose();
        assert!((back - &m).amax() < 1e-12);
        let (sv, u) = left_svd(&m);
        assert!((sv[0] - 0.7886090217051411f64.sqrt()).abs() < 1e-12);
        assert!((u.columns(0, 2).transpose() * u.columns(0, 2) - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn eigenvalues_ascending() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -1.0]);
        let (v, _) = sym_eigen(&m);
        assert_eq!(v, vec![-1.0, 3.0]);
        assert_eq!(spectral_norm_sym(&m), 3.0);
    }
}
