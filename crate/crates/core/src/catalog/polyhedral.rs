use nalgebra::{DMatrix, DVector};

use crate::catalog::subgrad::{cone_distance, subsets, zero_in_convex_hull, SubgradientPiece, SubgradientSet};
use crate::error::{Error, Result};
use crate::linalg;

/// Maximum number of inequalities; faces are enumerated by bitmask.
pub const MAX_CONSTRAINTS: usize = 8;

const FEASIBILITY_TOL: f64 = 1e-12;

/// `a^T x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A face of the polyhedron through a given point, identified by the set of
/// constraints that are active on its relative interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub active: Vec<usize>,
    /// Orthogonal projector onto the direction space of the face.
    pub projector: DMatrix<f64>,
}

/// `x^T A x / 2 + b^T x + c0` plus the indicator of `{x : a_i^T x <= c_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPolyhedron {
    a: DMatrix<f64>,
    b: Vec<f64>,
    c0: f64,
    constraints: Vec<HalfSpace>,
}

impl QuadPolyhedron {
    pub fn new(a: DMatrix<f64>, b: Vec<f64>, c0: f64, constraints: Vec<HalfSpace>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidSpec("A must be square".into()));
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let scale = linalg::max_abs(&a).max(1.0);
        if linalg::max_abs(&(&a - a.transpose())) > 1e-12 * scale {
            return Err(Error::InvalidSpec("A must be symmetric".into()));
        }
        if constraints.len() > MAX_CONSTRAINTS {
            return Err(Error::InvalidSpec(format!(
                "at most {MAX_CONSTRAINTS} constraints supported, got {}",
                constraints.len()
            )));
        }
        for c in &constraints {
            if c.normal.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.normal.len(),
                });
            }
            if linalg::norm2(&c.normal) == 0.0 {
                return Err(Error::InvalidSpec("zero constraint normal".into()));
            }
        }
        let all = a.iter().chain(&b).chain(std::iter::once(&c0));
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite coefficient".into()));
        }
        Ok(Self {
            a: linalg::symmetrize(&a),
            b,
            c0,
            constraints,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn constraints(&self) -> &[HalfSpace] {
        &self.constraints
    }

    fn slack(&self, i: usize, x: &[f64]) -> f64 {
        let c = &self.constraints[i];
        c.offset - linalg::dot(&c.normal, x)
    }

    fn slack_tol(&self, i: usize) -> f64 {
        FEASIBILITY_TOL * (1.0 + self.constraints[i].offset.abs())
    }

    pub fn feasible(&self, x: &[f64]) -> bool {
        (0..self.constraints.len()).all(|i| self.slack(i, x) >= -self.slack_tol(i))
    }

    pub fn active_set(&self, x: &[f64]) -> Vec<usize> {
        (0..self.constraints.len())
            .filter(|&i| self.slack(i, x).abs() <= self.slack_tol(i))
            .collect()
    }

    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        0.5 * v.dot(&(&self.a * &v)) + linalg::dot(&self.b, x) + self.c0
    }

    pub fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        let g = &self.a * DVector::from_column_slice(x);
        g.iter().zip(&self.b).map(|(a, b)| a + b).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        if self.feasible(x) {
            self.smooth_value(x)
        } else {
            f64::INFINITY
        }
    }

    /// `A x + b + N_C(x)`.
    pub fn subdifferential(&self, x: &[f64]) -> Result<SubgradientSet> {
        if !self.feasible(x) {
            return Err(Error::EmptyDomain { x: x.to_vec() });
        }
        let base = self.smooth_gradient(x);
        let generators: Vec<Vec<f64>> = self
            .active_set(x)
            .into_iter()
            .map(|i| self.constraints[i].normal.clone())
            .collect();
        let piece = if generators.is_empty() {
            SubgradientPiece::Point(base)
        } else {
            SubgradientPiece::Cone { base, generators }
        };
        Ok(SubgradientSet::from_pieces(self.dim(), vec![piece]))
    }

    /// Faces containing `x`: every `J` within the active set at `x` that is
    /// exactly the active set of some face. `J` qualifies iff some direction
    /// `d` with `a_j^T d = 0` (j in J) strictly decreases every other active
    /// constraint, i.e. iff the origin is not in the convex hull of the other
    /// active normals projected onto the null space of `a_J`.
    pub fn faces_at(&self, x: &[f64]) -> Vec<Face> {
        let n = self.dim();
        let active = self.active_set(x);
        let mut out = Vec::new();
        for pick in subsets(active.len(), active.len()) {
            let j: Vec<usize> = pick.iter().map(|&k| active[k]).collect();
            let projector = self.null_projector(&j);
            let others: Vec<Vec<f64>> = active
                .iter()
                .filter(|i| !j.contains(i))
                .map(|&i| {
                    let v = &projector * DVector::from_column_slice(&self.constraints[i].normal);
                    v.iter().copied().collect()
                })
                .collect();
            if !zero_in_convex_hull(&others, 1e-10) {
                out.push(Face { active: j, projector });
            }
        }
        debug_assert!(out.iter().all(|f| f.projector.nrows() == n));
        out
    }

    /// Faces through `x` whose normal cone `cone{a_j : j in J}` contains `nu`.
    pub fn reachable_faces(&self, x: &[f64], nu: &[f64], tol: f64) -> Vec<Face> {
        self.faces_at(x)
            .into_iter()
            .filter(|f| {
                let gens: Vec<Vec<f64>> = f.active.iter().map(|&i| self.constraints[i].normal.clone()).collect();
                cone_distance(nu, &gens) <= tol * (1.0 + linalg::norm2(nu))
            })
            .collect()
    }

    fn null_projector(&self, rows: &[usize]) -> DMatrix<f64> {
        let n = self.dim();
        if rows.is_empty() {
            return DMatrix::identity(n, n);
        }
        let m = DMatrix::from_fn(n, rows.len(), |r, c| self.constraints[rows[c]].normal[r]);
        let q = linalg::column_space(&m, 1e-12);
        DMatrix::identity(n, n) - &q * q.transpose()
    }

    /// Distance from `x` to the nearest constraint hyperplane not through `x`.
    pub fn kink_distance(&self, x: &[f64]) -> f64 {
        (0..self.constraints.len())
            .filter(|&i| self.slack(i, x).abs() > self.slack_tol(i))
            .map(|i| self.slack(i, x).abs() / linalg::norm2(&self.constraints[i].normal))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn add_quadratic(&self, c: f64, b: &[f64], h: &DMatrix<f64>) -> Result<QuadPolyhedron> {
        QuadPolyhedron::new(
            &self.a + h,
            self.b.iter().zip(b).map(|(x, y)| x + y).collect(),
            self.c0 + c,
            self.constraints.clone(),
        )
    }

    /// Vertices of the arrangement inside the polyhedron (points where `n`
    /// independent constraints are tight).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out: Vec<Vec<f64>> = Vec::new();
        for pick in subsets(self.constraints.len(), n) {
            if pick.len() != n {
                continue;
            }
            let m = DMatrix::from_fn(n, n, |r, c| self.constraints[pick[r]].normal[c]);
            let rhs = DVector::from_fn(n, |r, _| self.constraints[pick[r]].offset);
            let Some(x) = m.lu().solve(&rhs) else {
                continue;
            };
            let x: Vec<f64> = x.iter().copied().collect();
            if self.feasible(&x) && !out.iter().any(|v| linalg::dist2(v, &x) < 1e-12) {
                out.push(x);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthant() -> QuadPolyhedron {
        QuadPolyhedron::new(
            DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])),
            vec![0.0, 0.0],
            0.0,
            vec![
                HalfSpace {
                    normal: vec![-1.0, 0.0],
                    offset: 0.0,
                },
                HalfSpace {
                    normal: vec![0.0, -1.0],
                    offset: 0.0,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn orthant_vertex_has_four_faces() {
        let f = orthant();
        let faces = f.faces_at(&[0.0, 0.0]);
        assert_eq!(faces.len(), 4);
        assert_eq!(f.reachable_faces(&[0.0, 0.0], &[0.0, 0.0], 1e-12).len(), 4);
        assert_eq!(f.reachable_faces(&[0.0, 0.0], &[-1.0, 0.0], 1e-12).len(), 2);
        assert_eq!(f.reachable_faces(&[0.0, 0.0], &[-1.0, -1.0], 1e-12).len(), 1);
    }

    #[test]
    fn orthant_normal_cone() {
        let f = orthant();
        let s = f.subdifferential(&[0.0, 0.0]).unwrap();
        assert!(s.contains(&[-1.0, -3.0], 1e-12));
        assert!(!s.contains(&[0.5, 0.0], 1e-12));
        assert!(f.evaluate(&[-0.1, 0.0]).is_infinite());
        assert_eq!(f.vertices(), vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn redundant_constraint_does_not_create_a_face() {
        // x <= 0 twice: {0} alone is not the active set of any face
        let f = QuadPolyhedron::new(
            DMatrix::zeros(1, 1),
            vec![0.0],
            0.0,
            vec![
                HalfSpace {
                    normal: vec![1.0],
                    offset: 0.0,
                },
                HalfSpace {
                    normal: vec![2.0],
                    offset: 0.0,
                },
            ],
        )
        .unwrap();
        let faces = f.faces_at(&[0.0]);
        let sets: Vec<_> = faces.iter().map(|f| f.active.clone()).collect();
        assert_eq!(sets, vec![vec![], vec![0, 1]]);
    }
}
