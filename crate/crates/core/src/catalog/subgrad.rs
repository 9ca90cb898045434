use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg;

/// One piece of an exact subgradient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SubgradientPiece {
    Point(Vec<f64>),
    /// Closed interval of R (ends may be infinite).
    Interval {
        lo: f64,
        hi: f64,
    },
    /// `base + cone(generators)`.
    Cone {
        base: Vec<f64>,
        generators: Vec<Vec<f64>>,
    },
}

impl SubgradientPiece {
    fn distance(&self, v: &[f64]) -> f64 {
        match self {
            SubgradientPiece::Point(p) => linalg::dist2(p, v),
            SubgradientPiece::Interval { lo, hi } => {
                let x = v[0];
                if x < *lo {
                    lo - x
                } else if x > *hi {
                    x - hi
                } else {
                    0.0
                }
            }
            SubgradientPiece::Cone { base, generators } => {
                let d: Vec<f64> = v.iter().zip(base).map(|(a, b)| a - b).collect();
                cone_distance(&d, generators)
            }
        }
    }

    fn translate(&self, by: &[f64]) -> SubgradientPiece {
        let add = |p: &[f64]| p.iter().zip(by).map(|(a, b)| a + b).collect::<Vec<_>>();
        match self {
            SubgradientPiece::Point(p) => SubgradientPiece::Point(add(p)),
            SubgradientPiece::Interval { lo, hi } => SubgradientPiece::Interval {
                lo: lo + by[0],
                hi: hi + by[0],
            },
            SubgradientPiece::Cone { base, generators } => SubgradientPiece::Cone {
                base: add(base),
                generators: generators.clone(),
            },
        }
    }
}

/// Finite union of points, closed intervals and translated polyhedral cones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientSet {
    dim: usize,
    pieces: Vec<SubgradientPiece>,
}

impl SubgradientSet {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            pieces: Vec::new(),
        }
    }

    pub fn point(v: Vec<f64>) -> Self {
        Self {
            dim: v.len(),
            pieces: vec![SubgradientPiece::Point(v)],
        }
    }

    pub fn from_pieces(dim: usize, pieces: Vec<SubgradientPiece>) -> Self {
        Self { dim, pieces }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[SubgradientPiece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Euclidean distance from `v`; `+inf` for the empty set.
    pub fn distance(&self, v: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.distance(v)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        v.len() == self.dim && self.distance(v) <= tol * (1.0 + linalg::norm2(v))
    }

    pub fn translate(&self, by: &[f64]) -> SubgradientSet {
        Self {
            dim: self.dim,
            pieces: self.pieces.iter().map(|p| p.translate(by)).collect(),
        }
    }
}

/// All subsets of `0..m` with at most `max_len` elements, smallest first.
pub(crate) fn subsets(m: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..(1u32 << m))
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s| s.len() <= max_len)
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn least_squares(cols: &DMatrix<f64>, target: &DVector<f64>) -> DVector<f64> {
    linalg::pseudo_inverse(cols, 1e-12) * target
}

/// Distance from `d` to `cone(generators)`.
///
/// The projection onto a polyhedral cone lies in the span of a linearly
/// independent subset of generators with nonnegative weights, so it suffices
/// to scan those subsets.
pub(crate) fn cone_distance(d: &[f64], generators: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let target = DVector::from_column_slice(d);
    let mut best = target.norm();
    for subset in subsets(generators.len(), n) {
        if subset.is_empty() {
            continue;
        }
        let cols = DMatrix::from_fn(n, subset.len(), |r, c| generators[subset[c]][r]);
        let lambda = least_squares(&cols, &target);
        if lambda.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let lambda = lambda.map(|l| l.max(0.0));
        let r = (&target - &cols * lambda).norm();
        if r < best {
            best = r;
        }
    }
    best
}

/// Whether the origin lies in the convex hull of `points`.
pub(crate) fn zero_in_convex_hull(points: &[Vec<f64>], tol: f64) -> bool {
    let Some(first) = points.first() else {
        return false;
    };
    let n = first.len();
    let mut target = DVector::zeros(n + 1);
    target[n] = 1.0;
    for subset in subsets(points.len(), n + 1) {
        if subset.is_empty() {
            continue;
        }
        let mut cols = DMatrix::zeros(n + 1, subset.len());
        for (c, &i) in subset.iter().enumerate() {
            for r in 0..n {
                cols[(r, c)] = points[i][r];
            }
            cols[(n, c)] = 1.0;
        }
        let lambda = least_squares(&cols, &target);
        if lambda.iter().any(|&l| l < -tol) {
            continue;
        }
        if (&target - &cols * &lambda).norm() <= tol {
            return true;
        }
    }
    false
}
