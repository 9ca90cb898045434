//! SC derivatives as finite sets of `(P, W)` pairs, and the exact attentive
//! coderivative in one dimension.

mod closed;
mod coderiv1d;
mod numeric;

pub use closed::sc_derivative;
pub use coderiv1d::{attentive_coderivative_1d, graph_rays_1d, ConeDescription1D, ConePiece};
pub use numeric::{estimate_tangent, sc_derivative_numeric, NumericParams, TangentEstimate};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::subspace::{dz_distance, hausdorff, PwPair, Subspace};

/// `d_Z` below which two pairs are considered the same.
pub const DEDUP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Numeric,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Numeric => "numeric",
        }
    }
}

/// The base point `(x̄, x̄*)` of a derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
}

impl Anchor {
    pub fn new(x: Vec<f64>, xstar: Vec<f64>) -> Self {
        Self { x, xstar }
    }
}

/// Deduplicated set of `(P, W)` pairs in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PwSet<T: Real> {
    pairs: Vec<PwPair<T>>,
    provenance: Provenance,
    anchor: Anchor,
}

impl<T: Real> PwSet<T> {
    pub fn new(pairs: Vec<PwPair<T>>, provenance: Provenance, anchor: Anchor) -> Self {
        let mut kept: Vec<(PwPair<T>, Subspace<T>)> = Vec::new();
        let tol = T::tol(DEDUP_TOL);
        for p in pairs {
            let l = p.subspace();
            if kept.iter().all(|(_, m)| dz_distance(&l, m) > tol) {
                kept.push((p, l));
            }
        }
        let mut pairs: Vec<PwPair<T>> = kept.into_iter().map(|(p, _)| p).collect();
        pairs.sort_by(|a, b| {
            let key = |p: &PwPair<T>| {
                p.p()
                    .iter()
                    .chain(p.w().iter())
                    .map(|v| v.to_f64_lossy())
                    .collect::<Vec<f64>>()
            };
            let (ka, kb) = (key(a), key(b));
            ka.iter()
                .zip(&kb)
                .map(|(x, y)| y.total_cmp(x))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self {
            pairs,
            provenance,
            anchor,
        }
    }

    pub fn pairs(&self) -> &[PwPair<T>] {
        &self.pairs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Same provenance and anchor, different pairs.
    pub fn with_pairs(&self, pairs: Vec<PwPair<T>>) -> Self {
        Self::new(pairs, self.provenance, self.anchor.clone())
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Self {
        self.anchor = anchor;
        self
    }

    /// `rge(P, W)` for every pair.
    pub fn subspaces(&self) -> Vec<Subspace<T>> {
        self.pairs.iter().map(PwPair::subspace).collect()
    }

    /// Hausdorff distance under `d_Z`.
    pub fn distance(&self, other: &Self) -> T {
        hausdorff(&self.subspaces(), &other.subspaces())
    }

    pub fn to_f64(&self) -> PwSet<f64> {
        PwSet {
            pairs: self.pairs.iter().map(PwPair::to_f64).collect(),
            provenance: self.provenance,
            anchor: self.anchor.clone(),
        }
    }

    /// Row-major decimal export: a header with provenance and anchor, then
    /// one `P` and one `W` block per pair.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# provenance {}", self.provenance.as_str());
        let _ = writeln!(out, "# anchor x = {:?} xstar = {:?}", self.anchor.x, self.anchor.xstar);
        for (k, pair) in self.pairs.iter().enumerate() {
            for (name, m) in [("P", pair.p()), ("W", pair.w())] {
                let _ = writeln!(out, "{name}[{k}]");
                for r in 0..m.nrows() {
                    let row: Vec<String> = (0..m.ncols())
                        .map(|c| format!("{:e}", m[(r, c)].to_f64_lossy()))
                        .collect();
                    let _ = writeln!(out, "{}", row.join(" "));
                }
            }
        }
        out
    }
}

impl PwSet<f64> {
    pub fn to_precision<T: Real>(&self) -> PwSet<T> {
        PwSet {
            pairs: self.pairs.iter().map(PwPair::from_f64).collect(),
            provenance: self.provenance,
            anchor: self.anchor.clone(),
        }
    }
}
