//! SC derivatives estimated from a sampled graph: tangent fits at graphically
//! smooth sample points, followed by clustering along shrinking annuli
//! around the anchor.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphPoint, TruncatedGraph};
use crate::linalg;
use crate::scderiv::{Anchor, Provenance, PwSet};
use crate::subspace::{dz_distance, pw_from_subspace_tol, Subspace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericParams {
    /// Largest distance of a neighbour from the fitted subspace, relative to
    /// the fitting radius, for a point to count as smooth.
    pub smooth_tol: f64,
    /// `d_Z` below which tangents belong to the same cluster.
    pub cluster_tol: f64,
    /// Consecutive annuli a cluster must persist over.
    pub min_persist: usize,
    /// Fitting radius as a fraction of the distance to the anchor.
    pub fit_fraction: f64,
    /// Tangent fits per annulus.
    pub max_queries: usize,
    /// Tolerance on `d_Z(L, L*)` when converting a limit to `(P, W)`.
    pub self_adjoint_tol: f64,
    /// A qualifying cluster must reach within this many annuli of the
    /// innermost annulus holding any smooth point.
    pub floor_slack: usize,
}

impl Default for NumericParams {
    fn default() -> Self {
        Self {
            smooth_tol: 1e-7,
            cluster_tol: 1e-4,
            min_persist: 3,
            fit_fraction: 0.5,
            max_queries: 200,
            self_adjoint_tol: 1e-6,
            floor_slack: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TangentEstimate {
    Smooth {
        subspace: Subspace<f64>,
        residual: f64,
        neighbors: usize,
    },
    NotSmooth {
        residual: f64,
        neighbors: usize,
    },
}

impl TangentEstimate {
    pub fn subspace(&self) -> Option<&Subspace<f64>> {
        match self {
            TangentEstimate::Smooth { subspace, .. } => Some(subspace),
            TangentEstimate::NotSmooth { .. } => None,
        }
    }
}

/// Least-squares n-dimensional subspace through `at` fitted to the graph
/// points within `radius` (Euclidean in R^{2n}).
pub fn estimate_tangent(g: &TruncatedGraph, at: &GraphPoint, radius: f64) -> Result<TangentEstimate> {
    let joint: Vec<Vec<f64>> = g.points.iter().map(GraphPoint::joint).collect();
    fit(
        &joint,
        &at.joint(),
        radius,
        g.dim(),
        NumericParams::default().smooth_tol,
    )
}

fn fit(joint: &[Vec<f64>], center: &[f64], radius: f64, n: usize, smooth_tol: f64) -> Result<TangentEstimate> {
    let diffs: Vec<Vec<f64>> = joint
        .iter()
        .filter_map(|z| {
            let d: Vec<f64> = z.iter().zip(center).map(|(a, b)| a - b).collect();
            let r = linalg::norm2(&d);
            (r > 0.0 && r <= radius).then_some(d)
        })
        .collect();
    let needed = 2 * n + 1;
    if diffs.len() < needed {
        return Err(Error::InsufficientSamples {
            found: diffs.len(),
            needed,
        });
    }
    let m = DMatrix::from_fn(2 * n, diffs.len(), |r, c| diffs[c][r]);
    let (sv, u) = linalg::left_svd(&m);
    let neighbors = diffs.len();
    let top = sv[0];
    let basis = u.columns(0, n).into_owned();
    let residual = diffs
        .iter()
        .map(|d| {
            let v = nalgebra::DVector::from_column_slice(d);
            (&v - &basis * (basis.transpose() * &v)).norm()
        })
        .fold(0.0, f64::max)
        / radius;
    if sv.len() < n || sv[n - 1] <= 1e-6 * top || residual > smooth_tol {
        return Ok(TangentEstimate::NotSmooth { residual, neighbors });
    }
    Ok(TangentEstimate::Smooth {
        subspace: Subspace::from_spanning(&basis)?,
        residual,
        neighbors,
    })
}

struct Chain {
    rep: Subspace<f64>,
    last: usize,
    count: usize,
}

/// Limits of tangent subspaces at smooth graph points approaching
/// `(x̄, x̄*)`.
///
/// Annulus `j` holds the points at distance `[R 2^-(j+1), R 2^-j)` from the
/// anchor. Tangents fitted inside one annulus are clustered by `d_Z`;
/// clusters in consecutive annuli within `cluster_tol` of each other form a
/// chain. A chain qualifies when it spans `min_persist` annuli and reaches
/// the innermost annuli, and its innermost tangent is returned as a
/// `(P, W)` pair.
pub fn sc_derivative_numeric(
    g: &TruncatedGraph,
    xbar: &[f64],
    xstar: &[f64],
    params: &NumericParams,
) -> Result<PwSet<f64>> {
    let n = g.dim();
    let mut anchor = xbar.to_vec();
    anchor.extend_from_slice(xstar);
    let joint: Vec<Vec<f64>> = g.points.iter().map(GraphPoint::joint).collect();
    let dist: Vec<f64> = joint.iter().map(|z| linalg::dist2(z, &anchor)).collect();
    let positive = dist.iter().copied().filter(|&d| d > 0.0);
    let outer = positive.clone().fold(0.0, f64::max) * (1.0 + 1e-12);
    let inner = positive.fold(f64::INFINITY, f64::min);
    if !(outer > 0.0) {
        return Err(Error::InsufficientSamples {
            found: 0,
            needed: 2 * n + 1,
        });
    }
    let mut chains: Vec<Chain> = Vec::new();
    let mut floor = None;
    let mut band = 0usize;
    loop {
        let hi = outer * 0.5f64.powi(band as i32);
        let lo = hi / 2.0;
        if hi < inner {
            break;
        }
        let members: Vec<usize> = (0..joint.len()).filter(|&i| dist[i] >= lo && dist[i] < hi).collect();
        let stride = members.len().div_ceil(params.max_queries).max(1);
        let mut clusters: Vec<Subspace<f64>> = Vec::new();
        for &i in members.iter().step_by(stride) {
            let radius = params.fit_fraction * dist[i];
            let Ok(TangentEstimate::Smooth { subspace, .. }) = fit(&joint, &joint[i], radius, n, params.smooth_tol)
            else {
                continue;
            };
            floor = Some(band);
            if !clusters.iter().any(|c| dz_distance(c, &subspace) <= params.cluster_tol) {
                clusters.push(subspace);
            }
        }
        for c in clusters {
            let link = chains
                .iter_mut()
                .find(|ch| ch.last + 1 == band && dz_distance(&ch.rep, &c) <= params.cluster_tol);
            match link {
                Some(ch) => {
                    ch.rep = c;
                    ch.last = band;
                    ch.count += 1;
                }
                None => chains.push(Chain {
                    rep: c,
                    last: band,
                    count: 1,
                }),
            }
        }
        band += 1;
    }
    let Some(floor) = floor else {
        return Err(Error::InsufficientSamples {
            found: 0,
            needed: 2 * n + 1,
        });
    };
    let mut pairs = Vec::new();
    for ch in chains {
        if ch.count >= params.min_persist && ch.last + params.floor_slack >= floor {
            pairs.push(pw_from_subspace_tol(&ch.rep, params.self_adjoint_tol)?);
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyPwSet);
    }
    Ok(PwSet::new(
        pairs,
        Provenance::Numeric,
        Anchor::new(xbar.to_vec(), xstar.to_vec()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::graph::{localization, sample_graph, Mode, Resolution, Window};

    #[test]
    fn tangent_examples_for_abs() {
        let f = builtin("abs").unwrap();
        let w = Window::decoupled(&[0.0], 1.0, &[0.0], 1.5, 1.0);
        let g = sample_graph(&f, &w, &Resolution::new(41, 2), Mode::Attentive).unwrap();
        let at = |x: f64, v: f64| GraphPoint {
            x: vec![x],
            xstar: vec![v],
            fval: x.abs(),
            extremal: false,
        };
        let branch = estimate_tangent(&g, &at(0.5, 1.0), 0.1).unwrap();
        assert!(branch.subspace().unwrap().distance(&Subspace::horizontal(1)) < 1e-12);
        let fan = estimate_tangent(&g, &at(0.0, 0.3), 0.1).unwrap();
        assert!(fan.subspace().unwrap().distance(&Subspace::vertical(1)) < 1e-12);
        let corner = estimate_tangent(&g, &at(0.0, 1.0), 0.2).unwrap();
        assert!(matches!(corner, TangentEstimate::NotSmooth { .. }));
        assert!(matches!(
            estimate_tangent(&g, &at(0.0, 0.3), 1e-9),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn abs_at_origin_sees_only_the_fan() {
        let f = builtin("abs").unwrap();
        let g = localization(&f, &[0.0], &[0.0], 0.25, Mode::Attentive, &Resolution::default()).unwrap();
        let set = sc_derivative_numeric(&g, &[0.0], &[0.0], &NumericParams::default()).unwrap();
        eprintln!("{}", set.to_text());
        assert_eq!(set.len(), 1);
        assert!(set.pairs()[0].p()[(0, 0)].abs() < 1e-9);
    }
}
