//! Brute-force verifiers of the defining inequalities, independent of the
//! `(P, W)` machinery.

mod growth;
mod minorant;
mod monotone;
mod prox;
mod tilt;
mod varco;

pub use growth::{check_quadratic_growth, GrowthReport, GrowthWitness};
pub use minorant::{build_affine_minorant, check_minorant, AffineMinorant, AffinePiece, MinorantCheck};
pub use monotone::{check_monotone, check_monotone_graph, check_monotone_window, MonotonePair, MonotoneReport};
pub use prox::{estimate_prox_regularity, ProxEstimate};
pub use tilt::{tilt_probe, TiltJump, TiltParams, TiltProbe, TiltSample, JUMP_RESOLUTION, SEPARATION_CELLS, TIE_TOL};
pub use varco::{varco_empirical, VarcoBracket, VarcoEmpirical, BRACKET_WIDTH};

use crate::graph::GraphPoint;

/// Largest number of point pairs the all-pairs monotonicity test visits.
pub const MAX_PAIRS: usize = 500_000;

/// Largest number of `(graph point, test point)` tuples for the growth and
/// prox-regularity checks.
pub const MAX_TUPLES: usize = 20_000_000;

/// Relative tolerance of the oracle inequalities.
pub const ORACLE_TOL: f64 = 1e-12;

/// Indices of a deterministic subsample of `points` of at most `keep`
/// elements: every extremal point, then evenly strided ordinary points.
pub(crate) fn stratified(points: &[GraphPoint], keep: usize) -> Vec<usize> {
    if points.len() <= keep {
        return (0..points.len()).collect();
    }
    let extremal: Vec<usize> = (0..points.len()).filter(|&i| points[i].extremal).collect();
    let ordinary: Vec<usize> = (0..points.len()).filter(|&i| !points[i].extremal).collect();
    let mut out = if extremal.len() >= keep {
        strided(&extremal, keep)
    } else {
        let mut out = extremal.clone();
        out.extend(strided(&ordinary, keep - extremal.len()));
        out
    };
    out.sort_unstable();
    out
}

fn strided(idx: &[usize], keep: usize) -> Vec<usize> {
    if keep == 0 {
        return Vec::new();
    }
    if idx.len() <= keep {
        return idx.to_vec();
    }
    (0..keep).map(|k| idx[k * idx.len() / keep]).collect()
}

/// Largest `m` with `m (m - 1) / 2 <= cap`.
pub(crate) fn points_for_pairs(cap: usize) -> usize {
    let mut m = ((2.0 * cap as f64).sqrt()) as usize + 1;
    while m * (m.saturating_sub(1)) / 2 > cap {
        m -= 1;
    }
    m
}
