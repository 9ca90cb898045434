use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::graph::{sample_graph, Mode, Resolution, TruncatedGraph, Window};
use crate::linalg::dot;
use crate::oracles::{points_for_pairs, stratified, MAX_PAIRS, ORACLE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonePair {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub y: Vec<f64>,
    pub ystar: Vec<f64>,
    /// `⟨y* - x*, y - x⟩ - s‖y - x‖²`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub s: f64,
    pub mode: Mode,
    /// Smallest margin over the tested pairs (`+inf` with fewer than two
    /// points).
    pub margin: f64,
    pub points: usize,
    pub pairs_checked: usize,
    pub subsampled: bool,
    /// The failing pair with the smallest margin, or the smallest-margin
    /// pair when all pass.
    pub worst: Option<MonotonePair>,
    pub window: Window,
}

/// Per-pair quantities `(⟨y* - x*, y - x⟩, ‖y - x‖², i, j)`.
pub(crate) fn pair_terms(g: &TruncatedGraph) -> (Vec<(f64, f64, usize, usize)>, bool) {
    let keep = stratified(&g.points, points_for_pairs(MAX_PAIRS));
    let subsampled = keep.len() < g.points.len();
    let mut out = Vec::with_capacity(keep.len() * keep.len().saturating_sub(1) / 2);
    for (a, &i) in keep.iter().enumerate() {
        let p = &g.points[i];
        for &j in &keep[a + 1..] {
            let q = &g.points[j];
            let dx: Vec<f64> = q.x.iter().zip(&p.x).map(|(u, v)| u - v).collect();
            let dv: Vec<f64> = q.xstar.iter().zip(&p.xstar).map(|(u, v)| u - v).collect();
            out.push((dot(&dv, &dx), dot(&dx, &dx), i, j));
        }
    }
    (out, subsampled)
}

pub(crate) fn pair_fails(ip: f64, d2: f64, s: f64) -> bool {
    ip - s * d2 < -ORACLE_TOL * (1.0 + ip.abs() + s.abs() * d2)
}

/// All-pairs test of `⟨y* - x*, y - x⟩ >= s‖y - x‖²` on a sampled graph.
pub fn check_monotone_graph(g: &TruncatedGraph, s: f64) -> MonotoneReport {
    let (terms, subsampled) = pair_terms(g);
    let mut margin = f64::INFINITY;
    let mut worst: Option<(f64, usize, usize)> = None;
    let mut worst_failing: Option<(f64, usize, usize)> = None;
    for &(ip, d2, i, j) in &terms {
        let m = ip - s * d2;
        if m < margin {
            margin = m;
            worst = Some((m, i, j));
        }
        if pair_fails(ip, d2, s) && worst_failing.is_none_or(|(w, _, _)| m < w) {
            worst_failing = Some((m, i, j));
        }
    }
    let pass = worst_failing.is_none();
    let pick = worst_failing.or(worst).map(|(m, i, j)| {
        let (p, q) = (&g.points[i], &g.points[j]);
        MonotonePair {
            x: p.x.clone(),
            xstar: p.xstar.clone(),
            y: q.x.clone(),
            ystar: q.xstar.clone(),
            margin: m,
        }
    });
    MonotoneReport {
        pass,
        s,
        mode: g.mode,
        margin,
        points: g.len(),
        pairs_checked: terms.len(),
        subsampled,
        worst: pick,
        window: g.window.clone(),
    }
}

/// Monotonicity test on an explicit window.
pub fn check_monotone_window(
    f: &FunctionSpec,
    s: f64,
    window: &Window,
    mode: Mode,
    res: &Resolution,
) -> Result<MonotoneReport> {
    let g = sample_graph(f, window, res, mode)?;
    Ok(check_monotone_graph(&g, s))
}

/// `s`-monotonicity of the ε-localization of `∂f` at `(x̄, x̄*)`.
pub fn check_monotone(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    s: f64,
    eps: f64,
    mode: Mode,
    res: &Resolution,
) -> Result<MonotoneReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    f.require_subgradient(xbar, xstar)?;
    check_monotone_window(f, s, &Window::localization(f, xbar, xstar, eps), mode, res)
}
