//! Deterministic samples of truncated subgradient graphs.
//!
//! Grid coordinates are `center + k * step` with integer `k` and
//! `step = h / 2^K`, where `h` is the base spacing and `K` the number of
//! dyadic refinement levels around the center. Level `j` adds the points
//! `center + i h 2^-j`, `|i| <= ANCHOR_SPAN`. Doubling `per_axis - 1`
//! halves `h` exactly, so refined grids are exact supersets.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::catalog::{FunctionSpec, SubgradientPiece};
use crate::error::{Error, Result};
use crate::linalg;

/// Half-width, in local grid cells, of each refinement level.
pub const ANCHOR_SPAN: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Points with `f(x) >= rho` are dropped.
    Attentive,
    /// No truncation by function value.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ball,
    Box,
}

/// `U x V` together with the truncation level `rho`. Both neighborhoods are
/// open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_center: Vec<f64>,
    pub x_radius: f64,
    pub v_center: Vec<f64>,
    pub v_radius: f64,
    pub rho: f64,
    pub shape: Shape,
}

impl Window {
    /// Balls of radius `eps` around `x̄` and `x̄*` with `rho = f(x̄) + eps`.
    pub fn localization(f: &FunctionSpec, xbar: &[f64], xstar: &[f64], eps: f64) -> Self {
        Self {
            x_center: xbar.to_vec(),
            x_radius: eps,
            v_center: xstar.to_vec(),
            v_radius: eps,
            rho: f.evaluate(xbar) + eps,
            shape: Shape::Ball,
        }
    }

    /// Balls with independent radii and an explicit `rho`.
    pub fn decoupled(xbar: &[f64], x_radius: f64, xstar: &[f64], v_radius: f64, rho: f64) -> Self {
        Self {
            x_center: xbar.to_vec(),
            x_radius,
            v_center: xstar.to_vec(),
            v_radius,
            rho,
            shape: Shape::Ball,
        }
    }

    pub fn validate(&self, f: &FunctionSpec) -> Result<()> {
        let n = f.dim();
        if self.x_center.len() != n || self.v_center.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.x_center.len(),
            });
        }
        if !(self.x_radius > 0.0 && self.v_radius > 0.0) {
            return Err(Error::InvalidParameter("window radii must be positive".into()));
        }
        let fbar = f.evaluate(&self.x_center);
        if !fbar.is_finite() {
            return Err(Error::EmptyDomain {
                x: self.x_center.clone(),
            });
        }
        if !(self.rho > fbar) {
            return Err(Error::InvalidParameter(format!(
                "rho = {} must exceed f(x̄) = {fbar}",
                self.rho
            )));
        }
        Ok(())
    }

    fn inside(&self, p: &[f64], center: &[f64], radius: f64) -> bool {
        match self.shape {
            Shape::Ball => linalg::dist2(p, center) < radius,
            Shape::Box => p.iter().zip(center).all(|(a, b)| (a - b).abs() < radius),
        }
    }

    pub fn contains_x(&self, x: &[f64]) -> bool {
        self.inside(x, &self.x_center, self.x_radius)
    }

    pub fn contains_v(&self, v: &[f64]) -> bool {
        self.inside(v, &self.v_center, self.v_radius)
    }
}

/// Grid parameters: `per_axis` points across each window diameter (odd) and
/// `anchor_levels` dyadic refinements around the window centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub per_axis: usize,
    pub anchor_levels: usize,
}

pub const DEFAULT_PER_AXIS: usize = 201;

impl Resolution {
    pub fn new(per_axis: usize, anchor_levels: usize) -> Self {
        Self {
            per_axis,
            anchor_levels,
        }
    }

    /// `per_axis` with the default number of levels for dimension `n`.
    pub fn for_dim(per_axis: usize, n: usize) -> Self {
        Self::new(per_axis, if n == 1 { 16 } else { 4 })
    }

    /// Twice as fine: `2 (N - 1) + 1` points per axis, same levels.
    pub fn refined(&self) -> Self {
        Self::new(2 * (self.per_axis - 1) + 1, self.anchor_levels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_axis < 3 || self.per_axis.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "resolution must be odd and at least 3, got {}",
                self.per_axis
            )));
        }
        if self.anchor_levels > 40 {
            return Err(Error::InvalidParameter("at most 40 anchor levels".into()));
        }
        Ok(())
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::for_dim(DEFAULT_PER_AXIS, 1)
    }
}

/// One-dimensional index set of a grid of radius `radius`, as integers in
/// units of [`AxisGrid::step`].
#[derive(Debug, Clone)]
pub(crate) struct AxisGrid {
    pub step: f64,
    pub base: f64,
    pub indices: Vec<i64>,
}

impl AxisGrid {
    pub fn new(radius: f64, res: &Resolution) -> Self {
        let half = ((res.per_axis - 1) / 2) as i64;
        let base = radius / half as f64;
        let k = res.anchor_levels as u32;
        let step = base * 0.5f64.powi(k as i32);
        let scale = 1i64 << k;
        let mut indices: Vec<i64> = (-half..=half).map(|j| j * scale).collect();
        for level in 1..=k {
            let unit = 1i64 << (k - level);
            indices.extend((-ANCHOR_SPAN..=ANCHOR_SPAN).map(|j| j * unit));
        }
        indices.sort_unstable();
        indices.dedup();
        Self { step, base, indices }
    }

    pub fn value(&self, center: f64, index: i64) -> f64 {
        center + index as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub fval: f64,
    /// Vertex of its subgradient piece (a point piece, an interval endpoint
    /// or a cone apex); always kept by subsampling oracles.
    pub extremal: bool,
}

impl GraphPoint {
    /// `(x, x*)` as one vector of R^{2n}.
    pub fn joint(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.xstar);
        z
    }
}

pub(crate) fn canonical_cmp(a: &GraphPoint, b: &GraphPoint) -> Ordering {
    let key = |p: &GraphPoint| p.x.iter().chain(&p.xstar).copied().collect::<Vec<f64>>();
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(&kb) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedGraph {
    pub points: Vec<GraphPoint>,
    pub window: Window,
    pub mode: Mode,
    pub resolution: Resolution,
    /// Base spacing of the x-grid.
    pub x_spacing: f64,
    /// Base spacing of the subgradient grid.
    pub v_spacing: f64,
}

impl TruncatedGraph {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.window.x_center.len()
    }

    /// Tab-separated table with header `x1 .. xn  xstar1 .. xstarn  f`.
    pub fn to_table(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.extend((1..=n).map(|i| format!("xstar{i}")));
        header.push("f".into());
        out.push_str(&header.join("\t"));
        out.push('\n');
        for p in &self.points {
            let row: Vec<String> =
                p.x.iter()
                    .chain(&p.xstar)
                    .chain(std::iter::once(&p.fval))
                    .map(|v| format!("{v:e}"))
                    .collect();
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Distinct x-locations in canonical order.
    pub fn x_locations(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for p in &self.points {
            if out.last() != Some(&p.x) {
                out.push(p.x.clone());
            }
        }
        out
    }
}

/// Grid points of `U` (window x-ball) in canonical order, plus the special
/// points of `f` inside `U`. No domain filtering.
pub fn x_grid(f: &FunctionSpec, window: &Window, res: &Resolution) -> Vec<Vec<f64>> {
    let n = window.x_center.len();
    let axis = AxisGrid::new(window.x_radius, res);
    let mut out = Vec::new();
    let count = axis.indices.len();
    let mut idx = vec![0usize; n];
    'outer: loop {
        let x: Vec<f64> = (0..n)
            .map(|i| axis.value(window.x_center[i], axis.indices[idx[i]]))
            .collect();
        if window.contains_x(&x) {
            out.push(x);
        }
        for i in (0..n).rev() {
            idx[i] += 1;
            if idx[i] < count {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    for s in f.special_points() {
        if window.contains_x(&s) && !out.contains(&s) {
            out.push(s);
        }
    }
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    out
}

/// Samples of one subgradient piece inside the window's V.
fn sample_piece(piece: &SubgradientPiece, window: &Window, axis: &AxisGrid, out: &mut Vec<(Vec<f64>, bool)>) {
    match piece {
        SubgradientPiece::Point(p) => {
            if window.contains_v(p) {
                out.push((p.clone(), true));
            }
        }
        SubgradientPiece::Interval { lo, hi } => {
            let c = window.v_center[0];
            for &k in &axis.indices {
                let v = axis.value(c, k);
                if v >= *lo && v <= *hi && window.contains_v(&[v]) {
                    out.push((vec![v], false));
                }
            }
            for end in [*lo, *hi] {
                if end.is_finite() && window.contains_v(&[end]) {
                    out.push((vec![end], true));
                }
            }
        }
        SubgradientPiece::Cone { base, generators } => {
            let gens: Vec<Vec<f64>> = generators
                .iter()
                .map(|g| {
                    let norm = linalg::norm2(g);
                    g.iter().map(|v| v / norm).collect()
                })
                .collect();
            let reach = 2.0 * window.v_radius + linalg::dist2(base, &window.v_center);
            // the axis indices stop at the V radius; coarse multiples of the
            // base spacing continue out to `reach`
            let coarse = (axis.base / axis.step).round() as i64;
            let last = axis.indices.last().copied().unwrap_or(0);
            let lambdas: Vec<f64> = axis
                .indices
                .iter()
                .copied()
                .filter(|&k| k >= 0)
                .chain(
                    (1..)
                        .map(|j| last + j * coarse)
                        .take_while(|&k| k as f64 * axis.step < reach),
                )
                .map(|k| k as f64 * axis.step)
                .filter(|&l| l < reach)
                .collect();
            let m = gens.len();
            let mut idx = vec![0usize; m];
            'outer: loop {
                let mut v = base.clone();
                for (g, &i) in gens.iter().zip(&idx) {
                    for (vj, gj) in v.iter_mut().zip(g) {
                        *vj += lambdas[i] * gj;
                    }
                }
                if window.contains_v(&v) {
                    out.push((v, idx.iter().all(|&i| i == 0)));
                }
                for i in (0..m).rev() {
                    idx[i] += 1;
                    if idx[i] < lambdas.len() {
                        continue 'outer;
                    }
                    idx[i] = 0;
                }
                break;
            }
        }
    }
}

/// Subgradients of `f` at `x` that the window keeps, as graph points.
pub(crate) fn points_at(
    f: &FunctionSpec,
    x: &[f64],
    window: &Window,
    mode: Mode,
    v_axis: &AxisGrid,
) -> Vec<GraphPoint> {
    let fval = f.evaluate(x);
    if !fval.is_finite() || (mode == Mode::Attentive && fval >= window.rho) {
        return Vec::new();
    }
    let Ok(set) = f.subdifferential(x) else {
        return Vec::new();
    };
    let mut raw = Vec::new();
    for piece in set.pieces() {
        sample_piece(piece, window, v_axis, &mut raw);
    }
    let mut pts: Vec<GraphPoint> = raw
        .into_iter()
        .map(|(xstar, extremal)| GraphPoint {
            x: x.to_vec(),
            xstar,
            fval,
            extremal,
        })
        .collect();
    pts.sort_by(canonical_cmp);
    let mut deduped: Vec<GraphPoint> = Vec::with_capacity(pts.len());
    for p in pts {
        match deduped.last_mut() {
            Some(last) if last.xstar == p.xstar => last.extremal |= p.extremal,
            _ => deduped.push(p),
        }
    }
    deduped
}

/// Samples `gph ∂f ∩ (U x V)`, truncated at `f < rho` in attentive mode.
pub fn sample_graph(f: &FunctionSpec, window: &Window, res: &Resolution, mode: Mode) -> Result<TruncatedGraph> {
    window.validate(f)?;
    res.validate()?;
    let v_axis = AxisGrid::new(window.v_radius, res);
    let x_axis = AxisGrid::new(window.x_radius, res);
    let mut points = Vec::new();
    for x in x_grid(f, window, res) {
        points.extend(points_at(f, &x, window, mode, &v_axis));
    }
    Ok(TruncatedGraph {
        points,
        window: window.clone(),
        mode,
        resolution: *res,
        x_spacing: x_axis.base,
        v_spacing: v_axis.base,
    })
}

/// The attentive sample `gph_rho ∂f ∩ (U x V)`.
pub fn sample_truncated_graph(f: &FunctionSpec, window: &Window, res: &Resolution) -> Result<TruncatedGraph> {
    sample_graph(f, window, res, Mode::Attentive)
}

/// The ε-localization at `(x̄, x̄*)`: ε-balls and, in attentive mode, the
/// truncation `f < f(x̄) + ε`.
pub fn localization(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    eps: f64,
    mode: Mode,
    res: &Resolution,
) -> Result<TruncatedGraph> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    f.require_subgradient(xbar, xstar)?;
    sample_graph(f, &Window::localization(f, xbar, xstar, eps), res, mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosednessFlag {
    pub x: Vec<f64>,
    pub value_deviation: f64,
    pub subgradient_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosednessReport {
    pub pass: bool,
    pub locations_checked: usize,
    /// Largest `|f(x') - f(x)|` over neighbours at the finest level.
    pub max_value_deviation: f64,
    /// Largest `dist(x'*, ∂f(x))` over neighbours at the finest level.
    pub max_subgradient_deviation: f64,
    /// Locations whose deviations do not shrink under refinement (at most
    /// 20 listed).
    pub flagged: Vec<ClosednessFlag>,
    pub flagged_count: usize,
}

/// Refinement levels of the closedness probe.
pub const CLOSEDNESS_LEVELS: usize = 4;

/// Checks that graph points near each sampled location converge to graph
/// points there with converging function values.
///
/// Around every x-location `x0`, neighbours `x0 ± δ_l e_i` with
/// `δ_l = δ_0 2^-l` are sampled with the graph's own window and mode, where
/// `δ_0` stays below the distance to the nearest other kink. The deviations
/// `|f(x') - f(x0)|` and `dist(x'*, ∂f(x0))` must reach `1e-9` or shrink at
/// least like `2 δ_l / δ_0`.
pub fn closedness_probe(g: &TruncatedGraph, f: &FunctionSpec) -> ClosednessReport {
    let n = g.dim();
    let v_axis = AxisGrid::new(g.window.v_radius, &g.resolution);
    let tol = 1e-9;
    let mut report = ClosednessReport {
        pass: true,
        locations_checked: 0,
        max_value_deviation: 0.0,
        max_subgradient_deviation: 0.0,
        flagged: Vec::new(),
        flagged_count: 0,
    };
    for x0 in g.x_locations() {
        let f0 = f.evaluate(&x0);
        let Ok(sub0) = f.subdifferential(&x0) else {
            continue;
        };
        let delta0 = g.x_spacing.min(f.kink_distance(&x0) / 2.0) / 3.0;
        let mut dev = [(0.0f64, 0.0f64); CLOSEDNESS_LEVELS];
        let mut seen = [false; CLOSEDNESS_LEVELS];
        for (level, slot) in dev.iter_mut().enumerate() {
            let delta = delta0 * 0.5f64.powi(level as i32);
            for i in 0..n {
                for sign in [-1.0, 1.0] {
                    let mut x = x0.clone();
                    x[i] += sign * delta;
                    if !g.window.contains_x(&x) {
                        continue;
                    }
                    for p in points_at(f, &x, &g.window, g.mode, &v_axis) {
                        seen[level] = true;
                        slot.0 = slot.0.max((p.fval - f0).abs());
                        slot.1 = slot.1.max(sub0.distance(&p.xstar));
                    }
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            continue;
        }
        report.locations_checked += 1;
        let last = dev[CLOSEDNESS_LEVELS - 1];
        report.max_value_deviation = report.max_value_deviation.max(last.0);
        report.max_subgradient_deviation = report.max_subgradient_deviation.max(last.1);
        let shrink = 2.0 * 0.5f64.powi((CLOSEDNESS_LEVELS - 1) as i32);
        let converges = |last: f64, first: f64| last <= tol || last <= shrink * first;
        if !(converges(last.0, dev[0].0) && converges(last.1, dev[0].1)) {
            report.pass = false;
            report.flagged_count += 1;
            if report.flagged.len() < 20 {
                report.flagged.push(ClosednessFlag {
                    x: x0.clone(),
                    value_deviation: last.0,
                    subgradient_deviation: last.1,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn axis_grids_are_nested() {
        let r = Resolution::new(11, 3);
        let coarse = AxisGrid::new(0.25, &r);
        let fine = AxisGrid::new(0.25, &r.refined());
        let cv: Vec<f64> = coarse.indices.iter().map(|&k| coarse.value(0.1, k)).collect();
        let fv: Vec<f64> = fine.indices.iter().map(|&k| fine.value(0.1, k)).collect();
        assert!(cv.iter().all(|v| fv.contains(v)));
    }

    #[test]
    fn zero_function_graph_is_flat() {
        let f = builtin("f2_zero").unwrap();
        let g = localization(&f, &[0.0], &[0.0], 0.25, Mode::Attentive, &Resolution::new(21, 2)).unwrap();
        assert!(g.points.iter().all(|p| p.xstar == vec![0.0] && p.fval == 0.0));
        assert_eq!(g.len(), g.x_locations().len());
    }

    #[test]
    fn rho_must_exceed_anchor_value() {
        let f = builtin("abs").unwrap();
        let w = Window::decoupled(&[0.0], 0.5, &[0.0], 0.5, 0.0);
        assert!(matches!(w.validate(&f), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn non_subgradient_anchor_is_rejected() {
        let f = builtin("f2_zero").unwrap();
        let r = localization(&f, &[0.0], &[0.5], 0.25, Mode::Attentive, &Resolution::default());
        assert!(matches!(r, Err(Error::NotASubgradient { .. })));
    }
}
