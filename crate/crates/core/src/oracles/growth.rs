use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::Result;
use crate::graph::{sample_graph, x_grid, GraphPoint, Mode, Resolution, Window};
use crate::linalg::dot;
use crate::oracles::{stratified, MAX_TUPLES, ORACLE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthWitness {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub xprime: Vec<f64>,
    /// `f(x') - f(x) - ⟨x*, x' - x⟩ - (s/2)‖x' - x‖²`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub pass: bool,
    pub s: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub graph_points: usize,
    pub test_points: usize,
    pub tuples_checked: usize,
    pub subsampled: bool,
    pub witness: Option<GrowthWitness>,
    pub window: Window,
}

/// Test points of `U` with finite `f`, paired with their values.
pub(crate) fn test_points(f: &FunctionSpec, window: &Window, res: &Resolution) -> Vec<(Vec<f64>, f64)> {
    x_grid(f, window, res)
        .into_iter()
        .filter_map(|x| {
            let v = f.evaluate(&x);
            v.is_finite().then_some((x, v))
        })
        .collect()
}

/// Graph points kept so that `points x tests` stays under the tuple cap.
pub(crate) fn capped_points(points: &[GraphPoint], tests: usize) -> Vec<usize> {
    stratified(points, (MAX_TUPLES / tests.max(1)).max(1))
}

/// `f(x') >= f(x) + ⟨x*, x' - x⟩ + (s/2)‖x' - x‖²` for grid points `x'` of
/// `U` and sampled `(x, x*)` in the attentive graph over the window.
pub fn check_quadratic_growth(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    s: f64,
    window: &Window,
    res: &Resolution,
) -> Result<GrowthReport> {
    f.require_subgradient(xbar, xstar)?;
    let g = sample_graph(f, window, res, Mode::Attentive)?;
    let tests = test_points(f, window, res);
    let keep = capped_points(&g.points, tests.len());
    let scale = tests
        .iter()
        .map(|t| t.1.abs())
        .chain(keep.iter().map(|&i| g.points[i].fval.abs()))
        .fold(0.0, f64::max);
    let tolerance = ORACLE_TOL * (1.0 + scale);
    let mut margin = f64::INFINITY;
    let mut worst: Option<(f64, usize, usize)> = None;
    for &i in &keep {
        let p = &g.points[i];
        for (k, (xp, fp)) in tests.iter().enumerate() {
            let d: Vec<f64> = xp.iter().zip(&p.x).map(|(a, b)| a - b).collect();
            let m = fp - p.fval - dot(&p.xstar, &d) - 0.5 * s * dot(&d, &d);
            if m < margin {
                margin = m;
                worst = Some((m, i, k));
            }
        }
    }
    let pass = margin >= -tolerance;
    let witness = worst.map(|(m, i, k)| GrowthWitness {
        x: g.points[i].x.clone(),
        xstar: g.points[i].xstar.clone(),
        xprime: tests[k].0.clone(),
        margin: m,
    });
    Ok(GrowthReport {
        pass,
        s,
        margin,
        tolerance,
        graph_points: g.len(),
        test_points: tests.len(),
        tuples_checked: keep.len() * tests.len(),
        subsampled: keep.len() < g.len(),
        witness,
        window: window.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn reference_examples() {
        let res = Resolution::new(41, 4);
        let f2 = builtin("f2_zero").unwrap();
        let w = Window::localization(&f2, &[0.0], &[0.0], 0.25);
        let r = check_quadratic_growth(&f2, &[0.0], &[0.0], 0.0, &w, &res).unwrap();
        assert!(r.pass && r.margin == 0.0);
        let f1 = builtin("f1_neg_quartic").unwrap();
        let r = check_quadratic_growth(&f1, &[0.0], &[0.0], 0.0, &w, &res).unwrap();
        assert!(!r.pass);
        let q = builtin("quad(2)").unwrap();
        let r = check_quadratic_growth(&q, &[0.0], &[0.0], 2.0, &w, &res).unwrap();
        assert!(r.pass && r.margin.abs() < 1e-15);
    }
}
