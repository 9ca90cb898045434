use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::graph::{x_grid, Mode, TruncatedGraph};
use crate::linalg::dot;
use crate::oracles::ORACLE_TOL;

/// `x' ↦ f(x) + ⟨x*, x' - x⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub fval: f64,
}

impl AffinePiece {
    pub fn eval(&self, xp: &[f64]) -> f64 {
        let d: Vec<f64> = xp.iter().zip(&self.x).map(|(a, b)| a - b).collect();
        self.fval + dot(&self.xstar, &d)
    }
}

/// Pointwise maximum of the affine supports of an attentive graph sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMinorant {
    pub pieces: Vec<AffinePiece>,
}

impl AffineMinorant {
    pub fn eval(&self, xp: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(xp)).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn build_affine_minorant(g: &TruncatedGraph) -> Result<AffineMinorant> {
    if g.mode != Mode::Attentive {
        return Err(Error::InvalidParameter(
            "the minorant is built from an attentive graph".into(),
        ));
    }
    if g.is_empty() {
        return Err(Error::InsufficientSamples { found: 0, needed: 1 });
    }
    Ok(AffineMinorant {
        pieces: g
            .points
            .iter()
            .map(|p| AffinePiece {
                x: p.x.clone(),
                xstar: p.xstar.clone(),
                fval: p.fval,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorantCheck {
    /// `ĥ <= f` on the grid of `U` and `ĥ = f` at the graph points.
    pub pass: bool,
    /// `max (ĥ - f)` over the grid of `U` where `f` is finite.
    pub max_excess: f64,
    pub excess_at: Option<Vec<f64>>,
    /// `max |ĥ(x) - f(x)|` over the graph points.
    pub max_gap_at_graph: f64,
    pub grid_points: usize,
    pub pieces: usize,
    pub tolerance: f64,
}

/// Compares `ĥ` with `f` on the window of `g`, at its resolution.
pub fn check_minorant(h: &AffineMinorant, f: &FunctionSpec, g: &TruncatedGraph) -> MinorantCheck {
    let grid: Vec<(Vec<f64>, f64)> = x_grid(f, &g.window, &g.resolution)
        .into_iter()
        .filter_map(|x| {
            let v = f.evaluate(&x);
            v.is_finite().then_some((x, v))
        })
        .collect();
    let mut max_excess = f64::NEG_INFINITY;
    let mut excess_at = None;
    let mut pass = true;
    for (x, fx) in &grid {
        let e = h.eval(x) - fx;
        if e > ORACLE_TOL * (1.0 + fx.abs()) {
            pass = false;
        }
        if e > max_excess {
            max_excess = e;
            excess_at = Some(x.clone());
        }
    }
    let mut max_gap_at_graph: f64 = 0.0;
    for p in &g.points {
        let gap = (h.eval(&p.x) - p.fval).abs();
        if gap > ORACLE_TOL * (1.0 + p.fval.abs()) {
            pass = false;
        }
        max_gap_at_graph = max_gap_at_graph.max(gap);
    }
    MinorantCheck {
        pass,
        max_excess,
        excess_at,
        max_gap_at_graph,
        grid_points: grid.len(),
        pieces: h.pieces.len(),
        tolerance: ORACLE_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::graph::{localization, Resolution};

    #[test]
    fn examples() {
        let res = Resolution::new(41, 4);
        for (name, pass) in [("f2_zero", true), ("abs", true), ("f1_neg_quartic", false)] {
            let f = builtin(name).unwrap();
            let g = localization(&f, &[0.0], &[0.0], 0.25, Mode::Attentive, &res).unwrap();
            let h = build_affine_minorant(&g).unwrap();
            let c = check_minorant(&h, &f, &g);
            assert_eq!(c.pass, pass, "{name}: {c:?}");
        }
    }
}
