use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::Result;
use crate::graph::{sample_graph, Mode, Resolution, Window};
use crate::linalg::dot;
use crate::oracles::growth::{capped_points, test_points};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxEstimate {
    /// Smallest `r >= 0` with `f(x') >= f(x) + ⟨x*, x' - x⟩ - (r/2)‖x' - x‖²`
    /// on every tested tuple; a lower bound for any prox-regularity
    /// parameter valid on the window.
    pub r: f64,
    pub tuples_checked: usize,
    /// `(x, x*, x')` attaining `r`, when `r > 0`.
    pub witness: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    pub window: Window,
}

pub fn estimate_prox_regularity(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    window: &Window,
    res: &Resolution,
) -> Result<ProxEstimate> {
    f.require_subgradient(xbar, xstar)?;
    let g = sample_graph(f, window, res, Mode::Attentive)?;
    let tests = test_points(f, window, res);
    let keep = capped_points(&g.points, tests.len());
    let mut r = 0.0;
    let mut witness = None;
    for &i in &keep {
        let p = &g.points[i];
        for (xp, fp) in &tests {
            let d: Vec<f64> = xp.iter().zip(&p.x).map(|(a, b)| a - b).collect();
            let d2 = dot(&d, &d);
            if d2 == 0.0 {
                continue;
            }
            let ratio = 2.0 * (p.fval + dot(&p.xstar, &d) - fp) / d2;
            if ratio > r {
                r = ratio;
                witness = Some((p.x.clone(), p.xstar.clone(), xp.clone()));
            }
        }
    }
    Ok(ProxEstimate {
        r,
        tuples_checked: keep.len() * tests.len(),
        witness,
        window: window.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn examples() {
        let res = Resolution::new(41, 4);
        let abs = builtin("abs").unwrap();
        let w = Window::localization(&abs, &[0.0], &[0.0], 0.25);
        assert_eq!(estimate_prox_regularity(&abs, &[0.0], &[0.0], &w, &res).unwrap().r, 0.0);
        let q = builtin("quad(-1)").unwrap();
        let w = Window::localization(&q, &[0.0], &[0.0], 0.25);
        let r = estimate_prox_regularity(&q, &[0.0], &[0.0], &w, &res).unwrap().r;
        assert!((r - 1.0).abs() < 1e-9);
    }
}
