use nalgebra::DMatrix;

use crate::calculus::transform_pw;
use crate::catalog::{FunctionSpec, Piecewise};
use crate::error::Result;
use crate::graph::Mode;
use crate::scderiv::{Anchor, Provenance, PwSet};
use crate::subspace::PwPair;

/// Slopes closer than this (relative) are treated as equal.
const SLOPE_TOL: f64 = 1e-10;

/// Closed-form SC derivative at `(x̄, x̄*)`.
///
/// * smooth: `{(I, ∇²f(x̄))}`;
/// * piecewise: at an interior point `{(1, p'')}`; at a breakpoint, the pair
///   `(1, p''(b±))` of every one-sided branch whose slope tends to `x̄*`
///   (in attentive mode only branches whose values tend to `f(b)`), plus
///   the vertical `(0, 1)` when `x̄*` lies in a nondegenerate regular
///   interval;
/// * quadratic on a polyhedron: `(P_S, P_S A P_S + I - P_S)` for the
///   direction space `S` of every face through `x̄` whose normal cone
///   contains `x̄* - A x̄ - b`;
/// * shifted: the sum rule applied to the inner function.
pub fn sc_derivative(f: &FunctionSpec, xbar: &[f64], xstar: &[f64], mode: Mode) -> Result<PwSet<f64>> {
    f.require_subgradient(xbar, xstar)?;
    let pairs = pairs_at(f, xbar, xstar, mode)?;
    Ok(PwSet::new(
        pairs,
        Provenance::ClosedForm,
        Anchor::new(xbar.to_vec(), xstar.to_vec()),
    ))
}

fn pairs_at(f: &FunctionSpec, x: &[f64], xstar: &[f64], mode: Mode) -> Result<Vec<PwPair<f64>>> {
    match f {
        FunctionSpec::SmoothPoly(p) => Ok(vec![PwPair::smooth(p.hessian(x))?]),
        FunctionSpec::Piecewise1d(p) => piecewise_pairs(p, x[0], xstar[0], mode),
        FunctionSpec::QuadPolyhedron(q) => {
            let grad = q.smooth_gradient(x);
            let nu: Vec<f64> = xstar.iter().zip(&grad).map(|(a, b)| a - b).collect();
            let n = q.dim();
            let id = DMatrix::<f64>::identity(n, n);
            q.reachable_faces(x, &nu, 1e-10)
                .into_iter()
                .map(|face| {
                    let ps = face.projector;
                    let w = &ps * q.a() * &ps + (&id - &ps);
                    PwPair::new(ps, w)
                })
                .collect()
        }
        FunctionSpec::Shifted { inner, perturbation } => {
            let g = perturbation.gradient(x);
            let inner_star: Vec<f64> = xstar.iter().zip(&g).map(|(a, b)| a - b).collect();
            let inner_set = PwSet::new(
                pairs_at(inner, x, &inner_star, mode)?,
                Provenance::ClosedForm,
                Anchor::new(x.to_vec(), inner_star),
            );
            Ok(transform_pw(&inner_set, &perturbation.hessian()).pairs().to_vec())
        }
    }
}

pub(crate) fn close(a: f64, b: f64) -> bool {
    if !a.is_finite() || !b.is_finite() {
        return a == b;
    }
    (a - b).abs() <= SLOPE_TOL * (1.0 + a.abs().max(b.abs()))
}

fn piecewise_pairs(p: &Piecewise, x: f64, xstar: f64, mode: Mode) -> Result<Vec<PwPair<f64>>> {
    if !p.is_breakpoint(x) {
        let h = p.second_derivative(x).expect("interior point of a branch");
        return Ok(vec![PwPair::scalar(1.0, h)?]);
    }
    let (left, right) = p.sides(x);
    let mut pairs = Vec::new();
    for side in [left, right].into_iter().flatten() {
        let admissible = mode == Mode::Plain || side.attentive;
        if admissible && close(side.slope, xstar) {
            pairs.push(PwPair::scalar(1.0, side.curvature)?);
        }
    }
    let (lo, hi) = p.regular_interval(x);
    let in_fan = (xstar > lo || close(xstar, lo)) && (xstar < hi || close(xstar, hi));
    if lo < hi && in_fan {
        pairs.push(PwPair::scalar(0.0, 1.0)?);
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    fn scalars(set: &PwSet<f64>) -> Vec<(f64, f64)> {
        set.pairs().iter().map(|p| (p.p()[(0, 0)], p.w()[(0, 0)])).collect()
    }

    #[test]
    fn one_dimensional_examples() {
        let q = builtin("quad(2)").unwrap();
        assert_eq!(
            scalars(&sc_derivative(&q, &[0.0], &[0.0], Mode::Attentive).unwrap()),
            vec![(1.0, 2.0)]
        );
        let ind = builtin("indicator_halfline").unwrap();
        assert_eq!(
            scalars(&sc_derivative(&ind, &[0.0], &[0.0], Mode::Attentive).unwrap()),
            vec![(1.0, 0.0), (0.0, 1.0)]
        );
        let fj = builtin("flagship_jump").unwrap();
        assert_eq!(
            scalars(&sc_derivative(&fj, &[0.0], &[0.0], Mode::Attentive).unwrap()),
            vec![(1.0, 0.0), (0.0, 1.0)]
        );
        let abs = builtin("abs").unwrap();
        assert_eq!(
            scalars(&sc_derivative(&abs, &[0.0], &[0.0], Mode::Attentive).unwrap()),
            vec![(0.0, 1.0)]
        );
    }

    #[test]
    fn orthant_has_four_pairs() {
        let f = builtin("orthant_quad(2,3)").unwrap();
        let set = sc_derivative(&f, &[0.0, 0.0], &[0.0, 0.0], Mode::Attentive).unwrap();
        assert_eq!(set.len(), 4);
        let diag = |p: &DMatrix<f64>| ((p[(0, 0)] * 1e12).round() / 1e12, (p[(1, 1)] * 1e12).round() / 1e12);
        let got: Vec<_> = set.pairs().iter().map(|p| (diag(p.p()), diag(p.w()))).collect();
        for expected in [
            ((1.0, 1.0), (2.0, 3.0)),
            ((1.0, 0.0), (2.0, 1.0)),
            ((0.0, 1.0), (1.0, 3.0)),
            ((0.0, 0.0), (1.0, 1.0)),
        ] {
            assert!(got.contains(&expected), "{expected:?} missing from {got:?}");
        }
    }
}
