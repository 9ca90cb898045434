//! Point-based and neighborhood second-order tests, and the exact bounds for
//! variational convexity and tilt stability.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::graph::{sample_graph, Mode, Resolution, Window};
use crate::linalg;
use crate::scalar::Real;
use crate::scderiv::{sc_derivative, ConeDescription1D, ConePiece, PwSet};
use crate::subspace::PwPair;

/// Relative PSD tolerance: a symmetric matrix passes when its smallest
/// eigenvalue is at least `-PSD_TOL * (1 + ‖W‖)`.
pub const PSD_TOL: f64 = 1e-9;

/// `W` counts as singular when some eigenvalue has modulus at most
/// `SINGULAR_TOL * (1 + ‖W‖)`.
pub const SINGULAR_TOL: f64 = 1e-12;

/// `s` is flagged as lying at the bound when `|s - varco| <= BOUNDARY_TOL * (1 + |varco|)`.
pub const BOUNDARY_TOL: f64 = 1e-9;

const RAYLEIGH_TOL: f64 = 1e-12;

fn psd_slack<T: Real>(w: &DMatrix<T>) -> T {
    T::tol(PSD_TOL) * (T::one() + linalg::spectral_norm_sym(w))
}

fn checked<T: Real>(set: &PwSet<T>) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyPwSet);
    }
    for (k, pair) in set.pairs().iter().enumerate() {
        let report = pair.axioms();
        if !report.pass {
            return Err(Error::AxiomViolation(format!("pair {k}: {}", report.summary())));
        }
    }
    Ok(())
}

/// Smallest eigenvalue of `PWP` restricted to `rge P`; `+inf` when `P = 0`.
pub fn restricted_min_eigenvalue<T: Real>(pair: &PwPair<T>) -> T {
    let q = linalg::column_space_abs(pair.p(), T::lit(0.5));
    if q.ncols() == 0 {
        return T::infinity();
    }
    linalg::min_eigenvalue(&(q.transpose() * pair.w() * &q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarcoBound<T: Real> {
    pub value: T,
    /// Index of the pair attaining the minimum.
    pub pair_index: usize,
    pub per_pair: Vec<T>,
    /// Some pair has `P = 0` and contributes `+inf` by the `0/0 := ∞`
    /// convention.
    pub zero_over_zero: bool,
}

/// `varco = min over pairs of inf_{Pp ≠ 0} ⟨p, PWPp⟩ / ‖Pp‖²`.
pub fn varco_bound<T: Real>(set: &PwSet<T>) -> Result<VarcoBound<T>> {
    checked(set)?;
    let per_pair: Vec<T> = set.pairs().iter().map(restricted_min_eigenvalue).collect();
    let mut pair_index = 0;
    for (k, v) in per_pair.iter().enumerate() {
        if *v < per_pair[pair_index] {
            pair_index = k;
        }
    }
    Ok(VarcoBound {
        value: per_pair[pair_index],
        pair_index,
        zero_over_zero: per_pair.iter().any(|v| !v.is_finite_real()),
        per_pair,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TiltFailure {
    SingularW { min_abs_eigenvalue: f64 },
    NotPsd { min_eigenvalue: f64 },
}

impl TiltFailure {
    pub fn describe(&self) -> String {
        match self {
            TiltFailure::SingularW { min_abs_eigenvalue } => {
                format!("W is singular (smallest |eigenvalue| {min_abs_eigenvalue:e})")
            }
            TiltFailure::NotPsd { min_eigenvalue } => {
                format!("PW^-1 is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TiltOutcome<T: Real> {
    Finite {
        value: T,
        pair_index: usize,
        per_pair: Vec<T>,
    },
    NotTiltStable {
        pair_index: usize,
        reason: TiltFailure,
    },
}

impl<T: Real> TiltOutcome<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            TiltOutcome::Finite { value, .. } => Some(*value),
            TiltOutcome::NotTiltStable { .. } => None,
        }
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, TiltOutcome::Finite { .. })
    }
}

/// `sup ‖PW⁻¹‖` when every `W` is nonsingular and every `PW⁻¹` is PSD;
/// otherwise the first offending pair.
pub fn tilt_bound<T: Real>(set: &PwSet<T>) -> Result<TiltOutcome<T>> {
    checked(set)?;
    let mut per_pair = Vec::with_capacity(set.len());
    for (k, pair) in set.pairs().iter().enumerate() {
        let w = pair.w();
        let norm_w = linalg::spectral_norm_sym(w);
        let (eig, vecs) = linalg::sym_eigen(w);
        let min_abs = eig
            .iter()
            .fold(T::infinity(), |acc, v| if v.abs() < acc { v.abs() } else { acc });
        if min_abs <= T::tol(SINGULAR_TOL) * (T::one() + norm_w) {
            return Ok(TiltOutcome::NotTiltStable {
                pair_index: k,
                reason: TiltFailure::SingularW {
                    min_abs_eigenvalue: min_abs.to_f64_lossy(),
                },
            });
        }
        let inv_diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            eig.len(),
            eig.iter().map(|v| T::one() / *v),
        ));
        let w_inv = &vecs * inv_diag * vecs.transpose();
        let m = linalg::symmetrize(&(pair.p() * w_inv));
        let min = linalg::min_eigenvalue(&m);
        if min < -(T::tol(PSD_TOL) * (T::one() + linalg::spectral_norm_sym(&m))) {
            return Ok(TiltOutcome::NotTiltStable {
                pair_index: k,
                reason: TiltFailure::NotPsd {
                    min_eigenvalue: min.to_f64_lossy(),
                },
            });
        }
        per_pair.push(linalg::spectral_norm_sym(&m));
    }
    let mut pair_index = 0;
    for (k, v) in per_pair.iter().enumerate() {
        if *v > per_pair[pair_index] {
            pair_index = k;
        }
    }
    Ok(TiltOutcome::Finite {
        value: per_pair[pair_index],
        pair_index,
        per_pair,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointbasedVerdict<T: Real> {
    pub pass: bool,
    /// Smallest eigenvalue of `W - sP` for each pair.
    pub per_pair: Vec<T>,
    pub worst_pair: usize,
    pub varco: T,
    /// `s` coincides with `varco`; the verdict there says nothing about
    /// variational `s`-convexity itself.
    pub boundary: bool,
}

/// Whether `W - sP` is PSD for every pair.
pub fn test_pointbased<T: Real>(set: &PwSet<T>, s: T) -> Result<PointbasedVerdict<T>> {
    let varco = varco_bound(set)?.value;
    let mut per_pair = Vec::with_capacity(set.len());
    let mut pass = true;
    for pair in set.pairs() {
        let m = pair.w() - pair.p() * s;
        let min = linalg::min_eigenvalue(&m);
        if min < -psd_slack(pair.w()) {
            pass = false;
        }
        per_pair.push(min);
    }
    let mut worst_pair = 0;
    for (k, v) in per_pair.iter().enumerate() {
        if *v < per_pair[worst_pair] {
            worst_pair = k;
        }
    }
    let boundary = varco.is_finite_real() && (s - varco).abs() <= T::tol(BOUNDARY_TOL) * (T::one() + varco.abs());
    Ok(PointbasedVerdict {
        pass,
        per_pair,
        worst_pair,
        varco,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodWitness {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub p: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodVerdict {
    pub pass: bool,
    pub points_checked: usize,
    /// Smallest `λ_min(PWP|rge P) - s` over all points and pairs (`+inf` if
    /// every pair has `P = 0`).
    pub min_margin: f64,
    pub witness: Option<NeighborhoodWitness>,
    pub window: Window,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// `PWP - sP` PSD at every sampled point of the attentive graph in
/// `window`, with the SC derivative computed in closed form at each point.
pub fn test_neighborhood(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    s: f64,
    window: &Window,
    res: &Resolution,
) -> Result<NeighborhoodVerdict> {
    f.require_subgradient(xbar, xstar)?;
    let g = sample_graph(f, window, res, Mode::Attentive)?;
    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    for pt in &g.points {
        let set = sc_derivative(f, &pt.x, &pt.xstar, Mode::Attentive)?;
        for pair in set.pairs() {
            let margin = restricted_min_eigenvalue(pair) - s;
            let slack = psd_slack(pair.w());
            if margin < -slack && witness.is_none() {
                witness = Some(NeighborhoodWitness {
                    x: pt.x.clone(),
                    xstar: pt.xstar.clone(),
                    p: rows(pair.p()),
                    w: rows(pair.w()),
                    margin,
                });
            }
            min_margin = min_margin.min(margin);
        }
    }
    Ok(NeighborhoodVerdict {
        pass: witness.is_none(),
        points_checked: g.len(),
        min_margin,
        witness,
        window: window.clone(),
    })
}

fn directions(piece: &ConePiece) -> Vec<(f64, f64)> {
    piece.arcs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighVerdict {
    pub pass: bool,
    /// Minimum of `⟨z*, z⟩ - s‖z‖²` over unit `(z, z*)` in the graph.
    pub margin: f64,
    /// Direction angle of `(z, z*)` attaining the margin.
    pub worst_angle: f64,
}

/// Whether `⟨z*, z⟩ ≥ s‖z‖²` on `gph D*_f(∂f)(x̄, x̄*)`.
pub fn coderivative_rayleigh_1d(cone: &ConeDescription1D, s: f64) -> RayleighVerdict {
    let q = |t: f64| t.sin() * t.cos() - s * t.cos() * t.cos();
    let phi = s.atan2(1.0);
    let mut margin = f64::INFINITY;
    let mut worst_angle = 0.0;
    let mut consider = |t: f64| {
        let v = q(t);
        if v < margin {
            margin = v;
            worst_angle = t.rem_euclid(2.0 * PI);
        }
    };
    for piece in &cone.coderivative_graph {
        for (start, width) in directions(piece) {
            consider(start);
            consider(start + width);
            for k in 0..4 {
                let t = (phi + FRAC_PI_2) / 2.0 + k as f64 * FRAC_PI_2;
                let d = (t - start).rem_euclid(2.0 * PI);
                if d <= width {
                    consider(t);
                }
            }
        }
    }
    RayleighVerdict {
        pass: margin >= -RAYLEIGH_TOL,
        margin,
        worst_angle,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TiltRayleigh {
    /// `sup ‖z‖² / ⟨z*, z⟩`; `degenerate` is set when only `z = 0`
    /// directions occur, where `0/0 := 0` applies.
    Finite { value: f64, degenerate: bool },
    /// Some `(z, z*)` with `z ≠ 0` has `⟨z*, z⟩ ≤ 0`.
    NotTiltStable { angle: f64 },
}

/// `sup { ‖z‖² / ⟨z*, z⟩ : z* ∈ D*_f(∂f)(x̄, x̄*)(z) }` with `0/0 := 0`.
pub fn tilt_rayleigh_1d(cone: &ConeDescription1D) -> TiltRayleigh {
    let tol = 1e-12;
    let mut value: f64 = 0.0;
    let mut degenerate = false;
    let mut nondegenerate = false;
    for piece in &cone.coderivative_graph {
        for (start, width) in directions(piece) {
            if width >= PI - tol {
                return TiltRayleigh::NotTiltStable { angle: start };
            }
            let a = start.rem_euclid(PI);
            let a = if PI - a <= tol { 0.0 } else { a };
            let b = a + width;
            if a <= tol || b > FRAC_PI_2 + tol {
                let bad = if a <= tol {
                    start
                } else {
                    start + (FRAC_PI_2 - a).max(0.0) + tol.sqrt()
                };
                return TiltRayleigh::NotTiltStable {
                    angle: bad.rem_euclid(2.0 * PI),
                };
            }
            if (FRAC_PI_2 - a).abs() <= tol {
                degenerate = true;
            } else {
                nondegenerate = true;
                value = value.max(1.0 / a.tan());
            }
        }
    }
    TiltRayleigh::Finite {
        value,
        degenerate: degenerate && !nondegenerate,
    }
}

impl TiltRayleigh {
    pub fn value(&self) -> Option<f64> {
        match self {
            TiltRayleigh::Finite { value, .. } => Some(*value),
            TiltRayleigh::NotTiltStable { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::scderiv::{attentive_coderivative_1d, Anchor, Provenance};

    fn set(pairs: &[(f64, f64)]) -> PwSet<f64> {
        PwSet::new(
            pairs.iter().map(|&(p, w)| PwPair::scalar(p, w).unwrap()).collect(),
            Provenance::ClosedForm,
            Anchor::new(vec![0.0], vec![0.0]),
        )
    }

    #[test]
    fn varco_examples() {
        assert_eq!(varco_bound(&set(&[(1.0, 2.5)])).unwrap().value, 2.5);
        let abs = varco_bound(&set(&[(0.0, 1.0)])).unwrap();
        assert!(abs.value.is_infinite() && abs.zero_over_zero);
        assert_eq!(varco_bound(&set(&[(1.0, 0.0), (0.0, 1.0)])).unwrap().value, 0.0);
        assert!(matches!(varco_bound(&set(&[])), Err(Error::EmptyPwSet)));
    }

    #[test]
    fn tilt_examples() {
        assert_eq!(tilt_bound(&set(&[(1.0, 4.0)])).unwrap().value(), Some(0.25));
        assert!(matches!(
            tilt_bound(&set(&[(1.0, 0.0), (0.0, 1.0)])).unwrap(),
            TiltOutcome::NotTiltStable {
                reason: TiltFailure::SingularW { .. },
                ..
            }
        ));
        assert!(matches!(
            tilt_bound(&set(&[(1.0, -1.0)])).unwrap(),
            TiltOutcome::NotTiltStable {
                reason: TiltFailure::NotPsd { .. },
                ..
            }
        ));
        assert_eq!(tilt_bound(&set(&[(0.0, 1.0)])).unwrap().value(), Some(0.0));
    }

    #[test]
    fn pointbased_examples() {
        let v = test_pointbased(&set(&[(1.0, 2.0)]), 2.0).unwrap();
        assert!(v.pass && v.boundary);
        assert!(!test_pointbased(&set(&[(1.0, 0.0), (0.0, 1.0)]), 0.1).unwrap().pass);
        assert!(test_pointbased(&set(&[(1.0, 0.0), (0.0, 1.0)]), 0.0).unwrap().pass);
    }

    #[test]
    fn pointbased_in_f32() {
        let s32: PwSet<f32> = set(&[(1.0, 2.0)]).to_precision();
        assert!(test_pointbased(&s32, 1.9f32).unwrap().pass);
        assert!(!test_pointbased(&s32, 2.1f32).unwrap().pass);
        assert_eq!(tilt_bound(&s32).unwrap().value(), Some(0.5f32));
    }

    #[test]
    fn neighborhood_examples() {
        let res = Resolution::new(41, 4);
        let f2 = builtin("f2_zero").unwrap();
        let w = Window::localization(&f2, &[0.0], &[0.0], 0.25);
        assert!(test_neighborhood(&f2, &[0.0], &[0.0], 0.0, &w, &res).unwrap().pass);
        let f1 = builtin("f1_neg_quartic").unwrap();
        let w = Window::localization(&f1, &[0.0], &[0.0], 0.25);
        let v = test_neighborhood(&f1, &[0.0], &[0.0], 0.0, &w, &res).unwrap();
        assert!(!v.pass);
        let wit = v.witness.unwrap();
        assert!(wit.x[0] != 0.0 && (wit.margin + 12.0 * wit.x[0] * wit.x[0]).abs() < 1e-9);
        let abs = builtin("abs").unwrap();
        let w = Window::localization(&abs, &[0.0], &[0.0], 0.25);
        assert!(test_neighborhood(&abs, &[0.0], &[0.0], 5.0, &w, &res).unwrap().pass);
    }

    #[test]
    fn rayleigh_examples() {
        let q = attentive_coderivative_1d(&builtin("quad(2)").unwrap(), 0.0, 0.0, 0.25).unwrap();
        assert!(coderivative_rayleigh_1d(&q, 2.0).pass);
        assert!(!coderivative_rayleigh_1d(&q, 2.1).pass);
        assert!((tilt_rayleigh_1d(&q).value().unwrap() - 0.5).abs() < 1e-12);
        let abs = attentive_coderivative_1d(&builtin("abs").unwrap(), 0.0, 0.0, 0.25).unwrap();
        assert!(coderivative_rayleigh_1d(&abs, 100.0).pass);
        assert_eq!(
            tilt_rayleigh_1d(&abs),
            TiltRayleigh::Finite {
                value: 0.0,
                degenerate: true
            }
        );
        let fj = attentive_coderivative_1d(&builtin("flagship_jump").unwrap(), 0.0, 0.0, 0.25).unwrap();
        assert!(!coderivative_rayleigh_1d(&fj, 0.1).pass);
        assert!(coderivative_rayleigh_1d(&fj, 0.0).pass);
        assert!(matches!(tilt_rayleigh_1d(&fj), TiltRayleigh::NotTiltStable { .. }));
    }
}
