use nalgebra::DMatrix;
use proptest::prelude::*;
use varconv::calculus::transform_pw;
use varconv::catalog::{builtin, catalog_anchors};
use varconv::criteria::{test_pointbased, tilt_bound, varco_bound, TiltOutcome};
use varconv::graph::Mode;
use varconv::scderiv::{sc_derivative, Anchor, Provenance, PwSet};
use varconv::subspace::PwPair;

fn diagonal_pair(n: usize) -> impl Strategy<Value = PwPair<f64>> {
    (
        proptest::collection::vec(any::<bool>(), n),
        proptest::collection::vec(-4.0f64..4.0, n),
    )
        .prop_map(|(mask, w)| {
            let p: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            let w: Vec<f64> = w.iter().zip(&mask).map(|(&v, &b)| if b { v } else { 1.0 }).collect();
            PwPair::diagonal(&p, &w).unwrap()
        })
}

/// Diagonal pairs conjugated by a fixed rotation, so that `P` and `W` are
/// not diagonal.
fn rotated_set(n: usize) -> impl Strategy<Value = PwSet<f64>> {
    (proptest::collection::vec(diagonal_pair(n), 1..4), -3.0f64..3.0).prop_map(move |(pairs, angle)| {
        let mut r = DMatrix::<f64>::identity(n, n);
        if n >= 2 {
            let (c, s) = (angle.cos(), angle.sin());
            r[(0, 0)] = c;
            r[(0, 1)] = -s;
            r[(1, 0)] = s;
            r[(1, 1)] = c;
        }
        let pairs = pairs
            .into_iter()
            .map(|p| PwPair::new(&r * p.p() * r.transpose(), &r * p.w() * r.transpose()).unwrap())
            .collect();
        PwSet::new(pairs, Provenance::ClosedForm, Anchor::new(vec![0.0; n], vec![0.0; n]))
    })
}

proptest! {
    #[test]
    fn pointbased_threshold_sits_at_varco(set in rotated_set(3)) {
        let v = varco_bound(&set).unwrap().value;
        for k in -20..=20 {
            let s = k as f64 * 0.25;
            let pass = test_pointbased(&set, s).unwrap().pass;
            if s < v - 1e-9 {
                prop_assert!(pass, "s = {s} below varco {v}");
            }
            if s > v + 1e-6 {
                prop_assert!(!pass, "s = {s} above varco {v}");
            }
        }
    }

    #[test]
    fn shift_moves_varco_by_t(set in rotated_set(2), t in -2.0f64..2.0) {
        let v = varco_bound(&set).unwrap().value;
        let h = DMatrix::<f64>::identity(2, 2) * t;
        let moved = varco_bound(&transform_pw(&set, &h)).unwrap().value;
        if v.is_finite() {
            prop_assert!((moved - (v + t)).abs() < 1e-10);
        } else {
            prop_assert!(moved.is_infinite());
        }
    }

    #[test]
    fn tilt_is_reciprocal_of_varco_for_single_full_rank_pairs(w in proptest::collection::vec(0.1f64..5.0, 3)) {
        let pair = PwPair::diagonal(&[1.0, 1.0, 1.0], &w).unwrap();
        let set = PwSet::new(vec![pair], Provenance::ClosedForm, Anchor::new(vec![0.0; 3], vec![0.0; 3]));
        let v = varco_bound(&set).unwrap().value;
        let t = tilt_bound(&set).unwrap().value().unwrap();
        prop_assert!((t - 1.0 / v).abs() < 1e-10);
    }

    #[test]
    fn bounds_agree_in_single_precision(set in rotated_set(2)) {
        let v64 = varco_bound(&set).unwrap().value;
        let v32 = varco_bound(&set.to_precision::<f32>()).unwrap().value;
        if v64.is_finite() {
            prop_assert!((v32 as f64 - v64).abs() < 1e-4 * (1.0 + v64.abs()));
        } else {
            prop_assert!(v32.is_infinite());
        }
    }
}

#[test]
fn catalog_reciprocity() {
    for a in catalog_anchors() {
        let f = builtin(a.function).unwrap();
        let set = sc_derivative(&f, &a.x, &a.xstar, Mode::Attentive).unwrap();
        let v = varco_bound(&set).unwrap().value;
        if let TiltOutcome::Finite { value, .. } = tilt_bound(&set).unwrap() {
            if v > 0.0 && v.is_finite() {
                assert!((value - 1.0 / v).abs() < 1e-10, "{}", a.label);
            }
        }
    }
}

#[test]
fn orthant_bounds() {
    let f = builtin("orthant_quad(2,3)").unwrap();
    let set = sc_derivative(&f, &[0.0, 0.0], &[0.0, 0.0], Mode::Attentive).unwrap();
    assert!((varco_bound(&set).unwrap().value - 2.0).abs() < 1e-12);
    assert!((tilt_bound(&set).unwrap().value().unwrap() - 0.5).abs() < 1e-12);
}
