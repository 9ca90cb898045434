use varconv::calculus::{add_quadratic, QuadraticPerturbation};
use varconv::catalog::{builtin, catalog_anchors, FunctionSpec};
use varconv::criteria::{test_pointbased, varco_bound};
use varconv::graph::{Mode, Resolution, Window};
use varconv::oracles::{check_monotone, check_quadratic_growth, estimate_prox_regularity};
use varconv::scderiv::sc_derivative;

const EPS: f64 = 0.05;

fn finite_anchors() -> Vec<(String, FunctionSpec, Vec<f64>, Vec<f64>, f64)> {
    catalog_anchors()
        .into_iter()
        .filter_map(|a| {
            let f = builtin(a.function).unwrap();
            let set = sc_derivative(&f, &a.x, &a.xstar, Mode::Attentive).unwrap();
            let v = varco_bound(&set).unwrap().value;
            v.is_finite().then(|| (a.label.to_string(), f, a.x, a.xstar, v))
        })
        .collect()
}

fn res_for(f: &FunctionSpec) -> Resolution {
    Resolution::for_dim(if f.dim() == 1 { 81 } else { 15 }, f.dim())
}

#[test]
fn growth_monotone_and_pointbased_agree_off_the_boundary() {
    for (label, f, x, v, varco) in finite_anchors() {
        let set = sc_derivative(&f, &x, &v, Mode::Attentive).unwrap();
        let res = res_for(&f);
        let w = Window::localization(&f, &x, &v, EPS);
        for s in [varco - 0.5, varco - 0.1, varco + 0.1, varco + 0.5] {
            let pb = test_pointbased(&set, s).unwrap().pass;
            let gr = check_quadratic_growth(&f, &x, &v, s, &w, &res).unwrap().pass;
            let mo = check_monotone(&f, &x, &v, s, EPS, Mode::Attentive, &res).unwrap().pass;
            assert!(
                pb == gr && gr == mo,
                "{label} s={s}: pointbased {pb}, growth {gr}, monotone {mo}"
            );
        }
    }
}

#[test]
fn monotone_verdicts_are_shift_equivariant() {
    for (label, f, x, v, varco) in finite_anchors() {
        let res = res_for(&f);
        for t in [-1.0, 0.5] {
            let g = add_quadratic(&f, &QuadraticPerturbation::shift(&x, &[0.0; 2][..x.len()], t)).unwrap();
            for s in [varco - 0.5, varco + 0.5] {
                let a = check_monotone(&f, &x, &v, s, EPS, Mode::Attentive, &res).unwrap();
                let b = check_monotone(&g, &x, &v, s + t, EPS, Mode::Attentive, &res).unwrap();
                assert_eq!(a.pass, b.pass, "{label} t={t} s={s}");
            }
        }
    }
}

#[test]
fn growth_margins_are_reported_with_witnesses() {
    let f = builtin("f1_neg_quartic").unwrap();
    let w = Window::localization(&f, &[0.0], &[0.0], 0.25);
    let r = check_quadratic_growth(&f, &[0.0], &[0.0], 0.0, &w, &Resolution::new(41, 4)).unwrap();
    assert!(!r.pass && r.margin < 0.0);
    let wit = r.witness.unwrap();
    let d = wit.xprime[0] - wit.x[0];
    let direct = -wit.xprime[0].powi(4) + wit.x[0].powi(4) - wit.xstar[0] * d;
    assert!((direct - wit.margin).abs() < 1e-12);
}

#[test]
fn prox_parameter_of_a_concave_quadratic() {
    for a in [0.5, 1.0, 3.0] {
        let f = builtin(&format!("quad({})", -a)).unwrap();
        let w = Window::localization(&f, &[0.0], &[0.0], 0.25);
        let r = estimate_prox_regularity(&f, &[0.0], &[0.0], &w, &Resolution::new(41, 4)).unwrap();
        assert!((r.r - a).abs() < 1e-9 * (1.0 + a), "a={a}: {}", r.r);
    }
}
