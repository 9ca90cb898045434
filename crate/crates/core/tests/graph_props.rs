use proptest::prelude::*;
use varconv::catalog::{builtin, catalog_anchors, FunctionSpec};
use varconv::graph::{closedness_probe, localization, sample_graph, Mode, Resolution, Window};

fn key(p: &varconv::graph::GraphPoint) -> Vec<u64> {
    p.x.iter().chain(&p.xstar).map(|v| v.to_bits()).collect()
}

fn anchors() -> Vec<(String, FunctionSpec, Vec<f64>, Vec<f64>)> {
    catalog_anchors()
        .into_iter()
        .map(|a| (a.label.to_string(), builtin(a.function).unwrap(), a.x, a.xstar))
        .collect()
}

fn res_for(f: &FunctionSpec) -> Resolution {
    Resolution::for_dim(if f.dim() == 1 { 41 } else { 11 }, f.dim())
}

#[test]
fn attentive_sample_is_contained_in_plain_sample() {
    for (label, f, x, v) in anchors() {
        let res = res_for(&f);
        let att = localization(&f, &x, &v, 0.25, Mode::Attentive, &res).unwrap();
        let plain = localization(&f, &x, &v, 0.25, Mode::Plain, &res).unwrap();
        let keys: std::collections::HashSet<_> = plain.points.iter().map(key).collect();
        assert!(att.points.iter().all(|p| keys.contains(&key(p))), "{label}");
        assert!(att.points.iter().all(|p| p.fval < att.window.rho), "{label}");
    }
}

#[test]
fn refined_sample_is_a_superset() {
    for (label, f, x, v) in anchors() {
        let res = res_for(&f);
        let coarse = localization(&f, &x, &v, 0.25, Mode::Attentive, &res).unwrap();
        let fine = localization(&f, &x, &v, 0.25, Mode::Attentive, &res.refined()).unwrap();
        let keys: std::collections::HashSet<_> = fine.points.iter().map(key).collect();
        let missing = coarse.points.iter().filter(|p| !keys.contains(&key(p))).count();
        assert_eq!(missing, 0, "{label}");
    }
}

#[test]
fn sampled_points_are_subgradients_inside_the_window() {
    for (label, f, x, v) in anchors() {
        let g = localization(&f, &x, &v, 0.25, Mode::Attentive, &res_for(&f)).unwrap();
        assert!(!g.is_empty(), "{label}");
        for p in &g.points {
            assert!(f.is_subgradient(&p.x, &p.xstar), "{label}: {p:?}");
            assert!(g.window.contains_x(&p.x) && g.window.contains_v(&p.xstar), "{label}");
            assert_eq!(p.fval, f.evaluate(&p.x));
        }
    }
}

#[test]
fn sampled_graphs_are_closed() {
    for (label, f, x, v) in anchors() {
        let g = localization(&f, &x, &v, 0.25, Mode::Attentive, &res_for(&f)).unwrap();
        let r = closedness_probe(&g, &f);
        assert!(r.pass, "{label}: {:?}", r.flagged);
    }
}

#[test]
fn flagship_plain_graph_sees_the_jump() {
    let f = builtin("flagship_jump").unwrap();
    let w = Window::decoupled(&[0.0], 0.5, &[0.0], 1.5, 0.25);
    let res = Resolution::new(41, 4);
    let att = sample_graph(&f, &w, &res, Mode::Attentive).unwrap();
    let plain = sample_graph(&f, &w, &res, Mode::Plain).unwrap();
    assert!(att.points.iter().all(|p| p.x[0] <= 0.0));
    assert!(plain.points.iter().any(|p| p.x[0] > 0.0 && p.xstar[0] == -1.0));
}

proptest! {
    #[test]
    fn convex_subgradient_inequality(a in 0.1f64..3.0, b in 0.1f64..3.0, x0 in -0.2f64..0.2, y0 in 0.0f64..0.3) {
        let f = builtin(&format!("orthant_quad({a},{b})")).unwrap();
        let x = [x0.max(0.0), y0];
        let sub = f.subdifferential(&x).unwrap();
        let w = Window::localization(&f, &x, &[0.0, 0.0], 0.5);
        let g = sample_graph(&f, &w, &Resolution::new(9, 2), Mode::Plain).unwrap();
        for p in &g.points {
            let d: Vec<f64> = x.iter().zip(&p.x).map(|(u, v)| u - v).collect();
            let lin = p.fval + p.xstar.iter().zip(&d).map(|(u, v)| u * v).sum::<f64>();
            prop_assert!(f.evaluate(&x) >= lin - 1e-12);
        }
        prop_assert!(!sub.is_empty());
    }

    #[test]
    fn smooth_gradients_match_finite_differences(c in proptest::collection::vec(-2.0f64..2.0, 5), x in -1.0f64..1.0) {
        let spec = format!(
            "kind = \"smooth-poly\"\ndim = 1\n{}",
            c.iter()
                .enumerate()
                .map(|(k, c)| format!("[[terms]]\ncoeff = {c}\nexponents = [{k}]\n"))
                .collect::<String>()
        );
        let f = varconv::catalog::parse_spec(&spec).unwrap();
        let sub = f.subdifferential(&[x]).unwrap();
        let h = 1e-6;
        let fd = (f.evaluate(&[x + h]) - f.evaluate(&[x - h])) / (2.0 * h);
        prop_assert!(sub.distance(&[fd]) < 1e-6 * (1.0 + fd.abs()));
        let hd = (f.evaluate(&[x + 1e-4]) - 2.0 * f.evaluate(&[x]) + f.evaluate(&[x - 1e-4])) / 1e-8;
        let hess = f.hessian(&[x]).unwrap()[(0, 0)];
        prop_assert!((hess - hd).abs() < 1e-3 * (1.0 + hd.abs()));
    }
}
