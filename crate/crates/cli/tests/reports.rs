use std::path::PathBuf;
use std::process::Command as Process;

use varconv_cli::report::{Ext, Status};
use varconv_cli::{emit_report, parse_config, run_analysis, AnalysisReport, Command, Format, Overrides};

fn analyze(text: &str, command: Command) -> AnalysisReport {
    let cfg = parse_config(text, None, &Overrides::default()).unwrap();
    run_analysis(&cfg, command, true).unwrap()
}

const F1: &str = "function = \"f1_neg_quartic\"\nanchor = [0.0]\nsubgradient = [0.0]\n";
const F2: &str = "function = \"f2_zero\"\nanchor = [0.0]\nsubgradient = [0.0]\n";
const Q2: &str = "function = \"quad(2)\"\nanchor = [0.0]\nsubgradient = [0.0]\ns = [1.5, 2.0, 2.5]\n";

fn check<'a>(r: &'a AnalysisReport, name: &str) -> &'a varconv_cli::report::CrossCheck {
    r.cross_checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn f1_is_not_variationally_convex_at_the_bound() {
    let r = analyze(F1, Command::Analyze);
    let b = r.bounds.as_ref().unwrap();
    assert_eq!(b.varco.value, Ext(0.0));
    assert_eq!(b.tilt.status, "not-tilt-stable");
    let v = &r.verdicts[0];
    let pb = v.pointbased.as_ref().unwrap();
    assert!(pb.pass && pb.boundary);
    assert!(!v.growth.as_ref().unwrap().pass);
    assert!(!v.monotone_attentive.as_ref().unwrap().pass);
    assert_eq!(v.verdict, "not variationally convex at bound");
    assert_eq!(check(&r, "equivalence s=0").status, Status::Info);
    assert!(r.summary.pass);
}

#[test]
fn f2_passes_everything() {
    let r = analyze(F2, Command::Analyze);
    let v = &r.verdicts[0];
    assert!(v.growth.as_ref().unwrap().pass && v.monotone_attentive.as_ref().unwrap().pass);
    assert_eq!(v.verdict, "variationally convex at bound");
    assert!(r.oracles.as_ref().unwrap().minorant.as_ref().unwrap().pass);
    assert!(r.cross_checks.iter().all(|c| c.status != Status::Fail));
}

#[test]
fn quadratic_bounds_and_probe() {
    let r = analyze(Q2, Command::Analyze);
    let b = r.bounds.as_ref().unwrap();
    assert_eq!(b.varco.value, Ext(2.0));
    assert!((b.tilt.value.as_ref().unwrap().value.0 - 0.5).abs() < 1e-12);
    let probe = r.oracles.as_ref().unwrap().tilt_probe.as_ref().unwrap();
    assert!(probe.single_valued && (probe.lipschitz.value.0 - 0.5).abs() < 0.025);
    let verdicts: Vec<&str> = r.verdicts.iter().map(|v| v.verdict.as_str()).collect();
    assert_eq!(
        verdicts,
        [
            "variationally s-convex",
            "variationally convex at bound",
            "not variationally s-convex"
        ]
    );
    assert_eq!(check(&r, "reciprocity").status, Status::Pass);
    assert_eq!(r.summary.failures, 0);
}

#[test]
fn every_number_names_its_op() {
    let json = analyze(Q2, Command::Analyze).to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    fn walk(v: &serde_json::Value, path: &str) {
        match v {
            serde_json::Value::Object(m) => {
                if m.get("value").is_some_and(|x| !x.is_object() && !x.is_null()) {
                    assert!(m.get("op").and_then(|o| o.as_str()).is_some(), "{path} lacks op");
                }
                for (k, x) in m {
                    if path.ends_with("timing") {
                        continue;
                    }
                    walk(x, &format!("{path}.{k}"));
                }
            }
            serde_json::Value::Array(a) => a.iter().for_each(|x| walk(x, path)),
            _ => {}
        }
    }
    walk(&v, "");
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let a = analyze(F1, Command::Analyze);
    let b = analyze(F1, Command::Analyze);
    assert_eq!(a.deterministic_json(), b.deterministic_json());
    let back = AnalysisReport::from_json(&a.to_json()).unwrap();
    assert_eq!(back.deterministic_json(), a.deterministic_json());
}

#[test]
fn text_report_lists_bounds_and_table() {
    let text = emit_report(&analyze(Q2, Command::Analyze), Format::Text);
    assert!(text.contains("varco_bound = 2"), "{text}");
    assert!(text.contains("tilt_bound  = 0.5"), "{text}");
    assert!(text.contains("pointbased") && text.contains("verdict"));
    assert!(text.trim_end().ends_with("OK (0 failure(s) in 13 check(s))"), "{text}");
}

#[test]
fn bounds_command_skips_oracles() {
    let r = analyze(Q2, Command::Bounds);
    assert!(r.oracles.is_none());
    assert!(r.verdicts.iter().all(|v| v.growth.is_none() && v.pointbased.is_some()));
}

#[test]
fn compare_separates_modes_on_the_flagship() {
    let text = "function = \"flagship_jump\"\nanchor = [0.0]\nsubgradient = [0.0]\n\n[window]\nu_radius = 0.5\nv_radius = 1.5\nrho = 0.25\n";
    let r = analyze(text, Command::Compare);
    let c = r.compare.as_ref().unwrap();
    assert!(c.attentive.monotone[0].pass);
    assert!(!c.plain.monotone[0].pass);
    assert_eq!(c.attentive_not_in_plain, 0);
    assert_eq!(check(&r, "attentive-within-plain").status, Status::Pass);
    assert!(r.summary.pass);
}

#[test]
fn invalid_anchor_is_rejected() {
    let e = parse_config(
        "function = \"f2_zero\"\nanchor = [0.0]\nsubgradient = [0.5]\n",
        None,
        &Overrides::default(),
    )
    .unwrap_err();
    assert!(e.to_string().contains("not a subgradient"), "{e}");
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("varconv-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn binary_writes_reports_and_sets_exit_codes() {
    let dir = temp_dir("bin");
    let cfg = dir.join("q2.toml");
    std::fs::write(&cfg, Q2).unwrap();
    let out = dir.join("q2.json");
    let status = Process::new(env!("CARGO_BIN_EXE_varconv"))
        .args([
            "analyze",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--s",
            "1,3",
            "--seedless",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let r = AnalysisReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.verdicts.len(), 2);
    assert!(r.input.seedless);

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "function = \"f2_zero\"\nanchor = [0.0]\nsubgradient = [0.5]\n").unwrap();
    let o = Process::new(env!("CARGO_BIN_EXE_varconv"))
        .args(["bounds", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a subgradient"));

    let o = Process::new(env!("CARGO_BIN_EXE_varconv"))
        .arg("catalog")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("flagship_jump"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn function_files_resolve_relative_to_the_config() {
    let dir = temp_dir("file");
    std::fs::write(
        dir.join("quad.toml"),
        "kind = \"smooth-poly\"\ndim = 1\n[[terms]]\ncoeff = 1.5\nexponents = [2]\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("run.toml"),
        "function = { file = \"quad.toml\" }\nanchor = [0.0]\nsubgradient = [0.0]\ns = [1.0]\n",
    )
    .unwrap();
    let cfg = varconv_cli::parse_config_file(&dir.join("run.toml"), &Overrides::default()).unwrap();
    let r = run_analysis(&cfg, Command::Bounds, false).unwrap();
    assert_eq!(r.bounds.unwrap().varco.value, Ext(3.0));
    std::fs::remove_dir_all(dir).ok();
}
