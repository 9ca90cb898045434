//! Human-readable summary of a report.

use std::fmt::Write;

use crate::report::{AnalysisReport, Ext, Num};

fn opt(n: Option<&Num>) -> String {
    n.map_or_else(|| "-".into(), |n| n.value.to_string())
}

fn mark(pass: Option<bool>) -> &'static str {
    match pass {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "-",
    }
}

pub fn to_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let i = &r.input;
    let _ = writeln!(out, "{} {} {}", r.tool, r.version, r.command);
    let _ = writeln!(
        out,
        "function   {} ({}): {}",
        i.function_source, i.function_kind, i.function
    );
    let coords = |v: &[Ext]| v.iter().map(Ext::to_string).collect::<Vec<_>>().join(", ");
    let _ = writeln!(
        out,
        "anchor     x = ({}), x* = ({})",
        coords(&i.anchor.value),
        coords(&i.subgradient.value)
    );
    let _ = writeln!(
        out,
        "window     |x - x̄| < {}, |x* - x̄*| < {}, f < {} ({}), resolution {} with {} anchor level(s)",
        i.window.x_radius.value,
        i.window.v_radius.value,
        i.window.rho.value,
        i.window.shape,
        i.resolution,
        i.anchor_levels
    );

    if let Some(p) = &r.pwset {
        let _ = writeln!(
            out,
            "\nSC derivative ({}, {}): {} pair(s)",
            p.mode,
            p.provenance,
            p.pairs.len()
        );
        for (k, pair) in p.pairs.iter().enumerate() {
            let rows = |m: &crate::report::Matrix| {
                m.value
                    .iter()
                    .map(|row| format!("[{}]", coords(row)))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(
                out,
                "  [{k}] P = {}  W = {}  axioms {}",
                rows(&pair.p),
                rows(&pair.w),
                mark(Some(pair.axioms_pass))
            );
        }
        if let Some(num) = &p.numeric {
            match &num.error {
                None => {
                    let _ = writeln!(
                        out,
                        "  numeric estimate: {} pair(s), d_Z-Hausdorff {}",
                        num.pairs.len(),
                        num.hausdorff.value
                    );
                }
                Some(e) => {
                    let _ = writeln!(out, "  numeric estimate failed: {e}");
                }
            }
        }
    }

    if let Some(b) = &r.bounds {
        let _ = writeln!(out);
        let flag = if b.zero_over_zero { " (0/0 := inf applied)" } else { "" };
        let _ = writeln!(out, "varco_bound = {} (pair {}){flag}", b.varco.value, b.varco_pair);
        match &b.tilt.value {
            Some(v) => {
                let _ = writeln!(out, "tilt_bound  = {} (pair {})", v.value, b.tilt.pair);
            }
            None => {
                let _ = writeln!(
                    out,
                    "tilt_bound  = not tilt-stable (pair {}: {})",
                    b.tilt.pair,
                    b.tilt.reason.as_deref().unwrap_or("")
                );
            }
        }
    }
    if let Some(c) = &r.coderivative_1d {
        let t = &c.tilt_rayleigh;
        let degenerate = if t.degenerate { " (degenerate, 0/0 := 0)" } else { "" };
        let _ = writeln!(
            out,
            "tilt_rayleigh_1d = {}{degenerate}; adjoint inclusion {}",
            t.value
                .as_ref()
                .map_or_else(|| "not tilt-stable".into(), |v| v.value.to_string()),
            mark(Some(c.adjoint_inclusion))
        );
    }

    if !r.verdicts.is_empty() {
        let _ = writeln!(
            out,
            "\n{:>10}  {:>10} {:>8} {:>12} {:>8} {:>8} {:>10} {:>8}  verdict",
            "s", "pointbased", "boundary", "neighborhood", "rayleigh", "growth", "monotone", "plain"
        );
        for v in &r.verdicts {
            let _ = writeln!(
                out,
                "{:>10}  {:>10} {:>8} {:>12} {:>8} {:>8} {:>10} {:>8}  {}",
                v.s.value.to_string(),
                mark(v.pointbased.as_ref().map(|p| p.pass)),
                v.pointbased
                    .as_ref()
                    .map_or("-", |p| if p.boundary { "yes" } else { "no" }),
                mark(v.neighborhood.as_ref().map(|p| p.pass)),
                mark(v.rayleigh.as_ref().map(|p| p.pass)),
                mark(v.growth.as_ref().map(|p| p.pass)),
                mark(v.monotone_attentive.as_ref().map(|p| p.pass)),
                mark(v.monotone_plain.as_ref().map(|p| p.pass)),
                v.verdict
            );
        }
    }

    if let Some(o) = &r.oracles {
        let _ = writeln!(out, "\noracles on {} attentive graph point(s)", o.graph_points);
        if let Some(e) = &o.varco_empirical {
            let _ = writeln!(
                out,
                "  varco_empirical  {} [{}, {}] at eps {}",
                e.kind,
                opt(e.lower.as_ref()),
                opt(e.upper.as_ref()),
                e.eps.value
            );
        }
        if let Some(p) = &o.prox {
            let _ = writeln!(out, "  prox parameter   r >= {}", p.r.value);
        }
        if let Some(t) = &o.tilt_probe {
            let _ = writeln!(
                out,
                "  tilt_probe       Lipschitz {} (+- {}); {}",
                t.lipschitz.value, t.delta_grid.value, t.status
            );
        }
        if let Some(m) = &o.minorant {
            let _ = writeln!(
                out,
                "  minorant         {} (max excess {})",
                mark(Some(m.pass)),
                m.max_excess.value
            );
        }
        if let Some(c) = &o.closedness {
            let _ = writeln!(
                out,
                "  closedness       {} ({} location(s))",
                mark(Some(c.pass)),
                c.locations_checked
            );
        }
    }

    if let Some(c) = &r.compare {
        let _ = writeln!(out, "\n{:>10}  {:>10} {:>10}", "s", "attentive", "plain");
        for (k, s) in c.s.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>10}  {:>10} {:>10}",
                s.value.to_string(),
                mark(Some(c.attentive.monotone[k].pass)),
                mark(Some(c.plain.monotone[k].pass))
            );
        }
        let _ = writeln!(
            out,
            "graph points: attentive {}, plain {}; SC pairs: attentive {}, plain {}",
            c.attentive.graph_points,
            c.plain.graph_points,
            c.attentive.pairs.len(),
            c.plain.pairs.len()
        );
    }

    let _ = writeln!(out, "\ncross-checks");
    for c in &r.cross_checks {
        let _ = writeln!(out, "  {} {}: {}", c.status, c.name, c.detail);
    }
    let _ = writeln!(
        out,
        "\n{} ({} failure(s) in {} check(s))",
        if r.summary.pass { "OK" } else { "FAILED" },
        r.summary.failures,
        r.summary.checks
    );
    out
}
