//! The analysis pipeline behind each subcommand.

use std::collections::HashSet;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use varconv::criteria::{
    coderivative_rayleigh_1d, test_neighborhood, test_pointbased, tilt_bound, tilt_rayleigh_1d, varco_bound,
    TiltOutcome, TiltRayleigh, BOUNDARY_TOL,
};
use varconv::graph::{closedness_probe, sample_graph, ClosednessReport, GraphPoint, Mode, TruncatedGraph};
use varconv::oracles::{
    build_affine_minorant, check_minorant, check_monotone_graph, check_quadratic_growth, estimate_prox_regularity,
    tilt_probe, varco_empirical, GrowthReport, MonotoneReport, VarcoBracket, BRACKET_WIDTH,
};
use varconv::scderiv::{
    attentive_coderivative_1d, sc_derivative, sc_derivative_numeric, ConeDescription1D, ConePiece, NumericParams, PwSet,
};
use varconv::subspace::hausdorff;

use crate::config::AnalysisConfig;
use crate::error::{CliResult, Context};
use crate::report::*;

/// Largest `d_Z` between closed-form and numeric SC derivatives accepted by
/// the cross-check.
pub const NUMERIC_TOL: f64 = 1e-6;
/// Largest `d_Z(L, L*)` accepted for attentive SC subspaces.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;
/// Tolerance of the reciprocity and Rayleigh-route comparisons.
pub const BOUND_TOL: f64 = 1e-10;
/// Relative tolerance between the tilt probe and `tilt_bound`, on top of the
/// probe's own `delta_grid`.
pub const TILT_PROBE_REL_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Bounds,
    Oracle,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Bounds => "bounds",
            Command::Oracle => "oracle",
            Command::Compare => "compare",
        }
    }

    fn criteria(self) -> bool {
        matches!(self, Command::Analyze | Command::Bounds)
    }

    fn oracles(self) -> bool {
        matches!(self, Command::Analyze | Command::Oracle)
    }
}

struct Stages {
    start: Instant,
    last: Instant,
    stages: Vec<StageTime>,
}

impl Stages {
    fn new() -> Self {
        let now = Instant::now();
        Self {
            start: now,
            last: now,
            stages: Vec::new(),
        }
    }

    fn mark(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages.push(StageTime {
            stage: stage.to_string(),
            ms: Num::new((now - self.last).as_secs_f64() * 1e3, "timing"),
        });
        self.last = now;
    }

    fn finish(self) -> Timing {
        let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Timing {
            timestamp_unix,
            total_ms: Num::new(self.start.elapsed().as_secs_f64() * 1e3, "timing"),
            stages: self.stages,
        }
    }
}

fn vector_opt(v: Option<&Vec<f64>>, op: &str) -> Option<Vector> {
    v.map(|v| Vector::new(v, op))
}

fn pair_reports(set: &PwSet<f64>, op: &str) -> Vec<PairReport> {
    set.pairs()
        .iter()
        .map(|pair| {
            let axioms = pair.axioms();
            let l = pair.subspace();
            PairReport {
                p: Matrix::new(pair.p(), op),
                w: Matrix::new(pair.w(), op),
                axioms_pass: axioms.pass,
                axiom_residual: Num::new(axioms.worst(), "check_pw_axioms"),
                self_adjoint_distance: Num::new(l.distance(&l.adjoint()), "dz_distance"),
            }
        })
        .collect()
}

fn closedness_summary(r: &ClosednessReport) -> ClosednessSummary {
    ClosednessSummary {
        pass: r.pass,
        locations_checked: r.locations_checked,
        max_value_deviation: Num::new(r.max_value_deviation, "closedness_probe"),
        max_subgradient_deviation: Num::new(r.max_subgradient_deviation, "closedness_probe"),
        flagged_count: r.flagged_count,
    }
}

fn monotone_summary(r: &MonotoneReport) -> MonotoneSummary {
    let op = "check_monotone";
    MonotoneSummary {
        pass: r.pass,
        margin: Num::new(r.margin, op),
        points: r.points,
        pairs_checked: r.pairs_checked,
        subsampled: r.subsampled,
        pair_x: vector_opt(r.worst.as_ref().map(|w| &w.x), op),
        pair_xstar: vector_opt(r.worst.as_ref().map(|w| &w.xstar), op),
        pair_y: vector_opt(r.worst.as_ref().map(|w| &w.y), op),
        pair_ystar: vector_opt(r.worst.as_ref().map(|w| &w.ystar), op),
    }
}

fn growth_summary(r: &GrowthReport) -> GrowthSummary {
    let op = "check_quadratic_growth";
    GrowthSummary {
        pass: r.pass,
        margin: Num::new(r.margin, op),
        tuples_checked: r.tuples_checked,
        subsampled: r.subsampled,
        witness_x: vector_opt(r.witness.as_ref().map(|w| &w.x), op),
        witness_xstar: vector_opt(r.witness.as_ref().map(|w| &w.xstar), op),
        witness_xprime: vector_opt(r.witness.as_ref().map(|w| &w.xprime), op),
    }
}

fn piece_report(p: &ConePiece) -> PieceReport {
    let op = "attentive_coderivative_1d";
    let (kind, start, width) = match *p {
        ConePiece::Zero => ("zero", None, None),
        ConePiece::Plane => ("plane", None, None),
        ConePiece::Line { angle } => ("line", Some(angle), None),
        ConePiece::Arc { start, width } => ("arc", Some(start), Some(width)),
    };
    PieceReport {
        kind: kind.into(),
        start: start.map(|v| Num::new(v, op)),
        width: width.map(|v| Num::new(v, op)),
    }
}

fn input_echo(cfg: &AnalysisConfig, seedless: bool) -> InputEcho {
    let op = "config";
    let w = &cfg.window;
    InputEcho {
        function_source: cfg.function_source.clone(),
        function_kind: cfg.function.kind().into(),
        function: cfg.function.describe(),
        dimension: cfg.function.dim(),
        anchor: Vector::new(&cfg.anchor, op),
        subgradient: Vector::new(&cfg.subgradient, op),
        eps: Num::new(cfg.eps, op),
        resolution: cfg.resolution.per_axis,
        anchor_levels: cfg.resolution.anchor_levels,
        s: cfg.s.iter().map(|&s| Num::new(s, op)).collect(),
        window: WindowEcho {
            x_center: Vector::new(&w.x_center, op),
            x_radius: Num::new(w.x_radius, op),
            v_center: Vector::new(&w.v_center, op),
            v_radius: Num::new(w.v_radius, op),
            rho: Num::new(w.rho, op),
            shape: format!("{:?}", w.shape).to_lowercase(),
        },
        oracles: cfg.oracles.clone(),
        varco_eps: Num::new(cfg.varco_eps, op),
        varco_range: cfg.varco_range.iter().map(|&v| Num::new(v, op)).collect(),
        tilt: TiltEcho {
            gamma: Num::new(cfg.tilt.gamma, op),
            v_radius: Num::new(cfg.tilt.v_radius, op),
            tilts_per_axis: cfg.tilt.tilts_per_axis,
            x_per_axis: cfg.tilt.x_per_axis,
        },
        seedless,
    }
}

fn check(name: impl Into<String>, status: Status, detail: impl Into<String>) -> CrossCheck {
    CrossCheck {
        name: name.into(),
        status,
        detail: detail.into(),
    }
}

fn pass_fail(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

/// Whether every `rge(P, W)` of a one-dimensional set lies in the
/// coderivative graph.
pub fn adjoint_inclusion_1d(set: &PwSet<f64>, cone: &ConeDescription1D) -> bool {
    set.pairs().iter().all(|pair| {
        let v = [pair.p()[(0, 0)], pair.w()[(0, 0)]];
        cone.coderivative_contains(v, 1e-9) && cone.coderivative_contains([-v[0], -v[1]], 1e-9)
    })
}

fn point_key(p: &GraphPoint) -> Vec<u64> {
    p.x.iter().chain(&p.xstar).map(|v| v.to_bits()).collect()
}

/// Runs one subcommand on a validated config.
pub fn run_analysis(cfg: &AnalysisConfig, command: Command, seedless: bool) -> CliResult<AnalysisReport> {
    let mut clock = Stages::new();
    let f = &cfg.function;
    let (x, v) = (&cfg.anchor[..], &cfg.subgradient[..]);
    let n = f.dim();
    let mut checks = Vec::new();
    let mut report = AnalysisReport {
        tool: "varconv".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        input: input_echo(cfg, seedless),
        pwset: None,
        bounds: None,
        coderivative_1d: None,
        verdicts: Vec::new(),
        oracles: None,
        compare: None,
        cross_checks: Vec::new(),
        summary: Summary {
            pass: true,
            failures: 0,
            checks: 0,
        },
        timing: Timing {
            timestamp_unix: 0,
            total_ms: Num::new(0.0, "timing"),
            stages: Vec::new(),
        },
    };

    if command == Command::Compare {
        report.compare = Some(compare(cfg, &mut checks)?);
        clock.mark("compare");
        return Ok(finish(report, checks, clock));
    }

    let needs_graph = command.oracles() || (cfg.oracles.numeric && command.criteria());
    let graph = if needs_graph {
        Some(sample_graph(f, &cfg.window, &cfg.resolution, Mode::Attentive).context("sample_graph")?)
    } else {
        None
    };
    let plain_graph = if command.oracles() && cfg.oracles.plain {
        Some(sample_graph(f, &cfg.window, &cfg.resolution, Mode::Plain).context("sample_graph")?)
    } else {
        None
    };
    clock.mark("sample_graph");

    let mut set = None;
    let mut varco = None;
    let mut cone = None;
    if command.criteria() {
        let s = sc_derivative(f, x, v, Mode::Attentive).context("sc_derivative")?;
        let pairs = pair_reports(&s, "sc_derivative");
        let all_axioms = pairs.iter().all(|p| p.axioms_pass);
        let worst_axiom = pairs.iter().map(|p| p.axiom_residual.get()).fold(0.0, f64::max);
        checks.push(check(
            "pw-axioms",
            pass_fail(all_axioms),
            format!("{} pair(s), worst scaled residual {worst_axiom:e}", pairs.len()),
        ));
        let worst_adj = pairs.iter().map(|p| p.self_adjoint_distance.get()).fold(0.0, f64::max);
        checks.push(check(
            "self-adjoint",
            pass_fail(worst_adj <= SELF_ADJOINT_TOL),
            format!("max d_Z(L, L*) = {worst_adj:e}"),
        ));
        let mut numeric = None;
        if cfg.oracles.numeric {
            let g = graph.as_ref().expect("graph sampled for the numeric derivative");
            numeric = Some(match sc_derivative_numeric(g, x, v, &NumericParams::default()) {
                Ok(num) => {
                    let d = hausdorff(&s.subspaces(), &num.subspaces());
                    checks.push(check(
                        "numeric-sc-derivative",
                        pass_fail(d <= NUMERIC_TOL),
                        format!("d_Z-Hausdorff(closed form, numeric) = {d:e}"),
                    ));
                    NumericReport {
                        pairs: pair_reports(&num, "sc_derivative_numeric"),
                        hausdorff: Num::new(d, "hausdorff"),
                        error: None,
                    }
                }
                Err(e) => {
                    checks.push(check(
                        "numeric-sc-derivative",
                        Status::Fail,
                        format!("numeric estimate failed: {e}"),
                    ));
                    NumericReport {
                        pairs: Vec::new(),
                        hausdorff: Num::new(f64::INFINITY, "hausdorff"),
                        error: Some(e.to_string()),
                    }
                }
            });
            clock.mark("sc_derivative_numeric");
        }
        report.pwset = Some(PwSetReport {
            mode: "attentive".into(),
            provenance: s.provenance().as_str().into(),
            pairs,
            numeric,
        });

        let vb = varco_bound(&s).context("varco_bound")?;
        let tb = tilt_bound(&s).context("tilt_bound")?;
        let tilt = match &tb {
            TiltOutcome::Finite {
                value,
                pair_index,
                per_pair,
            } => TiltReport {
                status: "finite".into(),
                value: Some(Num::new(*value, "tilt_bound")),
                pair: *pair_index,
                per_pair: per_pair.iter().map(|&t| Num::new(t, "tilt_bound")).collect(),
                reason: None,
            },
            TiltOutcome::NotTiltStable { pair_index, reason } => TiltReport {
                status: "not-tilt-stable".into(),
                value: None,
                pair: *pair_index,
                per_pair: Vec::new(),
                reason: Some(reason.describe()),
            },
        };
        report.bounds = Some(BoundsReport {
            varco: Num::new(vb.value, "varco_bound"),
            varco_pair: vb.pair_index,
            varco_per_pair: vb.per_pair.iter().map(|&t| Num::new(t, "varco_bound")).collect(),
            zero_over_zero: vb.zero_over_zero,
            tilt,
        });
        match (vb.value, tb.value()) {
            (vc, Some(t)) if vc > 0.0 && vc.is_finite() => {
                let gap = (t - 1.0 / vc).abs();
                checks.push(check(
                    "reciprocity",
                    pass_fail(gap <= BOUND_TOL * (1.0 + t)),
                    format!("|tilt - 1/varco| = {gap:e}"),
                ));
            }
            _ => checks.push(check(
                "reciprocity",
                Status::Info,
                "not applicable: needs 0 < varco < inf and a tilt-stable set",
            )),
        }
        clock.mark("bounds");

        if n == 1 {
            let c = attentive_coderivative_1d(f, x[0], v[0], cfg.eps).context("attentive_coderivative_1d")?;
            let tr = tilt_rayleigh_1d(&c);
            let inclusion = adjoint_inclusion_1d(&s, &c);
            checks.push(check(
                "adjoint-inclusion",
                pass_fail(inclusion),
                "every rge(P, W) lies in the attentive coderivative graph",
            ));
            let (status, detail) = match (&tr, tb.value()) {
                (TiltRayleigh::Finite { value, .. }, Some(t)) => {
                    let gap = (value - t).abs();
                    (
                        pass_fail(gap <= BOUND_TOL * (1.0 + t)),
                        format!("|tilt_rayleigh - tilt_bound| = {gap:e}"),
                    )
                }
                (TiltRayleigh::NotTiltStable { .. }, None) => {
                    (Status::Pass, "both routes report not tilt-stable".to_string())
                }
                (TiltRayleigh::Finite { value, .. }, None) => (
                    Status::Fail,
                    format!("tilt_rayleigh = {value} but tilt_bound reports not tilt-stable"),
                ),
                (TiltRayleigh::NotTiltStable { .. }, Some(t)) => (
                    Status::Fail,
                    format!("tilt_bound = {t} but tilt_rayleigh reports not tilt-stable"),
                ),
            };
            checks.push(check("tilt-rayleigh", status, detail));
            let op = "tilt_rayleigh_1d";
            report.coderivative_1d = Some(CoderivativeReport {
                tangent_rays: c.tangent_rays.iter().map(|&a| Num::new(a, "graph_rays_1d")).collect(),
                normal_cone: c.normal_cone.iter().map(piece_report).collect(),
                coderivative_graph: c.coderivative_graph.iter().map(piece_report).collect(),
                adjoint_inclusion: inclusion,
                tilt_rayleigh: match tr {
                    TiltRayleigh::Finite { value, degenerate } => TiltRayleighReport {
                        status: "finite".into(),
                        value: Some(Num::new(value, op)),
                        degenerate,
                        angle: None,
                    },
                    TiltRayleigh::NotTiltStable { angle } => TiltRayleighReport {
                        status: "not-tilt-stable".into(),
                        value: None,
                        degenerate: false,
                        angle: Some(Num::new(angle, op)),
                    },
                },
            });
            cone = Some(c);
            clock.mark("coderivative_1d");
        }
        set = Some((s, tb));
        varco = Some(vb.value);
    }

    for &s in &cfg.s {
        let mut row = SVerdict {
            s: Num::new(s, "config"),
            pointbased: None,
            neighborhood: None,
            rayleigh: None,
            growth: None,
            monotone_attentive: None,
            monotone_plain: None,
            verdict: String::new(),
        };
        if let Some((pw, _)) = &set {
            let pb = test_pointbased(pw, s).context("test_pointbased")?;
            row.pointbased = Some(PointbasedReport {
                pass: pb.pass,
                min_eigenvalue: Num::new(pb.per_pair[pb.worst_pair], "test_pointbased"),
                worst_pair: pb.worst_pair,
                boundary: pb.boundary,
            });
            if cfg.oracles.neighborhood {
                let nb = test_neighborhood(f, x, v, s, &cfg.window, &cfg.resolution).context("test_neighborhood")?;
                let op = "test_neighborhood";
                row.neighborhood = Some(NeighborhoodReport {
                    pass: nb.pass,
                    min_margin: Num::new(nb.min_margin, op),
                    points_checked: nb.points_checked,
                    witness_x: vector_opt(nb.witness.as_ref().map(|w| &w.x), op),
                    witness_xstar: vector_opt(nb.witness.as_ref().map(|w| &w.xstar), op),
                });
            }
            if let Some(c) = &cone {
                let r = coderivative_rayleigh_1d(c, s);
                row.rayleigh = Some(RayleighReport {
                    pass: r.pass,
                    margin: Num::new(r.margin, "coderivative_rayleigh_1d"),
                });
            }
        }
        if command.oracles() {
            let g = graph.as_ref().expect("graph sampled for oracles");
            if cfg.oracles.growth {
                let r = check_quadratic_growth(f, x, v, s, &cfg.window, &cfg.resolution)
                    .context("check_quadratic_growth")?;
                row.growth = Some(growth_summary(&r));
            }
            if cfg.oracles.monotone {
                row.monotone_attentive = Some(monotone_summary(&check_monotone_graph(g, s)));
            }
            if let Some(plain) = &plain_graph {
                row.monotone_plain = Some(monotone_summary(&check_monotone_graph(plain, s)));
            }
        }
        row.verdict = verdict_for(&row, varco);
        checks.push(s_cross_check(&row));
        report.verdicts.push(row);
    }
    clock.mark("verdicts");

    if command.oracles() {
        let g = graph.as_ref().expect("graph sampled for oracles");
        let mut section = OracleSection {
            graph_points: g.len(),
            varco_empirical: None,
            prox: None,
            tilt_probe: None,
            minorant: None,
            closedness: None,
        };
        if cfg.oracles.varco_empirical {
            let e = varco_empirical(
                f,
                x,
                v,
                cfg.varco_eps,
                &cfg.resolution,
                cfg.varco_range[0],
                cfg.varco_range[1],
            )
            .context("varco_empirical")?;
            let op = "varco_empirical";
            let kind = match e.bracket {
                VarcoBracket::Bracket { .. } => "bracket",
                VarcoBracket::AtLeast { .. } => "at-least",
                VarcoBracket::Below { .. } => "below",
            };
            if let Some(vc) = varco {
                let ok = e.contains(vc, BRACKET_WIDTH);
                checks.push(check(
                    "varco-empirical",
                    pass_fail(ok),
                    format!(
                        "varco_bound = {} against {kind} [{}, {}] at eps = {}",
                        Ext(vc),
                        Ext(e.lower().unwrap_or(f64::NEG_INFINITY)),
                        Ext(e.upper().unwrap_or(f64::INFINITY)),
                        cfg.varco_eps
                    ),
                ));
            }
            section.varco_empirical = Some(VarcoEmpiricalReport {
                kind: kind.into(),
                lower: e.lower().map(|l| Num::new(l, op)),
                upper: e.upper().map(|u| Num::new(u, op)),
                eps: Num::new(cfg.varco_eps, "config"),
                iterations: e.iterations,
                pairs_checked: e.pairs_checked,
                subsampled: e.subsampled,
            });
            clock.mark("varco_empirical");
        }
        if cfg.oracles.prox {
            let p =
                estimate_prox_regularity(f, x, v, &cfg.window, &cfg.resolution).context("estimate_prox_regularity")?;
            section.prox = Some(ProxReport {
                r: Num::new(p.r, "estimate_prox_regularity"),
                tuples_checked: p.tuples_checked,
            });
            clock.mark("prox");
        }
        if cfg.oracles.tilt_probe {
            let t = tilt_probe(f, x, v, &cfg.tilt).context("tilt_probe")?;
            let op = "tilt_probe";
            if let Some((_, tb)) = &set {
                let (status, detail) = match tb.value() {
                    Some(bound) => {
                        let gap = (t.lipschitz - bound).abs();
                        let tol = TILT_PROBE_REL_TOL * bound + t.delta_grid;
                        (
                            pass_fail(t.single_valued && gap <= tol),
                            format!(
                                "probe {} (single-valued: {}) vs tilt_bound {bound}; |gap| = {gap:e}, allowed {tol:e}",
                                t.lipschitz, t.single_valued
                            ),
                        )
                    }
                    None => (
                        pass_fail(!t.single_valued),
                        format!("tilt_bound: not tilt-stable; probe: {}", t.status),
                    ),
                };
                checks.push(check("tilt-probe", status, detail));
            }
            section.tilt_probe = Some(TiltProbeReport {
                single_valued: t.single_valued,
                multivalued: t.multivalued,
                jump: t.jump.is_some(),
                lipschitz: Num::new(t.lipschitz, op),
                delta_grid: Num::new(t.delta_grid, op),
                m0_distance: Num::new(t.m0_distance, op),
                tilts: t.samples.len(),
                status: t.status.clone(),
            });
            clock.mark("tilt_probe");
        }
        if cfg.oracles.minorant && !g.is_empty() {
            let h = build_affine_minorant(g).context("build_affine_minorant")?;
            let m = check_minorant(&h, f, g);
            let op = "check_minorant";
            if let Some(vc) = varco {
                let certified = vc > BOUNDARY_TOL;
                if certified {
                    checks.push(check(
                        "minorant",
                        pass_fail(m.pass),
                        format!("varco = {} > 0; max(ĥ - f) = {:e}", Ext(vc), m.max_excess),
                    ));
                } else {
                    checks.push(check(
                        "minorant",
                        Status::Info,
                        format!(
                            "varco = {} certifies nothing at s = 0; minorant {} (max(ĥ - f) = {:e})",
                            Ext(vc),
                            verdict_word(m.pass),
                            m.max_excess
                        ),
                    ));
                }
            }
            section.minorant = Some(MinorantReport {
                pass: m.pass,
                max_excess: Num::new(m.max_excess, op),
                excess_at: vector_opt(m.excess_at.as_ref(), op),
                max_gap_at_graph: Num::new(m.max_gap_at_graph, op),
                grid_points: m.grid_points,
                pieces: m.pieces,
                tolerance: Num::new(m.tolerance, op),
            });
            clock.mark("minorant");
        }
        if cfg.oracles.closedness {
            let c = closedness_probe(g, f);
            checks.push(check(
                "closedness",
                pass_fail(c.pass),
                format!("{} location(s); {} flagged", c.locations_checked, c.flagged_count),
            ));
            section.closedness = Some(closedness_summary(&c));
            clock.mark("closedness");
        }
        report.oracles = Some(section);
    }

    Ok(finish(report, checks, clock))
}

fn finish(mut report: AnalysisReport, checks: Vec<CrossCheck>, clock: Stages) -> AnalysisReport {
    let failures = checks.iter().filter(|c| c.status == Status::Fail).count();
    report.summary = Summary {
        pass: failures == 0,
        failures,
        checks: checks.len(),
    };
    report.cross_checks = checks;
    report.timing = clock.finish();
    report
}

fn verdict_for(row: &SVerdict, varco: Option<f64>) -> String {
    let oracles: Vec<bool> = [
        row.growth.as_ref().map(|g| g.pass),
        row.monotone_attentive.as_ref().map(|m| m.pass),
    ]
    .into_iter()
    .flatten()
    .collect();
    match (&row.pointbased, varco) {
        (Some(pb), Some(_)) if pb.boundary => {
            if oracles.is_empty() {
                "at bound: undetermined by point-based criteria".into()
            } else if oracles.iter().all(|&p| p) {
                "variationally convex at bound".into()
            } else {
                "not variationally convex at bound".into()
            }
        }
        (Some(pb), _) => {
            if pb.pass {
                "variationally s-convex".into()
            } else {
                "not variationally s-convex".into()
            }
        }
        (None, _) => {
            if oracles.iter().all(|&p| p) {
                "s-monotone and s-growth on the tested window".into()
            } else {
                "not s-monotone on the tested window".into()
            }
        }
    }
}

/// Pass iff all verdicts at one `s` agree; at the exact bound the
/// comparison is informational only.
fn s_cross_check(row: &SVerdict) -> CrossCheck {
    let s = row.s.get();
    let mut verdicts: Vec<(&str, bool)> = Vec::new();
    if let Some(p) = &row.pointbased {
        verdicts.push(("pointbased", p.pass));
    }
    if let Some(p) = &row.neighborhood {
        verdicts.push(("neighborhood", p.pass));
    }
    if let Some(p) = &row.rayleigh {
        verdicts.push(("rayleigh", p.pass));
    }
    if let Some(p) = &row.growth {
        verdicts.push(("growth", p.pass));
    }
    if let Some(p) = &row.monotone_attentive {
        verdicts.push(("monotone", p.pass));
    }
    let detail = verdicts
        .iter()
        .map(|(name, p)| format!("{name} {}", verdict_word(*p)))
        .collect::<Vec<_>>()
        .join(", ");
    let name = format!("equivalence s={}", Ext(s));
    let agree = verdicts.windows(2).all(|w| w[0].1 == w[1].1);
    if row.pointbased.as_ref().is_some_and(|p| p.boundary) {
        check(name, Status::Info, format!("s at the exact bound: {detail}"))
    } else {
        check(name, pass_fail(agree), detail)
    }
}

fn compare(cfg: &AnalysisConfig, checks: &mut Vec<CrossCheck>) -> CliResult<CompareSection> {
    let f = &cfg.function;
    let mut modes = Vec::new();
    let mut graphs: Vec<TruncatedGraph> = Vec::new();
    for mode in [Mode::Attentive, Mode::Plain] {
        let g = sample_graph(f, &cfg.window, &cfg.resolution, mode).context("sample_graph")?;
        let set = sc_derivative(f, &cfg.anchor, &cfg.subgradient, mode).context("sc_derivative")?;
        let label = match mode {
            Mode::Attentive => "attentive",
            Mode::Plain => "plain",
        };
        let monotone: Vec<MonotoneSummary> = cfg
            .s
            .iter()
            .map(|&s| monotone_summary(&check_monotone_graph(&g, s)))
            .collect();
        for (s, m) in cfg.s.iter().zip(&monotone) {
            checks.push(check(
                format!("{label} monotone s={}", Ext(*s)),
                Status::Info,
                format!("{} (margin {:e})", verdict_word(m.pass), m.margin.get()),
            ));
        }
        let closedness = cfg
            .oracles
            .closedness
            .then(|| closedness_summary(&closedness_probe(&g, f)));
        modes.push(ModeReport {
            mode: label.into(),
            graph_points: g.len(),
            pairs: pair_reports(&set, "sc_derivative"),
            monotone,
            closedness,
        });
        graphs.push(g);
    }
    let plain_keys: HashSet<Vec<u64>> = graphs[1].points.iter().map(point_key).collect();
    let missing = graphs[0]
        .points
        .iter()
        .filter(|p| !plain_keys.contains(&point_key(p)))
        .count();
    checks.push(check(
        "attentive-within-plain",
        pass_fail(missing == 0),
        format!("{missing} attentive sample point(s) absent from the plain sample"),
    ));
    let plain = modes.pop().expect("two modes");
    let attentive = modes.pop().expect("two modes");
    Ok(CompareSection {
        s: cfg.s.iter().map(|&s| Num::new(s, "config")).collect(),
        attentive,
        plain,
        attentive_not_in_plain: missing,
    })
}
