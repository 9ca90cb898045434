//! Report model. Field order is the serialization order; see
//! `docs/formats.md` for the schema.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Name of the top-level field excluded from the determinism contract.
pub const TIMING_FIELD: &str = "timing";

/// An extended real: finite values are JSON numbers, infinities are the
/// strings `"+inf"` and `"-inf"`, and NaN is `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ext(pub f64);

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("+inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;
        impl Visitor<'_> for ExtVisitor {
            type Value = Ext;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"+inf\", \"-inf\" or \"nan\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Ext, E> {
                Ok(Ext(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ext, E> {
                Ok(Ext(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ext, E> {
                Ok(Ext(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ext, E> {
                match v {
                    "+inf" | "inf" => Ok(Ext(f64::INFINITY)),
                    "-inf" => Ok(Ext(f64::NEG_INFINITY)),
                    "nan" => Ok(Ext(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(ExtVisitor)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let v = self.0;
        if v == f64::INFINITY {
            f.write_str("+inf")
        } else if v == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            write!(f, "{v}")
        }
    }
}

/// A number tagged with the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Num {
    pub value: Ext,
    pub op: String,
}

impl Num {
    pub fn new(value: f64, op: &str) -> Self {
        Self {
            value: Ext(value),
            op: op.to_string(),
        }
    }

    pub fn get(&self) -> f64 {
        self.value.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    pub value: Vec<Ext>,
    pub op: String,
}

impl Vector {
    pub fn new(value: &[f64], op: &str) -> Self {
        Self {
            value: value.iter().copied().map(Ext).collect(),
            op: op.to_string(),
        }
    }
}

/// Row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub value: Vec<Vec<Ext>>,
    pub op: String,
}

impl Matrix {
    pub fn new(m: &nalgebra::DMatrix<f64>, op: &str) -> Self {
        Self {
            value: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| Ext(m[(r, c)])).collect())
                .collect(),
            op: op.to_string(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], op: &str) -> Self {
        Self {
            value: rows.iter().map(|r| r.iter().copied().map(Ext).collect()).collect(),
            op: op.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: InputEcho,
    pub pwset: Option<PwSetReport>,
    pub bounds: Option<BoundsReport>,
    pub coderivative_1d: Option<CoderivativeReport>,
    pub verdicts: Vec<SVerdict>,
    pub oracles: Option<OracleSection>,
    pub compare: Option<CompareSection>,
    pub cross_checks: Vec<CrossCheck>,
    pub summary: Summary,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub function_source: String,
    pub function_kind: String,
    pub function: String,
    pub dimension: usize,
    pub anchor: Vector,
    pub subgradient: Vector,
    pub eps: Num,
    pub resolution: usize,
    pub anchor_levels: usize,
    pub s: Vec<Num>,
    pub window: WindowEcho,
    pub oracles: crate::config::OracleToggles,
    pub varco_eps: Num,
    pub varco_range: Vec<Num>,
    pub tilt: TiltEcho,
    pub seedless: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEcho {
    pub x_center: Vector,
    pub x_radius: Num,
    pub v_center: Vector,
    pub v_radius: Num,
    pub rho: Num,
    pub shape: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltEcho {
    pub gamma: Num,
    pub v_radius: Num,
    pub tilts_per_axis: usize,
    pub x_per_axis: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub p: Matrix,
    pub w: Matrix,
    pub axioms_pass: bool,
    pub axiom_residual: Num,
    /// `d_Z(L, L*)` for `L = rge(P, W)`.
    pub self_adjoint_distance: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericReport {
    pub pairs: Vec<PairReport>,
    pub hausdorff: Num,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwSetReport {
    pub mode: String,
    pub provenance: String,
    pub pairs: Vec<PairReport>,
    pub numeric: Option<NumericReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltReport {
    /// `finite` or `not-tilt-stable`.
    pub status: String,
    pub value: Option<Num>,
    pub pair: usize,
    pub per_pair: Vec<Num>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub varco: Num,
    pub varco_pair: usize,
    pub varco_per_pair: Vec<Num>,
    /// The `0/0 := ∞` convention was applied to a pair with `P = 0`.
    pub zero_over_zero: bool,
    pub tilt: TiltReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceReport {
    /// `zero`, `arc`, `line` or `plane`.
    pub kind: String,
    pub start: Option<Num>,
    pub width: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderivativeReport {
    pub tangent_rays: Vec<Num>,
    pub normal_cone: Vec<PieceReport>,
    pub coderivative_graph: Vec<PieceReport>,
    /// Every `rge(P, W)` lies in the coderivative graph.
    pub adjoint_inclusion: bool,
    pub tilt_rayleigh: TiltRayleighReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltRayleighReport {
    pub status: String,
    pub value: Option<Num>,
    /// Only `z = 0` directions occurred and `0/0 := 0` was applied.
    pub degenerate: bool,
    pub angle: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointbasedReport {
    pub pass: bool,
    pub min_eigenvalue: Num,
    pub worst_pair: usize,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodReport {
    pub pass: bool,
    pub min_margin: Num,
    pub points_checked: usize,
    pub witness_x: Option<Vector>,
    pub witness_xstar: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighReport {
    pub pass: bool,
    pub margin: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub pass: bool,
    pub margin: Num,
    pub tuples_checked: usize,
    pub subsampled: bool,
    pub witness_x: Option<Vector>,
    pub witness_xstar: Option<Vector>,
    pub witness_xprime: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSummary {
    pub pass: bool,
    pub margin: Num,
    pub points: usize,
    pub pairs_checked: usize,
    pub subsampled: bool,
    pub pair_x: Option<Vector>,
    pub pair_xstar: Option<Vector>,
    pub pair_y: Option<Vector>,
    pub pair_ystar: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SVerdict {
    pub s: Num,
    pub pointbased: Option<PointbasedReport>,
    pub neighborhood: Option<NeighborhoodReport>,
    pub rayleigh: Option<RayleighReport>,
    pub growth: Option<GrowthSummary>,
    pub monotone_attentive: Option<MonotoneSummary>,
    pub monotone_plain: Option<MonotoneSummary>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarcoEmpiricalReport {
    /// `bracket`, `at-least` or `below`.
    pub kind: String,
    pub lower: Option<Num>,
    pub upper: Option<Num>,
    pub eps: Num,
    pub iterations: usize,
    pub pairs_checked: usize,
    pub subsampled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxReport {
    pub r: Num,
    pub tuples_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltProbeReport {
    pub single_valued: bool,
    pub multivalued: bool,
    pub jump: bool,
    pub lipschitz: Num,
    pub delta_grid: Num,
    pub m0_distance: Num,
    pub tilts: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorantReport {
    pub pass: bool,
    pub max_excess: Num,
    pub excess_at: Option<Vector>,
    pub max_gap_at_graph: Num,
    pub grid_points: usize,
    pub pieces: usize,
    pub tolerance: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosednessSummary {
    pub pass: bool,
    pub locations_checked: usize,
    pub max_value_deviation: Num,
    pub max_subgradient_deviation: Num,
    pub flagged_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub graph_points: usize,
    pub varco_empirical: Option<VarcoEmpiricalReport>,
    pub prox: Option<ProxReport>,
    pub tilt_probe: Option<TiltProbeReport>,
    pub minorant: Option<MinorantReport>,
    pub closedness: Option<ClosednessSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub mode: String,
    pub graph_points: usize,
    pub pairs: Vec<PairReport>,
    pub monotone: Vec<MonotoneSummary>,
    pub closedness: Option<ClosednessSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSection {
    pub s: Vec<Num>,
    pub attentive: ModeReport,
    pub plain: ModeReport,
    /// Attentive sample points missing from the plain sample.
    pub attentive_not_in_plain: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INFO")]
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// No cross-check failed.
    pub pass: bool,
    pub failures: usize,
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: String,
    pub ms: Num,
}

/// Wall-clock data; not covered by the determinism contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub timestamp_unix: u64,
    pub total_ms: Num,
    pub stages: Vec<StageTime>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> crate::error::CliResult<Self> {
        serde_json::from_str(text).map_err(|e| crate::error::CliError::Report(e.to_string()))
    }

    /// JSON with the timing field removed.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove(TIMING_FIELD);
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_reals_round_trip() {
        for v in [0.0, -1.5, 1e300, f64::INFINITY, f64::NEG_INFINITY] {
            let n = Num::new(v, "varco_bound");
            let s = serde_json::to_string(&n).unwrap();
            let back: Num = serde_json::from_str(&s).unwrap();
            assert_eq!(back, n, "{s}");
        }
        assert_eq!(
            serde_json::to_string(&Num::new(f64::INFINITY, "x")).unwrap(),
            r#"{"value":"+inf","op":"x"}"#
        );
    }
}
