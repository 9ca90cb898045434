//! Textual function-spec format (TOML). See `docs/formats.md`.
//!
//! Numbers may be TOML integers or floats, or strings holding a decimal,
//! a rational `p/q`, or `inf` / `-inf`.

use nalgebra::DMatrix;
use toml::Value;

use crate::calculus::QuadraticPerturbation;
use crate::catalog::piecewise::{Branch, Piecewise};
use crate::catalog::poly::{Monomial, MultiPoly};
use crate::catalog::polyhedral::{HalfSpace, QuadPolyhedron};
use crate::catalog::{builtin, check_dim, FunctionSpec};
use crate::error::{Error, Result};

/// Parses a spec document.
pub fn parse_spec(text: &str) -> Result<FunctionSpec> {
    let value: Value = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    parse_spec_value(&value)
}

/// Parses an already decoded TOML table.
pub fn parse_spec_value(v: &Value) -> Result<FunctionSpec> {
    let table = v.as_table().ok_or_else(|| bad("", "spec must be a table"))?;
    let kind = table
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("kind", "missing or not a string"))?;
    match kind {
        "builtin" => {
            let name = table
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("name", "missing or not a string"))?;
            builtin(name)
        }
        "smooth-poly" => {
            let n = table
                .get("dim")
                .and_then(Value::as_integer)
                .ok_or_else(|| bad("dim", "missing or not an integer"))?;
            let n = usize::try_from(n).map_err(|_| bad("dim", "must be positive"))?;
            check_dim(n)?;
            let mut terms = Vec::new();
            for (i, t) in array(table.get("terms"), "terms")?.iter().enumerate() {
                let field = format!("terms[{i}]");
                let coeff = scalar(t.get("coeff"), &format!("{field}.coeff"))?;
                let exponents = array(t.get("exponents"), &format!("{field}.exponents"))?
                    .iter()
                    .map(|e| {
                        e.as_integer()
                            .and_then(|k| u32::try_from(k).ok())
                            .ok_or_else(|| bad(&field, "exponents must be nonnegative integers"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                terms.push(Monomial { coeff, exponents });
            }
            FunctionSpec::smooth(MultiPoly::new(n, terms)?)
        }
        "piecewise-1d" => {
            let mut branches = Vec::new();
            for (i, b) in array(table.get("branch"), "branch")?.iter().enumerate() {
                let field = format!("branch[{i}]");
                branches.push(Branch::new(
                    scalar(b.get("lo"), &format!("{field}.lo"))?,
                    scalar(b.get("hi"), &format!("{field}.hi"))?,
                    flag(b.get("lo_closed"), &format!("{field}.lo_closed"))?,
                    flag(b.get("hi_closed"), &format!("{field}.hi_closed"))?,
                    vector(b.get("coeffs"), &format!("{field}.coeffs"))?,
                ));
            }
            Ok(FunctionSpec::Piecewise1d(Piecewise::new(branches)?))
        }
        "quad-plus-polyhedron" => {
            let a = matrix(table.get("a"), "a")?;
            let n = a.nrows();
            check_dim(n)?;
            let b = match table.get("b") {
                Some(v) => vector(Some(v), "b")?,
                None => vec![0.0; n],
            };
            let c0 = match table.get("c0") {
                Some(v) => scalar(Some(v), "c0")?,
                None => 0.0,
            };
            let mut constraints = Vec::new();
            if let Some(list) = table.get("constraint") {
                for (i, c) in array(Some(list), "constraint")?.iter().enumerate() {
                    let field = format!("constraint[{i}]");
                    constraints.push(HalfSpace {
                        normal: vector(c.get("normal"), &format!("{field}.normal"))?,
                        offset: scalar(c.get("offset"), &format!("{field}.offset"))?,
                    });
                }
            }
            Ok(FunctionSpec::QuadPolyhedron(QuadPolyhedron::new(
                a,
                b,
                c0,
                constraints,
            )?))
        }
        "shifted" => {
            let inner = parse_spec_value(table.get("inner").ok_or_else(|| bad("inner", "missing"))?)?;
            let p = table
                .get("perturbation")
                .ok_or_else(|| bad("perturbation", "missing"))?;
            let perturbation = if p.get("t").is_some() {
                QuadraticPerturbation::shift(
                    &vector(p.get("anchor"), "perturbation.anchor")?,
                    &vector(p.get("tilt"), "perturbation.tilt")?,
                    scalar(p.get("t"), "perturbation.t")?,
                )
            } else {
                let h = matrix(p.get("h"), "perturbation.h")?;
                let b = vector(p.get("b"), "perturbation.b")?;
                let c = match p.get("c") {
                    Some(v) => scalar(Some(v), "perturbation.c")?,
                    None => 0.0,
                };
                QuadraticPerturbation::new(c, b, h)?
            };
            FunctionSpec::shifted(inner, perturbation)
        }
        other => Err(bad("kind", &format!("unknown kind `{other}`"))),
    }
}

fn bad(field: &str, msg: &str) -> Error {
    if field.is_empty() {
        Error::InvalidSpec(msg.to_string())
    } else {
        Error::InvalidSpec(format!("field `{field}`: {msg}"))
    }
}

/// Parses a decimal, a rational `p/q`, or `inf`.
pub(crate) fn parse_scalar(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    match s {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if q == 0.0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(p / q);
    }
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

pub(crate) fn scalar(v: Option<&Value>, field: &str) -> Result<f64> {
    match v {
        Some(Value::Integer(i)) => Ok(*i as f64),
        Some(Value::Float(f)) if !f.is_nan() => Ok(*f),
        Some(Value::String(s)) => parse_scalar(s).map_err(|e| bad(field, &e)),
        Some(_) => Err(bad(field, "expected a number")),
        None => Err(bad(field, "missing")),
    }
}

fn flag(v: Option<&Value>, field: &str) -> Result<bool> {
    match v {
        Some(Value::Boolean(b)) => Ok(*b),
        Some(_) => Err(bad(field, "expected a boolean")),
        None => Err(bad(field, "missing")),
    }
}

fn array<'a>(v: Option<&'a Value>, field: &str) -> Result<&'a Vec<Value>> {
    v.ok_or_else(|| bad(field, "missing"))?
        .as_array()
        .ok_or_else(|| bad(field, "expected an array"))
}

pub(crate) fn vector(v: Option<&Value>, field: &str) -> Result<Vec<f64>> {
    array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, x)| scalar(Some(x), &format!("{field}[{i}]")))
        .collect()
}

fn matrix(v: Option<&Value>, field: &str) -> Result<DMatrix<f64>> {
    let rows = array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, r)| vector(Some(r), &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(bad(field, "expected a nonempty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_with_rationals() {
        let f = parse_spec(
            r#"
kind = "piecewise-1d"
[[branch]]
lo = "-inf"
hi = 0
lo_closed = false
hi_closed = true
coeffs = ["0"]
[[branch]]
lo = 0
hi = "inf"
lo_closed = false
hi_closed = false
coeffs = ["1", "-1/1"]
"#,
        )
        .unwrap();
        assert_eq!(f, builtin("flagship_jump").unwrap());
    }

    #[test]
    fn orthant_from_file_matches_builtin() {
        let f = parse_spec(
            r#"
kind = "quad-plus-polyhedron"
a = [[2, 0], [0, 3]]
[[constraint]]
normal = [-1, 0]
offset = 0
[[constraint]]
normal = [0, -1]
offset = 0
"#,
        )
        .unwrap();
        assert_eq!(f, builtin("orthant_quad(2,3)").unwrap());
    }

    #[test]
    fn shifted_builtin() {
        let f = parse_spec(
            r#"
kind = "shifted"
inner = { kind = "builtin", name = "abs" }
perturbation = { anchor = [0], tilt = [0], t = "1/2" }
"#,
        )
        .unwrap();
        assert_eq!(f.evaluate(&[2.0]), 3.0);
    }

    #[test]
    fn field_diagnostics() {
        let err = parse_spec("kind = \"piecewise-1d\"\n[[branch]]\nlo = 0\n").unwrap_err();
        assert!(err.to_string().contains("branch[0].hi"), "{err}");
        assert!(parse_spec("kind = \"nope\"").is_err());
        assert_eq!(parse_scalar("3/4").unwrap(), 0.75);
        assert!(parse_scalar("1/0").is_err());
    }
}
