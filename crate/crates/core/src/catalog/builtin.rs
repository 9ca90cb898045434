use nalgebra::DMatrix;

use crate::catalog::piecewise::{Branch, Piecewise};
use crate::catalog::poly::{Monomial, MultiPoly};
use crate::catalog::polyhedral::{HalfSpace, QuadPolyhedron};
use crate::catalog::{check_dim, FunctionSpec};
use crate::error::{Error, Result};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
}

/// Stable list of builtin names, in documentation order.
pub fn catalog_entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "f1_neg_quartic",
            description: "-x^4; regular subgradient 0 at 0 but not variationally convex there",
        },
        CatalogEntry {
            name: "f2_zero",
            description: "the zero function on R",
        },
        CatalogEntry {
            name: "abs",
            description: "|x|",
        },
        CatalogEntry {
            name: "neg_abs",
            description: "-|x|; empty regular subdifferential at 0",
        },
        CatalogEntry {
            name: "indicator_halfline",
            description: "indicator of [0, inf)",
        },
        CatalogEntry {
            name: "flagship_jump",
            description:
                "0 for x <= 0, 1 - x for x > 0; lsc with a downward jump, not subdifferentially continuous at 0",
        },
        CatalogEntry {
            name: "quad(a)",
            description: "a x^2 / 2",
        },
        CatalogEntry {
            name: "orthant_quad(A)",
            description: "x'Ax/2 on the nonnegative orthant; A as a diagonal `a1,a2,..` or rows `a11,a12;a21,a22`",
        },
    ]
}

/// Looks up a builtin by name; parameterized members take their arguments in
/// parentheses, e.g. `quad(2)` or `orthant_quad(2,3)`.
pub fn builtin(name: &str) -> Result<FunctionSpec> {
    let name = name.trim();
    let line = |coeffs: Vec<f64>| Branch::new(-INF, INF, false, false, coeffs);
    let spec = match name {
        "f1_neg_quartic" => FunctionSpec::Piecewise1d(Piecewise::new(vec![line(vec![0.0, 0.0, 0.0, 0.0, -1.0])])?),
        "f2_zero" => FunctionSpec::Piecewise1d(Piecewise::new(vec![line(vec![0.0])])?),
        "abs" => FunctionSpec::Piecewise1d(Piecewise::new(vec![
            Branch::new(-INF, 0.0, false, true, vec![0.0, -1.0]),
            Branch::new(0.0, INF, false, false, vec![0.0, 1.0]),
        ])?),
        "neg_abs" => FunctionSpec::Piecewise1d(Piecewise::new(vec![
            Branch::new(-INF, 0.0, false, true, vec![0.0, 1.0]),
            Branch::new(0.0, INF, false, false, vec![0.0, -1.0]),
        ])?),
        "indicator_halfline" => {
            FunctionSpec::Piecewise1d(Piecewise::new(vec![Branch::new(0.0, INF, true, false, vec![0.0])])?)
        }
        "flagship_jump" => FunctionSpec::Piecewise1d(Piecewise::new(vec![
            Branch::new(-INF, 0.0, false, true, vec![0.0]),
            Branch::new(0.0, INF, false, false, vec![1.0, -1.0]),
        ])?),
        _ => return parameterized(name),
    };
    Ok(spec)
}

fn parameterized(name: &str) -> Result<FunctionSpec> {
    let unknown = || Error::UnknownBuiltin(name.to_string());
    let (head, rest) = name.split_once('(').ok_or_else(unknown)?;
    let args = rest.strip_suffix(')').ok_or_else(unknown)?;
    match head.trim() {
        "quad" => {
            let a = parse_number(args).ok_or_else(unknown)?;
            let poly = MultiPoly::new(
                1,
                vec![Monomial {
                    coeff: a / 2.0,
                    exponents: vec![2],
                }],
            )?;
            FunctionSpec::smooth(poly)
        }
        "orthant_quad" => {
            let a = parse_matrix(args).ok_or_else(unknown)?;
            let n = a.nrows();
            check_dim(n)?;
            let constraints = (0..n)
                .map(|i| {
                    let mut normal = vec![0.0; n];
                    normal[i] = -1.0;
                    HalfSpace { normal, offset: 0.0 }
                })
                .collect();
            Ok(FunctionSpec::QuadPolyhedron(QuadPolyhedron::new(
                a,
                vec![0.0; n],
                0.0,
                constraints,
            )?))
        }
        _ => Err(unknown()),
    }
}

fn parse_number(s: &str) -> Option<f64> {
    crate::catalog::format::parse_scalar(s.trim()).ok()
}

fn parse_matrix(s: &str) -> Option<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|r| r.split(',').map(parse_number).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    if rows.len() == 1 {
        let d = &rows[0];
        return Some(DMatrix::from_fn(
            d.len(),
            d.len(),
            |i, j| if i == j { d[i] } else { 0.0 },
        ));
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// A documented anchor `(x̄, x̄*)` of a catalog member.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogAnchor {
    pub label: &'static str,
    pub function: &'static str,
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
}

/// The anchors used by the test suites and the `catalog` command.
pub fn catalog_anchors() -> Vec<CatalogAnchor> {
    let a = |label, function, x: &[f64], xstar: &[f64]| CatalogAnchor {
        label,
        function,
        x: x.to_vec(),
        xstar: xstar.to_vec(),
    };
    vec![
        a("f1_neg_quartic@0", "f1_neg_quartic", &[0.0], &[0.0]),
        a("f2_zero@0", "f2_zero", &[0.0], &[0.0]),
        a("abs@0", "abs", &[0.0], &[0.0]),
        a("abs@(0,1)", "abs", &[0.0], &[1.0]),
        a("indicator_halfline@0", "indicator_halfline", &[0.0], &[0.0]),
        a("flagship_jump@0", "flagship_jump", &[0.0], &[0.0]),
        a("quad(0.5)@0", "quad(0.5)", &[0.0], &[0.0]),
        a("quad(1)@0", "quad(1)", &[0.0], &[0.0]),
        a("quad(2)@0", "quad(2)", &[0.0], &[0.0]),
        a("quad(-1)@0", "quad(-1)", &[0.0], &[0.0]),
        a("orthant_quad(2,3)@0", "orthant_quad(2,3)", &[0.0, 0.0], &[0.0, 0.0]),
        a("orthant_quad(2,3)@edge", "orthant_quad(2,3)", &[0.0, 0.1], &[-0.5, 0.3]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_and_anchor_resolves() {
        for e in catalog_entries() {
            let name = e.name.replace("(a)", "(2)").replace("(A)", "(2,3)");
            assert!(builtin(&name).is_ok(), "{name}");
        }
        for a in catalog_anchors() {
            let f = builtin(a.function).unwrap();
            f.require_subgradient(&a.x, &a.xstar).unwrap();
        }
    }

    #[test]
    fn parameter_parsing() {
        let f = builtin("quad(-1)").unwrap();
        assert_eq!(f.evaluate(&[2.0]), -2.0);
        let f = builtin("orthant_quad(2,1;1,3)").unwrap();
        assert_eq!(f.evaluate(&[1.0, 1.0]), 3.5);
        assert!(matches!(builtin("quad(x)"), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(builtin("nope"), Err(Error::UnknownBuiltin(_))));
    }
}
