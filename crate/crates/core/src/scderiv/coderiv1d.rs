//! Exact f-attentive limiting normal cone and coderivative of `∂f` for
//! functions of one variable.
//!
//! Near the anchor the attentive graph is a finite union of smooth arcs
//! leaving `(x̄, x̄*)` in known directions. The limiting normal cone is the
//! polar of those directions (regular normals at the anchor) joined with the
//! normal line of each arc (limits of normals along the arc).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::catalog::{FunctionSpec, Piecewise};
use crate::error::{Error, Result};
use crate::scderiv::closed::close;

const ANGLE_TOL: f64 = 1e-12;

/// A closed convex cone in R^2. Angles are in radians, in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConePiece {
    Zero,
    /// Directions `start ..= start + width` counterclockwise, `width <= π`.
    /// Width 0 is a ray and width π a half-plane.
    Arc {
        start: f64,
        width: f64,
    },
    /// The line through the origin in direction `angle`.
    Line {
        angle: f64,
    },
    Plane,
}

fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if TAU - r < ANGLE_TOL {
        0.0
    } else {
        r
    }
}

fn angle_in_arc(theta: f64, start: f64, width: f64) -> bool {
    let d = norm_angle(theta - start);
    d <= width + ANGLE_TOL || TAU - d <= ANGLE_TOL
}

impl ConePiece {
    pub fn contains(&self, v: [f64; 2], tol: f64) -> bool {
        let r = v[0].hypot(v[1]);
        if r <= tol {
            return true;
        }
        let theta = v[1].atan2(v[0]);
        match *self {
            ConePiece::Zero => false,
            ConePiece::Plane => true,
            ConePiece::Line { angle } => (angle.cos() * v[1] - angle.sin() * v[0]).abs() <= tol * r,
            ConePiece::Arc { start, width } => {
                angle_in_arc(theta, start, width)
                    || [start, start + width].iter().any(|a| {
                        (a.cos() * v[1] - a.sin() * v[0]).abs() <= tol * r && a.cos() * v[0] + a.sin() * v[1] > 0.0
                    })
            }
        }
    }

    /// Counterclockwise rotation by `phi`.
    pub fn rotated(&self, phi: f64) -> ConePiece {
        match *self {
            ConePiece::Arc { start, width } => ConePiece::Arc {
                start: norm_angle(start + phi),
                width,
            },
            ConePiece::Line { angle } => ConePiece::Line {
                angle: norm_angle(angle + phi).rem_euclid(PI),
            },
            other => other,
        }
    }

    /// The piece as arcs `(start, width)` of unit directions.
    pub fn arcs(&self) -> Vec<(f64, f64)> {
        match *self {
            ConePiece::Zero => Vec::new(),
            ConePiece::Plane => vec![(0.0, TAU)],
            ConePiece::Line { angle } => vec![(angle, 0.0), (norm_angle(angle + PI), 0.0)],
            ConePiece::Arc { start, width } => vec![(start, width)],
        }
    }
}

/// `N^f_{gph ∂f}(x̄, x̄*)` as a union of cones, and the induced
/// `gph D*_f(∂f)(x̄, x̄*) = {(z, z*) : (z*, -z) ∈ N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDescription1D {
    /// Directions of the attentive graph leaving the anchor.
    pub tangent_rays: Vec<f64>,
    pub normal_cone: Vec<ConePiece>,
    pub coderivative_graph: Vec<ConePiece>,
}

impl ConeDescription1D {
    pub fn normal_contains(&self, w: [f64; 2], tol: f64) -> bool {
        self.normal_cone.iter().any(|p| p.contains(w, tol))
    }

    /// Whether `(z, z*)` lies in `gph D*_f`.
    pub fn coderivative_contains(&self, z: [f64; 2], tol: f64) -> bool {
        self.coderivative_graph.iter().any(|p| p.contains(z, tol))
    }

    pub fn coderivative_arcs(&self) -> Vec<(f64, f64)> {
        self.coderivative_graph.iter().flat_map(ConePiece::arcs).collect()
    }
}

/// Directions (angles) in which the attentive graph of `∂f` leaves
/// `(x̄, x̄*)`, for one-dimensional catalog members.
pub fn graph_rays_1d(f: &FunctionSpec, xbar: f64, xstar: f64) -> Result<Vec<f64>> {
    let mut rays = match f {
        FunctionSpec::SmoothPoly(p) => {
            let h = p.hessian(&[xbar])[(0, 0)];
            line_rays(h)
        }
        FunctionSpec::Piecewise1d(p) => piecewise_rays(p, xbar, xstar),
        FunctionSpec::QuadPolyhedron(q) => {
            let p = polyhedron_as_piecewise(q)?;
            piecewise_rays(&p, xbar, xstar)
        }
        FunctionSpec::Shifted { inner, perturbation } => {
            let g = perturbation.gradient(&[xbar])[0];
            let h = perturbation.hessian()[(0, 0)];
            graph_rays_1d(inner, xbar, xstar - g)?
                .into_iter()
                .map(|a| {
                    let (dx, dv) = (a.cos(), a.sin());
                    norm_angle((dv + h * dx).atan2(dx))
                })
                .collect()
        }
    };
    rays.sort_by(f64::total_cmp);
    rays.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
    Ok(rays)
}

fn line_rays(h: f64) -> Vec<f64> {
    let a = norm_angle(h.atan2(1.0));
    vec![a, norm_angle(a + PI)]
}

fn piecewise_rays(p: &Piecewise, x: f64, xstar: f64) -> Vec<f64> {
    if !p.is_breakpoint(x) {
        return line_rays(p.second_derivative(x).expect("interior point"));
    }
    let (left, right) = p.sides(x);
    let mut rays = Vec::new();
    if let Some(l) = left {
        if l.attentive && close(l.slope, xstar) {
            rays.push(norm_angle((-l.curvature).atan2(-1.0)));
        }
    }
    if let Some(r) = right {
        if r.attentive && close(r.slope, xstar) {
            rays.push(norm_angle(r.curvature.atan2(1.0)));
        }
    }
    let (lo, hi) = p.regular_interval(x);
    if lo < hi {
        let above_lo = xstar > lo && !close(xstar, lo);
        let below_hi = xstar < hi && !close(xstar, hi);
        let in_fan = (above_lo || close(xstar, lo)) && (below_hi || close(xstar, hi));
        if in_fan {
            if below_hi {
                rays.push(PI / 2.0);
            }
            if above_lo {
                rays.push(3.0 * PI / 2.0);
            }
        }
    }
    rays
}

fn polyhedron_as_piecewise(q: &crate::catalog::QuadPolyhedron) -> Result<Piecewise> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for c in q.constraints() {
        let bound = c.offset / c.normal[0];
        if c.normal[0] > 0.0 {
            hi = hi.min(bound);
        } else {
            lo = lo.max(bound);
        }
    }
    if !(lo < hi) {
        return Err(Error::Unsupported("degenerate one-point domain".into()));
    }
    Piecewise::new(vec![crate::catalog::Branch::new(
        lo,
        hi,
        lo.is_finite(),
        hi.is_finite(),
        vec![q.c0(), q.b()[0], q.a()[(0, 0)] / 2.0],
    )])
}

/// Polar of the cone generated by the directions `rays`.
fn polar(rays: &[f64]) -> ConePiece {
    if rays.is_empty() {
        return ConePiece::Plane;
    }
    let k = rays.len();
    let (mut gap, mut after) = (0.0, 0usize);
    for i in 0..k {
        let next = (i + 1) % k;
        let g = if k == 1 { TAU } else { norm_angle(rays[next] - rays[i]) };
        if g > gap {
            gap = g;
            after = next;
        }
    }
    let start = rays[after];
    let width = TAU - gap;
    if width < PI - ANGLE_TOL {
        ConePiece::Arc {
            start: norm_angle(start + width + PI / 2.0),
            width: PI - width,
        }
    } else if width <= PI + ANGLE_TOL {
        let strictly_inside = rays.iter().any(|&r| {
            let d = norm_angle(r - start);
            d > ANGLE_TOL && d < PI - ANGLE_TOL
        });
        if strictly_inside {
            ConePiece::Arc {
                start: norm_angle(start - PI / 2.0),
                width: 0.0,
            }
        } else {
            ConePiece::Line {
                angle: norm_angle(start + PI / 2.0).rem_euclid(PI),
            }
        }
    } else {
        ConePiece::Zero
    }
}

/// Exact attentive normal cone and coderivative graph at `(x̄, x̄*)`.
///
/// `eps` sets the size of the localization the cone is read from; the
/// result does not depend on it as long as no other kink lies within it.
pub fn attentive_coderivative_1d(f: &FunctionSpec, xbar: f64, xstar: f64, eps: f64) -> Result<ConeDescription1D> {
    if f.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "coderivatives are computed for n = 1 only, got n = {}",
            f.dim()
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    f.require_subgradient(&[xbar], &[xstar])?;
    let rays = graph_rays_1d(f, xbar, xstar)?;
    let mut normal = vec![polar(&rays)];
    for &r in &rays {
        let line = ConePiece::Line {
            angle: norm_angle(r + PI / 2.0).rem_euclid(PI),
        };
        let dup = normal.iter().any(|p| match (p, &line) {
            (ConePiece::Line { angle: a }, ConePiece::Line { angle: b }) => (a - b).abs() <= ANGLE_TOL,
            _ => false,
        });
        if !dup {
            normal.push(line);
        }
    }
    if normal.len() > 1 {
        normal.retain(|p| *p != ConePiece::Zero);
    }
    let coderivative_graph = normal.iter().map(|p| p.rotated(PI / 2.0)).collect();
    Ok(ConeDescription1D {
        tangent_rays: rays,
        normal_cone: normal,
        coderivative_graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn abs_normal_cone_is_horizontal() {
        let c = attentive_coderivative_1d(&builtin("abs").unwrap(), 0.0, 0.0, 0.25).unwrap();
        assert!(c.normal_contains([1.0, 0.0], 1e-12));
        assert!(c.normal_contains([-3.0, 0.0], 1e-12));
        assert!(!c.normal_contains([0.0, 1.0], 1e-9));
        assert!(c.coderivative_contains([0.0, 2.0], 1e-12));
        assert!(!c.coderivative_contains([1.0, 0.0], 1e-9));
    }

    #[test]
    fn flagship_normal_cone() {
        let c = attentive_coderivative_1d(&builtin("flagship_jump").unwrap(), 0.0, 0.0, 0.25).unwrap();
        for w in [
            [0.0, 1.0],
            [0.0, -1.0],
            [1.0, 0.0],
            [-1.0, 0.0],
            [1.0, -1.0],
            [2.0, -0.5],
        ] {
            assert!(c.normal_contains(w, 1e-12), "{w:?}");
        }
        for w in [[1.0, 1.0], [-1.0, -1.0], [-1.0, 1.0]] {
            assert!(!c.normal_contains(w, 1e-9), "{w:?}");
        }
    }

    #[test]
    fn quadratic_normal_line() {
        let a = 2.0;
        let c = attentive_coderivative_1d(&builtin("quad(2)").unwrap(), 0.0, 0.0, 0.25).unwrap();
        assert!(c.normal_contains([a, -1.0], 1e-12));
        assert!(c.coderivative_contains([1.0, a], 1e-12));
        assert!(!c.coderivative_contains([1.0, 0.0], 1e-9));
    }
}
