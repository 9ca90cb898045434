//! Grid minimization of tilted functions `f - ⟨x̄* + t, ·⟩` over the closed
//! ball `B̄_γ(x̄)`, for small tilts `t`.

use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::linalg::{dist2, dot};

/// Minimizers farther apart than this many grid cells are distinct.
pub const SEPARATION_CELLS: f64 = 10.0;

/// Objective values within `TIE_TOL * scale` of the minimum are ties.
pub const TIE_TOL: f64 = 1e-10;

/// Tilt bisection stops at `JUMP_RESOLUTION * v_radius`.
pub const JUMP_RESOLUTION: f64 = 1e-6;

/// Largest number of neighbouring tilt pairs examined for jumps.
const MAX_JUMP_CANDIDATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    pub gamma: f64,
    pub v_radius: f64,
    /// Tilt grid points per axis (odd).
    pub tilts_per_axis: usize,
    /// Grid points per axis across the ball `B̄_γ(x̄)` (odd).
    pub x_per_axis: usize,
}

impl Default for TiltParams {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            v_radius: 0.1,
            tilts_per_axis: 41,
            x_per_axis: 401,
        }
    }
}

impl TiltParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.v_radius > 0.0) {
            return Err(Error::InvalidParameter("gamma and v_radius must be positive".into()));
        }
        for (name, k) in [("tilts_per_axis", self.tilts_per_axis), ("x_per_axis", self.x_per_axis)] {
            if k < 3 || k % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be odd and at least 3, got {k}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltSample {
    /// Tilt offset `t`; the tilted function is `f - ⟨x̄* + t, ·⟩`.
    pub tilt: Vec<f64>,
    pub argmin: Vec<f64>,
    pub value: f64,
    /// A second grid minimizer, more than the separation threshold away.
    pub alternative: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltJump {
    pub tilt_a: Vec<f64>,
    pub tilt_b: Vec<f64>,
    pub argmin_a: Vec<f64>,
    pub argmin_b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltProbe {
    pub samples: Vec<TiltSample>,
    pub multivalued: bool,
    pub jump: Option<TiltJump>,
    /// Single-valued on every tested tilt with no jump.
    pub single_valued: bool,
    /// Largest `‖M(a) - M(b)‖ / ‖a - b‖` over tested tilts.
    pub lipschitz: f64,
    /// Estimated absolute error of `lipschitz`: twice the minimizer
    /// precision over the smallest tilt spacing.
    pub delta_grid: f64,
    /// `‖M(0) - x̄‖`.
    pub m0_distance: f64,
    pub cell: f64,
    pub status: String,
}

struct Problem<'a> {
    f: &'a FunctionSpec,
    center: Vec<f64>,
    base: Vec<f64>,
    gamma: f64,
    cell: f64,
    grid: Vec<(Vec<f64>, f64)>,
}

impl Problem<'_> {
    fn objective(&self, x: &[f64], tilt: &[f64]) -> f64 {
        if dist2(x, &self.center) > self.gamma * (1.0 + 1e-12) {
            return f64::INFINITY;
        }
        let fx = self.f.evaluate(x);
        if !fx.is_finite() {
            return f64::INFINITY;
        }
        let lin: f64 = x
            .iter()
            .zip(&self.base)
            .zip(tilt)
            .map(|((xi, b), t)| xi * (b + t))
            .sum();
        fx - lin
    }

    fn solve(&self, tilt: &[f64]) -> TiltSample {
        let values: Vec<f64> = self
            .grid
            .iter()
            .map(|(x, fx)| {
                let lin: f64 = x
                    .iter()
                    .zip(&self.base)
                    .zip(tilt)
                    .map(|((xi, b), t)| xi * (b + t))
                    .sum();
                fx - lin
            })
            .collect();
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v < values[best] {
                best = i;
            }
        }
        let scale = 1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tie = values[best] + TIE_TOL * scale;
        let alternative = values
            .iter()
            .enumerate()
            .filter(|(i, v)| **v <= tie && dist2(&self.grid[*i].0, &self.grid[best].0) > SEPARATION_CELLS * self.cell)
            .map(|(i, _)| self.grid[i].0.clone())
            .next();
        let (argmin, value) = self.refine(&self.grid[best].0, tilt);
        TiltSample {
            tilt: tilt.to_vec(),
            argmin,
            value,
            alternative,
        }
    }

    /// Compass search from `start`, halving the step down to `refine_tol`.
    fn refine(&self, start: &[f64], tilt: &[f64]) -> (Vec<f64>, f64) {
        let n = start.len();
        let mut x = start.to_vec();
        let mut fx = self.objective(&x, tilt);
        let mut step = self.cell;
        let stop = self.refine_tol();
        let mut iterations = 0;
        while step > stop && iterations < 100_000 {
            iterations += 1;
            let mut moved = false;
            for i in 0..n {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[i] += sign * step;
                    let fy = self.objective(&y, tilt);
                    if fy < fx {
                        x = y;
                        fx = fy;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        (x, fx)
    }

    fn refine_tol(&self) -> f64 {
        1e-13 * (1.0 + self.gamma)
    }
}

fn lattice(n: usize, per_axis: usize, radius: f64, center: &[f64]) -> Vec<(Vec<i64>, Vec<f64>)> {
    let half = (per_axis / 2) as i64;
    let h = radius / half as f64;
    let mut out = Vec::new();
    let mut idx = vec![-half; n];
    loop {
        let p: Vec<f64> = idx.iter().zip(center).map(|(&k, c)| c + k as f64 * h).collect();
        if dist2(&p, center) <= radius * (1.0 + 1e-12) {
            out.push((idx.clone(), p));
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] <= half {
                break;
            }
            idx[i] = -half;
        }
    }
}

/// Samples the tilted argmin map `M(t) = argmin { f(x) - ⟨x̄* + t, x⟩ :
/// x ∈ B̄_γ(x̄) }` on a grid of tilts `‖t‖ <= v_radius`.
///
/// Each minimization scans a grid of the ball, then refines the best grid
/// point by compass search. A tilt is multivalued when another grid point
/// ties the minimum and lies more than `SEPARATION_CELLS` cells away.
/// Neighbouring tilts whose minimizers are that far apart are bisected; a
/// separation that survives down to `JUMP_RESOLUTION * v_radius` is a jump.
pub fn tilt_probe(f: &FunctionSpec, xbar: &[f64], xstar: &[f64], params: &TiltParams) -> Result<TiltProbe> {
    params.validate()?;
    let n = f.dim();
    if xbar.len() != n || xstar.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xbar.len().max(xstar.len()),
        });
    }
    let cell = 2.0 * params.gamma / (params.x_per_axis - 1) as f64;
    let mut grid_points: Vec<Vec<f64>> = lattice(n, params.x_per_axis, params.gamma, xbar)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    for s in f.special_points() {
        if dist2(&s, xbar) <= params.gamma && !grid_points.contains(&s) {
            grid_points.push(s);
        }
    }
    let grid: Vec<(Vec<f64>, f64)> = grid_points
        .into_iter()
        .filter_map(|x| {
            let v = f.evaluate(&x);
            v.is_finite().then_some((x, v))
        })
        .collect();
    if grid.is_empty() {
        return Err(Error::EmptyDomain { x: xbar.to_vec() });
    }
    let problem = Problem {
        f,
        center: xbar.to_vec(),
        base: xstar.to_vec(),
        gamma: params.gamma,
        cell,
        grid,
    };
    let zero = vec![0.0; n];
    let tilts = lattice(n, params.tilts_per_axis, params.v_radius, &zero);
    let samples: Vec<TiltSample> = tilts.iter().map(|(_, t)| problem.solve(t)).collect();
    let multivalued = samples.iter().any(|s| s.alternative.is_some());

    let threshold = SEPARATION_CELLS * cell;
    let mut candidates = Vec::new();
    for a in 0..tilts.len() {
        for b in a + 1..tilts.len() {
            let diff: i64 = tilts[a].0.iter().zip(&tilts[b].0).map(|(u, v)| (u - v).abs()).sum();
            if diff == 1 && dist2(&samples[a].argmin, &samples[b].argmin) > threshold {
                candidates.push((a, b));
            }
        }
    }
    let mut jump = None;
    for &(a, b) in candidates.iter().take(MAX_JUMP_CANDIDATES) {
        let (mut ta, mut tb) = (tilts[a].1.clone(), tilts[b].1.clone());
        let (mut ma, mut mb) = (samples[a].argmin.clone(), samples[b].argmin.clone());
        let mut persists = true;
        while dist2(&ta, &tb) > JUMP_RESOLUTION * params.v_radius {
            let tm: Vec<f64> = ta.iter().zip(&tb).map(|(u, v)| 0.5 * (u + v)).collect();
            let mm = problem.solve(&tm).argmin;
            if dist2(&ma, &mm) > threshold {
                tb = tm;
                mb = mm;
            } else if dist2(&mm, &mb) > threshold {
                ta = tm;
                ma = mm;
            } else {
                persists = false;
                break;
            }
        }
        if persists {
            jump = Some(TiltJump {
                tilt_a: ta,
                tilt_b: tb,
                argmin_a: ma,
                argmin_b: mb,
            });
            break;
        }
    }

    let mut lipschitz: f64 = 0.0;
    let mut min_spacing = f64::INFINITY;
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            let dt = dist2(&samples[a].tilt, &samples[b].tilt);
            min_spacing = min_spacing.min(dt);
            lipschitz = lipschitz.max(dist2(&samples[a].argmin, &samples[b].argmin) / dt);
        }
    }
    // minimizers are resolved to about sqrt(machine eps) relative to the
    // ball, since the objective is flat to second order at a minimum
    let x_precision = problem.refine_tol().max(f64::EPSILON.sqrt() * (1.0 + params.gamma));
    let delta_grid = 2.0 * x_precision * (n as f64).sqrt() / min_spacing;
    let m0 = samples
        .iter()
        .find(|s| dot(&s.tilt, &s.tilt) == 0.0)
        .map(|s| dist2(&s.argmin, xbar))
        .unwrap_or(f64::NAN);
    let single_valued = !multivalued && jump.is_none();
    let status = if single_valued {
        format!(
            "single-valued on {} tilts, supported at resolution {}",
            samples.len(),
            params.x_per_axis
        )
    } else if multivalued {
        "multivalued argmin: not tilt-stable".to_string()
    } else {
        "argmin jumps: not tilt-stable".to_string()
    };
    Ok(TiltProbe {
        samples,
        multivalued,
        jump,
        single_valued,
        lipschitz,
        delta_grid,
        m0_distance: m0,
        cell,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    fn small() -> TiltParams {
        TiltParams {
            gamma: 0.5,
            v_radius: 0.1,
            tilts_per_axis: 11,
            x_per_axis: 101,
        }
    }

    #[test]
    fn quadratic_is_stable_with_inverse_curvature() {
        let q = builtin("quad(2)").unwrap();
        let p = tilt_probe(&q, &[0.0], &[0.0], &small()).unwrap();
        assert!(p.single_valued, "{}", p.status);
        assert!((p.lipschitz - 0.5).abs() < 1e-6);
        assert!(p.m0_distance < 1e-12);
    }

    #[test]
    fn f1_is_multivalued() {
        let f = builtin("f1_neg_quartic").unwrap();
        let p = tilt_probe(&f, &[0.0], &[0.0], &small()).unwrap();
        assert!(p.multivalued && !p.single_valued);
    }

    #[test]
    fn indicator_jumps() {
        let f = builtin("indicator_halfline").unwrap();
        let mut params = small();
        params.gamma = 1.0;
        let p = tilt_probe(&f, &[0.0], &[0.0], &params).unwrap();
        assert!(p.jump.is_some() && p.multivalued);
    }
}
