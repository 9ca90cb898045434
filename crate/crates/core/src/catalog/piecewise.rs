use crate::catalog::poly::Poly1;
use crate::catalog::subgrad::{SubgradientPiece, SubgradientSet};
use crate::catalog::MAX_DEGREE;
use crate::error::{Error, Result};

/// One polynomial piece on an interval. A closed end owns the function value
/// at that point.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub poly: Poly1,
}

impl Branch {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool, coeffs: Vec<f64>) -> Self {
        Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
            poly: Poly1::new(coeffs),
        }
    }

    fn contains(&self, x: f64) -> bool {
        let above = x > self.lo || (self.lo_closed && x == self.lo);
        let below = x < self.hi || (self.hi_closed && x == self.hi);
        above && below
    }
}

/// One-sided data of a branch at one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideLimit {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
    /// The one-sided value limit equals `f(b)`.
    pub attentive: bool,
}

/// Piecewise polynomial function of one variable; `+inf` off the branches.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    branches: Vec<Branch>,
}

pub(crate) fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

impl Piecewise {
    /// Validates ordering, ownership of every breakpoint and lower
    /// semicontinuity.
    pub fn new(mut branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidSpec("piecewise function without branches".into()));
        }
        branches.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for b in &branches {
            if b.lo.is_nan() || b.hi.is_nan() || !(b.lo < b.hi) {
                return Err(Error::InvalidSpec(format!(
                    "branch needs lo < hi, got [{}, {}]",
                    b.lo, b.hi
                )));
            }
            if b.poly.degree() > MAX_DEGREE {
                return Err(Error::DegreeOverflow {
                    degree: b.poly.degree(),
                    cap: MAX_DEGREE,
                });
            }
            if b.poly.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSpec("non-finite coefficient".into()));
            }
            if (b.lo.is_infinite() && b.lo_closed) || (b.hi.is_infinite() && b.hi_closed) {
                return Err(Error::InvalidSpec("infinite endpoints must be open".into()));
            }
        }
        let first = &branches[0];
        let last = &branches[branches.len() - 1];
        if first.lo.is_finite() && !first.lo_closed {
            return Err(Error::InvalidSpec(format!(
                "domain end {} must be closed for lower semicontinuity",
                first.lo
            )));
        }
        if last.hi.is_finite() && !last.hi_closed {
            return Err(Error::InvalidSpec(format!(
                "domain end {} must be closed for lower semicontinuity",
                last.hi
            )));
        }
        for pair in branches.windows(2) {
            let (l, r) = (&pair[0], &pair[1]);
            if l.hi != r.lo {
                return Err(Error::InvalidSpec(format!(
                    "branches must be contiguous: gap or overlap between {} and {}",
                    l.hi, r.lo
                )));
            }
            if l.hi_closed == r.lo_closed {
                return Err(Error::InvalidSpec(format!(
                    "breakpoint {} needs exactly one owning branch",
                    l.hi
                )));
            }
            let b = l.hi;
            let (owner, other) = if l.hi_closed { (l, r) } else { (r, l) };
            let fb = owner.poly.eval(b);
            let limit = other.poly.eval(b);
            if fb > limit && !same_value(fb, limit) {
                return Err(Error::InvalidSpec(format!(
                    "not lower semicontinuous at {b}: f(b) = {fb} exceeds the one-sided limit {limit}"
                )));
            }
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    fn locate(&self, x: f64) -> Option<&Branch> {
        self.branches.iter().find(|b| b.contains(x))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.locate(x).map_or(f64::INFINITY, |b| b.poly.eval(x))
    }

    /// Finite branch endpoints, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .branches
            .iter()
            .flat_map(|b| [b.lo, b.hi])
            .filter(|v| v.is_finite())
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn is_breakpoint(&self, x: f64) -> bool {
        self.branches.iter().any(|b| b.lo == x || b.hi == x)
    }

    /// Left and right branch data at the breakpoint `b`.
    pub fn sides(&self, b: f64) -> (Option<SideLimit>, Option<SideLimit>) {
        let fb = self.evaluate(b);
        let side = |br: &Branch| {
            let value = br.poly.eval(b);
            SideLimit {
                value,
                slope: br.poly.derivative().eval(b),
                curvature: br.poly.derivative().derivative().eval(b),
                attentive: fb.is_finite() && same_value(value, fb),
            }
        };
        let left = self.branches.iter().find(|br| br.hi == b).map(side);
        let right = self.branches.iter().find(|br| br.lo == b).map(side);
        (left, right)
    }

    /// Regular subdifferential at a breakpoint as `[lo, hi]` (possibly empty,
    /// i.e. `lo > hi`).
    pub fn regular_interval(&self, b: f64) -> (f64, f64) {
        let (left, right) = self.sides(b);
        let lo = match left {
            Some(l) if l.attentive => l.slope,
            _ => f64::NEG_INFINITY,
        };
        let hi = match right {
            Some(r) if r.attentive => r.slope,
            _ => f64::INFINITY,
        };
        (lo, hi)
    }

    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        if self.is_breakpoint(x) {
            return None;
        }
        self.locate(x).map(|b| b.poly.derivative().derivative().eval(x))
    }

    /// Limiting subdifferential. At a breakpoint the regular interval built
    /// from attentive one-sided slopes is joined with the attentive one-sided
    /// slopes themselves; branches whose values jump away from `f(b)` do not
    /// contribute.
    pub fn subdifferential(&self, x: f64) -> Result<SubgradientSet> {
        let Some(branch) = self.locate(x) else {
            return Err(Error::EmptyDomain { x: vec![x] });
        };
        if !self.is_breakpoint(x) {
            return Ok(SubgradientSet::point(vec![branch.poly.derivative().eval(x)]));
        }
        let (left, right) = self.sides(x);
        let (lo, hi) = self.regular_interval(x);
        let mut pieces = Vec::new();
        if lo <= hi {
            if lo == hi {
                pieces.push(SubgradientPiece::Point(vec![lo]));
            } else {
                pieces.push(SubgradientPiece::Interval { lo, hi });
            }
        }
        for side in [left, right].into_iter().flatten() {
            if side.attentive && !(lo <= side.slope && side.slope <= hi) {
                pieces.push(SubgradientPiece::Point(vec![side.slope]));
            }
        }
        Ok(SubgradientSet::from_pieces(1, pieces))
    }

    pub fn add_poly(&self, p: &Poly1) -> Result<Piecewise> {
        Piecewise::new(
            self.branches
                .iter()
                .map(|b| Branch {
                    poly: b.poly.add(p),
                    ..b.clone()
                })
                .collect(),
        )
    }

    /// Distance from `x` to the nearest breakpoint other than `x`.
    pub fn kink_distance(&self, x: f64) -> f64 {
        self.breakpoints()
            .into_iter()
            .filter(|&b| b != x)
            .map(|b| (b - x).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flagship() -> Piecewise {
        Piecewise::new(vec![
            Branch::new(f64::NEG_INFINITY, 0.0, false, true, vec![0.0]),
            Branch::new(0.0, f64::INFINITY, false, false, vec![1.0, -1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn flagship_values_and_subgradients() {
        let f = flagship();
        assert_eq!(f.evaluate(0.5), 0.5);
        assert_eq!(f.evaluate(0.0), 0.0);
        let s = f.subdifferential(0.0).unwrap();
        assert!(s.contains(&[0.0], 0.0));
        assert!(s.contains(&[100.0], 0.0));
        assert!(!s.contains(&[-1.0], 1e-12));
    }

    #[test]
    fn double_ownership_is_rejected() {
        let r = Piecewise::new(vec![
            Branch::new(f64::NEG_INFINITY, 0.0, false, true, vec![0.0]),
            Branch::new(0.0, f64::INFINITY, true, false, vec![0.0]),
        ]);
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn upper_jump_is_not_lsc() {
        let r = Piecewise::new(vec![
            Branch::new(f64::NEG_INFINITY, 0.0, false, true, vec![1.0]),
            Branch::new(0.0, f64::INFINITY, false, false, vec![0.0]),
        ]);
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn concave_kink_has_two_limiting_subgradients() {
        let f = Piecewise::new(vec![
            Branch::new(f64::NEG_INFINITY, 0.0, false, true, vec![0.0, 1.0]),
            Branch::new(0.0, f64::INFINITY, false, false, vec![0.0, -1.0]),
        ])
        .unwrap();
        let s = f.subdifferential(0.0).unwrap();
        assert_eq!(s.pieces().len(), 2);
        assert!(s.contains(&[1.0], 0.0) && s.contains(&[-1.0], 0.0));
        assert!(!s.contains(&[0.0], 1e-12));
    }
}
