use serde::{Deserialize, Serialize};

use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::graph::{localization, Mode, Resolution};
use crate::oracles::monotone::{pair_fails, pair_terms};

/// Width at which bisection stops.
pub const BRACKET_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VarcoBracket {
    /// Monotone at `lower`, not at `upper`.
    Bracket { lower: f64, upper: f64 },
    /// Monotone at both ends: `varco >= lower`.
    AtLeast { lower: f64 },
    /// Monotone at neither end: `varco < upper`.
    Below { upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarcoEmpirical {
    pub bracket: VarcoBracket,
    pub iterations: usize,
    pub pairs_checked: usize,
    pub subsampled: bool,
}

impl VarcoEmpirical {
    pub fn lower(&self) -> Option<f64> {
        match self.bracket {
            VarcoBracket::Bracket { lower, .. } | VarcoBracket::AtLeast { lower } => Some(lower),
            VarcoBracket::Below { .. } => None,
        }
    }

    pub fn upper(&self) -> Option<f64> {
        match self.bracket {
            VarcoBracket::Bracket { upper, .. } | VarcoBracket::Below { upper } => Some(upper),
            VarcoBracket::AtLeast { .. } => None,
        }
    }

    /// Whether `v` is compatible with the bracket, allowing `slack`.
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        let lo = self.lower().is_none_or(|l| v >= l - slack);
        let hi = self.upper().is_none_or(|u| v <= u + slack);
        lo && hi
    }
}

/// Bisection on `s` of the attentive monotonicity test over one sample of
/// the ε-localization.
pub fn varco_empirical(
    f: &FunctionSpec,
    xbar: &[f64],
    xstar: &[f64],
    eps: f64,
    res: &Resolution,
    s_lo: f64,
    s_hi: f64,
) -> Result<VarcoEmpirical> {
    if !(s_lo < s_hi) {
        return Err(Error::InvalidParameter(format!(
            "need s_lo < s_hi, got [{s_lo}, {s_hi}]"
        )));
    }
    let g = localization(f, xbar, xstar, eps, Mode::Attentive, res)?;
    let (terms, subsampled) = pair_terms(&g);
    let monotone = |s: f64| !terms.iter().any(|&(ip, d2, _, _)| pair_fails(ip, d2, s));
    let (lo_ok, hi_ok) = (monotone(s_lo), monotone(s_hi));
    let mut iterations = 0;
    let bracket = match (lo_ok, hi_ok) {
        (true, true) => VarcoBracket::AtLeast { lower: s_hi },
        (false, _) => VarcoBracket::Below { upper: s_lo },
        (true, false) => {
            let (mut lower, mut upper) = (s_lo, s_hi);
            while upper - lower > BRACKET_WIDTH {
                let mid = 0.5 * (lower + upper);
                if monotone(mid) {
                    lower = mid;
                } else {
                    upper = mid;
                }
                iterations += 1;
            }
            VarcoBracket::Bracket { lower, upper }
        }
    };
    Ok(VarcoEmpirical {
        bracket,
        iterations,
        pairs_checked: terms.len(),
        subsampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn examples() {
        let res = Resolution::new(41, 4);
        let q = builtin("quad(2)").unwrap();
        let e = varco_empirical(&q, &[0.0], &[0.0], 0.25, &res, -10.0, 10.0).unwrap();
        assert!(e.contains(2.0, 0.0) && e.upper().unwrap() - e.lower().unwrap() <= BRACKET_WIDTH);
        let ind = builtin("indicator_halfline").unwrap();
        let e = varco_empirical(&ind, &[0.0], &[0.0], 0.25, &res, -10.0, 10.0).unwrap();
        assert!(e.contains(0.0, 1e-3));
        let abs = builtin("abs").unwrap();
        let e = varco_empirical(&abs, &[0.0], &[0.0], 0.25, &res, -10.0, 10.0).unwrap();
        assert_eq!(e.bracket, VarcoBracket::AtLeast { lower: 10.0 });
    }
}
