//! Scalar abstraction for the matrix layer.
//!
//! Subspace algebra, `(P, W)` pairs, the bound formulas and the sum rule are
//! written once over [`Real`] and instantiated for `f64` (the default used by
//! the catalog, the samplers and the oracles) and `f32`.

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating point scalar usable by the matrix layer.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    fn infinity() -> Self;

    fn machine_eps() -> Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// A tolerance of `base`, raised to a small multiple of machine epsilon
    /// when the scalar type cannot resolve `base`.
    fn tol(base: f64) -> Self {
        let floor = Self::machine_eps() * Self::lit(64.0);
        let base = Self::lit(base);
        if base > floor {
            base
        } else {
            floor
        }
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_real(self) -> bool {
        self.to_f64_lossy().is_finite()
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn infinity() -> Self {
                <$t as Float>::infinity()
            }
            fn machine_eps() -> Self {
                <$t as Float>::epsilon()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(<f64 as Real>::tol(1e-10), 1e-10);
        assert!(<f32 as Real>::tol(1e-10) > 1e-6);
    }
}
