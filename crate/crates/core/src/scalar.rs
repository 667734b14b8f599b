//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point type the toolkit computes in: `f32` or `f64`.
///
/// Tolerances throughout the crate are written as `f64` literals and
/// converted through [`Scalar::tol`], which never goes below a small
/// multiple of the type's machine epsilon. This keeps `f32` usable, at
/// reduced accuracy, with the same code paths.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// A tolerance of `x`, floored at `64 * epsilon`.
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `x * ln(x)` with the convention `0 * ln(0) = 0`.
pub(crate) fn xlogx<S: Scalar>(x: S) -> S {
    if x <= S::zero() {
        S::zero()
    } else {
        x * x.ln()
    }
}

/// Stable `ln(sum(exp(xs)))` with a single shift by the maximum.
///
/// Returns `-inf` for an empty slice or when every term is `-inf`.
pub fn log_sum_exp<S: Scalar>(xs: &[S]) -> S {
    let max = xs.iter().copied().fold(S::neg_infinity(), S::max);
    if max == S::neg_infinity() {
        return max;
    }
    if max == S::infinity() {
        return max;
    }
    let sum: S = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive_on_small_inputs() {
        let xs = [0.1_f64, -2.0, 3.5];
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-14);
    }

    #[test]
    fn lse_survives_large_exponents() {
        let xs = [1000.0_f64, 1000.0];
        assert!((log_sum_exp(&xs) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn tolerance_floor_applies_to_f32() {
        assert!(f32::tol(1e-13) > 1e-6);
        assert_eq!(f64::tol(1e-8), 1e-8);
    }
}
