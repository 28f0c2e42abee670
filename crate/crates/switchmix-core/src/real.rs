//! Scalar abstraction and small numeric helpers.
//!
//! Everything in the crate is generic over [`Real`], a blanket trait that
//! `f32` and `f64` satisfy. All probability mass lives in the natural-log
//! domain; [`log_sum_exp`] is the one primitive the weight algebra needs.

use std::fmt;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<Self>
        + fmt::Debug
        + fmt::Display
        + fmt::LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Convert a `usize` count into the scalar type.
#[inline]
pub fn real_usize<F: Real>(n: usize) -> F {
    F::from_usize(n).expect("usize representable in scalar type")
}

/// Convert an `f64` constant into the scalar type.
#[inline]
pub fn real_f64<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Numerically stable `ln(sum_i exp(values[i]))`.
///
/// Returns negative infinity for an empty slice, matching zero total mass.
pub fn log_sum_exp<F: Real>(values: &[F]) -> F {
    let max = values
        .iter()
        .copied()
        .fold(F::neg_infinity(), |a, b| if b > a { b } else { a });
    if !max.is_finite() {
        // Empty, all -inf, or a stray +inf: the max is already the answer.
        return max;
    }
    let mut sum = F::zero();
    for &v in values {
        sum += (v - max).exp();
    }
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))` without materialising a slice.
#[inline]
pub fn log_add_exp<F: Real>(a: F, b: F) -> F {
    if a == F::neg_infinity() {
        return b;
    }
    if b == F::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (F::one() + (lo - hi).exp()).ln()
}

/// Clamp a scalar into `[lo, hi]`.
#[inline]
pub fn clamp<F: Real>(x: F, lo: F, hi: F) -> F {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Exact binomial coefficient in integer arithmetic.
///
/// Panics on overflow; intended for the small horizons of the exhaustive
/// scheme where `n <= 64` comfortably fits in `u128`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).expect("binomial overflow");
        acc /= (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let vals = [-1.0f64, -2.0, -3.0];
        let direct: f64 = vals.iter().map(|v| v.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&vals) - direct).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_handles_large_shifts() {
        let vals = [-1000.0f64, -1000.5];
        let got = log_sum_exp(&vals);
        let expect = -1000.0 + (1.0 + (-0.5f64).exp()).ln();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_empty_is_neg_infinity() {
        let vals: [f64; 0] = [];
        assert_eq!(log_sum_exp(&vals), f64::NEG_INFINITY);
    }

    #[test]
    fn log_add_exp_agrees_with_slice_version() {
        let got = log_add_exp(-3.0f64, -1.2);
        assert!((got - log_sum_exp(&[-3.0, -1.2])).abs() < 1e-15);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(3, 2), 3);
    }
}
