//! Scalar abstraction and small numeric helpers.
//!
//! The mathematical kernels (auxiliary functions, one-dimensional
//! optimizers, closed-form transformations) are generic over [`Real`] so
//! they work with `f32` as well as `f64`. Everything assembled on top of
//! them (risk engine, solvers, simulation) is pinned to the crate-level
//! [`crate::Scalar`] alias, since the advertised tolerances assume double
//! precision.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::ops::AddAssign;

/// Floating-point scalar usable by the generic kernels.
pub trait Real:
    Float + FromPrimitive + AddAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64` literals.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal conversion")
    }

    fn half() -> Self {
        Self::of(0.5)
    }

    fn two() -> Self {
        Self::of(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// ln(1 + e^x) without overflow for large |x|.
pub fn log1p_exp<R: Real>(x: R) -> R {
    if x > R::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// x * ln(x) extended by continuity with 0 at x = 0.
pub fn xlnx<R: Real>(x: R) -> R {
    if x <= R::zero() {
        R::zero()
    } else {
        x * x.ln()
    }
}

/// Generalized power mean ((a^{1/s} + b^{1/s})/2)^s for a, b > 0 and
/// s in (0, 2], evaluated in the log domain so that small `s` does not
/// overflow the intermediate powers.
pub fn power_mean<R: Real>(a: R, b: R, s: R) -> R {
    debug_assert!(s > R::zero());
    if a <= R::zero() || b <= R::zero() {
        // One argument vanishing: ((a^{1/s})/2)^s = a / 2^s.
        let live = a.max(b);
        return live / R::two().powf(s);
    }
    let (la, lb) = (a.ln(), b.ln());
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    let r = s.recip();
    // ((e^{r hi} + e^{r lo})/2)^{1/r} = e^{hi + s (ln(1 + e^{r(lo-hi)}) - ln 2)}
    (hi + s * (log1p_exp(r * (lo - hi)) - R::two().ln())).exp()
}

/// Kahan-compensated accumulator; reduction order is the caller's contract.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }

    /// Merge another accumulator; used for fixed-order shard reduction.
    pub fn merge(&mut self, other: &Kahan) {
        self.add(other.sum);
        self.add(other.carry);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1p_exp_is_stable() {
        assert!((log1p_exp(0.0f64) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((log1p_exp(800.0f64) - 800.0).abs() < 1e-12);
        assert!(log1p_exp(-800.0f64) >= 0.0);
        let x = 0.3f64;
        assert!((log1p_exp(x) - (1.0 + x.exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn power_mean_matches_direct_evaluation() {
        let direct = |a: f64, b: f64, s: f64| ((a.powf(1.0 / s) + b.powf(1.0 / s)) / 2.0).powf(s);
        for &(a, b, s) in &[(1.6, 0.4, 0.5), (1.9, 0.1, 1.0), (1.2, 0.8, 2.0)] {
            assert!((power_mean(a, b, s) - direct(a, b, s)).abs() < 1e-12);
        }
        // Tiny s regime where the direct form overflows.
        let near_max = power_mean(1.9f64, 0.1, 1e-6);
        assert!((near_max - 1.9).abs() < 1e-4);
    }

    #[test]
    fn power_mean_works_in_f32() {
        let v = power_mean(1.5f32, 0.5, 1.0);
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kahan_compensates() {
        let mut acc = Kahan::default();
        for _ in 0..1_000_000 {
            acc.add(0.1);
        }
        assert!((acc.total() - 100_000.0).abs() < 1e-7);
    }
}
