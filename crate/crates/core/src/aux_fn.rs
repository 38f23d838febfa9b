//! Auxiliary scalar functions: the atoms every loss and transformation is
//! built from.
//!
//! Binary margin entries (hinge, logistic2, exponential, quadratic,
//! sigmoid, rho-margin) use the margin orientation: nonincreasing in t,
//! upper-bounding the 0/1 indicator. The base-2 logarithm in `logistic2`
//! is part of its definition; multi-class entries (neg_log, gen_ce, ...)
//! use natural logs. Mixing bases inside one construction is rejected at
//! the call sites that care (see the catalog constructors).

use crate::error::{HcbError, Result};
use crate::num::{log1p_exp, Real};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBase {
    Two,
    Natural,
}

/// Shape certificates carried by an auxiliary function.
#[derive(Clone, Copy, Debug, Default)]
pub struct AuxFlags {
    pub convex: bool,
    /// Margin-catalog entries are nonincreasing; constrained-direction
    /// entries keep the flag false and document their orientation.
    pub nonincreasing: bool,
    pub twice_differentiable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AuxId {
    Hinge,
    Logistic2,
    Exponential,
    Quadratic,
    Sigmoid { k: f64 },
    RhoMargin { rho: f64 },
    NegLog,
    InvMinusOne,
    GenCe { q: f64 },
    OneMinus,
    Squared,
    SqHinge,
    Custom(&'static str),
}

impl fmt::Display for AuxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxId::Hinge => write!(f, "hinge"),
            AuxId::Logistic2 => write!(f, "logistic2"),
            AuxId::Exponential => write!(f, "exponential"),
            AuxId::Quadratic => write!(f, "quadratic"),
            AuxId::Sigmoid { k } => write!(f, "sigmoid(k={k})"),
            AuxId::RhoMargin { rho } => write!(f, "rho_margin(rho={rho})"),
            AuxId::NegLog => write!(f, "neg_log"),
            AuxId::InvMinusOne => write!(f, "inv_minus_one"),
            AuxId::GenCe { q } => write!(f, "gen_ce(q={q})"),
            AuxId::OneMinus => write!(f, "one_minus"),
            AuxId::Squared => write!(f, "squared"),
            AuxId::SqHinge => write!(f, "sq_hinge"),
            AuxId::Custom(name) => write!(f, "custom({name})"),
        }
    }
}

type ScalarFn<R> = Arc<dyn Fn(R) -> R + Send + Sync>;

/// A convex/concave scalar function with optional derivatives.
#[derive(Clone)]
pub struct AuxiliaryFunction<R: Real = crate::Scalar> {
    pub id: AuxId,
    value: ScalarFn<R>,
    derivative: Option<ScalarFn<R>>,
    second_derivative: Option<ScalarFn<R>>,
    pub flags: AuxFlags,
    pub log_base: LogBase,
    /// Closed domain on which `value` is finite; evaluation clamps are the
    /// caller's job, this is for the finite-difference self-checks.
    pub domain: (f64, f64),
}

impl<R: Real> fmt::Debug for AuxiliaryFunction<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AuxiliaryFunction")
            .field("id", &self.id)
            .field("flags", &self.flags)
            .field("log_base", &self.log_base)
            .finish()
    }
}

impl<R: Real> AuxiliaryFunction<R> {
    pub fn value(&self, t: R) -> R {
        (self.value)(t)
    }

    pub fn derivative(&self, t: R) -> Option<R> {
        self.derivative.as_ref().map(|d| d(t))
    }

    pub fn second_derivative(&self, t: R) -> Option<R> {
        self.second_derivative.as_ref().map(|d| d(t))
    }

    pub fn custom(
        name: &'static str,
        value: impl Fn(R) -> R + Send + Sync + 'static,
        flags: AuxFlags,
        log_base: LogBase,
        domain: (f64, f64),
    ) -> Self {
        Self {
            id: AuxId::Custom(name),
            value: Arc::new(value),
            derivative: None,
            second_derivative: None,
            flags,
            log_base,
            domain,
        }
    }

    /// max{0, 1 - t}
    pub fn hinge() -> Self {
        Self {
            id: AuxId::Hinge,
            value: Arc::new(|t: R| (R::one() - t).max(R::zero())),
            derivative: Some(Arc::new(|t: R| {
                if t < R::one() {
                    -R::one()
                } else {
                    R::zero()
                }
            })),
            second_derivative: None,
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: false },
            log_base: LogBase::Two,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// log2(1 + e^{-t})
    pub fn logistic2() -> Self {
        let ln2 = R::two().ln();
        Self {
            id: AuxId::Logistic2,
            value: Arc::new(move |t: R| log1p_exp(-t) / ln2),
            derivative: Some(Arc::new(move |t: R| -((R::one() + t.exp()) * ln2).recip())),
            second_derivative: Some(Arc::new(move |t: R| {
                let s = (R::one() + (-t).exp()).recip(); // sigmoid(t)
                s * (R::one() - s) / ln2
            })),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Two,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// e^{-t}
    pub fn exponential() -> Self {
        Self {
            id: AuxId::Exponential,
            value: Arc::new(|t: R| (-t).exp()),
            derivative: Some(Arc::new(|t: R| -(-t).exp())),
            second_derivative: Some(Arc::new(|t: R| (-t).exp())),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Two,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// (1 - t)^2 for t <= 1, else 0 (squared hinge in margin form).
    pub fn quadratic() -> Self {
        Self {
            id: AuxId::Quadratic,
            value: Arc::new(|t: R| {
                if t <= R::one() {
                    (R::one() - t) * (R::one() - t)
                } else {
                    R::zero()
                }
            }),
            derivative: Some(Arc::new(|t: R| {
                if t <= R::one() {
                    R::two() * (t - R::one())
                } else {
                    R::zero()
                }
            })),
            second_derivative: Some(Arc::new(|t: R| {
                if t <= R::one() {
                    R::two()
                } else {
                    R::zero()
                }
            })),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Two,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// 1 - tanh(k t), k > 0. Symmetric: value(t) + value(-t) = 2.
    pub fn sigmoid(k: f64) -> Self {
        let kk = R::of(k);
        Self {
            id: AuxId::Sigmoid { k },
            value: Arc::new(move |t: R| R::one() - (kk * t).tanh()),
            derivative: Some(Arc::new(move |t: R| {
                let c = (kk * t).cosh();
                -kk / (c * c)
            })),
            second_derivative: Some(Arc::new(move |t: R| {
                let th = (kk * t).tanh();
                let c = (kk * t).cosh();
                R::two() * kk * kk * th / (c * c)
            })),
            flags: AuxFlags { convex: false, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Two,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// min{1, max{0, 1 - t/rho}}, rho > 0.
    pub fn rho_margin(rho: f64) -> Self {
        let r = R::of(rho);
        Self {
            id: AuxId::RhoMargin { rho },
            value: Arc::new(move |t: R| (R::one() - t / r).max(R::zero()).min(R::one())),
            derivative: Some(Arc::new(move |t: R| {
                if t > R::zero() && t < r {
                    -r.recip()
                } else {
                    R::zero()
                }
            })),
            second_derivative: None,
            flags: AuxFlags { convex: false, nonincreasing: true, twice_differentiable: false },
            log_base: LogBase::Two,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// -ln(t) on (0, inf); comp-sum auxiliary of the logistic loss.
    pub fn neg_log() -> Self {
        Self {
            id: AuxId::NegLog,
            value: Arc::new(|t: R| -t.ln()),
            derivative: Some(Arc::new(|t: R| -t.recip())),
            second_derivative: Some(Arc::new(|t: R| (t * t).recip())),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Natural,
            domain: (0.0, 1.0),
        }
    }

    /// 1/t - 1 on (0, 1]; comp-sum auxiliary of the sum-exponential loss.
    pub fn inv_minus_one() -> Self {
        Self {
            id: AuxId::InvMinusOne,
            value: Arc::new(|t: R| t.recip() - R::one()),
            derivative: Some(Arc::new(|t: R| -(t * t).recip())),
            second_derivative: Some(Arc::new(|t: R| R::two() / (t * t * t))),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Natural,
            domain: (0.0, 1.0),
        }
    }

    /// (1 - t^q)/q with q in (0, 1); generalized cross-entropy auxiliary.
    pub fn gen_ce(q: f64) -> Result<Self> {
        if !(0.0 < q && q < 1.0) {
            return Err(HcbError::InvalidParameter(format!("gen_ce requires q in (0,1), got {q}")));
        }
        let qq = R::of(q);
        Ok(Self {
            id: AuxId::GenCe { q },
            value: Arc::new(move |t: R| (R::one() - t.powf(qq)) / qq),
            derivative: Some(Arc::new(move |t: R| -t.powf(qq - R::one()))),
            second_derivative: Some(Arc::new(move |t: R| {
                (R::one() - qq) * t.powf(qq - R::two())
            })),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Natural,
            domain: (0.0, 1.0),
        })
    }

    /// 1 - t; mean-absolute-error auxiliary.
    pub fn one_minus() -> Self {
        Self {
            id: AuxId::OneMinus,
            value: Arc::new(|t: R| R::one() - t),
            derivative: Some(Arc::new(|_| -R::one())),
            second_derivative: Some(Arc::new(|_| R::zero())),
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: true },
            log_base: LogBase::Natural,
            domain: (0.0, 1.0),
        }
    }

    /// (1 - t)^2 without the indicator cut-off.
    pub fn squared() -> Self {
        Self {
            id: AuxId::Squared,
            value: Arc::new(|t: R| (R::one() - t) * (R::one() - t)),
            derivative: Some(Arc::new(|t: R| R::two() * (t - R::one()))),
            second_derivative: Some(Arc::new(|_| R::two())),
            flags: AuxFlags { convex: true, nonincreasing: false, twice_differentiable: true },
            log_base: LogBase::Natural,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// max{0, 1 - t}^2; constrained-direction squared hinge.
    pub fn sq_hinge() -> Self {
        Self {
            id: AuxId::SqHinge,
            value: Arc::new(|t: R| {
                let u = (R::one() - t).max(R::zero());
                u * u
            }),
            derivative: Some(Arc::new(|t: R| {
                if t < R::one() {
                    R::two() * (t - R::one())
                } else {
                    R::zero()
                }
            })),
            second_derivative: None,
            flags: AuxFlags { convex: true, nonincreasing: true, twice_differentiable: false },
            log_base: LogBase::Natural,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Midpoint convexity test on an evenly spaced grid of the given
    /// interval. Used as a guard by the solvers before they rely on
    /// unimodality of the inner problems.
    pub fn check_convex_on(&self, lo: R, hi: R, grid: usize) -> Result<()> {
        let n = grid.max(4);
        let step = (hi - lo) / R::of(n as f64);
        let tol = R::of(1e-9);
        for i in 0..(n - 1) {
            let a = lo + step * R::of(i as f64);
            let b = a + R::two() * step;
            let mid = a + step;
            let lhs = self.value(mid);
            let rhs = (self.value(a) + self.value(b)) * R::half();
            if lhs > rhs + tol * (R::one() + rhs.abs()) {
                return Err(HcbError::NonConvex(mid.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Vec<AuxiliaryFunction<f64>> {
        vec![
            AuxiliaryFunction::hinge(),
            AuxiliaryFunction::logistic2(),
            AuxiliaryFunction::exponential(),
            AuxiliaryFunction::quadratic(),
            AuxiliaryFunction::sigmoid(1.0),
            AuxiliaryFunction::rho_margin(0.8),
            AuxiliaryFunction::neg_log(),
            AuxiliaryFunction::inv_minus_one(),
            AuxiliaryFunction::gen_ce(0.7).unwrap(),
            AuxiliaryFunction::one_minus(),
            AuxiliaryFunction::squared(),
            AuxiliaryFunction::sq_hinge(),
        ]
    }

    #[test]
    fn table_values_are_exact() {
        let hinge = AuxiliaryFunction::<f64>::hinge();
        assert_eq!(hinge.value(0.0), 1.0);
        assert_eq!(hinge.value(2.0), 0.0);
        let log2 = AuxiliaryFunction::<f64>::logistic2();
        assert!((log2.value(0.0) - 1.0).abs() < 1e-15);
        let expf = AuxiliaryFunction::<f64>::exponential();
        assert!((expf.value(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let quad = AuxiliaryFunction::<f64>::quadratic();
        assert_eq!(quad.value(-1.0), 4.0);
        assert_eq!(quad.value(1.5), 0.0);
        let sig = AuxiliaryFunction::<f64>::sigmoid(2.0);
        assert!((sig.value(0.5) - (1.0 - 1.0f64.tanh())).abs() < 1e-15);
        let rho = AuxiliaryFunction::<f64>::rho_margin(0.5);
        assert!((rho.value(0.25) - 0.5).abs() < 1e-15);
        assert_eq!(rho.value(-3.0), 1.0);
        assert_eq!(rho.value(0.9), 0.0);
    }

    #[test]
    fn values_are_finite_and_nonnegative_on_domain() {
        for aux in catalog() {
            let lo = aux.domain.0.max(-30.0) + 1e-6;
            let hi = aux.domain.1.min(30.0);
            for i in 0..200 {
                let t = lo + (hi - lo) * (i as f64) / 199.0;
                let v = aux.value(t);
                assert!(v.is_finite(), "{} not finite at {}", aux.id, t);
                if aux.flags.nonincreasing {
                    assert!(v >= -1e-12, "{} negative at {}", aux.id, t);
                }
            }
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        // 64 quasi-random domain points per entry, relative tolerance 1e-6.
        for aux in catalog() {
            let Some(_) = aux.derivative(0.1) else { continue };
            let lo = aux.domain.0.max(-8.0);
            let hi = aux.domain.1.min(8.0);
            let mut state = 0.123_456_789_f64;
            for _ in 0..64 {
                state = (state * 9301.0 + 49297.0) % 233280.0;
                let u = state / 233280.0;
                let t = lo + (hi - lo) * (0.02 + 0.96 * u);
                let h = 1e-6 * (1.0 + t.abs());
                if t - h <= lo || t + h >= hi {
                    continue;
                }
                let fd = (aux.value(t + h) - aux.value(t - h)) / (2.0 * h);
                let d = aux.derivative(t).unwrap();
                let scale = 1.0_f64.max(d.abs());
                assert!(
                    (fd - d).abs() <= 1e-6 * scale + 1e-9,
                    "{}: derivative mismatch at t={t}: fd={fd}, d={d}",
                    aux.id
                );
            }
        }
    }

    #[test]
    fn margin_entries_upper_bound_indicator() {
        // Phi(t) >= 1_{t<=0} on a 10^3-point grid for the margin catalog.
        for aux in [
            AuxiliaryFunction::<f64>::hinge(),
            AuxiliaryFunction::logistic2(),
            AuxiliaryFunction::exponential(),
            AuxiliaryFunction::quadratic(),
            AuxiliaryFunction::sigmoid(1.0),
            AuxiliaryFunction::rho_margin(1.0),
        ] {
            for i in 0..1000 {
                let t = -5.0 + 10.0 * (i as f64) / 999.0;
                let ind = if t <= 0.0 { 1.0 } else { 0.0 };
                assert!(aux.value(t) >= ind - 1e-12, "{} below indicator at {}", aux.id, t);
            }
        }
    }

    #[test]
    fn convexity_guard_accepts_and_rejects() {
        AuxiliaryFunction::<f64>::neg_log().check_convex_on(0.01, 1.0, 128).unwrap();
        AuxiliaryFunction::<f64>::hinge().check_convex_on(-3.0, 3.0, 128).unwrap();
        let err = AuxiliaryFunction::<f64>::sigmoid(1.0)
            .check_convex_on(-3.0, 3.0, 128)
            .unwrap_err();
        assert!(matches!(err, HcbError::NonConvex(_)));
    }

    #[test]
    fn gen_ce_rejects_bad_q() {
        assert!(AuxiliaryFunction::<f64>::gen_ce(1.0).is_err());
        assert!(AuxiliaryFunction::<f64>::gen_ce(0.0).is_err());
    }
}
