//! Closed-form estimation-error transformation curves, their inverses,
//! polynomial approximations, and noise-modified variants.
//!
//! A curve maps t in [0, 1] to the tight surrogate-regret floor T(t).
//! Inversion defaults to bisection on [0, 1]; entries with an exact
//! inverse install it as a closed form. Every constructor tags the curve
//! with a family/parameter id so reports can name what they evaluated.

use crate::aux_fn::AuxId;
use crate::error::{HcbError, Result};
use crate::loss::TAU_BRANCH_EPS;
use crate::num::{power_mean, xlnx};
use crate::opt::bisect_nondecreasing;
use crate::Scalar;
use std::sync::Arc;

const DOMAIN_SLACK: Scalar = 1e-9;
const BISECT_ITERS: usize = 80;

type CurveFn = Arc<dyn Fn(Scalar) -> Scalar + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseMode {
    ClosedForm,
    Bisection,
}

#[derive(Clone, Copy, Debug)]
pub struct CurveFlags {
    pub convex: bool,
    pub nondecreasing: bool,
    pub zero_at_zero: bool,
}

/// An evaluable, invertible transformation t in \[0,1\] -> T(t).
#[derive(Clone)]
pub struct TransformCurve {
    eval: CurveFn,
    inverse: Option<CurveFn>,
    pub flags: CurveFlags,
    pub source_tag: String,
}

impl std::fmt::Debug for TransformCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformCurve")
            .field("source_tag", &self.source_tag)
            .field("flags", &self.flags)
            .field("inverse_mode", &self.inverse_mode())
            .finish()
    }
}

impl TransformCurve {
    pub fn new(
        tag: impl Into<String>,
        flags: CurveFlags,
        eval: impl Fn(Scalar) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(eval), inverse: None, flags, source_tag: tag.into() }
    }

    pub fn with_inverse(mut self, inv: impl Fn(Scalar) -> Scalar + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    pub fn inverse_mode(&self) -> InverseMode {
        if self.inverse.is_some() {
            InverseMode::ClosedForm
        } else {
            InverseMode::Bisection
        }
    }

    /// Evaluate T at t, clamping inputs within the domain slack and
    /// refusing anything further out.
    pub fn eval(&self, t: Scalar) -> Result<Scalar> {
        if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&t) {
            return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
        }
        Ok((self.eval)(t.clamp(0.0, 1.0)))
    }

    /// Evaluate without the domain guard; for internal grids.
    pub fn eval_clamped(&self, t: Scalar) -> Scalar {
        (self.eval)(t.clamp(0.0, 1.0))
    }

    /// Gamma = T^{-1}: closed form when installed, else bisection on
    /// [0, 1] using monotonicity.
    pub fn invert(&self, s: Scalar) -> Scalar {
        match &self.inverse {
            Some(inv) => inv(s),
            None => {
                let f = self.eval.clone();
                bisect_nondecreasing(move |t| f(t), s, 0.0, 1.0, BISECT_ITERS)
            }
        }
    }

    /// Certificate suite: T(0) = 0, monotone, and midpoint-convex on a
    /// 10^3-point grid, per the declared flags.
    pub fn certify(&self) -> Result<()> {
        const GRID: usize = 1000;
        let v0 = self.eval_clamped(0.0);
        if self.flags.zero_at_zero && v0.abs() > 1e-12 {
            return Err(HcbError::ConstraintViolation(format!(
                "{}: T(0) = {v0}, expected 0",
                self.source_tag
            )));
        }
        let mut prev = v0;
        for i in 1..=GRID {
            let t = i as Scalar / GRID as Scalar;
            let v = self.eval_clamped(t);
            if !v.is_finite() {
                return Err(HcbError::NonFinite("transform curve"));
            }
            if self.flags.nondecreasing && v < prev - 1e-12 {
                return Err(HcbError::ConstraintViolation(format!(
                    "{}: not nondecreasing at t = {t}",
                    self.source_tag
                )));
            }
            prev = v;
        }
        if self.flags.convex {
            for i in 0..(GRID - 1) {
                let a = i as Scalar / GRID as Scalar;
                let b = (i + 2) as Scalar / GRID as Scalar;
                let mid = (i + 1) as Scalar / GRID as Scalar;
                let lhs = self.eval_clamped(mid);
                let rhs = 0.5 * (self.eval_clamped(a) + self.eval_clamped(b));
                if lhs > rhs + 1e-9 {
                    return Err(HcbError::ConstraintViolation(format!(
                        "{}: midpoint convexity fails at t = {mid}",
                        self.source_tag
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Binary linear-class transformation for the margin catalog; the
/// one-hidden-layer variant is the same curve with B replaced by
/// Lambda * B, so callers pass the substituted bound.
pub fn binary_linear_transform(loss_id: &AuxId, b_bound: Scalar) -> Result<TransformCurve> {
    if b_bound <= 0.0 {
        return Err(HcbError::InvalidParameter("B must be positive".into()));
    }
    let b = b_bound;
    let tag = format!("binary-linear/{loss_id}(B={b})");
    let flags = CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true };
    let curve = match loss_id {
        AuxId::Hinge => {
            let c = b.min(1.0);
            TransformCurve::new(tag, flags, move |t| c * t).with_inverse(move |s| s / c)
        }
        AuxId::Logistic2 => {
            let knee = (b.exp() - 1.0) / (b.exp() + 1.0);
            TransformCurve::new(tag, flags, move |t| {
                if t <= knee {
                    0.5 * (xlnx(1.0 + t) + xlnx(1.0 - t)) / std::f64::consts::LN_2
                } else {
                    1.0 - 0.5 * (t + 1.0) * (1.0 + (-b).exp()).log2()
                        - 0.5 * (1.0 - t) * (1.0 + b.exp()).log2()
                }
            })
        }
        AuxId::Exponential => {
            let knee = ((2.0 * b).exp() - 1.0) / ((2.0 * b).exp() + 1.0);
            TransformCurve::new(tag, flags, move |t| {
                if t <= knee {
                    1.0 - (1.0 - t * t).sqrt()
                } else {
                    1.0 - 0.5 * (t + 1.0) * (-b).exp() - 0.5 * (1.0 - t) * b.exp()
                }
            })
        }
        AuxId::Quadratic => TransformCurve::new(tag, flags, move |t| {
            if t <= b {
                t * t
            } else {
                2.0 * b * t - b * b
            }
        })
        .with_inverse(move |s| if s <= b * b { s.sqrt() } else { s / (2.0 * b) + b / 2.0 }),
        AuxId::Sigmoid { k } => {
            let c = (k * b).tanh();
            TransformCurve::new(tag, flags, move |t| c * t).with_inverse(move |s| s / c)
        }
        AuxId::RhoMargin { rho } => {
            let c = b.min(*rho) / rho;
            TransformCurve::new(tag, flags, move |t| c * t).with_inverse(move |s| s / c)
        }
        other => {
            return Err(HcbError::NoClosedForm {
                loss: format!("margin/{other}"),
                class: "binary-linear".into(),
            })
        }
    };
    Ok(curve)
}

/// Relaxed inverse upper bounds for the logistic and exponential binary
/// curves: sqrt(2 s) below the knee image, then a linear tail.
pub fn binary_linear_relaxed_inverse(loss_id: &AuxId, b_bound: Scalar) -> Result<TransformCurve> {
    let b = b_bound;
    let (knee, slope) = match loss_id {
        AuxId::Logistic2 => {
            let k = (b.exp() - 1.0) / (b.exp() + 1.0);
            (k, 2.0 * (b.exp() + 1.0) / (b.exp() - 1.0))
        }
        AuxId::Exponential => {
            let k = ((2.0 * b).exp() - 1.0) / ((2.0 * b).exp() + 1.0);
            (k, 2.0 * ((2.0 * b).exp() + 1.0) / ((2.0 * b).exp() - 1.0))
        }
        other => {
            return Err(HcbError::NoClosedForm {
                loss: format!("relaxed-inverse/{other}"),
                class: "binary-linear".into(),
            })
        }
    };
    let threshold = 0.5 * knee * knee;
    Ok(TransformCurve::new(
        format!("binary-linear-relaxed-inverse/{loss_id}(B={b})"),
        CurveFlags { convex: false, nondecreasing: true, zero_at_zero: true },
        move |s| if s <= threshold { (2.0 * s).sqrt() } else { slope * s },
    ))
}

/// Comp-sum transformation curve in tau, with the branch structure
/// selected by |tau - c| < 1e-12 at c = 1 and c = 2 where naive
/// evaluation is 0/0.
pub fn comp_sum_transform(tau: Scalar, n: usize) -> Result<TransformCurve> {
    if tau < 0.0 || n < 2 {
        return Err(HcbError::InvalidParameter("need tau >= 0 and n >= 2".into()));
    }
    let nn = n as Scalar;
    let flags = CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true };
    let tag = format!("comp-sum(tau={tau},n={n})");
    let eval = move |beta: Scalar| -> Scalar {
        if (tau - 1.0).abs() < TAU_BRANCH_EPS {
            0.5 * (xlnx(1.0 + beta) + xlnx(1.0 - beta))
        } else if tau < 1.0 {
            let s = 2.0 - tau;
            let pm = power_mean(1.0 + beta, 1.0 - beta, s);
            (2.0f64).powf(1.0 - tau) / (1.0 - tau) * (1.0 - pm)
        } else if tau >= 2.0 - TAU_BRANCH_EPS {
            beta / ((tau - 1.0) * nn.powf(tau - 1.0))
        } else {
            let s = 2.0 - tau;
            let pm = power_mean(1.0 + beta, 1.0 - beta, s);
            (pm - 1.0) / ((tau - 1.0) * nn.powf(tau - 1.0))
        }
    };
    Ok(TransformCurve::new(tag, flags, eval))
}

/// Tightest-order polynomial lower bound of the comp-sum transformation
/// and its closed-form inverse upper bound.
pub fn comp_sum_poly_bounds(tau: Scalar, n: usize) -> Result<(TransformCurve, TransformCurve)> {
    if tau < 0.0 || n < 2 {
        return Err(HcbError::InvalidParameter("need tau >= 0 and n >= 2".into()));
    }
    let nn = n as Scalar;
    let flags = CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true };
    let lower = if tau < 1.0 {
        let c = (2.0f64).powf(tau) * (2.0 - tau);
        TransformCurve::new(format!("comp-sum-poly(tau={tau})"), flags, move |b| b * b / c)
    } else if tau < 2.0 {
        let c = 2.0 * nn.powf(tau - 1.0);
        TransformCurve::new(format!("comp-sum-poly(tau={tau},n={n})"), flags, move |b| b * b / c)
    } else {
        let c = (tau - 1.0) * nn.powf(tau - 1.0);
        TransformCurve::new(format!("comp-sum-poly(tau={tau},n={n})"), flags, move |b| b / c)
    };
    let inv_flags = CurveFlags { convex: false, nondecreasing: true, zero_at_zero: true };
    let inverse_upper = if tau < 1.0 {
        let c = (2.0f64).powf(tau) * (2.0 - tau);
        TransformCurve::new(format!("comp-sum-poly-inverse(tau={tau})"), inv_flags, move |s| {
            (c * s).sqrt()
        })
    } else if tau < 2.0 {
        let c = 2.0 * nn.powf(tau - 1.0);
        TransformCurve::new(
            format!("comp-sum-poly-inverse(tau={tau},n={n})"),
            inv_flags,
            move |s| (c * s).sqrt(),
        )
    } else {
        let c = (tau - 1.0) * nn.powf(tau - 1.0);
        TransformCurve::new(
            format!("comp-sum-poly-inverse(tau={tau},n={n})"),
            inv_flags,
            move |s| c * s,
        )
    };
    Ok((lower, inverse_upper))
}

/// Tabulated multi-class transformation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFamily {
    /// Softmax-composed losses for complete symmetric classes.
    CompSumPhi,
    /// Zero-sum constrained losses for complete symmetric classes.
    CstndPhi,
    /// One-vs-all sum losses for complete symmetric classes.
    SumLoss,
    /// Max rho-margin loss; parameterized by the class margin reach.
    MaxRho,
}

/// Parameters for [`multiclass_table_transform`]. `b_bound` and `lambda`
/// only matter for the max-rho family.
#[derive(Clone, Copy, Debug, Default)]
pub struct TableParams {
    pub b_bound: Option<Scalar>,
    pub lambda: Option<Scalar>,
}

/// Exact tabulated transformation for (family, auxiliary id).
pub fn multiclass_table_transform(
    family: TableFamily,
    phi_id: &AuxId,
    n: usize,
    params: TableParams,
) -> Result<TransformCurve> {
    let flags = CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true };
    let nn = n as Scalar;
    let unknown = || HcbError::NoClosedForm {
        loss: format!("{family:?}/{phi_id}"),
        class: "complete-symmetric".into(),
    };
    let curve = match family {
        TableFamily::CompSumPhi => match phi_id {
            AuxId::NegLog => TransformCurve::new(
                "table/comp-sum/neg_log",
                flags,
                |t| 0.5 * (xlnx(1.0 + t) + xlnx(1.0 - t)),
            ),
            AuxId::InvMinusOne => TransformCurve::new(
                "table/comp-sum/inv_minus_one",
                flags,
                |t| 1.0 - (1.0 - t * t).sqrt(),
            ),
            AuxId::GenCe { q } => {
                let q = *q;
                if !(0.0 < q && q < 1.0) {
                    return Err(HcbError::InvalidParameter("gen_ce needs q in (0,1)".into()));
                }
                let scale = 1.0 / (q * nn.powf(q));
                TransformCurve::new(
                    format!("table/comp-sum/gen_ce(q={q},n={n})"),
                    flags,
                    move |t| scale * (power_mean(1.0 + t, 1.0 - t, 1.0 - q) - 1.0),
                )
            }
            AuxId::OneMinus => TransformCurve::new(
                format!("table/comp-sum/one_minus(n={n})"),
                flags,
                move |t| t / nn,
            )
            .with_inverse(move |s| s * nn),
            AuxId::Squared => {
                TransformCurve::new("table/comp-sum/squared", flags, |t| t * t / 4.0)
                    .with_inverse(|s| (4.0 * s).sqrt().min(1.0))
            }
            _ => return Err(unknown()),
        },
        TableFamily::CstndPhi => match phi_id {
            AuxId::Exponential => TransformCurve::new(
                "table/constrained/exponential",
                flags,
                |t| 2.0 - (4.0 - t * t).sqrt(),
            ),
            AuxId::Hinge => {
                TransformCurve::new("table/constrained/hinge", flags, |t| t)
                    .with_inverse(|s| s)
            }
            AuxId::SqHinge | AuxId::Squared => TransformCurve::new(
                format!("table/constrained/{phi_id}"),
                flags,
                |t| t * t / 2.0,
            )
            .with_inverse(|s| (2.0 * s).sqrt().min(1.0)),
            AuxId::RhoMargin { .. } => {
                TransformCurve::new("table/constrained/rho_margin", flags, |t| t)
                    .with_inverse(|s| s)
            }
            _ => return Err(unknown()),
        },
        TableFamily::SumLoss => match phi_id {
            AuxId::SqHinge => {
                TransformCurve::new("table/sum/sq_hinge", flags, |t| t * t)
                    .with_inverse(|s| s.sqrt().min(1.0))
            }
            AuxId::Exponential => {
                TransformCurve::new("table/sum/exponential", flags, |t| t * t / 2.0)
                    .with_inverse(|s| (2.0 * s).sqrt().min(1.0))
            }
            AuxId::RhoMargin { .. } => {
                TransformCurve::new("table/sum/rho_margin", flags, |t| t).with_inverse(|s| s)
            }
            _ => return Err(unknown()),
        },
        TableFamily::MaxRho => match phi_id {
            AuxId::RhoMargin { rho } => {
                let b = params
                    .b_bound
                    .ok_or_else(|| HcbError::InvalidParameter("max_rho needs B".into()))?;
                let reach = params.lambda.map_or(b, |l| l * b);
                let c = (2.0 * reach / rho).min(1.0);
                TransformCurve::new(
                    format!("table/max-rho(rho={rho},reach={reach})"),
                    flags,
                    move |t| c * t,
                )
                .with_inverse(move |s| s / c)
            }
            _ => return Err(unknown()),
        },
    };
    Ok(curve)
}

/// Supremum-based rho-margin transformation for binary linear classes
/// (one-hidden-layer variant via B -> Lambda B).
pub fn adversarial_rho_transform(
    b_bound: Scalar,
    rho: Scalar,
    lambda: Option<Scalar>,
) -> Result<TransformCurve> {
    if b_bound <= 0.0 || rho <= 0.0 {
        return Err(HcbError::InvalidParameter("need B > 0 and rho > 0".into()));
    }
    let reach = lambda.map_or(b_bound, |l| l * b_bound);
    let c = reach.min(rho) / rho;
    Ok(TransformCurve::new(
        format!("adversarial-rho(B={reach},rho={rho})"),
        CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true },
        move |t| c * t,
    )
    .with_inverse(move |s| s / c))
}

/// Noise-modified transformation: under margin-noise level beta the curve
/// keeps its values on [2 beta, 1] and is replaced by the chord through
/// the origin below. In the adversarial variant the curve is the minimum
/// of two chord-modified pieces, with the first chord anchored at
/// 1/2 + beta.
pub fn massart_modified(
    base: &TransformCurve,
    beta: Scalar,
    adversarial: bool,
) -> Result<TransformCurve> {
    if !(0.0 < beta && beta <= 0.5) {
        return Err(HcbError::InvalidParameter(format!("beta = {beta} outside (0, 1/2]")));
    }
    let tag = format!("massart(beta={beta},adv={adversarial})/{}", base.source_tag);
    let flags = base.flags;
    let b1 = base.clone();
    if !adversarial {
        let knee = 2.0 * beta;
        let slope = base.eval_clamped(knee) / knee;
        Ok(TransformCurve::new(tag, flags, move |t| {
            if t >= knee {
                b1.eval_clamped(t)
            } else {
                slope * t
            }
        }))
    } else {
        let knee1 = 0.5 + beta;
        let slope1 = base.eval_clamped(knee1) / knee1;
        let knee2 = 2.0 * beta;
        let slope2 = base.eval_clamped(knee2) / knee2;
        Ok(TransformCurve::new(tag, flags, move |t| {
            let t1 = if t >= knee1 { b1.eval_clamped(t) } else { slope1 * t };
            let t2 = if t >= knee2 { b1.eval_clamped(t) } else { slope2 * t };
            t1.min(t2)
        }))
    }
}

/// Coefficient of the noise-regime adversarial bounds for the sup-hinge
/// and sup-sigmoid losses. These are exposed as bound coefficients, not
/// certified-tight curves.
pub fn massart_adversarial_coefficient(beta: Scalar) -> Result<Scalar> {
    if !(0.0 < beta && beta <= 0.5) {
        return Err(HcbError::InvalidParameter(format!("beta = {beta} outside (0, 1/2]")));
    }
    Ok((1.0 + 2.0 * beta) / (4.0 * beta))
}

/// Bounded-hypothesis losses with tabulated piecewise transformations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundedPsiLoss {
    Logistic,
    SumExponential,
    GenCe { q: Scalar },
    Mae,
    CstndExp,
}

/// Piecewise transformation for bounded hypothesis sets, parameterized by
/// the softmax probability range [s_min, s_max] (comp-sum family) or by
/// the score radius (constrained exponential). The class variant reads
/// those constants off the hypothesis class.
pub fn bounded_hypothesis_psi(
    loss: BoundedPsiLoss,
    class: &crate::hypothesis::HypothesisClassSpec,
) -> Result<TransformCurve> {
    match loss {
        BoundedPsiLoss::CstndExp => {
            let l = class.lambda_min().ok_or(HcbError::UnboundedClass)?;
            bounded_cstnd_exp_psi(l)
        }
        other => {
            let s_min = class.s_min().ok_or(HcbError::UnboundedClass)?;
            let s_max = class.s_max().ok_or(HcbError::UnboundedClass)?;
            bounded_psi_from_range(other, s_min, s_max)
        }
    }
}

/// Constrained-exponential piecewise transformation from the score radius.
pub fn bounded_cstnd_exp_psi(lambda_min: Scalar) -> Result<TransformCurve> {
    if lambda_min <= 0.0 {
        return Err(HcbError::DegenerateScoreRange);
    }
    let flags = CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true };
    let l = lambda_min;
    let knee = l.tanh();
    let (el, eml) = (l.exp(), (-l).exp());
    Ok(TransformCurve::new(
        format!("bounded-psi/cstnd-exp(lambda={l})"),
        flags,
        move |t| {
            if t <= knee {
                1.0 - (1.0 - t * t).sqrt()
            } else {
                0.5 * t * (el - eml) + 0.5 * (2.0 - el - eml)
            }
        },
    ))
}

/// Comp-sum-family piecewise transformations from an explicit softmax
/// probability range.
pub fn bounded_psi_from_range(
    loss: BoundedPsiLoss,
    s_min: Scalar,
    s_max: Scalar,
) -> Result<TransformCurve> {
    let flags = CurveFlags { convex: true, nondecreasing: true, zero_at_zero: true };
    {
        {
            if !(s_max > s_min) || s_min < 0.0 {
                return Err(HcbError::DegenerateScoreRange);
            }
            let other = loss;
            let tag = format!("bounded-psi/{other:?}(s_min={s_min:.6},s_max={s_max:.6})");
            let curve = match other {
                BoundedPsiLoss::Logistic => {
                    let knee = (s_max - s_min) / (s_min + s_max);
                    let lin = 0.5 * (s_max / s_min).ln();
                    let off = (2.0 * (s_max * s_min).sqrt() / (s_max + s_min)).ln();
                    TransformCurve::new(tag, flags, move |t| {
                        if t <= knee {
                            0.5 * (xlnx(1.0 + t) + xlnx(1.0 - t))
                        } else {
                            lin * t + off
                        }
                    })
                }
                BoundedPsiLoss::SumExponential => {
                    let knee = (s_max * s_max - s_min * s_min) / (s_min * s_min + s_max * s_max);
                    let lin = (s_max - s_min) / (2.0 * s_max * s_min);
                    let off = -(s_max - s_min) * (s_max - s_min)
                        / (2.0 * s_max * s_min * (s_max + s_min));
                    // The two branches only join continuously when
                    // s_min + s_max = 1 (the two-class score box); beyond
                    // that the curve keeps monotonicity but not midpoint
                    // convexity, and the flags say so.
                    let circle_at_knee = 1.0 - (1.0 - knee * knee).sqrt();
                    let joined = (circle_at_knee - (lin * knee + off)).abs() < 1e-12;
                    let flags = CurveFlags { convex: joined, ..flags };
                    TransformCurve::new(tag, flags, move |t| {
                        if t <= knee {
                            1.0 - (1.0 - t * t).sqrt()
                        } else {
                            lin * t + off
                        }
                    })
                }
                BoundedPsiLoss::GenCe { q } => {
                    if !(0.0 < q && q < 1.0) {
                        return Err(HcbError::InvalidParameter("gen_ce needs q in (0,1)".into()));
                    }
                    let knee = (s_max.powf(1.0 - q) - s_min.powf(1.0 - q))
                        / (s_min.powf(1.0 - q) + s_max.powf(1.0 - q));
                    let mid = 0.5 * (s_min + s_max);
                    let scale = mid.powf(q) / q;
                    let lin = (s_max.powf(q) - s_min.powf(q)) / (2.0 * q);
                    let off = (0.5 * (s_min.powf(q) + s_max.powf(q)) - mid.powf(q)) / q;
                    TransformCurve::new(tag, flags, move |t| {
                        if t <= knee {
                            scale * (power_mean(1.0 + t, 1.0 - t, 1.0 - q) - 1.0)
                        } else {
                            lin * t + off
                        }
                    })
                }
                BoundedPsiLoss::Mae => {
                    let c = 0.5 * (s_max - s_min);
                    TransformCurve::new(tag, flags, move |t| c * t).with_inverse(move |s| s / c)
                }
                BoundedPsiLoss::CstndExp => {
                    return Err(HcbError::UnsupportedConfiguration(
                        "constrained exponential is parameterized by the score radius".into(),
                    ))
                }
            };
            Ok(curve)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::HypothesisClassSpec;

    #[test]
    fn binary_linear_values() {
        let hinge = binary_linear_transform(&AuxId::Hinge, 0.5).unwrap();
        assert!((hinge.eval(0.4).unwrap() - 0.2).abs() < 1e-15);

        let sig = binary_linear_transform(&AuxId::Sigmoid { k: 1.0 }, 0.8).unwrap();
        assert!((sig.eval(0.5).unwrap() - 0.8f64.tanh() * 0.5).abs() < 1e-15);
        assert!((sig.eval(0.5).unwrap() - 0.33202).abs() < 5e-6);

        // Large-B logistic: first branch everywhere, T(1) = 1.
        let log = binary_linear_transform(&AuxId::Logistic2, 60.0).unwrap();
        assert!((log.eval(1.0).unwrap() - 1.0).abs() < 1e-12);

        let quad = binary_linear_transform(&AuxId::Quadratic, 0.5).unwrap();
        assert!((quad.eval(0.25).unwrap() - 0.0625).abs() < 1e-15);
        assert!((quad.eval(0.75).unwrap() - (2.0 * 0.5 * 0.75 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn binary_curves_approach_unrestricted_limits() {
        // At B = 50 the first branch covers the whole grid.
        let log = binary_linear_transform(&AuxId::Logistic2, 50.0).unwrap();
        let expf = binary_linear_transform(&AuxId::Exponential, 50.0).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let reference_log = 0.5 * (xlnx(1.0 + t) + xlnx(1.0 - t)) / std::f64::consts::LN_2;
            assert!((log.eval(t).unwrap() - reference_log).abs() < 1e-12);
            let reference_exp = 1.0 - (1.0 - t * t).sqrt();
            assert!((expf.eval(t).unwrap() - reference_exp).abs() < 1e-12);
        }
    }

    #[test]
    fn comp_sum_branch_values() {
        let t0 = comp_sum_transform(0.0, 5).unwrap();
        assert!((t0.eval(0.6).unwrap() - 0.2).abs() < 1e-9);
        let t1 = comp_sum_transform(1.0, 3).unwrap();
        assert!((t1.eval(1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
        let t2 = comp_sum_transform(2.0, 10).unwrap();
        assert!((t2.eval(0.5).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn comp_sum_is_continuous_in_tau() {
        for &(c, n) in &[(1.0, 4), (2.0, 4), (1.0, 2), (2.0, 7)] {
            let at = comp_sum_transform(c, n).unwrap();
            let below = comp_sum_transform(c - 1e-6, n).unwrap();
            let above = comp_sum_transform(c + 1e-6, n).unwrap();
            for i in 1..20 {
                let beta = i as f64 / 20.0;
                let v = at.eval(beta).unwrap();
                assert!((below.eval(beta).unwrap() - v).abs() < 1e-4, "tau -> {c}- at {beta}");
                assert!((above.eval(beta).unwrap() - v).abs() < 1e-4, "tau -> {c}+ at {beta}");
            }
        }
    }

    #[test]
    fn poly_bounds_sandwich_the_curve() {
        for &tau in &[0.0, 0.4, 1.0, 1.5, 2.0, 2.5] {
            let exact = comp_sum_transform(tau, 6).unwrap();
            let (lower, inv_upper) = comp_sum_poly_bounds(tau, 6).unwrap();
            for i in 0..=100 {
                let beta = i as f64 / 100.0;
                let lo = lower.eval(beta).unwrap();
                let ex = exact.eval(beta).unwrap();
                assert!(lo <= ex + 1e-12, "tau={tau}, beta={beta}: {lo} > {ex}");
                // Gamma-tilde inverts the polynomial lower bound.
                let s = lo;
                assert!((inv_upper.eval_clamped(s.min(1.0)) - beta).abs() < 1e-9 || s > 1.0);
            }
        }
        let (_, inv1) = comp_sum_poly_bounds(1.0, 9).unwrap();
        assert!((inv1.eval_clamped(0.08) - 0.4).abs() < 1e-12);
        let (lower0, _) = comp_sum_poly_bounds(0.0, 2).unwrap();
        assert!((lower0.eval(0.6).unwrap() - 0.18).abs() < 1e-15);
    }

    #[test]
    fn table_values() {
        let cstnd_exp =
            multiclass_table_transform(TableFamily::CstndPhi, &AuxId::Exponential, 3, TableParams::default())
                .unwrap();
        assert!((cstnd_exp.eval(1.0).unwrap() - (2.0 - 3.0f64.sqrt())).abs() < 1e-12);

        let one_minus =
            multiclass_table_transform(TableFamily::CompSumPhi, &AuxId::OneMinus, 5, TableParams::default())
                .unwrap();
        assert!((one_minus.eval(0.3).unwrap() - 0.06).abs() < 1e-15);

        let squared =
            multiclass_table_transform(TableFamily::CompSumPhi, &AuxId::Squared, 5, TableParams::default())
                .unwrap();
        assert!((squared.eval(0.5).unwrap() - 0.0625).abs() < 1e-15);

        let max_rho = multiclass_table_transform(
            TableFamily::MaxRho,
            &AuxId::RhoMargin { rho: 1.0 },
            4,
            TableParams { b_bound: Some(0.25), lambda: None },
        )
        .unwrap();
        assert!((max_rho.eval(0.4).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn adversarial_rho_values() {
        let c = adversarial_rho_transform(1.0, 1.0, None).unwrap();
        assert!((c.eval(0.7).unwrap() - 0.7).abs() < 1e-15);
        let c = adversarial_rho_transform(0.25, 1.0, None).unwrap();
        assert!((c.eval(0.4).unwrap() - 0.1).abs() < 1e-15);
        let c = adversarial_rho_transform(2.0, 1.0, None).unwrap();
        assert!((c.eval(0.9).unwrap() - 0.9).abs() < 1e-15);
        let c = adversarial_rho_transform(1.0, 2.0, Some(3.0)).unwrap();
        assert!((c.eval(0.5).unwrap() - 0.5).abs() < 1e-15); // min{3, 2}/2 = 1
    }

    #[test]
    fn massart_examples() {
        let quad = binary_linear_transform(&AuxId::Quadratic, 5.0).unwrap(); // t^2 on [0,1]
        let m = massart_modified(&quad, 0.25, false).unwrap();
        assert!((m.eval(0.2).unwrap() - 0.1).abs() < 1e-15);
        assert!((m.eval(0.7).unwrap() - 0.49).abs() < 1e-15);

        // beta = 1/2 turns the quadratic into the identity.
        let id = massart_modified(&quad, 0.5, false).unwrap();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((id.eval(t).unwrap() - t).abs() < 1e-12);
        }
        id.certify().unwrap();

        // Adversarial variant agrees with the base at t = 1.
        let adv = massart_modified(&quad, 0.5, true).unwrap();
        assert!((adv.eval(1.0).unwrap() - quad.eval(1.0).unwrap()).abs() < 1e-15);
        adv.certify().unwrap();

        assert!(massart_modified(&quad, 0.0, false).is_err());
        assert!((massart_adversarial_coefficient(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bounded_psi_examples() {
        // Effectively unrestricted class: entropy branch everywhere.
        let wide = HypothesisClassSpec::bounded_symmetric(50.0, 2).unwrap();
        let psi = bounded_hypothesis_psi(BoundedPsiLoss::Logistic, &wide).unwrap();
        let expect = 0.5 * (xlnx(1.5) + xlnx(0.5));
        assert!((psi.eval(0.5).unwrap() - expect).abs() < 1e-9);

        let unit = HypothesisClassSpec::bounded_symmetric(1.0, 2).unwrap();
        let cstnd = bounded_hypothesis_psi(BoundedPsiLoss::CstndExp, &unit).unwrap();
        assert!((cstnd.eval(0.5).unwrap() - (1.0 - 0.75f64.sqrt())).abs() < 1e-12);
        // Above the knee tanh(1): the linear branch.
        let e = std::f64::consts::E;
        let expect = 0.45 * (e - 1.0 / e) + 0.5 * (2.0 - e - 1.0 / e);
        assert!((cstnd.eval(0.9).unwrap() - expect).abs() < 1e-12);

        // MAE with an explicit softmax range: coefficient (s_max - s_min)/2.
        let mae = bounded_psi_from_range(BoundedPsiLoss::Mae, 0.2, 0.6).unwrap();
        assert!((mae.eval(0.5).unwrap() - 0.1).abs() < 1e-15);
        assert!(bounded_psi_from_range(BoundedPsiLoss::Mae, 0.4, 0.4).is_err());
    }

    #[test]
    fn relaxed_inverses_upper_bound_the_exact_ones() {
        for (id, b) in [(AuxId::Logistic2, 0.8), (AuxId::Exponential, 0.6)] {
            let curve = binary_linear_transform(&id, b).unwrap();
            let relaxed = binary_linear_relaxed_inverse(&id, b).unwrap();
            let top = curve.eval(1.0).unwrap();
            for i in 1..=60 {
                let s = top * (i as f64) / 60.0;
                let exact = curve.invert(s);
                let upper = relaxed.eval_clamped(s);
                assert!(
                    upper >= exact - 1e-9,
                    "{id:?}: relaxed {upper} below exact {exact} at s = {s}"
                );
            }
        }
    }

    #[test]
    fn inversion_round_trip() {
        let curves: Vec<TransformCurve> = vec![
            binary_linear_transform(&AuxId::Hinge, 0.5).unwrap(),
            binary_linear_transform(&AuxId::Logistic2, 1.0).unwrap(),
            binary_linear_transform(&AuxId::Exponential, 0.7).unwrap(),
            binary_linear_transform(&AuxId::Quadratic, 0.8).unwrap(),
            comp_sum_transform(1.0, 4).unwrap(),
            comp_sum_transform(0.5, 4).unwrap(),
            multiclass_table_transform(
                TableFamily::CstndPhi,
                &AuxId::Exponential,
                3,
                TableParams::default(),
            )
            .unwrap(),
        ];
        for curve in curves {
            curve.certify().unwrap();
            for i in 0..=100 {
                let t = i as f64 / 100.0;
                let s = curve.eval(t).unwrap();
                let back = curve.eval(curve.invert(s)).unwrap();
                assert!(
                    (back - s).abs() < 1e-8,
                    "{}: T(Gamma({s})) = {back}",
                    curve.source_tag
                );
            }
        }
    }

    #[test]
    fn domain_guard() {
        let c = binary_linear_transform(&AuxId::Hinge, 1.0).unwrap();
        assert!(c.eval(1.0 + 1e-10).is_ok());
        assert!(matches!(c.eval(1.1), Err(HcbError::OutOfDomain { .. })));
        assert!(matches!(c.eval(-0.2), Err(HcbError::OutOfDomain { .. })));
    }
}
