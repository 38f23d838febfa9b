//! Assembles and checks full consistency bounds on finite-support
//! distributions; reproduces the tightness constructions and the
//! negative-result witnesses.

use crate::aux_fn::{AuxId, AuxiliaryFunction};
use crate::dist::{ConditionalPoint, DiscreteDistribution};
use crate::error::{HcbError, Result};
use crate::hypothesis::HypothesisClassSpec;
use crate::loss::CompSumParams;
use crate::risk::{
    best_in_class_conditional, comp_sum_cstar_complete, conditional_risk, expected_best_conditional,
    generalization_risk, linear_1d_best_risk, LossKind, PointEval,
};
use crate::transform::TransformCurve;
use crate::Scalar;

/// Stand-in offset for scores a tightness construction sends to minus
/// infinity; the leakage it causes is below n * e^{-40} ~ 4e-17 and is
/// absorbed by the stated tolerances.
pub const NEG_INF_OFFSET: Scalar = 40.0;

/// Both sides of a consistency bound, with the slack between them.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub target_excess: Scalar,
    pub surrogate_excess: Scalar,
    pub target_gap: Scalar,
    pub surrogate_gap: Scalar,
    /// T(target_excess + target_gap).
    pub lhs: Scalar,
    /// surrogate_excess + surrogate_gap.
    pub rhs: Scalar,
    pub slack: Scalar,
    pub tight: bool,
}

/// How the best-in-class risks entering the report are computed. The
/// slack itself only needs the combined quantity R(h) - E\[C*\], which both
/// modes produce exactly; the split into excess and gap needs the joint
/// minimizer.
#[derive(Clone, Copy, Debug)]
pub enum RiskSplit {
    /// Pointwise-free scores: R* = E\[C*\] and the gaps vanish.
    Decoupled,
    /// Joint (w, b) minimization for 1-D binary linear classes.
    Linear1dGrid { grid: usize },
}

/// Evaluate the bound `T(target combined regret) <= surrogate combined
/// regret` for one hypothesis given per-point evaluations.
pub fn verify_bound(
    surrogate: &LossKind,
    target: &LossKind,
    transform: &TransformCurve,
    class: &HypothesisClassSpec,
    dist: &DiscreteDistribution,
    surrogate_evals: &[PointEval],
    target_evals: &[PointEval],
    split: RiskSplit,
    tolerance: Scalar,
) -> Result<BoundReport> {
    let surrogate_risk = generalization_risk(surrogate, surrogate_evals, dist)?;
    let target_risk = generalization_risk(target, target_evals, dist)?;
    let surrogate_pointwise = expected_best_conditional(surrogate, class, dist, 4096)?;
    let target_pointwise = expected_best_conditional(target, class, dist, 4096)?;

    let (surrogate_star, target_star) = match split {
        RiskSplit::Decoupled => (surrogate_pointwise, target_pointwise),
        RiskSplit::Linear1dGrid { grid } => (
            linear_1d_best_risk(surrogate, class, dist, grid)?,
            linear_1d_best_risk(target, class, dist, grid)?,
        ),
    };

    let target_combined = (target_risk - target_pointwise).max(0.0);
    let rhs = surrogate_risk - surrogate_pointwise;
    let lhs = transform.eval(target_combined.min(1.0))?;
    let slack = rhs - lhs;
    Ok(BoundReport {
        target_excess: target_risk - target_star,
        surrogate_excess: surrogate_risk - surrogate_star,
        target_gap: (target_star - target_pointwise).max(0.0),
        surrogate_gap: (surrogate_star - surrogate_pointwise).max(0.0),
        lhs,
        rhs,
        slack,
        tight: slack.abs() <= tolerance,
    })
}

/// Output of a tightness construction.
#[derive(Clone, Copy, Debug)]
pub struct TightnessOutcome {
    pub achieved_target: Scalar,
    pub achieved_surrogate: Scalar,
    pub transform_value: Scalar,
}

/// Comp-sum tightness construction: a singleton with label masses
/// (1+beta)/2 and (1-beta)/2, scored by a hypothesis with equal top-two
/// scores and a large negative offset elsewhere.
pub fn tightness_comp_sum(tau: Scalar, n: usize, beta: Scalar) -> Result<TightnessOutcome> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(HcbError::OutOfDomain { value: beta, lo: 0.0, hi: 1.0 });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(HcbError::InvalidParameter(
            "the tightness construction is certified for tau in [0, 1]".into(),
        ));
    }
    let params = CompSumParams::new(tau, n)?;
    let mut probs = vec![0.0; n];
    probs[0] = 0.5 * (1.0 + beta);
    probs[1] = 0.5 * (1.0 - beta);
    let point = ConditionalPoint::new(0, 0.0, probs)?;

    let mut scores = vec![-NEG_INF_OFFSET; n];
    scores[0] = 0.0;
    scores[1] = 0.0;
    // Highest-index tie-break predicts label 2 of the top pair, so the
    // zero-one regret is exactly p_max - p_2 = beta.
    let achieved_target = beta;

    let conditional = conditional_risk(
        &LossKind::CompSum(params),
        &PointEval::Multi(scores),
        &point,
    )?;
    let c_star = comp_sum_cstar_complete(tau, &point.probs);
    let achieved_surrogate = conditional - c_star;
    let transform_value = crate::transform::comp_sum_transform(tau, n)?.eval(beta)?;
    Ok(TightnessOutcome { achieved_target, achieved_surrogate, transform_value })
}

/// Binary tightness sweep: singleton at eta = 1/2 + t/2, hypotheses on a
/// grid over h(x0) in [-B, 0). Returns the smallest surrogate-side slack
/// against the stated transformation, together with the grid resolution.
pub fn tightness_binary_sweep(
    phi: &AuxiliaryFunction,
    transform: &TransformCurve,
    class: &HypothesisClassSpec,
    t: Scalar,
    grid: usize,
) -> Result<Scalar> {
    let b_bound = match class.variant {
        crate::hypothesis::ClassVariant::Linear { b_bound, .. } => b_bound,
        _ => {
            return Err(HcbError::UnsupportedConfiguration(
                "binary tightness sweep assumes a linear class".into(),
            ))
        }
    };
    // x0 = 0: the infimum over inputs in the transformation is attained
    // at zero input norm, where the score range is [-B, B].
    let point = ConditionalPoint::binary(0, 0.0, 0.5 + 0.5 * t)?;
    let loss = LossKind::Margin(phi.clone());
    let c_star = best_in_class_conditional(&loss, class, &point)?;
    let t_value = transform.eval(t)?;
    let mut best_slack = Scalar::INFINITY;
    for i in 1..=grid {
        let h = -b_bound * (i as Scalar) / (grid as Scalar);
        let c = conditional_risk(&loss, &PointEval::Binary(h), &point)?;
        best_slack = best_slack.min((c - c_star) - t_value);
    }
    Ok(best_slack)
}

/// Negative-result witness record.
#[derive(Clone, Copy, Debug)]
pub struct WitnessRecord {
    pub target_excess: Scalar,
    pub surrogate_excess: Scalar,
}

/// Adversarial negative witness: singleton at a distinguishing input with
/// eta = 1/2 and the zero hypothesis. Supremum-based convex or symmetric
/// losses keep the surrogate excess at zero while the adversarial target
/// excess is 1/2.
pub fn negative_witness_adversarial(
    class: &HypothesisClassSpec,
    phi: &AuxiliaryFunction,
) -> Result<WitnessRecord> {
    let gamma = class.gamma.ok_or_else(|| {
        HcbError::InvalidParameter("class carries no perturbation radius".into())
    })?;
    let regular = class.separates_ball(0.0, gamma).ok_or_else(|| {
        HcbError::UnsupportedConfiguration("witness needs a linear-family class".into())
    })?;
    if !regular {
        return Err(HcbError::UnsupportedConfiguration(
            "class admits no distinguishing input at x = 0; increase B".into(),
        ));
    }
    let symmetric_c = phi.value(1.0) + phi.value(-1.0);
    let symmetric = ((phi.value(0.37) + phi.value(-0.37)) - symmetric_c).abs() < 1e-9;
    if !phi.flags.convex && !symmetric {
        return Err(HcbError::UnsupportedConfiguration(format!(
            "{} is neither convex nor symmetric; the witness does not apply",
            phi.id
        )));
    }

    let point = ConditionalPoint::binary(0, 0.0, 0.5)?;
    let adv = LossKind::AdversarialZeroOne { gamma };
    let sup = LossKind::SupMargin { phi: phi.clone(), gamma };

    // Zero hypothesis: both worst-case scores are zero.
    let zero_eval = PointEval::BinaryBall { under: 0.0, over: 0.0 };
    let target_risk = conditional_risk(&adv, &zero_eval, &point)?;
    let target_star = best_in_class_conditional(&adv, class, &point)?;
    let surrogate_risk = conditional_risk(&sup, &zero_eval, &point)?;
    // The zero hypothesis is also the surrogate minimizer: for convex
    // nonincreasing or symmetric phi the conditional risk at eta = 1/2 is
    // minimized at a ball centered on zero score.
    let surrogate_star = surrogate_risk;
    Ok(WitnessRecord {
        target_excess: target_risk - target_star,
        surrogate_excess: surrogate_risk - surrogate_star,
    })
}

/// Sanity inversion of the adversarial witness: a separating hypothesis
/// has zero adversarial target excess.
pub fn adversarial_witness_inverted(class: &HypothesisClassSpec) -> Result<Scalar> {
    let gamma = class.gamma.ok_or_else(|| {
        HcbError::InvalidParameter("class carries no perturbation radius".into())
    })?;
    let b_bound = match class.variant {
        crate::hypothesis::ClassVariant::Linear { b_bound, .. } => b_bound,
        _ => return Err(HcbError::UnsupportedConfiguration("linear class expected".into())),
    };
    let point = ConditionalPoint::binary(0, 0.0, 0.5)?;
    let adv = LossKind::AdversarialZeroOne { gamma };
    let eval = PointEval::BinaryBall { under: b_bound, over: b_bound };
    let risk = conditional_risk(&adv, &eval, &point)?;
    let star = best_in_class_conditional(&adv, class, &point)?;
    Ok(risk - star)
}

/// Max-loss negative witness: n >= 3 classes, two labels sharing the
/// mass, all-equal scores. The tie-break sends the prediction to the
/// highest index, off both massive labels.
pub fn negative_witness_max_loss(n: usize, phi: &AuxiliaryFunction) -> Result<WitnessRecord> {
    if n <= 2 {
        return Err(HcbError::InvalidParameter("max-loss witness needs n > 2".into()));
    }
    if !phi.flags.convex || !phi.flags.nonincreasing {
        return Err(HcbError::UnsupportedConfiguration(format!(
            "{} must be convex and nonincreasing",
            phi.id
        )));
    }
    let mut probs = vec![0.0; n];
    probs[0] = 0.5;
    probs[1] = 0.5;
    let point = ConditionalPoint::new(0, 0.0, probs)?;

    // All-equal scores: every margin is zero, prediction is label n.
    let target_risk = 1.0 - point.probs[n - 1];
    let target_star = 1.0 - point.max_prob();

    // Max-loss conditional risk at all-equal scores is phi(0); the
    // convexity argument makes that the class optimum as well.
    let surrogate_risk = phi.value(0.0);
    let surrogate_star = phi.value(0.0);
    Ok(WitnessRecord {
        target_excess: target_risk - target_star,
        surrogate_excess: surrogate_risk - surrogate_star,
    })
}

/// Max-loss conditional risk of explicit scores under the witness
/// distribution; exposes the tie-break sanity inversion.
pub fn max_loss_target_excess(n: usize, scores: &[Scalar]) -> Result<Scalar> {
    if scores.len() != n || n <= 2 {
        return Err(HcbError::DimensionMismatch { expected: n, got: scores.len() });
    }
    let mut probs = vec![0.0; n];
    probs[0] = 0.5;
    probs[1] = 0.5;
    let point = ConditionalPoint::new(0, 0.0, probs)?;
    let risk = conditional_risk(&LossKind::ZeroOne, &PointEval::Multi(scores.to_vec()), &point)?;
    Ok(risk - (1.0 - point.max_prob()))
}

/// A registered bound quadruple for the fuzz suite: surrogate, target,
/// transformation and class, plus a hypothesis sampler.
pub struct BoundQuadruple {
    pub name: String,
    pub surrogate: LossKind,
    pub target: LossKind,
    pub transform: TransformCurve,
    pub class: HypothesisClassSpec,
}

/// Fuzz a quadruple over random finite-support distributions and random
/// feasible hypotheses; returns the minimum slack observed.
pub fn fuzz_bound_quadruple(
    quad: &BoundQuadruple,
    instances: usize,
    seed: u64,
) -> Result<Scalar> {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut rnd = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as Scalar / (1u64 << 53) as Scalar
    };
    let n = quad.class.n;
    let mut min_slack = Scalar::INFINITY;
    for _ in 0..instances {
        let support = 1 + (rnd() * 4.0) as usize;
        let mut rows = Vec::with_capacity(support);
        let mut weights = Vec::with_capacity(support);
        for i in 0..support {
            let mut probs: Vec<Scalar> = (0..n).map(|_| rnd() + 1e-3).collect();
            let total: Scalar = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= total);
            let coord = 2.0 * rnd() - 1.0;
            rows.push(ConditionalPoint::new(i, coord.abs(), probs)?.with_coord(coord));
            weights.push(rnd() + 1e-3);
        }
        let wsum: Scalar = weights.iter().sum();
        let dist = DiscreteDistribution::new(
            rows.into_iter().zip(weights).map(|(p, w)| (w / wsum, p)).collect(),
        )?;

        let (sur_evals, tgt_evals): (Vec<PointEval>, Vec<PointEval>) = match &quad.surrogate {
            LossKind::Margin(_) => {
                // Random linear hypothesis within the class bounds.
                let (w_bound, b_bound) = match quad.class.variant {
                    crate::hypothesis::ClassVariant::Linear { w_bound, b_bound, .. } => {
                        (w_bound, b_bound)
                    }
                    _ => (4.0, 4.0),
                };
                let w = w_bound * (2.0 * rnd() - 1.0);
                let b = b_bound * (2.0 * rnd() - 1.0);
                dist.points
                    .iter()
                    .map(|wp| {
                        let s = w * wp.point.coord + b;
                        (PointEval::Binary(s), PointEval::Binary(s))
                    })
                    .unzip()
            }
            LossKind::SupMargin { gamma, .. } => {
                let (w_bound, b_bound) = match quad.class.variant {
                    crate::hypothesis::ClassVariant::Linear { w_bound, b_bound, .. } => {
                        (w_bound, b_bound)
                    }
                    _ => (4.0, 4.0),
                };
                let w = w_bound * (2.0 * rnd() - 1.0);
                let b = b_bound * (2.0 * rnd() - 1.0);
                dist.points
                    .iter()
                    .map(|wp| {
                        let s = w * wp.point.coord + b;
                        let spread = gamma * w.abs();
                        let ball = PointEval::BinaryBall { under: s - spread, over: s + spread };
                        (ball.clone(), ball)
                    })
                    .unzip()
            }
            LossKind::Constrained(_) => dist
                .points
                .iter()
                .map(|_| {
                    let raw: Vec<Scalar> = (0..n).map(|_| 6.0 * rnd() - 3.0).collect();
                    let mean = raw.iter().sum::<Scalar>() / n as Scalar;
                    let scores: Vec<Scalar> = raw.iter().map(|s| s - mean).collect();
                    (PointEval::Multi(scores.clone()), PointEval::Multi(scores))
                })
                .unzip(),
            _ => dist
                .points
                .iter()
                .map(|_| {
                    let bound = quad.class.lambda_min().unwrap_or(6.0);
                    let scores: Vec<Scalar> =
                        (0..n).map(|_| bound * (2.0 * rnd() - 1.0)).collect();
                    (PointEval::Multi(scores.clone()), PointEval::Multi(scores))
                })
                .unzip(),
        };

        let report = verify_bound(
            &quad.surrogate,
            &quad.target,
            &quad.transform,
            &quad.class,
            &dist,
            &sur_evals,
            &tgt_evals,
            RiskSplit::Decoupled,
            1e-9,
        )?;
        min_slack = min_slack.min(report.slack);
    }
    Ok(min_slack)
}

/// The registered quadruples the fuzz acceptance criterion runs over.
pub fn registered_quadruples() -> Result<Vec<BoundQuadruple>> {
    use crate::transform::{
        adversarial_rho_transform, binary_linear_transform, bounded_hypothesis_psi,
        comp_sum_transform, multiclass_table_transform, BoundedPsiLoss, TableFamily, TableParams,
    };
    let mut quads = Vec::new();

    // Binary linear-class margin bounds.
    let b_bound = 0.8;
    let class = HypothesisClassSpec::linear(1.0, b_bound, 2.0, 2)?;
    let entries: Vec<(AuxiliaryFunction, AuxId)> = vec![
        (AuxiliaryFunction::hinge(), AuxId::Hinge),
        (AuxiliaryFunction::logistic2(), AuxId::Logistic2),
        (AuxiliaryFunction::exponential(), AuxId::Exponential),
        (AuxiliaryFunction::quadratic(), AuxId::Quadratic),
        (AuxiliaryFunction::sigmoid(1.0), AuxId::Sigmoid { k: 1.0 }),
        (AuxiliaryFunction::rho_margin(1.0), AuxId::RhoMargin { rho: 1.0 }),
    ];
    for (phi, id) in entries {
        quads.push(BoundQuadruple {
            name: format!("binary-linear/{}", phi.id),
            surrogate: LossKind::Margin(phi),
            target: LossKind::ZeroOne,
            transform: binary_linear_transform(&id, b_bound)?,
            class: class.clone(),
        });
    }

    // Comp-sum bounds for complete symmetric classes.
    for (tau, n) in [(0.0, 3), (1.0, 3), (1.5, 4), (2.0, 5)] {
        quads.push(BoundQuadruple {
            name: format!("comp-sum(tau={tau},n={n})"),
            surrogate: LossKind::CompSum(CompSumParams::new(tau, n)?),
            target: LossKind::ZeroOne,
            transform: comp_sum_transform(tau, n)?,
            class: HypothesisClassSpec::complete_symmetric(n),
        });
    }

    // Constrained bounds for complete symmetric classes.
    for (phi, id) in [
        (AuxiliaryFunction::exponential(), AuxId::Exponential),
        (AuxiliaryFunction::hinge(), AuxId::Hinge),
        (AuxiliaryFunction::sq_hinge(), AuxId::SqHinge),
        (AuxiliaryFunction::squared(), AuxId::Squared),
    ] {
        quads.push(BoundQuadruple {
            name: format!("constrained/{}", phi.id),
            surrogate: LossKind::Constrained(phi),
            target: LossKind::ZeroOne,
            transform: multiclass_table_transform(
                TableFamily::CstndPhi,
                &id,
                3,
                TableParams::default(),
            )?,
            class: HypothesisClassSpec::complete_symmetric(3),
        });
    }

    // Adversarial rho-margin for the binary linear class.
    let gamma = 0.1;
    let adv_class = HypothesisClassSpec::linear(1.0, 0.8, 2.0, 2)?.with_gamma(gamma);
    quads.push(BoundQuadruple {
        name: "adversarial-rho/binary-linear".into(),
        surrogate: LossKind::SupMargin { phi: AuxiliaryFunction::rho_margin(1.0), gamma },
        target: LossKind::AdversarialZeroOne { gamma },
        transform: adversarial_rho_transform(0.8, 1.0, None)?,
        class: adv_class,
    });

    // Bounded-class comp-sum bounds through the piecewise
    // transformations. The two-branch forms are exact for the two-class
    // score box, which is what these quadruples exercise.
    let bounded = HypothesisClassSpec::bounded_symmetric(1.0, 2)?;
    quads.push(BoundQuadruple {
        name: "bounded/logistic".into(),
        surrogate: LossKind::CompSum(CompSumParams::new(1.0, 2)?),
        target: LossKind::ZeroOne,
        transform: bounded_hypothesis_psi(BoundedPsiLoss::Logistic, &bounded)?,
        class: bounded.clone(),
    });
    quads.push(BoundQuadruple {
        name: "bounded/sum-exponential".into(),
        surrogate: LossKind::CompSum(CompSumParams::new(0.0, 2)?),
        target: LossKind::ZeroOne,
        transform: bounded_hypothesis_psi(BoundedPsiLoss::SumExponential, &bounded)?,
        class: bounded,
    });

    Ok(quads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{binary_linear_transform, comp_sum_transform};

    #[test]
    fn tightness_comp_sum_examples() {
        let out = tightness_comp_sum(1.0, 4, 1.0).unwrap();
        assert!((out.achieved_surrogate - std::f64::consts::LN_2).abs() < 1e-9);
        assert!((out.achieved_surrogate - out.transform_value).abs() < 1e-9);

        let out = tightness_comp_sum(0.0, 3, 0.6).unwrap();
        assert!((out.achieved_surrogate - 0.2).abs() < 1e-9);

        let out = tightness_comp_sum(0.5, 5, 0.0).unwrap();
        assert!(out.achieved_target.abs() < 1e-15);
        assert!(out.achieved_surrogate.abs() < 1e-12);
    }

    #[test]
    fn binary_tightness_sweep_is_small() {
        let class = HypothesisClassSpec::linear(1.0, 1.0, 2.0, 2).unwrap();
        for (phi, id) in [
            (AuxiliaryFunction::hinge(), AuxId::Hinge),
            (AuxiliaryFunction::sigmoid(1.0), AuxId::Sigmoid { k: 1.0 }),
            (AuxiliaryFunction::rho_margin(1.0), AuxId::RhoMargin { rho: 1.0 }),
        ] {
            let curve = binary_linear_transform(&id, 1.0).unwrap();
            for t in [0.1, 0.5, 0.9] {
                let slack = tightness_binary_sweep(&phi, &curve, &class, t, 10_000).unwrap();
                assert!(slack >= -1e-9, "{}: slack {slack} at t = {t}", phi.id);
                assert!(slack <= 1e-4, "{}: slack {slack} at t = {t}", phi.id);
            }
        }
    }

    #[test]
    fn adversarial_witness_values() {
        let class = HypothesisClassSpec::linear(1.0, 1.0, 2.0, 2).unwrap().with_gamma(0.1);
        let hinge = negative_witness_adversarial(&class, &AuxiliaryFunction::hinge()).unwrap();
        assert_eq!(hinge.target_excess, 0.5);
        assert_eq!(hinge.surrogate_excess, 0.0);
        let sig = negative_witness_adversarial(&class, &AuxiliaryFunction::sigmoid(1.0)).unwrap();
        assert_eq!(sig.target_excess, 0.5);
        assert_eq!(sig.surrogate_excess, 0.0);

        // Separating hypothesis: target excess collapses to zero.
        assert_eq!(adversarial_witness_inverted(&class).unwrap(), 0.0);
    }

    #[test]
    fn adversarial_witness_surrogate_floor_is_attained() {
        // Grid over (w, b) confirms the zero hypothesis minimizes the
        // sup-based conditional risk at eta = 1/2 for hinge and sigmoid.
        let gamma = 0.1;
        let point = ConditionalPoint::binary(0, 0.0, 0.5).unwrap();
        for phi in [AuxiliaryFunction::hinge(), AuxiliaryFunction::sigmoid(1.0)] {
            let sup = LossKind::SupMargin { phi: phi.clone(), gamma };
            let zero = conditional_risk(
                &sup,
                &PointEval::BinaryBall { under: 0.0, over: 0.0 },
                &point,
            )
            .unwrap();
            let mut best = f64::INFINITY;
            for i in 0..=60 {
                for j in 0..=60 {
                    let w = -1.0 + 2.0 * (i as f64) / 60.0;
                    let b = -1.0 + 2.0 * (j as f64) / 60.0;
                    let spread = gamma * w.abs();
                    let v = conditional_risk(
                        &sup,
                        &PointEval::BinaryBall { under: b - spread, over: b + spread },
                        &point,
                    )
                    .unwrap();
                    best = best.min(v);
                }
            }
            assert!(zero <= best + 1e-12, "{}: zero {zero} vs best {best}", phi.id);
        }
    }

    #[test]
    fn max_loss_witness_values() {
        for phi in [AuxiliaryFunction::hinge(), AuxiliaryFunction::exponential()] {
            let rec = negative_witness_max_loss(3, &phi).unwrap();
            assert_eq!(rec.target_excess, 0.5);
            assert_eq!(rec.surrogate_excess, 0.0);
        }
        assert!(negative_witness_max_loss(2, &AuxiliaryFunction::hinge()).is_err());
        // Tie-break inversion: nudging the first massive label wins.
        let excess = max_loss_target_excess(3, &[0.1, 0.0, 0.0]).unwrap();
        assert_eq!(excess, 0.0);
    }

    #[test]
    fn trivial_bound_report_at_the_optimum() {
        // A hypothesis attaining the conditional optimum pointwise has
        // lhs = T(0) = 0 and nonnegative slack.
        let n = 3;
        let class = HypothesisClassSpec::complete_symmetric(n);
        let point = ConditionalPoint::new(0, 0.0, vec![0.2, 0.5, 0.3]).unwrap();
        let dist = DiscreteDistribution::singleton(point.clone());
        let params = CompSumParams::new(1.0, n).unwrap();
        // Softmax-matching scores minimize both losses pointwise.
        let scores: Vec<f64> = point.probs.iter().map(|p| p.ln()).collect();
        let evals = vec![PointEval::Multi(scores)];
        let report = verify_bound(
            &LossKind::CompSum(params),
            &LossKind::ZeroOne,
            &comp_sum_transform(1.0, n).unwrap(),
            &class,
            &dist,
            &evals,
            &evals,
            RiskSplit::Decoupled,
            1e-9,
        )
        .unwrap();
        assert!(report.lhs.abs() < 1e-12);
        assert!(report.slack >= -1e-12);
        assert!(report.rhs < 1e-9);
    }

    #[test]
    fn tightness_battery_21_betas() {
        // 21 evenly spaced beta values per tau; the stand-in offset
        // residual stays under 1e-6 everywhere.
        for &tau in &[0.0, 0.5, 1.0] {
            for i in 0..=20 {
                let beta = i as f64 / 20.0;
                let out = tightness_comp_sum(tau, 5, beta).unwrap();
                assert!(
                    (out.achieved_surrogate - out.transform_value).abs() <= 1e-6,
                    "tau={tau}, beta={beta}: {} vs {}",
                    out.achieved_surrogate,
                    out.transform_value
                );
            }
        }
    }

    #[test]
    fn binary_tightness_instance_report() {
        // Singleton at eta = 1/2 + t/2 scored by an almost-zero negative
        // hypothesis: the hinge bound report closes to machine slack.
        let t = 0.6;
        let class = HypothesisClassSpec::linear(1.0, 1.0, 2.0, 2).unwrap();
        let dist = DiscreteDistribution::singleton(
            ConditionalPoint::binary(0, 0.0, 0.5 + 0.5 * t).unwrap(),
        );
        let evals = vec![PointEval::Binary(-1e-12)];
        let report = verify_bound(
            &LossKind::Margin(AuxiliaryFunction::hinge()),
            &LossKind::ZeroOne,
            &binary_linear_transform(&crate::aux_fn::AuxId::Hinge, 1.0).unwrap(),
            &class,
            &dist,
            &evals,
            &evals,
            RiskSplit::Decoupled,
            1e-9,
        )
        .unwrap();
        assert!(report.slack.abs() <= 1e-9, "slack {}", report.slack);
        assert!(report.tight);
    }

    #[test]
    fn fuzz_all_quadruples_briefly() {
        for quad in registered_quadruples().unwrap() {
            let min_slack = fuzz_bound_quadruple(&quad, 25, 7).unwrap();
            assert!(min_slack >= -1e-7, "{}: min slack {min_slack}", quad.name);
        }
    }
}
