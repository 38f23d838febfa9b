//! Conditional risks, best-in-class conditional risks (closed-form and
//! brute-force), generalization risks on finite-support distributions,
//! and minimizability gaps.

use crate::aux_fn::{AuxId, AuxiliaryFunction};
use crate::dist::{ConditionalPoint, DiscreteDistribution};
use crate::error::{HcbError, Result};
use crate::hypothesis::{ClassVariant, HypothesisClassSpec};
use crate::loss::{eval_comp_sum, eval_constrained, phi_tau, CompSumParams, TAU_BRANCH_EPS};
use crate::opt::{golden_min, grid_then_golden};
use crate::Scalar;

/// Loss families the risk engine can score.
#[derive(Clone, Debug)]
pub enum LossKind {
    ZeroOne,
    /// Binary margin loss built from a catalog auxiliary function.
    Margin(AuxiliaryFunction),
    /// Supremum-based counterpart of a binary margin loss (radius gamma).
    SupMargin { phi: AuxiliaryFunction, gamma: Scalar },
    /// Adversarial 0/1 loss with radius gamma.
    AdversarialZeroOne { gamma: Scalar },
    CompSum(CompSumParams),
    Constrained(AuxiliaryFunction),
}

impl LossKind {
    pub fn name(&self) -> String {
        match self {
            LossKind::ZeroOne => "zero-one".into(),
            LossKind::Margin(phi) => format!("margin/{}", phi.id),
            LossKind::SupMargin { phi, gamma } => format!("sup-margin/{}(gamma={gamma})", phi.id),
            LossKind::AdversarialZeroOne { gamma } => format!("adv-zero-one(gamma={gamma})"),
            LossKind::CompSum(p) => format!("comp-sum(tau={})", p.tau),
            LossKind::Constrained(phi) => format!("constrained/{}", phi.id),
        }
    }
}

/// What a hypothesis looks like at one support point.
#[derive(Clone, Debug)]
pub enum PointEval {
    /// Single binary score h(x).
    Binary(Scalar),
    /// Binary score range over the perturbation ball: [h_under, h_over].
    BinaryBall { under: Scalar, over: Scalar },
    /// Per-class score vector.
    Multi(Vec<Scalar>),
}

/// Highest-index argmax, the fixed tie-breaking strategy.
pub fn argmax_highest_index(scores: &[Scalar]) -> usize {
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s >= scores[best] {
            best = i;
        }
    }
    best
}

/// Probability-weighted loss at one point.
pub fn conditional_risk(loss: &LossKind, eval: &PointEval, point: &ConditionalPoint) -> Result<Scalar> {
    match (loss, eval) {
        (LossKind::ZeroOne, PointEval::Binary(s)) => {
            let eta = point.eta();
            Ok(if *s >= 0.0 { 1.0 - eta } else { eta })
        }
        (LossKind::ZeroOne, PointEval::Multi(scores)) => {
            if scores.len() != point.n() {
                return Err(HcbError::DimensionMismatch { expected: point.n(), got: scores.len() });
            }
            Ok(1.0 - point.probs[argmax_highest_index(scores)])
        }
        (LossKind::Margin(phi), PointEval::Binary(s)) => {
            let eta = point.eta();
            Ok(eta * phi.value(*s) + (1.0 - eta) * phi.value(-s))
        }
        (LossKind::SupMargin { phi, .. }, PointEval::BinaryBall { under, over }) => {
            let eta = point.eta();
            Ok(eta * phi.value(*under) + (1.0 - eta) * phi.value(-over))
        }
        (LossKind::AdversarialZeroOne { .. }, PointEval::BinaryBall { under, over }) => {
            let eta = point.eta();
            let pos = if *under <= 0.0 { 1.0 } else { 0.0 };
            let neg = if *over >= 0.0 { 1.0 } else { 0.0 };
            Ok(eta * pos + (1.0 - eta) * neg)
        }
        (LossKind::CompSum(params), PointEval::Multi(scores)) => {
            if scores.len() != point.n() {
                return Err(HcbError::DimensionMismatch { expected: point.n(), got: scores.len() });
            }
            let mut acc = 0.0;
            for (y, &p) in point.probs.iter().enumerate() {
                if p > 0.0 {
                    acc += p * eval_comp_sum(*params, scores, y)?;
                }
            }
            Ok(acc)
        }
        (LossKind::Constrained(phi), PointEval::Multi(scores)) => {
            if scores.len() != point.n() {
                return Err(HcbError::DimensionMismatch { expected: point.n(), got: scores.len() });
            }
            let mut acc = 0.0;
            for (y, &p) in point.probs.iter().enumerate() {
                if p > 0.0 {
                    acc += p * eval_constrained(phi, scores, y)?;
                }
            }
            Ok(acc)
        }
        _ => Err(HcbError::UnsupportedConfiguration(format!(
            "loss {} cannot consume {:?}",
            loss.name(),
            eval
        ))),
    }
}

fn binary_entropy_base2(eta: Scalar) -> Scalar {
    let term = |p: Scalar| if p <= 0.0 { 0.0 } else { p * p.log2() };
    -(term(eta) + term(1.0 - eta))
}

/// Binary margin best-in-class conditional risk for a score range [-r, r];
/// `r = None` means the unrestricted limit.
fn binary_margin_cstar(phi: &AuxiliaryFunction, eta: Scalar, r: Option<Scalar>) -> Result<Scalar> {
    let hi = eta.max(1.0 - eta);
    let lo = eta.min(1.0 - eta);
    match (&phi.id, r) {
        (AuxId::Hinge, r) => {
            let cap = r.map_or(1.0, |r| r.min(1.0));
            Ok(1.0 - (2.0 * eta - 1.0).abs() * cap)
        }
        (AuxId::Logistic2, None) => Ok(binary_entropy_base2(eta)),
        (AuxId::Logistic2, Some(r)) => {
            if eta <= 0.0 || eta >= 1.0 {
                // log-odds infinite: the boundary branch applies.
                return Ok(hi * (1.0 + (-r).exp()).log2() + lo * (1.0 + r.exp()).log2());
            }
            if (eta / (1.0 - eta)).ln().abs() <= r {
                Ok(binary_entropy_base2(eta))
            } else {
                Ok(hi * (1.0 + (-r).exp()).log2() + lo * (1.0 + r.exp()).log2())
            }
        }
        (AuxId::Exponential, None) => Ok(2.0 * (eta * (1.0 - eta)).sqrt()),
        (AuxId::Exponential, Some(r)) => {
            if eta > 0.0 && eta < 1.0 && 0.5 * (eta / (1.0 - eta)).ln().abs() <= r {
                Ok(2.0 * (eta * (1.0 - eta)).sqrt())
            } else {
                Ok(hi * (-r).exp() + lo * r.exp())
            }
        }
        (AuxId::Quadratic, None) => Ok(4.0 * eta * (1.0 - eta)),
        (AuxId::Quadratic, Some(r)) => {
            if (2.0 * eta - 1.0).abs() <= r {
                Ok(4.0 * eta * (1.0 - eta))
            } else {
                let edge = r.min(1.0);
                // Beyond r >= 1 the max-side term is clipped to zero.
                let max_side = if r >= 1.0 { 0.0 } else { (1.0 - edge) * (1.0 - edge) };
                Ok(hi * max_side + lo * (1.0 + r) * (1.0 + r))
            }
        }
        (AuxId::Sigmoid { k }, r) => {
            let gain = r.map_or(1.0, |r| (k * r).tanh());
            Ok(1.0 - (1.0 - 2.0 * eta).abs() * gain)
        }
        (AuxId::RhoMargin { rho }, r) => {
            let reach = r.map_or(1.0, |r| r.min(*rho) / rho);
            Ok(lo + hi * (1.0 - reach))
        }
        _ => Err(HcbError::NoClosedForm { loss: format!("margin/{}", phi.id), class: "binary".into() }),
    }
}

/// Comp-sum best-in-class conditional risk for complete symmetric classes,
/// with explicit branches at tau = 1 and tau = 2 where the general formula
/// degenerates.
pub fn comp_sum_cstar_complete(tau: Scalar, probs: &[Scalar]) -> Scalar {
    if (tau - 1.0).abs() < TAU_BRANCH_EPS {
        -probs.iter().map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 }).sum::<Scalar>()
    } else if tau >= 2.0 - TAU_BRANCH_EPS {
        // For tau >= 2 the pointwise optimum sits at a simplex vertex:
        // C* = (1 - max_y p_y)/(tau - 1), continuous with the branch below.
        (1.0 - probs.iter().fold(0.0 as Scalar, |m, &p| m.max(p))) / (tau - 1.0)
    } else {
        // (sum_y p_y^{1/s})^s with s = 2 - tau, in the log domain so the
        // intermediate powers survive s near zero.
        let s = 2.0 - tau;
        let logs: Vec<Scalar> =
            probs.iter().filter(|&&p| p > 0.0).map(|&p| p.ln() / s).collect();
        let m = logs.iter().fold(Scalar::NEG_INFINITY, |a, &b| a.max(b));
        let lse = m + logs.iter().map(|&l| (l - m).exp()).sum::<Scalar>().ln();
        let renyi = (s * lse).exp();
        (renyi - 1.0) / (1.0 - tau)
    }
}

/// Deterministic bounded-class comp-sum best-in-class conditional risk:
/// Phi^tau of (n-1) e^{-2 Lambda}.
pub fn comp_sum_cstar_deterministic_bounded(tau: Scalar, lambda: Scalar, n: usize) -> Scalar {
    phi_tau(tau, ((n - 1) as Scalar) * (-2.0 * lambda).exp())
}

/// Constrained-loss best-in-class conditional risk for complete symmetric
/// zero-sum classes. Closed forms derived by Lagrangian stationarity and
/// validated against the brute-force oracle in the test suite.
pub fn constrained_cstar_complete(phi: &AuxiliaryFunction, probs: &[Scalar]) -> Result<Scalar> {
    let n = probs.len() as Scalar;
    let pmax = probs.iter().fold(0.0 as Scalar, |m, &p| m.max(p));
    match phi.id {
        AuxId::Exponential => {
            let log_gm = probs.iter().map(|&p| (1.0 - p).max(0.0)).map(|c| {
                if c <= 0.0 {
                    Scalar::NEG_INFINITY
                } else {
                    c.ln()
                }
            }).sum::<Scalar>()
                / n;
            Ok(if log_gm.is_infinite() { 0.0 } else { n * log_gm.exp() })
        }
        AuxId::Hinge => Ok(n * (1.0 - pmax)),
        AuxId::SqHinge | AuxId::Squared => {
            let mut inv_sum = 0.0;
            for &p in probs {
                let c = 1.0 - p;
                if c <= 0.0 {
                    return Ok(0.0);
                }
                inv_sum += 1.0 / c;
            }
            Ok(n * n / inv_sum)
        }
        AuxId::RhoMargin { .. } => Ok(1.0 - pmax),
        _ => Err(HcbError::NoClosedForm {
            loss: format!("constrained/{}", phi.id),
            class: "complete-symmetric".into(),
        }),
    }
}

/// Adversarial rho-margin best-in-class conditional risk for binary
/// linear classes.
pub fn sup_rho_cstar_linear(
    rho: Scalar,
    eta: Scalar,
    norm_x: Scalar,
    gamma: Scalar,
    w_bound: Scalar,
    b_bound: Scalar,
) -> Scalar {
    let hi = eta.max(1.0 - eta);
    let lo = eta.min(1.0 - eta);
    let reach = (w_bound * norm_x.max(gamma) - gamma * w_bound + b_bound).min(rho) / rho;
    lo + hi * (1.0 - reach)
}

/// Registered closed forms for the best-in-class conditional risk.
pub fn best_in_class_conditional(
    loss: &LossKind,
    class: &HypothesisClassSpec,
    point: &ConditionalPoint,
) -> Result<Scalar> {
    match loss {
        LossKind::ZeroOne => Ok(1.0 - point.max_prob()),
        LossKind::AdversarialZeroOne { gamma } => {
            let sep = class.separates_ball(point.norm_x, *gamma).ok_or_else(|| {
                HcbError::NoClosedForm { loss: loss.name(), class: class.to_string() }
            })?;
            let eta = point.eta();
            Ok(if sep { eta.min(1.0 - eta) } else { 1.0 })
        }
        LossKind::Margin(phi) => {
            let r = class.score_radius(point.norm_x);
            match class.variant {
                ClassVariant::AllMeasurable | ClassVariant::CompleteSymmetric => {
                    binary_margin_cstar(phi, point.eta(), None)
                }
                ClassVariant::Linear { .. }
                | ClassVariant::OneLayerNn { .. }
                | ClassVariant::BoundedSymmetric { .. } => {
                    binary_margin_cstar(phi, point.eta(), r)
                }
            }
        }
        LossKind::SupMargin { phi, gamma } => match (&phi.id, &class.variant) {
            (AuxId::RhoMargin { rho }, ClassVariant::Linear { w_bound, b_bound, .. }) => Ok(
                sup_rho_cstar_linear(*rho, point.eta(), point.norm_x, *gamma, *w_bound, *b_bound),
            ),
            (AuxId::RhoMargin { rho }, ClassVariant::OneLayerNn { lambda, w_bound, b_bound, .. }) => {
                // Same geometry with the score radius scaled by Lambda.
                Ok(sup_rho_cstar_linear(
                    *rho,
                    point.eta(),
                    point.norm_x,
                    *gamma,
                    lambda * w_bound,
                    lambda * b_bound,
                ))
            }
            _ => Err(HcbError::NoClosedForm { loss: loss.name(), class: class.to_string() }),
        },
        LossKind::CompSum(params) => match class.variant {
            ClassVariant::AllMeasurable | ClassVariant::CompleteSymmetric => {
                Ok(comp_sum_cstar_complete(params.tau, &point.probs))
            }
            ClassVariant::BoundedSymmetric { lambda } => {
                let deterministic = point.probs.iter().any(|&p| (p - 1.0).abs() < 1e-12);
                if deterministic {
                    Ok(comp_sum_cstar_deterministic_bounded(params.tau, lambda, point.n()))
                } else {
                    Err(HcbError::NoClosedForm { loss: loss.name(), class: class.to_string() })
                }
            }
            _ => Err(HcbError::NoClosedForm { loss: loss.name(), class: class.to_string() }),
        },
        LossKind::Constrained(phi) => match class.variant {
            ClassVariant::AllMeasurable | ClassVariant::CompleteSymmetric => {
                constrained_cstar_complete(phi, &point.probs)
            }
            _ => Err(HcbError::NoClosedForm { loss: loss.name(), class: class.to_string() }),
        },
    }
}

/// Score radius used by the brute-force oracle; `radius_override` stands
/// in for classes with unbounded scores.
fn oracle_radius(
    class: &HypothesisClassSpec,
    point: &ConditionalPoint,
    radius_override: Option<Scalar>,
) -> Result<Scalar> {
    match class.score_radius(point.norm_x) {
        Some(r) => Ok(r),
        None => radius_override.ok_or(HcbError::UnboundedClass),
    }
}

/// Brute-force minimization of the conditional risk over the class score
/// range: dense grid then golden-section refinement. The refinement is
/// sound because the catalog conditional risks are unimodal in each score
/// for convex auxiliaries; the zero-one risk is piecewise constant and
/// the grid alone decides it.
pub fn brute_force_conditional_oracle(
    loss: &LossKind,
    class: &HypothesisClassSpec,
    point: &ConditionalPoint,
    grid_resolution: usize,
    radius_override: Option<Scalar>,
) -> Result<Scalar> {
    let res = grid_resolution.max(16);
    match loss {
        LossKind::ZeroOne | LossKind::Margin(_) => {
            let r = oracle_radius(class, point, radius_override)?;
            let f = |s: Scalar| {
                conditional_risk(loss, &PointEval::Binary(s), point).unwrap_or(Scalar::INFINITY)
            };
            if matches!(loss, LossKind::ZeroOne) {
                // Piecewise constant: evaluate both signs.
                Ok(f(-r.max(1e-9)).min(f(r.max(1e-9))))
            } else {
                let (_, v) = grid_then_golden(f, -r, r, res, 90);
                Ok(v)
            }
        }
        LossKind::SupMargin { gamma, .. } | LossKind::AdversarialZeroOne { gamma } => {
            // Parameterize by (spread, center): spread = gamma ||w||_q in
            // [0, gamma W]; center = w.x + b within the induced range.
            let (w_bound, b_bound) = match class.variant {
                ClassVariant::Linear { w_bound, b_bound, .. } => (w_bound, b_bound),
                ClassVariant::OneLayerNn { lambda, w_bound, b_bound, .. } => {
                    (lambda * w_bound, lambda * b_bound)
                }
                _ => return Err(HcbError::UnboundedClass),
            };
            let sm = res.min(192);
            let mut best = Scalar::INFINITY;
            for i in 0..=sm {
                let spread = gamma * w_bound * (i as Scalar) / (sm as Scalar);
                let reach = spread / gamma * point.norm_x + b_bound;
                let f = |c: Scalar| {
                    conditional_risk(
                        loss,
                        &PointEval::BinaryBall { under: c - spread, over: c + spread },
                        point,
                    )
                    .unwrap_or(Scalar::INFINITY)
                };
                let v = if matches!(loss, LossKind::AdversarialZeroOne { .. }) {
                    // Piecewise constant in the center: the ball clears
                    // zero only when the feasible |center| exceeds the
                    // spread, so the extremes decide it.
                    f(-reach).min(f(0.0)).min(f(reach))
                } else {
                    grid_then_golden(f, -reach, reach, res.min(512), 90).1
                };
                best = best.min(v);
            }
            Ok(best)
        }
        LossKind::CompSum(_) => {
            let r = oracle_radius(class, point, radius_override)?;
            let f = |scores: &[Scalar]| {
                conditional_risk(loss, &PointEval::Multi(scores.to_vec()), point)
                    .unwrap_or(Scalar::INFINITY)
            };
            Ok(box_minimize(f, point.n(), r, res))
        }
        LossKind::Constrained(_) => {
            let r = oracle_radius(class, point, radius_override)?;
            let f = |scores: &[Scalar]| {
                conditional_risk(loss, &PointEval::Multi(scores.to_vec()), point)
                    .unwrap_or(Scalar::INFINITY)
            };
            Ok(zero_sum_box_minimize(f, point.n(), r, res))
        }
    }
}

/// Coordinate-wise minimization over [-r, r]^n seeded by a coarse full
/// grid for n <= 3 and by the origin beyond.
fn box_minimize(f: impl Fn(&[Scalar]) -> Scalar, n: usize, r: Scalar, res: usize) -> Scalar {
    let mut best_x = vec![0.0; n];
    let mut best = f(&best_x);
    if n <= 3 {
        let g = if n == 2 { res.min(48) } else { res.min(24) };
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        loop {
            for k in 0..n {
                x[k] = -r + 2.0 * r * (idx[k] as Scalar) / (g as Scalar);
            }
            let v = f(&x);
            if v < best {
                best = v;
                best_x.copy_from_slice(&x);
            }
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                idx[k] += 1;
                if idx[k] <= g {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    // Golden-section passes per coordinate until a sweep stops helping.
    let mut x = best_x;
    for _sweep in 0..30 {
        let before = best;
        for k in 0..n {
            let xk = x.clone();
            let (s, v) = golden_min(
                |u: Scalar| {
                    let mut y = xk.clone();
                    y[k] = u;
                    f(&y)
                },
                -r,
                r,
                90,
            );
            if v < best {
                best = v;
                x[k] = s;
            }
        }
        if before - best <= 1e-13 * (1.0 + best.abs()) {
            break;
        }
    }
    best
}

/// Minimization over the zero-sum slice of [-r, r]^n by pairwise
/// exchanges, which preserve the constraint and the box.
fn zero_sum_box_minimize(
    f: impl Fn(&[Scalar]) -> Scalar,
    n: usize,
    r: Scalar,
    _res: usize,
) -> Scalar {
    let mut x = vec![0.0; n];
    let mut best = f(&x);
    for _sweep in 0..12 {
        let mut improved = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let lo = (-r - x[i]).max(x[j] - r);
                let hi = (r - x[i]).min(x[j] + r);
                if hi <= lo {
                    continue;
                }
                let xi = x.clone();
                let (d, v) = golden_min(
                    |delta: Scalar| {
                        let mut y = xi.clone();
                        y[i] += delta;
                        y[j] -= delta;
                        f(&y)
                    },
                    lo,
                    hi,
                    80,
                );
                if v < best - 1e-15 {
                    best = v;
                    x[i] += d;
                    x[j] -= d;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Weighted sum of conditional risks; one evaluation per support point.
pub fn generalization_risk(
    loss: &LossKind,
    evals: &[PointEval],
    dist: &DiscreteDistribution,
) -> Result<Scalar> {
    if evals.len() != dist.support_len() {
        return Err(HcbError::SupportMismatch(format!(
            "{} evaluations for {} support points",
            evals.len(),
            dist.support_len()
        )));
    }
    let mut acc = 0.0;
    for (wp, eval) in dist.points.iter().zip(evals) {
        acc += wp.weight * conditional_risk(loss, eval, &wp.point)?;
    }
    Ok(acc)
}

/// Expectation of the pointwise best-in-class conditional risk, falling
/// back to the brute-force oracle where no closed form is registered.
pub fn expected_best_conditional(
    loss: &LossKind,
    class: &HypothesisClassSpec,
    dist: &DiscreteDistribution,
    oracle_resolution: usize,
) -> Result<Scalar> {
    let mut acc = 0.0;
    for wp in &dist.points {
        let v = match best_in_class_conditional(loss, class, &wp.point) {
            Ok(v) => v,
            Err(HcbError::NoClosedForm { .. }) => {
                brute_force_conditional_oracle(loss, class, &wp.point, oracle_resolution, None)?
            }
            Err(e) => return Err(e),
        };
        acc += wp.weight * v;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug)]
pub struct GapReport {
    pub best_in_class_risk: Scalar,
    pub expected_pointwise_infimum: Scalar,
    pub gap: Scalar,
}

impl GapReport {
    fn new(best: Scalar, pointwise: Scalar) -> Result<Self> {
        let gap = best - pointwise;
        if gap < -1e-9 {
            return Err(HcbError::ConstraintViolation(format!(
                "negative minimizability gap {gap}; joint minimizer beat the pointwise infimum"
            )));
        }
        Ok(Self { best_in_class_risk: best, expected_pointwise_infimum: pointwise, gap: gap.max(0.0) })
    }
}

/// How the best-in-class generalization risk is obtained.
#[derive(Clone, Copy, Debug)]
pub enum GapMode {
    /// Scores are pointwise-free: the infimum commutes with the
    /// expectation, so the gap is exactly zero.
    Decoupled,
    /// Joint (w, b) minimization for 1-D binary linear models by grid plus
    /// golden refinement.
    Linear1dGrid { grid: usize },
    /// Deterministic bounded-class formula for the comp-sum family; the
    /// caller supplies the best-in-class tau = 0 risk.
    DeterministicBoundedFormula { r_star_tau0: Scalar },
}

/// Joint binary linear risk minimization over (w, b) for 1-D inputs.
pub fn linear_1d_best_risk(
    loss: &LossKind,
    class: &HypothesisClassSpec,
    dist: &DiscreteDistribution,
    grid: usize,
) -> Result<Scalar> {
    let (w_bound, b_bound, gamma_default) = match class.variant {
        ClassVariant::Linear { w_bound, b_bound, .. } => (w_bound, b_bound, class.gamma),
        _ => {
            return Err(HcbError::UnsupportedConfiguration(
                "joint risk minimization is implemented for 1-D linear classes".into(),
            ))
        }
    };
    let eval_at = |w: Scalar, b: Scalar| -> Result<Scalar> {
        let mut acc = 0.0;
        for wp in &dist.points {
            let x = wp.point.coord;
            let score = w * x + b;
            let ev = match loss {
                LossKind::SupMargin { gamma, .. } | LossKind::AdversarialZeroOne { gamma } => {
                    let _ = gamma_default;
                    let spread = gamma * w.abs();
                    PointEval::BinaryBall { under: score - spread, over: score + spread }
                }
                _ => PointEval::Binary(score),
            };
            acc += wp.weight * conditional_risk(loss, &ev, &wp.point)?;
        }
        Ok(acc)
    };
    let g = grid.max(8);
    let mut best = Scalar::INFINITY;
    let mut best_wb = (0.0, 0.0);
    for i in 0..=g {
        let w = -w_bound + 2.0 * w_bound * (i as Scalar) / (g as Scalar);
        for j in 0..=g {
            let b = if b_bound > 0.0 {
                -b_bound + 2.0 * b_bound * (j as Scalar) / (g as Scalar)
            } else {
                0.0
            };
            let v = eval_at(w, b)?;
            if v < best {
                best = v;
                best_wb = (w, b);
            }
            if b_bound == 0.0 {
                break;
            }
        }
    }
    // Coordinate golden passes around the grid winner.
    let (mut w, mut b) = best_wb;
    for _ in 0..3 {
        let bb = b;
        let (wn, vw) = golden_min(
            |u: Scalar| eval_at(u, bb).unwrap_or(Scalar::INFINITY),
            -w_bound,
            w_bound,
            80,
        );
        if vw < best {
            best = vw;
            w = wn;
        }
        if b_bound > 0.0 {
            let ww = w;
            let (bn, vb) = golden_min(
                |u: Scalar| eval_at(ww, u).unwrap_or(Scalar::INFINITY),
                -b_bound,
                b_bound,
                80,
            );
            if vb < best {
                best = vb;
                b = bn;
            }
        }
    }
    Ok(best)
}

/// Minimizability gap report for the supported mode/class combinations.
pub fn minimizability_gap(
    loss: &LossKind,
    class: &HypothesisClassSpec,
    dist: &DiscreteDistribution,
    mode: GapMode,
) -> Result<GapReport> {
    match mode {
        GapMode::Decoupled => {
            let pointwise = expected_best_conditional(loss, class, dist, 4096)?;
            GapReport::new(pointwise, pointwise)
        }
        GapMode::Linear1dGrid { grid } => {
            let best = linear_1d_best_risk(loss, class, dist, grid)?;
            let pointwise = expected_best_conditional(loss, class, dist, 4096)?;
            GapReport::new(best, pointwise)
        }
        GapMode::DeterministicBoundedFormula { r_star_tau0 } => {
            let (tau, lambda, n) = match (loss, &class.variant) {
                (LossKind::CompSum(p), ClassVariant::BoundedSymmetric { lambda }) => {
                    (p.tau, *lambda, class.n)
                }
                _ => {
                    return Err(HcbError::UnsupportedConfiguration(
                        "deterministic bounded formula needs a comp-sum loss and a bounded-symmetric class"
                            .into(),
                    ))
                }
            };
            let c_star0 = ((n - 1) as Scalar) * (-2.0 * lambda).exp();
            if r_star_tau0 < c_star0 - 1e-12 {
                return Err(HcbError::InvalidParameter(format!(
                    "r_star_tau0 = {r_star_tau0} below the pointwise floor {c_star0}"
                )));
            }
            let best = phi_tau(tau, r_star_tau0);
            let pointwise = phi_tau(tau, c_star0);
            GapReport::new(best, pointwise)
        }
    }
}

/// Gap values of the deterministic bounded comp-sum family across tau,
/// with the non-increase certificate.
pub fn gap_ordering_check(
    lambda: Scalar,
    n: usize,
    r_star_tau0: Scalar,
    taus: &[Scalar],
) -> Result<Vec<(Scalar, Scalar)>> {
    let c_star0 = ((n - 1) as Scalar) * (-2.0 * lambda).exp();
    if r_star_tau0 < c_star0 - 1e-12 {
        return Err(HcbError::InvalidParameter(format!(
            "r_star_tau0 = {r_star_tau0} below the pointwise floor {c_star0}"
        )));
    }
    let gaps: Vec<(Scalar, Scalar)> = taus
        .iter()
        .map(|&tau| (tau, phi_tau(tau, r_star_tau0) - phi_tau(tau, c_star0)))
        .collect();
    for w in gaps.windows(2) {
        if w[1].1 > w[0].1 + 1e-12 {
            return Err(HcbError::ConstraintViolation(format!(
                "gap ordering violated between tau = {} and tau = {}",
                w[0].0, w[1].0
            )));
        }
    }
    Ok(gaps)
}
