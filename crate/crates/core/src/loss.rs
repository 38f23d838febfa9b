//! Loss catalog: margin losses, comp-sum and constrained multi-class
//! families, supremum-based adversarial counterparts for linear scorers,
//! and the smooth adversarial comp-sum loss.

use crate::aux_fn::AuxiliaryFunction;
use crate::error::{HcbError, Result};
use crate::hypothesis::{conjugate_exponent, norm_q, LinearHypothesis};
use crate::Scalar;

/// Branch guard for the tau = 1 limit of the comp-sum head.
pub const TAU_BRANCH_EPS: Scalar = 1e-12;

/// Parameters of the comp-sum family: head exponent tau and class count.
#[derive(Clone, Copy, Debug)]
pub struct CompSumParams {
    pub tau: Scalar,
    pub n: usize,
}

impl CompSumParams {
    pub fn new(tau: Scalar, n: usize) -> Result<Self> {
        if tau < 0.0 {
            return Err(HcbError::InvalidParameter("tau must be nonnegative".into()));
        }
        if n < 2 {
            return Err(HcbError::InvalidParameter("need at least two classes".into()));
        }
        Ok(Self { tau, n })
    }
}

/// Parameters of the smooth adversarial comp-sum loss.
#[derive(Clone, Copy, Debug)]
pub struct SmoothAdvParams {
    pub tau: Scalar,
    pub rho: Scalar,
    pub nu: Scalar,
    pub gamma: Scalar,
    pub p: Scalar,
}

impl SmoothAdvParams {
    pub fn new(tau: Scalar, rho: Scalar, nu: Scalar, gamma: Scalar, p: Scalar, n: usize) -> Result<Self> {
        if rho <= 0.0 || nu <= 0.0 || gamma <= 0.0 {
            return Err(HcbError::InvalidParameter("rho, nu, gamma must be positive".into()));
        }
        let floor = ((n - 1) as Scalar).sqrt() / rho;
        if nu + 1e-12 < floor {
            return Err(HcbError::InvalidParameter(format!(
                "nu = {nu} below sqrt(n-1)/rho = {floor}; the smoothing chain needs nu >= sqrt(n-1)/rho"
            )));
        }
        Ok(Self { tau, rho, nu, gamma, p })
    }
}

/// Concave head of the comp-sum family on u >= 0:
/// ((1+u)^{1-tau} - 1)/(1-tau), with the log branch at tau = 1.
pub fn phi_tau(tau: Scalar, u: Scalar) -> Scalar {
    debug_assert!(u >= -1.0);
    if (tau - 1.0).abs() < TAU_BRANCH_EPS {
        u.ln_1p()
    } else {
        ((1.0 + u).powf(1.0 - tau) - 1.0) / (1.0 - tau)
    }
}

/// Margin loss evaluation: the caller already formed the margin y*h(x).
pub fn eval_margin_loss(phi: &AuxiliaryFunction, margin: Scalar) -> Scalar {
    phi.value(margin)
}

fn log_sum_exp(scores: &[Scalar]) -> Scalar {
    let m = scores.iter().fold(Scalar::NEG_INFINITY, |a, &b| a.max(b));
    if m.is_infinite() {
        return m;
    }
    m + scores.iter().map(|&s| (s - m).exp()).sum::<Scalar>().ln()
}

/// Comp-sum loss Phi^tau(sum_{y'} e^{h(y') - h(y)} - 1), evaluated with a
/// max-shift before exponentiation.
pub fn eval_comp_sum(params: CompSumParams, scores: &[Scalar], y: usize) -> Result<Scalar> {
    if scores.len() != params.n {
        return Err(HcbError::DimensionMismatch { expected: params.n, got: scores.len() });
    }
    if y >= params.n {
        return Err(HcbError::InvalidParameter(format!("label {y} out of range")));
    }
    let lse = log_sum_exp(scores);
    let gap = lse - scores[y]; // = ln(1 + u) >= 0
    let value = if (params.tau - 1.0).abs() < TAU_BRANCH_EPS {
        gap
    } else {
        (((1.0 - params.tau) * gap).exp() - 1.0) / (1.0 - params.tau)
    };
    if !value.is_finite() {
        return Err(HcbError::NonFinite("comp-sum loss"));
    }
    Ok(value)
}

/// Constrained loss sum_{y' != y} Phi(-h(y')) under the zero-sum score
/// constraint, which is checked here rather than trusted.
pub fn eval_constrained(
    phi: &AuxiliaryFunction,
    scores: &[Scalar],
    y: usize,
) -> Result<Scalar> {
    if y >= scores.len() {
        return Err(HcbError::InvalidParameter(format!("label {y} out of range")));
    }
    let total: Scalar = scores.iter().sum();
    if total.abs() > 1e-9 {
        return Err(HcbError::ConstraintViolation(format!(
            "scores must sum to zero, got {total}"
        )));
    }
    Ok(scores
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != y)
        .map(|(_, &s)| phi.value(-s))
        .sum())
}

/// Worst-case score of a binary linear scorer over the l_p ball of radius
/// gamma: the infimum (resp. supremum) of h over the ball.
pub fn linear_score_range(
    h: &LinearHypothesis,
    x: &[Scalar],
    gamma: Scalar,
    p: Scalar,
) -> (Scalar, Scalar) {
    let q = conjugate_exponent(p);
    let w = &h.weights[0];
    let center = h.score(0, x);
    let spread = gamma * norm_q(w, q);
    (center - spread, center + spread)
}

/// Supremum-based binary margin loss for a linear scorer: the inner
/// maximization is exact because the loss is monotone in the score.
pub fn eval_sup_margin_linear(
    phi: &AuxiliaryFunction,
    h: &LinearHypothesis,
    x: &[Scalar],
    y: i8,
    gamma: Scalar,
    p: Scalar,
) -> Scalar {
    let (under, over) = linear_score_range(h, x, gamma, p);
    if y >= 0 {
        phi.value(under)
    } else {
        phi.value(-over)
    }
}

/// Adversarial 0/1 loss for a binary linear scorer; sign(0) = +1.
pub fn eval_adversarial_zero_one_linear(
    h: &LinearHypothesis,
    x: &[Scalar],
    y: i8,
    gamma: Scalar,
    p: Scalar,
) -> Scalar {
    let (under, over) = linear_score_range(h, x, gamma, p);
    let err = if y >= 0 { under <= 0.0 } else { over >= 0.0 };
    if err {
        1.0
    } else {
        0.0
    }
}

/// Largest eigenvalue of a small symmetric matrix by cyclic Jacobi sweeps.
fn symmetric_max_eigenvalue(mut a: Vec<Vec<Scalar>>) -> Scalar {
    let d = a.len();
    if d == 1 {
        return a[0][0];
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if a[i][j].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[j][j] - a[i][i]) / a[i][j];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (aik, ajk) = (a[i][k], a[j][k]);
                    a[i][k] = c * aik - s * ajk;
                    a[j][k] = s * aik + c * ajk;
                }
                for k in 0..d {
                    let (aki, akj) = (a[k][i], a[k][j]);
                    a[k][i] = c * aki - s * akj;
                    a[k][j] = s * aki + c * akj;
                }
            }
        }
    }
    (0..d).fold(Scalar::NEG_INFINITY, |m, i| m.max(a[i][i]))
}

/// Exact p -> 2 operator norm of the (n-1) x d matrix whose rows are the
/// weight differences w_y - w_{y'}. Supported cases: d = 1 with any p
/// (the l2 norm of the stacked scalars) and p = 2 with any d (spectral
/// norm). Anything else is refused rather than approximated.
pub fn weight_gap_operator_norm(
    h: &LinearHypothesis,
    y: usize,
    p: Scalar,
) -> Result<Scalar> {
    let d = h.dim();
    let n = h.n_classes();
    let rows: Vec<Vec<Scalar>> = (0..n)
        .filter(|&yp| yp != y)
        .map(|yp| {
            (0..d)
                .map(|k| h.weights[y][k] - h.weights[yp][k])
                .collect()
        })
        .collect();
    if d == 1 {
        return Ok(rows.iter().map(|r| r[0] * r[0]).sum::<Scalar>().sqrt());
    }
    if (p - 2.0).abs() < 1e-12 {
        // Spectral norm via the Gram matrix M^T M (d x d, symmetric PSD).
        let mut gram = vec![vec![0.0; d]; d];
        for r in &rows {
            for i in 0..d {
                for j in 0..d {
                    gram[i][j] += r[i] * r[j];
                }
            }
        }
        return Ok(symmetric_max_eigenvalue(gram).max(0.0).sqrt());
    }
    Err(HcbError::UnsupportedConfiguration(format!(
        "exact p->2 operator norm only for d = 1 or p = 2 (got d = {d}, p = {p})"
    )))
}

/// Smooth adversarial comp-sum loss: comp-sum at h/rho plus the exact
/// smoothing term nu * gamma * ||(w_y - w_y')_{y'}||_{p->2}.
pub fn eval_smooth_adv_comp_sum(
    params: SmoothAdvParams,
    h: &LinearHypothesis,
    x: &[Scalar],
    y: usize,
) -> Result<Scalar> {
    let n = h.n_classes();
    let scaled: Vec<Scalar> = h.scores(x).iter().map(|s| s / params.rho).collect();
    let base = eval_comp_sum(CompSumParams::new(params.tau, n)?, &scaled, y)?;
    let op = weight_gap_operator_norm(h, y, params.p)?;
    Ok(base + params.nu * params.gamma * op)
}

/// Adversarial comp-sum rho-margin loss by dense grid over a 1-D
/// perturbation interval; the independent oracle the smooth loss is
/// checked against.
pub fn sup_comp_sum_rho_grid_1d(
    tau: Scalar,
    rho: Scalar,
    h: &LinearHypothesis,
    x: Scalar,
    y: usize,
    gamma: Scalar,
    grid: usize,
) -> Result<Scalar> {
    let n = h.n_classes();
    let rho_margin = AuxiliaryFunction::rho_margin(rho);
    let mut worst = Scalar::NEG_INFINITY;
    for i in 0..=grid {
        let xp = x - gamma + 2.0 * gamma * (i as Scalar) / (grid as Scalar);
        let scores = h.scores(&[xp]);
        let inner: Scalar = (0..n)
            .filter(|&yp| yp != y)
            .map(|yp| rho_margin.value(scores[y] - scores[yp]))
            .sum();
        worst = worst.max(phi_tau(tau, inner));
    }
    Ok(worst)
}
