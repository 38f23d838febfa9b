//! Hypothesis families and the handful of derived constants the bounds
//! depend on (score radii, softmax probability ranges).

use crate::error::{HcbError, Result};
use crate::Scalar;
use std::fmt;

/// A linear scorer. `weights[y]` and `biases[y]` give the per-class
/// affine map; binary problems use a single row whose sign is the label.
#[derive(Clone, Debug)]
pub struct LinearHypothesis {
    pub weights: Vec<Vec<Scalar>>,
    pub biases: Vec<Scalar>,
}

impl LinearHypothesis {
    pub fn binary(w: Vec<Scalar>, b: Scalar) -> Self {
        Self { weights: vec![w], biases: vec![b] }
    }

    pub fn multiclass(weights: Vec<Vec<Scalar>>, biases: Vec<Scalar>) -> Result<Self> {
        if weights.len() != biases.len() || weights.is_empty() {
            return Err(HcbError::DimensionMismatch {
                expected: weights.len(),
                got: biases.len(),
            });
        }
        let d = weights[0].len();
        if weights.iter().any(|w| w.len() != d) {
            return Err(HcbError::InvalidParameter("ragged weight matrix".into()));
        }
        Ok(Self { weights, biases })
    }

    pub fn n_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.weights[0].len()
    }

    pub fn score(&self, class: usize, x: &[Scalar]) -> Scalar {
        dot(&self.weights[class], x) + self.biases[class]
    }

    pub fn scores(&self, x: &[Scalar]) -> Vec<Scalar> {
        (0..self.n_classes()).map(|y| self.score(y, x)).collect()
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// l_q norm with q in [1, inf]; `q = f64::INFINITY` is the max norm.
pub fn norm_q(v: &[Scalar], q: Scalar) -> Scalar {
    if q.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if (q - 1.0).abs() < 1e-12 {
        v.iter().map(|x| x.abs()).sum()
    } else if (q - 2.0).abs() < 1e-12 {
        v.iter().map(|x| x * x).sum::<Scalar>().sqrt()
    } else {
        v.iter().map(|x| x.abs().powf(q)).sum::<Scalar>().powf(1.0 / q)
    }
}

/// Conjugate exponent: 1/p + 1/q = 1.
pub fn conjugate_exponent(p: Scalar) -> Scalar {
    if p.is_infinite() {
        1.0
    } else if (p - 1.0).abs() < 1e-12 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Hypothesis family, with the parameter set each bound family needs.
#[derive(Clone, Debug)]
pub enum ClassVariant {
    AllMeasurable,
    /// w-norm bound W (in the conjugate norm), bias bound B, input norm p.
    Linear { w_bound: Scalar, b_bound: Scalar, p: Scalar },
    /// One-hidden-layer ReLU family; scores bounded by Lambda(W||x||_p + B).
    OneLayerNn { lambda: Scalar, w_bound: Scalar, b_bound: Scalar, p: Scalar },
    /// Per-coordinate score range [-lambda, +lambda].
    BoundedSymmetric { lambda: Scalar },
    CompleteSymmetric,
}

#[derive(Clone, Debug)]
pub struct HypothesisClassSpec {
    pub variant: ClassVariant,
    /// Number of classes (2 for binary problems).
    pub n: usize,
    /// Perturbation radius for adversarial losses, if any.
    pub gamma: Option<Scalar>,
}

impl fmt::Display for HypothesisClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.variant {
            ClassVariant::AllMeasurable => write!(f, "all-measurable(n={})", self.n),
            ClassVariant::Linear { w_bound, b_bound, p } => {
                write!(f, "linear(W={w_bound},B={b_bound},p={p},n={})", self.n)
            }
            ClassVariant::OneLayerNn { lambda, w_bound, b_bound, p } => {
                write!(f, "one-layer-nn(L={lambda},W={w_bound},B={b_bound},p={p},n={})", self.n)
            }
            ClassVariant::BoundedSymmetric { lambda } => {
                write!(f, "bounded-symmetric(L={lambda},n={})", self.n)
            }
            ClassVariant::CompleteSymmetric => write!(f, "complete-symmetric(n={})", self.n),
        }
    }
}

impl HypothesisClassSpec {
    pub fn all_measurable(n: usize) -> Self {
        Self { variant: ClassVariant::AllMeasurable, n, gamma: None }
    }

    pub fn complete_symmetric(n: usize) -> Self {
        Self { variant: ClassVariant::CompleteSymmetric, n, gamma: None }
    }

    pub fn bounded_symmetric(lambda: Scalar, n: usize) -> Result<Self> {
        if lambda <= 0.0 {
            return Err(HcbError::InvalidParameter("lambda must be positive".into()));
        }
        Ok(Self { variant: ClassVariant::BoundedSymmetric { lambda }, n, gamma: None })
    }

    pub fn linear(w_bound: Scalar, b_bound: Scalar, p: Scalar, n: usize) -> Result<Self> {
        if w_bound <= 0.0 || b_bound < 0.0 {
            return Err(HcbError::InvalidParameter("linear class needs W > 0, B >= 0".into()));
        }
        Ok(Self { variant: ClassVariant::Linear { w_bound, b_bound, p }, n, gamma: None })
    }

    pub fn one_layer_nn(
        lambda: Scalar,
        w_bound: Scalar,
        b_bound: Scalar,
        p: Scalar,
        n: usize,
    ) -> Result<Self> {
        if lambda <= 0.0 || w_bound <= 0.0 || b_bound < 0.0 {
            return Err(HcbError::InvalidParameter("nn class needs L, W > 0, B >= 0".into()));
        }
        Ok(Self { variant: ClassVariant::OneLayerNn { lambda, w_bound, b_bound, p }, n, gamma: None })
    }

    pub fn with_gamma(mut self, gamma: Scalar) -> Self {
        self.gamma = Some(gamma);
        self
    }

    /// Attainable score range at an input with the given norm:
    /// {h(x) : h in class} = [-r, r].
    pub fn score_radius(&self, norm_x: Scalar) -> Option<Scalar> {
        match self.variant {
            ClassVariant::Linear { w_bound, b_bound, .. } => Some(w_bound * norm_x + b_bound),
            ClassVariant::OneLayerNn { lambda, w_bound, b_bound, .. } => {
                Some(lambda * (w_bound * norm_x + b_bound))
            }
            ClassVariant::BoundedSymmetric { lambda } => Some(lambda),
            ClassVariant::AllMeasurable | ClassVariant::CompleteSymmetric => None,
        }
    }

    /// Infimum over inputs of the score radius; the constant the bounded
    /// transformation families are parameterized by.
    pub fn lambda_min(&self) -> Option<Scalar> {
        match self.variant {
            ClassVariant::Linear { b_bound, .. } => Some(b_bound),
            ClassVariant::OneLayerNn { lambda, b_bound, .. } => Some(lambda * b_bound),
            ClassVariant::BoundedSymmetric { lambda } => Some(lambda),
            ClassVariant::AllMeasurable | ClassVariant::CompleteSymmetric => None,
        }
    }

    /// Largest softmax probability reachable under the score range:
    /// 1 / (1 + (n-1) e^{-2 lambda_min}).
    pub fn s_max(&self) -> Option<Scalar> {
        let l = self.lambda_min()?;
        let n1 = (self.n - 1) as Scalar;
        Some(1.0 / (1.0 + n1 * (-2.0 * l).exp()))
    }

    /// Smallest softmax probability: 1 / (1 + (n-1) e^{2 lambda_min}).
    pub fn s_min(&self) -> Option<Scalar> {
        let l = self.lambda_min()?;
        let n1 = (self.n - 1) as Scalar;
        Some(1.0 / (1.0 + n1 * (2.0 * l).exp()))
    }

    /// Whether some hypothesis keeps the whole gamma-ball around an input
    /// of the given norm strictly on one side (binary linear geometry).
    pub fn separates_ball(&self, norm_x: Scalar, gamma: Scalar) -> Option<bool> {
        match self.variant {
            ClassVariant::Linear { w_bound, b_bound, .. } => {
                Some(b_bound > 0.0 || w_bound * (norm_x - gamma) > 0.0)
            }
            ClassVariant::OneLayerNn { b_bound, .. } => Some(b_bound > 0.0 || norm_x > gamma),
            _ => None,
        }
    }
}
