//! Finite-support distributions with per-point label conditionals: the
//! substrate every exact verification runs on.

use crate::error::{HcbError, Result};
use crate::Scalar;

const MASS_TOL: Scalar = 1e-12;

/// One support point: conditional label probabilities plus the input-norm
/// the class-dependent closed forms need. `coord` carries a signed 1-D
/// coordinate when the point came from a 1-D construction; file-loaded
/// points leave it at `norm_x`.
#[derive(Clone, Debug)]
pub struct ConditionalPoint {
    pub id: usize,
    pub norm_x: Scalar,
    pub coord: Scalar,
    pub probs: Vec<Scalar>,
}

impl ConditionalPoint {
    pub fn new(id: usize, norm_x: Scalar, probs: Vec<Scalar>) -> Result<Self> {
        let p = Self { id, norm_x, coord: norm_x, probs };
        p.validate()?;
        Ok(p)
    }

    pub fn with_coord(mut self, coord: Scalar) -> Self {
        self.coord = coord;
        self.norm_x = coord.abs();
        self
    }

    /// Binary helper: probs = [eta, 1 - eta] with eta = P(y = +1 | x).
    pub fn binary(id: usize, norm_x: Scalar, eta: Scalar) -> Result<Self> {
        Self::new(id, norm_x, vec![eta, 1.0 - eta])
    }

    pub fn eta(&self) -> Scalar {
        self.probs[0]
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn max_prob(&self) -> Scalar {
        self.probs.iter().fold(0.0, |m, &p| m.max(p))
    }

    fn validate(&self) -> Result<()> {
        if self.probs.len() < 2 {
            return Err(HcbError::InvalidParameter("need at least two classes".into()));
        }
        if self.probs.iter().any(|&p| !(p >= -MASS_TOL) || !p.is_finite()) {
            return Err(HcbError::InvalidParameter("negative or non-finite probability".into()));
        }
        let total: Scalar = self.probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(HcbError::ConstraintViolation(format!(
                "conditional probabilities sum to {total}, expected 1"
            )));
        }
        if self.norm_x < 0.0 {
            return Err(HcbError::InvalidParameter("norm_x must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct WeightedPoint {
    pub weight: Scalar,
    pub point: ConditionalPoint,
}

#[derive(Clone, Debug)]
pub struct DiscreteDistribution {
    pub points: Vec<WeightedPoint>,
}

impl DiscreteDistribution {
    pub fn new(points: Vec<(Scalar, ConditionalPoint)>) -> Result<Self> {
        if points.is_empty() {
            return Err(HcbError::InvalidParameter("empty support".into()));
        }
        let n = points[0].1.n();
        if points.iter().any(|(_, p)| p.n() != n) {
            return Err(HcbError::DimensionMismatch { expected: n, got: 0 });
        }
        if points.iter().any(|(w, _)| *w <= 0.0 || !w.is_finite()) {
            return Err(HcbError::InvalidParameter("weights must be positive".into()));
        }
        let total: Scalar = points.iter().map(|(w, _)| *w).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(HcbError::ConstraintViolation(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            points: points
                .into_iter()
                .map(|(weight, point)| WeightedPoint { weight, point })
                .collect(),
        })
    }

    pub fn singleton(point: ConditionalPoint) -> Self {
        Self { points: vec![WeightedPoint { weight: 1.0, point }] }
    }

    pub fn n_classes(&self) -> usize {
        self.points[0].point.n()
    }

    pub fn support_len(&self) -> usize {
        self.points.len()
    }

    /// Weighted mean of a per-point quantity.
    pub fn expect(&self, f: impl Fn(&ConditionalPoint) -> Scalar) -> Scalar {
        self.points.iter().map(|wp| wp.weight * f(&wp.point)).sum()
    }

    /// Row format: `weight,norm_x,p1,...,pn` prefixed by a version line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# hcb-dist v1\n");
        for wp in &self.points {
            out.push_str(&format!("{:.17e},{:.17e}", wp.weight, wp.point.norm_x));
            for p in &wp.point.probs {
                out.push_str(&format!(",{:.17e}", p));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<Scalar> = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<Scalar>().map_err(|_| {
                        HcbError::InvalidParameter(format!(
                            "line {}: bad number `{}`",
                            lineno + 1,
                            f
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            if fields.len() < 4 {
                return Err(HcbError::InvalidParameter(format!(
                    "line {}: need weight, norm_x and at least two probabilities",
                    lineno + 1
                )));
            }
            let point = ConditionalPoint::new(rows.len(), fields[1], fields[2..].to_vec())?;
            rows.push((fields[0], point));
        }
        Self::new(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_bad_mass() {
        assert!(ConditionalPoint::new(0, 1.0, vec![0.5, 0.6]).is_err());
        assert!(ConditionalPoint::new(0, 1.0, vec![0.3, 0.7]).is_ok());
        let p = ConditionalPoint::binary(0, 0.0, 0.25).unwrap();
        let err = DiscreteDistribution::new(vec![(0.5, p.clone()), (0.6, p)]).unwrap_err();
        assert!(matches!(err, HcbError::ConstraintViolation(_)));
    }

    #[test]
    fn text_round_trip_preserves_values() {
        let d = DiscreteDistribution::new(vec![
            (0.25, ConditionalPoint::new(0, 0.3, vec![0.1, 0.2, 0.7]).unwrap()),
            (0.75, ConditionalPoint::new(1, 1.0, vec![0.6, 0.3, 0.1]).unwrap()),
        ])
        .unwrap();
        let text = d.to_text();
        assert!(text.starts_with("# hcb-dist v1\n"));
        let back = DiscreteDistribution::from_text(&text).unwrap();
        assert_eq!(back.support_len(), 2);
        assert!((back.points[1].point.probs[0] - 0.6).abs() < 1e-16);
        assert!((back.points[0].weight - 0.25).abs() < 1e-16);
    }

    #[test]
    fn signed_coordinates_keep_their_norm() {
        let p = ConditionalPoint::binary(0, 0.4, 0.5).unwrap().with_coord(-0.4);
        assert_eq!(p.coord, -0.4);
        assert_eq!(p.norm_x, 0.4);
    }
}
