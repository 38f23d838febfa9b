//! Growth-rate certification: log-log slope fitting of transformation
//! curves near zero and the minimizer-trajectory derivative check.

use crate::aux_fn::AuxiliaryFunction;
use crate::error::{HcbError, Result};
use crate::opt::expanding_golden_min;
use crate::Scalar;

#[derive(Clone, Debug)]
pub struct GrowthFit {
    pub t_grid: Vec<Scalar>,
    pub t_values: Vec<Scalar>,
    pub slope: Scalar,
    pub intercept: Scalar,
    /// Largest absolute least-squares residual in log space.
    pub max_residual: Scalar,
    /// Envelope constants against t^2: c = min T/t^2, big_c = max T/t^2.
    pub envelope_lo: Scalar,
    pub envelope_hi: Scalar,
}

/// Least-squares fit of log T against log t on a log-spaced grid.
pub fn fit_growth(
    curve: impl Fn(Scalar) -> Result<Scalar>,
    t_min: Scalar,
    t_max: Scalar,
    points: usize,
) -> Result<GrowthFit> {
    if !(0.0 < t_min && t_min < t_max && t_max <= 0.1) {
        return Err(HcbError::InvalidParameter(
            "need 0 < t_min < t_max <= 0.1 for the asymptotic fit".into(),
        ));
    }
    if points < 10 {
        return Err(HcbError::InvalidParameter("need at least 10 grid points".into()));
    }
    let ratio = (t_max / t_min).ln();
    let mut t_grid = Vec::with_capacity(points);
    let mut t_values = Vec::with_capacity(points);
    let mut logs = Vec::with_capacity(points);
    for i in 0..points {
        let t = t_min * (ratio * (i as Scalar) / ((points - 1) as Scalar)).exp();
        let v = curve(t)?;
        if !(v > 0.0) {
            return Err(HcbError::InvalidParameter(format!(
                "curve nonpositive at t = {t}: {v}"
            )));
        }
        t_grid.push(t);
        t_values.push(v);
        logs.push((t.ln(), v.ln()));
    }
    let n = points as Scalar;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in &logs {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let max_residual = logs
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0 as Scalar, Scalar::max);
    let mut envelope_lo = Scalar::INFINITY;
    let mut envelope_hi: Scalar = 0.0;
    for (t, v) in t_grid.iter().zip(&t_values) {
        let ratio = v / (t * t);
        envelope_lo = envelope_lo.min(ratio);
        envelope_hi = envelope_hi.max(ratio);
    }
    Ok(GrowthFit { t_grid, t_values, slope, intercept, max_residual, envelope_lo, envelope_hi })
}

/// Location of the inner minimizer of
/// f_t(u) = (1-t)/2 Phi_d(u) + (1+t)/2 Phi_d(-u) with Phi_d(u) = phi(-u);
/// the score-difference orientation adapter shared with the binary solver.
pub fn inner_minimizer(phi: &AuxiliaryFunction, t: Scalar) -> Result<Scalar> {
    let f = |u: Scalar| 0.5 * (1.0 - t) * phi.value(-u) + 0.5 * (1.0 + t) * phi.value(u);
    let (u, _) = expanding_golden_min(f, 0.0, 0.25, 110)?;
    Ok(u)
}

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: Scalar,
    pub minimizer: Scalar,
    pub ratio: Scalar,
}

#[derive(Clone, Debug)]
pub struct TrajectoryReport {
    pub points: Vec<TrajectoryPoint>,
    /// Phi_d'(0)/Phi_d''(0) measured by central differences; the limit of
    /// minimizer/t as t goes to zero.
    pub derivative_ratio: Scalar,
}

/// Track the inner minimizer across a t-grid and compare its slope at
/// zero against the derivative ratio of the adapted auxiliary.
pub fn minimizer_trajectory(phi: &AuxiliaryFunction, t_grid: &[Scalar]) -> Result<TrajectoryReport> {
    // Finite differences of the adapted function at zero act as the
    // independent oracle for the ratio.
    let adapted = |u: Scalar| phi.value(-u);
    let h = 1e-4;
    let (up, at, down) = (adapted(h), adapted(0.0), adapted(-h));
    let d1 = (up - down) / (2.0 * h);
    let d2 = (up - 2.0 * at + down) / (h * h);
    if !(d2 > 1e-4) {
        return Err(HcbError::UnsupportedConfiguration(format!(
            "{} has vanishing curvature at zero; the trajectory ratio is undefined",
            phi.id
        )));
    }
    let derivative_ratio = d1 / d2;
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(0.0..=1.0).contains(&t) {
            return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
        }
        let minimizer = if t == 0.0 { 0.0 } else { inner_minimizer(phi, t)? };
        let ratio = if t == 0.0 { derivative_ratio } else { minimizer / t };
        points.push(TrajectoryPoint { t, minimizer, ratio });
    }
    Ok(TrajectoryReport { points, derivative_ratio })
}
