//! Numerical computation of estimation-error transformations from their
//! inf-sup characterizations, for arbitrary convex auxiliary functions.
//! This is the engine that validates the closed-form catalog.
//!
//! Inner problems (over the score shift mu) are convex for convex
//! auxiliaries, so golden-section suffices; outer problems (over the
//! anchor tau) are solved grid-then-refine because the outer objective
//! can be flat (the neg-log comp-sum objective is tau-independent after
//! the inner solve).

use crate::aux_fn::AuxiliaryFunction;
use crate::error::{HcbError, Result};
use crate::hypothesis::HypothesisClassSpec;
use crate::opt::{expanding_golden_min, golden_min, grid_then_golden};
use crate::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub tau_grid_size: usize,
    pub mu_tolerance: Scalar,
    pub refine_iterations: usize,
    /// Cap for the outer search of constrained transformations; the
    /// infimum is reachable within a finite interval for the catalog
    /// auxiliaries.
    pub tau_cap: Scalar,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tau_grid_size: 512, mu_tolerance: 1e-10, refine_iterations: 60, tau_cap: 10.0 }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.tau_grid_size < 16 {
            return Err(HcbError::InvalidParameter("tau grid must have >= 16 cells".into()));
        }
        if self.mu_tolerance <= 0.0 || self.tau_cap <= 0.0 {
            return Err(HcbError::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Golden-section iteration count: enough to localize the inner
    /// optimum to mu_tolerance, never fewer than refine_iterations.
    fn inner_iters(&self) -> usize {
        let shrink = 0.618_033_988_749_894_9_f64.ln();
        let needed = (self.mu_tolerance.ln() / shrink).ceil() as usize + 2;
        needed.max(self.refine_iterations)
    }
}

/// Solver output with the optimizer locations, for certificate tests.
#[derive(Clone, Copy, Debug)]
pub struct SolveDetail {
    pub value: Scalar,
    pub tau_star: Scalar,
    pub mu_star: Scalar,
}

fn require_convex_decreasing_on_unit(phi: &AuxiliaryFunction) -> Result<()> {
    if !phi.flags.convex {
        return Err(HcbError::NonConvex(0.0));
    }
    phi.check_convex_on(1e-4, 1.0, 96)?;
    // Nonincreasing spot check on (0, 1].
    let (a, b) = (phi.value(0.25), phi.value(0.75));
    if b > a + 1e-9 {
        return Err(HcbError::UnsupportedConfiguration(format!(
            "{} is not nonincreasing on (0, 1]",
            phi.id
        )));
    }
    Ok(())
}

/// Softmax-composed (comp-sum) transformation
///   T(t) = inf_{tau in [1/n, 1/2]} { Phi(tau) - inf_{|mu| <= tau}
///          [ (1+t)/2 Phi(tau - mu) + (1-t)/2 Phi(tau + mu) ] }.
/// For n = 2 the tau interval degenerates to {1/2}.
pub fn solve_comp_transform(
    phi: &AuxiliaryFunction,
    n: usize,
    t: Scalar,
    cfg: &SolverConfig,
) -> Result<Scalar> {
    Ok(solve_comp_transform_detail(phi, n, t, cfg)?.value)
}

pub fn solve_comp_transform_detail(
    phi: &AuxiliaryFunction,
    n: usize,
    t: Scalar,
    cfg: &SolverConfig,
) -> Result<SolveDetail> {
    cfg.validate()?;
    if n < 2 {
        return Err(HcbError::InvalidParameter("need n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
    }
    require_convex_decreasing_on_unit(phi)?;
    let inner = |tau: Scalar| -> (Scalar, Scalar) {
        // Keep Phi arguments strictly inside (0, 2 tau) for entries that
        // blow up at zero.
        let inset = tau * 1e-12;
        let g = |mu: Scalar| {
            0.5 * (1.0 + t) * phi.value(tau - mu) + 0.5 * (1.0 - t) * phi.value(tau + mu)
        };
        golden_min(g, -tau + inset, tau - inset, cfg.inner_iters())
    };
    let objective = |tau: Scalar| phi.value(tau) - inner(tau).1;
    let lo = 1.0 / n as Scalar;
    let hi = 0.5;
    let (tau_star, value) = if n == 2 {
        (hi, objective(hi))
    } else {
        grid_then_golden(objective, lo, hi, cfg.tau_grid_size, cfg.inner_iters())
    };
    let (mu_star, _) = inner(tau_star);
    Ok(SolveDetail { value: value.max(0.0), tau_star, mu_star })
}

/// How the constrained transformation weights the two swapped labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CstndCoefficient {
    /// The n-free lower-bound form with total weight 2; this is the form
    /// the tabulated catalog rows use.
    Table,
    /// Exact total weight 2 - 1/(n-1).
    ExactN,
}

/// Zero-sum constrained transformation
///   T(t) = inf_{tau in [0, cap]} { c Phi(-tau) - inf_mu
///          [ (c-t)/2 Phi(-tau+mu) + (c+t)/2 Phi(-tau-mu) ] }
/// with c = 2 (table form) or c = 2 - 1/(n-1) (exact form). For n = 2 the
/// exact weight degenerates to 1 and the infimum sits at tau = 0.
pub fn solve_cstnd_transform(
    phi: &AuxiliaryFunction,
    n: usize,
    t: Scalar,
    cfg: &SolverConfig,
    coefficient: CstndCoefficient,
) -> Result<Scalar> {
    cfg.validate()?;
    if n < 2 {
        return Err(HcbError::InvalidParameter("need n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
    }
    let c = match coefficient {
        CstndCoefficient::Table => 2.0,
        CstndCoefficient::ExactN => 2.0 - 1.0 / (n as Scalar - 1.0),
    };
    if t > c {
        return Err(HcbError::InvalidParameter(format!("t = {t} above total weight {c}")));
    }
    let objective = |tau: Scalar| -> Result<Scalar> {
        let g = |mu: Scalar| {
            0.5 * (c - t) * phi.value(-tau + mu) + 0.5 * (c + t) * phi.value(-tau - mu)
        };
        let (_, inner) = expanding_golden_min(g, 0.0, 1.0, cfg.inner_iters())?;
        Ok(c * phi.value(-tau) - inner)
    };
    // Grid over [0, cap] then refine; tau = 0 is the minimizer for the
    // whole catalog but the search does not assume it.
    let grid = cfg.tau_grid_size.min(128);
    let mut best = Scalar::INFINITY;
    let mut best_tau = 0.0;
    for i in 0..=grid {
        let tau = cfg.tau_cap * (i as Scalar) / (grid as Scalar);
        let v = objective(tau)?;
        if v < best {
            best = v;
            best_tau = tau;
        }
    }
    let cell = cfg.tau_cap / grid as Scalar;
    let (_, refined) = golden_min(
        |tau: Scalar| objective(tau).unwrap_or(Scalar::INFINITY),
        (best_tau - cell).max(0.0),
        best_tau + cell,
        cfg.refine_iterations,
    );
    Ok(refined.min(best).max(0.0))
}

/// Bounded-class comp-sum transformation: the same inf-sup with the shift
/// constrained to C(tau) = [max{s_min - tau, tau - s_max},
/// min{s_max - tau, tau - s_min}] and tau confined to the reachable
/// softmax range.
pub fn solve_bounded_comp_transform(
    phi: &AuxiliaryFunction,
    class: &HypothesisClassSpec,
    t: Scalar,
    cfg: &SolverConfig,
) -> Result<Scalar> {
    cfg.validate()?;
    let s_min = class.s_min().ok_or(HcbError::UnboundedClass)?;
    let s_max = class.s_max().ok_or(HcbError::UnboundedClass)?;
    if !(s_max > s_min) {
        return Err(HcbError::DegenerateScoreRange);
    }
    if s_min + s_max > 1.0 + 1e-9 {
        return Err(HcbError::ConstraintViolation(format!(
            "softmax range implies s_min + s_max = {} > 1",
            s_min + s_max
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
    }
    let n = class.n;
    let objective = |tau: Scalar| -> Scalar {
        let lo = (s_min - tau).max(tau - s_max);
        let hi = (s_max - tau).min(tau - s_min);
        debug_assert!(hi >= lo - 1e-12, "empty shift constraint");
        let g = |mu: Scalar| {
            0.5 * (1.0 + t) * phi.value(tau - mu) + 0.5 * (1.0 - t) * phi.value(tau + mu)
        };
        let inner = if hi <= lo {
            g(0.5 * (lo + hi))
        } else {
            golden_min(g, lo, hi, cfg.inner_iters()).1
        };
        phi.value(tau) - inner
    };
    let lo = s_min.max(1.0 / n as Scalar);
    let hi = s_max.min(0.5);
    if !(hi >= lo) {
        return Err(HcbError::ConstraintViolation("empty tau range".into()));
    }
    let (_, value) = grid_then_golden(objective, lo, hi, cfg.tau_grid_size, cfg.inner_iters());
    Ok(value.max(0.0))
}

/// Bounded-class constrained transformation with the shift confined to
/// [tau - lambda_min, tau + lambda_min].
pub fn solve_bounded_cstnd_transform(
    phi: &AuxiliaryFunction,
    class: &HypothesisClassSpec,
    t: Scalar,
    cfg: &SolverConfig,
) -> Result<Scalar> {
    cfg.validate()?;
    let lambda = class.lambda_min().ok_or(HcbError::UnboundedClass)?;
    if lambda <= 0.0 {
        return Err(HcbError::DegenerateScoreRange);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
    }
    let objective = |tau: Scalar| -> Scalar {
        let g = |mu: Scalar| {
            0.5 * (1.0 - t) * phi.value(-tau + mu) + 0.5 * (1.0 + t) * phi.value(tau - mu)
        };
        let inner = golden_min(g, tau - lambda, tau + lambda, cfg.inner_iters()).1;
        0.5 * (1.0 - t) * phi.value(tau) + 0.5 * (1.0 + t) * phi.value(-tau) - inner
    };
    let (_, value) =
        grid_then_golden(objective, 0.0, cfg.tau_cap, cfg.tau_grid_size, cfg.inner_iters());
    Ok(value.max(0.0))
}

/// Binary margin transformation for complete classes in the
/// score-difference orientation:
///   T(t) = f_t(0) - inf_u f_t(u),
///   f_t(u) = (1-t)/2 Phi_d(u) + (1+t)/2 Phi_d(-u),
/// where Phi_d(u) = phi(-u) adapts the margin catalog (nonincreasing in
/// the margin) to a nondecreasing function of the score difference. This
/// adapter is the single place the two orientations meet.
pub fn binary_transform_from_phi(
    phi: &AuxiliaryFunction,
    t: Scalar,
    complete: bool,
) -> Result<Scalar> {
    Ok(binary_transform_detail(phi, t, complete)?.value)
}

pub fn binary_transform_detail(
    phi: &AuxiliaryFunction,
    t: Scalar,
    complete: bool,
) -> Result<SolveDetail> {
    if !complete {
        return Err(HcbError::UnsupportedConfiguration(
            "binary transformation is characterized for complete classes".into(),
        ));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(HcbError::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
    }
    if !phi.flags.convex {
        return Err(HcbError::NonConvex(0.0));
    }
    let f = |u: Scalar| 0.5 * (1.0 - t) * phi.value(-u) + 0.5 * (1.0 + t) * phi.value(u);
    let at_zero = f(0.0);
    let (u_star, inf) = expanding_golden_min(f, 0.0, 0.5, 90)?;
    Ok(SolveDetail { value: (at_zero - inf).max(0.0), tau_star: 0.0, mu_star: u_star })
}

/// Comp-sum objective generalized by the label-pair mass P, before the
/// analytic reduction that pins P at 1:
///   V(P) = inf_tau { P Phi(tau) - inf_mu [ (P+t)/2 Phi(tau-mu)
///          + (P-t)/2 Phi(tau+mu) ] }.
pub fn comp_transform_with_pair_mass(
    phi: &AuxiliaryFunction,
    n: usize,
    t: Scalar,
    pair_mass: Scalar,
    cfg: &SolverConfig,
) -> Result<Scalar> {
    cfg.validate()?;
    let p = pair_mass;
    if !(t..=1.0 + 1e-12).contains(&p) {
        return Err(HcbError::InvalidParameter(format!("pair mass {p} outside [t, 1]")));
    }
    let inner = |tau: Scalar| -> Scalar {
        let inset = tau * 1e-12;
        let g =
            |mu: Scalar| 0.5 * (p + t) * phi.value(tau - mu) + 0.5 * (p - t) * phi.value(tau + mu);
        golden_min(g, -tau + inset, tau - inset, cfg.inner_iters()).1
    };
    let objective = |tau: Scalar| p * phi.value(tau) - inner(tau);
    let lo = 1.0 / n as Scalar;
    let (_, v) = grid_then_golden(objective, lo, 0.5, cfg.tau_grid_size.min(256), cfg.inner_iters());
    Ok(v)
}

/// Constrained objective generalized by the pair mass P:
///   V(P) = inf_tau { (2-P) Phi(-tau) - inf_mu [ (2-P-t)/2 Phi(-tau+mu)
///          + (2-P+t)/2 Phi(-tau-mu) ] }.
pub fn cstnd_transform_with_pair_mass(
    phi: &AuxiliaryFunction,
    t: Scalar,
    pair_mass: Scalar,
    cfg: &SolverConfig,
) -> Result<Scalar> {
    cfg.validate()?;
    let c = 2.0 - pair_mass;
    let objective = |tau: Scalar| -> Result<Scalar> {
        let g = |mu: Scalar| {
            0.5 * (c - t) * phi.value(-tau + mu) + 0.5 * (c + t) * phi.value(-tau - mu)
        };
        let (_, inner) = expanding_golden_min(g, 0.0, 1.0, cfg.inner_iters())?;
        Ok(c * phi.value(-tau) - inner)
    };
    let grid = cfg.tau_grid_size.min(96);
    let mut best = Scalar::INFINITY;
    for i in 0..=grid {
        let tau = cfg.tau_cap * (i as Scalar) / (grid as Scalar);
        best = best.min(objective(tau)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aux_fn::AuxiliaryFunction;
    use crate::hypothesis::HypothesisClassSpec;
    use crate::num::xlnx;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn comp_neg_log_value_and_certificate() {
        let phi = AuxiliaryFunction::neg_log();
        let d = solve_comp_transform_detail(&phi, 3, 0.5, &cfg()).unwrap();
        let expect = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((d.value - expect).abs() < 1e-9, "got {} want {}", d.value, expect);
        assert!((d.value - 0.13081).abs() < 1e-5);
        // Inner optimum certificate: mu* = -tau t.
        assert!((d.mu_star + d.tau_star * 0.5).abs() < 1e-6);
    }

    #[test]
    fn comp_squared_value_and_certificate() {
        let phi = AuxiliaryFunction::squared();
        let d = solve_comp_transform_detail(&phi, 4, 0.5, &cfg()).unwrap();
        assert!((d.value - 0.0625).abs() < 1e-8);
        // Inner optimum certificate: mu* = t (tau - 1).
        assert!((d.mu_star - 0.5 * (d.tau_star - 1.0)).abs() < 1e-6);
        assert!((d.tau_star - 0.5).abs() < 1e-6);
    }

    #[test]
    fn comp_t_zero_vanishes() {
        for phi in [
            AuxiliaryFunction::neg_log(),
            AuxiliaryFunction::inv_minus_one(),
            AuxiliaryFunction::one_minus(),
        ] {
            let v = solve_comp_transform(&phi, 4, 0.0, &cfg()).unwrap();
            assert!(v.abs() < 1e-10, "{}: T(0) = {v}", phi.id);
        }
    }

    #[test]
    fn comp_rejects_nonconvex_phi() {
        let sig = AuxiliaryFunction::sigmoid(4.0);
        assert!(solve_comp_transform(&sig, 3, 0.5, &cfg()).is_err());
    }

    #[test]
    fn cstnd_values() {
        let phi = AuxiliaryFunction::exponential();
        let v = solve_cstnd_transform(&phi, 2, 1.0, &cfg(), CstndCoefficient::Table).unwrap();
        assert!((v - (2.0 - 3.0f64.sqrt())).abs() < 1e-8);

        let hinge = AuxiliaryFunction::hinge();
        for t in [0.0, 0.3, 0.8] {
            let v = solve_cstnd_transform(&hinge, 2, t, &cfg(), CstndCoefficient::Table).unwrap();
            assert!((v - t).abs() < 1e-7, "hinge T({t}) = {v}");
        }
    }

    #[test]
    fn bounded_comp_matches_logistic_psi() {
        let phi = AuxiliaryFunction::neg_log();
        // Wide class: unconstrained values.
        let wide = HypothesisClassSpec::bounded_symmetric(12.0, 2).unwrap();
        let v = solve_bounded_comp_transform(&phi, &wide, 0.5, &cfg()).unwrap();
        let expect = 0.5 * (xlnx(1.5) + xlnx(0.5));
        assert!((v - expect).abs() < 1e-5, "got {v} want {expect}");

        // Lambda = 1, n = 2: knee at tanh(1); check both branches.
        let unit = HypothesisClassSpec::bounded_symmetric(1.0, 2).unwrap();
        let (s_min, s_max) = (unit.s_min().unwrap(), unit.s_max().unwrap());
        assert!(((s_max - s_min) / (s_max + s_min) - 1.0f64.tanh()).abs() < 1e-12);
        let below = solve_bounded_comp_transform(&phi, &unit, 0.5, &cfg()).unwrap();
        assert!((below - expect).abs() < 1e-6);
        let above = solve_bounded_comp_transform(&phi, &unit, 0.9, &cfg()).unwrap();
        let psi_lin = 0.45 * (s_max / s_min).ln()
            + (2.0 * (s_max * s_min).sqrt() / (s_max + s_min)).ln();
        assert!((above - psi_lin).abs() < 1e-6, "got {above} want {psi_lin}");
    }

    #[test]
    fn bounded_cstnd_matches_piecewise_exp() {
        let phi = AuxiliaryFunction::exponential();
        let unit = HypothesisClassSpec::bounded_symmetric(1.0, 2).unwrap();
        let below = solve_bounded_cstnd_transform(&phi, &unit, 0.5, &cfg()).unwrap();
        assert!((below - (1.0 - 0.75f64.sqrt())).abs() < 1e-7);
        let above = solve_bounded_cstnd_transform(&phi, &unit, 0.9, &cfg()).unwrap();
        let e = std::f64::consts::E;
        let expect = 0.45 * (e - 1.0 / e) + 0.5 * (2.0 - e - 1.0 / e);
        assert!((above - expect).abs() < 1e-7, "got {above} want {expect}");
        // t = 0 vanishes.
        let zero = solve_bounded_cstnd_transform(&phi, &unit, 0.0, &cfg()).unwrap();
        assert!(zero.abs() < 1e-10);
    }

    #[test]
    fn bounded_solver_degenerates_to_unbounded() {
        let phi = AuxiliaryFunction::neg_log();
        let huge = HypothesisClassSpec::bounded_symmetric(50.0, 3).unwrap();
        for t in [0.2, 0.6, 0.95] {
            let bounded = solve_bounded_comp_transform(&phi, &huge, t, &cfg()).unwrap();
            let unbounded = solve_comp_transform(&phi, 3, t, &cfg()).unwrap();
            assert!((bounded - unbounded).abs() < 1e-5, "t = {t}");
        }
    }

    #[test]
    fn binary_transform_values() {
        let expf = AuxiliaryFunction::exponential();
        let v = binary_transform_from_phi(&expf, 0.6, true).unwrap();
        assert!((v - 0.2).abs() < 1e-9);
        let quad = AuxiliaryFunction::quadratic();
        let v = binary_transform_from_phi(&quad, 0.4, true).unwrap();
        assert!((v - 0.16).abs() < 1e-9);
        let v = binary_transform_from_phi(&quad, 0.0, true).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(binary_transform_from_phi(&expf, 0.5, false).is_err());
    }

    #[test]
    fn pair_mass_reduction_endpoints() {
        // Comp-sum: the minimizing pair mass is the right endpoint P = 1.
        let phi = AuxiliaryFunction::neg_log();
        let mut quick = cfg();
        quick.tau_grid_size = 64;
        let t = 0.4;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=16 {
            let p = t + (1.0 - t) * (i as f64) / 16.0;
            let v = comp_transform_with_pair_mass(&phi, 4, t, p, &quick).unwrap();
            if v < best.1 {
                best = (p, v);
            }
        }
        assert!((best.0 - 1.0).abs() < 1e-9, "comp minimizing P = {}", best.0);
        let reduced = solve_comp_transform(&phi, 4, t, &quick).unwrap();
        assert!((best.1 - reduced).abs() < 1e-6);

        // Constrained: the minimizing pair mass is the left endpoint
        // P = 1/(n-1), i.e. total weight 2 - 1/(n-1).
        let expf = AuxiliaryFunction::exponential();
        let n = 4;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=16 {
            let p = 1.0 / (n as f64 - 1.0)
                + (1.0 - 1.0 / (n as f64 - 1.0)) * (i as f64) / 16.0;
            let v = cstnd_transform_with_pair_mass(&expf, t, p, &quick).unwrap();
            if v < best.1 {
                best = (p, v);
            }
        }
        assert!(
            (best.0 - 1.0 / (n as f64 - 1.0)).abs() < 1e-9,
            "cstnd minimizing P = {}",
            best.0
        );
        let exact = solve_cstnd_transform(&expf, n, t, &quick, CstndCoefficient::ExactN).unwrap();
        assert!((best.1 - exact).abs() < 1e-6);
    }

    #[test]
    fn solver_outputs_nondecreasing_in_t() {
        let phi = AuxiliaryFunction::inv_minus_one();
        let mut quick = cfg();
        quick.tau_grid_size = 64;
        let mut prev = -1.0;
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let v = solve_comp_transform(&phi, 3, t, &quick).unwrap();
            assert!(v >= prev - 1e-10);
            prev = v;
        }
        let expf = AuxiliaryFunction::exponential();
        let mut prev = -1.0;
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let v = solve_cstnd_transform(&expf, 3, t, &quick, CstndCoefficient::Table).unwrap();
            assert!(v >= prev - 1e-10);
            prev = v;
        }
    }
}
