//! The acceptance suite: ten numbered criteria, each with its tolerance
//! pinned in code. Both the `acceptance` integration test target and the
//! CLI `selftest` subcommand drive this list.

use crate::aux_fn::{AuxId, AuxiliaryFunction};
use crate::dist::ConditionalPoint;
use crate::error::Result;
use crate::hypothesis::HypothesisClassSpec;
use crate::loss::CompSumParams;
use crate::risk::{
    best_in_class_conditional, brute_force_conditional_oracle, gap_ordering_check, LossKind,
};
use crate::sim::{estimate_risks, population_risks, SimulationSpec};
use crate::solver::{
    binary_transform_from_phi, solve_comp_transform, solve_cstnd_transform, CstndCoefficient,
    SolverConfig,
};
use crate::transform::{
    adversarial_rho_transform, binary_linear_transform, bounded_hypothesis_psi,
    comp_sum_transform, massart_modified, multiclass_table_transform, BoundedPsiLoss, TableFamily,
    TableParams, TransformCurve,
};
use crate::verify::{
    fuzz_bound_quadruple, negative_witness_adversarial, negative_witness_max_loss,
    registered_quadruples, tightness_binary_sweep, tightness_comp_sum,
};
use crate::Scalar;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    /// Monte-Carlo sample count; the reference scale is 1e6.
    pub samples: u64,
    /// Run only criteria whose name contains this substring.
    pub only: Option<String>,
    pub seed: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { samples: 1_000_000, only: None, seed: 12_345 }
    }
}

struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.failures.push(msg.into());
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn finish(self, id: usize, name: &'static str, started: Instant) -> CriterionReport {
        let pass = self.failures.is_empty();
        let detail = if pass {
            if self.notes.is_empty() {
                "ok".to_string()
            } else {
                self.notes.join("; ")
            }
        } else {
            self.failures.join("; ")
        };
        CriterionReport { id, name, pass, detail, seconds: started.elapsed().as_secs_f64() }
    }
}

fn t_grid(points: usize) -> Vec<Scalar> {
    (0..points).map(|i| i as Scalar / (points - 1) as Scalar).collect()
}

/// Criterion 1: solver reproduces the nine tabulated multi-class rows.
fn criterion_solver_vs_catalog() -> Result<Check> {
    let mut check = Check::new();
    let cfg = SolverConfig::default();
    let n = 4;
    let comp_rows: Vec<(AuxiliaryFunction, TransformCurve)> = vec![
        (
            AuxiliaryFunction::neg_log(),
            multiclass_table_transform(TableFamily::CompSumPhi, &AuxId::NegLog, n, TableParams::default())?,
        ),
        (
            AuxiliaryFunction::inv_minus_one(),
            multiclass_table_transform(
                TableFamily::CompSumPhi,
                &AuxId::InvMinusOne,
                n,
                TableParams::default(),
            )?,
        ),
        (
            AuxiliaryFunction::gen_ce(0.5)?,
            multiclass_table_transform(
                TableFamily::CompSumPhi,
                &AuxId::GenCe { q: 0.5 },
                n,
                TableParams::default(),
            )?,
        ),
        (
            AuxiliaryFunction::one_minus(),
            multiclass_table_transform(TableFamily::CompSumPhi, &AuxId::OneMinus, n, TableParams::default())?,
        ),
        (
            AuxiliaryFunction::squared(),
            multiclass_table_transform(TableFamily::CompSumPhi, &AuxId::Squared, n, TableParams::default())?,
        ),
    ];
    for (phi, table) in &comp_rows {
        let mut worst: Scalar = 0.0;
        for &t in &t_grid(51) {
            let solver = solve_comp_transform(phi, n, t, &cfg)?;
            worst = worst.max((solver - table.eval(t)?).abs());
        }
        check.require(worst <= 1e-6, format!("comp-sum {}: max |solver - closed| = {worst:.2e}", phi.id));
    }
    let cstnd_rows: Vec<(AuxiliaryFunction, TransformCurve)> = vec![
        (
            AuxiliaryFunction::exponential(),
            multiclass_table_transform(TableFamily::CstndPhi, &AuxId::Exponential, n, TableParams::default())?,
        ),
        (
            AuxiliaryFunction::hinge(),
            multiclass_table_transform(TableFamily::CstndPhi, &AuxId::Hinge, n, TableParams::default())?,
        ),
        (
            AuxiliaryFunction::sq_hinge(),
            multiclass_table_transform(TableFamily::CstndPhi, &AuxId::SqHinge, n, TableParams::default())?,
        ),
        (
            AuxiliaryFunction::squared(),
            multiclass_table_transform(TableFamily::CstndPhi, &AuxId::Squared, n, TableParams::default())?,
        ),
    ];
    for (phi, table) in &cstnd_rows {
        let mut worst: Scalar = 0.0;
        for &t in &t_grid(51) {
            let solver = solve_cstnd_transform(phi, n, t, &cfg, CstndCoefficient::Table)?;
            worst = worst.max((solver - table.eval(t)?).abs());
        }
        check.require(
            worst <= 1e-6,
            format!("constrained {}: max |solver - closed| = {worst:.2e}", phi.id),
        );
    }
    check.note("9 rows within 1e-6 on a 51-point grid");
    Ok(check)
}

/// Criterion 2: comp-sum transformation branch values.
fn criterion_comp_sum_values() -> Result<Check> {
    let mut check = Check::new();
    let t1 = comp_sum_transform(1.0, 3)?.eval(1.0)?;
    check.require(
        (t1 - std::f64::consts::LN_2).abs() <= 1e-9,
        format!("T_1(1) = {t1}, want ln 2"),
    );
    let t0 = comp_sum_transform(0.0, 3)?.eval(0.6)?;
    check.require((t0 - 0.2).abs() <= 1e-9, format!("T_0(0.6) = {t0}, want 0.2"));
    let t2 = comp_sum_transform(2.0, 10)?.eval(0.5)?;
    check.require((t2 - 0.05).abs() <= 1e-12, format!("T_2(0.5) = {t2}, want 0.05"));
    Ok(check)
}

/// Criterion 3: tightness constructions.
fn criterion_tightness() -> Result<Check> {
    let mut check = Check::new();
    for &tau in &[0.0, 0.5, 1.0] {
        for i in 1..=9 {
            let beta = i as Scalar / 10.0;
            let out = tightness_comp_sum(tau, 4, beta)?;
            let err = (out.achieved_surrogate - out.transform_value).abs();
            check.require(
                err <= 1e-6,
                format!("comp-sum tightness tau={tau}, beta={beta}: residual {err:.2e}"),
            );
            check.require(
                (out.achieved_target - beta).abs() <= 1e-12,
                format!("comp-sum target regret off at tau={tau}, beta={beta}"),
            );
        }
    }
    let class = HypothesisClassSpec::linear(1.0, 1.0, 2.0, 2)?;
    for (phi, id) in [
        (AuxiliaryFunction::hinge(), AuxId::Hinge),
        (AuxiliaryFunction::sigmoid(1.0), AuxId::Sigmoid { k: 1.0 }),
        (AuxiliaryFunction::rho_margin(1.0), AuxId::RhoMargin { rho: 1.0 }),
    ] {
        let curve = binary_linear_transform(&id, 1.0)?;
        for i in 1..=9 {
            let t = i as Scalar / 10.0;
            let slack = tightness_binary_sweep(&phi, &curve, &class, t, 10_000)?;
            check.require(
                (-1e-7..=1e-4).contains(&slack),
                format!("binary tightness {}: grid-optimal slack {slack:.2e} at t={t}", phi.id),
            );
        }
    }
    Ok(check)
}

/// Criterion 4: negative witnesses return exactly (1/2, 0).
fn criterion_witnesses() -> Result<Check> {
    let mut check = Check::new();
    let class = HypothesisClassSpec::linear(1.0, 1.0, 2.0, 2)?.with_gamma(0.1);
    for phi in [AuxiliaryFunction::hinge(), AuxiliaryFunction::sigmoid(1.0)] {
        let rec = negative_witness_adversarial(&class, &phi)?;
        check.require(
            (rec.target_excess - 0.5).abs() <= 1e-12 && rec.surrogate_excess.abs() <= 1e-12,
            format!(
                "adversarial witness {}: ({}, {})",
                phi.id, rec.target_excess, rec.surrogate_excess
            ),
        );
    }
    for phi in [AuxiliaryFunction::hinge(), AuxiliaryFunction::exponential()] {
        let rec = negative_witness_max_loss(3, &phi)?;
        check.require(
            (rec.target_excess - 0.5).abs() <= 1e-12 && rec.surrogate_excess.abs() <= 1e-12,
            format!(
                "max-loss witness {}: ({}, {})",
                phi.id, rec.target_excess, rec.surrogate_excess
            ),
        );
    }
    Ok(check)
}

/// Criterion 5: growth dichotomy on [1e-4, 1e-2].
fn criterion_growth() -> Result<Check> {
    use crate::growth::fit_growth;
    let mut check = Check::new();
    let smooth: Vec<(&str, Box<dyn Fn(Scalar) -> Result<Scalar>>)> = vec![
        ("binary logistic", {
            let phi = AuxiliaryFunction::logistic2();
            Box::new(move |t| binary_transform_from_phi(&phi, t, true))
        }),
        ("binary exponential", {
            let phi = AuxiliaryFunction::exponential();
            Box::new(move |t| binary_transform_from_phi(&phi, t, true))
        }),
        ("squared hinge", {
            let phi = AuxiliaryFunction::quadratic();
            Box::new(move |t| binary_transform_from_phi(&phi, t, true))
        }),
        ("comp-sum tau=1", {
            let curve = comp_sum_transform(1.0, 4)?;
            Box::new(move |t| curve.eval(t))
        }),
        ("constrained exp", {
            let curve = multiclass_table_transform(
                TableFamily::CstndPhi,
                &AuxId::Exponential,
                4,
                TableParams::default(),
            )?;
            Box::new(move |t| curve.eval(t))
        }),
    ];
    for (name, f) in &smooth {
        let fit = fit_growth(f, 1e-4, 1e-2, 20)?;
        check.require(
            (1.98..=2.02).contains(&fit.slope),
            format!("{name}: slope {:.5} outside [1.98, 2.02]", fit.slope),
        );
        check.require(
            fit.envelope_hi / fit.envelope_lo <= 1.5,
            format!("{name}: envelope ratio {:.3} above 1.5", fit.envelope_hi / fit.envelope_lo),
        );
    }
    let linear: Vec<(&str, TransformCurve)> = vec![
        ("hinge", binary_linear_transform(&AuxId::Hinge, 1.0)?),
        ("rho-margin", binary_linear_transform(&AuxId::RhoMargin { rho: 1.0 }, 1.0)?),
        (
            "mae",
            multiclass_table_transform(TableFamily::CompSumPhi, &AuxId::OneMinus, 4, TableParams::default())?,
        ),
        (
            "constrained hinge",
            multiclass_table_transform(TableFamily::CstndPhi, &AuxId::Hinge, 4, TableParams::default())?,
        ),
    ];
    for (name, curve) in &linear {
        let fit = fit_growth(|t| curve.eval(t), 1e-4, 1e-2, 20)?;
        check.require(
            (0.999..=1.001).contains(&fit.slope),
            format!("{name}: slope {:.6} outside [0.999, 1.001]", fit.slope),
        );
    }
    Ok(check)
}

/// Criterion 6: mixture-simulation reproduction at desk scale.
fn criterion_simulation(samples: u64) -> Result<Check> {
    let mut check = Check::new();
    let sigmas = [0.3, 0.1, 0.03, 0.01, 0.003];
    let mut final_slacks: Vec<(String, Scalar)> = Vec::new();
    for scenario in ["nonadversarial", "adversarial"] {
        for &sigma in &sigmas {
            let mut spec = if scenario == "nonadversarial" {
                SimulationSpec::non_adversarial(sigma)
            } else {
                SimulationSpec::adversarial(sigma)
            };
            spec.sample_count = samples;
            let quad = population_risks(&spec, 100_000)?;
            for (loss, risk) in &quad.per_loss {
                check.require(
                    *risk >= quad.risk_target - 1e-10,
                    format!("{}: population bound violated at sigma={sigma}", loss.name()),
                );
                if sigma == 0.003 {
                    final_slacks.push((loss.name().to_string(), risk - quad.risk_target));
                }
            }
            let mc = estimate_risks(&spec)?;
            for (est, (loss, pop)) in mc.estimates.iter().zip(&quad.per_loss) {
                let err = (est.risk_surrogate - pop).abs();
                check.require(
                    err <= 4.0 * est.se_surrogate + 1e-9,
                    format!(
                        "{}: MC {} vs quadrature {} exceeds 4 SE ({:.1e}) at sigma={sigma}",
                        loss.name(),
                        est.risk_surrogate,
                        pop,
                        est.se_surrogate
                    ),
                );
            }
            let t_err = (mc.estimates[0].risk_target - quad.risk_target).abs();
            check.require(
                t_err <= 4.0 * mc.estimates[0].se_target + 1e-9,
                format!("{scenario}: target MC off by {t_err:.2e} at sigma={sigma}"),
            );
        }
    }
    for (loss, slack) in &final_slacks {
        check.require(
            *slack <= 0.02,
            format!("{loss}: population slack {slack:.4} above 0.02 at sigma=0.003"),
        );
    }
    check.note(format!(
        "slacks at sigma=0.003: {}",
        final_slacks
            .iter()
            .map(|(l, s)| format!("{l}={s:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    Ok(check)
}

/// Criterion 7: deterministic gap ordering across tau.
fn criterion_gap_ordering(seed: u64) -> Result<Check> {
    let mut check = Check::new();
    let mut state = seed | 1;
    let mut rnd = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as Scalar / (1u64 << 53) as Scalar
    };
    let taus = [0.0, 1.0, 1.5, 2.0];
    let mut min_margin = Scalar::INFINITY;
    for i in 0..20 {
        let lambda = 0.2 + 2.8 * rnd();
        let n = [3usize, 10, 100][i % 3];
        let c0 = ((n - 1) as Scalar) * (-2.0 * lambda).exp();
        let r_star = c0 + 0.1 + 1.9 * rnd();
        let gaps = gap_ordering_check(lambda, n, r_star, &taus)?;
        for w in gaps.windows(2) {
            let margin = w[0].1 - w[1].1;
            min_margin = min_margin.min(margin);
            check.require(
                margin > 0.0,
                format!(
                    "ordering not strict at lambda={lambda:.3}, n={n}: gap({}) - gap({}) = {margin:.3e}",
                    w[0].0, w[1].0
                ),
            );
        }
    }
    check.note(format!("smallest strict margin {min_margin:.3e} over 20 tuples"));
    Ok(check)
}

/// Criterion 8: oracle equivalence for every registered closed form.
fn criterion_oracle_equivalence(seed: u64) -> Result<Check> {
    let mut check = Check::new();
    let mut state = seed.wrapping_mul(0xA076_1D64_78BD_642F) | 1;
    let mut rnd = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as Scalar / (1u64 << 53) as Scalar
    };
    let linear = HypothesisClassSpec::linear(1.0, 0.8, 2.0, 2)?;
    let nn = HypothesisClassSpec::one_layer_nn(2.0, 0.5, 0.4, 2.0, 2)?;
    let all = HypothesisClassSpec::all_measurable(2);
    let margin_losses = [
        AuxiliaryFunction::hinge(),
        AuxiliaryFunction::logistic2(),
        AuxiliaryFunction::exponential(),
        AuxiliaryFunction::quadratic(),
        AuxiliaryFunction::sigmoid(1.0),
        AuxiliaryFunction::rho_margin(1.0),
    ];
    let mut pairs: Vec<(LossKind, HypothesisClassSpec, Option<Scalar>)> = Vec::new();
    for phi in &margin_losses {
        pairs.push((LossKind::Margin(phi.clone()), linear.clone(), None));
        pairs.push((LossKind::Margin(phi.clone()), all.clone(), Some(30.0)));
    }
    pairs.push((LossKind::Margin(AuxiliaryFunction::hinge()), nn.clone(), None));
    pairs.push((LossKind::Margin(AuxiliaryFunction::logistic2()), nn.clone(), None));
    let gamma = 0.1;
    pairs.push((
        LossKind::SupMargin { phi: AuxiliaryFunction::rho_margin(1.0), gamma },
        linear.clone().with_gamma(gamma),
        None,
    ));
    pairs.push((
        LossKind::AdversarialZeroOne { gamma },
        linear.clone().with_gamma(gamma),
        None,
    ));
    let complete3 = HypothesisClassSpec::complete_symmetric(3);
    for tau in [0.0, 1.0, 1.5, 2.0] {
        pairs.push((
            LossKind::CompSum(CompSumParams::new(tau, 3)?),
            complete3.clone(),
            Some(12.0),
        ));
    }
    for phi in [
        AuxiliaryFunction::exponential(),
        AuxiliaryFunction::hinge(),
        AuxiliaryFunction::sq_hinge(),
        AuxiliaryFunction::squared(),
    ] {
        pairs.push((LossKind::Constrained(phi), complete3.clone(), Some(12.0)));
    }

    for (loss, class, radius) in &pairs {
        let mut worst: Scalar = 0.0;
        for _ in 0..50 {
            let n = class.n;
            let mut probs: Vec<Scalar> = (0..n).map(|_| rnd() + 1e-3).collect();
            let total: Scalar = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= total);
            let point = ConditionalPoint::new(0, rnd(), probs)?;
            let closed = best_in_class_conditional(loss, class, &point)?;
            let brute = brute_force_conditional_oracle(loss, class, &point, 4096, *radius)?;
            worst = worst.max((closed - brute).abs());
        }
        check.require(
            worst <= 1e-4,
            format!("{} x {}: max |closed - oracle| = {worst:.2e}", loss.name(), class),
        );
    }

    // Deterministic bounded comp-sum forms.
    let bounded = HypothesisClassSpec::bounded_symmetric(1.0, 3)?;
    for tau in [0.0, 1.0, 2.0] {
        let mut probs = vec![0.0; 3];
        probs[1] = 1.0;
        let point = ConditionalPoint::new(0, 0.0, probs)?;
        let loss = LossKind::CompSum(CompSumParams::new(tau, 3)?);
        let closed = best_in_class_conditional(&loss, &bounded, &point)?;
        let brute = brute_force_conditional_oracle(&loss, &bounded, &point, 4096, None)?;
        check.require(
            (closed - brute).abs() <= 1e-4,
            format!("deterministic bounded tau={tau}: closed {closed} vs oracle {brute}"),
        );
    }
    Ok(check)
}

/// Curves for the inversion criterion: every catalog constructor at
/// representative parameters.
fn catalog_curves() -> Result<Vec<TransformCurve>> {
    let mut curves = Vec::new();
    for b in [0.5, 1.0, 2.0] {
        for id in [
            AuxId::Hinge,
            AuxId::Logistic2,
            AuxId::Exponential,
            AuxId::Quadratic,
            AuxId::Sigmoid { k: 1.0 },
            AuxId::RhoMargin { rho: 1.0 },
        ] {
            curves.push(binary_linear_transform(&id, b)?);
        }
    }
    for tau in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
        curves.push(comp_sum_transform(tau, 2)?);
        curves.push(comp_sum_transform(tau, 10)?);
    }
    for id in [AuxId::NegLog, AuxId::InvMinusOne, AuxId::GenCe { q: 0.5 }, AuxId::OneMinus, AuxId::Squared]
    {
        curves.push(multiclass_table_transform(TableFamily::CompSumPhi, &id, 4, TableParams::default())?);
    }
    for id in [AuxId::Exponential, AuxId::Hinge, AuxId::SqHinge, AuxId::Squared] {
        curves.push(multiclass_table_transform(TableFamily::CstndPhi, &id, 4, TableParams::default())?);
    }
    for id in [AuxId::SqHinge, AuxId::Exponential, AuxId::RhoMargin { rho: 0.8 }] {
        curves.push(multiclass_table_transform(TableFamily::SumLoss, &id, 4, TableParams::default())?);
    }
    curves.push(multiclass_table_transform(
        TableFamily::MaxRho,
        &AuxId::RhoMargin { rho: 1.0 },
        4,
        TableParams { b_bound: Some(0.3), lambda: None },
    )?);
    curves.push(adversarial_rho_transform(0.8, 1.0, None)?);
    curves.push(adversarial_rho_transform(0.8, 1.0, Some(2.0))?);
    let quad_base = binary_linear_transform(&AuxId::Quadratic, 5.0)?;
    let log_base = binary_linear_transform(&AuxId::Logistic2, 1.0)?;
    for beta in [0.25, 0.5] {
        curves.push(massart_modified(&quad_base, beta, false)?);
        curves.push(massart_modified(&log_base, beta, false)?);
        curves.push(massart_modified(&quad_base, beta, true)?);
    }
    for n in [2usize, 3] {
        let class = HypothesisClassSpec::bounded_symmetric(1.0, n)?;
        curves.push(bounded_hypothesis_psi(BoundedPsiLoss::Logistic, &class)?);
        curves.push(bounded_hypothesis_psi(BoundedPsiLoss::SumExponential, &class)?);
        curves.push(bounded_hypothesis_psi(BoundedPsiLoss::GenCe { q: 0.5 }, &class)?);
        curves.push(bounded_hypothesis_psi(BoundedPsiLoss::Mae, &class)?);
        curves.push(bounded_hypothesis_psi(BoundedPsiLoss::CstndExp, &class)?);
    }
    Ok(curves)
}

/// Criterion 9: certification plus inversion round trip for every
/// catalog curve.
fn criterion_inversion() -> Result<Check> {
    let mut check = Check::new();
    let curves = catalog_curves()?;
    let count = curves.len();
    for curve in curves {
        if let Err(e) = curve.certify() {
            check.require(false, format!("{}: certificate failed: {e}", curve.source_tag));
            continue;
        }
        let mut worst: Scalar = 0.0;
        for i in 0..=100 {
            let t = i as Scalar / 100.0;
            let s = curve.eval(t)?;
            let round = curve.eval(curve.invert(s))?;
            worst = worst.max((round - s).abs());
        }
        check.require(
            worst <= 1e-8,
            format!("{}: inversion residual {worst:.2e}", curve.source_tag),
        );
    }
    check.note(format!("{count} curves certified and inverted"));
    Ok(check)
}

/// Criterion 10: bound fuzz over every registered quadruple.
fn criterion_bound_fuzz(seed: u64) -> Result<Check> {
    let mut check = Check::new();
    let quads = registered_quadruples()?;
    let count = quads.len();
    for quad in &quads {
        let min_slack = fuzz_bound_quadruple(quad, 200, seed)?;
        check.require(
            min_slack >= -1e-7,
            format!("{}: min slack {min_slack:.3e}", quad.name),
        );
    }
    check.note(format!("{count} quadruples x 200 instances"));
    Ok(check)
}

/// Run the acceptance criteria, optionally filtered by name substring.
pub fn run_all(opts: &SelftestOptions) -> Vec<CriterionReport> {
    type Runner = Box<dyn Fn(&SelftestOptions) -> Result<Check>>;
    let criteria: Vec<(usize, &'static str, Runner)> = vec![
        (1, "solver-vs-catalog", Box::new(|_| criterion_solver_vs_catalog())),
        (2, "comp-sum-values", Box::new(|_| criterion_comp_sum_values())),
        (3, "tightness", Box::new(|_| criterion_tightness())),
        (4, "witnesses", Box::new(|_| criterion_witnesses())),
        (5, "growth", Box::new(|_| criterion_growth())),
        (6, "simulation", Box::new(|o: &SelftestOptions| criterion_simulation(o.samples))),
        (7, "gap-ordering", Box::new(|o: &SelftestOptions| criterion_gap_ordering(o.seed))),
        (8, "oracle-equivalence", Box::new(|o: &SelftestOptions| criterion_oracle_equivalence(o.seed))),
        (9, "inversion", Box::new(|_| criterion_inversion())),
        (10, "bound-fuzz", Box::new(|o: &SelftestOptions| criterion_bound_fuzz(o.seed))),
    ];
    let mut reports = Vec::new();
    for (id, name, run) in criteria {
        if let Some(filter) = &opts.only {
            if !name.contains(filter.as_str()) {
                continue;
            }
        }
        let started = Instant::now();
        let report = match run(opts) {
            Ok(check) => check.finish(id, name, started),
            Err(e) => CriterionReport {
                id,
                name,
                pass: false,
                detail: format!("errored: {e}"),
                seconds: started.elapsed().as_secs_f64(),
            },
        };
        reports.push(report);
    }
    reports
}
