//! Property-based invariants across the module boundaries.

use hcb_core::aux_fn::{AuxId, AuxiliaryFunction};
use hcb_core::loss::{eval_comp_sum, phi_tau, CompSumParams};
use hcb_core::risk::comp_sum_cstar_complete;
use hcb_core::sim::{estimate_risks, SimulationSpec};
use hcb_core::transform::{binary_linear_transform, comp_sum_transform};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The tau = 1 comp-sum loss is exactly the negative log-softmax.
    #[test]
    fn comp_sum_tau1_matches_neg_log_softmax(
        scores in prop::collection::vec(-20.0f64..20.0, 2..6),
        pick in 0usize..6,
    ) {
        let n = scores.len();
        let y = pick % n;
        let params = CompSumParams::new(1.0, n).unwrap();
        let got = eval_comp_sum(params, &scores, y).unwrap();
        let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
        let expected = lse - scores[y];
        prop_assert!((got - expected).abs() < 1e-12);
    }

    /// Phi^tau(u) <= u and Phi^tau differences shrink as tau grows.
    #[test]
    fn phi_tau_bounds_and_monotone_differences(
        u1 in 0.0f64..8.0,
        gap in 0.0f64..4.0,
        tau_a in 0.0f64..3.0,
        extra in 0.0f64..2.0,
    ) {
        let u2 = u1;
        let u1 = u1 + gap;
        let (ta, tb) = (tau_a, tau_a + extra);
        prop_assert!(phi_tau(ta, u1) <= u1 + 1e-12);
        let da = phi_tau(ta, u1) - phi_tau(ta, u2);
        let db = phi_tau(tb, u1) - phi_tau(tb, u2);
        prop_assert!(db <= da + 1e-12);
    }

    /// Comp-sum transformation curves stay within their certificates for
    /// random parameters.
    #[test]
    fn comp_sum_curves_certify(tau in 0.0f64..3.0, n in 2usize..12) {
        let curve = comp_sum_transform(tau, n).unwrap();
        prop_assert!(curve.certify().is_ok());
        // Tightness construction agrees with the curve on [0, 1] taus.
        if tau <= 1.0 {
            let out = hcb_core::verify::tightness_comp_sum(tau, n, 0.5).unwrap();
            prop_assert!((out.achieved_surrogate - out.transform_value).abs() < 1e-8);
        }
    }

    /// Binary linear curves certify and invert for random bounds.
    #[test]
    fn binary_curves_certify(b in 0.05f64..5.0, t in 0.0f64..1.0) {
        for id in [AuxId::Hinge, AuxId::Logistic2, AuxId::Exponential, AuxId::Quadratic] {
            let curve = binary_linear_transform(&id, b).unwrap();
            let s = curve.eval(t).unwrap();
            let back = curve.eval(curve.invert(s)).unwrap();
            prop_assert!((back - s).abs() < 1e-8);
        }
    }

    /// Best-in-class conditional risk never exceeds the equal-score risk.
    #[test]
    fn cstar_below_any_feasible_point(
        raw in prop::collection::vec(1e-3f64..1.0, 3..5),
        tau in 0.0f64..2.5,
    ) {
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let n = probs.len();
        let cstar = comp_sum_cstar_complete(tau, &probs);
        let equal = phi_tau(tau, (n - 1) as f64);
        prop_assert!(cstar <= equal + 1e-10);
        prop_assert!(cstar >= -1e-12);
    }
}

/// Identical specs produce identical CSV-able numbers; different shard
/// counts may differ but stay within the Monte-Carlo envelope.
#[test]
fn simulation_shard_partition_is_consistent() {
    let mut spec = SimulationSpec::non_adversarial(0.1);
    spec.sample_count = 60_000;
    spec.shards = 6;
    let a = estimate_risks(&spec).unwrap();
    spec.shards = 12;
    let b = estimate_risks(&spec).unwrap();
    for (ea, eb) in a.estimates.iter().zip(&b.estimates) {
        let tol = 6.0 * (ea.se_surrogate + eb.se_surrogate).max(1e-4);
        assert!((ea.risk_surrogate - eb.risk_surrogate).abs() <= tol);
    }
}

/// The margin catalog upper-bounds the 0/1 indicator everywhere the
/// transformation machinery relies on it.
#[test]
fn margin_catalog_dominates_indicator() {
    for phi in [
        AuxiliaryFunction::hinge(),
        AuxiliaryFunction::logistic2(),
        AuxiliaryFunction::exponential(),
        AuxiliaryFunction::quadratic(),
        AuxiliaryFunction::sigmoid(2.0),
        AuxiliaryFunction::rho_margin(0.7),
    ] {
        for i in 0..1000 {
            let t = -6.0 + 12.0 * (i as f64) / 999.0;
            let ind = if t <= 0.0 { 1.0 } else { 0.0 };
            assert!(phi.value(t) >= ind - 1e-12, "{} at {}", phi.id, t);
        }
    }
}
