//! Acceptance suite: runs every numbered criterion at desk scale and
//! prints one pass/fail line per criterion.

use hcb_core::selftest::{run_all, SelftestOptions};

fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "solver-vs-catalog",
        2 => "comp-sum-values",
        3 => "tightness",
        4 => "witnesses",
        5 => "growth",
        6 => "simulation",
        7 => "gap-ordering",
        8 => "oracle-equivalence",
        9 => "inversion",
        10 => "bound-fuzz",
        _ => panic!("unknown criterion {id}"),
    }
}

fn run_criterion(id: usize) {
    let mut opts = SelftestOptions::default();
    opts.only = Some(criterion_name(id).to_string());
    let reports = run_all(&opts);
    let report = reports
        .iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("criterion {id} missing from the suite"));
    println!(
        "criterion {:2} [{}] {} ({:.1}s): {}",
        report.id,
        if report.pass { "PASS" } else { "FAIL" },
        report.name,
        report.seconds,
        report.detail
    );
    assert!(report.pass, "criterion {} ({}) failed: {}", report.id, report.name, report.detail);
}

macro_rules! criterion_test {
    ($test_name:ident, $id:expr) => {
        #[test]
        fn $test_name() {
            run_criterion($id);
        }
    };
}

criterion_test!(criterion_01_solver_vs_catalog, 1);
criterion_test!(criterion_02_comp_sum_values, 2);
criterion_test!(criterion_03_tightness, 3);
criterion_test!(criterion_04_witnesses, 4);
criterion_test!(criterion_05_growth, 5);
criterion_test!(criterion_06_simulation, 6);
criterion_test!(criterion_07_gap_ordering, 7);
criterion_test!(criterion_08_oracle_equivalence, 8);
criterion_test!(criterion_09_inversion, 9);
criterion_test!(criterion_10_bound_fuzz, 10);
