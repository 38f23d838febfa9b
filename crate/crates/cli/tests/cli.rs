//! End-to-end tests of the binary: exit codes, schema lines, atomic
//! output, strict config parsing.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hcb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcb")).args(args).output().expect("spawn hcb")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("hcb-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn transform_single_value_matches_table() {
    let out = hcb(&["transform", "--family", "binary-linear", "--loss", "hinge", "--B", "0.5", "--t", "0.4"]);
    assert!(out.status.success());
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 0.2).abs() < 1e-12);
}

#[test]
fn witness_prints_the_negative_pair() {
    for kind in ["adversarial-convex", "adversarial-symmetric", "max-loss"] {
        let out = hcb(&["witness", "--kind", kind]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), "(0.5, 0)");
    }
}

#[test]
fn csv_schema_lines_are_pinned() {
    let out = hcb(&["transform", "--curve", "comp-sum:tau=1,n=3", "--t-grid", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# hcb-csv v1 transform");
    assert_eq!(lines.next().unwrap(), "t,T,Gamma_of_T");

    let out = hcb(&[
        "simulate", "--scenario", "nonadversarial", "--sigma", "0.1", "--samples", "20000",
        "--shards", "4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# hcb-csv v1 simulate");
    assert_eq!(
        lines.next().unwrap(),
        "sigma,loss,risk_target,se_target,risk_surrogate,se_surrogate,slack"
    );
    assert_eq!(text.lines().count(), 2 + 3);

    let out = hcb(&["solve", "--family", "cstnd", "--phi", "exp", "--t-grid", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("# hcb-csv v1 solve\nt,T_solver,T_closed_form_if_known,abs_diff\n"));

    let out = hcb(&["growth", "--curve", "table-cstnd:id=exp", "--points", "12"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("# hcb-csv v1 growth\nt,T,fitted,residual\n"));
}

#[test]
fn usage_errors_exit_one() {
    let out = hcb(&["transform", "--family", "binary-linear", "--loss", "nope", "--B", "1", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hcb(&["nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hcb(&["transform", "--curve", "binary-linear:id=hinge,B=1,junk=2", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_filter_runs_and_reports() {
    let out = hcb(&["selftest", "--only", "comp-sum-values"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("criterion,2,comp-sum-values,pass"));
}

#[test]
fn config_file_supplies_flags_strictly() {
    let cfg = tmp_path("config");
    std::fs::write(&cfg, "tau=1\nbeta=0.5\nn=4\n").unwrap();
    let out = hcb(&["tightness", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("achieved_target=0.5"));

    std::fs::write(&cfg, "tau=1\nbeta=0.5\nunknown_key=1\n").unwrap();
    let out = hcb(&["tightness", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let _ = std::fs::remove_file(&cfg);
}

#[test]
fn output_file_is_written_atomically() {
    let path = tmp_path("transform.csv");
    let out = hcb(&[
        "transform", "--curve", "adversarial-rho:B=0.8,rho=1", "--t-grid", "4", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# hcb-csv v1 transform"));
    // No temp leftovers next to the output.
    let dir = path.parent().unwrap();
    let leftovers = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains("transform.csv.") )
        .count();
    assert_eq!(leftovers, 0);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn verify_round_trips_a_distribution_file() {
    let dist_path = tmp_path("dist.csv");
    // Two binary support points.
    std::fs::write(&dist_path, "# hcb-dist v1\n0.5,0.2,0.8,0.2\n0.5,0.7,0.3,0.7\n").unwrap();
    let out = hcb(&[
        "verify",
        "--surrogate", "margin:id=hinge",
        "--target", "zero-one",
        "--class", "linear:W=1,B=0.8,n=2",
        "--curve", "binary-linear:id=hinge,B=0.8",
        "--dist", dist_path.to_str().unwrap(),
        "--w", "0.5",
        "--b", "0.1",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# hcb-csv v1 verify");
    assert_eq!(
        lines.next().unwrap(),
        "target_excess,surrogate_excess,target_gap,surrogate_gap,lhs,rhs,slack,tight"
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .take(7)
        .map(|f| f.parse::<f64>().unwrap())
        .collect();
    let slack = row[6];
    assert!(slack >= -1e-9, "bound violated: slack {slack}");
    let _ = std::fs::remove_file(&dist_path);
}

#[test]
fn gap_formula_emits_ordered_rows() {
    let out = hcb(&["gap", "--lambda", "1", "--n", "10", "--r-star", "2.0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let gaps: Vec<f64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .collect();
    assert_eq!(gaps.len(), 4);
    assert!(gaps.windows(2).all(|w| w[0] > w[1]));
}
