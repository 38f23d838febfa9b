//! `hcb`: consistency-bound toolkit CLI. Subcommands evaluate and invert
//! transformation curves, recompute them with the inf-sup solver, verify
//! bounds on finite-support distributions, reproduce the tightness and
//! negative-result constructions, compute minimizability gaps, run the
//! mixture simulations, certify growth rates, and run the acceptance
//! suite.

mod output;
mod spec_args;

use clap::{Args, Parser, Subcommand};
use hcb_core::dist::DiscreteDistribution;
use hcb_core::growth::fit_growth;
use hcb_core::risk::{gap_ordering_check, minimizability_gap, GapMode, LossKind, PointEval};
use hcb_core::selftest::{run_all, SelftestOptions};
use hcb_core::sim::{sweep_sigma, Scenario, SimLoss, SimulationSpec};
use hcb_core::solver::{
    binary_transform_from_phi, solve_bounded_comp_transform, solve_bounded_cstnd_transform,
    solve_comp_transform, solve_cstnd_transform, CstndCoefficient, SolverConfig,
};
use hcb_core::verify::{
    negative_witness_adversarial, negative_witness_max_loss, tightness_comp_sum, verify_bound,
    RiskSplit,
};
use hcb_core::HypothesisClassSpec;
use output::{emit, fmt_float, Csv};
use spec_args::{parse_aux, parse_class, parse_curve, parse_loss};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hcb", version, about = "Consistency-bound toolkit")]
struct Cli {
    /// Flat key=value config file; each line supplies one long flag for
    /// the chosen subcommand. Unknown keys are errors.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a transformation curve: a single value or a CSV grid.
    Transform(TransformArgs),
    /// Evaluate the inverse of a transformation curve.
    Invert(InvertArgs),
    /// Recompute a transformation with the inf-sup solver.
    Solve(SolveArgs),
    /// Verify a consistency bound on a finite-support distribution.
    Verify(VerifyArgs),
    /// Run the comp-sum tightness construction.
    Tightness(TightnessArgs),
    /// Print a negative-result witness record.
    Witness(WitnessArgs),
    /// Minimizability gaps: closed-formula family or distribution modes.
    Gap(GapArgs),
    /// Monte-Carlo mixture simulation.
    Simulate(SimulateArgs),
    /// Fit the growth rate of a transformation near zero.
    Growth(GrowthArgs),
    /// Run the acceptance criteria at desk scale.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct TransformArgs {
    /// Curve specification, e.g. binary-linear:id=hinge,B=0.5
    #[arg(long)]
    curve: Option<String>,
    /// Shorthand for binary-linear curves: --family binary-linear
    /// --loss hinge --B 0.5
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long = "B", visible_alias = "b-bound")]
    b_bound: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Evaluate at a single point and print the value.
    #[arg(long)]
    t: Option<f64>,
    /// Emit CSV (t, T, Gamma_of_T) on a uniform grid of this many points.
    #[arg(long, default_value_t = 101)]
    t_grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn curve_from_transform_args(args: &TransformArgs) -> Result<hcb_core::TransformCurve, String> {
    if let Some(curve) = &args.curve {
        return parse_curve(curve);
    }
    let family = args.family.as_deref().ok_or("need --curve or --family")?;
    match family {
        "binary-linear" | "binary-nn" => {
            let loss = args.loss.as_deref().ok_or("need --loss")?;
            let b = args.b_bound.ok_or("need --B")?;
            let (_, id) = parse_aux(loss, args.k, args.rho, None)?;
            hcb_core::transform::binary_linear_transform(&id, b).map_err(|e| e.to_string())
        }
        other => {
            Err(format!("--family shorthand only covers binary-linear; use --curve for `{other}`"))
        }
    }
}

#[derive(Args)]
struct InvertArgs {
    #[arg(long)]
    curve: String,
    /// Surrogate-regret value to invert.
    #[arg(long)]
    s: f64,
}

#[derive(Args)]
struct SolveArgs {
    /// comp | cstnd | binary
    #[arg(long)]
    family: String,
    /// Auxiliary function id (neg-log, inv-minus-one, gen-ce, one-minus,
    /// squared, exp, hinge, sq-hinge, logistic2, quadratic, ...).
    #[arg(long)]
    phi: String,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Score radius of a bounded symmetric class; switches to the
    /// bounded solver.
    #[arg(long)]
    bounded: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 51)]
    t_grid: usize,
    #[arg(long, default_value_t = 10.0)]
    tau_cap: f64,
    /// Constrained weighting: table (total weight 2) or exact-n.
    #[arg(long, default_value = "table")]
    coefficient: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Surrogate loss, e.g. comp-sum:tau=1,n=3 or margin:id=hinge
    #[arg(long)]
    surrogate: String,
    /// Target loss, e.g. zero-one or adv-zero-one:gamma=0.1
    #[arg(long)]
    target: String,
    /// Hypothesis class, e.g. linear:W=1,B=0.8,n=2
    #[arg(long)]
    class: String,
    /// Transformation curve specification.
    #[arg(long)]
    curve: String,
    /// Distribution file (rows weight,norm_x,p1..pn).
    #[arg(long)]
    dist: PathBuf,
    /// Score file: one comma-separated score row per support point.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Binary linear hypothesis used when no score file is given.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// decoupled | linear-1d
    #[arg(long, default_value = "decoupled")]
    split: String,
    #[arg(long, default_value_t = 96)]
    grid: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TightnessArgs {
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long)]
    beta: f64,
}

#[derive(Args)]
struct WitnessArgs {
    /// adversarial-convex | adversarial-symmetric | max-loss
    #[arg(long)]
    kind: String,
    /// Auxiliary id for the surrogate (defaults: hinge for the convex
    /// witness, sigmoid for the symmetric one).
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    b_bound: f64,
}

#[derive(Args)]
struct GapArgs {
    /// formula | decoupled | linear-1d
    #[arg(long, default_value = "formula")]
    mode: String,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long)]
    r_star: Option<f64>,
    /// Comma-separated tau list for the formula mode.
    #[arg(long, default_value = "0,1,1.5,2")]
    taus: String,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// nonadversarial | adversarial
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    sigma: Option<f64>,
    /// Comma-separated sigma list (descending).
    #[arg(long)]
    sigmas: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 12_345)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    shards: u64,
    /// Comma-separated loss list; defaults to the scenario's trio.
    #[arg(long)]
    losses: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Linear hypothesis "a,b".
    #[arg(long, default_value = "-5,0", allow_hyphen_values = true)]
    hypothesis: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GrowthArgs {
    /// Curve specification; alternatively --binary-phi for the
    /// complete-class binary transformation of a margin auxiliary.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    binary_phi: Option<String>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    t_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    t_max: f64,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run only criteria whose name contains this substring.
    #[arg(long)]
    only: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 12_345)]
    seed: u64,
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    // Splice --config key=value pairs into argv ahead of clap parsing;
    // unknown keys then fail strict parsing like any unknown flag.
    if let Some(pos) = argv.iter().position(|a| a == "--config") {
        if pos + 1 >= argv.len() {
            eprintln!("config: --config needs a path");
            return ExitCode::from(1);
        }
        let path = argv[pos + 1].clone();
        match std::fs::read_to_string(&path) {
            Ok(text) => {
                let mut extra = Vec::new();
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    match line.split_once('=') {
                        Some((k, v)) => {
                            extra.push(format!("--{}", k.trim()));
                            let v = v.trim();
                            if !v.is_empty() {
                                extra.push(v.to_string());
                            }
                        }
                        None => {
                            eprintln!("config: expected key=value, got `{line}`");
                            return ExitCode::from(1);
                        }
                    }
                }
                argv.splice(pos..pos + 2, std::iter::empty());
                argv.extend(extra);
            }
            Err(e) => {
                eprintln!("config: cannot read {path}: {e}");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes; anything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Transform(args) => run_transform(args),
        Command::Invert(args) => run_invert(args),
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Tightness(args) => run_tightness(args),
        Command::Witness(args) => run_witness(args),
        Command::Gap(args) => run_gap(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Growth(args) => run_growth(args),
        Command::Selftest(args) => run_selftest(args),
    }
}

fn io_err(e: std::io::Error) -> String {
    format!("io: {e}")
}

fn run_transform(args: TransformArgs) -> Result<ExitCode, String> {
    let curve = curve_from_transform_args(&args)?;
    if let Some(t) = args.t {
        let v = curve.eval(t).map_err(|e| e.to_string())?;
        println!("{v}");
        return Ok(ExitCode::SUCCESS);
    }
    let mut csv = Csv::new("transform", "t,T,Gamma_of_T");
    let n = args.t_grid.max(2);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let v = curve.eval(t).map_err(|e| e.to_string())?;
        let back = curve.invert(v);
        csv.row(&[fmt_float(t), fmt_float(v), fmt_float(back)]);
    }
    emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_invert(args: InvertArgs) -> Result<ExitCode, String> {
    let curve = parse_curve(&args.curve)?;
    println!("{}", curve.invert(args.s));
    Ok(ExitCode::SUCCESS)
}

fn run_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let (phi, aux_id) = parse_aux(&args.phi, args.k, args.rho, args.q)?;
    let cfg = SolverConfig { tau_cap: args.tau_cap, ..SolverConfig::default() };
    let coefficient = match args.coefficient.as_str() {
        "table" => CstndCoefficient::Table,
        "exact-n" | "exact" => CstndCoefficient::ExactN,
        other => return Err(format!("unknown coefficient mode `{other}`")),
    };
    let bounded_class = match args.bounded {
        Some(lambda) => Some(
            HypothesisClassSpec::bounded_symmetric(lambda, args.n).map_err(|e| e.to_string())?,
        ),
        None => None,
    };
    let closed = closed_form_for(&args.family, &aux_id, args.n, args.bounded)?;
    let solve_at = |t: f64| -> Result<f64, String> {
        let value = match (args.family.as_str(), &bounded_class) {
            ("comp", None) => solve_comp_transform(&phi, args.n, t, &cfg),
            ("comp", Some(class)) => solve_bounded_comp_transform(&phi, class, t, &cfg),
            ("cstnd", None) => solve_cstnd_transform(&phi, args.n, t, &cfg, coefficient),
            ("cstnd", Some(class)) => solve_bounded_cstnd_transform(&phi, class, t, &cfg),
            ("binary", None) => binary_transform_from_phi(&phi, t, true),
            ("binary", Some(_)) => {
                return Err(
                    "the binary family has no bounded solver; use the catalog curves".into()
                )
            }
            (other, _) => return Err(format!("unknown solver family `{other}`")),
        };
        value.map_err(|e| e.to_string())
    };
    if let Some(t) = args.t {
        println!("{}", solve_at(t)?);
        return Ok(ExitCode::SUCCESS);
    }
    let mut csv = Csv::new("solve", "t,T_solver,T_closed_form_if_known,abs_diff");
    let n = args.t_grid.max(2);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let solver = solve_at(t)?;
        let (closed_text, diff_text) = match &closed {
            Some(curve) => {
                let c = curve.eval(t).map_err(|e| e.to_string())?;
                (fmt_float(c), fmt_float((solver - c).abs()))
            }
            None => (String::new(), String::new()),
        };
        csv.row(&[fmt_float(t), fmt_float(solver), closed_text, diff_text]);
    }
    emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn closed_form_for(
    family: &str,
    aux_id: &hcb_core::AuxId,
    n: usize,
    bounded: Option<f64>,
) -> Result<Option<hcb_core::TransformCurve>, String> {
    use hcb_core::transform::{
        bounded_cstnd_exp_psi, bounded_hypothesis_psi, multiclass_table_transform, BoundedPsiLoss,
        TableFamily, TableParams,
    };
    use hcb_core::AuxId;
    let curve = match (family, bounded) {
        ("comp", None) => {
            multiclass_table_transform(TableFamily::CompSumPhi, aux_id, n, TableParams::default())
                .ok()
        }
        ("cstnd", None) => {
            multiclass_table_transform(TableFamily::CstndPhi, aux_id, n, TableParams::default())
                .ok()
        }
        ("comp", Some(lambda)) => {
            let class =
                HypothesisClassSpec::bounded_symmetric(lambda, n).map_err(|e| e.to_string())?;
            let loss = match aux_id {
                AuxId::NegLog => Some(BoundedPsiLoss::Logistic),
                AuxId::InvMinusOne => Some(BoundedPsiLoss::SumExponential),
                AuxId::GenCe { q } => Some(BoundedPsiLoss::GenCe { q: *q }),
                AuxId::OneMinus => Some(BoundedPsiLoss::Mae),
                _ => None,
            };
            loss.and_then(|loss| bounded_hypothesis_psi(loss, &class).ok())
        }
        ("cstnd", Some(lambda)) => match aux_id {
            AuxId::Exponential => bounded_cstnd_exp_psi(lambda).ok(),
            _ => None,
        },
        ("binary", None) => {
            // Complete-class limit of the linear-class curves.
            hcb_core::transform::binary_linear_transform(aux_id, 60.0).ok()
        }
        _ => None,
    };
    Ok(curve)
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let surrogate = parse_loss(&args.surrogate)?;
    let target = parse_loss(&args.target)?;
    let class = parse_class(&args.class)?;
    let curve = parse_curve(&args.curve)?;
    let text = std::fs::read_to_string(&args.dist).map_err(io_err)?;
    let dist = DiscreteDistribution::from_text(&text).map_err(|e| e.to_string())?;

    let evals_for = |loss: &LossKind| -> Result<Vec<PointEval>, String> {
        if let Some(path) = &args.scores {
            let text = std::fs::read_to_string(path).map_err(io_err)?;
            let mut evals = Vec::new();
            for line in text
                .lines()
                .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            {
                let row: Vec<f64> = line
                    .split(',')
                    .map(|f| f.trim().parse::<f64>().map_err(|_| format!("bad score `{f}`")))
                    .collect::<Result<_, _>>()?;
                evals.push(match row.len() {
                    1 => PointEval::Binary(row[0]),
                    _ => PointEval::Multi(row),
                });
            }
            return Ok(evals);
        }
        let (w, b) = (args.w.ok_or("need --scores or --w/--b")?, args.b.unwrap_or(0.0));
        Ok(dist
            .points
            .iter()
            .map(|wp| {
                let score = w * wp.point.coord + b;
                match loss {
                    LossKind::SupMargin { gamma, .. } | LossKind::AdversarialZeroOne { gamma } => {
                        let spread = gamma * w.abs();
                        PointEval::BinaryBall { under: score - spread, over: score + spread }
                    }
                    _ => PointEval::Binary(score),
                }
            })
            .collect())
    };
    let sur_evals = evals_for(&surrogate)?;
    let tgt_evals = evals_for(&target)?;
    let split = match args.split.as_str() {
        "decoupled" => RiskSplit::Decoupled,
        "linear-1d" => RiskSplit::Linear1dGrid { grid: args.grid },
        other => return Err(format!("unknown split `{other}`")),
    };
    let report = verify_bound(
        &surrogate,
        &target,
        &curve,
        &class,
        &dist,
        &sur_evals,
        &tgt_evals,
        split,
        args.tolerance,
    )
    .map_err(|e| e.to_string())?;
    let mut csv = Csv::new(
        "verify",
        "target_excess,surrogate_excess,target_gap,surrogate_gap,lhs,rhs,slack,tight",
    );
    csv.row(&[
        fmt_float(report.target_excess),
        fmt_float(report.surrogate_excess),
        fmt_float(report.target_gap),
        fmt_float(report.surrogate_gap),
        fmt_float(report.lhs),
        fmt_float(report.rhs),
        fmt_float(report.slack),
        report.tight.to_string(),
    ]);
    emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_tightness(args: TightnessArgs) -> Result<ExitCode, String> {
    let out = tightness_comp_sum(args.tau, args.n, args.beta).map_err(|e| e.to_string())?;
    println!(
        "achieved_target={} achieved_surrogate={} transform={} residual={:e}",
        out.achieved_target,
        out.achieved_surrogate,
        out.transform_value,
        (out.achieved_surrogate - out.transform_value).abs()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_witness(args: WitnessArgs) -> Result<ExitCode, String> {
    let record = match args.kind.as_str() {
        "adversarial-convex" | "adversarial-symmetric" => {
            let default = if args.kind == "adversarial-convex" { "hinge" } else { "sigmoid" };
            let (phi, _) = parse_aux(args.phi.as_deref().unwrap_or(default), None, None, None)?;
            let class = HypothesisClassSpec::linear(1.0, args.b_bound, 2.0, 2)
                .map_err(|e| e.to_string())?
                .with_gamma(args.gamma);
            negative_witness_adversarial(&class, &phi).map_err(|e| e.to_string())?
        }
        "max-loss" => {
            let (phi, _) = parse_aux(args.phi.as_deref().unwrap_or("hinge"), None, None, None)?;
            negative_witness_max_loss(args.n, &phi).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown witness kind `{other}`")),
    };
    println!("({}, {})", record.target_excess, record.surrogate_excess);
    Ok(ExitCode::SUCCESS)
}

fn run_gap(args: GapArgs) -> Result<ExitCode, String> {
    match args.mode.as_str() {
        "formula" => {
            let lambda = args.lambda.ok_or("formula mode needs --lambda")?;
            let r_star = args.r_star.ok_or("formula mode needs --r-star")?;
            let taus: Vec<f64> = args
                .taus
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad tau `{t}`")))
                .collect::<Result<_, _>>()?;
            let gaps =
                gap_ordering_check(lambda, args.n, r_star, &taus).map_err(|e| e.to_string())?;
            let mut csv = Csv::new("gap", "tau,gap");
            for (tau, gap) in gaps {
                csv.row(&[fmt_float(tau), fmt_float(gap)]);
            }
            emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
        }
        mode @ ("decoupled" | "linear-1d") => {
            let loss = parse_loss(args.loss.as_deref().ok_or("need --loss")?)?;
            let class = parse_class(args.class.as_deref().ok_or("need --class")?)?;
            let path = args.dist.as_ref().ok_or("need --dist")?;
            let text = std::fs::read_to_string(path).map_err(io_err)?;
            let dist = DiscreteDistribution::from_text(&text).map_err(|e| e.to_string())?;
            let gap_mode = if mode == "decoupled" {
                GapMode::Decoupled
            } else {
                GapMode::Linear1dGrid { grid: args.grid }
            };
            let report =
                minimizability_gap(&loss, &class, &dist, gap_mode).map_err(|e| e.to_string())?;
            let mut csv = Csv::new("gap", "best_in_class_risk,expected_pointwise_infimum,gap");
            csv.row(&[
                fmt_float(report.best_in_class_risk),
                fmt_float(report.expected_pointwise_infimum),
                fmt_float(report.gap),
            ]);
            emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
        }
        other => return Err(format!("unknown gap mode `{other}`")),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, String> {
    let scenario = match args.scenario.as_str() {
        "nonadversarial" | "nonadv" => Scenario::NonAdversarial,
        "adversarial" | "adv" => Scenario::Adversarial,
        other => return Err(format!("unknown scenario `{other}`")),
    };
    let sigmas: Vec<f64> = match (&args.sigma, &args.sigmas) {
        (Some(s), None) => vec![*s],
        (None, Some(list)) => list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad sigma `{s}`")))
            .collect::<Result<_, _>>()?,
        _ => return Err("give exactly one of --sigma / --sigmas".into()),
    };
    let hyp: Vec<f64> = args
        .hypothesis
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad hypothesis `{s}`")))
        .collect::<Result<_, _>>()?;
    if hyp.len() != 2 {
        return Err("hypothesis must be `a,b`".into());
    }
    let mut spec = match scenario {
        Scenario::NonAdversarial => SimulationSpec::non_adversarial(sigmas[0]),
        Scenario::Adversarial => SimulationSpec::adversarial(sigmas[0]),
    };
    spec.sample_count = args.samples;
    spec.seed = args.seed;
    spec.shards = args.shards;
    spec.gamma = args.gamma;
    spec.hypothesis = (hyp[0], hyp[1]);
    if let Some(losses) = &args.losses {
        spec.losses = losses
            .split(',')
            .map(|l| SimLoss::parse(l.trim()).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
    }
    let results = sweep_sigma(&spec, &sigmas).map_err(|e| e.to_string())?;
    let mut csv = Csv::new(
        "simulate",
        "sigma,loss,risk_target,se_target,risk_surrogate,se_surrogate,slack",
    );
    for result in results {
        for est in result.estimates {
            csv.row(&[
                fmt_float(result.sigma),
                est.loss.name().to_string(),
                fmt_float(est.risk_target),
                fmt_float(est.se_target),
                fmt_float(est.risk_surrogate),
                fmt_float(est.se_surrogate),
                fmt_float(est.slack),
            ]);
        }
    }
    emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_growth(args: GrowthArgs) -> Result<ExitCode, String> {
    let fit = match (&args.curve, &args.binary_phi) {
        (Some(curve), None) => {
            let curve = parse_curve(curve)?;
            fit_growth(|t| curve.eval(t), args.t_min, args.t_max, args.points)
        }
        (None, Some(phi)) => {
            let (phi, _) = parse_aux(phi, args.k, args.rho, None)?;
            fit_growth(
                |t| binary_transform_from_phi(&phi, t, true),
                args.t_min,
                args.t_max,
                args.points,
            )
        }
        _ => return Err("give exactly one of --curve / --binary-phi".into()),
    }
    .map_err(|e| e.to_string())?;
    let mut csv = Csv::new("growth", "t,T,fitted,residual");
    for (t, v) in fit.t_grid.iter().zip(&fit.t_values) {
        let fitted = (fit.intercept + fit.slope * t.ln()).exp();
        csv.row(&[
            fmt_float(*t),
            fmt_float(*v),
            fmt_float(fitted),
            fmt_float((v.ln() - fitted.ln()).abs()),
        ]);
    }
    csv.row(&[
        "summary".to_string(),
        fmt_float(fit.slope),
        fmt_float(fit.envelope_lo),
        fmt_float(fit.envelope_hi),
    ]);
    emit(&csv.into_text(), args.out.as_deref()).map_err(io_err)?;
    Ok(ExitCode::SUCCESS)
}

fn run_selftest(args: SelftestArgs) -> Result<ExitCode, String> {
    let opts = SelftestOptions { samples: args.samples, only: args.only, seed: args.seed };
    let reports = run_all(&opts);
    if reports.is_empty() {
        return Err("no criterion matches the filter".into());
    }
    let mut first_failure: Option<String> = None;
    for report in &reports {
        println!(
            "criterion,{},{},{},{:.2},{}",
            report.id,
            report.name,
            if report.pass { "pass" } else { "fail" },
            report.seconds,
            report.detail.replace(',', ";")
        );
        if !report.pass && first_failure.is_none() {
            first_failure = Some(format!("{} ({})", report.id, report.name));
        }
    }
    match first_failure {
        None => Ok(ExitCode::SUCCESS),
        Some(name) => {
            eprintln!("selftest: first failing criterion: {name}");
            Ok(ExitCode::from(2))
        }
    }
}
