#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamcert::certify::{
    certify_pauli_norm, certify_schatten_norm, chc, pauli_norm_threshold, rchc, rchc_plan, shc,
    shc_schedule, CertificationReport, Decision, Method, ThresholdScale, SCHEMA_VERSION,
};
use hamcert::coeff::{l2_lower_bound, l2_upper_bound, non_identity_set};
use hamcert::hamiltonian::{planted_instance, random_hamiltonian, ResidualSupport};
use hamcert::lowerbound::{
    hypothesis_instances, random_experiment, random_tree, scaling_experiment, tree_tv_bound_check,
    tv_bound_check, ScalingTarget,
};
use hamcert::sampling::hss_sample;
use hamcert::stabilizer::GroupKind;
use hamcert::{EvolutionOracle, PauliHamiltonian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const EXIT_REJECT: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "hamcert",
    version,
    about = "Hamiltonian certification from time-evolution access"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random H₀, optionally with a planted H at a chosen residual norm.
    Gen(GenArgs),
    /// Certify the Hamiltonian in `--h` against `--h0`.
    Certify(CertifyArgs),
    /// Check the Pauli-coefficient bounds on random Hamiltonians (CSV).
    AnalyzeBounds(AnalyzeArgs),
    /// Dump hidden-Hamiltonian stabilizer samples (CSV).
    Sample(SampleArgs),
    /// Evolution-time scaling of a certifier on `H = H₀` (CSV).
    Scaling(ScalingArgs),
    /// Total-variation bound checks on random experiments and trees (CSV).
    Lowerbound(LowerboundArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rchc,
    Chc,
    Shc,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum NormArg {
    Frobenius,
    Pauli,
    Schatten,
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportArg {
    Any,
    Z,
    X,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Z,
    X,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Rchc,
    Shc,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Lower,
    Upper,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    bound: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frobenius norm of the planted residual `H − H₀`.
    #[arg(long, requires = "h_out")]
    residual: Option<f64>,
    #[arg(long, value_enum, default_value = "any")]
    support: SupportArg,
    /// Output path for `H₀`.
    #[arg(long)]
    out: PathBuf,
    /// Output path for the planted `H`.
    #[arg(long)]
    h_out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_enum, default_value = "rchc")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "frobenius")]
    norm: NormArg,
    #[arg(long)]
    p: Option<f64>,
    /// Hidden Hamiltonian; read only by the oracle constructor.
    #[arg(long)]
    h: PathBuf,
    #[arg(long)]
    h0: PathBuf,
    #[arg(long)]
    m: usize,
    /// Coefficient bound; defaults to the bound recorded in the `H₀` file.
    #[arg(long)]
    bound: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Coefficient cap `S`.
    #[arg(long, default_value_t = 1.0)]
    bound: f64,
    #[arg(long, value_enum, default_value = "upper")]
    kind: BoundKind,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    h: PathBuf,
    #[arg(long)]
    h0: PathBuf,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    r: u64,
    #[arg(long, value_enum, default_value = "z")]
    group: GroupArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, value_enum)]
    target: TargetArg,
    /// Gap values for rchc, term counts for shc.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.1)]
    eps1: f64,
    #[arg(long, default_value_t = 0.3)]
    eps2: f64,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure before or during a run; always mapped to the usage exit code.
struct Usage(String);

impl From<hamcert::Error> for Usage {
    fn from(e: hamcert::Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<std::io::Error> for Usage {
    fn from(e: std::io::Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<csv::Error> for Usage {
    fn from(e: csv::Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Usage {
    fn from(e: serde_json::Error) -> Self {
        Usage(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Usage>;

fn emit(out: Option<&Path>, text: &str) -> Run<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_text<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Run<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Usage(e.to_string()))
}

fn require(v: Option<f64>, name: &str) -> Run<f64> {
    v.ok_or_else(|| Usage(format!("--{name} is required for this method")))
}

fn cmd_gen(a: &GenArgs) -> Run<u8> {
    match a.residual {
        None => random_hamiltonian::<f64>(a.n, a.m, a.bound, a.seed)?.write(&a.out)?,
        Some(norm) => {
            let support = match a.support {
                SupportArg::Any => ResidualSupport::Any,
                SupportArg::Z => ResidualSupport::InGroup(GroupKind::AllZ),
                SupportArg::X => ResidualSupport::InGroup(GroupKind::AllX),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let (h0, h) = planted_instance::<f64>(a.n, a.m, a.bound, norm, support, &mut rng)?;
            h0.write(&a.out)?;
            h.write(a.h_out.as_ref().expect("enforced by clap"))?;
        }
    }
    Ok(0)
}

/// Resolved certification request, validated against `H₀` before any oracle exists.
struct Plan {
    method: MethodArg,
    norm: NormArg,
    p: Option<f64>,
    m: usize,
    bound: f64,
    eps1: f64,
    eps2: f64,
    eps: f64,
    delta: f64,
}

fn plan_certify(a: &CertifyArgs, h0: &PauliHamiltonian) -> Run<Plan> {
    if a.trials == 0 {
        return Err(Usage("--trials must be at least 1".into()));
    }
    let bound = a.bound.unwrap_or(h0.bound());
    if !(a.delta > 0.0 && a.delta <= 1.0 / 3.0) {
        return Err(Usage(format!("--delta {} outside (0,1/3]", a.delta)));
    }
    let p = match (a.norm, a.p) {
        (NormArg::Frobenius, None) => None,
        (NormArg::Frobenius, Some(_)) => {
            return Err(Usage("--p applies only to pauli and schatten norms".into()))
        }
        (_, None) => return Err(Usage("--p is required for pauli and schatten norms".into())),
        (_, Some(p)) => Some(p),
    };
    let mut plan = Plan {
        method: a.method,
        norm: a.norm,
        p,
        m: a.m,
        bound,
        eps1: 0.0,
        eps2: 0.0,
        eps: 0.0,
        delta: a.delta,
    };
    match (a.method, a.norm) {
        (MethodArg::Rchc, NormArg::Frobenius) => {
            plan.eps1 = require(a.eps1, "eps1")?;
            plan.eps2 = require(a.eps2, "eps2")?;
            rchc_plan(h0, a.m, bound, plan.eps1, plan.eps2, ThresholdScale::Halved)?;
        }
        (MethodArg::Shc, NormArg::Frobenius) => {
            plan.eps = require(a.eps, "eps")?;
            shc_schedule(h0, a.m, bound, plan.eps, a.delta)?;
        }
        (MethodArg::Rchc | MethodArg::Shc, _) => {
            return Err(Usage(
                "pauli and schatten norms are certified with --method chc".into(),
            ));
        }
        (MethodArg::Chc, norm) => {
            plan.eps = require(a.eps, "eps")?;
            let inner = match (norm, p) {
                (NormArg::Pauli, Some(p)) => pauli_norm_threshold(p, a.m, plan.eps)?,
                (NormArg::Schatten, Some(p)) if p > 2.0 => {
                    return Err(Usage(format!(
                        "Schatten {p}-norm certification is unsupported"
                    )));
                }
                (NormArg::Schatten, Some(p)) if p.is_nan() || p < 1.0 => {
                    return Err(Usage(format!("Schatten norm index {p} below 1")));
                }
                _ => plan.eps,
            };
            if !(inner > 0.0 && inner < 1.0) {
                return Err(Usage(format!("--eps {} outside (0,1)", plan.eps)));
            }
            rchc_plan(h0, a.m, bound, inner / 2.0, inner, ThresholdScale::Halved)?;
        }
    }
    Ok(plan)
}

fn run_one(
    plan: &Plan,
    h0: &PauliHamiltonian,
    o: &mut EvolutionOracle,
    seed: u64,
) -> hamcert::Result<CertificationReport> {
    let Plan {
        m,
        bound,
        eps1,
        eps2,
        eps,
        delta,
        ..
    } = *plan;
    match (plan.method, plan.norm, plan.p) {
        (MethodArg::Rchc, _, _) => rchc(h0, o, m, bound, eps1, eps2, delta, seed),
        (MethodArg::Shc, _, _) => shc(h0, o, m, bound, eps, delta, seed),
        (MethodArg::Chc, NormArg::Pauli, Some(p)) => {
            certify_pauli_norm(p, h0, o, m, bound, eps, delta, seed)
        }
        (MethodArg::Chc, NormArg::Schatten, Some(p)) => {
            certify_schatten_norm(p, h0, o, m, bound, eps, delta, seed)
        }
        (MethodArg::Chc, _, _) => chc(h0, o, m, bound, eps, delta, seed),
    }
}

#[derive(Serialize)]
struct TrialSet {
    schema_version: &'static str,
    method: Method,
    verdict: Decision,
    trials: usize,
    accepted: usize,
    rejected: usize,
    reports: Vec<CertificationReport>,
}

fn cmd_certify(a: &CertifyArgs) -> Run<u8> {
    let h0 =
        PauliHamiltonian::read(&a.h0).map_err(|e| Usage(format!("{}: {e}", a.h0.display())))?;
    let plan = plan_certify(a, &h0)?;
    let mut oracles = (0..a.trials)
        .map(|_| {
            EvolutionOracle::from_file(&a.h).map_err(|e| Usage(format!("{}: {e}", a.h.display())))
        })
        .collect::<Run<Vec<_>>>()?;
    let reports = oracles
        .par_iter_mut()
        .enumerate()
        .map(|(i, o)| run_one(&plan, &h0, o, a.seed.wrapping_add(i as u64)))
        .collect::<hamcert::Result<Vec<_>>>()?;
    let rejected = reports
        .iter()
        .filter(|r| r.verdict == Decision::Reject)
        .count();
    let text = if reports.len() == 1 {
        reports[0].to_json()?
    } else {
        let set = TrialSet {
            schema_version: SCHEMA_VERSION,
            method: reports[0].method,
            verdict: if rejected > 0 {
                Decision::Reject
            } else {
                Decision::Accept
            },
            trials: reports.len(),
            accepted: reports.len() - rejected,
            rejected,
            reports,
        };
        serde_json::to_string_pretty(&set)?
    };
    emit(a.out.as_deref(), &(text + "\n"))?;
    Ok(if rejected > 0 { EXIT_REJECT } else { 0 })
}

#[derive(Serialize)]
struct BoundRow {
    seed: u64,
    n: usize,
    m: usize,
    #[serde(rename = "S")]
    s: f64,
    t: f64,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

fn cmd_analyze_bounds(a: &AnalyzeArgs) -> Run<u8> {
    if a.m == 0 || !(a.bound > 0.0) {
        return Err(Usage("need --m ≥ 1 and --bound > 0".into()));
    }
    let x = non_identity_set(a.n);
    let rows = (0..a.trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = a.seed.wrapping_add(i);
            let h = random_hamiltonian::<f64>(a.n, a.m, a.bound, seed)?;
            let t =
                ChaCha8Rng::seed_from_u64(seed).random_range(0.0..=1.0) / (a.m as f64 * a.bound);
            let c = match a.kind {
                BoundKind::Lower => l2_lower_bound(&h, t, &x)?,
                BoundKind::Upper => l2_upper_bound(&h, t, &x)?,
            };
            Ok(BoundRow {
                seed,
                n: a.n,
                m: a.m,
                s: a.bound,
                t,
                lhs: c.lhs,
                rhs: c.rhs,
                holds: c.holds,
            })
        })
        .collect::<hamcert::Result<Vec<_>>>()?;
    emit(a.out.as_deref(), &csv_text(rows)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct SampleRow {
    trial: usize,
    theta: String,
    syndrome: String,
    #[serde(rename = "Z")]
    z: u8,
}

fn cmd_sample(a: &SampleArgs) -> Run<u8> {
    let h0 =
        PauliHamiltonian::read(&a.h0).map_err(|e| Usage(format!("{}: {e}", a.h0.display())))?;
    if !(a.t.is_finite() && a.t >= 0.0) || a.r == 0 {
        return Err(Usage("need --t ≥ 0 and --r ≥ 1".into()));
    }
    let mut o =
        EvolutionOracle::from_file(&a.h).map_err(|e| Usage(format!("{}: {e}", a.h.display())))?;
    let g = match a.group {
        GroupArg::Z => GroupKind::AllZ,
        GroupArg::X => GroupKind::AllX,
    }
    .group(h0.n());
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::with_capacity(a.trials);
    for trial in 0..a.trials {
        let s = hss_sample(&g, &h0, &mut o, a.t, a.r, &mut rng)?;
        rows.push(SampleRow {
            trial,
            theta: s.theta.to_string(),
            syndrome: s.syndrome.to_string(),
            z: s.z as u8,
        });
    }
    emit(a.out.as_deref(), &csv_text(rows)?)?;
    Ok(0)
}

fn cmd_scaling(a: &ScalingArgs) -> Run<u8> {
    let (target, default) = match a.target {
        TargetArg::Rchc => (ScalingTarget::Rchc, vec![0.2, 0.1, 0.05, 0.025]),
        TargetArg::Shc => (ScalingTarget::Shc, vec![1.0, 2.0, 4.0, 8.0]),
    };
    let grid = a.grid.clone().unwrap_or(default);
    let result = scaling_experiment(target, &grid, a.trials, a.seed)?;
    emit(a.out.as_deref(), &result.to_csv()?)?;
    eprintln!(
        "slope {:.4} intercept {:.4}",
        result.slope, result.intercept
    );
    Ok(0)
}

#[derive(Serialize)]
struct TvRow {
    instance: usize,
    kind: &'static str,
    time: f64,
    tv: f64,
    bound: f64,
    holds: bool,
}

fn cmd_lowerbound(a: &LowerboundArgs) -> Run<u8> {
    let (h1, h2) = hypothesis_instances(a.p, a.m, a.eps1, a.eps2, a.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::with_capacity(2 * a.trials);
    for instance in 0..a.trials {
        let e = random_experiment(a.n, 1, a.depth, 2, &mut rng)?;
        let c = tv_bound_check(&e, &h1, &h2)?;
        rows.push(TvRow {
            instance,
            kind: "single",
            time: e.total_time(),
            tv: c.tv,
            bound: c.bound,
            holds: c.holds,
        });
        let tree = random_tree(a.n, 0, a.depth, 2, 2, &mut rng)?;
        let c = tree_tv_bound_check(&tree, &h1, &h2)?;
        rows.push(TvRow {
            instance,
            kind: "tree",
            time: tree.max_path_time(),
            tv: c.tv,
            bound: c.bound,
            holds: c.holds,
        });
    }
    emit(a.out.as_deref(), &csv_text(rows)?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Certify(a) => cmd_certify(a),
        Command::AnalyzeBounds(a) => cmd_analyze_bounds(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Scaling(a) => cmd_scaling(a),
        Command::Lowerbound(a) => cmd_lowerbound(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
