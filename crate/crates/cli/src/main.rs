//! `subcover` command line.
//!
//! Exit codes: 0 success, 1 error, 2 infeasible instance. Errors are written
//! to stderr as `{"error": kind, "message": text}`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subcover::bench::{bench, Suite, CCF_CONSTANT, MULTI_CONSTANT};
use subcover::ccf::{solve_ccf_detailed, CcfConfig, CcfError};
use subcover::gen::{generate, Family, GenParams, WeightRegime};
use subcover::io::{InstanceFile, IoError};
use subcover::multicover::{render_svg, solve_multi, Backend, MulticoverError};
use subcover::oracle::{brute_ccf, brute_multi, brute_psc, OracleError, RatioReport};
use subcover::psc::{beta_oracle_by_name, one_minus_inv_e, psc_ratio_bound, solve_psc_detailed, PscConfig, PscError};
use subcover::submod::Line;
use subcover::Solution;

#[derive(Parser)]
#[command(
    name = "subcover",
    version,
    about = "Partial, multi-constraint and coverage-function set cover solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and print it as JSON.
    Gen(GenArgs),
    /// Solve an instance file and print the solution as JSON.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Run a suite against the exact oracles; prints one JSON record per line.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// random-uniform, frequency-bounded, partition, cip or sparse-ccf
    family: String,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    f: usize,
    #[arg(long, default_value_t = 2)]
    rows: usize,
    #[arg(long, default_value_t = 1)]
    sparsity: usize,
    #[arg(long, default_value_t = 0.6)]
    demand_fraction: f64,
    /// unit, uniform or skewed
    #[arg(long, default_value = "uniform")]
    weights: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BetaOracleArg {
    Greedy,
    Frequency,
}

impl BetaOracleArg {
    fn name(self) -> &'static str {
        match self {
            BetaOracleArg::Greedy => "greedy",
            BetaOracleArg::Frequency => "frequency",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Lp,
    #[value(name = "continuous_greedy", alias = "cg")]
    ContinuousGreedy,
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Partial set cover.
    Psc {
        instance: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, value_enum, default_value = "greedy")]
        beta_oracle: BetaOracleArg,
        /// Accepted for uniformity; the PSC solver is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against the exact optimum.
        #[arg(long)]
        verify: bool,
    },
    /// Covering coverage functions (PSC files are read as one row).
    Ccf {
        instance: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        /// Sampling rounds (default from the instance sparsity).
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, value_enum, default_value = "greedy")]
        beta_oracle: BetaOracleArg,
        #[arg(long, default_value_t = 50)]
        max_cut_rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        verify: bool,
    },
    /// Multiple submodular cover constraints (multi, points, psc or ccf files).
    Multi {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "lp")]
        backend: BackendArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        verify: bool,
        /// Write the chosen line arrangement to this SVG file (points files only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    suite: PathBuf,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct SolveOutput {
    solution: Solution,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<RatioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lines: Option<Vec<Line>>,
}

struct Failure {
    kind: &'static str,
    message: String,
    infeasible: bool,
}

impl Failure {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        Self {
            kind,
            message: message.to_string(),
            infeasible: false,
        }
    }

    fn infeasible(message: impl ToString) -> Self {
        Self {
            kind: "infeasible",
            message: message.to_string(),
            infeasible: true,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_infeasibility() {
            return Failure::infeasible(e);
        }
        let kind = match e {
            IoError::Parse { .. } => "parse",
            IoError::Io { .. } => "io",
            _ => "invalid",
        };
        Failure::new(kind, e)
    }
}

impl From<PscError> for Failure {
    fn from(e: PscError) -> Self {
        match &e {
            PscError::Invalid(errs) if errs.iter().all(|v| v.is_infeasibility()) => Failure::infeasible(e),
            PscError::NoBranch => Failure::infeasible(e),
            _ => Failure::new("solver", e),
        }
    }
}

impl From<CcfError> for Failure {
    fn from(e: CcfError) -> Self {
        match &e {
            CcfError::Invalid(errs) if errs.iter().all(|v| v.is_infeasibility()) => Failure::infeasible(e),
            _ => Failure::new("solver", e),
        }
    }
}

impl From<MulticoverError> for Failure {
    fn from(e: MulticoverError) -> Self {
        match e {
            MulticoverError::Unreachable { .. } | MulticoverError::Infeasible(_) => Failure::infeasible(e),
            _ => Failure::new("solver", e),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Infeasible => Failure::infeasible(e),
            OracleError::TooLarge { .. } => Failure::new("oracle", e),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("output serializes")
}

fn run_gen(args: GenArgs) -> Result<String, Failure> {
    let family: Family = args.family.parse().map_err(|e| Failure::new("usage", e))?;
    let weights: WeightRegime = args.weights.parse().map_err(|e| Failure::new("usage", e))?;
    let params = GenParams {
        n: args.n,
        m: args.m,
        p: args.p,
        f: args.f,
        rows: args.rows,
        sparsity: args.sparsity,
        demand_fraction: args.demand_fraction,
        weights,
    };
    let file = generate(family, &params, args.seed).map_err(|e| Failure::new("usage", e))?;
    Ok(if args.pretty {
        file.to_json_pretty()
    } else {
        file.to_json()
    })
}

fn beta_oracle(arg: BetaOracleArg) -> std::sync::Arc<dyn subcover::psc::BetaOracle> {
    beta_oracle_by_name(arg.name()).expect("known oracle")
}

fn run_solve(cmd: SolveCommand) -> Result<String, Failure> {
    let output = match cmd {
        SolveCommand::Psc {
            instance,
            tau,
            beta_oracle: oracle,
            seed: _,
            verify,
        } => {
            let inst = InstanceFile::read(&instance)?.to_psc()?;
            let config = PscConfig::new(tau.unwrap_or_else(one_minus_inv_e), beta_oracle(oracle))?;
            let rep = solve_psc_detailed(&inst, &config)?;
            let report = if verify {
                let opt = brute_psc(&inst)?;
                let bound = psc_ratio_bound(rep.beta_effective());
                Some(RatioReport::new(
                    name_of(&instance),
                    "psc",
                    rep.solution.cost,
                    opt.cost,
                    bound,
                    None,
                ))
            } else {
                None
            };
            SolveOutput {
                solution: rep.solution,
                report,
                lines: None,
            }
        }
        SolveCommand::Ccf {
            instance,
            tau,
            rounds,
            beta_oracle: oracle,
            max_cut_rounds,
            seed,
            verify,
        } => {
            let inst = InstanceFile::read(&instance)?.to_ccf()?;
            let mut config = CcfConfig {
                rounds,
                beta_oracle: beta_oracle(oracle),
                seed,
                max_cut_rounds,
                ..CcfConfig::default()
            };
            if let Some(t) = tau {
                config.tau = t;
            }
            let rep = solve_ccf_detailed(&inst, &config)?;
            let report = if verify {
                let opt = brute_ccf(&inst)?;
                let r = inst.sparsity().max(1) as f64;
                let bound = CCF_CONSTANT * (rep.beta_effective + r.ln());
                Some(RatioReport::new(
                    name_of(&instance),
                    "ccf",
                    rep.solution.cost,
                    opt.cost,
                    bound,
                    Some(seed),
                ))
            } else {
                None
            };
            SolveOutput {
                solution: rep.solution,
                report,
                lines: None,
            }
        }
        SolveCommand::Multi {
            instance,
            epsilon,
            backend,
            seed,
            verify,
            svg,
        } => {
            let file = InstanceFile::read(&instance)?;
            let backend = match backend {
                BackendArg::Lp => Backend::Lp,
                BackendArg::ContinuousGreedy => Backend::ContinuousGreedy,
            };
            let split = match &file {
                InstanceFile::Points(_) => Some(file.to_point_split()?),
                _ => None,
            };
            let inst = match &split {
                Some(s) => s.instance.clone(),
                None => file.to_multi()?,
            };
            if svg.is_some() && split.is_none() {
                return Err(Failure::new("usage", "--svg needs a points instance"));
            }
            let (_, solution) = solve_multi(&inst, epsilon, backend, seed)?;
            let lines = split.as_ref().map(|s| s.chosen_lines(&solution.chosen));
            if let (Some(path), Some(s)) = (&svg, &split) {
                let drawing = render_svg(&s.point_sets, lines.as_deref().unwrap_or(&[]));
                std::fs::write(path, drawing).map_err(|e| Failure::new("io", e))?;
            }
            let report = if verify {
                let opt = brute_multi(&inst)?;
                let r = inst.sparsity().max(1) as f64;
                let bound = MULTI_CONSTANT * (r.ln() / epsilon + 2.0);
                Some(RatioReport::new(
                    name_of(&instance),
                    "multi",
                    solution.cost,
                    opt.opt(),
                    bound,
                    Some(seed),
                ))
            } else {
                None
            };
            SolveOutput {
                solution,
                report,
                lines,
            }
        }
    };
    Ok(to_json(&output))
}

fn name_of(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn run_bench(args: BenchArgs) -> Result<String, Failure> {
    let text = std::fs::read_to_string(&args.suite).map_err(|e| Failure::new("io", e))?;
    let suite: Suite = serde_json::from_str(&text).map_err(|e| Failure::from(IoError::from(e)))?;
    let lines: Vec<String> = bench(&suite, args.trials, args.seed)
        .iter()
        .map(|r| r.to_json_line())
        .collect();
    Ok(lines.join("\n"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let failure = Failure::new("usage", e.render().to_string().trim_end());
            return report_failure(failure);
        }
    };
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(cmd) => run_solve(cmd),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(failure) => report_failure(failure),
    }
}

fn report_failure(failure: Failure) -> ExitCode {
    let body = serde_json::json!({ "error": failure.kind, "message": failure.message });
    eprintln!("{body}");
    if failure.infeasible {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}
