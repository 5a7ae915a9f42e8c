use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};

use centrality_forge::centrality::{parse_eta, GameSpec};
use centrality_forge::dynamics::{run_br, RunOptions};
use centrality_forge::equilibrium::{
    audit_conditions, classify_family, enumerate_equilibria, is_nash, is_recursive, RecursiveVerdict,
    DEFAULT_EXPLORATION_BUDGET, ENUMERATION_LIMIT,
};
use centrality_forge::experiment::{
    random_configuration, sample_powerlaw_profile, sweep_streaming, write_cells_csv, write_rows_csv, DegreeSpec,
    SweepSpec,
};
use centrality_forge::game::potential;
use centrality_forge::graph::{read_configuration, structural_metrics, Configuration, OutDegreeProfile};
use centrality_forge::{Error, Rational, Scalar};

#[derive(Parser, Debug)]
#[command(
    name = "centrality-forge",
    version,
    about = "PageRank-centrality network formation games"
)]
struct Cli {
    /// Discount factor, e.g. 0.85 or 17/20.
    #[arg(long, global = true, default_value = "0.85")]
    beta: String,
    /// `uniform` or a JSON file holding the intrinsic centrality vector.
    #[arg(long, global = true, default_value = "uniform")]
    eta: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exact rational arithmetic instead of f64.
    #[arg(long, global = true)]
    exact: bool,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run best-response dynamics and print the trace as JSON.
    Simulate {
        /// Initial configuration (JSON or edge list); random when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        /// `homogeneous:D`, `powerlaw:ALPHA` or `file:PATH`.
        #[arg(long, default_value = "homogeneous:1")]
        degrees: DegreeSpec,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long)]
        no_early_stop: bool,
        /// Sample the potential every K steps.
        #[arg(long, value_name = "K")]
        potential_series: Option<u64>,
    },
    /// Run a grid of seeded simulations and write one CSV row per run.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value = "homogeneous:4")]
        degrees: DegreeSpec,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 7)]
        replicas: usize,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long)]
        no_early_stop: bool,
        #[arg(long, env = "CENTRALITY_FORGE_WORKERS")]
        workers: Option<usize>,
        /// Write per-cell mean/variance tables here.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Certify a configuration.
    Verify {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "nash")]
        check: Check,
        #[arg(long, default_value_t = DEFAULT_EXPLORATION_BUDGET)]
        budget: usize,
        /// Exit with status 2 when the check fails.
        #[arg(long)]
        assert: bool,
    },
    /// Print the structural family of a configuration.
    Classify { graph: PathBuf },
    /// Print tree sums, Z, -ln Z and m(x).
    Potential { graph: PathBuf },
    /// Certify every configuration of a small game (exact arithmetic).
    Enumerate {
        #[arg(long)]
        n: usize,
        /// A single degree for every node, or a comma-separated profile.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        degrees: Vec<usize>,
        #[arg(long, default_value_t = ENUMERATION_LIMIT)]
        limit: u128,
    },
    /// Draw an out-degree profile from the truncated power law.
    PowerlawSample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Nash,
    Strict,
    Recursive,
}

enum Failure {
    Invalid(String),
    Verification(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::SpaceTooLarge { .. } | Error::TooLargeForEnumeration { .. } => {
                Failure::Budget(e.to_string())
            }
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Invalid(e.to_string()))
}

fn game_for<S: Scalar>(cli: &Cli, degrees: OutDegreeProfile) -> std::result::Result<GameSpec<S>, Failure> {
    let beta = S::parse_literal(&cli.beta)?;
    let eta_json = if cli.eta == "uniform" {
        serde_json::Value::String("uniform".into())
    } else {
        let text = std::fs::read_to_string(&cli.eta).map_err(|e| Failure::Invalid(format!("{}: {e}", cli.eta)))?;
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", cli.eta)))?
    };
    let eta = parse_eta(&eta_json, degrees.len())?;
    Ok(GameSpec::new(beta, eta, degrees)?)
}

fn load(path: &Path) -> std::result::Result<Configuration, Failure> {
    Ok(read_configuration(path)?)
}

fn simulate<S: Scalar>(
    cli: &Cli,
    graph: &Option<PathBuf>,
    n: Option<usize>,
    degrees: &DegreeSpec,
    options: RunOptions,
) -> Outcome {
    let init = match graph {
        Some(path) => load(path)?,
        None => {
            let n = n.ok_or_else(|| Failure::Invalid("simulate needs --graph or --n".into()))?;
            let profile = match degrees {
                DegreeSpec::Homogeneous(d) => OutDegreeProfile::new(vec![*d; n])?,
                DegreeSpec::PowerLaw(a) => sample_powerlaw_profile(n, *a, cli.seed)?,
                DegreeSpec::File(p) => centrality_forge::experiment::read_degree_file(p)?,
            };
            if profile.len() != n {
                return Err(Failure::Invalid(format!("{} degrees given for n = {n}", profile.len())));
            }
            random_configuration(profile.len(), &profile, cli.seed)?
        }
    };
    let spec = game_for::<S>(cli, init.degrees())?;
    let trace = run_br(&spec, &init, options)?;
    emit(&cli.out, &to_json(&trace)?)
}

fn verify<S: Scalar>(cli: &Cli, graph: &Path, check: Check, budget: usize, assert: bool) -> Outcome {
    let cfg = load(graph)?;
    let spec = game_for::<S>(cli, cfg.degrees())?;
    let report = match check {
        Check::Recursive => is_recursive(&spec, &cfg, budget)?,
        _ => is_nash(&spec, &cfg)?,
    };
    let audits = audit_conditions(&spec, &cfg, &report);
    let body = serde_json::json!({
        "report": report,
        "family": classify_family(&cfg).to_string(),
        "conditions": audits,
    });
    emit(&cli.out, &to_json(&body)?)?;
    if !assert {
        return Ok(());
    }
    match (check, report.recursive) {
        (Check::Recursive, Some(RecursiveVerdict::Inconclusive { explored })) => {
            Err(Failure::Budget(format!("inconclusive after {explored} configurations")))
        }
        (Check::Recursive, Some(RecursiveVerdict::No)) => Err(Failure::Verification("not recursive".into())),
        (Check::Strict, _) if !report.strict => Err(Failure::Verification("not a strict Nash equilibrium".into())),
        (Check::Nash, _) if !report.nash => Err(Failure::Verification("not a Nash equilibrium".into())),
        _ => Ok(()),
    }
}

fn potential_cmd<S: Scalar>(cli: &Cli, graph: &Path) -> Outcome {
    let cfg = load(graph)?;
    let spec = game_for::<S>(cli, cfg.degrees())?;
    let rep = potential(&spec, &cfg)?;
    let body = serde_json::json!({
        "tree_sums": rep.tree_sums.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "z": rep.z.to_string(),
        "log_z": rep.log_z,
        "psi": rep.psi,
        "m": rep.m,
        "metrics": structural_metrics(&cfg),
    });
    emit(&cli.out, &to_json(&body)?)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Simulate {
            graph,
            n,
            degrees,
            steps,
            no_early_stop,
            potential_series,
        } => {
            let options = RunOptions {
                steps: *steps,
                seed: cli.seed,
                early_stop: !no_early_stop,
                potential_every: *potential_series,
            };
            if cli.exact {
                simulate::<Rational>(cli, graph, *n, degrees, options)
            } else {
                simulate::<f64>(cli, graph, *n, degrees, options)
            }
        }
        Command::Sweep {
            n,
            degrees,
            betas,
            replicas,
            steps,
            no_early_stop,
            workers,
            plot_data,
        } => {
            let spec = SweepSpec {
                n_values: n.clone(),
                degree_spec: degrees.clone(),
                beta_grid: betas.clone(),
                replicas: *replicas,
                steps: *steps,
                master_seed: cli.seed,
                early_stop: !no_early_stop,
                workers: *workers,
            };
            let progress = Mutex::new(std::io::stderr());
            let outcome = sweep_streaming(&spec, |row| {
                let mut err = progress.lock().expect("stderr lock");
                let _ = writeln!(
                    err,
                    "n={} beta={} replica={} C={:.4}",
                    row.n, row.beta, row.replica, row.c_index
                );
            })?;
            for f in &outcome.failures {
                eprintln!("failed: n={} beta={} replica={}: {}", f.n, f.beta, f.replica, f.message);
            }
            let mut buf = Vec::new();
            write_rows_csv(&outcome.rows, &mut buf)?;
            emit(&cli.out, String::from_utf8_lossy(&buf).trim_end())?;
            if let Some(path) = plot_data {
                let file =
                    std::fs::File::create(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
                write_cells_csv(&outcome.cells, file)?;
            }
            Ok(())
        }
        Command::Verify {
            graph,
            check,
            budget,
            assert,
        } => {
            if cli.exact {
                verify::<Rational>(cli, graph, *check, *budget, *assert)
            } else {
                verify::<f64>(cli, graph, *check, *budget, *assert)
            }
        }
        Command::Classify { graph } => emit(&cli.out, &classify_family(&load(graph)?).to_string()),
        Command::Potential { graph } => {
            if cli.exact {
                potential_cmd::<Rational>(cli, graph)
            } else {
                potential_cmd::<f64>(cli, graph)
            }
        }
        Command::Enumerate { n, degrees, limit } => {
            let profile = match degrees[..] {
                [d] => OutDegreeProfile::new(vec![d; *n])?,
                _ => OutDegreeProfile::new(degrees.clone())?,
            };
            if profile.len() != *n {
                return Err(Failure::Invalid(format!("{} degrees given for n = {n}", profile.len())));
            }
            let spec = game_for::<Rational>(cli, profile)?;
            let catalog = enumerate_equilibria(&spec, *limit)?;
            let mut buf = Vec::new();
            catalog.write_json_lines(&mut buf)?;
            emit(&cli.out, String::from_utf8_lossy(&buf).trim_end())?;
            eprintln!("{}", to_json(&catalog.summary)?);
            Ok(())
        }
        Command::PowerlawSample { n, alpha } => {
            let profile = sample_powerlaw_profile(*n, *alpha, cli.seed)?;
            emit(&cli.out, &to_json(&profile.0)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}
