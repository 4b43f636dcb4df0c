use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qbcharge_core::optimize::{self, RatioObjective};
use qbcharge_core::scenario::{self, FigureId, Mutation, ScenarioConfig, VerifyLevel};
use qbcharge_core::Error;
use serde_json::json;

const OUT_ENV: &str = "QBCHARGE_OUT";
const DEFAULT_OUT: &str = "qbcharge-out";

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "qbcharge", version, about = "Charger-battery charging scenarios, figures and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config; writes trajectory.csv, steady.csv and meta.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory. Falls back to the config's output_dir, then $QBCHARGE_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data, gnuplot script and metadata of one figure.
    Figure {
        #[arg(long, value_parser = parse_figure)]
        id: FigureId,
        /// Output directory, defaults to $QBCHARGE_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal detuning or bath-weight ratio for a config as JSON.
    Optimize {
        #[arg(long, value_enum)]
        mode: OptimizeMode,
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the oracle and closed-form cross-checks.
    Verify {
        #[arg(long, value_parser = parse_level, default_value = "fast")]
        level: VerifyLevel,
        /// Swap in a tampered formula; the run must then fail.
        #[arg(long, value_parser = parse_mutation)]
        mutate: Option<Mutation>,
        /// Print the report as JSON instead of one line per check.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizeMode {
    Detuning,
    Ratio,
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    FigureId::parse(s).ok_or_else(|| {
        let ids: Vec<_> = FigureId::ALL.iter().map(|f| f.name()).collect();
        format!("unknown figure `{s}` (expected one of {})", ids.join(", "))
    })
}

fn parse_level(s: &str) -> Result<VerifyLevel, String> {
    VerifyLevel::parse(s).ok_or_else(|| format!("unknown level `{s}` (expected fast or full)"))
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::parse(s).ok_or_else(|| {
        let names: Vec<_> = Mutation::ALL.iter().map(|m| m.name()).collect();
        format!("unknown mutation `{s}` (expected one of {})", names.join(", "))
    })
}

fn out_dir(flag: Option<PathBuf>, config: Option<&Path>) -> PathBuf {
    flag.or_else(|| config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() || matches!(e, Error::Io { .. }) {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialize"));
}

fn simulate(config: &Path, out: Option<PathBuf>) -> Result<(), Error> {
    let cfg = ScenarioConfig::from_file(config)?;
    let dir = out_dir(out, cfg.output_dir.as_deref());
    let outcome = scenario::run_scenario(&cfg, &dir)?;
    for row in &outcome.steady {
        println!(
            "{:<17} E_A = {:.6}  E_B = {:.6}  xi = {:.6}",
            row.method, row.energies.e_a, row.energies.e_b, row.energies.xi
        );
    }
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn figure(id: FigureId, out: Option<PathBuf>) -> Result<(), Error> {
    let fig = scenario::reproduce_figure(id, &out_dir(out, None))?;
    for f in &fig.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn optimize(mode: OptimizeMode, config: &Path) -> Result<(), Error> {
    let cfg = ScenarioConfig::from_file(config)?;
    match mode {
        OptimizeMode::Detuning => {
            let (closed, numeric) = scenario::optimize_detuning(&cfg)?;
            print_json(&json!({ "closed_form": closed, "numeric": numeric }));
        }
        OptimizeMode::Ratio => {
            let base = cfg.params.validate()?;
            let best = optimize::super_optimal_ratio(&base)?;
            let range = (best.y_opt / 100.0, best.y_opt * 100.0);
            let argmax_b = optimize::optimal_ratio_numeric(&base, RatioObjective::Battery, range)?;
            let argmax_xi = optimize::optimal_ratio_numeric(&base, RatioObjective::Total, range)?;
            let weights = optimize::ratio_params(&base, best.y_opt);
            print_json(&json!({
                "y_opt": best.y_opt,
                "p_a": weights.shared.p_a.re,
                "p_b": weights.shared.p_b.re,
                "energies": best.achieved,
                "numeric_argmax_E_B": argmax_b,
                "numeric_argmax_xi": argmax_xi,
            }));
        }
    }
    Ok(())
}

fn verify(level: VerifyLevel, mutation: Option<Mutation>, as_json: bool) -> ExitCode {
    let report = scenario::verify(level, mutation);
    if as_json {
        print_json(&json!(report));
    } else {
        for c in &report.checks {
            println!("{} {:<28} {:>7.2}s  {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.seconds, c.detail);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        let failed: Vec<_> = report.failed().map(|c| c.name).collect();
        eprintln!("verification failed: {}", failed.join(", "));
        ExitCode::from(EXIT_VERIFY)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, out),
        Command::Figure { id, out } => figure(id, out),
        Command::Optimize { mode, config } => optimize(mode, &config),
        Command::Verify { level, mutate, json } => return verify(level, mutate, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
