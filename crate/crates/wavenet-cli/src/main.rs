//! `wavenet` — solve NPP / knapsack / TSP instances on the wave-network
//! simulator, cross-check against classical oracles, and export
//! time-frequency plot data.
//!
//! Exit codes: 0 success (oracle match or no oracle), 1 usage or parse
//! error, 2 oracle mismatch, 3 internal inconsistency.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wavenet_core::error::WaveError;
use wavenet_core::instance::{parse_instance, ProblemInstance};
use wavenet_core::kp::KpMode;
use wavenet_core::oracle;
use wavenet_core::run::{export_timefreq, solve, RunConfig, SolveReport};

#[derive(Parser)]
#[command(name = "wavenet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Shift,
    Mix,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file: wave run + decode epochs + oracle check.
    Solve {
        /// Instance file (TOML with a `problem` discriminator).
        file: PathBuf,
        /// Knapsack edge encoding.
        #[arg(long, value_enum, default_value = "shift")]
        mode: ModeArg,
        /// Skip the classical oracle cross-check.
        #[arg(long)]
        no_oracle: bool,
        /// Re-verify NPP sign flips with extra runs.
        #[arg(long)]
        paranoid: bool,
        /// Verify the TSP optimum with two independent randomized
        /// frequency plans.
        #[arg(long)]
        cross_check: bool,
        /// Peak detection threshold override.
        #[arg(long)]
        threshold: Option<f64>,
        /// Sample rate override (samples per time-unit).
        #[arg(long)]
        sample_rate: Option<u32>,
        /// Seed for randomized frequency plans.
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Output directory (default: $WAVENET_OUT or the current dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Test hook: bias the reported optimum to force exit code 2.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Run only the classical oracle on an instance file.
    Oracle {
        file: PathBuf,
    },
    /// Re-export artifacts from a previously written report.json.
    Export {
        report: PathBuf,
        /// What to export (only `timefreq` exists).
        #[arg(long)]
        what: String,
        /// Destination file (default: timefreq.csv next to the report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &WaveError) -> u8 {
    match err {
        WaveError::DecodeInconsistent(_) | WaveError::NoHamiltonianFound { .. } => 3,
        _ => 1,
    }
}

fn run_solve(cfg: RunConfig) -> Result<ExitCode, WaveError> {
    let report = solve(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.oracle.matches == Some(false) {
        eprintln!(
            "oracle mismatch: simulator {} vs oracle {:?}",
            report.optimum, report.oracle.optimum
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oracle(file: PathBuf) -> Result<ExitCode, WaveError> {
    let instance = parse_instance(&file)?;
    let result = match &instance {
        ProblemInstance::Npp(i) => oracle::npp_bruteforce(i.weights())?,
        ProblemInstance::Kp(i) => oracle::kp_dp(i.weights(), i.values(), i.capacity())?,
        ProblemInstance::Tsp(i) => oracle::tsp_held_karp(i.dist())?,
    };
    let out = serde_json::json!({
        "problem": instance.kind(),
        "optimum": result.optimum,
        "witness": result.witness,
        "method": result.method,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(ExitCode::SUCCESS)
}

fn run_export(report_path: PathBuf, what: String, out: Option<PathBuf>) -> Result<ExitCode, WaveError> {
    if what != "timefreq" {
        return Err(WaveError::InvalidConfig(format!(
            "unknown export kind `{what}` (expected `timefreq`)"
        )));
    }
    let text = std::fs::read_to_string(&report_path)
        .map_err(|e| WaveError::Parse(format!("{}: {e}", report_path.display())))?;
    let report: SolveReport = serde_json::from_str(&text)
        .map_err(|e| WaveError::Parse(format!("{}: {e}", report_path.display())))?;
    let dest = out.unwrap_or_else(|| {
        report_path
            .parent()
            .unwrap_or_else(|| std::path::Path::new("."))
            .join("timefreq.csv")
    });
    export_timefreq(&report, &dest)?;
    println!("wrote {}", dest.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            file,
            mode,
            no_oracle,
            paranoid,
            cross_check,
            threshold,
            sample_rate,
            seed,
            out,
            inject_fault,
        } => {
            let mut cfg = RunConfig::new(file);
            cfg.kp_mode = match mode {
                ModeArg::Shift => KpMode::Shift,
                ModeArg::Mix => KpMode::Mix,
            };
            cfg.no_oracle = no_oracle;
            cfg.paranoid = paranoid;
            cfg.cross_check = cross_check;
            cfg.threshold = threshold;
            cfg.sample_rate = sample_rate;
            cfg.seed = seed;
            cfg.out_dir = out;
            cfg.inject_fault = inject_fault;
            run_solve(cfg)
        }
        Command::Oracle { file } => run_oracle(file),
        Command::Export { report, what, out } => run_export(report, what, out),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
