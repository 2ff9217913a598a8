//! Run orchestration: initial solve plus decode epochs, oracle
//! cross-check, and report/plot-data emission.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::instance::{parse_instance, ProblemInstance};
use crate::kp::{self, KpConfig, KpMode};
use crate::npp::{self, NppConfig};
use crate::oracle;
use crate::signal::{peaks_to_csv, Peak};
use crate::tsp::{self, TspConfig};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instance_path: PathBuf,
    pub kp_mode: KpMode,
    pub cross_check: bool,
    pub paranoid: bool,
    pub threshold: Option<f64>,
    pub sample_rate: Option<u32>,
    pub seed: u64,
    pub no_oracle: bool,
    pub out_dir: Option<PathBuf>,
    /// Test hook: bias the reported optimum to force an oracle mismatch.
    pub inject_fault: bool,
}

impl RunConfig {
    pub fn new(instance_path: impl Into<PathBuf>) -> Self {
        Self {
            instance_path: instance_path.into(),
            kp_mode: KpMode::Shift,
            cross_check: false,
            paranoid: false,
            threshold: None,
            sample_rate: None,
            seed: 0,
            no_oracle: false,
            out_dir: None,
            inject_fault: false,
        }
    }

    /// Output directory: explicit flag, then WAVENET_OUT, then cwd.
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| {
            std::env::var_os("WAVENET_OUT")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."))
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportWitness {
    Npp {
        signs: Vec<i8>,
        subset_a: Vec<i64>,
        subset_b: Vec<i64>,
    },
    Kp {
        items: Vec<u8>,
        arrival: i64,
    },
    Tsp {
        cycle: Vec<usize>,
        t_0: i64,
        plan: tsp::FrequencyPlan,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleComparison {
    pub ran: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<i64>,
    #[serde(rename = "match", skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: KpMode,
    pub paranoid: bool,
    pub cross_check: bool,
    pub threshold: Option<f64>,
    pub sample_rate: Option<u32>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Timing {
    pub solve_ms: u64,
    pub oracle_ms: u64,
    pub total_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Artifacts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_json: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timefreq_csv: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: String,
    pub optimum: i64,
    pub witness: ReportWitness,
    pub epochs: serde_json::Value,
    pub runs_used: usize,
    pub oracle: OracleComparison,
    pub config: ConfigEcho,
    pub artifacts: Artifacts,
    pub timing: Timing,
    /// Raw time-frequency peak table backing the CSV export.
    pub timefreq: Vec<Peak>,
}

struct Solved {
    optimum: i64,
    witness: ReportWitness,
    epochs: serde_json::Value,
    runs_used: usize,
    timefreq: Vec<Peak>,
}

fn solve_npp(instance: &npp::NppInstance, cfg: &RunConfig) -> Result<Solved> {
    let ncfg = NppConfig {
        threshold_override: cfg.threshold,
        sample_rate_override: cfg.sample_rate,
        paranoid: cfg.paranoid,
    };
    let (d_min, peaks) = npp::min_discrepancy(instance, &ncfg)?;
    let sol = npp::decode_partition(instance, d_min, &ncfg)?;
    Ok(Solved {
        optimum: d_min,
        witness: ReportWitness::Npp {
            signs: sol.signs.clone(),
            subset_a: sol.subset_weights(instance, 1),
            subset_b: sol.subset_weights(instance, -1),
        },
        epochs: serde_json::to_value(&sol.epochs).expect("epochs serialize"),
        runs_used: sol.runs_used,
        timefreq: peaks,
    })
}

fn solve_kp(instance: &kp::KpInstance, cfg: &RunConfig) -> Result<Solved> {
    let kcfg = KpConfig {
        mode: cfg.kp_mode,
        threshold_override: cfg.threshold,
        sample_rate_override: cfg.sample_rate,
    };
    let (v_max, _, peaks) = kp::max_value(instance, &kcfg)?;
    let sol = kp::decode_items(instance, v_max, &kcfg)?;
    Ok(Solved {
        optimum: v_max,
        witness: ReportWitness::Kp { items: sol.items.clone(), arrival: sol.arrival },
        epochs: serde_json::to_value(&sol.epochs).expect("epochs serialize"),
        runs_used: sol.runs_used,
        timefreq: peaks,
    })
}

fn solve_tsp(instance: &tsp::TspInstance, cfg: &RunConfig) -> Result<Solved> {
    let tcfg = TspConfig {
        threshold_override: cfg.threshold,
        sample_rate_override: cfg.sample_rate,
    };
    let n = instance.len();
    let m = tsp::revisit_bound(instance);
    let (plan, check_plan) = if cfg.cross_check {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        (
            tsp::random_frequency_plan(n, m, &mut rng)?,
            Some(tsp::random_frequency_plan(n, m, &mut rng)?),
        )
    } else {
        (tsp::allocate_frequencies(n, m)?, None)
    };
    let (d_opt, _, peaks) = tsp::shortest_cycle_length(instance, &plan, &tcfg)?;
    if let Some(other) = check_plan {
        let (d2, _, _) = tsp::shortest_cycle_length(instance, &other, &tcfg)?;
        if d2 != d_opt {
            return Err(WaveError::DecodeInconsistent(format!(
                "cross-check plans disagree: {d_opt} vs {d2}"
            )));
        }
    }
    let sol = tsp::decode_cycle(instance, d_opt, &plan, &tcfg)?;
    Ok(Solved {
        optimum: d_opt,
        witness: ReportWitness::Tsp {
            cycle: sol.cycle.clone(),
            t_0: sol.t_0,
            plan: sol.plan.clone(),
        },
        epochs: serde_json::to_value(&sol.epochs).expect("epochs serialize"),
        runs_used: sol.runs_used,
        timefreq: peaks,
    })
}

fn run_oracle(instance: &ProblemInstance) -> Result<i64> {
    Ok(match instance {
        ProblemInstance::Npp(i) => oracle::npp_bruteforce(i.weights())?.optimum,
        ProblemInstance::Kp(i) => {
            oracle::kp_dp(i.weights(), i.values(), i.capacity())?.optimum
        }
        ProblemInstance::Tsp(i) => oracle::tsp_held_karp(i.dist())?.optimum,
    })
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs the full pipeline for the configured instance: wave solve plus
/// decode epochs, classical oracle (size permitting), and atomic report
/// JSON + time-frequency CSV emission.
pub fn solve(cfg: &RunConfig) -> Result<SolveReport> {
    let total_start = Instant::now();
    let instance = parse_instance(&cfg.instance_path)?;

    let solve_start = Instant::now();
    let mut solved = match &instance {
        ProblemInstance::Npp(i) => solve_npp(i, cfg)?,
        ProblemInstance::Kp(i) => solve_kp(i, cfg)?,
        ProblemInstance::Tsp(i) => solve_tsp(i, cfg)?,
    };
    let solve_ms = solve_start.elapsed().as_millis() as u64;

    if cfg.inject_fault {
        solved.optimum += 1;
    }

    let oracle_start = Instant::now();
    let oracle = if cfg.no_oracle {
        OracleComparison { ran: false, optimum: None, matches: None }
    } else {
        match run_oracle(&instance) {
            Ok(opt) => OracleComparison {
                ran: true,
                optimum: Some(opt),
                matches: Some(opt == solved.optimum),
            },
            Err(WaveError::OracleTooLarge(_)) => {
                OracleComparison { ran: false, optimum: None, matches: None }
            }
            Err(e) => return Err(e),
        }
    };
    let oracle_ms = oracle_start.elapsed().as_millis() as u64;

    let out_dir = cfg.resolved_out_dir();
    std::fs::create_dir_all(&out_dir)?;
    let report_path = out_dir.join("report.json");
    let csv_path = out_dir.join("timefreq.csv");

    let mut report = SolveReport {
        problem: instance.kind().to_string(),
        optimum: solved.optimum,
        witness: solved.witness,
        epochs: solved.epochs,
        runs_used: solved.runs_used,
        oracle,
        config: ConfigEcho {
            mode: cfg.kp_mode,
            paranoid: cfg.paranoid,
            cross_check: cfg.cross_check,
            threshold: cfg.threshold,
            sample_rate: cfg.sample_rate,
            seed: cfg.seed,
        },
        artifacts: Artifacts {
            report_json: Some(report_path.display().to_string()),
            timefreq_csv: Some(csv_path.display().to_string()),
        },
        timing: Timing { solve_ms, oracle_ms, total_ms: 0 },
        timefreq: solved.timefreq,
    };
    report.timing.total_ms = total_start.elapsed().as_millis() as u64;

    write_atomic(&csv_path, &peaks_to_csv(&report.timefreq))?;
    write_atomic(
        &report_path,
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok(report)
}

/// Re-emits the CSV export from a report.
pub fn export_timefreq(report: &SolveReport, path: &Path) -> Result<()> {
    write_atomic(path, &peaks_to_csv(&report.timefreq))
}

/// Report serialization with timing zeroed, for byte-comparisons.
pub fn report_json_without_timing(report: &SolveReport) -> String {
    let mut clone = report.clone();
    clone.timing = Timing::default();
    serde_json::to_string_pretty(&clone).expect("report serializes")
}
