//! Problem-instance files: structured text (TOML) with an explicit
//! `problem` discriminator, one instance per file.
//!
//! ```text
//! problem = "npp"
//! weights = [3, 5, 9]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::kp::KpInstance;
use crate::npp::NppInstance;
use crate::tsp::TspInstance;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Npp(NppInstance),
    Kp(KpInstance),
    Tsp(TspInstance),
}

impl ProblemInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemInstance::Npp(_) => "npp",
            ProblemInstance::Kp(_) => "knapsack",
            ProblemInstance::Tsp(_) => "tsp",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawInstance {
    problem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<Vec<i64>>>,
}

pub fn parse_instance_str(text: &str) -> Result<ProblemInstance> {
    let raw: RawInstance =
        toml::from_str(text).map_err(|e| WaveError::Parse(e.to_string()))?;
    let field = |name: &str, opt: Option<Vec<i64>>| {
        opt.ok_or_else(|| {
            WaveError::Parse(format!("`{name}` required for problem \"{}\"", raw.problem))
        })
    };
    match raw.problem.as_str() {
        "npp" => Ok(ProblemInstance::Npp(NppInstance::new(field(
            "weights",
            raw.weights,
        )?)?)),
        "knapsack" => {
            let weights = field("weights", raw.weights)?;
            let values = field("values", raw.values)?;
            let capacity = raw.capacity.ok_or_else(|| {
                WaveError::Parse("`capacity` required for problem \"knapsack\"".into())
            })?;
            Ok(ProblemInstance::Kp(KpInstance::new(weights, values, capacity)?))
        }
        "tsp" => {
            let dist = raw.dist.ok_or_else(|| {
                WaveError::Parse("`dist` required for problem \"tsp\"".into())
            })?;
            Ok(ProblemInstance::Tsp(TspInstance::new(dist)?))
        }
        other => Err(WaveError::Parse(format!(
            "unknown problem kind \"{other}\" (expected npp, knapsack or tsp)"
        ))),
    }
}

pub fn parse_instance(path: &Path) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WaveError::Parse(format!("{}: {e}", path.display())))?;
    parse_instance_str(&text)
        .map_err(|e| WaveError::Parse(format!("{}: {e}", path.display())))
}

/// Canonical text form; `parse(serialize(x)) == x`.
pub fn serialize_instance(instance: &ProblemInstance) -> String {
    let raw = match instance {
        ProblemInstance::Npp(i) => RawInstance {
            problem: "npp".into(),
            weights: Some(i.weights().to_vec()),
            values: None,
            capacity: None,
            dist: None,
        },
        ProblemInstance::Kp(i) => RawInstance {
            problem: "knapsack".into(),
            weights: Some(i.weights().to_vec()),
            values: Some(i.values().to_vec()),
            capacity: Some(i.capacity()),
            dist: None,
        },
        ProblemInstance::Tsp(i) => RawInstance {
            problem: "tsp".into(),
            weights: None,
            values: None,
            capacity: None,
            dist: Some(i.dist().to_vec()),
        },
    };
    toml::to_string(&raw).expect("instances serialize cleanly")
}
