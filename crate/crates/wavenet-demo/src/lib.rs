//! wasm-bindgen bindings for the browser demo page.
//!
//! Three interactive operations, each returning a JSON payload the page
//! renders onto canvases: the NPP chain spectrum with its decoded
//! partition, the knapsack time-frequency packet map with the decoded item
//! set, and the TSP halt-trace spectrogram with the decoded cycle.
//!
//! Inputs are kept small here (the page is interactive); the CLI handles
//! full-size instances.

use wasm_bindgen::prelude::wasm_bindgen;

use wavenet_core::error::{Result, WaveError};
use wavenet_core::kp::{self, KpConfig, KpMode};
use wavenet_core::npp::{self, NppConfig};
use wavenet_core::oracle;
use wavenet_core::tsp::{self, TspConfig};

/// Demo-side caps keeping every interaction under ~a second in wasm.
const NPP_MAX_SUM: i64 = 600;
const KP_MAX_ITEMS: usize = 10;
const KP_MAX_VALUE_SUM: i64 = 300;
const TSP_MAX_CITIES: usize = 6;
const TSP_MAX_DIST: i64 = 9;

fn parse_int_list(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| WaveError::Parse(format!("bad integer `{t}`")))
        })
        .collect()
}

fn peaks_json(peaks: &[wavenet_core::Peak]) -> serde_json::Value {
    serde_json::Value::Array(
        peaks
            .iter()
            .map(|p| serde_json::json!([p.window_start, p.freq, p.magnitude]))
            .collect(),
    )
}

pub fn npp_payload(weights_text: &str) -> Result<String> {
    let weights = parse_int_list(weights_text)?;
    if weights.iter().sum::<i64>() > NPP_MAX_SUM {
        return Err(WaveError::InvalidConfig(format!(
            "demo caps Σw at {NPP_MAX_SUM}"
        )));
    }
    let instance = npp::NppInstance::new(weights.clone())?;
    let cfg = NppConfig::default();
    let (d_min, peaks) = npp::min_discrepancy(&instance, &cfg)?;
    let sol = npp::decode_partition(&instance, d_min, &cfg)?;
    let brute = oracle::npp_bruteforce(&weights)?;
    Ok(serde_json::json!({
        "d_min": d_min,
        "oracle": brute.optimum,
        "subset_a": sol.subset_weights(&instance, 1),
        "subset_b": sol.subset_weights(&instance, -1),
        "epochs": sol.epochs.iter().map(|e| serde_json::json!({
            "merged_weight": e.merged_weight,
            "peak_present": e.peak_present,
        })).collect::<Vec<_>>(),
        "peaks": peaks_json(&peaks),
    })
    .to_string())
}

pub fn kp_payload(weights_text: &str, values_text: &str, capacity: i64, mix: bool) -> Result<String> {
    let weights = parse_int_list(weights_text)?;
    let values = parse_int_list(values_text)?;
    if weights.len() > KP_MAX_ITEMS {
        return Err(WaveError::InvalidConfig(format!(
            "demo caps items at {KP_MAX_ITEMS}"
        )));
    }
    if values.iter().sum::<i64>() > KP_MAX_VALUE_SUM {
        return Err(WaveError::InvalidConfig(format!(
            "demo caps Σv at {KP_MAX_VALUE_SUM}"
        )));
    }
    let instance = kp::KpInstance::new(weights.clone(), values.clone(), capacity)?;
    let cfg = KpConfig {
        mode: if mix { KpMode::Mix } else { KpMode::Shift },
        ..Default::default()
    };
    let (v_max, arrival, peaks) = kp::max_value(&instance, &cfg)?;
    let sol = kp::decode_items(&instance, v_max, &cfg)?;
    let dp = oracle::kp_dp(&weights, &values, capacity)?;
    Ok(serde_json::json!({
        "v_max": v_max,
        "arrival": arrival,
        "oracle": dp.optimum,
        "items": sol.items,
        "capacity": capacity,
        "value_sum": instance.value_sum(),
        "weight_sum": instance.weight_sum(),
        "peaks": peaks_json(&peaks),
    })
    .to_string())
}

pub fn tsp_payload(dist_json: &str) -> Result<String> {
    let dist: Vec<Vec<i64>> = serde_json::from_str(dist_json)
        .map_err(|e| WaveError::Parse(format!("bad distance matrix: {e}")))?;
    if dist.len() > TSP_MAX_CITIES {
        return Err(WaveError::InvalidConfig(format!(
            "demo caps cities at {TSP_MAX_CITIES}"
        )));
    }
    if dist
        .iter()
        .flat_map(|r| r.iter())
        .any(|&v| v > TSP_MAX_DIST)
    {
        return Err(WaveError::InvalidConfig(format!(
            "demo caps distances at {TSP_MAX_DIST}"
        )));
    }
    let instance = tsp::TspInstance::new(dist.clone())?;
    let cfg = TspConfig::default();
    let m = tsp::revisit_bound(&instance);
    let plan = tsp::allocate_frequencies(instance.len(), m)?;
    let (d_opt, t_0, peaks) = tsp::shortest_cycle_length(&instance, &plan, &cfg)?;
    let sol = tsp::decode_cycle(&instance, d_opt, &plan, &cfg)?;
    let hk = oracle::tsp_held_karp(&dist)?;
    Ok(serde_json::json!({
        "d_opt": d_opt,
        "t_0": t_0,
        "oracle": hk.optimum,
        "cycle": sol.cycle,
        "horizon": tsp::nn_upper_bound(&instance),
        "omega_sum": plan.omega_sum,
        "omegas": plan.omegas,
        "epochs": sol.epochs.iter().map(|e| serde_json::json!({
            "edge": e.edge, "length": e.length, "hit": e.hit,
        })).collect::<Vec<_>>(),
        "peaks": peaks_json(&peaks),
    })
    .to_string())
}

fn to_js(result: Result<String>) -> std::result::Result<String, wasm_bindgen::JsValue> {
    result.map_err(|e| wasm_bindgen::JsValue::from_str(&e.to_string()))
}

/// Solve a number-partitioning instance; `weights` is a comma/space
/// separated integer list.
#[wasm_bindgen]
pub fn solve_npp(weights: &str) -> std::result::Result<String, wasm_bindgen::JsValue> {
    to_js(npp_payload(weights))
}

/// Solve a 0/1 knapsack instance.
#[wasm_bindgen]
pub fn solve_kp(
    weights: &str,
    values: &str,
    capacity: i64,
    mix: bool,
) -> std::result::Result<String, wasm_bindgen::JsValue> {
    to_js(kp_payload(weights, values, capacity, mix))
}

/// Solve a TSP instance; `dist_json` is a JSON N×N symmetric matrix.
#[wasm_bindgen]
pub fn solve_tsp(dist_json: &str) -> std::result::Result<String, wasm_bindgen::JsValue> {
    to_js(tsp_payload(dist_json))
}
