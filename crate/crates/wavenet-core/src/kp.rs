//! 0/1 Knapsack on a chain of two-branch edges.
//!
//! Each item's edge either passes the packet unchanged or shifts it up by
//! the item's value and delays it by the item's weight, so the halt node
//! receives one packet per item subset: total value in the frequency, total
//! weight in the arrival time. With integer weights and 1/c = 2 time-units
//! per weight unit, packets of duration 1 can never overlap across slots.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::network::chain_evaluate;
use crate::ops::{BranchArm, WaveOp};
use crate::signal::{moving_dft, Peak, Signal, TimeFreqMap, TimeGrid};

/// Time-units per weight unit (1/c); 2 keeps unit-length packets from
/// overlapping between adjacent arrival slots.
pub const INV_WAVE_SPEED: i64 = 2;

/// Packet duration δ in time-units.
const PACKET_LEN: u32 = 1;

/// Cap on Σv so the default sample rate stays bounded.
pub const VALUE_SUM_CAP: i64 = 4096;

/// Whether item edges shift (clean one-peak-per-subset spectra) or mix
/// (adds spurious lower-frequency peaks, never above the true optimum).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KpMode {
    #[default]
    Shift,
    Mix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpInstance {
    weights: Vec<i64>,
    values: Vec<i64>,
    capacity: i64,
}

impl KpInstance {
    pub fn new(weights: Vec<i64>, values: Vec<i64>, capacity: i64) -> Result<Self> {
        if weights.is_empty() {
            return Err(WaveError::InvalidInstance("no items".into()));
        }
        if weights.len() != values.len() {
            return Err(WaveError::InvalidInstance(format!(
                "{} weights vs {} values",
                weights.len(),
                values.len()
            )));
        }
        if let Some(j) = weights.iter().position(|&w| w < 1) {
            return Err(WaveError::InvalidInstance(format!(
                "w_j ≥ 1 violated at index {j}"
            )));
        }
        if let Some(j) = values.iter().position(|&v| v < 1) {
            return Err(WaveError::InvalidInstance(format!(
                "v_j ≥ 1 violated at index {j}"
            )));
        }
        if capacity < 0 {
            return Err(WaveError::InvalidInstance("capacity must be ≥ 0".into()));
        }
        let vsum: i64 = values.iter().sum();
        if vsum > VALUE_SUM_CAP {
            return Err(WaveError::InvalidInstance(format!(
                "Σv = {vsum} exceeds cap {VALUE_SUM_CAP}"
            )));
        }
        Ok(Self { weights, values, capacity })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight_sum(&self) -> i64 {
        self.weights.iter().sum()
    }

    pub fn value_sum(&self) -> i64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KpConfig {
    pub mode: KpMode,
    pub threshold_override: Option<f64>,
    pub sample_rate_override: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KpEpoch {
    pub skipped_item: usize,
    /// Whether v_max was still reached with the item skipped.
    pub hit: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KpSolution {
    pub v_max: i64,
    /// 0/1 per item.
    pub items: Vec<u8>,
    /// Arrival slot c·t in weight units (= items·weights).
    pub arrival: i64,
    pub epochs: Vec<KpEpoch>,
    pub runs_used: usize,
}

/// Chain encoding with optional skips: a skipped item contributes a bare
/// identity edge, an active item the two-branch edge (identity arm plus
/// shift-or-mix followed by the weight delay).
pub fn build_kp_chain_with_skips(
    instance: &KpInstance,
    mode: KpMode,
    skipped: &[bool],
) -> Vec<WaveOp> {
    instance
        .weights()
        .iter()
        .zip(instance.values())
        .enumerate()
        .map(|(j, (&w, &v))| {
            if skipped.get(j).copied().unwrap_or(false) {
                WaveOp::Identity
            } else {
                let encode = match mode {
                    KpMode::Shift => WaveOp::Shift(v),
                    KpMode::Mix => WaveOp::Mix(v),
                };
                WaveOp::Branch(vec![
                    BranchArm::new(vec![WaveOp::Identity]),
                    BranchArm::new(vec![encode, WaveOp::Delay((INV_WAVE_SPEED * w) as u32)]),
                ])
            }
        })
        .collect()
}

/// Chain encoding of the full instance.
pub fn build_kp_chain(instance: &KpInstance, mode: KpMode) -> Vec<WaveOp> {
    build_kp_chain_with_skips(instance, mode, &vec![false; instance.len()])
}

/// Weakest packet bin magnitude: 1 in shift mode; each mixer halves the
/// component in mix mode, so the floor is 2^-N over active items.
fn single_packet_magnitude(mode: KpMode, active_items: usize) -> f64 {
    match mode {
        KpMode::Shift => 1.0,
        KpMode::Mix => 0.5f64.powi(active_items as i32),
    }
}

struct KpRun {
    map: TimeFreqMap,
    threshold: f64,
}

fn run_kp_chain(instance: &KpInstance, skipped: &[bool], cfg: &KpConfig) -> Result<KpRun> {
    let f_max = instance.value_sum();
    let sample_rate = cfg.sample_rate_override.unwrap_or(4 * f_max as u32);
    // worst case every item delays: 2·Σw, plus the packet itself
    let duration = (INV_WAVE_SPEED * instance.weight_sum()) as u32 + PACKET_LEN;
    let grid = TimeGrid::new(sample_rate, duration, f_max as u32)?;
    let seed = Signal::packet(grid, 0, 0, PACKET_LEN)?;
    let ops = build_kp_chain_with_skips(instance, cfg.mode, skipped);
    let out = chain_evaluate(&ops, &seed)?;
    let map = moving_dft(&out, PACKET_LEN, INV_WAVE_SPEED as u32)?;
    let active = skipped.iter().filter(|s| !**s).count();
    let threshold = cfg
        .threshold_override
        .unwrap_or(0.5 * single_packet_magnitude(cfg.mode, active));
    Ok(KpRun { map, threshold })
}

/// Peaks within the capacity horizon (c·t ≤ W), ordered by frame.
fn peaks_within_capacity(run: &KpRun, capacity: i64) -> Vec<Peak> {
    run.map
        .frames()
        .iter()
        .filter(|f| f.window_start() <= INV_WAVE_SPEED * capacity)
        .flat_map(|f| crate::signal::detect_peaks(f, run.threshold))
        .collect()
}

/// Maximum value read from the highest-frequency packet arriving by
/// t = W, plus that packet's arrival slot. Also returns the detected
/// peak table for export.
pub fn max_value(instance: &KpInstance, cfg: &KpConfig) -> Result<(i64, i64, Vec<Peak>)> {
    let run = run_kp_chain(instance, &vec![false; instance.len()], cfg)?;
    let peaks = peaks_within_capacity(&run, instance.capacity());
    let mut v_max = 0i64;
    let mut arrival = 0i64;
    for p in &peaks {
        if p.freq > v_max {
            v_max = p.freq;
            arrival = p.window_start / INV_WAVE_SPEED;
        }
    }
    let all_peaks = run.map.peaks(run.threshold);
    Ok((v_max, arrival, all_peaks))
}

/// Recovers the item set: skip items one at a time; if v_max is still
/// reached within capacity the item is excluded for good, otherwise it is
/// kept (with both branches) for all later epochs.
pub fn decode_items(instance: &KpInstance, v_max: i64, cfg: &KpConfig) -> Result<KpSolution> {
    let n = instance.len();
    let mut skipped = vec![false; n];
    let mut epochs = Vec::with_capacity(n);
    let mut runs_used = 1; // initial max_value run

    for j in 0..n {
        skipped[j] = true;
        let run = run_kp_chain(instance, &skipped, cfg)?;
        runs_used += 1;
        let hit = peaks_within_capacity(&run, instance.capacity())
            .iter()
            .any(|p| p.freq == v_max);
        epochs.push(KpEpoch { skipped_item: j, hit });
        if !hit {
            skipped[j] = false; // essential item, keep it
        }
    }

    let items: Vec<u8> = skipped.iter().map(|&s| u8::from(!s)).collect();
    let value: i64 = items
        .iter()
        .zip(instance.values())
        .map(|(&x, &v)| x as i64 * v)
        .sum();
    let weight: i64 = items
        .iter()
        .zip(instance.weights())
        .map(|(&x, &w)| x as i64 * w)
        .sum();
    if value != v_max {
        return Err(WaveError::DecodeInconsistent(format!(
            "decoded items give value {value}, expected {v_max}"
        )));
    }
    if weight > instance.capacity() {
        return Err(WaveError::DecodeInconsistent(format!(
            "decoded items weigh {weight} > capacity {}",
            instance.capacity()
        )));
    }
    debug_assert!(runs_used <= n + 1, "epoch budget: ≤ N+1 runs");
    Ok(KpSolution { v_max, items, arrival: weight, epochs, runs_used })
}
