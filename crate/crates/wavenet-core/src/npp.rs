//! Number Partitioning on a 1D mixing chain.
//!
//! The seed emits cos(2π·w_0·t) and each further weight becomes a mixer
//! node, so the halt node sees ∏_j cos(2π·w_j·t): one spectral component per
//! sign vector, at frequency |s·w|. The minimum discrepancy is the lowest
//! nonnegative peak, and the partition itself is recovered by rerunning with
//! nodes merged into the seed one at a time.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};
use crate::network::chain_evaluate;
use crate::ops::WaveOp;
use crate::signal::{detect_peaks, dft, lowest_nonneg_peak, Peak, Signal, TimeGrid};

/// Spectral resolution window: integer peaks are spaced ≥ 2 apart (parity),
/// so 4 time-units (bin spacing 1/4) fully separates them.
const WINDOW: u32 = 4;

/// Cap on Σw so the default sample rate stays bounded.
pub const WEIGHT_SUM_CAP: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NppInstance {
    weights: Vec<i64>,
}

impl NppInstance {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(WaveError::InvalidInstance(format!(
                "need N ≥ 2 weights, got {}",
                weights.len()
            )));
        }
        if let Some(j) = weights.iter().position(|&w| w < 1) {
            return Err(WaveError::InvalidInstance(format!(
                "w_j ≥ 1 violated at index {j} (w = {})",
                weights[j]
            )));
        }
        let sum: i64 = weights.iter().sum();
        if sum > WEIGHT_SUM_CAP {
            return Err(WaveError::InvalidInstance(format!(
                "Σw = {sum} exceeds cap {WEIGHT_SUM_CAP}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
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
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NppConfig {
    pub threshold_override: Option<f64>,
    pub sample_rate_override: Option<u32>,
    /// Re-verify every sign flip with an extra run.
    pub paranoid: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NppEpoch {
    /// Seed weight used for this epoch's merged chain.
    pub merged_weight: i64,
    /// Whether the d_min peak survived the merge.
    pub peak_present: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NppSolution {
    pub d_min: i64,
    /// ±1 per weight; signs[0] = +1 (gauge fix).
    pub signs: Vec<i8>,
    pub epochs: Vec<NppEpoch>,
    /// Total chain evaluations spent (initial run + decode epochs).
    pub runs_used: usize,
}

impl NppSolution {
    pub fn subset_weights(&self, instance: &NppInstance, sign: i8) -> Vec<i64> {
        self.signs
            .iter()
            .zip(instance.weights())
            .filter(|(&s, _)| s == sign)
            .map(|(_, &w)| w)
            .collect()
    }
}

/// Chain encoding: seed tone at w_0, one mixer per remaining weight.
pub fn build_chain(instance: &NppInstance) -> (i64, Vec<WaveOp>) {
    let w = instance.weights();
    (w[0], w[1..].iter().map(|&wj| WaveOp::Mix(wj)).collect())
}

/// Bin magnitude of a single sign configuration: the seed cosine
/// contributes 1/2 per ± component (1 if the seed is DC) and every mixer
/// halves it again.
fn single_config_magnitude(seed_freq: i64, mixer_count: usize) -> f64 {
    let seed = if seed_freq == 0 { 1.0 } else { 0.5 };
    seed * 0.5f64.powi(mixer_count as i32)
}

struct ChainRun {
    peaks: Vec<Peak>,
}

fn run_chain(
    seed_freq: i64,
    mixers: &[i64],
    sample_rate: u32,
    cfg: &NppConfig,
) -> Result<ChainRun> {
    let f_max = seed_freq + mixers.iter().sum::<i64>();
    let grid = TimeGrid::new(sample_rate, WINDOW, f_max as u32)?;
    let seed = Signal::cosine(grid, seed_freq);
    let ops: Vec<WaveOp> = mixers.iter().map(|&w| WaveOp::Mix(w)).collect();
    let out = chain_evaluate(&ops, &seed)?;
    let threshold = cfg
        .threshold_override
        .unwrap_or(0.5 * single_config_magnitude(seed_freq, mixers.len()));
    let spectrum = dft(&out)?;
    Ok(ChainRun { peaks: detect_peaks(&spectrum, threshold) })
}

fn default_sample_rate(instance: &NppInstance, cfg: &NppConfig) -> u32 {
    cfg.sample_rate_override
        .unwrap_or(4 * instance.weight_sum() as u32)
}

/// The minimum weight discrepancy, read as the lowest nonnegative peak of
/// the full mixing chain. Also returns the detected peaks for export.
pub fn min_discrepancy(instance: &NppInstance, cfg: &NppConfig) -> Result<(i64, Vec<Peak>)> {
    let (seed_freq, _) = build_chain(instance);
    let run = run_chain(
        seed_freq,
        &instance.weights()[1..],
        default_sample_rate(instance, cfg),
        cfg,
    )?;
    let d = lowest_nonneg_peak(&run.peaks)?;
    Ok((d, run.peaks))
}

/// Recovers the partition: for j = 1…N−1 the j-th node is merged into the
/// seed additively; if the d_min peak survives, w_j joins the seed's subset,
/// otherwise the sign flips and the merged seed becomes |w' − w_j|.
pub fn decode_partition(
    instance: &NppInstance,
    d_min: i64,
    cfg: &NppConfig,
) -> Result<NppSolution> {
    let w = instance.weights();
    let n = w.len();
    let sample_rate = default_sample_rate(instance, cfg);
    let mut signs: Vec<i8> = vec![1; n];
    // Signed running sum w_0 + Σ s_k·w_k over merged nodes. The physical
    // seed oscillates at |sum| (cos is even), but the bookkeeping must stay
    // signed: storing an absolute value would silently renegate the whole
    // merged cluster for later epochs.
    let mut merged: i64 = w[0];
    let mut epochs = Vec::with_capacity(n - 1);
    let mut runs_used = 1; // the initial d_min run

    for j in 1..n {
        let candidate = merged + w[j];
        let run = run_chain(candidate.abs(), &w[j + 1..], sample_rate, cfg)?;
        runs_used += 1;
        let present = run.peaks.iter().any(|p| p.freq == d_min);
        epochs.push(NppEpoch { merged_weight: candidate.abs(), peak_present: present });
        if present {
            merged = candidate;
        } else {
            signs[j] = -1;
            merged -= w[j];
            if cfg.paranoid {
                // extra run confirming d_min is reachable with the flip
                let check = run_chain(merged.abs(), &w[j + 1..], sample_rate, cfg)?;
                runs_used += 1;
                if !check.peaks.iter().any(|p| p.freq == d_min) {
                    return Err(WaveError::DecodeInconsistent(format!(
                        "flip of node {j} does not restore the d_min peak"
                    )));
                }
            }
        }
    }

    let achieved: i64 = signs
        .iter()
        .zip(w)
        .map(|(&s, &wj)| s as i64 * wj)
        .sum::<i64>()
        .abs();
    if achieved != d_min {
        return Err(WaveError::DecodeInconsistent(format!(
            "decoded signs give |Σ s·w| = {achieved}, expected d_min = {d_min}"
        )));
    }
    if !cfg.paranoid {
        debug_assert!(runs_used <= n, "epoch budget: ≤ N runs");
    }
    Ok(NppSolution { d_min, signs, epochs, runs_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{npp_bruteforce, npp_spectrum_set};
    use rand::{Rng, SeedableRng};

    fn inst(w: &[i64]) -> NppInstance {
        NppInstance::new(w.to_vec()).unwrap()
    }

    const PAPER_N20: [i64; 20] = [
        3, 5, 9, 10, 12, 16, 20, 26, 27, 29, 38, 42, 43, 54, 55, 59, 63, 93, 98, 100,
    ];

    #[test]
    fn build_chain_layout() {
        let (f, ops) = build_chain(&inst(&[3, 5]));
        assert_eq!(f, 3);
        assert_eq!(ops, vec![WaveOp::Mix(5)]);

        let (f, ops) = build_chain(&inst(&[3, 5, 9]));
        assert_eq!(f, 3);
        assert_eq!(ops, vec![WaveOp::Mix(5), WaveOp::Mix(9)]);

        let (_, ops) = build_chain(&inst(&PAPER_N20));
        assert_eq!(ops.len(), 19);
    }

    #[test]
    fn min_discrepancy_small() {
        let cfg = NppConfig::default();
        assert_eq!(min_discrepancy(&inst(&[3, 5]), &cfg).unwrap().0, 2);
        assert_eq!(min_discrepancy(&inst(&[2, 2]), &cfg).unwrap().0, 0);
    }

    #[test]
    fn decode_small() {
        let cfg = NppConfig::default();
        let sol = decode_partition(&inst(&[3, 5]), 2, &cfg).unwrap();
        assert_eq!(sol.signs, vec![1, -1]);

        let sol = decode_partition(&inst(&[2, 2]), 0, &cfg).unwrap();
        assert_eq!(sol.signs, vec![1, -1]);
    }

    #[test]
    fn paper_n20_perfect_partition() {
        let cfg = NppConfig::default();
        let instance = inst(&PAPER_N20);
        let (d, _) = min_discrepancy(&instance, &cfg).unwrap();
        assert_eq!(d, 0);

        let sol = decode_partition(&instance, d, &cfg).unwrap();
        let a = sol.subset_weights(&instance, 1);
        let b = sol.subset_weights(&instance, -1);
        assert_eq!(a.iter().sum::<i64>(), 401);
        assert_eq!(b.iter().sum::<i64>(), 401);
        assert_eq!(
            a,
            vec![3, 5, 9, 10, 12, 16, 20, 26, 27, 29, 38, 43, 63, 100]
        );
        assert_eq!(sol.runs_used, 20);
    }

    #[test]
    fn paranoid_mode_verifies_flips() {
        let cfg = NppConfig { paranoid: true, ..Default::default() };
        let instance = inst(&[3, 5, 9]);
        let (d, _) = min_discrepancy(&instance, &cfg).unwrap();
        assert_eq!(d, 1);
        let sol = decode_partition(&instance, d, &cfg).unwrap();
        let achieved: i64 = sol
            .signs
            .iter()
            .zip(instance.weights())
            .map(|(&s, &w)| s as i64 * w)
            .sum();
        assert_eq!(achieved.abs(), 1);
    }

    #[test]
    fn detected_spectrum_equals_sign_enumeration() {
        let cfg = NppConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..8 {
            let n = rng.gen_range(4..=10);
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=60)).collect();
            let instance = inst(&w);
            let (_, peaks) = min_discrepancy(&instance, &cfg).unwrap();
            let got: std::collections::BTreeSet<i64> =
                peaks.iter().filter(|p| p.freq >= 0).map(|p| p.freq).collect();
            assert_eq!(got, npp_spectrum_set(&w).unwrap(), "weights {w:?}");
        }
    }

    #[test]
    fn parity_of_detected_peaks() {
        let cfg = NppConfig::default();
        let instance = inst(&[4, 7, 9, 13]);
        let (_, peaks) = min_discrepancy(&instance, &cfg).unwrap();
        let total: i64 = instance.weight_sum();
        for p in peaks {
            assert_eq!(p.freq.rem_euclid(2), total.rem_euclid(2));
        }
    }

    #[test]
    fn oracle_equivalence_random() {
        let cfg = NppConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..12 {
            let n = rng.gen_range(4..=12);
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=150)).collect();
            let instance = inst(&w);
            let (d, _) = min_discrepancy(&instance, &cfg).unwrap();
            assert_eq!(d, npp_bruteforce(&w).unwrap().optimum, "weights {w:?}");
            let sol = decode_partition(&instance, d, &cfg).unwrap();
            let achieved: i64 = sol
                .signs
                .iter()
                .zip(&w)
                .map(|(&s, &wj)| s as i64 * wj)
                .sum();
            assert_eq!(achieved.abs(), d);
        }
    }

    #[test]
    fn instance_validation() {
        assert!(NppInstance::new(vec![3]).is_err());
        assert!(NppInstance::new(vec![0, 5]).is_err());
        assert!(NppInstance::new(vec![4000, 4000]).is_err());
    }
}
