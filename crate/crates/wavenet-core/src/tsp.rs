//! Traveling Salesman on a complete graph of frequency-shifting nodes and
//! delay edges.
//!
//! Every closed walk from the seed returns as a wave packet whose frequency
//! is the sum of the node frequencies it passed and whose arrival time is
//! its length. With a frequency plan that makes Σω_j reachable only by
//! visiting every node exactly once, the first packet at the sum frequency
//! Ω_0 marks the shortest Hamiltonian cycle. Edge-removal epochs recover the
//! cycle itself.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Result, WaveError};
use crate::network::{init, EdgeSpec, EngineConfig, Network, NodeRole, NodeSpec};
use crate::ops::WaveOp;
use crate::signal::{moving_dft, Peak, Signal};

/// Power plans (ω_j = (M+1)^j) are used while their Ω_0 stays below this;
/// beyond it the compact interval plan keeps the sample rate affordable.
const POWER_PLAN_CAP: i64 = 65_536;

/// Refusal threshold for the perturbed-retry path (total pipeline samples).
const RETRY_CELL_BUDGET: usize = 300_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TspInstance {
    dist: Vec<Vec<i64>>,
}

impl TspInstance {
    pub fn new(dist: Vec<Vec<i64>>) -> Result<Self> {
        let n = dist.len();
        if n < 3 {
            return Err(WaveError::InvalidInstance(format!("need N ≥ 3 cities, got {n}")));
        }
        for (j, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(WaveError::InvalidInstance(format!(
                    "dist row {j} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[j] != 0 {
                return Err(WaveError::InvalidInstance(format!(
                    "nonzero diagonal dist[{j}][{j}]"
                )));
            }
            for (k, &v) in row.iter().enumerate() {
                if j != k && v < 1 {
                    return Err(WaveError::InvalidInstance(format!(
                        "off-diagonal dist[{j}][{k}] must be ≥ 1, got {v}"
                    )));
                }
                if dist[k][j] != v {
                    return Err(WaveError::InvalidInstance(format!(
                        "asymmetric dist[{j}][{k}]"
                    )));
                }
            }
        }
        Ok(Self { dist })
    }

    pub fn dist(&self) -> &[Vec<i64>] {
        &self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn min_edge(&self) -> i64 {
        let n = self.len();
        (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .filter(|&(j, k)| j != k)
            .map(|(j, k)| self.dist[j][k])
            .min()
            .unwrap()
    }
}

/// Node frequency assignment with its uniqueness certificate inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyPlan {
    pub omegas: Vec<i64>,
    pub omega_sum: i64,
    pub revisit_bound: i64,
}

/// Counts representations of Ω_0 as Σ m_j·ω_j with 0 ≤ m_j ≤ M, capped at 2.
/// A valid plan has exactly one (the all-ones vector).
fn representation_count(omegas: &[i64], m: i64, target: i64) -> u32 {
    let t = target as usize;
    let mut ways = vec![0u32; t + 1];
    ways[0] = 1;
    for &w in omegas {
        let w = w as usize;
        let mut next = vec![0u32; t + 1];
        for (s, &base) in ways.iter().enumerate() {
            if base == 0 {
                continue;
            }
            let mut q = 0i64;
            let mut pos = s;
            while q <= m && pos <= t {
                next[pos] = (next[pos] + base).min(2);
                q += 1;
                pos += w;
            }
        }
        ways = next;
    }
    ways[t]
}

fn validate_plan(omegas: &[i64], m: i64) -> Result<FrequencyPlan> {
    let omega_sum: i64 = omegas.iter().sum();
    let count = representation_count(omegas, m.max(1), omega_sum);
    if count != 1 {
        return Err(WaveError::InvalidFrequencyPlan(format!(
            "Ω_0 = {omega_sum} is reachable by {count} multiplicity vectors in [0, {m}]"
        )));
    }
    Ok(FrequencyPlan { omegas: omegas.to_vec(), omega_sum, revisit_bound: m })
}

/// Allocates node frequencies whose sum Ω_0 is uniquely attainable under
/// per-node multiplicities in [0, M]. Powers of (M+1) while affordable;
/// otherwise an interval plan ω_j = n·2^{n−1} + 2^j, whose narrow spread
/// forces any Ω_0-reaching multiset to have exactly n elements.
pub fn allocate_frequencies(n: usize, m: i64) -> Result<FrequencyPlan> {
    if n < 3 || m < 1 {
        return Err(WaveError::InvalidConfig(format!(
            "frequency plan needs n ≥ 3 and M ≥ 1, got n = {n}, M = {m}"
        )));
    }
    let base = m + 1;
    let mut power = Vec::with_capacity(n);
    let mut v: i64 = 1;
    let mut sum: i64 = 0;
    let mut fits = true;
    for _ in 0..n {
        power.push(v);
        sum += v;
        if sum > POWER_PLAN_CAP {
            fits = false;
            break;
        }
        match v.checked_mul(base) {
            Some(next) => v = next,
            None => {
                fits = false;
                break;
            }
        }
    }
    if fits && sum <= POWER_PLAN_CAP {
        return validate_plan(&power, m);
    }
    let a = (n as i64) << (n - 1);
    let compact: Vec<i64> = (0..n).map(|j| a + (1i64 << j)).collect();
    validate_plan(&compact, m)
}

/// Randomized interval plan for cross-check mode: same narrow-band forcing
/// with random distinct offsets, validated and retried.
pub fn random_frequency_plan(
    n: usize,
    m: i64,
    rng: &mut impl rand::Rng,
) -> Result<FrequencyPlan> {
    if n < 3 || m < 1 {
        return Err(WaveError::InvalidConfig(format!(
            "frequency plan needs n ≥ 3 and M ≥ 1, got n = {n}, M = {m}"
        )));
    }
    let b = 1i64 << n;
    for _ in 0..200 {
        let a = (n as i64) * b + rng.gen_range(0..(n as i64) * b);
        let mut offsets = std::collections::BTreeSet::new();
        while (offsets.len() as i64) < n as i64 {
            offsets.insert(rng.gen_range(1..=b));
        }
        let omegas: Vec<i64> = offsets.iter().map(|&o| a + o).collect();
        if let Ok(plan) = validate_plan(&omegas, m) {
            return Ok(plan);
        }
    }
    Err(WaveError::InvalidFrequencyPlan(
        "no valid randomized plan after 200 attempts".into(),
    ))
}

/// Greedy nearest-neighbour tour length from node 0 (ties to the lowest
/// index); an upper bound for the run horizon.
pub fn nn_upper_bound(instance: &TspInstance) -> i64 {
    let n = instance.len();
    let d = instance.dist();
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut cur = 0usize;
    let mut total = 0i64;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&k| !visited[k])
            .min_by_key(|&k| (d[cur][k], k))
            .unwrap();
        total += d[cur][next];
        visited[next] = true;
        cur = next;
    }
    total + d[cur][0]
}

/// Per-instance revisit bound: a walk inside the horizon cannot traverse
/// more edges than horizon / min edge length.
pub fn revisit_bound(instance: &TspInstance) -> i64 {
    let lg = nn_upper_bound(instance);
    (lg + instance.min_edge() - 1) / instance.min_edge()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TspConfig {
    pub threshold_override: Option<f64>,
    pub sample_rate_override: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TspEpoch {
    pub edge: (usize, usize),
    pub length: i64,
    /// Whether Ω_0 still arrived by t_0 with the edge removed.
    pub hit: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TspSolution {
    pub d_opt: i64,
    /// Node permutation starting at 0; the closing hop is implicit.
    pub cycle: Vec<usize>,
    pub t_0: i64,
    pub plan: FrequencyPlan,
    pub epochs: Vec<TspEpoch>,
    pub runs_used: usize,
}

/// Every sum Σ m_j·ω_j attainable with total multiplicity ≤ mu_cap.
fn attainable_walk_sums(omegas: &[i64], mu_cap: i64) -> Vec<bool> {
    let wmax = *omegas.iter().max().unwrap() as usize;
    let smax = wmax * mu_cap as usize;
    let mut attain = vec![false; smax + 1];
    let mut layer = vec![false; smax + 1];
    layer[0] = true;
    for _ in 0..mu_cap {
        let mut next = vec![false; smax + 1];
        for (s, &ok) in layer.iter().enumerate() {
            if !ok {
                continue;
            }
            for &w in omegas {
                let t = s + w as usize;
                if t <= smax {
                    next[t] = true;
                }
            }
        }
        for (a, &n) in attain.iter_mut().zip(next.iter()) {
            *a |= n;
        }
        layer = next;
    }
    attain
}

/// Sample rate for the engine: 4·Ω_0 by default, doubled until no
/// walk-attainable sum other than Ω_0 is congruent to Ω_0 mod S (any such
/// sum would alias onto the readout bin).
fn choose_sample_rate(
    plan: &FrequencyPlan,
    horizon: i64,
    min_edge: i64,
    requested: Option<u32>,
) -> Result<u32> {
    let omega0 = plan.omega_sum;
    let mut s = requested.unwrap_or((4 * omega0) as u32) as i64;
    if s < 4 * omega0 {
        return Err(WaveError::InvalidConfig(format!(
            "sample rate {s} below 4·Ω_0 = {}",
            4 * omega0
        )));
    }
    let mu_cap = horizon / min_edge + 1;
    let attain = attainable_walk_sums(&plan.omegas, mu_cap);
    loop {
        let collision = attain
            .iter()
            .enumerate()
            .skip((omega0 + 1) as usize)
            .any(|(sum, &ok)| ok && (sum as i64 - omega0) % s == 0);
        if !collision {
            return Ok(s as u32);
        }
        s *= 2;
    }
}

/// Complete-graph network over the surviving edge set.
fn build_network(instance: &TspInstance, plan: &FrequencyPlan, removed: &[bool]) -> Network {
    let n = instance.len();
    let mut nodes = vec![NodeSpec { id: 0, role: NodeRole::SeedThenHalt, op: WaveOp::Identity }];
    for j in 1..n {
        nodes.push(NodeSpec {
            id: j,
            role: NodeRole::Intermediate,
            op: WaveOp::Shift(plan.omegas[j]),
        });
    }
    let mut edges = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j != k && !removed[pair_index(n, j.min(k), j.max(k))] {
                edges.push(EdgeSpec {
                    from: j,
                    to: k,
                    op: WaveOp::Identity,
                    length: instance.dist()[j][k] as u32,
                });
            }
        }
    }
    Network::new(nodes, edges).expect("complete-graph network is structurally valid")
}

fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * n + k // sparse but simple; indexed by (min, max)
}

fn default_threshold(n: usize) -> f64 {
    0.5 * ((n - 1) as f64).powi(-((n - 1) as i32))
}

fn run_trace(
    instance: &TspInstance,
    plan: &FrequencyPlan,
    removed: &[bool],
    horizon: i64,
    sample_rate: u32,
) -> Result<Signal> {
    let net = build_network(instance, plan, removed);
    let mut state = init(
        &net,
        EngineConfig { seed_freq: plan.omegas[0], packet_len: 1, sample_rate },
    )?;
    state.run_until(horizon as u32 + 1)
}

/// Earliest unit frame (time-units) whose Ω_0 bin reaches the threshold,
/// scanning only that bin: per frame at integer start t, the bin equals
/// (1/S)·Σ_m x[t·S+m]·e^{−i2πΩ_0 m/S} (the absolute-time phase factor is a
/// whole number of turns at integer t and drops out).
fn first_omega_hit(trace: &Signal, omega0: i64, threshold: f64, t_max: i64) -> Option<i64> {
    let s = trace.grid().sample_rate() as usize;
    let table: Vec<Complex64> = (0..s)
        .map(|m| crate::signal::phase_unit(-omega0 * m as i64, s as i64))
        .collect();
    let frames = (trace.samples().len() / s).min(t_max as usize + 1);
    for t in 0..frames {
        let sum: Complex64 = trace.samples()[t * s..(t + 1) * s]
            .iter()
            .zip(&table)
            .map(|(x, p)| x * p)
            .sum();
        if sum.norm() / s as f64 >= threshold {
            return Some(t as i64);
        }
    }
    None
}

/// First sum-frequency return: runs the FIFO engine to the greedy horizon
/// and scans the halt trace's moving spectrum for the earliest Ω_0 frame.
/// Returns (d_opt, t_0) — equal under c = 1 — plus the peak table.
pub fn shortest_cycle_length(
    instance: &TspInstance,
    plan: &FrequencyPlan,
    cfg: &TspConfig,
) -> Result<(i64, i64, Vec<Peak>)> {
    let horizon = nn_upper_bound(instance);
    let s = choose_sample_rate(plan, horizon, instance.min_edge(), cfg.sample_rate_override)?;
    let threshold = cfg.threshold_override.unwrap_or(default_threshold(instance.len()));
    let removed = vec![false; instance.len() * instance.len()];
    let trace = run_trace(instance, plan, &removed, horizon, s)?;
    match first_omega_hit(&trace, plan.omega_sum, threshold, horizon) {
        Some(t0) => {
            let map = moving_dft(&trace, 1, 1)?;
            Ok((t0, t0, map.peaks(threshold)))
        }
        None => Err(WaveError::NoHamiltonianFound { horizon }),
    }
}

/// Edge-removal decode: candidates in descending length; an edge whose
/// removal keeps Ω_0 arriving by t_0 is non-essential and stays out, one
/// that silences it is restored as a cycle member. Edges at a degree-2
/// endpoint are forced members and are never tested; the process stops at
/// N surviving edges.
pub fn decode_cycle(
    instance: &TspInstance,
    d_opt: i64,
    plan: &FrequencyPlan,
    cfg: &TspConfig,
) -> Result<TspSolution> {
    decode_cycle_inner(instance, d_opt, plan, cfg, true)
}

fn decode_cycle_inner(
    instance: &TspInstance,
    d_opt: i64,
    plan: &FrequencyPlan,
    cfg: &TspConfig,
    allow_retry: bool,
) -> Result<TspSolution> {
    let n = instance.len();
    let d = instance.dist();
    let horizon = nn_upper_bound(instance);
    let s = choose_sample_rate(plan, horizon, instance.min_edge(), cfg.sample_rate_override)?;
    let threshold = cfg.threshold_override.unwrap_or(default_threshold(n));

    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect();
    candidates.sort_by_key(|&(j, k)| (-d[j][k], j, k));

    let mut removed = vec![false; n * n];
    let mut degree = vec![n - 1; n];
    let mut remaining = n * (n - 1) / 2;
    let mut epochs = Vec::new();

    for &(j, k) in &candidates {
        if remaining == n {
            break;
        }
        if degree[j] == 2 || degree[k] == 2 {
            continue; // forced cycle member
        }
        removed[pair_index(n, j, k)] = true;
        let trace = run_trace(instance, plan, &removed, d_opt, s)?;
        let hit = first_omega_hit(&trace, plan.omega_sum, threshold, d_opt).is_some();
        epochs.push(TspEpoch { edge: (j, k), length: d[j][k], hit });
        if hit {
            degree[j] -= 1;
            degree[k] -= 1;
            remaining -= 1;
        } else {
            removed[pair_index(n, j, k)] = false;
        }
    }
    debug_assert!(epochs.len() <= n * (n - 1) / 2, "epoch budget");
    let runs_used = 1 + epochs.len();

    match assemble_cycle(instance, &removed, d_opt) {
        Ok(cycle) => Ok(TspSolution {
            d_opt,
            cycle,
            t_0: d_opt,
            plan: plan.clone(),
            epochs,
            runs_used,
        }),
        Err(err) if allow_retry => {
            // Degenerate optima: rerun on a tie-broken instance whose
            // lengths are scaled and rank-perturbed, then map the cycle
            // back and re-verify against the original lengths.
            let scale = 2 * (n as i64) * (n as i64);
            let mut rank = 0i64;
            let mut pd = vec![vec![0i64; n]; n];
            for j in 0..n {
                for k in j + 1..n {
                    rank += 1;
                    pd[j][k] = d[j][k] * scale + rank;
                    pd[k][j] = pd[j][k];
                }
            }
            let perturbed = TspInstance::new(pd)?;
            let m = revisit_bound(&perturbed);
            let pplan = allocate_frequencies(n, m)?;
            let ph = nn_upper_bound(&perturbed);
            let ps = choose_sample_rate(&pplan, ph, perturbed.min_edge(), None)?;
            let est_cells: usize = (0..n)
                .flat_map(|j| (0..n).map(move |k| (j, k)))
                .filter(|&(j, k)| j != k)
                .map(|(j, k)| perturbed.dist()[j][k] as usize * ps as usize + 1)
                .sum();
            if est_cells > RETRY_CELL_BUDGET {
                return Err(err);
            }
            let pcfg = TspConfig { threshold_override: cfg.threshold_override, ..*cfg };
            let (pd_opt, _, _) = shortest_cycle_length(&perturbed, &pplan, &pcfg)?;
            let mut sol = decode_cycle_inner(&perturbed, pd_opt, &pplan, &pcfg, false)?;
            let len: i64 = cycle_length(instance, &sol.cycle);
            if len != d_opt {
                return Err(WaveError::DecodeInconsistent(format!(
                    "perturbed decode gives length {len}, expected {d_opt}"
                )));
            }
            sol.d_opt = d_opt;
            sol.t_0 = d_opt;
            sol.plan = plan.clone();
            Ok(sol)
        }
        Err(err) => Err(err),
    }
}

fn cycle_length(instance: &TspInstance, cycle: &[usize]) -> i64 {
    let n = cycle.len();
    (0..n)
        .map(|i| instance.dist()[cycle[i]][cycle[(i + 1) % n]])
        .sum()
}

fn assemble_cycle(instance: &TspInstance, removed: &[bool], d_opt: i64) -> Result<Vec<usize>> {
    let n = instance.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for k in j + 1..n {
            if !removed[pair_index(n, j, k)] {
                adj[j].push(k);
                adj[k].push(j);
            }
        }
    }
    if adj.iter().any(|a| a.len() != 2) {
        return Err(WaveError::DecodeInconsistent(
            "surviving edges are not a single cycle".into(),
        ));
    }
    let mut cycle = vec![0usize];
    let mut prev = 0usize;
    let mut cur = *adj[0].iter().min().unwrap();
    while cur != 0 {
        cycle.push(cur);
        let next = adj[cur]
            .iter()
            .copied()
            .find(|&x| x != prev)
            .expect("degree 2");
        prev = cur;
        cur = next;
    }
    if cycle.len() != n {
        return Err(WaveError::DecodeInconsistent(
            "surviving edges form more than one cycle".into(),
        ));
    }
    let len = cycle_length(instance, &cycle);
    if len != d_opt {
        return Err(WaveError::DecodeInconsistent(format!(
            "decoded cycle has length {len}, expected {d_opt}"
        )));
    }
    Ok(cycle)
}
