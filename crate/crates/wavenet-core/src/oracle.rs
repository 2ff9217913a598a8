//! Independent classical solvers and symbolic spectrum calculators used to
//! verify every wave-simulation result.
//!
//! Nothing here touches the signal path: oracles work on plain integers so
//! that agreement with the simulator is meaningful evidence.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Result, WaveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    BruteForce,
    DynamicProgramming,
    HeldKarp,
    SymbolicSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    /// ±1 per weight (NPP); first entry gauge-fixed to +1.
    Signs(Vec<i8>),
    /// 0/1 per item (knapsack).
    Items(Vec<u8>),
    /// Node permutation starting at 0 (TSP); the closing hop back to 0 is
    /// implicit.
    Cycle(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub optimum: i64,
    pub witness: Witness,
    pub method: OracleMethod,
}

/// Exhaustive minimum of |s·w| over sign vectors with s_0 = +1.
/// Ties break toward the smallest flip mask.
pub fn npp_bruteforce(weights: &[i64]) -> Result<OracleResult> {
    let n = weights.len();
    if n > 26 {
        return Err(WaveError::OracleTooLarge(format!(
            "npp brute force capped at N ≤ 26, got {n}"
        )));
    }
    if n == 0 {
        return Err(WaveError::InvalidInstance("no weights".into()));
    }
    let free = n - 1;
    let mut sum: i64 = weights.iter().sum();
    let mut mask: u64 = 0;
    let mut best = (sum.abs(), 0u64);
    // Gray-code walk over the 2^(n-1) sign choices of w_1..w_{n-1}
    for g in 1u64..(1 << free) {
        let bit = g.trailing_zeros() as usize;
        let flipped_on = mask >> bit & 1 == 0;
        mask ^= 1 << bit;
        let w = weights[bit + 1];
        sum += if flipped_on { -2 * w } else { 2 * w };
        let cand = (sum.abs(), mask);
        if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            best = cand;
        }
    }
    let signs: Vec<i8> = std::iter::once(1i8)
        .chain((0..free).map(|j| if best.1 >> j & 1 == 1 { -1 } else { 1 }))
        .collect();
    let achieved: i64 = signs
        .iter()
        .zip(weights)
        .map(|(&s, &w)| s as i64 * w)
        .sum::<i64>()
        .abs();
    assert_eq!(achieved, best.0, "oracle witness self-check");
    Ok(OracleResult {
        optimum: best.0,
        witness: Witness::Signs(signs),
        method: OracleMethod::BruteForce,
    })
}

/// Exact set {|s·w|} over all sign vectors.
pub fn npp_spectrum_set(weights: &[i64]) -> Result<BTreeSet<i64>> {
    let n = weights.len();
    if n > 22 {
        return Err(WaveError::OracleTooLarge(format!(
            "npp spectrum set capped at N ≤ 22, got {n}"
        )));
    }
    let free = n.saturating_sub(1);
    let mut set = BTreeSet::new();
    let mut sum: i64 = weights.iter().sum();
    let mut mask: u64 = 0;
    set.insert(sum.abs());
    for g in 1u64..(1 << free) {
        let bit = g.trailing_zeros() as usize;
        let flipped_on = mask >> bit & 1 == 0;
        mask ^= 1 << bit;
        let w = weights[bit + 1];
        sum += if flipped_on { -2 * w } else { 2 * w };
        set.insert(sum.abs());
    }
    Ok(set)
}

/// Exact 0/1 knapsack by dynamic programming; returns the lexicographically
/// smallest optimal item vector.
pub fn kp_dp(weights: &[i64], values: &[i64], capacity: i64) -> Result<OracleResult> {
    let n = weights.len();
    let cap = capacity.max(0) as usize;
    if (n as u64) * (cap as u64 + 1) > 100_000_000 {
        return Err(WaveError::OracleTooLarge(format!(
            "knapsack DP table {n} × {} too large",
            cap + 1
        )));
    }
    // best[j][w] = max value using items j.. with remaining capacity w
    let mut best = vec![vec![0i64; cap + 1]; n + 1];
    for j in (0..n).rev() {
        for w in 0..=cap {
            let skip = best[j + 1][w];
            let take = if weights[j] as usize <= w {
                values[j] + best[j + 1][w - weights[j] as usize]
            } else {
                i64::MIN
            };
            best[j][w] = skip.max(take);
        }
    }
    let mut items = vec![0u8; n];
    let mut w = cap;
    for j in 0..n {
        // prefer exclusion: lexicographically smallest optimum
        if best[j][w] != best[j + 1][w] {
            items[j] = 1;
            w -= weights[j] as usize;
        }
    }
    let value: i64 = items
        .iter()
        .zip(values)
        .map(|(&x, &v)| x as i64 * v)
        .sum();
    let weight: i64 = items
        .iter()
        .zip(weights)
        .map(|(&x, &w)| x as i64 * w)
        .sum();
    assert_eq!(value, best[0][cap], "oracle witness self-check");
    assert!(weight <= capacity.max(0), "oracle witness feasibility");
    Ok(OracleResult {
        optimum: best[0][cap],
        witness: Witness::Items(items),
        method: OracleMethod::DynamicProgramming,
    })
}

/// Exact TSP by the Held-Karp subset dynamic program; the witness is the
/// lexicographically smallest optimal tour starting at node 0.
pub fn tsp_held_karp(dist: &[Vec<i64>]) -> Result<OracleResult> {
    let n = dist.len();
    if n > 16 {
        return Err(WaveError::OracleTooLarge(format!(
            "Held-Karp capped at N ≤ 16, got {n}"
        )));
    }
    if n < 3 {
        return Err(WaveError::InvalidInstance("TSP needs N ≥ 3".into()));
    }
    let m = n - 1; // nodes 1..n encoded in the mask
    let full = (1usize << m) - 1;
    // comp[mask][j] (j ∈ mask): shortest continuation that stands at node
    // j+1 with `mask` already visited, covers the complement, returns to 0.
    let mut comp = vec![vec![0i64; m]; full + 1];
    for j in 0..m {
        comp[full][j] = dist[j + 1][0];
    }
    for mask in (1..full).rev() {
        for j in 0..m {
            if mask >> j & 1 == 0 {
                continue;
            }
            comp[mask][j] = (0..m)
                .filter(|k| mask >> k & 1 == 0)
                .map(|k| dist[j + 1][k + 1] + comp[mask | 1 << k][k])
                .min()
                .unwrap();
        }
    }
    let optimum = (0..m)
        .map(|k| dist[0][k + 1] + comp[1 << k][k])
        .min()
        .unwrap();

    // Greedy forward walk with exact tail costs picks the lexicographically
    // smallest optimal tour.
    let mut cycle = vec![0usize];
    let mut mask = 0usize;
    let mut cur = 0usize;
    let mut remaining = optimum;
    for _ in 0..m {
        let next = (0..m)
            .filter(|k| mask >> k & 1 == 0)
            .find(|&k| dist[cur][k + 1] + comp[mask | 1 << k][k] == remaining)
            .expect("an optimal continuation exists");
        remaining -= dist[cur][next + 1];
        mask |= 1 << next;
        cur = next + 1;
        cycle.push(cur);
    }
    let mut len = 0i64;
    for i in 0..n {
        len += dist[cycle[i]][cycle[(i + 1) % n]];
    }
    assert_eq!(len, optimum, "oracle witness self-check");
    Ok(OracleResult {
        optimum,
        witness: Witness::Cycle(cycle),
        method: OracleMethod::HeldKarp,
    })
}

/// Multiplicity profile of a closed walk from node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkProfile {
    pub length: i64,
    /// Visit count per node; node 0 counts its start only.
    pub visits: Vec<u32>,
}

/// Enumerates every closed walk from node 0 with total length ≤ max_len
/// over the given (possibly incomplete) symmetric distance matrix.
/// Exponential; intended for small verification instances.
pub fn enumerate_closed_walks(dist: &[Vec<i64>], max_len: i64) -> Vec<WalkProfile> {
    let n = dist.len();
    let mut out = Vec::new();
    let mut visits = vec![0u32; n];
    visits[0] = 1;
    fn dfs(
        dist: &[Vec<i64>],
        cur: usize,
        len: i64,
        max_len: i64,
        visits: &mut Vec<u32>,
        out: &mut Vec<WalkProfile>,
    ) {
        for next in 0..dist.len() {
            if next == cur || dist[cur][next] <= 0 {
                continue;
            }
            let nl = len + dist[cur][next];
            if nl > max_len {
                continue;
            }
            if next == 0 {
                out.push(WalkProfile { length: nl, visits: visits.clone() });
                // walks may continue past the seed only by re-emission,
                // which the seed-halt never does; stop here.
            } else {
                visits[next] += 1;
                dfs(dist, next, nl, max_len, visits, out);
                visits[next] -= 1;
            }
        }
    }
    dfs(dist, 0, 0, max_len, &mut visits, &mut out);
    out
}

/// Lengths of all Hamiltonian cycles through every node exactly once,
/// starting/ending at 0. Exhaustive; N ≤ 10 sized.
pub fn hamiltonian_cycle_lengths(dist: &[Vec<i64>]) -> BTreeSet<i64> {
    let n = dist.len();
    let mut perm: Vec<usize> = (1..n).collect();
    let mut out = BTreeSet::new();
    permute(&mut perm, 0, &mut |p: &[usize]| {
        let mut len = dist[0][p[0]];
        for i in 0..p.len() - 1 {
            len += dist[p[i]][p[i + 1]];
        }
        len += dist[p[p.len() - 1]][0];
        out.insert(len);
    });
    out
}

fn permute(arr: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == arr.len() {
        f(arr);
        return;
    }
    for i in k..arr.len() {
        arr.swap(k, i);
        permute(arr, k + 1, f);
        arr.swap(k, i);
    }
}
