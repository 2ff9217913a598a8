//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (visible under `cargo test -- --nocapture`).

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavenet_core::kp::{self, KpConfig, KpInstance, KpMode};
use wavenet_core::network::{chain_evaluate, init, EdgeSpec, EngineConfig, Network, NodeRole, NodeSpec};
use wavenet_core::npp::{self, NppConfig, NppInstance};
use wavenet_core::oracle;
use wavenet_core::ops::{apply, FilterSpec, WaveOp};
use wavenet_core::run::{report_json_without_timing, solve, RunConfig};
use wavenet_core::signal::{detect_peaks, dft, Signal, TimeGrid};
use wavenet_core::tsp::{self, TspConfig, TspInstance};

fn instances_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn random_tsp(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> TspInstance {
    let mut d = vec![vec![0i64; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let v = rng.gen_range(lo..=hi);
            d[j][k] = v;
            d[k][j] = v;
        }
    }
    TspInstance::new(d).unwrap()
}

#[test]
fn criterion_01_npp_n20_reproduction() {
    let start = Instant::now();
    let text = std::fs::read_to_string(instances_dir().join("npp_n20.toml")).unwrap();
    let instance = match wavenet_core::instance::parse_instance_str(&text).unwrap() {
        wavenet_core::instance::ProblemInstance::Npp(i) => i,
        _ => panic!("wrong instance kind"),
    };
    let cfg = NppConfig::default();
    let (d_min, _) = npp::min_discrepancy(&instance, &cfg).unwrap();
    assert_eq!(d_min, 0, "perfectly balanced instance");
    let sol = npp::decode_partition(&instance, d_min, &cfg).unwrap();
    let a: i64 = sol.subset_weights(&instance, 1).iter().sum();
    let b: i64 = sol.subset_weights(&instance, -1).iter().sum();
    assert_eq!((a, b), (401, 401));
    assert!(sol.runs_used <= 20, "≤ 20 total runs, used {}", sol.runs_used);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "under 60 s, took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: N=20 instance gives d_min=0 with a 401/401 split in {} runs ({elapsed:?})",
        sol.runs_used
    );
}

#[test]
fn criterion_02_npp_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let cfg = NppConfig::default();
    for trial in 0..50 {
        let n = rng.gen_range(4..=16);
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=200)).collect();
        let instance = NppInstance::new(w.clone()).unwrap();
        let (d_min, _) = npp::min_discrepancy(&instance, &cfg).unwrap();
        let brute = oracle::npp_bruteforce(&w).unwrap().optimum;
        assert_eq!(d_min, brute, "trial {trial}, weights {w:?}");
        let sol = npp::decode_partition(&instance, d_min, &cfg).unwrap();
        let achieved: i64 = sol
            .signs
            .iter()
            .zip(&w)
            .map(|(&s, &wj)| s as i64 * wj)
            .sum();
        assert_eq!(achieved.abs(), d_min, "trial {trial} decode");
    }
    println!("ACCEPTANCE 2 PASS: 50 random NPP instances match brute force exactly and decode validly");
}

#[test]
fn criterion_03_npp_spectrum_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    for trial in 0..12 {
        let n = rng.gen_range(4..=12);
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=150)).collect();
        let instance = NppInstance::new(w.clone()).unwrap();

        // detected nonnegative peak set == symbolic sign-vector enumeration
        let (_, peaks) = npp::min_discrepancy(&instance, &NppConfig::default()).unwrap();
        let got: std::collections::BTreeSet<i64> =
            peaks.iter().filter(|p| p.freq >= 0).map(|p| p.freq).collect();
        let expect = oracle::npp_spectrum_set(&w).unwrap();
        assert_eq!(got, expect, "trial {trial}, weights {w:?}");

        // every off-set bin below 1e-9 of the largest peak
        let sum: i64 = w.iter().sum();
        let grid = TimeGrid::new(4 * sum as u32, 4, sum as u32).unwrap();
        let (seed_freq, ops) = npp::build_chain(&instance);
        let out = chain_evaluate(&ops, &Signal::cosine(grid, seed_freq)).unwrap();
        let spec = dft(&out).unwrap();
        let largest = spec
            .raw_bins()
            .map(|(_, a)| a.norm())
            .fold(0.0f64, f64::max);
        for (f, amp) in spec.raw_bins() {
            let on_set = f.fract() == 0.0 && expect.contains(&(f as i64).abs());
            if !on_set {
                assert!(
                    amp.norm() < 1e-9 * largest,
                    "trial {trial}: off-set bin {f} has {} (largest {largest})",
                    amp.norm()
                );
            }
        }
    }
    println!("ACCEPTANCE 3 PASS: NPP spectra (N ≤ 12) equal the sign-vector sets with off-set bins < 1e-9 relative");
}

#[test]
fn criterion_04_kp_oracle_equivalence_both_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA4);
    for trial in 0..50 {
        let n = rng.gen_range(4..=14);
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=20)).collect();
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=30)).collect();
        let wsum: i64 = w.iter().sum();
        let cap = rng.gen_range(wsum / 4..=wsum / 2).max(1);
        let instance = KpInstance::new(w.clone(), v.clone(), cap).unwrap();
        let dp = oracle::kp_dp(&w, &v, cap).unwrap().optimum;

        let shift_cfg = KpConfig { mode: KpMode::Shift, ..Default::default() };
        let (v_shift, _, _) = kp::max_value(&instance, &shift_cfg).unwrap();
        assert_eq!(v_shift, dp, "trial {trial} shift mode, w {w:?} v {v:?} cap {cap}");

        let mix_cfg = KpConfig { mode: KpMode::Mix, ..Default::default() };
        let (v_mix, _, _) = kp::max_value(&instance, &mix_cfg).unwrap();
        assert_eq!(v_mix, dp, "trial {trial} mix mode");

        let sol = kp::decode_items(&instance, v_shift, &shift_cfg).unwrap();
        let value: i64 = sol.items.iter().zip(&v).map(|(&x, &vj)| x as i64 * vj).sum();
        let weight: i64 = sol.items.iter().zip(&w).map(|(&x, &wj)| x as i64 * wj).sum();
        assert_eq!(value, dp, "trial {trial} decoded value");
        assert!(weight <= cap, "trial {trial} decoded weight");
    }
    println!("ACCEPTANCE 4 PASS: 50 random knapsack instances match the DP in shift AND mix mode with feasible optimal decodes");
}

#[test]
fn criterion_05_kp_packet_bijection() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA5);
    let cfg = KpConfig::default();
    for trial in 0..6 {
        let n = rng.gen_range(4..=10);
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=12)).collect();
        let instance = KpInstance::new(w.clone(), v.clone(), 1).unwrap();
        let (_, _, peaks) = kp::max_value(&instance, &cfg).unwrap();
        let got: std::collections::BTreeSet<(i64, i64)> =
            peaks.iter().map(|p| (p.freq, p.window_start)).collect();
        let mut expect = std::collections::BTreeSet::new();
        for mask in 0u64..(1 << n) {
            let xv: i64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| v[j]).sum();
            let xw: i64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| w[j]).sum();
            expect.insert((xv, 2 * xw));
        }
        assert_eq!(got, expect, "trial {trial}, w {w:?} v {v:?}");
    }
    println!("ACCEPTANCE 5 PASS: shift-mode packet sets equal {{(x·v, 2·x·w)}} exactly for N ≤ 10");
}

#[test]
fn criterion_06_tsp_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6);
    let cfg = TspConfig::default();
    for trial in 0..25 {
        let n = rng.gen_range(4..=8);
        let instance = random_tsp(&mut rng, n, 1, 20);
        let m = tsp::revisit_bound(&instance);
        let plan = tsp::allocate_frequencies(n, m).unwrap();
        let (d_opt, t_0, _) = tsp::shortest_cycle_length(&instance, &plan, &cfg).unwrap();
        let hk = oracle::tsp_held_karp(instance.dist()).unwrap().optimum;
        assert_eq!(d_opt, hk, "trial {trial} N={n} dist {:?}", instance.dist());
        assert_eq!(t_0, hk);

        let sol = tsp::decode_cycle(&instance, d_opt, &plan, &cfg).unwrap();
        let mut seen = sol.cycle.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>(), "trial {trial} Hamiltonian");
        let len: i64 = (0..n)
            .map(|i| instance.dist()[sol.cycle[i]][sol.cycle[(i + 1) % n]])
            .sum();
        assert_eq!(len, hk, "trial {trial} cycle length");
    }
    println!("ACCEPTANCE 6 PASS: 25 random TSP instances (N ∈ [4,8]) match Held-Karp with optimal Hamiltonian decodes");
}

#[test]
fn criterion_07_tsp_soundness_completeness() {
    let cfg = TspConfig::default();

    // N = 7: Ω_0 frame times == Hamiltonian cycle lengths within horizon
    let mut rng = ChaCha8Rng::seed_from_u64(0xA7);
    let instance = random_tsp(&mut rng, 7, 2, 9);
    let m = tsp::revisit_bound(&instance);
    let plan = tsp::allocate_frequencies(7, m).unwrap();
    let horizon = tsp::nn_upper_bound(&instance);
    let (_, _, peaks) = tsp::shortest_cycle_length(&instance, &plan, &cfg).unwrap();
    let got: std::collections::BTreeSet<i64> = peaks
        .iter()
        .filter(|p| p.freq == plan.omega_sum)
        .map(|p| p.window_start)
        .collect();
    let expect: std::collections::BTreeSet<i64> =
        oracle::hamiltonian_cycle_lengths(instance.dist())
            .into_iter()
            .filter(|&l| l <= horizon)
            .collect();
    assert_eq!(got, expect, "N=7 soundness + completeness");

    // N = 5: enumerate every closed walk within the horizon and confirm
    // only all-once visit profiles carry Ω_0
    let instance = random_tsp(&mut rng, 5, 4, 9);
    let m = tsp::revisit_bound(&instance);
    let plan = tsp::allocate_frequencies(5, m).unwrap();
    let horizon = tsp::nn_upper_bound(&instance);
    let walks = oracle::enumerate_closed_walks(instance.dist(), horizon);
    assert!(!walks.is_empty());
    let mut hamiltonian_seen = 0u32;
    for walk in &walks {
        let omega: i64 = walk
            .visits
            .iter()
            .zip(&plan.omegas)
            .map(|(&mj, &wj)| mj as i64 * wj)
            .sum();
        let all_once = walk.visits.iter().all(|&mj| mj == 1);
        assert_eq!(
            omega == plan.omega_sum,
            all_once,
            "walk {:?} length {}",
            walk.visits,
            walk.length
        );
        if all_once {
            hamiltonian_seen += 1;
        }
    }
    assert!(hamiltonian_seen > 0, "horizon admits at least one Hamiltonian cycle");
    println!(
        "ACCEPTANCE 7 PASS: Ω_0 frames equal Hamiltonian arrival times (N=7) and {} closed walks (N=5) confirm the plan",
        walks.len()
    );
}

#[test]
fn criterion_08_operator_property_suite() {
    // mix peak-doubling (exact count)
    let g = TimeGrid::new(256, 1, 40).unwrap();
    let base = Signal::cosine(g, 3);
    let before = detect_peaks(&dft(&base).unwrap(), 0.25).len();
    let mixed = apply(&WaveOp::Mix(20), &base).unwrap();
    assert_eq!(detect_peaks(&dft(&mixed).unwrap(), 0.1).len(), 2 * before);

    // shift translation with magnitudes preserved to 1e-12
    let tone = Signal::tone(g, 5);
    let shifted = apply(&WaveOp::Shift(9), &tone).unwrap();
    assert!((dft(&shifted).unwrap().magnitude(14) - 1.0).abs() < 1e-12);

    // delay additivity, exact
    let g8 = TimeGrid::new(64, 8, 16).unwrap();
    let p = Signal::packet(g8, 2, 0, 1).unwrap();
    let two = apply(&WaveOp::Delay(3), &apply(&WaveOp::Delay(2), &p).unwrap()).unwrap();
    let one = apply(&WaveOp::Delay(5), &p).unwrap();
    assert_eq!(two.samples(), one.samples());

    // filter idempotence to 1e-12
    let s = Signal::new(
        g,
        Signal::cosine(g, 3)
            .samples()
            .iter()
            .zip(Signal::cosine(g, 30).samples())
            .map(|(a, b)| a + b)
            .collect(),
    )
    .unwrap();
    let f = WaveOp::Filter(FilterSpec::LowPass { nu_max: 10 });
    let once = apply(&f, &s).unwrap();
    let twice = apply(&f, &once).unwrap();
    for (a, b) in once.samples().iter().zip(twice.samples()) {
        assert!((a - b).norm() < 1e-12);
    }

    // mix–shift consistency to 1e-12
    let x = Signal::tone(g, 4);
    let mixed = apply(&WaveOp::Mix(7), &x).unwrap();
    let up = apply(&WaveOp::Shift(7), &x).unwrap();
    let down = apply(&WaveOp::Shift(-7), &x).unwrap();
    for ((m, u), d) in mixed.samples().iter().zip(up.samples()).zip(down.samples()) {
        assert!((m - (u + d) / 2.0).norm() < 1e-12);
    }

    // engine–chain equivalence to 1e-10
    let net = Network::new(
        vec![
            NodeSpec { id: 0, role: NodeRole::Seed, op: WaveOp::Identity },
            NodeSpec { id: 1, role: NodeRole::Intermediate, op: WaveOp::Mix(3) },
            NodeSpec { id: 2, role: NodeRole::Intermediate, op: WaveOp::Shift(2) },
            NodeSpec { id: 3, role: NodeRole::Halt, op: WaveOp::Identity },
        ],
        vec![
            EdgeSpec { from: 0, to: 1, op: WaveOp::Identity, length: 1 },
            EdgeSpec { from: 1, to: 2, op: WaveOp::Shift(1), length: 2 },
            EdgeSpec { from: 2, to: 3, op: WaveOp::Identity, length: 1 },
        ],
    )
    .unwrap();
    let sr = 64;
    let mut st = init(&net, EngineConfig { seed_freq: 2, packet_len: 1, sample_rate: sr }).unwrap();
    let fifo = st.run_until(8).unwrap();
    let grid = TimeGrid::new(sr, 8, sr / 4).unwrap();
    let closed = chain_evaluate(
        &net.as_chain().unwrap(),
        &Signal::packet(grid, 2, 0, 1).unwrap(),
    )
    .unwrap();
    for (a, b) in fifo.samples().iter().zip(closed.samples()) {
        assert!((a - b).norm() < 1e-10);
    }
    println!("ACCEPTANCE 8 PASS: operator suite (mix doubling, shift translation, delay additivity, filter idempotence, mix–shift, engine–chain) at stated tolerances");
}

#[test]
fn criterion_09_epoch_budgets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA9);

    let w: Vec<i64> = (0..10).map(|_| rng.gen_range(1..=50)).collect();
    let npp_inst = NppInstance::new(w).unwrap();
    let ncfg = NppConfig::default();
    let (d, _) = npp::min_discrepancy(&npp_inst, &ncfg).unwrap();
    let nsol = npp::decode_partition(&npp_inst, d, &ncfg).unwrap();
    assert!(nsol.runs_used <= npp_inst.len(), "NPP ≤ N runs");

    let w: Vec<i64> = (0..8).map(|_| rng.gen_range(1..=10)).collect();
    let v: Vec<i64> = (0..8).map(|_| rng.gen_range(1..=15)).collect();
    let wsum: i64 = w.iter().sum();
    let kp_inst = KpInstance::new(w, v, wsum / 2).unwrap();
    let kcfg = KpConfig::default();
    let (vm, _, _) = kp::max_value(&kp_inst, &kcfg).unwrap();
    let ksol = kp::decode_items(&kp_inst, vm, &kcfg).unwrap();
    assert!(ksol.runs_used <= kp_inst.len() + 1, "KP ≤ N+1 runs");

    let tsp_inst = random_tsp(&mut rng, 6, 1, 15);
    let plan = tsp::allocate_frequencies(6, tsp::revisit_bound(&tsp_inst)).unwrap();
    let tcfg = TspConfig::default();
    let (d_opt, _, _) = tsp::shortest_cycle_length(&tsp_inst, &plan, &tcfg).unwrap();
    let tsol = tsp::decode_cycle(&tsp_inst, d_opt, &plan, &tcfg).unwrap();
    assert!(tsol.runs_used <= 6 * 5 / 2 + 1, "TSP ≤ N(N−1)/2 + 1 runs");

    println!(
        "ACCEPTANCE 9 PASS: epoch budgets hold (NPP {}/{}, KP {}/{}, TSP {}/{})",
        nsol.runs_used,
        npp_inst.len(),
        ksol.runs_used,
        kp_inst.len() + 1,
        tsol.runs_used,
        6 * 5 / 2 + 1
    );
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("kp.toml", "problem = \"knapsack\"\nweights = [4, 2, 7, 1]\nvalues = [9, 4, 12, 2]\ncapacity = 8\n"),
        ("tsp.toml", "problem = \"tsp\"\ndist = [[0,7,4,9],[7,0,5,3],[4,5,0,6],[9,3,6,0]]\n"),
        ("npp.toml", "problem = \"npp\"\nweights = [3, 5, 9, 10, 12]\n"),
    ] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let out = dir.path().join("out");
        let run = || {
            let mut cfg = RunConfig::new(&path);
            cfg.seed = 7;
            cfg.out_dir = Some(out.clone());
            let report = solve(&cfg).unwrap();
            let csv = std::fs::read(out.join("timefreq.csv")).unwrap();
            (report_json_without_timing(&report), csv)
        };
        let (ja, ca) = run();
        let (jb, cb) = run();
        assert_eq!(ja, jb, "{name} report bytes (timing excluded)");
        assert_eq!(ca, cb, "{name} CSV bytes");
    }
    println!("ACCEPTANCE 10 PASS: repeated runs with fixed config and seed are byte-identical (timing excluded)");
}
