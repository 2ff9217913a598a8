//! Directed-graph networks of functional nodes/edges, the discrete-time
//! FIFO propagation engine, and a closed-form evaluator for 1D chains.
//!
//! Each directed edge is realized as a pipeline (ring buffer) whose samples
//! shift one position per sub-step, emulating wave transport at one
//! length-unit per time-unit. A cell (one length-unit) holds `sample_rate`
//! samples, so a signal entering an edge of length L re-emerges exactly
//! L·sample_rate sub-steps later.
//!
//! Re-emitting nodes normalize their input by in-degree before applying the
//! node operation; halt nodes only record, so their trace keeps the raw sum
//! of arriving samples.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Result, WaveError};
use crate::ops::{apply_chain, WaveOp};
use crate::signal::{cos_unit, phase_unit, Signal, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// Injects the initial signal.
    Seed,
    /// Collects, modifies, re-emits.
    Intermediate,
    /// Only incoming edges; monitors arrivals.
    Halt,
    /// Emits the initial packet, then behaves as the halt: arrivals are
    /// recorded and absorbed, never re-emitted.
    SeedThenHalt,
}

impl NodeRole {
    fn is_seed(self) -> bool {
        matches!(self, NodeRole::Seed | NodeRole::SeedThenHalt)
    }

    fn is_halt(self) -> bool {
        matches!(self, NodeRole::Halt | NodeRole::SeedThenHalt)
    }
}

#[derive(Debug, Clone)]
pub struct NodeSpec {
    pub id: usize,
    pub role: NodeRole,
    pub op: WaveOp,
}

#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub op: WaveOp,
    /// Propagation length in time-units. Zero only meaningful in chain mode.
    pub length: u32,
}

/// An immutable network description.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<NodeSpec>,
    edges: Vec<EdgeSpec>,
}

impl Network {
    pub fn new(nodes: Vec<NodeSpec>, edges: Vec<EdgeSpec>) -> Result<Self> {
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(WaveError::InvalidNetwork(format!(
                    "node ids must be contiguous from 0; found {} at position {i}",
                    n.id
                )));
            }
            n.op.validate()?;
        }
        let seeds = nodes.iter().filter(|n| n.role.is_seed()).count();
        if seeds != 1 {
            return Err(WaveError::InvalidNetwork(format!(
                "need exactly one seed node, found {seeds}"
            )));
        }
        if !nodes.iter().any(|n| n.role.is_halt()) {
            return Err(WaveError::InvalidNetwork("no halt node".into()));
        }
        for e in &edges {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(WaveError::InvalidNetwork(format!(
                    "edge ({}, {}) references unknown node",
                    e.from, e.to
                )));
            }
            if e.from == e.to {
                return Err(WaveError::InvalidNetwork(format!(
                    "self-loop at node {}",
                    e.from
                )));
            }
            if nodes[e.from].role == NodeRole::Halt {
                return Err(WaveError::InvalidNetwork(format!(
                    "halt node {} has an outgoing edge",
                    e.from
                )));
            }
            e.op.validate()?;
        }
        Ok(Self { nodes, edges })
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.edges
    }

    /// Extracts the serial operator sequence of a two-terminal path network
    /// (seed → … → halt): per hop, edge op, then the transport delay, then
    /// the target node's op. Fails on any branching, cycle or stray node.
    pub fn as_chain(&self) -> Result<Vec<WaveOp>> {
        let seed = self.nodes.iter().position(|n| n.role.is_seed()).unwrap();
        let mut ops = Vec::new();
        let mut visited = vec![false; self.nodes.len()];
        visited[seed] = true;
        let mut cur = seed;
        loop {
            let out: Vec<&EdgeSpec> = self.edges.iter().filter(|e| e.from == cur).collect();
            if out.is_empty() {
                break;
            }
            if out.len() > 1 {
                return Err(WaveError::NotAChain(format!(
                    "node {cur} has {} outgoing edges",
                    out.len()
                )));
            }
            let e = out[0];
            if visited[e.to] {
                return Err(WaveError::NotAChain(format!("cycle through node {}", e.to)));
            }
            visited[e.to] = true;
            if e.op != WaveOp::Identity {
                ops.push(e.op.clone());
            }
            if e.length > 0 {
                ops.push(WaveOp::Delay(e.length));
            }
            let node = &self.nodes[e.to];
            if !node.role.is_halt() && node.op != WaveOp::Identity {
                ops.push(node.op.clone());
            }
            cur = e.to;
        }
        if !self.nodes[cur].role.is_halt() {
            return Err(WaveError::NotAChain(format!(
                "path ends at node {cur} which is not a halt"
            )));
        }
        if visited.iter().any(|v| !v) {
            return Err(WaveError::NotAChain("stray nodes off the path".into()));
        }
        Ok(ops)
    }
}

/// Closed-form evaluation of a linear operator chain on a seed signal.
/// Matches the FIFO engine on the equivalent two-terminal network.
pub fn chain_evaluate(ops: &[WaveOp], seed: &Signal) -> Result<Signal> {
    apply_chain(ops, seed)
}

/// Pointwise node/edge operator admissible in the FIFO engine.
#[derive(Debug, Clone, Copy)]
enum PointOp {
    Identity,
    Mix(i64),
    Shift(i64),
}

/// Runtime form of a pointwise op: internal tones are periodic in the
/// sample rate, so one table per op removes all trig from the step loop.
/// Table entries equal phase_unit/cos_unit at the same arguments bit for
/// bit, keeping traces deterministic.
enum OpRuntime {
    Identity,
    Mix(Vec<f64>),
    Shift(Vec<Complex64>),
}

impl OpRuntime {
    fn build(op: PointOp, sample_rate: u32) -> Self {
        let s = sample_rate as i64;
        match op {
            PointOp::Identity => OpRuntime::Identity,
            PointOp::Mix(w) => {
                OpRuntime::Mix((0..s).map(|m| cos_unit(w * m, s)).collect())
            }
            PointOp::Shift(w) => {
                OpRuntime::Shift((0..s).map(|m| phase_unit(w * m, s)).collect())
            }
        }
    }

    #[inline]
    fn eval(&self, x: Complex64, u_mod: usize) -> Complex64 {
        match self {
            OpRuntime::Identity => x,
            OpRuntime::Mix(t) => x * t[u_mod],
            OpRuntime::Shift(t) => x * t[u_mod],
        }
    }
}

struct Pipe {
    from: usize,
    to: usize,
    op: OpRuntime,
    /// Ring buffer, length eff_len·S + 1: one staging slot plus the
    /// in-flight samples.
    cells: Vec<Complex64>,
    /// Write cursor; the read slot is the next one around the ring.
    w: usize,
}

/// Engine configuration: the seed packet and the sub-sampling rate
/// (samples per time-unit).
#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub seed_freq: i64,
    /// Packet duration δ in time-units; emission covers t ∈ [0, δ).
    pub packet_len: u32,
    pub sample_rate: u32,
}

/// Mutable FIFO propagation state. Single-writer; distinct states can run
/// in parallel.
pub struct EngineState {
    roles: Vec<NodeRole>,
    node_ops: Vec<OpRuntime>,
    pipes: Vec<Pipe>,
    indeg: Vec<u32>,
    primary_halt: usize,
    sample_rate: u32,
    emit_table: Vec<Complex64>,
    emit_subs: u64,
    t_sub: u64,
    /// t_sub mod sample_rate, the shared table index.
    u_mod: usize,
    halt_trace: Vec<Complex64>,
    sums: Vec<Complex64>,
    outs: Vec<Complex64>,
}

fn as_point_op(op: &WaveOp, what: &str) -> Result<(PointOp, u32)> {
    // returns (pointwise part, extra delay in time-units)
    match op {
        WaveOp::Identity => Ok((PointOp::Identity, 0)),
        WaveOp::Mix(w) => Ok((PointOp::Mix(*w), 0)),
        WaveOp::Shift(w) => Ok((PointOp::Shift(*w), 0)),
        WaveOp::Delay(t) => Ok((PointOp::Identity, *t)),
        other => Err(WaveError::InvalidNetwork(format!(
            "{what} op `{other}` is not realizable in the FIFO engine"
        ))),
    }
}

/// Builds a zeroed engine over the network: all pipeline cells zero, the
/// seed armed to emit e^{i2π·seed_freq·t} for t < packet_len.
pub fn init(network: &Network, cfg: EngineConfig) -> Result<EngineState> {
    if cfg.sample_rate == 0 {
        return Err(WaveError::InvalidConfig("sample_rate must be ≥ 1".into()));
    }
    let n = network.nodes().len();
    let mut node_ops = Vec::with_capacity(n);
    for node in network.nodes() {
        let (op, extra) = as_point_op(&node.op, "node")?;
        if extra > 0 {
            return Err(WaveError::InvalidNetwork(
                "delay as a node op is not supported; put it on an edge".into(),
            ));
        }
        if node.role.is_seed() || node.role.is_halt() {
            if !matches!(op, PointOp::Identity) {
                return Err(WaveError::InvalidNetwork(
                    "seed and halt nodes must carry the identity op".into(),
                ));
            }
        }
        node_ops.push(OpRuntime::build(op, cfg.sample_rate));
    }

    let s = cfg.sample_rate as usize;
    let mut pipes = Vec::with_capacity(network.edges().len());
    let mut indeg = vec![0u32; n];
    for e in network.edges() {
        let (op, extra) = as_point_op(&e.op, "edge")?;
        let eff_len = e.length as usize + extra as usize;
        if eff_len < 1 {
            return Err(WaveError::InvalidNetwork(format!(
                "edge ({}, {}) has zero effective length; FIFO edges need ≥ 1",
                e.from, e.to
            )));
        }
        indeg[e.to] += 1;
        pipes.push(Pipe {
            from: e.from,
            to: e.to,
            op: OpRuntime::build(op, cfg.sample_rate),
            cells: vec![Complex64::new(0.0, 0.0); eff_len * s + 1],
            w: 0,
        });
    }

    let primary_halt = network
        .nodes()
        .iter()
        .position(|nd| nd.role == NodeRole::SeedThenHalt)
        .or_else(|| network.nodes().iter().position(|nd| nd.role == NodeRole::Halt))
        .unwrap();

    Ok(EngineState {
        roles: network.nodes().iter().map(|nd| nd.role).collect(),
        node_ops,
        pipes,
        indeg,
        primary_halt,
        sample_rate: cfg.sample_rate,
        emit_table: (0..s as i64)
            .map(|m| phase_unit(cfg.seed_freq * m, s as i64))
            .collect(),
        emit_subs: cfg.packet_len as u64 * cfg.sample_rate as u64,
        t_sub: 0,
        u_mod: 0,
        halt_trace: Vec::new(),
        sums: vec![Complex64::new(0.0, 0.0); n],
        outs: vec![Complex64::new(0.0, 0.0); n],
    })
}

impl EngineState {
    /// Sub-step counter (sample_rate sub-steps per time-unit).
    pub fn t_sub(&self) -> u64 {
        self.t_sub
    }

    pub fn halt_trace(&self) -> &[Complex64] {
        &self.halt_trace
    }

    /// Total pipeline cell count (memory footprint in samples).
    pub fn total_cells(&self) -> usize {
        self.pipes.iter().map(|p| p.cells.len()).sum()
    }

    /// Advances the propagation by one sub-step: every pipeline shifts one
    /// sample, node inputs are the in-degree-normalized sums of arrivals,
    /// node outputs enter the head of every outgoing pipeline, and the halt
    /// node appends the raw arrival sum to its trace.
    pub fn step(&mut self) {
        self.sums.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for p in &self.pipes {
            let r = if p.w + 1 == p.cells.len() { 0 } else { p.w + 1 };
            self.sums[p.to] += p.cells[r];
        }

        self.halt_trace.push(self.sums[self.primary_halt]);

        for k in 0..self.roles.len() {
            self.outs[k] = match self.roles[k] {
                NodeRole::Seed | NodeRole::SeedThenHalt => {
                    if self.t_sub < self.emit_subs {
                        self.emit_table[self.u_mod]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
                NodeRole::Intermediate => {
                    if self.indeg[k] > 0 {
                        self.node_ops[k].eval(self.sums[k] / self.indeg[k] as f64, self.u_mod)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
                NodeRole::Halt => Complex64::new(0.0, 0.0),
            };
        }

        for p in &mut self.pipes {
            p.cells[p.w] = p.op.eval(self.outs[p.from], self.u_mod);
            p.w = if p.w + 1 == p.cells.len() { 0 } else { p.w + 1 };
        }
        self.t_sub += 1;
        self.u_mod += 1;
        if self.u_mod == self.sample_rate as usize {
            self.u_mod = 0;
        }
    }

    /// Runs until the trace covers `t_max` time-units and returns the halt
    /// trace as a signal.
    pub fn run_until(&mut self, t_max: u32) -> Result<Signal> {
        if t_max == 0 {
            return Err(WaveError::InvalidConfig("t_max must be ≥ 1".into()));
        }
        let target = t_max as u64 * self.sample_rate as u64;
        while self.t_sub < target {
            self.step();
        }
        let grid = TimeGrid::new(self.sample_rate, t_max, self.sample_rate / 4)?;
        Signal::new(grid, self.halt_trace[..target as usize].to_vec())
    }
}

// ---------------------------------------------------------------------------
// Canonical text form:
//   node <id> <role> <op>
//   edge <from> <to> <length> <op>
// ---------------------------------------------------------------------------

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeRole::Seed => "seed",
            NodeRole::Intermediate => "intermediate",
            NodeRole::Halt => "halt",
            NodeRole::SeedThenHalt => "seedhalt",
        };
        write!(f, "{s}")
    }
}

impl FromStr for NodeRole {
    type Err = WaveError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seed" => Ok(NodeRole::Seed),
            "intermediate" => Ok(NodeRole::Intermediate),
            "halt" => Ok(NodeRole::Halt),
            "seedhalt" => Ok(NodeRole::SeedThenHalt),
            other => Err(WaveError::Parse(format!("unknown node role `{other}`"))),
        }
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(f, "node {} {} {}", n.id, n.role, n.op)?;
        }
        for e in &self.edges {
            writeln!(f, "edge {} {} {} {}", e.from, e.to, e.length, e.op)?;
        }
        Ok(())
    }
}

impl FromStr for Network {
    type Err = WaveError;

    fn from_str(s: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| WaveError::Parse(format!("line {}: {msg}", lineno + 1));
            let mut parts = line.splitn(2, char::is_whitespace);
            let kind = parts.next().unwrap();
            let rest = parts.next().ok_or_else(|| bad("missing fields"))?.trim();
            match kind {
                "node" => {
                    let mut it = rest.splitn(3, char::is_whitespace);
                    let id: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("bad node id"))?;
                    let role: NodeRole =
                        it.next().ok_or_else(|| bad("missing role"))?.parse()?;
                    let op: WaveOp =
                        it.next().ok_or_else(|| bad("missing op"))?.trim().parse()?;
                    nodes.push(NodeSpec { id, role, op });
                }
                "edge" => {
                    let mut it = rest.splitn(4, char::is_whitespace);
                    let from: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("bad edge source"))?;
                    let to: usize = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("bad edge target"))?;
                    let length: u32 = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad("bad edge length"))?;
                    let op: WaveOp =
                        it.next().ok_or_else(|| bad("missing op"))?.trim().parse()?;
                    edges.push(EdgeSpec { from, to, op, length });
                }
                other => return Err(bad(&format!("unknown record `{other}`"))),
            }
        }
        Network::new(nodes, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{dft, moving_dft};

    fn two_node_line(length: u32) -> Network {
        Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::Seed, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::Halt, op: WaveOp::Identity },
            ],
            vec![EdgeSpec { from: 0, to: 1, op: WaveOp::Identity, length }],
        )
        .unwrap()
    }

    #[test]
    fn init_zeroed_and_trace_empty() {
        let st = init(
            &two_node_line(3),
            EngineConfig { seed_freq: 0, packet_len: 1, sample_rate: 4 },
        )
        .unwrap();
        assert_eq!(st.t_sub(), 0);
        assert!(st.halt_trace().is_empty());
        assert_eq!(st.total_cells(), 3 * 4 + 1);
    }

    #[test]
    fn pulse_transits_in_exactly_path_length() {
        // seed pulse amplitude 1 at t = 0 appears at the halt at t = 3
        let mut st = init(
            &two_node_line(3),
            EngineConfig { seed_freq: 0, packet_len: 1, sample_rate: 4 },
        )
        .unwrap();
        let trace = st.run_until(5).unwrap();
        let s = trace.grid().sample_rate() as usize;
        for (i, v) in trace.samples().iter().enumerate() {
            let expect = if (3 * s..4 * s).contains(&i) { 1.0 } else { 0.0 };
            assert_eq!(v.re, expect, "sample {i}");
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn seed_emits_exactly_packet_len_samples() {
        let mut st = init(
            &two_node_line(1),
            EngineConfig { seed_freq: 0, packet_len: 1, sample_rate: 8 },
        )
        .unwrap();
        let trace = st.run_until(3).unwrap();
        let live: usize = trace.samples().iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(live, 8);
    }

    #[test]
    fn all_zero_state_steps_to_zero() {
        let mut st = init(
            &two_node_line(2),
            EngineConfig { seed_freq: 0, packet_len: 0, sample_rate: 4 },
        )
        .unwrap();
        st.step();
        assert_eq!(st.halt_trace().len(), 1);
        assert_eq!(st.halt_trace()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn triangle_first_return_carries_single_shift() {
        // 0 (seedhalt) → {1,2} → 0, unit lengths, shifts ω = {1, 2}.
        // First return at t = 2 is the superposition of the seed tone
        // shifted once by node 1 and once by node 2.
        let net = Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::SeedThenHalt, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::Intermediate, op: WaveOp::Shift(1) },
                NodeSpec { id: 2, role: NodeRole::Intermediate, op: WaveOp::Shift(2) },
            ],
            vec![
                EdgeSpec { from: 0, to: 1, op: WaveOp::Identity, length: 1 },
                EdgeSpec { from: 0, to: 2, op: WaveOp::Identity, length: 1 },
                EdgeSpec { from: 1, to: 0, op: WaveOp::Identity, length: 1 },
                EdgeSpec { from: 2, to: 0, op: WaveOp::Identity, length: 1 },
                EdgeSpec { from: 1, to: 2, op: WaveOp::Identity, length: 1 },
                EdgeSpec { from: 2, to: 1, op: WaveOp::Identity, length: 1 },
            ],
        )
        .unwrap();
        let seed_freq = 3;
        let mut st = init(
            &net,
            EngineConfig { seed_freq, packet_len: 1, sample_rate: 64 },
        )
        .unwrap();
        let trace = st.run_until(3).unwrap();
        let tf = moving_dft(&trace, 1, 1).unwrap();
        // frame t=2: shifted-by-1 and shifted-by-2 copies, each passed one
        // intermediate with in-degree 2 → magnitude 1/2, recorded raw.
        let f2 = &tf.frames()[2];
        assert!((f2.magnitude(seed_freq + 1) - 0.5).abs() < 1e-9);
        assert!((f2.magnitude(seed_freq + 2) - 0.5).abs() < 1e-9);
        assert!(f2.magnitude(seed_freq) < 1e-9);
        // nothing returns before t=2
        assert!(tf.frames()[1].integer_bins().all(|(_, a)| a.norm() < 1e-12));
    }

    #[test]
    fn engine_matches_chain_evaluate_on_a_line() {
        // seed → mix node → shift node → halt with per-edge delays; the
        // chain form interleaves edge ops, delays and node ops.
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
        let t_max = 8;
        let mut st = init(
            &net,
            EngineConfig { seed_freq: 2, packet_len: 1, sample_rate: sr },
        )
        .unwrap();
        let fifo = st.run_until(t_max).unwrap();

        let ops = net.as_chain().unwrap();
        let grid = TimeGrid::new(sr, t_max, sr / 4).unwrap();
        let seed = Signal::packet(grid, 2, 0, 1).unwrap();
        let closed = chain_evaluate(&ops, &seed).unwrap();

        for (a, b) in fifo.samples().iter().zip(closed.samples()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn as_chain_rejects_branching_and_cycles() {
        let branching = Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::Seed, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::Halt, op: WaveOp::Identity },
                NodeSpec { id: 2, role: NodeRole::Halt, op: WaveOp::Identity },
            ],
            vec![
                EdgeSpec { from: 0, to: 1, op: WaveOp::Identity, length: 1 },
                EdgeSpec { from: 0, to: 2, op: WaveOp::Identity, length: 1 },
            ],
        )
        .unwrap();
        assert!(matches!(branching.as_chain(), Err(WaveError::NotAChain(_))));
    }

    #[test]
    fn network_structural_validation() {
        // halt with outgoing edge
        assert!(Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::Seed, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::Halt, op: WaveOp::Identity },
            ],
            vec![EdgeSpec { from: 1, to: 0, op: WaveOp::Identity, length: 1 }],
        )
        .is_err());
        // self-loop
        assert!(Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::Seed, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::Halt, op: WaveOp::Identity },
            ],
            vec![EdgeSpec { from: 0, to: 0, op: WaveOp::Identity, length: 1 }],
        )
        .is_err());
        // two seeds
        assert!(Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::Seed, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::SeedThenHalt, op: WaveOp::Identity },
            ],
            vec![],
        )
        .is_err());
    }

    #[test]
    fn determinism_bit_identical_traces() {
        let run = || {
            let mut st = init(
                &two_node_line(2),
                EngineConfig { seed_freq: 5, packet_len: 1, sample_rate: 32 },
            )
            .unwrap();
            st.run_until(4).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn shift_unitarity_no_amplification() {
        // complete K4 with shift nodes: no cell ever exceeds the seed amp
        let mut nodes = vec![NodeSpec {
            id: 0,
            role: NodeRole::SeedThenHalt,
            op: WaveOp::Identity,
        }];
        for j in 1..4 {
            nodes.push(NodeSpec {
                id: j,
                role: NodeRole::Intermediate,
                op: WaveOp::Shift(j as i64),
            });
        }
        let mut edges = Vec::new();
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    edges.push(EdgeSpec {
                        from: j,
                        to: k,
                        op: WaveOp::Identity,
                        length: 1 + ((j + k) % 3) as u32,
                    });
                }
            }
        }
        let net = Network::new(nodes, edges).unwrap();
        let mut st = init(
            &net,
            EngineConfig { seed_freq: 1, packet_len: 1, sample_rate: 32 },
        )
        .unwrap();
        for _ in 0..32 * 20 {
            st.step();
            let max = st
                .pipes
                .iter()
                .flat_map(|p| p.cells.iter())
                .map(|c| c.norm())
                .fold(0.0f64, f64::max);
            assert!(max <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn text_form_round_trip() {
        let net = Network::new(
            vec![
                NodeSpec { id: 0, role: NodeRole::SeedThenHalt, op: WaveOp::Identity },
                NodeSpec { id: 1, role: NodeRole::Intermediate, op: WaveOp::Shift(4) },
            ],
            vec![
                EdgeSpec { from: 0, to: 1, op: WaveOp::Identity, length: 5 },
                EdgeSpec { from: 1, to: 0, op: WaveOp::Identity, length: 5 },
            ],
        )
        .unwrap();
        let text = net.to_string();
        let back: Network = text.parse().unwrap();
        assert_eq!(text, back.to_string());
    }

    #[test]
    fn run_until_minimal() {
        let mut st = init(
            &two_node_line(1),
            EngineConfig { seed_freq: 0, packet_len: 0, sample_rate: 4 },
        )
        .unwrap();
        let sig = st.run_until(1).unwrap();
        assert_eq!(sig.samples().len(), 4);
        assert!(dft(&sig).unwrap().integer_bins().all(|(_, a)| a.norm() == 0.0));
    }
}
