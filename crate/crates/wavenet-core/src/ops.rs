//! The four signal operators — frequency mixing, frequency shifting,
//! frequency filtering, time delay — plus identity and branch-and-sum
//! composition.
//!
//! All operators are pure functions on immutable signals. Delays are
//! quantized to whole sample counts (callers pick sample rates that make
//! every delay an integer number of samples).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, WaveError};
use crate::signal::{cos_unit, phase_unit, Signal};

/// Frequency mask shapes. The mask acts on |ν| with inclusive boundaries
/// (Θ(0) = 1): a low-pass at ν_M keeps every bin with |ν| ≤ ν_M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterSpec {
    LowPass { nu_max: i64 },
    HighPass { nu_min: i64 },
    BandPass { nu_min: i64, nu_max: i64 },
}

/// One arm of a branch: a serial chain with a scalar gain (default 1,
/// matching an unweighted summer).
#[derive(Debug, Clone, PartialEq)]
pub struct BranchArm {
    pub ops: Vec<WaveOp>,
    pub gain: f64,
}

impl BranchArm {
    pub fn new(ops: Vec<WaveOp>) -> Self {
        Self { ops, gain: 1.0 }
    }
}

/// A wave operator applied by a node or an edge.
#[derive(Debug, Clone, PartialEq)]
pub enum WaveOp {
    Identity,
    /// Multiply by the internal tone cos(2πωt); every peak at ν splits
    /// into ν ± ω at half amplitude. ω ≥ 0 (cos is even).
    Mix(i64),
    /// Multiply by e^{i2πωt}; translates the whole spectrum by ω.
    /// Negative ω shifts downward.
    Shift(i64),
    /// Multiply the spectrum by a Θ-mask and transform back.
    Filter(FilterSpec),
    /// Delay by τ whole time-units, zero-filled at the front.
    Delay(u32),
    /// Sum of ≥ 2 sub-chains applied to the same input.
    Branch(Vec<BranchArm>),
}

impl WaveOp {
    /// Structural validation (apply() revalidates grid-dependent parts).
    pub fn validate(&self) -> Result<()> {
        match self {
            WaveOp::Mix(w) if *w < 0 => Err(WaveError::InvalidConfig(format!(
                "mix frequency must be ≥ 0, got {w}"
            ))),
            WaveOp::Filter(FilterSpec::BandPass { nu_min, nu_max }) if nu_min >= nu_max => {
                Err(WaveError::InvalidFilter(format!(
                    "band-pass requires ν_m < ν_M, got [{nu_min}, {nu_max}]"
                )))
            }
            WaveOp::Filter(FilterSpec::LowPass { nu_max }) if *nu_max < 0 => Err(
                WaveError::InvalidFilter(format!("low-pass bound must be ≥ 0, got {nu_max}")),
            ),
            WaveOp::Filter(FilterSpec::HighPass { nu_min }) if *nu_min < 0 => Err(
                WaveError::InvalidFilter(format!("high-pass bound must be ≥ 0, got {nu_min}")),
            ),
            WaveOp::Branch(arms) => {
                if arms.len() < 2 {
                    return Err(WaveError::InvalidConfig(
                        "branch needs at least 2 arms".into(),
                    ));
                }
                for arm in arms {
                    for op in &arm.ops {
                        op.validate()?;
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Applies one operator to a signal, producing a new signal on the same
/// grid. Finite-magnitude is enforced on the output.
pub fn apply(op: &WaveOp, input: &Signal) -> Result<Signal> {
    op.validate()?;
    let out = match op {
        WaveOp::Identity => input.clone(),
        WaveOp::Mix(w) => pointwise_real(input, |num, den| cos_unit(*w * num, den)),
        WaveOp::Shift(w) => pointwise_complex(input, |num, den| phase_unit(*w * num, den)),
        WaveOp::Delay(tau) => delay(input, *tau)?,
        WaveOp::Filter(spec) => filter(input, *spec)?,
        WaveOp::Branch(arms) => {
            let mut sum = Signal::zeros(*input.grid());
            for arm in arms {
                let arm_out = apply_chain(&arm.ops, input)?;
                for (acc, x) in sum.samples_mut().iter_mut().zip(arm_out.samples()) {
                    *acc += arm.gain * x;
                }
            }
            sum
        }
    };
    out.check_finite()?;
    Ok(out)
}

/// Left-to-right serial composition; equals nested `apply` calls exactly.
pub fn apply_chain(ops: &[WaveOp], input: &Signal) -> Result<Signal> {
    let mut sig = input.clone();
    for op in ops {
        sig = apply(op, &sig)?;
    }
    Ok(sig)
}

fn pointwise_real(input: &Signal, tone: impl Fn(i64, i64) -> f64) -> Signal {
    let grid = *input.grid();
    let sr = grid.sample_rate() as i64;
    let base = grid.origin() * sr;
    let samples = input
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| s * tone(base + i as i64, sr))
        .collect();
    Signal::from_parts_unchecked(grid, samples)
}

fn pointwise_complex(input: &Signal, tone: impl Fn(i64, i64) -> Complex64) -> Signal {
    let grid = *input.grid();
    let sr = grid.sample_rate() as i64;
    let base = grid.origin() * sr;
    let samples = input
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| s * tone(base + i as i64, sr))
        .collect();
    Signal::from_parts_unchecked(grid, samples)
}

fn delay(input: &Signal, tau: u32) -> Result<Signal> {
    let grid = *input.grid();
    let shift = tau as usize * grid.sample_rate() as usize;
    let n = grid.num_samples();
    if shift == 0 {
        return Ok(input.clone());
    }
    if shift > n {
        return Err(WaveError::GridOverflow { delay: tau as i64 });
    }
    // Content pushed off the grid end must be identically zero; solver
    // grids are budgeted so this never truncates a live packet.
    if input.samples()[n - shift..].iter().any(|s| s.re != 0.0 || s.im != 0.0) {
        return Err(WaveError::GridOverflow { delay: tau as i64 });
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    samples[shift..].copy_from_slice(&input.samples()[..n - shift]);
    Ok(Signal::from_parts_unchecked(grid, samples))
}

fn filter(input: &Signal, spec: FilterSpec) -> Result<Signal> {
    let grid = *input.grid();
    let nyquist = grid.sample_rate() as i64 / 2;
    let over = match spec {
        FilterSpec::LowPass { nu_max } => nu_max > nyquist,
        FilterSpec::HighPass { nu_min } => nu_min > nyquist,
        FilterSpec::BandPass { nu_min, nu_max } => nu_min > nyquist || nu_max > nyquist,
    };
    if over {
        return Err(WaveError::InvalidFilter(format!(
            "filter bound exceeds Nyquist {nyquist}"
        )));
    }

    let n = grid.num_samples();
    let mut buf: Vec<Complex64> = input.samples().to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    // Bin k holds frequency k/duration, wrapping to the negative side for
    // k ≥ n/2. Compare |k_signed| against bound·duration exactly.
    let dur = grid.duration() as i64;
    let ni = n as i64;
    for (k, b) in buf.iter_mut().enumerate() {
        let ks = if (k as i64) < ni - ni / 2 { k as i64 } else { k as i64 - ni };
        let a = ks.abs();
        let pass = match spec {
            FilterSpec::LowPass { nu_max } => a <= nu_max * dur,
            FilterSpec::HighPass { nu_min } => a >= nu_min * dur,
            FilterSpec::BandPass { nu_min, nu_max } => a >= nu_min * dur && a <= nu_max * dur,
        };
        if !pass {
            *b = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for b in buf.iter_mut() {
        *b *= scale;
    }
    Signal::new(grid, buf)
}

// ---------------------------------------------------------------------------
// Canonical text form, e.g. `mix(5)`, `shift(4)|delay(2)`,
// `branch(id; shift(4)|delay(2))`. Unit gains only.
// ---------------------------------------------------------------------------

impl fmt::Display for WaveOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveOp::Identity => write!(f, "id"),
            WaveOp::Mix(w) => write!(f, "mix({w})"),
            WaveOp::Shift(w) => write!(f, "shift({w})"),
            WaveOp::Delay(t) => write!(f, "delay({t})"),
            WaveOp::Filter(FilterSpec::LowPass { nu_max }) => write!(f, "lowpass({nu_max})"),
            WaveOp::Filter(FilterSpec::HighPass { nu_min }) => write!(f, "highpass({nu_min})"),
            WaveOp::Filter(FilterSpec::BandPass { nu_min, nu_max }) => {
                write!(f, "bandpass({nu_min},{nu_max})")
            }
            WaveOp::Branch(arms) => {
                write!(f, "branch(")?;
                for (i, arm) in arms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}", format_chain(&arm.ops))?;
                }
                write!(f, ")")
            }
        }
    }
}

/// `|`-joined chain; the empty chain prints as `id`.
pub fn format_chain(ops: &[WaveOp]) -> String {
    if ops.is_empty() {
        return "id".into();
    }
    ops.iter().map(|o| o.to_string()).collect::<Vec<_>>().join("|")
}

/// Parses a `|`-joined chain of ops.
pub fn parse_chain(s: &str) -> Result<Vec<WaveOp>> {
    split_top_level(s, '|')?.iter().map(|part| part.parse()).collect()
}

/// Splits on `sep` at paren depth zero.
fn split_top_level(s: &str, sep: char) -> Result<Vec<String>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(WaveError::Parse(format!("unbalanced parens in `{s}`")));
                }
                cur.push(c);
            }
            c if c == sep && depth == 0 => {
                parts.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(WaveError::Parse(format!("unbalanced parens in `{s}`")));
    }
    parts.push(cur.trim().to_string());
    Ok(parts)
}

impl FromStr for WaveOp {
    type Err = WaveError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "id" {
            return Ok(WaveOp::Identity);
        }
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| WaveError::Parse(format!("unrecognized op `{s}`")))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| WaveError::Parse(format!("missing `)` in `{s}`")))?;
        let int = |a: &str| -> Result<i64> {
            a.trim()
                .parse()
                .map_err(|_| WaveError::Parse(format!("bad integer `{a}` in `{s}`")))
        };
        let op = match name.trim() {
            "mix" => WaveOp::Mix(int(args)?),
            "shift" => WaveOp::Shift(int(args)?),
            "delay" => {
                let t = int(args)?;
                if t < 0 {
                    return Err(WaveError::Parse(format!("negative delay in `{s}`")));
                }
                WaveOp::Delay(t as u32)
            }
            "lowpass" => WaveOp::Filter(FilterSpec::LowPass { nu_max: int(args)? }),
            "highpass" => WaveOp::Filter(FilterSpec::HighPass { nu_min: int(args)? }),
            "bandpass" => {
                let (a, b) = args
                    .split_once(',')
                    .ok_or_else(|| WaveError::Parse(format!("bandpass needs 2 args in `{s}`")))?;
                WaveOp::Filter(FilterSpec::BandPass { nu_min: int(a)?, nu_max: int(b)? })
            }
            "branch" => {
                let arms = split_top_level(args, ';')?
                    .iter()
                    .map(|arm| Ok(BranchArm::new(parse_chain(arm)?)))
                    .collect::<Result<Vec<_>>>()?;
                WaveOp::Branch(arms)
            }
            other => return Err(WaveError::Parse(format!("unrecognized op `{other}`"))),
        };
        op.validate()?;
        Ok(op)
    }
}
