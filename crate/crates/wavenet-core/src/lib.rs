//! Discrete-time simulation of wave-based dynamical networks — nodes and
//! edges that mix, shift, filter and delay signals — plus solver front-ends
//! that encode the Number Partitioning Problem, the 0/1 Knapsack Problem and
//! the Traveling Salesman Problem into spectral-peak and arrival-time
//! readouts, cross-checked by independent classical oracles.
//!
//! Layering:
//!
//! - [`signal`]: time grids, complex signals, exact-bin DFTs, peak detection
//! - [`ops`]: the wave operators (mix / shift / filter / delay / branch)
//! - [`network`]: graph networks and the FIFO propagation engine
//! - [`npp`], [`kp`], [`tsp`]: the three solver encodings and their decoders
//! - [`oracle`]: brute-force / DP / Held-Karp verification solvers
//! - [`instance`], [`run`]: instance files, orchestration, reports

pub mod error;
pub mod instance;
pub mod kp;
pub mod network;
pub mod npp;
pub mod oracle;
pub mod ops;
pub mod run;
pub mod signal;
pub mod tsp;

pub use error::{Result, WaveError};
pub use signal::{Peak, Signal, Spectrum, TimeFreqMap, TimeGrid};
