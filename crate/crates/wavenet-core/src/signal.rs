//! Time grids, sampled complex signals, exact-bin DFTs, windowed (moving)
//! Fourier transforms and spectral peak detection.
//!
//! Frequencies are integers in abstract frequency-units and all windows are
//! integer numbers of time-units, so every integer-frequency tone occupies
//! exactly one DFT bin (zero leakage). The forward transform is normalized by
//! the window sample count: a unit complex exponential at integer frequency f
//! yields |bin(f)| = 1, and a unit cosine yields 0.5 at ±f.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, WaveError};

/// e^{i·2π·num/den} evaluated with the angle reduced in exact integer
/// arithmetic, so phases never drift no matter how large num gets.
pub(crate) fn phase_unit(num: i64, den: i64) -> Complex64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, std::f64::consts::TAU * r as f64 / den as f64)
}

/// cos(2π·num/den) with the same exact reduction.
pub(crate) fn cos_unit(num: i64, den: i64) -> f64 {
    let r = num.rem_euclid(den);
    (std::f64::consts::TAU * r as f64 / den as f64).cos()
}

/// A uniform sampling grid: `sample_rate` samples per time-unit over
/// `duration` time-units, starting at integer time `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    sample_rate: u32,
    duration: u32,
    origin: i64,
}

impl TimeGrid {
    /// Builds a grid, rejecting sample rates below 4× the caller's maximum
    /// possible content frequency (Nyquist with a 2× margin).
    pub fn new(sample_rate: u32, duration: u32, f_max: u32) -> Result<Self> {
        if sample_rate == 0 || duration == 0 {
            return Err(WaveError::InvalidSignal(
                "sample_rate and duration must be positive".into(),
            ));
        }
        if (sample_rate as u64) < 4 * f_max as u64 {
            return Err(WaveError::InvalidConfig(format!(
                "sample_rate {sample_rate} < 4 × f_max {f_max}"
            )));
        }
        Ok(Self { sample_rate, duration, origin: 0 })
    }

    pub fn with_origin(mut self, origin: i64) -> Self {
        self.origin = origin;
        self
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn duration(&self) -> u32 {
        self.duration
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn num_samples(&self) -> usize {
        self.sample_rate as usize * self.duration as usize
    }

    /// Absolute time of sample `idx` in time-units.
    pub fn time_at(&self, idx: usize) -> f64 {
        self.origin as f64 + idx as f64 / self.sample_rate as f64
    }
}

/// A sampled complex-valued time series on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.num_samples() {
            return Err(WaveError::InvalidSignal(format!(
                "expected {} samples, got {}",
                grid.num_samples(),
                samples.len()
            )));
        }
        let sig = Self { grid, samples };
        sig.check_finite()?;
        Ok(sig)
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        let n = grid.num_samples();
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Continual complex tone e^{i·2π·freq·t} over the whole grid.
    pub fn tone(grid: TimeGrid, freq: i64) -> Self {
        let sr = grid.sample_rate() as i64;
        let samples = (0..grid.num_samples())
            .map(|i| phase_unit(freq * (grid.origin() * sr + i as i64), sr))
            .collect();
        Self { grid, samples }
    }

    /// Continual real cosine cos(2π·freq·t) over the whole grid.
    pub fn cosine(grid: TimeGrid, freq: i64) -> Self {
        let sr = grid.sample_rate() as i64;
        let samples = (0..grid.num_samples())
            .map(|i| Complex64::new(cos_unit(freq * (grid.origin() * sr + i as i64), sr), 0.0))
            .collect();
        Self { grid, samples }
    }

    /// Rectangular wave packet: e^{i·2π·freq·t} for t ∈ [start, start+len)
    /// (grid-relative time-units), zero elsewhere.
    pub fn packet(grid: TimeGrid, freq: i64, start: u32, len: u32) -> Result<Self> {
        if start + len > grid.duration() {
            return Err(WaveError::WindowOutOfRange {
                start: start as i64,
                end: (start + len) as i64,
                duration: grid.duration() as i64,
            });
        }
        let sr = grid.sample_rate() as i64;
        let lo = start as usize * sr as usize;
        let hi = (start + len) as usize * sr as usize;
        let mut samples = vec![Complex64::new(0.0, 0.0); grid.num_samples()];
        for (i, s) in samples.iter_mut().enumerate().take(hi).skip(lo) {
            *s = phase_unit(freq * (grid.origin() * sr + i as i64), sr);
        }
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub(crate) fn samples_mut(&mut self) -> &mut Vec<Complex64> {
        &mut self.samples
    }

    pub(crate) fn from_parts_unchecked(grid: TimeGrid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.num_samples());
        Self { grid, samples }
    }

    /// All sample magnitudes must stay finite after every operator.
    pub fn check_finite(&self) -> Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            if !s.re.is_finite() || !s.im.is_finite() {
                return Err(WaveError::InvalidSignal(format!(
                    "non-finite sample at index {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Frequency → complex-amplitude map over one transform window.
///
/// Internally holds all `window_len · sample_rate` DFT bins (spacing
/// 1/window_len); integer-frequency accessors are the primary read path,
/// the full bin set backs leakage checks.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Natural DFT order: index k holds frequency k/window_len, with
    /// k ≥ n/2 wrapping to the negative side.
    bins: Vec<Complex64>,
    window_start: i64,
    window_len: u32,
    sample_rate: u32,
}

impl Spectrum {
    pub fn window_start(&self) -> i64 {
        self.window_start
    }

    pub fn window_len(&self) -> u32 {
        self.window_len
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    fn signed_k_range(&self) -> (i64, i64) {
        let n = self.bins.len() as i64;
        (-(n / 2), n - n / 2) // [-n/2, n/2) signed bin indices
    }

    /// Lowest and highest representable integer frequencies.
    pub fn freq_range(&self) -> (i64, i64) {
        let (klo, khi) = self.signed_k_range();
        let wl = self.window_len as i64;
        // integer f with klo <= f*wl < khi
        (klo.div_euclid(wl) + i64::from(klo.rem_euclid(wl) != 0), (khi - 1).div_euclid(wl))
    }

    /// Complex amplitude at integer frequency `freq`, or None outside
    /// [−sample_rate/2, sample_rate/2).
    pub fn bin(&self, freq: i64) -> Option<Complex64> {
        let k = freq * self.window_len as i64;
        let (klo, khi) = self.signed_k_range();
        if k < klo || k >= khi {
            return None;
        }
        let n = self.bins.len() as i64;
        Some(self.bins[k.rem_euclid(n) as usize])
    }

    /// Magnitude at integer frequency `freq` (0 outside range).
    pub fn magnitude(&self, freq: i64) -> f64 {
        self.bin(freq).map_or(0.0, |c| c.norm())
    }

    /// All integer-frequency bins, ascending by frequency.
    pub fn integer_bins(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let (lo, hi) = self.freq_range();
        (lo..=hi).map(move |f| (f, self.bin(f).unwrap()))
    }

    /// Every DFT bin as (frequency, amplitude), ascending by frequency.
    /// Frequencies off the integer lattice appear at multiples of
    /// 1/window_len; used by leakage checks.
    pub fn raw_bins(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        let (klo, khi) = self.signed_k_range();
        let n = self.bins.len() as i64;
        let wl = self.window_len as f64;
        (klo..khi).map(move |k| (k as f64 / wl, self.bins[k.rem_euclid(n) as usize]))
    }
}

/// A detected spectral peak.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Peak {
    pub freq: i64,
    pub magnitude: f64,
    pub window_start: i64,
}

/// Ordered windowed spectra, one per window position.
#[derive(Debug, Clone)]
pub struct TimeFreqMap {
    frames: Vec<Spectrum>,
    stride: u32,
}

impl TimeFreqMap {
    pub fn frames(&self) -> &[Spectrum] {
        &self.frames
    }

    pub fn stride(&self) -> u32 {
        self.stride
    }

    /// Peaks of every frame above `threshold`, ordered by
    /// (window_start, freq).
    pub fn peaks(&self, threshold: f64) -> Vec<Peak> {
        self.frames
            .iter()
            .flat_map(|frame| detect_peaks(frame, threshold))
            .collect()
    }
}

/// CSV with header `window_start,freq,magnitude`, rows sorted by
/// (window_start, freq), magnitudes printed with 9 significant digits.
pub fn peaks_to_csv(peaks: &[Peak]) -> String {
    let mut rows: Vec<&Peak> = peaks.iter().collect();
    rows.sort_by_key(|p| (p.window_start, p.freq));
    let mut out = String::from("window_start,freq,magnitude\n");
    for p in rows {
        out.push_str(&format!("{},{},{:.8e}\n", p.window_start, p.freq, p.magnitude));
    }
    out
}

/// Full-window DFT of the whole signal.
pub fn dft(signal: &Signal) -> Result<Spectrum> {
    windowed_dft(signal, 0, signal.grid().duration())
}

/// DFT restricted to [window_start, window_start+window_len) (grid-relative
/// time-units). Bin phases are referenced to absolute time, so a windowed
/// transform over the full grid equals `dft` exactly.
pub fn windowed_dft(signal: &Signal, window_start: i64, window_len: u32) -> Result<Spectrum> {
    let grid = signal.grid();
    let n = window_len as usize * grid.sample_rate() as usize;
    if n == 0 {
        return Err(WaveError::InvalidSignal("empty transform window".into()));
    }
    let end = window_start + window_len as i64;
    if window_start < 0 || end > grid.duration() as i64 {
        return Err(WaveError::WindowOutOfRange {
            start: window_start,
            end,
            duration: grid.duration() as i64,
        });
    }
    let sr = grid.sample_rate() as usize;
    let lo = window_start as usize * sr;
    let mut buf: Vec<Complex64> = signal.samples()[lo..lo + n].to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    // Normalize by the sample count and re-reference phases to absolute
    // time t0 = origin + window_start: bin(f) ← bin(f)·e^{-i2πf·t0}.
    let t0 = grid.origin() + window_start;
    let wl = window_len as i64;
    let scale = 1.0 / n as f64;
    for (k, b) in buf.iter_mut().enumerate() {
        *b *= scale * phase_unit(-(k as i64) * t0, wl);
    }
    Ok(Spectrum {
        bins: buf,
        window_start,
        window_len,
        sample_rate: grid.sample_rate(),
    })
}

/// Windowed DFTs at window starts 0, stride, 2·stride, … as long as the
/// window fits in the grid.
pub fn moving_dft(signal: &Signal, window_len: u32, stride: u32) -> Result<TimeFreqMap> {
    if stride == 0 || window_len == 0 {
        return Err(WaveError::InvalidSignal(
            "window_len and stride must be ≥ 1".into(),
        ));
    }
    let mut frames = Vec::new();
    let mut ws = 0u32;
    while ws + window_len <= signal.grid().duration() {
        frames.push(windowed_dft(signal, ws as i64, window_len)?);
        ws += stride;
    }
    Ok(TimeFreqMap { frames, stride })
}

/// All integer-frequency bins with magnitude ≥ threshold, ascending by
/// frequency. Deterministic.
pub fn detect_peaks(spectrum: &Spectrum, threshold: f64) -> Vec<Peak> {
    spectrum
        .integer_bins()
        .filter(|(_, amp)| amp.norm() >= threshold)
        .map(|(freq, amp)| Peak {
            freq,
            magnitude: amp.norm(),
            window_start: spectrum.window_start(),
        })
        .collect()
}

/// Minimum nonnegative frequency among the peaks.
pub fn lowest_nonneg_peak(peaks: &[Peak]) -> Result<i64> {
    peaks
        .iter()
        .filter(|p| p.freq >= 0)
        .map(|p| p.freq)
        .min()
        .ok_or_else(|| WaveError::NoPeakFound("no nonnegative peak".into()))
}
