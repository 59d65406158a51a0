//! Uniformly sampled signals, synthetic generators and CSV ingestion.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on sample spacing when reading a time column.
pub const GRID_TOLERANCE: f64 = 1e-6;

/// A real-valued series on the grid `t0 + k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    t0: f64,
    dt: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, t0: f64, dt: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid(format!(
                "a signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(format!("sample spacing must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("start time must be finite"));
        }
        Ok(Signal { samples, t0, dt })
    }

    /// Same grid, new values.
    ///
    /// # Panics
    /// If `samples` has a different length than `self`.
    pub fn with_samples(&self, samples: Vec<f64>) -> Signal {
        assert_eq!(samples.len(), self.samples.len(), "sample count must match grid");
        Signal {
            samples,
            t0: self.t0,
            dt: self.dt,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|k| self.time(k)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn rms(&self) -> f64 {
        rms(&self.samples)
    }

    /// Linear interpolation at an arbitrary time, clamped to the grid ends.
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.samples.len();
        let x = (t - self.t0) / self.dt;
        if x <= 0.0 {
            return self.samples[0];
        }
        if x >= (n - 1) as f64 {
            return self.samples[n - 1];
        }
        let k = (x.floor() as usize).min(n - 2);
        let frac = x - k as f64;
        self.samples[k] + frac * (self.samples[k + 1] - self.samples[k])
    }

    /// Sample-wise difference `self - other` on a shared grid.
    pub fn sub(&self, other: &[f64]) -> Signal {
        let samples = self.samples.iter().zip(other).map(|(a, b)| a - b).collect();
        self.with_samples(samples)
    }
}

pub(crate) fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// One cosine component `amplitude * cos(omega * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneSpec {
    pub amplitude: f64,
    /// Angular frequency in radians per time unit.
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

impl ToneSpec {
    pub fn new(amplitude: f64, omega: f64) -> Self {
        ToneSpec {
            amplitude,
            omega,
            phase: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

pub fn generate_multitone(tones: &[ToneSpec], t0: f64, dt: f64, n: usize) -> Result<Signal> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 samples, got {n}")));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("sample spacing must be positive, got {dt}")));
    }
    if let Some(bad) = tones.iter().find(|t| !t.omega.is_finite() || t.omega < 0.0) {
        return Err(Error::invalid(format!(
            "tone frequency must be finite and non-negative, got {}",
            bad.omega
        )));
    }
    let samples = (0..n)
        .map(|k| {
            let t = t0 + k as f64 * dt;
            tones
                .iter()
                .map(|tone| tone.amplitude * (tone.omega * t + tone.phase).cos())
                .sum()
        })
        .collect();
    Signal::new(samples, t0, dt)
}

/// Adds seeded zero-mean Gaussian noise. The generator is ChaCha8, so a given
/// `(sigma, seed)` yields the same sequence on every platform.
pub fn add_noise(signal: &Signal, noise: NoiseSpec) -> Result<Signal> {
    if noise.sigma == 0.0 {
        return Ok(signal.clone());
    }
    let normal = Normal::new(0.0, noise.sigma)
        .map_err(|e| Error::invalid(format!("noise sigma {}: {e}", noise.sigma)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = signal
        .samples
        .iter()
        .map(|v| v + normal.sample(&mut rng))
        .collect();
    Ok(signal.with_samples(samples))
}

pub fn detrend_mean(signal: &Signal) -> (Signal, f64) {
    let n = signal.len() as f64;
    let mean = signal.samples.iter().sum::<f64>() / n;
    let samples = signal.samples.iter().map(|v| v - mean).collect();
    (signal.with_samples(samples), mean)
}

/// Random-phase signal whose periodogram follows `power ∝ omega^slope` exactly
/// on every Fourier bin strictly between DC and Nyquist. `rms` sets the
/// overall level.
pub fn generate_power_law(slope: f64, rms_level: f64, t0: f64, dt: f64, n: usize, seed: u64) -> Result<Signal> {
    if n < 4 {
        return Err(Error::invalid(format!("need at least 4 samples, got {n}")));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("sample spacing must be positive, got {dt}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    let top = (n - 1) / 2;
    for j in 1..=top {
        let omega = 2.0 * PI * j as f64 / (n as f64 * dt);
        let amp = omega.powf(slope / 2.0);
        let phase = rng.random::<f64>() * 2.0 * PI;
        let c = Complex::from_polar(amp, phase);
        spectrum[j] = c;
        spectrum[n - j] = c.conj();
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    let mut samples: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let level = rms(&samples);
    if level > 0.0 {
        let scale = rms_level / level;
        samples.iter_mut().for_each(|v| *v *= scale);
    }
    Signal::new(samples, t0, dt)
}

/// Reads a two-column `time,value` file. A non-numeric first row is taken as
/// a header and `#` lines are skipped.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file)
}

pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Signal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::format(line, e.to_string())
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::format(
                line,
                format!("expected 2 columns (time,value), found {}", record.len()),
            ));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(t), Ok(v)) if t.is_finite() && v.is_finite() => {
                times.push((t, line));
                values.push(v);
            }
            _ if times.is_empty() && i == 0 => continue, // header
            _ => {
                return Err(Error::format(
                    line,
                    format!("cannot parse `{},{}` as numbers", &record[0], &record[1]),
                ))
            }
        }
    }

    if times.is_empty() {
        return Err(Error::format(0, "no samples"));
    }
    if times.len() < 2 {
        return Err(Error::format(times[0].1, "need at least 2 samples"));
    }
    let step = times[1].0 - times[0].0;
    if !(step > 0.0) {
        return Err(Error::format(
            times[1].1,
            "times must be strictly increasing (row 2)",
        ));
    }
    for (row, pair) in times.windows(2).enumerate() {
        let spacing = pair[1].0 - pair[0].0;
        if (spacing - step).abs() > GRID_TOLERANCE * step {
            return Err(Error::format(
                pair[1].1,
                format!(
                    "non-uniform time grid at row {}: spacing {spacing} differs from {step}",
                    row + 2
                ),
            ));
        }
    }
    let n = times.len();
    let t0 = times[0].0;
    let dt = (times[n - 1].0 - t0) / (n - 1) as f64;
    Signal::new(values, t0, dt)
}

pub fn save_csv(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    save_columns(path, "time,value", signal.times().into_iter().zip(signal.samples().iter().copied()))
}

/// Writes `header` followed by one `a,b` row per pair, 17 significant digits.
pub fn save_columns(
    path: impl AsRef<Path>,
    header: &str,
    rows: impl IntoIterator<Item = (f64, f64)>,
) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(out, "{header}").map_err(io_err)?;
    for (a, b) in rows {
        writeln!(out, "{a:.16e},{b:.16e}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
