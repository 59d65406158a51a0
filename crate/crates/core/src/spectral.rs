//! Periodograms, Fourier-projection amplitudes, first-order high-pass fits and
//! log-log spectral slopes.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::emd::{extract_imf_observed, SiftConfig};
use crate::error::{Error, Result};
use crate::signal::Signal;

/// One-sided power spectrum on angular frequencies `2πj / (n·dt)`,
/// `j = 0..=n/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub bin_width: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub bin: usize,
    pub omega: f64,
    /// Power relative to the largest non-DC bin.
    pub relative_power: f64,
}

impl Spectrum {
    pub fn dt(&self) -> f64 {
        2.0 * PI / (self.n_samples as f64 * self.bin_width)
    }

    /// Time-domain energy `Σ x²` of the mean-removed input, recovered from the
    /// one-sided power by Parseval's identity.
    pub fn energy(&self) -> f64 {
        let n = self.n_samples;
        let last = self.power.len() - 1;
        let weighted: f64 = self
            .power
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let single = j == 0 || (n % 2 == 0 && j == last);
                if single {
                    *p
                } else {
                    2.0 * p
                }
            })
            .sum();
        weighted / self.dt()
    }

    /// Strongest bin above DC.
    pub fn peak_bin(&self) -> usize {
        (1..self.power.len())
            .max_by(|&a, &b| self.power[a].total_cmp(&self.power[b]))
            .unwrap_or(0)
    }

    pub fn peak_frequency(&self) -> f64 {
        self.frequencies[self.peak_bin()]
    }

    /// Local maxima above DC whose power is at least `rel_threshold` times the
    /// strongest bin.
    pub fn peaks(&self, rel_threshold: f64) -> Vec<Peak> {
        let p = &self.power;
        let top = p[self.peak_bin()];
        if !(top > 0.0) {
            return Vec::new();
        }
        (1..p.len())
            .filter(|&j| {
                let left = p[j - 1];
                let right = p.get(j + 1).copied().unwrap_or(f64::NEG_INFINITY);
                p[j] > left && p[j] >= right && p[j] >= rel_threshold * top
            })
            .map(|j| Peak {
                bin: j,
                omega: self.frequencies[j],
                relative_power: p[j] / top,
            })
            .collect()
    }

    /// Peaks matching none of `tones` to within one bin.
    pub fn ghost_peaks(&self, tones: &[f64], rel_threshold: f64) -> Vec<Peak> {
        self.peaks(rel_threshold)
            .into_iter()
            .filter(|pk| !tones.iter().any(|w| (pk.omega - w).abs() <= self.bin_width))
            .collect()
    }

    /// Power in the bin nearest `omega`.
    pub fn power_at(&self, omega: f64) -> f64 {
        let j = (omega / self.bin_width).round().max(0.0) as usize;
        self.power[j.min(self.power.len() - 1)]
    }
}

/// Rectangular-window periodogram of the mean-removed signal,
/// `power[j] = |DFT_j|² · dt / n`.
pub fn periodogram(signal: &Signal) -> Spectrum {
    let n = signal.len();
    let dt = signal.dt();
    let mean = signal.samples().iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = signal
        .samples()
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bins = n / 2 + 1;
    let bin_width = 2.0 * PI / (n as f64 * dt);
    Spectrum {
        frequencies: (0..bins).map(|j| j as f64 * bin_width).collect(),
        power: buf[..bins].iter().map(|c| c.norm_sqr() * dt / n as f64).collect(),
        bin_width,
        n_samples: n,
    }
}

/// Cosine and sine projections of a signal onto two probe frequencies over
/// one period, and the resulting amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionAmplitudes {
    /// `sqrt(a² + b²)`, amplitude at the first probe.
    pub amplitude_a: f64,
    /// `sqrt(c² + d²)`, amplitude at the second probe.
    pub amplitude_b: f64,
    /// `[a, b, c, d]`: ∫h·cos(ωa t), ∫h·sin(ωa t), ∫h·cos(ωb t), ∫h·sin(ωb t).
    pub components: [f64; 4],
}

impl ProjectionAmplitudes {
    pub fn ratio(&self) -> f64 {
        self.amplitude_b / self.amplitude_a
    }
}

/// Trapezoidal projections of `h` over `[t0, t0 + period]`.
pub fn project_fourier(h: &Signal, omega_a: f64, omega_b: f64, period: f64) -> Result<ProjectionAmplitudes> {
    if !(period > 0.0) {
        return Err(Error::invalid(format!("period must be positive, got {period}")));
    }
    let dt = h.dt();
    let steps = (period / dt).round();
    if (steps * dt - period).abs() > 1e-9 * period || steps < 1.0 {
        return Err(Error::invalid(format!(
            "period {period} is not a whole number of sample steps ({dt})"
        )));
    }
    let steps = steps as usize;
    if h.len() < steps + 1 {
        return Err(Error::invalid(format!(
            "signal spans {} but one period is {period}",
            h.t_end() - h.t0()
        )));
    }
    let mut sums = [0.0f64; 4];
    for (k, &v) in h.samples()[..=steps].iter().enumerate() {
        let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let t = h.time(k);
        let (sa, ca) = (omega_a * t).sin_cos();
        let (sb, cb) = (omega_b * t).sin_cos();
        let w = weight * v * dt;
        sums[0] += w * ca;
        sums[1] += w * sa;
        sums[2] += w * cb;
        sums[3] += w * sb;
    }
    Ok(ProjectionAmplitudes {
        amplitude_a: sums[0].hypot(sums[1]),
        amplitude_b: sums[2].hypot(sums[3]),
        components: sums,
    })
}

/// Least-squares `α` for the first-order high-pass recurrence
/// `Y[n] = α·Y[n-1] + α·(X[n] - X[n-1])`: `α = Σ Y·Z / Σ Z²` with
/// `Z[n] = Y[n-1] + X[n] - X[n-1]`. Returns 0 for an all-zero output.
pub fn estimate_alpha(input: &[f64], output: &[f64]) -> Result<f64> {
    let (alpha, _) = fit_alpha(input, output)?;
    Ok(alpha)
}

fn fit_alpha(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::invalid("input and output lengths differ"));
    }
    if x.len() < 3 {
        return Err(Error::invalid("need at least 3 samples to fit a filter"));
    }
    if y.iter().all(|&v| v == 0.0) {
        return Ok((0.0, 0.0));
    }
    let mut yz = 0.0;
    let mut zz = 0.0;
    for n in 1..x.len() {
        let z = y[n - 1] + x[n] - x[n - 1];
        yz += y[n] * z;
        zz += z * z;
    }
    if zz == 0.0 {
        return Err(Error::DegenerateFit("regressor is identically zero".into()));
    }
    let alpha = yz / zz;
    let sq: f64 = (1..x.len())
        .map(|n| {
            let z = y[n - 1] + x[n] - x[n - 1];
            (y[n] - alpha * z).powi(2)
        })
        .sum();
    Ok((alpha, (sq / (x.len() - 1) as f64).sqrt()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FilterFit {
    pub alphas: Vec<f64>,
    /// RMS misfit of the recurrence at each iteration.
    pub residuals: Vec<f64>,
}

/// `α` per sifting iteration while extracting the first IMF of `signal`,
/// treating each pass's input and output as the filter's `X` and `Y`.
pub fn filter_fit(signal: &Signal, config: &SiftConfig) -> Result<FilterFit> {
    let mut fit = FilterFit::default();
    let mut failure = None;
    extract_imf_observed(signal, config, |before, after| {
        if failure.is_some() {
            return;
        }
        match fit_alpha(before.samples(), after.samples()) {
            Ok((a, r)) => {
                fit.alphas.push(a);
                fit.residuals.push(r);
            }
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(fit),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub band: (f64, f64),
    pub r_squared: f64,
    pub bins_used: usize,
}

/// Ordinary least squares of `ln(power)` on `ln(frequency)` over the bins in
/// `[f_lo, f_hi]` with positive frequency and power.
pub fn fit_spectral_slope(spectrum: &Spectrum, f_lo: f64, f_hi: f64) -> Result<SlopeFit> {
    if !(f_lo < f_hi) {
        return Err(Error::invalid(format!("empty band [{f_lo}, {f_hi}]")));
    }
    let pts: Vec<(f64, f64)> = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.power)
        .filter(|(f, p)| **f >= f_lo && **f <= f_hi && **f > 0.0 && **p > 0.0)
        .map(|(f, p)| (f.ln(), p.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::invalid(format!(
            "only {} usable bins in [{f_lo}, {f_hi}], need 4",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        band: (f_lo, f_hi),
        r_squared,
        bins_used: pts.len(),
    })
}
