//! The sifting loop and the outer IMF extraction loop.

use serde::{Deserialize, Serialize};

use crate::envelope::{
    classical_sifting_curve, find_extrema_for, hybrid_sifting_curve, midpoint_sifting_curve, Boundary,
    SiftingCurve,
};
use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Mean of the upper and lower cubic-spline envelopes.
    Classical,
    /// Spline through the signal at midpoints between consecutive extrema.
    #[default]
    Midpoint,
    /// Average of the two curves above.
    Hybrid,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Classical, Strategy::Midpoint, Strategy::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Classical => "classical",
            Strategy::Midpoint => "midpoint",
            Strategy::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Strategy::Classical),
            "midpoint" => Ok(Strategy::Midpoint),
            "hybrid" => Ok(Strategy::Hybrid),
            other => Err(Error::invalid(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// `sqrt(mean(d²))`
    #[default]
    Rms,
    /// `max |d|`
    Sup,
}

impl Norm {
    pub fn of(self, values: &[f64]) -> f64 {
        match self {
            Norm::Rms => crate::signal::rms(values),
            Norm::Sup => values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }
}

/// How `epsilon` is interpreted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonScale {
    /// Multiplied by the norm of the remainder entering each IMF extraction.
    #[default]
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SiftConfig {
    pub strategy: Strategy,
    pub epsilon: f64,
    pub epsilon_scale: EpsilonScale,
    pub norm: Norm,
    pub max_sift_iterations: usize,
    pub max_imfs: usize,
    pub boundary: Boundary,
}

impl Default for SiftConfig {
    fn default() -> Self {
        SiftConfig {
            strategy: Strategy::Midpoint,
            epsilon: 1e-3,
            epsilon_scale: EpsilonScale::Relative,
            norm: Norm::Rms,
            max_sift_iterations: 200,
            max_imfs: 12,
            boundary: Boundary::Mirror,
        }
    }
}

impl SiftConfig {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_sift_iterations == 0 {
            return Err(Error::invalid("max_sift_iterations must be at least 1"));
        }
        if self.max_imfs == 0 {
            return Err(Error::invalid("max_imfs must be at least 1"));
        }
        Ok(())
    }

    /// Absolute stopping threshold for an extraction starting from `h`.
    pub fn threshold_for(&self, h: &[f64]) -> f64 {
        match self.epsilon_scale {
            EpsilonScale::Absolute => self.epsilon,
            EpsilonScale::Relative => self.epsilon * self.norm.of(h),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Imf {
    pub samples: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub strategy: Strategy,
    /// Absolute threshold the trace was compared against.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub imfs: Vec<Imf>,
    pub residual: Signal,
    /// Per IMF, the norm of `h_i - h_{i+1}` at every sifting iteration.
    pub traces: Vec<Vec<f64>>,
}

impl Decomposition {
    /// Sum of all IMFs and the residual.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.samples().to_vec();
        for imf in &self.imfs {
            out.iter_mut().zip(&imf.samples).for_each(|(o, v)| *o += v);
        }
        out
    }

    pub fn imf_signal(&self, i: usize) -> Signal {
        self.residual.with_samples(self.imfs[i].samples.clone())
    }
}

pub fn sifting_curve(h: &Signal, strategy: Strategy, boundary: Boundary) -> Result<SiftingCurve> {
    let extrema = find_extrema_for(h, boundary);
    match strategy {
        Strategy::Classical => classical_sifting_curve(h, &extrema, boundary),
        Strategy::Midpoint => midpoint_sifting_curve(h, &extrema, boundary),
        Strategy::Hybrid => hybrid_sifting_curve(h, &extrema, boundary),
    }
}

/// One sifting pass: `h_next = h - curve`.
pub fn sift_once(h: &Signal, strategy: Strategy, boundary: Boundary) -> Result<(Signal, SiftingCurve)> {
    let curve = sifting_curve(h, strategy, boundary)?;
    Ok((h.sub(&curve.values), curve))
}

/// Sifts `h` until the per-pass change drops below the threshold, returning
/// the IMF and the change trace.
pub fn extract_imf(h: &Signal, config: &SiftConfig) -> Result<(Imf, Vec<f64>)> {
    extract_imf_observed(h, config, |_, _| {})
}

/// As [`extract_imf`], calling `observe(before, after)` after every pass.
pub fn extract_imf_observed<F>(h: &Signal, config: &SiftConfig, mut observe: F) -> Result<(Imf, Vec<f64>)>
where
    F: FnMut(&Signal, &Signal),
{
    config.validate()?;
    let threshold = config.threshold_for(h.samples());
    let mut current = h.clone();
    let mut trace = Vec::new();
    let mut converged = false;

    while trace.len() < config.max_sift_iterations {
        let (next, curve) = match sift_once(&current, config.strategy, config.boundary) {
            Ok(step) => step,
            // Entering with too few extrema means there is no IMF to extract.
            Err(e) if e.is_residual() && trace.is_empty() => return Err(e),
            // Extrema vanished mid-sift; keep what we have.
            Err(e) if e.is_residual() => break,
            Err(e) => return Err(e),
        };
        let change = config.norm.of(&curve.values);
        observe(&current, &next);
        trace.push(change);
        current = next;
        if change < threshold {
            converged = true;
            break;
        }
    }

    let imf = Imf {
        samples: current.into_samples(),
        iterations_used: trace.len(),
        converged,
        strategy: config.strategy,
        threshold,
    };
    Ok((imf, trace))
}

/// Extracts IMFs from the running remainder until it has too few extrema or
/// `max_imfs` is reached.
pub fn decompose(signal: &Signal, config: &SiftConfig) -> Result<Decomposition> {
    config.validate()?;
    let mut remainder = signal.clone();
    let mut imfs = Vec::new();
    let mut traces = Vec::new();

    if signal.len() >= 4 {
        while imfs.len() < config.max_imfs {
            let (imf, trace) = match extract_imf(&remainder, config) {
                Ok(out) => out,
                Err(e) if e.is_residual() => break,
                Err(e) => return Err(e),
            };
            remainder = remainder.sub(&imf.samples);
            imfs.push(imf);
            traces.push(trace);
        }
    }

    Ok(Decomposition {
        imfs,
        residual: remainder,
        traces,
    })
}
