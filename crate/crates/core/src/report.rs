//! Side-by-side strategy comparison on one input.

use serde::Serialize;

use crate::batch::{self, Execution};
use crate::emd::{decompose, sift_once, SiftConfig, Strategy};
use crate::error::Result;
use crate::presets::Probes;
use crate::signal::Signal;
use crate::spectral::{periodogram, project_fourier, Peak, ProjectionAmplitudes};

pub const SCHEMA_VERSION: u32 = 1;
/// Peaks weaker than this fraction of the strongest bin are ignored.
pub const GHOST_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub strategies: Vec<Strategy>,
    /// Report one sifting pass per strategy instead of a full decomposition.
    pub single_sift: bool,
    /// Generating frequencies; enables ghost-peak detection when non-empty.
    pub tones: Vec<f64>,
    pub probes: Option<Probes>,
    pub ghost_threshold: f64,
    pub execution: Execution,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            strategies: vec![Strategy::Classical, Strategy::Midpoint],
            single_sift: false,
            tones: Vec::new(),
            probes: None,
            ghost_threshold: GHOST_THRESHOLD,
            execution: Execution::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImfSummary {
    /// 1-based.
    pub index: usize,
    pub iterations: usize,
    pub converged: bool,
    pub peak_bin: usize,
    pub peak_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhostPeak {
    pub imf: usize,
    #[serde(flatten)]
    pub peak: Peak,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub imfs: Vec<ImfSummary>,
    /// Present when generating tones are known.
    pub ghost_peaks: Option<Vec<GhostPeak>>,
    /// Projections of the first IMF (or the single sifted signal).
    pub projections: Option<ProjectionAmplitudes>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema: u32,
    pub single_sift: bool,
    pub samples: usize,
    pub bin_width: f64,
    pub tones: Vec<f64>,
    pub strategies: Vec<StrategyReport>,
}

impl CompareReport {
    pub fn strategy(&self, s: Strategy) -> Option<&StrategyReport> {
        self.strategies.iter().find(|r| r.strategy == s)
    }
}

/// Runs every requested strategy on the same in-memory `signal`.
///
/// Ghost peaks are searched in the first `tones.len()` IMFs, the ones
/// expected to carry the generating tones.
pub fn compare(signal: &Signal, config: &SiftConfig, options: &CompareOptions) -> Result<CompareReport> {
    config.validate()?;
    let reports = batch::map(options.execution, &options.strategies, |&s| {
        run_strategy(signal, &config.with_strategy(s), options)
    });
    let strategies = reports.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CompareReport {
        schema: SCHEMA_VERSION,
        single_sift: options.single_sift,
        samples: signal.len(),
        bin_width: periodogram(signal).bin_width,
        tones: options.tones.clone(),
        strategies,
    })
}

fn run_strategy(signal: &Signal, config: &SiftConfig, options: &CompareOptions) -> Result<StrategyReport> {
    let components: Vec<(Signal, usize, bool)> = if options.single_sift {
        match sift_once(signal, config.strategy, config.boundary) {
            Ok((h, _)) => vec![(h, 1, false)],
            Err(e) if e.is_residual() => Vec::new(),
            Err(e) => return Err(e),
        }
    } else {
        let d = decompose(signal, config)?;
        d.imfs
            .iter()
            .enumerate()
            .map(|(i, imf)| (d.imf_signal(i), imf.iterations_used, imf.converged))
            .collect()
    };

    let mut imfs = Vec::with_capacity(components.len());
    let mut ghosts = Vec::new();
    for (i, (h, iterations, converged)) in components.iter().enumerate() {
        let spectrum = periodogram(h);
        let peak_bin = spectrum.peak_bin();
        imfs.push(ImfSummary {
            index: i + 1,
            iterations: *iterations,
            converged: *converged,
            peak_bin,
            peak_omega: spectrum.frequencies[peak_bin],
        });
        if i < options.tones.len() {
            ghosts.extend(
                spectrum
                    .ghost_peaks(&options.tones, options.ghost_threshold)
                    .into_iter()
                    .map(|peak| GhostPeak { imf: i + 1, peak }),
            );
        }
    }

    let projections = match (options.probes, components.first()) {
        (Some(p), Some((h, _, _))) => Some(project_fourier(h, p.omega_a, p.omega_b, p.period)?),
        _ => None,
    };

    Ok(StrategyReport {
        strategy: config.strategy,
        imfs,
        ghost_peaks: (!options.tones.is_empty()).then_some(ghosts),
        projections,
    })
}
