//! Canned test signals for the reproduction experiments.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::envelope::Boundary;
use crate::error::{Error, Result};
use crate::signal::{add_noise, generate_multitone, generate_power_law, NoiseSpec, Signal, ToneSpec};

/// Fundamental of the three-tone and well-separated two-tone signals.
pub const OMEGA_0: f64 = PI / 256.0;
/// Two-tone benchmark frequencies; their sum is periodic with period 128.
pub const OMEGA_4: f64 = 3.0 * PI / 64.0;
pub const OMEGA_5: f64 = PI / 32.0;
pub const BENCHMARK_PERIOD: f64 = 128.0;
/// Grid spacing used to stand in for continuous time on the benchmark.
pub const BENCHMARK_DT: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Three equal tones at 12, 10 and 8 ω0 on [-2048, 2048].
    #[serde(rename = "eq2.1")]
    ThreeTone,
    /// Two-tone periodic benchmark on a dense grid over one period.
    #[serde(rename = "eq3.1")]
    PeriodicBenchmark,
    /// Well-separated pair: 12ω0 and 8ω0.
    #[serde(rename = "case1")]
    Separated,
    /// Close pair: π/24 ± π/288.
    #[serde(rename = "case2")]
    Close,
    /// Nearly overlapping pair: π/24 ± π/1000.
    #[serde(rename = "case3")]
    Overlapping,
    /// Synthetic sounding: red turbulence, two short waves above the
    /// turbulence fit band, a mean offset and sensor noise.
    #[serde(rename = "sounding")]
    Sounding,
}

/// Two probe frequencies and the common period to project over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probes {
    pub omega_a: f64,
    pub omega_b: f64,
    pub period: f64,
}

/// Everything needed to rebuild a preset signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetSpec {
    pub tones: Vec<ToneSpec>,
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
    /// Boundary policy the experiment is meant to run with.
    pub boundary: Boundary,
    pub probes: Option<Probes>,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::ThreeTone,
        Preset::PeriodicBenchmark,
        Preset::Separated,
        Preset::Close,
        Preset::Overlapping,
        Preset::Sounding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ThreeTone => "eq2.1",
            Preset::PeriodicBenchmark => "eq3.1",
            Preset::Separated => "case1",
            Preset::Close => "case2",
            Preset::Overlapping => "case3",
            Preset::Sounding => "sounding",
        }
    }

    pub fn spec(self) -> PresetSpec {
        let long = |tones: Vec<ToneSpec>| PresetSpec {
            tones,
            t0: -2048.0,
            dt: 1.0,
            n: 4097,
            boundary: Boundary::Mirror,
            probes: None,
        };
        let pair = |w1: f64, w2: f64| long(vec![ToneSpec::new(0.5, w1), ToneSpec::new(0.5, w2)]);
        match self {
            Preset::ThreeTone => long(
                [12.0, 10.0, 8.0]
                    .iter()
                    .map(|m| ToneSpec::new(1.0 / 3.0, m * OMEGA_0))
                    .collect(),
            ),
            Preset::PeriodicBenchmark => PresetSpec {
                tones: vec![ToneSpec::new(0.5, OMEGA_4), ToneSpec::new(0.5, OMEGA_5)],
                t0: 0.0,
                dt: BENCHMARK_DT,
                n: (BENCHMARK_PERIOD / BENCHMARK_DT) as usize + 1,
                boundary: Boundary::Periodic,
                probes: Some(Probes {
                    omega_a: OMEGA_4,
                    omega_b: OMEGA_5,
                    period: BENCHMARK_PERIOD,
                }),
            },
            Preset::Separated => pair(12.0 * OMEGA_0, 8.0 * OMEGA_0),
            Preset::Close => pair(PI / 24.0 + PI / 288.0, PI / 24.0 - PI / 288.0),
            Preset::Overlapping => pair(PI / 24.0 + PI / 1000.0, PI / 24.0 - PI / 1000.0),
            Preset::Sounding => PresetSpec {
                tones: sounding_waves(),
                t0: 0.0,
                dt: 1.0,
                n: SOUNDING_SAMPLES,
                boundary: Boundary::Mirror,
                probes: None,
            },
        }
    }

    /// The preset signal. `seed` only affects the stochastic `sounding` preset.
    pub fn signal(self, seed: u64) -> Result<Signal> {
        let spec = self.spec();
        let tonal = generate_multitone(&spec.tones, spec.t0, spec.dt, spec.n)?;
        if self != Preset::Sounding {
            return Ok(tonal);
        }
        let turbulence = generate_power_law(SOUNDING_SLOPE, 1.0, spec.t0, spec.dt, spec.n, seed)?;
        let mixed: Vec<f64> = tonal
            .samples()
            .iter()
            .zip(turbulence.samples())
            .map(|(w, t)| w + t + SOUNDING_MEAN)
            .collect();
        add_noise(
            &tonal.with_samples(mixed),
            NoiseSpec {
                sigma: SOUNDING_NOISE,
                seed: seed.wrapping_add(1),
            },
        )
    }

    /// Generating frequencies, for ghost-peak matching.
    pub fn tone_frequencies(self) -> Vec<f64> {
        self.spec().tones.iter().map(|t| t.omega).collect()
    }
}

/// Spectral slope planted in the `sounding` turbulence.
pub const SOUNDING_SLOPE: f64 = -2.7;
const SOUNDING_MEAN: f64 = 220.0;
const SOUNDING_NOISE: f64 = 0.002;
const SOUNDING_SAMPLES: usize = 4096;

/// Both waves complete a whole number of cycles on the grid, so they add no
/// leakage to the periodogram.
fn sounding_waves() -> Vec<ToneSpec> {
    let cycles = |k: f64| 2.0 * PI * k / SOUNDING_SAMPLES as f64;
    vec![
        ToneSpec::new(0.3, cycles(1000.0)).with_phase(0.4),
        ToneSpec::new(0.3, cycles(400.0)).with_phase(-1.1),
    ]
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::invalid(format!("unknown preset `{s}` (expected one of {})", names.join(", ")))
            })
    }
}
