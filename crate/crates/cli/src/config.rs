//! Experiment config files and their merge with command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use midsift::emd::{EpsilonScale, Norm};
use midsift::presets::{Preset, Probes};
use midsift::signal::{add_noise, generate_multitone, load_csv};
use midsift::{Boundary, Execution, NoiseSpec, SiftConfig, Signal, Strategy, ToneSpec};
use serde::Deserialize;

use crate::args::CommonArgs;
use crate::error::{CliError, CliResult};

pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_PCA_DIM: usize = 20;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal: Option<SignalSource>,
    pub seed: Option<u64>,
    pub sift: SiftOverrides,
    pub out: Option<PathBuf>,
    pub parallel: bool,
    pub compare: CompareSection,
    pub spectrum: SpectrumSection,
    pub pca: PcaSection,
    pub atmospheric: AtmosphericSection,
}

/// Exactly one of the three fields must be set.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSource {
    pub preset: Option<String>,
    pub csv: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub tones: Vec<ToneSpec>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "unit")]
    pub dt: f64,
    pub n: usize,
    pub noise: Option<NoiseOptions>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseOptions {
    pub sigma: f64,
    pub seed: Option<u64>,
}

fn unit() -> f64 {
    1.0
}

/// Sifting fields left unset fall back to the preset's choice, then to
/// [`SiftConfig::default`].
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SiftOverrides {
    pub strategy: Option<Strategy>,
    pub epsilon: Option<f64>,
    pub epsilon_scale: Option<EpsilonScale>,
    pub norm: Option<Norm>,
    pub max_sift_iterations: Option<usize>,
    pub max_imfs: Option<usize>,
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub single_sift: bool,
    pub include_hybrid: bool,
    pub ghost_threshold: Option<f64>,
    pub probes: Option<Probes>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub band: Option<(f64, f64)>,
    pub peak_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcaSection {
    pub delta: Option<usize>,
    pub n: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtmosphericSection {
    pub band: Option<(f64, f64)>,
    pub wave_imfs: Vec<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
    }
}

/// A fully resolved run: the signal in memory plus every setting.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub signal: Signal,
    /// Human-readable provenance, e.g. `preset:case1`.
    pub source: String,
    /// Generating frequencies when known, for ghost-peak matching.
    pub tones: Vec<f64>,
    pub probes: Option<Probes>,
    pub sift: SiftConfig,
    pub out: PathBuf,
    pub execution: Execution,
}

enum Source {
    Preset(Preset),
    Csv(PathBuf),
    Generator(GeneratorSpec),
}

/// Reads the config, applies flag overrides, checks the output directory and
/// loads the signal, in that order.
pub fn resolve(args: &CommonArgs) -> CliResult<Experiment> {
    let config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let source = pick_source(args, &config)?;
    let seed = args.seed.or(config.seed).unwrap_or(0);

    let preset = match &source {
        Source::Preset(p) => Some(*p),
        _ => None,
    };
    let sift = sift_config(&config.sift, args, preset)?;

    let out = args
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    ensure_writable(&out)?;

    let (signal, label, tones, mut probes) = match source {
        Source::Preset(p) => (
            p.signal(seed)?,
            format!("preset:{}", p.name()),
            p.tone_frequencies(),
            p.spec().probes,
        ),
        Source::Csv(path) => (load_csv(&path)?, format!("csv:{}", path.display()), Vec::new(), None),
        Source::Generator(g) => {
            let tones = g.tones.iter().map(|t| t.omega).collect();
            (generate(&g, args.seed, seed)?, "generator".to_string(), tones, None)
        }
    };
    if config.compare.probes.is_some() {
        probes = config.compare.probes;
    }

    Ok(Experiment {
        execution: Execution::from_flag(args.parallel || config.parallel),
        config,
        signal,
        source: label,
        tones,
        probes,
        sift,
        out,
    })
}

fn pick_source(args: &CommonArgs, config: &ExperimentConfig) -> CliResult<Source> {
    if let Some(name) = &args.preset {
        return Ok(Source::Preset(name.parse()?));
    }
    if let Some(path) = &args.input {
        return Ok(Source::Csv(path.clone()));
    }
    let Some(src) = &config.signal else {
        return Err(CliError::config(
            "no signal source: pass --preset, --input or a config with a `signal` section",
        ));
    };
    let set = [src.preset.is_some(), src.csv.is_some(), src.generator.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if set != 1 {
        return Err(CliError::config(format!(
            "signal section must name exactly one of preset, csv, generator (found {set})"
        )));
    }
    if let Some(name) = &src.preset {
        Ok(Source::Preset(name.parse()?))
    } else if let Some(path) = &src.csv {
        Ok(Source::Csv(path.clone()))
    } else {
        let g = src.generator.clone().expect("one source is set");
        if g.tones.is_empty() {
            return Err(CliError::config("empty tone list"));
        }
        Ok(Source::Generator(g))
    }
}

fn generate(g: &GeneratorSpec, flag_seed: Option<u64>, seed: u64) -> CliResult<Signal> {
    let clean = generate_multitone(&g.tones, g.t0, g.dt, g.n)?;
    Ok(match g.noise {
        Some(noise) => {
            let seed = flag_seed.or(noise.seed).unwrap_or(seed);
            add_noise(
                &clean,
                NoiseSpec {
                    sigma: noise.sigma,
                    seed,
                },
            )?
        }
        None => clean,
    })
}

fn sift_config(o: &SiftOverrides, args: &CommonArgs, preset: Option<Preset>) -> CliResult<SiftConfig> {
    let mut cfg = SiftConfig::default();
    if let Some(p) = preset {
        cfg.boundary = p.spec().boundary;
    }
    cfg.strategy = args.strategy.map(Strategy::from).or(o.strategy).unwrap_or(cfg.strategy);
    cfg.epsilon = args.epsilon.or(o.epsilon).unwrap_or(cfg.epsilon);
    cfg.epsilon_scale = o.epsilon_scale.unwrap_or(cfg.epsilon_scale);
    cfg.norm = o.norm.unwrap_or(cfg.norm);
    cfg.max_sift_iterations = args
        .max_iter
        .or(o.max_sift_iterations)
        .unwrap_or(cfg.max_sift_iterations);
    cfg.max_imfs = o.max_imfs.unwrap_or(cfg.max_imfs);
    cfg.boundary = args.boundary.map(Boundary::from).or(o.boundary).unwrap_or(cfg.boundary);
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_writable(dir: &Path) -> CliResult<()> {
    let fail = |e: std::io::Error| CliError::config(format!("output directory {} is not writable: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(".midsift-write-check");
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)
}
