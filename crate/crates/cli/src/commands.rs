use std::fs;
use std::io::Write;
use std::path::Path;

use midsift::emd::decompose;
use midsift::pca::{self, DelayRule, GroupingCutoffs};
use midsift::report::{self, CompareOptions, SCHEMA_VERSION};
use midsift::signal::{detrend_mean, save_columns, save_csv};
use midsift::spectral::{filter_fit, fit_spectral_slope, periodogram, FilterFit, Peak, SlopeFit, Spectrum};
use midsift::{SiftConfig, Signal, Strategy};
use serde::Serialize;

use crate::args::{AtmosphericArgs, Command, CommonArgs, CompareArgs, PcaArgs, SpectrumArgs};
use crate::config::{resolve, DEFAULT_PCA_DIM};
use crate::error::{CliError, CliResult};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Generate(args) => generate(&args),
        Command::Decompose(args) => decompose_cmd(&args),
        Command::Compare(args) => compare(&args),
        Command::Spectrum(args) => spectrum(&args),
        Command::Pca(args) => pca_cmd(&args),
        Command::Atmospheric(args) => atmospheric(&args),
    }
}

fn generate(args: &CommonArgs) -> CliResult<()> {
    let exp = resolve(args)?;
    let path = exp.out.join("signal.csv");
    save_csv(&exp.signal, &path)?;
    let s = &exp.signal;
    println!(
        "wrote {} samples on [{}, {}] with dt = {} to {}",
        s.len(),
        s.t0(),
        s.t_end(),
        s.dt(),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ImfRecord {
    index: usize,
    file: String,
    iterations: usize,
    converged: bool,
    threshold: f64,
    peak_bin: usize,
    peak_omega: f64,
    trace: Vec<f64>,
}

#[derive(Serialize)]
struct DecomposeSummary<'a> {
    schema: u32,
    command: &'static str,
    source: &'a str,
    samples: usize,
    t0: f64,
    dt: f64,
    bin_width: f64,
    config: &'a SiftConfig,
    imfs: Vec<ImfRecord>,
    peak_frequencies: Vec<f64>,
    residual_file: &'static str,
    /// High-pass filter parameter per sifting pass of the first IMF.
    filter_alpha: Option<FilterFit>,
}

fn decompose_cmd(args: &CommonArgs) -> CliResult<()> {
    let exp = resolve(args)?;
    let d = decompose(&exp.signal, &exp.sift)?;
    let mut imfs = Vec::with_capacity(d.imfs.len());
    for (i, imf) in d.imfs.iter().enumerate() {
        let sig = d.imf_signal(i);
        let file = format!("imf_{}.csv", i + 1);
        save_csv(&sig, exp.out.join(&file))?;
        let spectrum = periodogram(&sig);
        let peak_bin = spectrum.peak_bin();
        imfs.push(ImfRecord {
            index: i + 1,
            file,
            iterations: imf.iterations_used,
            converged: imf.converged,
            threshold: imf.threshold,
            peak_bin,
            peak_omega: spectrum.frequencies[peak_bin],
            trace: d.traces[i].clone(),
        });
    }
    save_csv(&d.residual, exp.out.join("residual.csv"))?;
    let filter_alpha = if d.imfs.is_empty() {
        None
    } else {
        Some(filter_fit(&exp.signal, &exp.sift)?)
    };
    let summary = DecomposeSummary {
        schema: SCHEMA_VERSION,
        command: "decompose",
        source: &exp.source,
        samples: exp.signal.len(),
        t0: exp.signal.t0(),
        dt: exp.signal.dt(),
        bin_width: periodogram(&exp.signal).bin_width,
        config: &exp.sift,
        peak_frequencies: imfs.iter().map(|r| r.peak_omega).collect(),
        imfs,
        residual_file: "residual.csv",
        filter_alpha,
    };
    write_json(&exp.out.join("summary.json"), &summary)?;
    println!("{} IMFs ({} strategy) written to {}", d.imfs.len(), exp.sift.strategy.name(), exp.out.display());
    for r in &summary.imfs {
        println!(
            "  imf {:>2}: {:>4} iterations{} peak omega {:.6}",
            r.index,
            r.iterations,
            if r.converged { "" } else { " (not converged)" },
            r.peak_omega
        );
    }
    Ok(())
}

fn compare(args: &CompareArgs) -> CliResult<()> {
    let exp = resolve(&args.common)?;
    let section = &exp.config.compare;
    let mut strategies = vec![Strategy::Classical, Strategy::Midpoint];
    if args.hybrid || section.include_hybrid {
        strategies.push(Strategy::Hybrid);
    }
    let options = CompareOptions {
        strategies,
        single_sift: args.single_sift || section.single_sift,
        tones: exp.tones.clone(),
        probes: exp.probes,
        ghost_threshold: section.ghost_threshold.unwrap_or(report::GHOST_THRESHOLD),
        execution: exp.execution,
    };
    let report = report::compare(&exp.signal, &exp.sift, &options)?;
    write_json(&exp.out.join("compare.json"), &report)?;
    println!("compare on {} written to {}", exp.source, exp.out.join("compare.json").display());
    for s in &report.strategies {
        let iters: Vec<String> = s.imfs.iter().map(|i| i.iterations.to_string()).collect();
        print!("  {:<9} iterations [{}]", s.strategy.name(), iters.join(", "));
        if let Some(g) = &s.ghost_peaks {
            print!(" ghosts {}", g.len());
        }
        if let Some(p) = &s.projections {
            print!(" A = {:.8} B = {:.8}", p.amplitude_a, p.amplitude_b);
        }
        println!();
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    schema: u32,
    command: &'static str,
    source: &'a str,
    samples: usize,
    bin_width: f64,
    energy: f64,
    peak_bin: usize,
    peak_omega: f64,
    peak_threshold: f64,
    peaks: Vec<Peak>,
    slope: Option<SlopeFit>,
}

fn spectrum(args: &SpectrumArgs) -> CliResult<()> {
    let exp = resolve(&args.common)?;
    let section = &exp.config.spectrum;
    let band = band_from(args.band.as_deref())?.or(section.band);
    let threshold = section.peak_threshold.unwrap_or(report::GHOST_THRESHOLD);
    let sp = periodogram(&exp.signal);
    save_spectrum(&sp, &exp.out.join("spectrum.csv"))?;
    let slope = band.map(|(lo, hi)| fit_spectral_slope(&sp, lo, hi)).transpose()?;
    let peak_bin = sp.peak_bin();
    let report = SpectrumReport {
        schema: SCHEMA_VERSION,
        command: "spectrum",
        source: &exp.source,
        samples: exp.signal.len(),
        bin_width: sp.bin_width,
        energy: sp.energy(),
        peak_bin,
        peak_omega: sp.frequencies[peak_bin],
        peak_threshold: threshold,
        peaks: sp.peaks(threshold),
        slope,
    };
    write_json(&exp.out.join("spectrum.json"), &report)?;
    println!("peak at omega {:.6} (bin {peak_bin})", report.peak_omega);
    if let Some(s) = &report.slope {
        println!("slope {:.4} (r^2 {:.4}, {} bins)", s.slope, s.r_squared, s.bins_used);
    }
    Ok(())
}

#[derive(Serialize)]
struct PcaReport<'a> {
    schema: u32,
    command: &'static str,
    source: &'a str,
    delta: usize,
    delta_rule: Option<DelayRule>,
    n: usize,
    effective_length: usize,
    trace: f64,
    eigenvalues: &'a [f64],
    cutoffs: Option<GroupingCutoffs>,
}

fn pca_cmd(args: &PcaArgs) -> CliResult<()> {
    let exp = resolve(&args.common)?;
    let section = &exp.config.pca;
    let n = args.dim.or(section.n).unwrap_or(DEFAULT_PCA_DIM);
    let (delta, rule) = match args.delta.or(section.delta) {
        Some(d) => (d, None),
        None => {
            let sel = pca::select_delta(&exp.signal)?;
            if sel.is_warning() {
                eprintln!(
                    "warning: autocorrelation never decayed; using fallback delay {}",
                    sel.delta
                );
            }
            (sel.delta, Some(sel.rule))
        }
    };
    let cutoffs = match (args.m1.or(section.m1), args.m2.or(section.m2)) {
        (Some(m1), Some(m2)) => Some(GroupingCutoffs::new(m1, m2, n)?),
        (None, None) => None,
        _ => return Err(CliError::config("m1 and m2 must be given together")),
    };

    let embedding = pca::embed(&exp.signal, delta, n)?;
    let model = pca::eigen_decompose(pca::autocovariance_with(&embedding, exp.execution))?;

    let mut csv = String::from("index,eigenvalue\n");
    for (k, v) in model.eigenvalues.iter().enumerate() {
        csv.push_str(&format!("{k},{v:.16e}\n"));
    }
    write_file(&exp.out.join("eigenvalues.csv"), csv.as_bytes())?;

    if let Some(c) = cutoffs {
        let g = pca::group_components(&embedding, &model, c)?;
        let truncated = Signal::new(vec![0.0; embedding.effective_length], exp.signal.t0(), exp.signal.dt())?;
        for (name, series) in [("mean_flow", g.mean_flow), ("waves", g.waves), ("residual", g.residual)] {
            save_csv(&truncated.with_samples(series), exp.out.join(format!("{name}.csv")))?;
        }
    }

    let report = PcaReport {
        schema: SCHEMA_VERSION,
        command: "pca",
        source: &exp.source,
        delta,
        delta_rule: rule,
        n,
        effective_length: embedding.effective_length,
        trace: model.covariance.trace(),
        eigenvalues: &model.eigenvalues,
        cutoffs,
    };
    write_json(&exp.out.join("pca.json"), &report)?;
    println!(
        "delta {delta}, {n} copies, {} rows; leading eigenvalue {:.6e}",
        embedding.effective_length,
        model.eigenvalues.first().copied().unwrap_or(0.0)
    );
    Ok(())
}

#[derive(Serialize)]
struct AtmosphericReport<'a> {
    schema: u32,
    command: &'static str,
    source: &'a str,
    mean: f64,
    strategy: Strategy,
    imf_count: usize,
    imf_peak_omegas: Vec<f64>,
    wave_imfs: &'a [usize],
    slope: f64,
    intercept: f64,
    r_squared: f64,
    bins_used: usize,
    band: (f64, f64),
}

fn atmospheric(args: &AtmosphericArgs) -> CliResult<()> {
    let exp = resolve(&args.common)?;
    let section = &exp.config.atmospheric;
    let (lo, hi) = band_from(args.band.as_deref())?
        .or(section.band)
        .ok_or_else(|| CliError::config("atmospheric needs a fit band (--band LO HI or atmospheric.band)"))?;
    let wave_imfs = args.wave_imfs.clone().unwrap_or_else(|| section.wave_imfs.clone());

    let (detrended, mean) = detrend_mean(&exp.signal);
    let d = decompose(&detrended, &exp.sift)?;
    if let Some(bad) = wave_imfs.iter().find(|&&k| k == 0 || k > d.imfs.len()) {
        return Err(CliError::config(format!(
            "wave IMF {bad} out of range: the decomposition has {} IMFs (1-based)",
            d.imfs.len()
        )));
    }
    let mut turbulence = detrended.samples().to_vec();
    for &k in &wave_imfs {
        turbulence
            .iter_mut()
            .zip(&d.imfs[k - 1].samples)
            .for_each(|(t, w)| *t -= w);
    }
    let turbulence = detrended.with_samples(turbulence);
    let sp = periodogram(&turbulence);
    let fit = fit_spectral_slope(&sp, lo, hi)?;

    save_csv(&turbulence, exp.out.join("turbulence.csv"))?;
    save_spectrum(&sp, &exp.out.join("turbulence_spectrum.csv"))?;
    let report = AtmosphericReport {
        schema: SCHEMA_VERSION,
        command: "atmospheric",
        source: &exp.source,
        mean,
        strategy: exp.sift.strategy,
        imf_count: d.imfs.len(),
        imf_peak_omegas: (0..d.imfs.len())
            .map(|i| periodogram(&d.imf_signal(i)).peak_frequency())
            .collect(),
        wave_imfs: &wave_imfs,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        bins_used: fit.bins_used,
        band: fit.band,
    };
    write_json(&exp.out.join("atmospheric.json"), &report)?;
    println!(
        "slope {:.4} (r^2 {:.4}) over [{lo}, {hi}] after removing {} wave IMF(s) of {}",
        fit.slope,
        fit.r_squared,
        wave_imfs.len(),
        d.imfs.len()
    );
    Ok(())
}

fn band_from(values: Option<&[f64]>) -> CliResult<Option<(f64, f64)>> {
    match values {
        None => Ok(None),
        Some([lo, hi]) => Ok(Some((*lo, *hi))),
        Some(v) => Err(CliError::config(format!("--band takes two values, got {}", v.len()))),
    }
}

fn save_spectrum(sp: &Spectrum, path: &Path) -> CliResult<()> {
    Ok(save_columns(
        path,
        "omega,power",
        sp.frequencies.iter().copied().zip(sp.power.iter().copied()),
    )?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Core(midsift::Error::Numeric(format!("cannot serialize report: {e}"))))?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |source| {
        CliError::Core(midsift::Error::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}
