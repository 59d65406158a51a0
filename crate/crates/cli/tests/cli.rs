use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use midsift::presets::OMEGA_0;
use serde_json::Value;

fn midsift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_midsift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = midsift(args);
    assert!(
        out.status.success(),
        "midsift {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn read_series(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_three_tone_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&["generate", "--preset", "eq2.1", "--out", s(dir.path())]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("4097 samples"));
    let rows = read_series(&dir.path().join("signal.csv"));
    assert_eq!(rows.len(), 4097);
    let at_zero = rows.iter().find(|r| r.0 == 0.0).unwrap();
    assert_eq!(at_zero.1, 1.0);
}

#[test]
fn generate_benchmark_preset_is_dense() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["generate", "--preset", "eq3.1", "--out", s(dir.path())]);
    let rows = read_series(&dir.path().join("signal.csv"));
    assert_eq!(rows.len(), 8193);
    assert_eq!(rows[0].0, 0.0);
    assert_eq!(rows.last().unwrap().0, 128.0);
}

#[test]
fn generate_rejects_empty_tone_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"signal": {"generator": {"tones": [], "n": 64}}}"#).unwrap();
    let out = midsift(&["generate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty tone list"));
}

#[test]
fn generated_csv_round_trips_through_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    run_ok(&["generate", "--preset", "case1", "--out", s(&gen)]);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok(&["decompose", "--preset", "case1", "--out", s(&a)]);
    run_ok(&["decompose", "--input", s(&gen.join("signal.csv")), "--out", s(&b)]);
    let (ja, jb) = (json(&a.join("summary.json")), json(&b.join("summary.json")));
    assert_eq!(ja["imfs"].as_array().unwrap().len(), jb["imfs"].as_array().unwrap().len());
    assert_eq!(ja["peak_frequencies"], jb["peak_frequencies"]);
}

#[test]
fn decompose_three_tone_recovers_peaks() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["decompose", "--preset", "eq2.1", "--strategy", "midpoint", "--out", s(dir.path())]);
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["schema"], 1);
    let imfs = summary["imfs"].as_array().unwrap();
    assert!(imfs.len() >= 3);
    for k in 1..=imfs.len() {
        assert!(dir.path().join(format!("imf_{k}.csv")).exists());
    }
    assert!(dir.path().join("residual.csv").exists());
    let bin = summary["bin_width"].as_f64().unwrap();
    let peaks: Vec<f64> = summary["peak_frequencies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for m in [12.0, 10.0, 8.0] {
        assert!(
            peaks.iter().any(|p| (p - m * OMEGA_0).abs() <= bin),
            "{m} omega0 missing from {peaks:?}"
        );
    }
    assert!(!imfs[0]["trace"].as_array().unwrap().is_empty());
    assert!(!summary["filter_alpha"]["alphas"].as_array().unwrap().is_empty());
}

#[test]
fn decompose_constant_input_has_no_imfs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    let mut csv = String::from("time,value\n");
    for k in 0..50 {
        csv.push_str(&format!("{:.16e},{:.16e}\n", k as f64, 3.5));
    }
    fs::write(&input, &csv).unwrap();
    let out = dir.path().join("out");
    run_ok(&["decompose", "--input", s(&input), "--out", s(&out)]);
    let summary = json(&out.join("summary.json"));
    assert!(summary["imfs"].as_array().unwrap().is_empty());
    assert_eq!(fs::read_to_string(out.join("residual.csv")).unwrap(), csv);
}

#[test]
fn decompose_iteration_cap_flags_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "decompose", "--preset", "case2", "--epsilon", "1e-12", "--max-iter", "5", "--out", s(dir.path()),
    ]);
    let summary = json(&dir.path().join("summary.json"));
    let first = &summary["imfs"][0];
    assert_eq!(first["converged"], false);
    assert_eq!(first["iterations"], 5);
}

#[test]
fn compare_separated_pair() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["compare", "--preset", "case1", "--out", s(dir.path())]);
    let report = json(&dir.path().join("compare.json"));
    assert_eq!(report["schema"], 1);
    let strategies = report["strategies"].as_array().unwrap();
    let iters = |name: &str| {
        strategies.iter().find(|s| s["strategy"] == name).unwrap()["imfs"][0]["iterations"]
            .as_u64()
            .unwrap()
    };
    assert!(iters("midpoint") < iters("classical"));
}

#[test]
fn compare_benchmark_single_sift_reports_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["compare", "--preset", "eq3.1", "--single-sift", "--hybrid", "--out", s(dir.path())]);
    let report = json(&dir.path().join("compare.json"));
    let strategies = report["strategies"].as_array().unwrap();
    assert_eq!(strategies.len(), 3);
    let amp = |name: &str, key: &str| {
        strategies.iter().find(|s| s["strategy"] == name).unwrap()["projections"][key]
            .as_f64()
            .unwrap()
    };
    let close = |got: f64, want: f64| (got - want).abs() / want <= 0.05;
    assert!(close(amp("classical", "amplitude_a"), 31.63346911));
    assert!(close(amp("classical", "amplitude_b"), 29.70292046));
    assert!(close(amp("midpoint", "amplitude_a"), 34.19647843));
    assert!(close(amp("midpoint", "amplitude_b"), 20.81145369));
}

#[test]
fn compare_overlapping_pair_lists_ghosts() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["compare", "--preset", "case3", "--out", s(dir.path())]);
    let report = json(&dir.path().join("compare.json"));
    let ghosts: usize = report["strategies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["ghost_peaks"].as_array().unwrap().len())
        .sum();
    assert!(ghosts > 0);
}

#[test]
fn parallel_flag_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["compare", "--preset", "case2", "--hybrid", "--out", s(&a)]);
    run_ok(&["compare", "--preset", "case2", "--hybrid", "--parallel", "--out", s(&b)]);
    assert_eq!(
        fs::read(a.join("compare.json")).unwrap(),
        fs::read(b.join("compare.json")).unwrap()
    );
}

fn write_tone_noise(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("planted.json");
    fs::write(
        &cfg,
        r#"{"signal": {"generator": {"tones": [{"amplitude": 1.0, "omega": 0.19634954084936207}],
            "n": 1024, "noise": {"sigma": 0.3, "seed": 4}}}}"#,
    )
    .unwrap();
    cfg
}

#[test]
fn pca_auto_delay_writes_sorted_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tone_noise(dir.path());
    let out = dir.path().join("out");
    run_ok(&["pca", "--config", s(&cfg), "--dim", "12", "--out", s(&out)]);
    let text = fs::read_to_string(out.join("eigenvalues.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue"));
    let values: Vec<f64> = lines
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 12);
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
    let report = json(&out.join("pca.json"));
    assert!(report["delta_rule"].is_string());
}

#[test]
fn pca_grouping_sums_to_truncated_input() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    run_ok(&["generate", "--preset", "sounding", "--out", s(&gen)]);
    let out = dir.path().join("out");
    run_ok(&[
        "pca", "--preset", "sounding", "--delta", "96", "--dim", "20", "--m1", "3", "--m2", "11", "--out", s(&out),
    ]);
    let input = read_series(&gen.join("signal.csv"));
    let parts: Vec<Vec<(f64, f64)>> = ["mean_flow", "waves", "residual"]
        .iter()
        .map(|n| read_series(&out.join(format!("{n}.csv"))))
        .collect();
    let len = parts[0].len();
    assert_eq!(len, input.len() - 19 * 96);
    let scale = input.iter().fold(0.0f64, |m, r| m.max(r.1.abs()));
    for j in 0..len {
        let sum = parts[0][j].1 + parts[1][j].1 + parts[2][j].1;
        assert_eq!(parts[0][j].0, input[j].0);
        assert!((sum - input[j].1).abs() <= 1e-9 * scale, "row {j}");
    }
}

#[test]
fn pca_too_short_names_minimum_length() {
    let dir = tempfile::tempdir().unwrap();
    let out = midsift(&["pca", "--preset", "case1", "--delta", "500", "--dim", "10", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("need at least 4510"), "{}", stderr(&out));
}

#[test]
fn atmospheric_surrogate_recovers_slope() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["0", "1", "2"] {
        let out = dir.path().join(seed);
        run_ok(&[
            "atmospheric", "--preset", "sounding", "--seed", seed, "--band", "0.005", "0.1", "--wave-imfs", "1,2",
            "--out", s(&out),
        ]);
        let report = json(&out.join("atmospheric.json"));
        let slope = report["slope"].as_f64().unwrap();
        assert!((slope + 2.7).abs() <= 0.15, "seed {seed}: slope {slope}");
        assert!(report["r_squared"].as_f64().unwrap() > 0.9);
        assert!((report["mean"].as_f64().unwrap() - 220.0).abs() < 1.0);
        assert!(out.join("turbulence.csv").exists());
    }
}

#[test]
fn atmospheric_without_waves_completes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noise.json");
    fs::write(
        &cfg,
        r#"{"signal": {"generator": {"tones": [{"amplitude": 0.0, "omega": 0.0}], "n": 2048,
            "noise": {"sigma": 1.0, "seed": 8}}},
            "atmospheric": {"band": [0.1, 2.0]}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    run_ok(&["atmospheric", "--config", s(&cfg), "--out", s(&out)]);
    let report = json(&out.join("atmospheric.json"));
    assert!(report["wave_imfs"].as_array().unwrap().is_empty());
    assert!(report["slope"].as_f64().unwrap().abs() < 0.5);
}

#[test]
fn atmospheric_requires_band() {
    let dir = tempfile::tempdir().unwrap();
    let out = midsift(&["atmospheric", "--preset", "sounding", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("band"));
}

#[test]
fn narrow_band_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = midsift(&["spectrum", "--preset", "case1", "--band", "0.1", "0.101", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("need 4"));
}

#[test]
fn spectrum_reports_both_tones() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["spectrum", "--preset", "case1", "--out", s(dir.path())]);
    let report = json(&dir.path().join("spectrum.json"));
    let bins: Vec<u64> = report["peaks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["bin"].as_u64().unwrap())
        .collect();
    assert!(bins.contains(&64) && bins.contains(&96), "{bins:?}");
    assert!([64, 96].contains(&report["peak_bin"].as_u64().unwrap()));
    let rows = read_series(&dir.path().join("spectrum.csv"));
    assert_eq!(rows.len(), 4097 / 2 + 1);
}

#[test]
fn missing_input_is_an_io_error_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = midsift(&["decompose", "--input", s(&missing), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nope.csv"));
}

#[test]
fn malformed_csv_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "time,value\n0,1\n1,2\n2,abc\n").unwrap();
    let out = midsift(&["decompose", "--input", s(&input), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn config_must_name_exactly_one_source() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("two.json");
    fs::write(&cfg, r#"{"signal": {"preset": "case1", "csv": "x.csv"}}"#).unwrap();
    let out = midsift(&["decompose", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exactly one"));

    let out = midsift(&["decompose", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    fs::write(&cfg, r#"{"signal": {"preset": "case1"}, "sift": {"epsilonn": 1e-3}}"#).unwrap();
    let out = midsift(&["decompose", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_rejected_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = midsift(&["decompose", "--preset", "case1", "--out", s(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not writable"));
}

#[test]
fn bad_flag_values_exit_with_usage_code() {
    let out = midsift(&["decompose", "--strategy", "fastest"]);
    assert_eq!(out.status.code(), Some(2));
    let out = midsift(&["decompose", "--preset", "eq9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = midsift(&["decompose", "--preset", "case1", "--epsilon", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_sets_sift_options_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"signal": {"preset": "case1"}, "sift": {"strategy": "classical", "max_imfs": 2, "norm": "sup"}}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    run_ok(&["decompose", "--config", s(&cfg), "--out", s(&a)]);
    let summary = json(&a.join("summary.json"));
    assert_eq!(summary["config"]["strategy"], "classical");
    assert_eq!(summary["config"]["norm"], "sup");
    assert_eq!(summary["imfs"].as_array().unwrap().len(), 2);

    let b = dir.path().join("b");
    run_ok(&["decompose", "--config", s(&cfg), "--strategy", "hybrid", "--out", s(&b)]);
    assert_eq!(json(&b.join("summary.json"))["config"]["strategy"], "hybrid");
}
