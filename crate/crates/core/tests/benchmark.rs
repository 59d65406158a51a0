//! The periodic two-tone benchmark: one sift followed by projection onto both
//! tones, under grid refinement and a shift of the period window.

use midsift::presets::{Preset, BENCHMARK_DT, BENCHMARK_PERIOD, OMEGA_4, OMEGA_5};
use midsift::signal::generate_multitone;
use midsift::spectral::{project_fourier, ProjectionAmplitudes};
use midsift::{sift_once, Boundary, Strategy};

fn single_sift(strategy: Strategy, t0: f64, dt: f64) -> ProjectionAmplitudes {
    let tones = Preset::PeriodicBenchmark.spec().tones;
    let n = (BENCHMARK_PERIOD / dt).round() as usize + 1;
    let signal = generate_multitone(&tones, t0, dt, n).unwrap();
    let (h, _) = sift_once(&signal, strategy, Boundary::Periodic).unwrap();
    project_fourier(&h, OMEGA_4, OMEGA_5, BENCHMARK_PERIOD).unwrap()
}

#[test]
fn amplitudes_are_grid_converged() {
    for strategy in [Strategy::Classical, Strategy::Midpoint] {
        let coarse = single_sift(strategy, 0.0, BENCHMARK_DT);
        let fine = single_sift(strategy, 0.0, BENCHMARK_DT / 2.0);
        for (c, f) in [
            (coarse.amplitude_a, fine.amplitude_a),
            (coarse.amplitude_b, fine.amplitude_b),
        ] {
            assert!(((c - f) / f).abs() < 1e-3, "{strategy:?}: {c} vs {f}");
        }
    }
}

#[test]
fn amplitudes_ignore_a_full_period_shift() {
    for strategy in [Strategy::Classical, Strategy::Midpoint] {
        let a = single_sift(strategy, 0.0, BENCHMARK_DT);
        let b = single_sift(strategy, BENCHMARK_PERIOD, BENCHMARK_DT);
        assert!((a.amplitude_a - b.amplitude_a).abs() < 1e-6);
        assert!((a.amplitude_b - b.amplitude_b).abs() < 1e-6);
    }
}

#[test]
fn midpoint_suppresses_the_lower_tone_more() {
    let classical = single_sift(Strategy::Classical, 0.0, BENCHMARK_DT);
    let midpoint = single_sift(Strategy::Midpoint, 0.0, BENCHMARK_DT);
    assert!(midpoint.ratio() < classical.ratio());
    assert!(midpoint.ratio() < 0.7);
    assert!(classical.ratio() > 0.9);
}

#[test]
fn unsifted_projections_recover_the_tones() {
    let signal = Preset::PeriodicBenchmark.signal(0).unwrap();
    let p = project_fourier(&signal, OMEGA_4, OMEGA_5, BENCHMARK_PERIOD).unwrap();
    let expected = 0.5 * BENCHMARK_PERIOD / 2.0;
    assert!((p.amplitude_a - expected).abs() < 1e-6 * expected);
    assert!((p.amplitude_b - expected).abs() < 1e-6 * expected);
}
