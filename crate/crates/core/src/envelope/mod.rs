//! Sifting curves: the local-mean estimate subtracted on each sifting pass.
//!
//! Three constructions share the same extrema input:
//!
//! * envelope mean: average of natural splines through the maxima and through
//!   the minima;
//! * midpoint: one natural spline through the signal's values halfway (in
//!   time) between each consecutive maximum/minimum pair;
//! * hybrid: the pointwise average of the two.
//!
//! End effects are handled by a [`Boundary`] policy applied to the knot sets
//! before the splines are built.

mod extrema;
mod spline;

use serde::{Deserialize, Serialize};

pub use extrema::{find_extrema, find_extrema_periodic, ExtremaSet, Extremum, ExtremumKind};
pub use spline::{natural_cubic_spline, NaturalCubicSpline};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Knot augmentation at the ends of the signal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Even reflection about each endpoint: the two nearest extrema of each
    /// kind are mirrored across the end, and the endpoint itself becomes an
    /// extremum whenever the reflected signal turns there.
    #[default]
    Mirror,
    /// The signal spans exactly one period (last sample repeats the first);
    /// knots are wrapped by one period on each side.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    EnvelopeMean,
    Midpoint,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftingCurve {
    pub values: Vec<f64>,
    pub kind: CurveKind,
    /// Knots fed to the spline(s), boundary knots included.
    pub knot_count: usize,
}

/// Extrema located the way `boundary` expects them.
pub fn find_extrema_for(signal: &Signal, boundary: Boundary) -> ExtremaSet {
    match boundary {
        Boundary::Mirror => find_extrema(signal),
        Boundary::Periodic => find_extrema_periodic(signal),
    }
}

fn period(signal: &Signal) -> f64 {
    signal.t_end() - signal.t0()
}

/// Upper and lower envelopes evaluated on the signal grid.
pub fn envelopes(signal: &Signal, extrema: &ExtremaSet, boundary: Boundary) -> Result<(Vec<f64>, Vec<f64>)> {
    let (upper, lower) = envelope_knots(signal, extrema, boundary)?;
    let times = signal.times();
    let upper = spline_through(upper)?.eval_sorted(&times);
    let lower = spline_through(lower)?.eval_sorted(&times);
    Ok((upper, lower))
}

pub fn classical_sifting_curve(signal: &Signal, extrema: &ExtremaSet, boundary: Boundary) -> Result<SiftingCurve> {
    let (upper, lower) = envelope_knots(signal, extrema, boundary)?;
    let knot_count = upper.len() + lower.len();
    let times = signal.times();
    let upper = spline_through(upper)?.eval_sorted(&times);
    let lower = spline_through(lower)?.eval_sorted(&times);
    let values = upper.iter().zip(&lower).map(|(u, l)| 0.5 * (u + l)).collect();
    Ok(SiftingCurve {
        values,
        kind: CurveKind::EnvelopeMean,
        knot_count,
    })
}

pub fn midpoint_sifting_curve(signal: &Signal, extrema: &ExtremaSet, boundary: Boundary) -> Result<SiftingCurve> {
    let knots = midpoint_knots(signal, extrema, boundary)?;
    let knot_count = knots.len();
    let values = spline_through(knots)?.eval_sorted(&signal.times());
    Ok(SiftingCurve {
        values,
        kind: CurveKind::Midpoint,
        knot_count,
    })
}

pub fn hybrid_sifting_curve(signal: &Signal, extrema: &ExtremaSet, boundary: Boundary) -> Result<SiftingCurve> {
    let classical = classical_sifting_curve(signal, extrema, boundary)?;
    let midpoint = midpoint_sifting_curve(signal, extrema, boundary)?;
    let values = classical
        .values
        .iter()
        .zip(&midpoint.values)
        .map(|(c, m)| 0.5 * (c + m))
        .collect();
    Ok(SiftingCurve {
        values,
        kind: CurveKind::Hybrid,
        knot_count: classical.knot_count + midpoint.knot_count,
    })
}

/// Boundary-augmented knot sets for the upper and lower envelopes.
pub fn envelope_knots(
    signal: &Signal,
    extrema: &ExtremaSet,
    boundary: Boundary,
) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    if extrema.maxima.len() < 2 || extrema.minima.len() < 2 {
        return Err(residual(extrema));
    }
    let knots = |list: &[Extremum]| -> Vec<(f64, f64)> { list.iter().map(|e| (e.t, e.value)).collect() };
    match boundary {
        Boundary::Periodic => {
            let p = period(signal);
            Ok((wrap(&knots(&extrema.maxima), p), wrap(&knots(&extrema.minima), p)))
        }
        Boundary::Mirror => {
            let ends = EndTurns::of(signal);
            let upper = mirror(signal, &knots(&extrema.maxima), ends.left_max(), ends.right_max());
            let lower = mirror(signal, &knots(&extrema.minima), ends.left_min(), ends.right_min());
            Ok((upper, lower))
        }
    }
}

/// Boundary-augmented midpoint knots: `(t_mid, h(t_mid))` for each consecutive
/// alternating extremum pair, with `h` linearly interpolated between samples.
pub fn midpoint_knots(signal: &Signal, extrema: &ExtremaSet, boundary: Boundary) -> Result<Vec<(f64, f64)>> {
    let merged = extrema.merged();
    if merged.len() < 2 {
        return Err(residual(extrema));
    }
    let knots = match boundary {
        Boundary::Periodic => {
            let p = period(signal);
            let t0 = signal.t0();
            let mut cycle: Vec<(ExtremumKind, f64)> = merged.iter().map(|(k, e)| (*k, e.t)).collect();
            cycle.push((merged[0].0, merged[0].1.t + p));
            let mids: Vec<(f64, f64)> = pair_midpoints(&cycle)
                .map(|tm| (tm, signal.value_at(t0 + (tm - t0).rem_euclid(p))))
                .collect();
            let mut mids = wrap(&mids, p);
            mids.sort_by(|a, b| a.0.total_cmp(&b.0));
            mids
        }
        Boundary::Mirror => {
            let (a, b) = (signal.t0(), signal.t_end());
            let ends = EndTurns::of(signal);
            let nearest = |rev: bool| -> Vec<(ExtremumKind, f64)> {
                let mut picked = Vec::with_capacity(4);
                for kind in [ExtremumKind::Maximum, ExtremumKind::Minimum] {
                    let of_kind = merged.iter().filter(|(k, _)| *k == kind);
                    let times: Vec<f64> = if rev {
                        of_kind.rev().take(2).map(|(_, e)| e.t).collect()
                    } else {
                        of_kind.take(2).map(|(_, e)| e.t).collect()
                    };
                    picked.extend(times.into_iter().map(|t| (kind, t)));
                }
                picked
            };
            let mut seq: Vec<(ExtremumKind, f64)> = nearest(false)
                .into_iter()
                .map(|(k, t)| (k, 2.0 * a - t))
                .collect();
            seq.extend(ends.left.map(|k| (k, a)));
            seq.extend(merged.iter().map(|(k, e)| (*k, e.t)));
            seq.extend(ends.right.map(|k| (k, b)));
            seq.extend(nearest(true).into_iter().map(|(k, t)| (k, 2.0 * b - t)));
            seq.sort_by(|x, y| x.1.total_cmp(&y.1));
            let reflect = |t: f64| {
                if t < a {
                    2.0 * a - t
                } else if t > b {
                    2.0 * b - t
                } else {
                    t
                }
            };
            pair_midpoints(&seq)
                .map(|tm| (tm, signal.value_at(reflect(tm))))
                .collect()
        }
    };
    Ok(knots)
}

fn pair_midpoints(seq: &[(ExtremumKind, f64)]) -> impl Iterator<Item = f64> + '_ {
    seq.windows(2)
        .filter(|w| w[0].0 != w[1].0)
        .map(|w| 0.5 * (w[0].1 + w[1].1))
}

fn residual(extrema: &ExtremaSet) -> Error {
    Error::ResidualSignal {
        maxima: extrema.maxima.len(),
        minima: extrema.minima.len(),
    }
}

/// Whether the evenly reflected signal turns at each endpoint, and which way.
struct EndTurns {
    left: Option<ExtremumKind>,
    right: Option<ExtremumKind>,
}

impl EndTurns {
    fn of(signal: &Signal) -> Self {
        let h = signal.samples();
        let n = h.len();
        let turn = |end: f64, next: f64| {
            if end > next {
                Some(ExtremumKind::Maximum)
            } else if end < next {
                Some(ExtremumKind::Minimum)
            } else {
                None
            }
        };
        EndTurns {
            left: turn(h[0], h[1]),
            right: turn(h[n - 1], h[n - 2]),
        }
    }

    fn left_max(&self) -> bool {
        self.left == Some(ExtremumKind::Maximum)
    }
    fn left_min(&self) -> bool {
        self.left == Some(ExtremumKind::Minimum)
    }
    fn right_max(&self) -> bool {
        self.right == Some(ExtremumKind::Maximum)
    }
    fn right_min(&self) -> bool {
        self.right == Some(ExtremumKind::Minimum)
    }
}

fn mirror(signal: &Signal, knots: &[(f64, f64)], with_left: bool, with_right: bool) -> Vec<(f64, f64)> {
    let h = signal.samples();
    let (a, b) = (signal.t0(), signal.t_end());
    let mut out = Vec::with_capacity(knots.len() + 6);
    out.extend(knots.iter().take(2).rev().map(|&(t, v)| (2.0 * a - t, v)));
    if with_left {
        out.push((a, h[0]));
    }
    out.extend_from_slice(knots);
    if with_right {
        out.push((b, h[h.len() - 1]));
    }
    out.extend(knots.iter().rev().take(2).map(|&(t, v)| (2.0 * b - t, v)));
    out
}

fn wrap(knots: &[(f64, f64)], period: f64) -> Vec<(f64, f64)> {
    [-period, 0.0, period]
        .iter()
        .flat_map(|shift| knots.iter().map(move |&(t, v)| (t + shift, v)))
        .collect()
}

/// Spline through knots, dropping any knot that does not advance in time.
/// Ties only arise from degenerate parabola refinements on adjacent samples.
fn spline_through(mut knots: Vec<(f64, f64)>) -> Result<NaturalCubicSpline> {
    knots.dedup_by(|next, prev| !(next.0 > prev.0));
    NaturalCubicSpline::from_knots(&knots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{generate_multitone, ToneSpec};
    use std::f64::consts::PI;

    fn cosine(offset: f64, n: usize, period: f64) -> Signal {
        let tones = [
            ToneSpec::new(1.0, 2.0 * PI / period).with_phase(0.3),
            ToneSpec::new(offset, 0.0),
        ];
        generate_multitone(&tones, 0.0, 1.0, n).unwrap()
    }

    fn central(values: &[f64]) -> &[f64] {
        let n = values.len();
        &values[n / 4..3 * n / 4]
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    #[test]
    fn envelope_mean_of_cosine_is_flat() {
        let s = cosine(0.0, 1024, 64.0);
        let ex = find_extrema(&s);
        let c = classical_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        assert_eq!(c.values.len(), s.len());
        assert_eq!(c.kind, CurveKind::EnvelopeMean);
        assert!(max_abs(central(&c.values)) < 0.05);
    }

    #[test]
    fn envelope_mean_tracks_offset() {
        let s = cosine(3.0, 1024, 64.0);
        let ex = find_extrema(&s);
        let c = classical_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        assert!(central(&c.values).iter().all(|v| (v - 3.0).abs() < 0.05));
    }

    #[test]
    fn midpoint_of_cosine_is_flat() {
        let s = cosine(0.0, 1024, 64.0);
        let ex = find_extrema(&s);
        let c = midpoint_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        assert_eq!(c.kind, CurveKind::Midpoint);
        assert!(max_abs(central(&c.values)) < 0.02);
    }

    #[test]
    fn midpoint_knots_on_triangle() {
        // Apexes at 4 (mod 8) with value 4, troughs at 0 (mod 8) with value 0.
        let h: Vec<f64> = (0..=64).map(|k| 4.0 - ((k % 8) as f64 - 4.0).abs()).collect();
        let s = Signal::new(h, 0.0, 1.0).unwrap();
        let ex = find_extrema(&s);
        let knots = midpoint_knots(&s, &ex, Boundary::Mirror).unwrap();
        let merged = ex.merged();
        for w in merged.windows(2) {
            let tm = 0.5 * (w[0].1.t + w[1].1.t);
            assert_eq!(tm.fract(), 0.0);
            assert_eq!(tm.rem_euclid(4.0), 2.0);
            let knot = knots.iter().find(|k| k.0 == tm).expect("knot at midpoint");
            assert_eq!(knot.1, 2.0);
        }
        let c = midpoint_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        for k in (2..=62).step_by(4) {
            assert!((c.values[k] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_knots_sit_between_their_extrema() {
        let s = cosine(0.2, 500, 37.0);
        let ex = find_extrema(&s);
        let merged = ex.merged();
        let knots = midpoint_knots(&s, &ex, Boundary::Mirror).unwrap();
        for w in merged.windows(2) {
            let tm = 0.5 * (w[0].1.t + w[1].1.t);
            assert!(tm > w[0].1.t && tm < w[1].1.t);
            assert!(knots.iter().any(|k| k.0 == tm));
        }
    }

    #[test]
    fn hybrid_is_the_average() {
        let s = cosine(0.5, 700, 50.0);
        let ex = find_extrema(&s);
        let c = classical_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        let m = midpoint_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        let h = hybrid_sifting_curve(&s, &ex, Boundary::Mirror).unwrap();
        assert_eq!(h.kind, CurveKind::Hybrid);
        for k in 0..s.len() {
            assert_eq!(h.values[k], 0.5 * (c.values[k] + m.values[k]));
        }
        let bound = max_abs(central(&c.values)).max(max_abs(central(&m.values)));
        assert!(max_abs(central(&h.values)) <= bound);
    }

    #[test]
    fn residual_condition_propagates() {
        // One maximum only: classical fails, so hybrid must too.
        let h: Vec<f64> = (0..40).map(|k| -((k as f64 - 20.0) / 10.0).powi(2)).collect();
        let s = Signal::new(h, 0.0, 1.0).unwrap();
        let ex = find_extrema(&s);
        assert!(classical_sifting_curve(&s, &ex, Boundary::Mirror).unwrap_err().is_residual());
        assert!(hybrid_sifting_curve(&s, &ex, Boundary::Mirror).unwrap_err().is_residual());
        assert!(midpoint_sifting_curve(&s, &ex, Boundary::Mirror).unwrap_err().is_residual());

        let ramp = Signal::new((0..20).map(|k| k as f64).collect(), 0.0, 1.0).unwrap();
        let ex = find_extrema(&ramp);
        assert!(midpoint_sifting_curve(&ramp, &ex, Boundary::Mirror).unwrap_err().is_residual());
    }

    #[test]
    fn mirror_adds_turning_endpoint() {
        // Starts on a crest: left end is a maximum of the reflected signal.
        let s = generate_multitone(&[ToneSpec::new(1.0, 2.0 * PI / 40.0)], 0.0, 1.0, 201).unwrap();
        let ex = find_extrema(&s);
        let (upper, lower) = envelope_knots(&s, &ex, Boundary::Mirror).unwrap();
        assert!(upper.iter().any(|&(t, v)| t == 0.0 && v == 1.0));
        assert!(!lower.iter().any(|&(t, _)| t == 0.0));
        assert_eq!(upper.len(), ex.maxima.len() + 4 + 2);
        assert_eq!(lower.len(), ex.minima.len() + 4);
        assert!(upper.windows(2).all(|w| w[1].0 > w[0].0));
        assert!(lower.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn periodic_knots_cover_three_periods() {
        let tones = [ToneSpec::new(0.5, 3.0 * PI / 64.0), ToneSpec::new(0.5, PI / 32.0)];
        let s = generate_multitone(&tones, 0.0, 1.0 / 64.0, 8193).unwrap();
        let ex = find_extrema_periodic(&s);
        assert_eq!(ex.maxima.len(), 3);
        assert_eq!(ex.minima.len(), 3);
        let (upper, lower) = envelope_knots(&s, &ex, Boundary::Periodic).unwrap();
        assert_eq!(upper.len(), 9);
        assert_eq!(lower.len(), 9);
        let mids = midpoint_knots(&s, &ex, Boundary::Periodic).unwrap();
        assert_eq!(mids.len(), 18);
        assert!(mids.windows(2).all(|w| w[1].0 > w[0].0));
    }
}
