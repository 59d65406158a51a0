use serde::Serialize;

use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

/// A located extremum. `t` and `value` are the vertex of the parabola through
/// the sample and its two neighbours, so they can sit between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub index: usize,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExtremaSet {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

impl ExtremaSet {
    /// Maxima and minima interleaved in time order.
    pub fn merged(&self) -> Vec<(ExtremumKind, Extremum)> {
        let mut out: Vec<_> = self
            .maxima
            .iter()
            .map(|e| (ExtremumKind::Maximum, *e))
            .chain(self.minima.iter().map(|e| (ExtremumKind::Minimum, *e)))
            .collect();
        out.sort_by(|a, b| a.1.t.total_cmp(&b.1.t));
        out
    }

    pub fn len(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maxima.is_empty() && self.minima.is_empty()
    }
}

/// Interior extrema of `signal`. A run of equal samples bracketed on both
/// sides by lower (higher) values is one maximum (minimum) at the run's
/// midpoint index, rounded down. Endpoints never qualify.
pub fn find_extrema(signal: &Signal) -> ExtremaSet {
    let h = signal.samples();
    let n = h.len();
    let mut set = ExtremaSet::default();
    if n < 3 {
        return set;
    }
    let mut start = 1;
    while start < n - 1 {
        let mut end = start;
        while end + 1 < n - 1 && h[end + 1] == h[start] {
            end += 1;
        }
        let (left, right, v) = (h[start - 1], h[end + 1], h[start]);
        let mid = (start + end) / 2;
        if v > left && v > right {
            set.maxima.push(refine(signal, mid, h[mid - 1], h[mid + 1], mid as f64));
        } else if v < left && v < right {
            set.minima.push(refine(signal, mid, h[mid - 1], h[mid + 1], mid as f64));
        }
        start = end + 1;
    }
    set
}

/// Extrema of a signal covering exactly one period, its last sample being the
/// repeat of the first. Detection wraps around, so the start of the period can
/// itself be an extremum; reported times fall in `[t0 - dt/2, t0 + period)`.
pub fn find_extrema_periodic(signal: &Signal) -> ExtremaSet {
    let h = &signal.samples()[..signal.len() - 1];
    let m = h.len();
    let mut set = ExtremaSet::default();
    if m < 3 {
        return set;
    }
    let at = |i: isize| h[i.rem_euclid(m as isize) as usize];
    // Begin on a run boundary so no plateau straddles the scan start.
    let Some(origin) = (0..m).find(|&i| h[i] != at(i as isize - 1)) else {
        return set;
    };
    let mut offset = 0;
    while offset < m {
        let start = (origin + offset) as isize;
        let v = at(start);
        let mut len = 1;
        while len < m && at(start + len as isize) == v {
            len += 1;
        }
        let left = at(start - 1);
        let right = at(start + len as isize);
        let mid = start + (len as isize - 1) / 2;
        let idx = mid.rem_euclid(m as isize) as usize;
        let (lo, hi) = (at(mid - 1), at(mid + 1));
        if v > left && v > right {
            set.maxima.push(refine(signal, idx, lo, hi, idx as f64));
        } else if v < left && v < right {
            set.minima.push(refine(signal, idx, lo, hi, idx as f64));
        }
        offset += len;
    }
    set.maxima.sort_by(|a, b| a.t.total_cmp(&b.t));
    set.minima.sort_by(|a, b| a.t.total_cmp(&b.t));
    set
}

fn refine(signal: &Signal, index: usize, before: f64, after: f64, position: f64) -> Extremum {
    let y = signal.samples()[index];
    let (offset, value) = parabola_vertex(before, y, after);
    Extremum {
        index,
        t: signal.t0() + (position + offset) * signal.dt(),
        value,
    }
}

/// Vertex of the parabola through (-1, y0), (0, y1), (1, y2), as (offset, value).
pub(crate) fn parabola_vertex(y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature == 0.0 {
        return (0.0, y1);
    }
    let offset = 0.5 * (y0 - y2) / curvature;
    (offset, y1 - 0.25 * (y0 - y2) * offset)
}
