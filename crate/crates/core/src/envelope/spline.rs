use crate::error::{Error, Result};

/// Natural cubic spline (zero second derivative at both end knots).
///
/// Queries outside the knot span extend the first or last cubic segment.
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::invalid("knot times and values differ in length"));
        }
        if t.len() < 2 {
            return Err(Error::invalid(format!(
                "a spline needs at least 2 knots, got {}",
                t.len()
            )));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!(
                "knot times must be strictly increasing (knot {} at {} follows {})",
                i + 1,
                t[i + 1],
                t[i]
            )));
        }
        let m = second_derivatives(&t, &y);
        Ok(NaturalCubicSpline { t, y, m })
    }

    pub fn from_knots(knots: &[(f64, f64)]) -> Result<Self> {
        let (t, y) = knots.iter().copied().unzip();
        Self::new(t, y)
    }

    pub fn knots(&self) -> usize {
        self.t.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        self.eval_segment(i, x)
    }

    /// Evaluates at non-decreasing query points with a single forward scan.
    pub fn eval_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let last = self.t.len() - 2;
        let mut i = xs.first().map_or(0, |&x| self.segment(x));
        xs.iter()
            .map(|&x| {
                while i < last && x >= self.t[i + 1] {
                    i += 1;
                }
                self.eval_segment(i, x)
            })
            .collect()
    }

    fn segment(&self, x: f64) -> usize {
        let last = self.t.len() - 2;
        match self.t.partition_point(|&tk| tk <= x) {
            0 => 0,
            p => (p - 1).min(last),
        }
    }

    fn eval_segment(&self, i: usize, x: f64) -> f64 {
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = t1 - t0;
        let a = t1 - x;
        let b = x - t0;
        (m0 * a * a * a + m1 * b * b * b) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b
    }
}

fn second_derivatives(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Interior unknowns m[1..n-1]; Thomas forward sweep then back substitution.
    let k = n - 2;
    let mut c_prime = vec![0.0; k];
    let mut d_prime = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        let h_lo = t[i] - t[i - 1];
        let h_hi = t[i + 1] - t[i];
        let diag = 2.0 * (h_lo + h_hi);
        let rhs = 6.0 * ((y[i + 1] - y[i]) / h_hi - (y[i] - y[i - 1]) / h_lo);
        if j == 0 {
            c_prime[j] = h_hi / diag;
            d_prime[j] = rhs / diag;
        } else {
            let denom = diag - h_lo * c_prime[j - 1];
            c_prime[j] = h_hi / denom;
            d_prime[j] = (rhs - h_lo * d_prime[j - 1]) / denom;
        }
    }
    m[k] = d_prime[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = d_prime[j] - c_prime[j] * m[j + 2];
    }
    m
}

pub fn natural_cubic_spline(knots: &[(f64, f64)], query_times: &[f64]) -> Result<Vec<f64>> {
    let spline = NaturalCubicSpline::from_knots(knots)?;
    Ok(query_times.iter().map(|&x| spline.eval(x)).collect())
}
