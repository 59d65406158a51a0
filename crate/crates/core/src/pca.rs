//! Delay-embedded principal-component decomposition.
//!
//! The series is copied `n` times at lags `0, Δ, …, (n-1)Δ` (truncated, no
//! wrap-around), the raw lag-covariance matrix of the copies is diagonalised
//! by cyclic Jacobi rotations, and the series is rebuilt as a sum of one
//! additive component per eigenvector. Components are then grouped into mean
//! flow, waves and residual by two user-chosen cutoffs.

use serde::Serialize;

use crate::batch::{self, Execution};
use crate::error::{Error, Result};
use crate::signal::Signal;

pub const JACOBI_MAX_SWEEPS: usize = 30;
pub const JACOBI_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DelayEmbedding {
    pub delta: usize,
    pub n: usize,
    pub effective_length: usize,
    /// `rows[i][k] = X[k + i·delta]`
    pub rows: Vec<Vec<f64>>,
}

pub fn embed(signal: &Signal, delta: usize, n: usize) -> Result<DelayEmbedding> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 delayed copies, got {n}")));
    }
    if delta < 1 {
        return Err(Error::invalid("delay must be at least 1 sample"));
    }
    let len = signal.len();
    let span = (n - 1) * delta;
    let required = span + n;
    if len < required {
        return Err(Error::invalid(format!(
            "series of {len} samples is too short for {n} copies at delay {delta}: need at least {required}"
        )));
    }
    let effective_length = len - span;
    let x = signal.samples();
    let rows = (0..n)
        .map(|i| x[i * delta..i * delta + effective_length].to_vec())
        .collect();
    Ok(DelayEmbedding {
        delta,
        n,
        effective_length,
        rows,
    })
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub covariance: SymMatrix,
    /// Non-increasing. Empty until [`eigen_decompose`] runs.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` pairs with `eigenvalues[k]`; unit norm, first
    /// nonzero entry positive.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl PcaModel {
    pub fn is_decomposed(&self) -> bool {
        !self.eigenvalues.is_empty()
    }
}

/// `R[i][j] = Σ_k rows[i][k]·rows[j][k]`, unnormalised.
pub fn autocovariance(embedding: &DelayEmbedding) -> PcaModel {
    autocovariance_with(embedding, Execution::default())
}

pub fn autocovariance_with(embedding: &DelayEmbedding, exec: Execution) -> PcaModel {
    let n = embedding.n;
    let rows = &embedding.rows;
    let upper: Vec<Vec<f64>> = batch::map_range(exec, n, |i| {
        (i..n)
            .map(|j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum())
            .collect()
    });
    PcaModel {
        covariance: SymMatrix::from_fn(n, |i, j| upper[i][j - i]),
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
    }
}

pub fn eigen_decompose(model: PcaModel) -> Result<PcaModel> {
    let (eigenvalues, eigenvectors) = jacobi_eigen(&model.covariance)?;
    Ok(PcaModel {
        covariance: model.covariance,
        eigenvalues,
        eigenvectors,
    })
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenpairs come
/// back sorted by non-increasing eigenvalue.
pub fn jacobi_eigen(matrix: &SymMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = matrix.dim();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| matrix.get(i, j)).collect()).collect();
    // v[k][p]: column p holds the p-th eigenvector.
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = JACOBI_TOLERANCE * matrix.frobenius();
    let off = |a: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off(&a) <= tol;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off(&a) <= tol;
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {})",
            off(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&p| a[p][p]).collect();
    let vectors = order
        .iter()
        .map(|&p| {
            let mut col: Vec<f64> = (0..n).map(|k| v[k][p]).collect();
            let scale = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-12 * scale) {
                if *first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            col
        })
        .collect();
    Ok((values, vectors))
}

fn check_component(model: &PcaModel, k: usize) -> Result<()> {
    if !model.is_decomposed() {
        return Err(Error::invalid("model has not been eigendecomposed"));
    }
    if k >= model.eigenvalues.len() {
        return Err(Error::invalid(format!(
            "component {k} out of range (model has {})",
            model.eigenvalues.len()
        )));
    }
    Ok(())
}

/// Expansion coefficients `a_k(j) = Σ_i X(j + iΔ)·φᵏ_i`.
///
/// This is `n` times the averaged form, which with unit-norm eigenvectors is
/// what makes `Σ_k a_k(j)·φᵏ_0 = X(j)` hold exactly.
pub fn coefficients(embedding: &DelayEmbedding, model: &PcaModel, k: usize) -> Result<Vec<f64>> {
    check_component(model, k)?;
    let phi = &model.eigenvectors[k];
    let mut out = vec![0.0; embedding.effective_length];
    for (row, &w) in embedding.rows.iter().zip(phi) {
        out.iter_mut().zip(row).for_each(|(o, x)| *o += w * x);
    }
    Ok(out)
}

/// The k-th additive component `a_k(j)·φᵏ_0`, `j = 0..N′`.
pub fn component_series(embedding: &DelayEmbedding, model: &PcaModel, k: usize) -> Result<Vec<f64>> {
    let lead = model
        .eigenvectors
        .get(k)
        .map(|phi| phi[0])
        .unwrap_or_default();
    Ok(coefficients(embedding, model, k)?
        .into_iter()
        .map(|a| a * lead)
        .collect())
}

/// Last mean-flow index `m1` and last wave index `m2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupingCutoffs {
    pub m1: usize,
    pub m2: usize,
}

impl GroupingCutoffs {
    pub fn new(m1: usize, m2: usize, n: usize) -> Result<Self> {
        if m1 > m2 || m2 >= n {
            return Err(Error::invalid(format!(
                "cutoffs must satisfy 0 <= m1 <= m2 < n, got m1={m1}, m2={m2}, n={n}"
            )));
        }
        Ok(GroupingCutoffs { m1, m2 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub mean_flow: Vec<f64>,
    pub waves: Vec<f64>,
    pub residual: Vec<f64>,
}

pub fn group_components(embedding: &DelayEmbedding, model: &PcaModel, cutoffs: GroupingCutoffs) -> Result<Grouping> {
    let n = model.eigenvalues.len();
    GroupingCutoffs::new(cutoffs.m1, cutoffs.m2, n)?;
    let len = embedding.effective_length;
    let mut g = Grouping {
        mean_flow: vec![0.0; len],
        waves: vec![0.0; len],
        residual: vec![0.0; len],
    };
    for k in 0..n {
        let c = component_series(embedding, model, k)?;
        let target = if k <= cutoffs.m1 {
            &mut g.mean_flow
        } else if k <= cutoffs.m2 {
            &mut g.waves
        } else {
            &mut g.residual
        };
        target.iter_mut().zip(&c).for_each(|(t, v)| *t += v);
    }
    Ok(g)
}

/// How a delay was chosen by [`select_delta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelayRule {
    /// Autocorrelation fell to zero (within the white-noise band `2/√N`).
    Decorrelated,
    /// Autocorrelation decayed below `1/e`.
    EFolding,
    /// Neither happened; `N/4` was used.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DelaySelection {
    pub delta: usize,
    pub rule: DelayRule,
}

impl DelaySelection {
    pub fn is_warning(&self) -> bool {
        self.rule == DelayRule::Fallback
    }
}

/// Smallest lag at which the sample autocorrelation of the mean-removed
/// series is indistinguishable from zero, i.e. at or below `2/√N`.
pub fn select_delta(signal: &Signal) -> Result<DelaySelection> {
    let n = signal.len();
    if n < 16 {
        return Err(Error::invalid(format!("need at least 16 samples to pick a delay, got {n}")));
    }
    let fallback = DelaySelection {
        delta: n / 4,
        rule: DelayRule::Fallback,
    };
    let mean = signal.samples().iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = signal.samples().iter().map(|v| v - mean).collect();
    let c0: f64 = x.iter().map(|v| v * v).sum();
    if !(c0 > 1e-300) {
        return Ok(fallback);
    }
    let acf: Vec<f64> = (1..=n / 2)
        .map(|lag| x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect();
    let band = 2.0 / (n as f64).sqrt();
    if let Some(i) = acf.iter().position(|&r| r <= band) {
        return Ok(DelaySelection {
            delta: i + 1,
            rule: DelayRule::Decorrelated,
        });
    }
    if let Some(i) = acf.iter().position(|&r| r < (-1.0f64).exp()) {
        return Ok(DelaySelection {
            delta: i + 1,
            rule: DelayRule::EFolding,
        });
    }
    Ok(fallback)
}
