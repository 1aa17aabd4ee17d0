//! Monte Carlo estimators for the freezing-regime limit theorems.
//!
//! Every check uses one rule: an estimate passes when
//! |estimate − target| ≤ max(3·stderr, rel_tol·|target|).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elemsym::elementary_symmetric;
use crate::error::{invalid, Error, Result};
use crate::finfree::{hermite_roots, laguerre_roots};
use crate::orthopoly::{dual_hermite_system, dual_laguerre_system, primitive, OrthogonalSystem};
use crate::poly::Poly;
use crate::stochastic::{path_rng, sample_ble_with, sample_gbe_with, PathEnsemble};

/// Relative tolerance used by the CLT checks.
pub const DEFAULT_REL_TOL: f64 = 0.05;

/// The pass rule shared by all checks.
pub fn within(estimate: f64, target: f64, stderr: f64, rel_tol: f64) -> bool {
    (estimate - target).abs() <= (3.0 * stderr).max(rel_tol * target.abs())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Sample mean, unbiased covariance and plug-in standard errors of the
/// covariance entries, √((m₄ − σ²)/M) with m₄ the mean squared centred product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub mean: Vec<f64>,
    pub cov: Matrix,
    pub stderr: Matrix,
    pub samples: usize,
}

impl CovarianceEstimate {
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        let m = samples.len();
        if m < 2 {
            return Err(invalid("need at least two samples"));
        }
        let d = samples[0].len();
        if let Some(bad) = samples.iter().find(|s| s.len() != d) {
            return Err(Error::DimensionMismatch { left: d, right: bad.len() });
        }
        let mf = m as f64;
        let mut mean = vec![0.0; d];
        for s in samples {
            for (acc, v) in mean.iter_mut().zip(s) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= mf);
        let mut sum = Matrix::zeros(d, d);
        let mut sum_sq = Matrix::zeros(d, d);
        for s in samples {
            for a in 0..d {
                let da = s[a] - mean[a];
                for b in a..d {
                    let p = da * (s[b] - mean[b]);
                    sum[(a, b)] += p;
                    sum_sq[(a, b)] += p * p;
                }
            }
        }
        let mut cov = Matrix::zeros(d, d);
        let mut stderr = Matrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let c = sum[(a, b)] / (mf - 1.0);
                let biased = sum[(a, b)] / mf;
                let se = ((sum_sq[(a, b)] / mf - biased * biased).max(0.0) / mf).sqrt();
                cov[(a, b)] = c;
                cov[(b, a)] = c;
                stderr[(a, b)] = se;
                stderr[(b, a)] = se;
            }
        }
        Ok(CovarianceEstimate { mean, cov, stderr, samples: m })
    }
}

/// Q = (q̂_n(z_i)/√N), rows by order n, columns by Hermite zero.
pub fn build_q_matrix_gaussian(n: usize) -> Result<Matrix> {
    let sys = dual_hermite_system(n)?;
    let z = hermite_roots(n, 1.0)?;
    let scale = 1.0 / (n as f64).sqrt();
    Ok(q_matrix(&sys, &z, |_| scale))
}

/// Q = (√z_i q̂_n(z_i)/√(N(N+α−1))) over the zeros of L_N^{(α)}.
pub fn build_q_matrix_laguerre(n: usize, alpha: f64) -> Result<Matrix> {
    let sys = dual_laguerre_system(n, alpha)?;
    let z = laguerre_roots(n, alpha, 1.0)?;
    let c = 1.0 / (n as f64 * (n as f64 + alpha - 1.0)).sqrt();
    Ok(q_matrix(&sys, &z, |x| c * x.sqrt()))
}

fn q_matrix(sys: &OrthogonalSystem, z: &[f64], col_scale: impl Fn(f64) -> f64) -> Matrix {
    let n = z.len();
    let mut q = Matrix::zeros(n, n);
    for (i, &x) in z.iter().enumerate() {
        let w = col_scale(x);
        for (order, v) in sys.eval_all_orthonormal(x).into_iter().enumerate() {
            q[(order, i)] = w * v;
        }
    }
    q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub sigma_hat: Matrix,
    pub rotated: Matrix,
    pub target_diag: Vec<f64>,
    pub off_diag_max: f64,
    pub diag_rel_err: Vec<f64>,
    /// Standard errors of the entries of `rotated`.
    pub mc_stderr: Matrix,
    pub samples: usize,
}

impl CovarianceReport {
    fn new(fluct: &[Vec<f64>], q: &Matrix) -> Result<Self> {
        let raw = CovarianceEstimate::from_samples(fluct)?;
        let rotated_samples: Vec<Vec<f64>> = fluct.iter().map(|x| q.matvec(x)).collect();
        let rot = CovarianceEstimate::from_samples(&rotated_samples)?;
        let rotated = q.matmul(&raw.cov).matmul(&q.transpose());
        let n = q.rows;
        let target_diag: Vec<f64> = (0..n).map(|k| 1.0 / (k + 1) as f64).collect();
        let mut off_diag_max: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off_diag_max = off_diag_max.max(rotated[(i, j)].abs());
                }
            }
        }
        let diag_rel_err =
            (0..n).map(|i| (rotated[(i, i)] - target_diag[i]).abs() / target_diag[i]).collect();
        Ok(CovarianceReport {
            sigma_hat: raw.cov,
            rotated,
            target_diag,
            off_diag_max,
            diag_rel_err,
            mc_stderr: rot.stderr,
            samples: fluct.len(),
        })
    }

    /// Diagonal within max(3 SE, rel_tol) of 1/(n+1); off-diagonal within 3 SE of 0.
    pub fn passes(&self, rel_tol: f64) -> bool {
        let n = self.rotated.rows;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { self.target_diag[i] } else { 0.0 };
                within(self.rotated[(i, j)], target, self.mc_stderr[(i, j)], rel_tol)
            })
        })
    }

    pub fn trace(&self) -> f64 {
        (0..self.sigma_hat.rows).map(|i| self.sigma_hat[(i, i)]).sum()
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    Ok(())
}

/// Covariance of √(β/2)(λ − z) for Gaussian β-ensemble eigenvalues, rotated by Q.
pub fn clt_covariance_gaussian(beta: f64, n: usize, samples: usize, seed: u64) -> Result<CovarianceReport> {
    check_samples(samples)?;
    let z = hermite_roots(n, 1.0)?;
    let q = build_q_matrix_gaussian(n)?;
    let c = (beta / 2.0).sqrt();
    let fluct = draw(samples, |m| {
        let lam = sample_gbe_with(beta, n, &mut path_rng(seed, m))?;
        Ok(lam.iter().zip(z.iter()).map(|(l, z)| c * (l - z)).collect())
    })?;
    CovarianceReport::new(&fluct, &q)
}

/// Covariance of √(2β)(√λ − √z) for Laguerre β-ensemble eigenvalues, rotated by Q.
pub fn clt_covariance_laguerre(
    beta: f64,
    n: usize,
    alpha: f64,
    samples: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    check_samples(samples)?;
    let z = laguerre_roots(n, alpha, 1.0)?;
    let q = build_q_matrix_laguerre(n, alpha)?;
    let c = (2.0 * beta).sqrt();
    let fluct = draw(samples, |m| {
        let lam = sample_ble_with(beta, alpha, n, &mut path_rng(seed, m))?;
        Ok(lam.iter().zip(z.iter()).map(|(l, z)| c * (l.sqrt() - z.sqrt())).collect())
    })?;
    CovarianceReport::new(&fluct, &q)
}

fn draw(samples: usize, f: impl Fn(usize) -> Result<Vec<f64>> + Sync + Send) -> Result<Vec<Vec<f64>>> {
    (0..samples).into_par_iter().map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CltKind {
    Gaussian,
    Laguerre { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveCltReport {
    pub kind: CltKind,
    pub estimate: CovarianceEstimate,
    /// Target variances; all cross-covariances target 0.
    pub target_var: Vec<f64>,
}

impl PrimitiveCltReport {
    pub fn passes(&self, rel_tol: f64) -> bool {
        let n = self.target_var.len();
        let c = &self.estimate.cov;
        let se = &self.estimate.stderr;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { self.target_var[i] } else { 0.0 };
                within(c[(i, j)], target, se[(i, j)], rel_tol)
            })
        })
    }

    /// Relative deviation of each empirical variance from its target.
    pub fn var_rel_err(&self) -> Vec<f64> {
        self.target_var
            .iter()
            .enumerate()
            .map(|(i, t)| (self.estimate.cov[(i, i)] - t).abs() / t)
            .collect()
    }
}

/// Statistics √(βN/2)(⟨L_N, Q_n⟩ − ⟨μ, Q_n⟩), n = 0..N−1, where L_N is the
/// empirical eigenvalue measure, μ the uniform measure on the limiting zeros
/// and Q_n the primitive of the n-th dual polynomial.
pub fn primitive_clt_check(
    beta: f64,
    n: usize,
    samples: usize,
    seed: u64,
    kind: CltKind,
) -> Result<PrimitiveCltReport> {
    check_samples(samples)?;
    let (sys, z, factor) = match kind {
        CltKind::Gaussian => (dual_hermite_system(n)?, hermite_roots(n, 1.0)?, 1.0),
        CltKind::Laguerre { alpha } => (
            dual_laguerre_system(n, alpha)?,
            laguerre_roots(n, alpha, 1.0)?,
            alpha + n as f64 - 1.0,
        ),
    };
    let prims: Vec<Poly> = (0..n).map(|k| primitive(&sys, k, false)).collect::<Result<_>>()?;
    let nf = n as f64;
    let centre: Vec<f64> = prims.iter().map(|p| z.iter().map(|&x| p.eval(x)).sum::<f64>() / nf).collect();
    let c = (beta * nf / 2.0).sqrt();
    let stats = draw(samples, |m| {
        let mut rng = path_rng(seed, m);
        let lam = match kind {
            CltKind::Gaussian => sample_gbe_with(beta, n, &mut rng)?,
            CltKind::Laguerre { alpha } => sample_ble_with(beta, alpha, n, &mut rng)?,
        };
        Ok(prims
            .iter()
            .zip(&centre)
            .map(|(p, mu)| c * (lam.iter().map(|&x| p.eval(x)).sum::<f64>() / nf - mu))
            .collect())
    })?;
    let estimate = CovarianceEstimate::from_samples(&stats)?;
    let target_var =
        (0..n).map(|k| factor * sys.squared_norms[k] / (k + 1) as f64).collect();
    Ok(PrimitiveCltReport { kind, estimate, target_var })
}

/// Ensemble mean and standard error of one scalar observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanEstimate {
    pub fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let (mut count, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for v in values {
            count += 1;
            let delta = v - mean;
            mean += delta / count as f64;
            m2 += delta * (v - mean);
        }
        let stderr = if count > 1 { (m2 / (count - 1) as f64 / count as f64).sqrt() } else { 0.0 };
        MeanEstimate { mean, stderr }
    }
}

/// Ŝ_n(t) = ensemble mean of (1/N)Σλ_i(t)^n, indexed `[record][order]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProcessEstimate {
    pub times: Vec<f64>,
    pub s_hat: Vec<Vec<MeanEstimate>>,
}

pub fn moment_process_estimate(ensemble: &PathEnsemble, max_order: usize) -> MomentProcessEstimate {
    let nf = ensemble.config.n as f64;
    let s_hat = (0..ensemble.records())
        .map(|r| {
            (0..=max_order)
                .map(|k| {
                    MeanEstimate::from_values(
                        ensemble.snapshot(r).map(|lam| lam.iter().map(|x| x.powi(k as i32)).sum::<f64>() / nf),
                    )
                })
                .collect()
        })
        .collect();
    MomentProcessEstimate { times: ensemble.times.clone(), s_hat }
}

/// Ensemble means of e_0..e_N(λ(t)), indexed `[record][k]`.
pub fn esp_process_estimate(ensemble: &PathEnsemble) -> Vec<Vec<MeanEstimate>> {
    let n = ensemble.config.n;
    (0..ensemble.records())
        .map(|r| {
            let esps: Vec<Vec<f64>> = ensemble.snapshot(r).map(elementary_symmetric).collect();
            (0..=n).map(|k| MeanEstimate::from_values(esps.iter().map(|e| e[k]))).collect()
        })
        .collect()
}

/// Time cross-moment of one fluctuation process against its Gaussian target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessCovariance {
    pub order: usize,
    pub s: f64,
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
}

impl ProcessCovariance {
    pub fn passes(&self) -> bool {
        within(self.estimate, self.target, self.stderr, 0.0)
    }
}

/// Covariance of η̃_n(s) and η̃_n(t) for a Dyson ensemble started at zero, where
/// η̃_n(t) = √(βN/2)(⟨L_N(t), Q̃_n(t,·)⟩ − ⟨μ_t, Q̃_n(t,·)⟩) and μ_t is uniform on
/// √t times the Hermite zeros. Target ⟨q_n,q_n⟩/(n+1)·(s∧t)^{n+1}.
pub fn process_clt_covariance(
    ensemble: &PathEnsemble,
    order: usize,
    s_record: usize,
    t_record: usize,
) -> Result<ProcessCovariance> {
    let cfg = &ensemble.config;
    let n = cfg.n;
    if cfg.initial.max_abs() != 0.0 {
        return Err(invalid("process fluctuations are defined here for the zero start only"));
    }
    for r in [s_record, t_record] {
        if r >= ensemble.records() {
            return Err(Error::IndexOutOfRange { index: r, len: ensemble.records() });
        }
    }
    let sys = dual_hermite_system(n)?;
    let big_q = primitive(&sys, order, false)?;
    let z = hermite_roots(n, 1.0)?;
    let nf = n as f64;
    let c = (cfg.beta * nf / 2.0).sqrt();
    let (s, t) = (ensemble.times[s_record], ensemble.times[t_record]);
    if !(s > 0.0 && t > 0.0) {
        return Err(invalid("record times must be positive"));
    }
    // Q̃_n(t, x) = t^{(n+1)/2} Q_n(x/√t)
    let scaled = |time: f64, x: f64| time.sqrt().powi(order as i32 + 1) * big_q.eval(x / time.sqrt());
    let eta = |lam: &[f64], time: f64| {
        let emp: f64 = lam.iter().map(|&x| scaled(time, x)).sum::<f64>() / nf;
        let lim: f64 = z.iter().map(|&x| scaled(time, time.sqrt() * x)).sum::<f64>() / nf;
        c * (emp - lim)
    };
    let pairs: Vec<Vec<f64>> = (0..ensemble.paths())
        .map(|p| vec![eta(ensemble.get(p, s_record), s), eta(ensemble.get(p, t_record), t)])
        .collect();
    let est = CovarianceEstimate::from_samples(&pairs)?;
    Ok(ProcessCovariance {
        order,
        s,
        t,
        estimate: est.cov[(0, 1)],
        stderr: est.stderr[(0, 1)],
        target: sys.squared_norms[order] / (order + 1) as f64 * s.min(t).powi(order as i32 + 1),
    })
}
