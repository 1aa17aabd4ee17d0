//! Euler–Maruyama simulation of β-Dyson Brownian motion and the β-Laguerre
//! process, plus tridiagonal samplers of the static β-ensembles.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elemsym::RootTuple;
use crate::error::{invalid, Error, Result};
use crate::orthopoly::tridiagonal_eigenvalues;

/// Minimum particle gap used in the interaction terms is max(GAP_FLOOR, √h).
pub const GAP_FLOOR: f64 = 1e-8;
/// Any coordinate larger than this aborts the run.
pub const BLOWUP: f64 = 1e8;

const SAMPLER_EIGEN_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub beta: f64,
    pub n: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub t_end: f64,
    pub dt: f64,
    pub initial: RootTuple,
    pub seed: u64,
    pub paths: usize,
    /// Empty means "record only at t_end".
    #[serde(default)]
    pub record_times: Vec<f64>,
}

fn default_alpha() -> f64 {
    1.0
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 1.0) || !self.beta.is_finite() {
            return Err(invalid(format!("beta must be >= 1 for simulation, got {}", self.beta)));
        }
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        if self.initial.n() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: self.initial.n() });
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(invalid(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.paths == 0 {
            return Err(invalid("paths must be at least 1"));
        }
        if self.record_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(invalid("record times must be sorted"));
        }
        if self.record_times.iter().any(|&r| !(r >= 0.0 && r <= self.t_end)) {
            return Err(invalid("record times must lie in [0, t_end]"));
        }
        Ok(())
    }

    /// Number of uniform steps and the step length h = t_end / steps ≤ dt.
    pub fn grid(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, 0.0);
        }
        let steps = (self.t_end / self.dt).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }

    fn record_steps(&self) -> Vec<usize> {
        let (steps, h) = self.grid();
        let times = if self.record_times.is_empty() { vec![self.t_end] } else { self.record_times.clone() };
        times
            .iter()
            .map(|&r| if h == 0.0 { 0 } else { ((r / h).round() as usize).min(steps) })
            .collect()
    }
}

/// Recorded particle positions, laid out as `[path][record][particle]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub config: SimConfig,
    /// Grid times actually recorded (nearest grid point to each requested time).
    pub times: Vec<f64>,
    pub step: f64,
    /// Total number of gap clamps applied across all paths.
    pub gap_clamps: u64,
    data: Vec<f64>,
}

impl PathEnsemble {
    pub fn paths(&self) -> usize {
        self.config.paths
    }

    pub fn records(&self) -> usize {
        self.times.len()
    }

    pub fn get(&self, path: usize, record: usize) -> &[f64] {
        let n = self.config.n;
        let start = (path * self.records() + record) * n;
        &self.data[start..start + n]
    }

    /// All paths at one record index.
    pub fn snapshot(&self, record: usize) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.paths()).map(move |p| self.get(p, record))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Dyson,
    Laguerre,
}

/// Per-path generator: stream `path` of the ChaCha8 generator keyed by `seed`.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// dλ_i = √(2/β) db_i + Σ_{j≠i} dt/(λ_i − λ_j).
pub fn simulate_dyson(cfg: &SimConfig) -> Result<PathEnsemble> {
    cfg.validate()?;
    run(cfg, Family::Dyson)
}

/// dλ_i = (2/√β)√λ_i db_i + α dt + Σ_{j≠i} 2λ_i/(λ_i − λ_j) dt, reflected at 0.
pub fn simulate_laguerre(cfg: &SimConfig) -> Result<PathEnsemble> {
    cfg.validate()?;
    if !(cfg.alpha > 0.0) || !cfg.alpha.is_finite() {
        return Err(invalid(format!("alpha must be > 0, got {}", cfg.alpha)));
    }
    if cfg.initial.iter().any(|&a| a < 0.0) {
        return Err(invalid("Laguerre initial positions must be nonnegative"));
    }
    run(cfg, Family::Laguerre)
}

fn run(cfg: &SimConfig, family: Family) -> Result<PathEnsemble> {
    let (steps, h) = cfg.grid();
    let record_steps = cfg.record_steps();
    let results: Vec<Result<(Vec<f64>, u64)>> = (0..cfg.paths)
        .into_par_iter()
        .map(|p| simulate_path(cfg, family, steps, h, &record_steps, &mut path_rng(cfg.seed, p)))
        .collect();
    let mut data = Vec::with_capacity(cfg.paths * record_steps.len() * cfg.n);
    let mut gap_clamps = 0;
    for r in results {
        let (d, c) = r?;
        data.extend(d);
        gap_clamps += c;
    }
    Ok(PathEnsemble {
        config: cfg.clone(),
        times: record_steps.iter().map(|&s| s as f64 * h).collect(),
        step: h,
        gap_clamps,
        data,
    })
}

fn simulate_path(
    cfg: &SimConfig,
    family: Family,
    steps: usize,
    h: f64,
    record_steps: &[usize],
    rng: &mut impl Rng,
) -> Result<(Vec<f64>, u64)> {
    let n = cfg.n;
    let mut lam = cfg.initial.as_slice().to_vec();
    let mut out = Vec::with_capacity(record_steps.len() * n);
    let mut next_record = 0;
    let mut clamps = 0u64;
    let floor = GAP_FLOOR.max(h.sqrt());
    let noise = match family {
        Family::Dyson => (2.0 / cfg.beta).sqrt() * h.sqrt(),
        Family::Laguerre => 2.0 / cfg.beta.sqrt() * h.sqrt(),
    };
    let mut drift = vec![0.0; n];
    for step in 0..=steps {
        while next_record < record_steps.len() && record_steps[next_record] == step {
            out.extend_from_slice(&lam);
            next_record += 1;
        }
        if step == steps {
            break;
        }
        drift.iter_mut().for_each(|d| *d = 0.0);
        for i in 0..n {
            for j in i + 1..n {
                // sorted, so λ_i − λ_j ≤ 0; clamp antisymmetrically
                let mut gap = lam[i] - lam[j];
                if gap > -floor {
                    gap = -floor;
                    clamps += 1;
                }
                let inv = 1.0 / gap;
                match family {
                    Family::Dyson => {
                        drift[i] += inv;
                        drift[j] -= inv;
                    }
                    Family::Laguerre => {
                        drift[i] += 2.0 * lam[i] * inv;
                        drift[j] -= 2.0 * lam[j] * inv;
                    }
                }
            }
        }
        for i in 0..n {
            let xi: f64 = StandardNormal.sample(rng);
            lam[i] += match family {
                Family::Dyson => drift[i] * h + noise * xi,
                Family::Laguerre => (cfg.alpha + drift[i]) * h + noise * lam[i].max(0.0).sqrt() * xi,
            };
            if family == Family::Laguerre {
                lam[i] = lam[i].abs();
            }
        }
        let worst = lam.iter().fold(0.0f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY });
        if worst > BLOWUP {
            return Err(Error::StepUnstable { time: (step + 1) as f64 * h, magnitude: worst });
        }
        lam.sort_by(f64::total_cmp);
    }
    Ok((out, clamps))
}

/// One draw of the χ distribution with `k_dof` > 0 degrees of freedom.
pub fn chi_sample(k_dof: f64, rng: &mut impl Rng) -> f64 {
    let gamma = Gamma::new(k_dof / 2.0, 2.0).expect("degrees of freedom must be positive");
    gamma.sample(rng).sqrt()
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid(format!("beta must be > 0, got {beta}")));
    }
    Ok(())
}

/// Eigenvalues of the tridiagonal Gaussian β-ensemble model.
pub fn sample_gbe_with(beta: f64, n: usize, rng: &mut impl Rng) -> Result<RootTuple> {
    check_beta(beta)?;
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let rb = beta.sqrt();
    let diag: Vec<f64> = (0..n)
        .map(|_| std::f64::consts::SQRT_2 * rng.sample::<f64, _>(StandardNormal) / rb)
        .collect();
    let off: Vec<f64> = (1..n).map(|i| chi_sample((n - i) as f64 * beta, rng) / rb).collect();
    Ok(RootTuple::from_sorted(tridiagonal_eigenvalues(&diag, &off, SAMPLER_EIGEN_TOL)))
}

pub fn sample_gbe(beta: f64, n: usize, seed: u64) -> Result<RootTuple> {
    sample_gbe_with(beta, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Eigenvalues of BᵀB for the random lower-bidiagonal Laguerre factor B.
pub fn sample_ble_with(beta: f64, alpha: f64, n: usize, rng: &mut impl Rng) -> Result<RootTuple> {
    check_beta(beta)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must be > 0, got {alpha}")));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let rb = beta.sqrt();
    let nf = n as f64;
    let d: Vec<f64> = (1..=n).map(|i| chi_sample(beta * (alpha + nf - i as f64), rng) / rb).collect();
    let s: Vec<f64> = (1..n).map(|i| chi_sample(beta * (nf - i as f64), rng) / rb).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| d[i] * d[i] + if i + 1 < n { s[i] * s[i] } else { 0.0 })
        .collect();
    let off: Vec<f64> = (0..n - 1).map(|i| s[i] * d[i + 1]).collect();
    let ev = tridiagonal_eigenvalues(&diag, &off, SAMPLER_EIGEN_TOL);
    Ok(RootTuple::from_sorted(ev.into_iter().map(|v| v.max(0.0)).collect()))
}

pub fn sample_ble(beta: f64, alpha: f64, n: usize, seed: u64) -> Result<RootTuple> {
    sample_ble_with(beta, alpha, n, &mut ChaCha8Rng::seed_from_u64(seed))
}
