//! Deterministic β → ∞ limits of the Dyson and Laguerre processes.
//!
//! The limiting particles are the roots of x^N − g_1(t)x^{N−1} + … where the
//! g_k solve a lower-triangular linear ODE system. Its solutions are
//! polynomials in t and are built here exactly, coefficient by coefficient.

use serde::{Deserialize, Serialize};

use crate::elemsym::{elementary_symmetric, roots_of_monic, MonicPolynomial, RootTuple};
use crate::error::{invalid, Error, Result};
use crate::finfree::{boxplus, hermite_roots, laguerre_roots};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GkKind {
    Gaussian,
    Laguerre { alpha: f64 },
}

/// g_0(t), …, g_N(t) as exact polynomials in t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GkTrajectory {
    pub coeff_polys: Vec<Poly>,
    pub kind: GkKind,
    pub initial: RootTuple,
}

impl GkTrajectory {
    pub fn n(&self) -> usize {
        self.initial.n()
    }

    /// (g_0(t), …, g_N(t)).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.coeff_polys.iter().map(|p| p.eval(t)).collect()
    }

    /// Right-hand side of the ODE for g_k, as a polynomial in t.
    pub fn rhs(&self, k: usize) -> Poly {
        let n = self.n() as f64;
        let kf = k as f64;
        match self.kind {
            GkKind::Gaussian if k >= 2 => {
                self.coeff_polys[k - 2].scale(-(n - kf + 1.0) * (n - kf + 2.0) / 2.0)
            }
            GkKind::Gaussian => Poly::zero(),
            GkKind::Laguerre { alpha } if k >= 1 => {
                self.coeff_polys[k - 1].scale((n - kf + 1.0) * (n - kf + alpha))
            }
            GkKind::Laguerre { .. } => Poly::zero(),
        }
    }
}

/// g_k(t) = e_k(a) − (N−k+1)(N−k+2)/2 ∫₀ᵗ g_{k−2}.
pub fn gaussian_gk(initial: &RootTuple) -> GkTrajectory {
    let n = initial.n();
    let e = elementary_symmetric(initial);
    let mut polys: Vec<Poly> = Vec::with_capacity(n + 1);
    for (k, &ek) in e.iter().enumerate() {
        let mut g = Poly::constant(ek);
        if k >= 2 {
            let c = (n - k + 1) as f64 * (n - k + 2) as f64 / 2.0;
            g = g.add(&polys[k - 2].integral().scale(-c));
        }
        polys.push(g);
    }
    GkTrajectory { coeff_polys: polys, kind: GkKind::Gaussian, initial: initial.clone() }
}

/// g_k(t) = e_k(a) + (N−k+1)(N−k+α) ∫₀ᵗ g_{k−1}.
pub fn laguerre_gk(initial: &RootTuple, alpha: f64) -> Result<GkTrajectory> {
    check_alpha(alpha)?;
    if initial.iter().any(|&a| a < 0.0) {
        return Err(invalid("Laguerre initial positions must be nonnegative"));
    }
    let n = initial.n();
    let e = elementary_symmetric(initial);
    let mut polys: Vec<Poly> = Vec::with_capacity(n + 1);
    for (k, &ek) in e.iter().enumerate() {
        let mut g = Poly::constant(ek);
        if k >= 1 {
            let c = (n - k + 1) as f64 * ((n - k) as f64 + alpha);
            g = g.add(&polys[k - 1].integral().scale(c));
        }
        polys.push(g);
    }
    Ok(GkTrajectory { coeff_polys: polys, kind: GkKind::Laguerre { alpha }, initial: initial.clone() })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must be > 0, got {alpha}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Limit positions at time t: the roots of the polynomial with e_k = g_k(t).
/// A non-positive `tol` selects the default root tolerance.
pub fn limit_roots(traj: &GkTrajectory, t: f64, tol: f64) -> Result<RootTuple> {
    check_time(t)?;
    let p = MonicPolynomial::from_alpha(traj.eval(t))?;
    let tol = if tol > 0.0 { tol } else { p.default_tol() };
    roots_of_monic(&p, tol)
}

/// a ⊞_N √t·(Hermite zeros).
pub fn gaussian_limit_closed(initial: &RootTuple, t: f64) -> Result<RootTuple> {
    check_time(t)?;
    boxplus(initial, &hermite_roots(initial.n(), t)?, 0.0)
}

/// ½(y_{N+1}², …, y_{2N}²) ⊞_N t·(zeros of L_N^{(α−N+½)}), where y is the
/// Gaussian limit at time t started from the symmetric tuple ±√(2a_i).
pub fn laguerre_limit_closed(initial: &RootTuple, alpha: f64, t: f64) -> Result<RootTuple> {
    check_time(t)?;
    let n = initial.n();
    if !(alpha > n as f64 - 0.5) {
        return Err(invalid(format!(
            "closed form needs alpha > N - 1/2 = {}, got {alpha}",
            n as f64 - 0.5
        )));
    }
    if initial.iter().any(|&a| a < 0.0) {
        return Err(invalid("Laguerre initial positions must be nonnegative"));
    }
    let half: Vec<f64> = initial.iter().map(|&a| (2.0 * a).sqrt()).collect();
    let mut sym: Vec<f64> = half.iter().map(|v| -v).collect();
    sym.extend(half);
    let y = gaussian_limit_closed(&RootTuple::new(sym)?, t)?;
    let x = symmetric_square_map(&y)?;
    boxplus(&x, &laguerre_roots(n, alpha - n as f64 + 0.5, t)?, 0.0)
}

/// ½ y² over the upper half of a reflection-symmetric tuple. For odd sizes the
/// middle entry (zero) is left out.
pub fn symmetric_square_map(y: &RootTuple) -> Result<RootTuple> {
    let m = y.n();
    let half = m / 2;
    if half == 0 {
        return Err(invalid("symmetric tuple must have at least two entries"));
    }
    let scale = y.max_abs().max(1.0);
    let mut mismatch: f64 = (0..half).map(|i| (y[i] + y[m - 1 - i]).abs()).fold(0.0, f64::max);
    if m % 2 == 1 {
        mismatch = mismatch.max(y[half].abs());
    }
    if mismatch > 1e-9 * scale {
        return Err(Error::NotSymmetric { mismatch });
    }
    let upper = &y[m - half..];
    // average with the mirror image so both halves contribute
    let x = upper
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mirrored = 0.5 * (v - y[half - 1 - i]);
            0.5 * mirrored * mirrored
        })
        .collect();
    RootTuple::new(x)
}

/// u_0..u_{max_order} with u_{2n} = −(2n−1)u_{2n−2} + N Σ_{j<n} u_{2j}u_{2n−2−2j}
/// and vanishing odd entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub u: Vec<f64>,
    pub n: usize,
}

impl MomentSequence {
    /// m_k(t) = u_k t^{k/2}.
    pub fn moment(&self, k: usize, t: f64) -> f64 {
        self.u[k] * t.powf(k as f64 / 2.0)
    }
}

pub fn moment_sequence(n_sys: usize, max_order: usize) -> MomentSequence {
    let nf = n_sys as f64;
    let mut u = vec![0.0; max_order + 1];
    u[0] = 1.0;
    for m in 1..=max_order / 2 {
        let conv: f64 = (0..m).map(|j| u[2 * j] * u[2 * m - 2 - 2 * j]).sum();
        u[2 * m] = -((2 * m - 1) as f64) * u[2 * m - 2] + nf * conv;
    }
    MomentSequence { u, n: n_sys }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(v: &[f64]) -> RootTuple {
        RootTuple::new(v.to_vec()).unwrap()
    }

    fn coeffs_close(p: &Poly, expect: &[f64]) -> bool {
        let c = p.coeffs();
        (0..c.len().max(expect.len())).all(|j| {
            let a = c.get(j).copied().unwrap_or(0.0);
            let b = expect.get(j).copied().unwrap_or(0.0);
            (a - b).abs() <= 1e-12 * b.abs().max(1.0)
        })
    }

    #[test]
    fn gaussian_gk_examples() {
        let g = gaussian_gk(&RootTuple::zeros(2));
        assert!(coeffs_close(&g.coeff_polys[2], &[0.0, -1.0]));
        let g = gaussian_gk(&RootTuple::zeros(5));
        for k in [1, 3, 5] {
            assert!(coeffs_close(&g.coeff_polys[k], &[]));
        }
        let g = gaussian_gk(&rt(&[1.0, 2.0]));
        assert!(coeffs_close(&g.coeff_polys[1], &[3.0]));
        assert!(coeffs_close(&g.coeff_polys[2], &[2.0, -1.0]));
    }

    #[test]
    fn gaussian_gk_zero_start_closed_form() {
        // g_{2m}(t) = t^m (−1)^m / 2^m · N!/(m!(N−2m)!)
        let f = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
        for n in 1..=9 {
            let g = gaussian_gk(&RootTuple::zeros(n));
            for m in 0..=n / 2 {
                let c = (-0.5f64).powi(m as i32) * f(n) / (f(m) * f(n - 2 * m));
                let mut expect = vec![0.0; m + 1];
                expect[m] = c;
                assert!(coeffs_close(&g.coeff_polys[2 * m], &expect), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn laguerre_gk_examples() {
        let g = laguerre_gk(&RootTuple::zeros(2), 1.0).unwrap();
        assert!(coeffs_close(&g.coeff_polys[1], &[0.0, 4.0]));
        assert!(coeffs_close(&g.coeff_polys[2], &[0.0, 0.0, 2.0]));
        let g = laguerre_gk(&rt(&[1.0]), 2.0).unwrap();
        assert!(coeffs_close(&g.coeff_polys[1], &[1.0, 2.0]));
        let (n, alpha) = (4usize, 1.7);
        let g = laguerre_gk(&RootTuple::zeros(n), alpha).unwrap();
        for k in 0..=n {
            let mut c = 1.0;
            for j in 0..k {
                c *= (n - j) as f64 * ((n - j) as f64 + alpha - 1.0) / (j + 1) as f64;
            }
            let mut expect = vec![0.0; k + 1];
            expect[k] = c;
            assert!(coeffs_close(&g.coeff_polys[k], &expect), "k={k}");
        }
        assert!(laguerre_gk(&rt(&[-1.0, 1.0]), 1.0).is_err());
        assert!(laguerre_gk(&rt(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn trajectories_satisfy_their_odes() {
        for traj in [
            gaussian_gk(&rt(&[-1.3, 0.2, 0.9, 2.4, 3.0])),
            laguerre_gk(&rt(&[0.1, 0.5, 2.0, 3.3]), 2.25).unwrap(),
        ] {
            assert_eq!(traj.coeff_polys[0].coeffs(), &[1.0]);
            let e = elementary_symmetric(&traj.initial);
            for k in 0..=traj.n() {
                assert!((traj.coeff_polys[k].eval(0.0) - e[k]).abs() < 1e-14);
                let lhs = traj.coeff_polys[k].derivative();
                let rhs = traj.rhs(k);
                assert!(coeffs_close(&lhs, rhs.coeffs()), "k={k}");
            }
        }
    }

    #[test]
    fn limit_roots_examples() {
        let y = limit_roots(&gaussian_gk(&RootTuple::zeros(2)), 1.0, 0.0).unwrap();
        assert!(y.max_abs_diff(&rt(&[-1.0, 1.0])) < 1e-14);
        for n in 1..=8 {
            let y = limit_roots(&gaussian_gk(&RootTuple::zeros(n)), 2.5, 0.0).unwrap();
            assert!(y.max_abs_diff(&hermite_roots(n, 2.5).unwrap()) < 1e-10, "n={n}");
        }
        let s2 = 2f64.sqrt();
        let x = limit_roots(&laguerre_gk(&RootTuple::zeros(2), 1.0).unwrap(), 1.0, 0.0).unwrap();
        assert!(x.max_abs_diff(&rt(&[2.0 - s2, 2.0 + s2])) < 1e-13);
        assert!(limit_roots(&gaussian_gk(&RootTuple::zeros(2)), -1.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_closed_examples() {
        let s3 = 3f64.sqrt();
        let y = gaussian_limit_closed(&RootTuple::zeros(3), 4.0).unwrap();
        assert!(y.max_abs_diff(&rt(&[-2.0 * s3, 0.0, 2.0 * s3])) < 1e-13);
        let a = rt(&[-0.4, 1.0, 1.1, 3.0]);
        assert!(gaussian_limit_closed(&a, 0.0).unwrap().max_abs_diff(&a) < 1e-13);
        let s2 = 2f64.sqrt();
        let a = rt(&[-1.0, 1.0]);
        let y = gaussian_limit_closed(&a, 1.0).unwrap();
        assert!(y.max_abs_diff(&rt(&[-s2, s2])) < 1e-14);
        let ode = limit_roots(&gaussian_gk(&a), 1.0, 0.0).unwrap();
        assert!(y.max_abs_diff(&ode) < 1e-12);
    }

    #[test]
    fn laguerre_closed_examples() {
        for alpha in [2.6, 3.0, 7.5] {
            let x = laguerre_limit_closed(&RootTuple::zeros(3), alpha, 1.7).unwrap();
            assert!(x.max_abs_diff(&laguerre_roots(3, alpha, 1.7).unwrap()) < 1e-9);
        }
        let a = rt(&[0.0, 0.5, 2.0]);
        assert!(laguerre_limit_closed(&a, 3.0, 0.0).unwrap().max_abs_diff(&a) < 1e-12);
        let a = rt(&[1.0, 4.0]);
        let closed = laguerre_limit_closed(&a, 2.0, 1.0).unwrap();
        let ode = limit_roots(&laguerre_gk(&a, 2.0).unwrap(), 1.0, 0.0).unwrap();
        assert!(closed.max_abs_diff(&ode) < 1e-8, "{closed:?} vs {ode:?}");
        assert!(matches!(laguerre_limit_closed(&a, 1.5, 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(laguerre_limit_closed(&a, 1.0, 1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn square_map_examples() {
        let x = symmetric_square_map(&rt(&[-2.0, -1.0, 1.0, 2.0])).unwrap();
        assert_eq!(x.as_slice(), &[0.5, 2.0]);
        let x = symmetric_square_map(&rt(&[-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(x.as_slice(), &[0.5]);
        let x = symmetric_square_map(&RootTuple::zeros(4)).unwrap();
        assert_eq!(x.as_slice(), &[0.0, 0.0]);
        assert!(matches!(
            symmetric_square_map(&rt(&[-2.0, 1.0])),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn moment_sequence_examples() {
        for n in 1..=6 {
            assert_eq!(moment_sequence(n, 2).u[2], n as f64 - 1.0);
        }
        assert_eq!(moment_sequence(3, 4).u, vec![1.0, 0.0, 2.0, 0.0, 6.0]);
        let m = moment_sequence(3, 6);
        assert_eq!(m.u[3], 0.0);
        assert!((m.moment(4, 2.0) - 24.0).abs() < 1e-12);
    }
}
