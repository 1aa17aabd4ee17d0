//! Jacobi matrices, Sturm-sequence eigenvalues, spectral measures and the
//! orthogonal (and dual orthogonal) polynomials they generate.

use serde::{Deserialize, Serialize};

use crate::elemsym::RootTuple;
use crate::error::{invalid, Error, Result};
use crate::poly::Poly;

/// Relative accuracy of eigenvalues returned by the default solvers.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-13;

/// Symmetric tridiagonal matrix with diagonal `a_1..a_N` and strictly positive
/// off-diagonal `b_1..b_{N−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("Jacobi matrix must be at least 1x1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { left: diag.len() - 1, right: offdiag.len() });
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(invalid("Jacobi matrix entries must be finite"));
        }
        if let Some(b) = offdiag.iter().find(|&&b| b <= 0.0) {
            return Err(invalid(format!("off-diagonal entries must be positive, got {b}")));
        }
        Ok(JacobiMatrix { diag, offdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Both sequences reversed.
    pub fn dual(&self) -> JacobiMatrix {
        let mut diag = self.diag.clone();
        let mut offdiag = self.offdiag.clone();
        diag.reverse();
        offdiag.reverse();
        JacobiMatrix { diag, offdiag }
    }

    /// Values of the monic recurrence polynomials p_0..p_N at `x`, and p_N′(x).
    pub fn monic_values(&self, x: f64) -> (Vec<f64>, f64) {
        let n = self.n();
        let mut p = Vec::with_capacity(n + 1);
        p.push(1.0);
        p.push(x - self.diag[0]);
        let (mut dprev, mut dcur) = (0.0, 1.0);
        for m in 1..n {
            let b2 = self.offdiag[m - 1] * self.offdiag[m - 1];
            let shift = x - self.diag[m];
            let next = shift * p[m] - b2 * p[m - 1];
            let dnext = p[m] + shift * dcur - b2 * dprev;
            p.push(next);
            dprev = dcur;
            dcur = dnext;
        }
        (p, dcur)
    }

    /// Squared norms h_n = b_1²···b_n², n = 0..N−1.
    pub fn squared_norms(&self) -> Vec<f64> {
        let mut h = Vec::with_capacity(self.n());
        h.push(1.0);
        for b in &self.offdiag {
            let last = *h.last().unwrap();
            h.push(last * b * b);
        }
        h
    }
}

/// J_N^{(H)}: zero diagonal, off-diagonal (√1, …, √(N−1)); det(x − J) = H_N.
pub fn hermite_jacobi(n: usize) -> Result<JacobiMatrix> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    Ok(JacobiMatrix { diag: vec![0.0; n], offdiag: (1..n).map(|k| (k as f64).sqrt()).collect() })
}

/// J_{α,N}: diagonal α + 2k, off-diagonal √k·√(α + k − 1), k = 1..N−1.
pub fn laguerre_jacobi(n: usize, alpha: f64) -> Result<JacobiMatrix> {
    check_laguerre(n, alpha)?;
    Ok(JacobiMatrix {
        diag: (0..n).map(|k| alpha + 2.0 * k as f64).collect(),
        offdiag: (1..n).map(|k| (k as f64).sqrt() * (alpha + k as f64 - 1.0).sqrt()).collect(),
    })
}

/// Tridiagonal product of the β → ∞ bidiagonal Laguerre factor with its transpose.
///
/// The factor is lower bidiagonal with diagonal √(α+N−i) and subdiagonal √(N−i);
/// the product taken is factor·factorᵀ. It shares its spectrum with
/// [`laguerre_jacobi`].
pub fn laguerre_freezing_matrix(n: usize, alpha: f64) -> Result<JacobiMatrix> {
    check_laguerre(n, alpha)?;
    let nf = n as f64;
    let d: Vec<f64> = (1..=n).map(|i| (alpha + nf - i as f64).sqrt()).collect();
    let s: Vec<f64> = (1..n).map(|i| (nf - i as f64).sqrt()).collect();
    let diag = (0..n)
        .map(|i| d[i] * d[i] + if i > 0 { s[i - 1] * s[i - 1] } else { 0.0 })
        .collect();
    let offdiag = (0..n - 1).map(|i| d[i] * s[i]).collect();
    Ok(JacobiMatrix { diag, offdiag })
}

fn check_laguerre(n: usize, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("Laguerre parameter alpha must be > 0, got {alpha}")));
    }
    Ok(())
}

/// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots).
fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        }
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending, by bisection on
/// the Sturm count. Off-diagonal entries may have any sign. Each bracket is
/// shrunk to a thousandth of `tol` times the Gershgorin norm (or until it stops
/// shrinking), leaving every eigenvalue well within `tol`·norm.
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64], tol: f64) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n, "off-diagonal length must be n - 1");
    if n == 1 {
        return vec![diag[0]];
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    let norm = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let max_b2 = offdiag.iter().fold(1.0f64, |m, b| m.max(b * b));
    let pivmin = f64::MIN_POSITIVE * max_b2;
    let width = (1e-3 * tol * norm).max(f64::MIN_POSITIVE);
    lo -= 2.0 * f64::EPSILON * norm;
    hi += 2.0 * f64::EPSILON * norm;

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // Eigenvalues are found in order, so the previous one is a valid lower bracket.
        let mut a = out.last().map_or(lo, |&prev: &f64| prev.max(lo));
        let mut b = hi;
        if sturm_count(diag, offdiag, a, pivmin) > k {
            a = lo;
        }
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= width || mid <= a || mid >= b {
                out.push(mid);
                break;
            }
            if sturm_count(diag, offdiag, mid, pivmin) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
    }
    out
}

/// All eigenvalues of `j`, ascending.
pub fn eigen_tridiag(j: &JacobiMatrix, tol: f64) -> RootTuple {
    RootTuple::from_sorted(tridiagonal_eigenvalues(&j.diag, &j.offdiag, tol))
}

/// Discrete probability measure Σ w_i δ_{λ_i}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub atoms: RootTuple,
    pub weights: Vec<f64>,
}

impl SpectralMeasure {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(&x, w)| w * f(x)).sum()
    }
}

/// 1 / Σ_j p̃_j(x)² over the orthonormal recurrence polynomials j = 0..N−1.
fn orthonormal_weight(j: &JacobiMatrix, x: f64) -> f64 {
    let n = j.n();
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut log10_scale = 0i32;
    for m in 0..n - 1 {
        let b_prev = if m > 0 { j.offdiag[m - 1] } else { 0.0 };
        let next = ((x - j.diag[m]) * cur - b_prev * prev) / j.offdiag[m];
        prev = cur;
        cur = next;
        sum += cur * cur;
        if (m + 1) % 10 == 0 && cur.abs() > 1e100 {
            prev *= 1e-100;
            cur *= 1e-100;
            sum *= 1e-200;
            log10_scale += 200;
        }
    }
    if log10_scale > 0 {
        1.0 / (sum * 10f64.powi(log10_scale))
    } else {
        1.0 / sum
    }
}

/// Atoms are the eigenvalues of `j`; weights are squared first components of
/// the normalised eigenvectors, from the orthonormal-polynomial formula.
pub fn spectral_measure(j: &JacobiMatrix, tol: f64) -> SpectralMeasure {
    let atoms = eigen_tridiag(j, tol);
    let weights = atoms.iter().map(|&x| orthonormal_weight(j, x)).collect();
    SpectralMeasure { atoms, weights }
}

/// Orthonormal recurrence values p̃_0(x)..p̃_{N−1}(x), unscaled.
fn orthonormal_values(diag: &[f64], offdiag: &[f64], x: f64) -> Vec<f64> {
    let n = diag.len();
    let mut v = Vec::with_capacity(n);
    v.push(1.0);
    for m in 0..n - 1 {
        let prev = if m > 0 { offdiag[m - 1] * v[m - 1] } else { 0.0 };
        v.push(((x - diag[m]) * v[m] - prev) / offdiag[m]);
    }
    v
}

/// Weights h_{N−1} / (p_{N−1}(λ) p_N′(λ)) from the Christoffel–Darboux identity.
///
/// `atoms` must be the full spectrum of `j`. p_N′(λ_i) is taken as
/// Π_{k≠i}(λ_i − λ_k). At an eigenvalue the orthonormal value p̃_{N−1}(λ) equals
/// the reciprocal of the same quantity for the reversed matrix, so it is read
/// off whichever end of the recurrence suffers less cancellation.
pub fn christoffel_darboux_weights(j: &JacobiMatrix, atoms: &[f64]) -> Vec<f64> {
    let n = j.n();
    if n == 1 {
        return vec![1.0];
    }
    let h_last = *j.squared_norms().last().unwrap();
    let rev = j.dual();
    let growth = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs())) / v[n - 1].abs();
    atoms
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let fwd = orthonormal_values(&j.diag, &j.offdiag, x);
            let bwd = orthonormal_values(&rev.diag, &rev.offdiag, x);
            let last = if growth(&fwd) <= growth(&bwd) { fwd[n - 1] } else { 1.0 / bwd[n - 1] };
            h_last.sqrt() / (last * char_derivative(atoms, i))
        })
        .collect()
}

fn char_derivative(atoms: &[f64], i: usize) -> f64 {
    atoms.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &y)| atoms[i] - y).product()
}

/// Weights of the dual matrix's spectral measure, p_{N−1}(λ)/p_N′(λ), evaluated
/// with the recurrence of `j` itself.
pub fn dual_weights(j: &JacobiMatrix, atoms: &[f64]) -> Vec<f64> {
    let n = j.n();
    atoms
        .iter()
        .map(|&x| {
            let (p, dp_n) = j.monic_values(x);
            p[n - 1] / dp_n
        })
        .collect()
}

/// Monic orthogonal polynomials q_0..q_{N−1} generated by a Jacobi matrix,
/// orthogonal with respect to its spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalSystem {
    pub source: JacobiMatrix,
    pub squared_norms: Vec<f64>,
}

impl OrthogonalSystem {
    pub fn new(source: JacobiMatrix) -> Self {
        let squared_norms = source.squared_norms();
        OrthogonalSystem { source, squared_norms }
    }

    pub fn len(&self) -> usize {
        self.source.n()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// q_0..q_N; the last one is the characteristic polynomial of the source.
    pub fn monic_polynomials(&self) -> Vec<Poly> {
        let j = &self.source;
        let n = j.n();
        let mut q = Vec::with_capacity(n + 1);
        q.push(Poly::constant(1.0));
        q.push(Poly::new(vec![-j.diag[0], 1.0]));
        for m in 1..n {
            let b2 = j.offdiag[m - 1] * j.offdiag[m - 1];
            let shifted = Poly::new(vec![-j.diag[m], 1.0]).mul(&q[m]);
            q.push(shifted.add(&q[m - 1].scale(-b2)));
        }
        q
    }

    pub fn characteristic_polynomial(&self) -> Poly {
        self.monic_polynomials().pop().unwrap()
    }

    pub fn polynomial(&self, n: usize) -> Result<Poly> {
        self.check_index(n)?;
        Ok(self.monic_polynomials().swap_remove(n))
    }

    /// q_n / √⟨q_n, q_n⟩.
    pub fn orthonormal(&self, n: usize) -> Result<Poly> {
        Ok(self.polynomial(n)?.scale(1.0 / self.squared_norms[n].sqrt()))
    }

    /// Values q_0(x)..q_{N−1}(x) by the recurrence.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let (mut p, _) = self.source.monic_values(x);
        p.pop();
        p
    }

    /// Values q̂_0(x)..q̂_{N−1}(x).
    pub fn eval_all_orthonormal(&self, x: f64) -> Vec<f64> {
        self.eval_all(x).iter().zip(&self.squared_norms).map(|(q, h)| q / h.sqrt()).collect()
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.len() {
            return Err(Error::IndexOutOfRange { index: n, len: self.len() });
        }
        Ok(())
    }
}

/// Duals of the first N Hermite polynomials: q_{n+1} = x q_n − (N − n) q_{n−1},
/// orthogonal for the uniform measure on the zeros of H_N.
pub fn dual_hermite_system(n: usize) -> Result<OrthogonalSystem> {
    Ok(OrthogonalSystem::new(hermite_jacobi(n)?.dual()))
}

/// Duals of the first N Laguerre polynomials, orthogonal for
/// Σ z_i δ_{z_i} / (N(α + N − 1)) over the zeros of L_N^{(α)}.
pub fn dual_laguerre_system(n: usize, alpha: f64) -> Result<OrthogonalSystem> {
    Ok(OrthogonalSystem::new(laguerre_jacobi(n, alpha)?.dual()))
}

/// Antiderivative of q_n (or of q̂_n when `orthonormal`) with zero constant term.
pub fn primitive(sys: &OrthogonalSystem, n: usize, orthonormal: bool) -> Result<Poly> {
    let q = if orthonormal { sys.orthonormal(n)? } else { sys.polynomial(n)? };
    Ok(q.integral())
}

/// Q̃_n(t, x) = t^{(n+1)/2} Q_n(x/√t).
pub fn scaled_primitive(sys: &OrthogonalSystem, n: usize, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid(format!("time must be positive, got {t}")));
    }
    let big_q = primitive(sys, n, false)?;
    let rt = t.sqrt();
    Ok(rt.powi(n as i32 + 1) * big_q.eval(x / rt))
}
