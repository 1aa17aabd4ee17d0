//! Root tuples, elementary symmetric polynomials and real-rooted polynomial solving.

use std::ops::{Add, Deref, Div, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Ascending sequence of N ≥ 1 real numbers (ties allowed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootTuple {
    roots: Vec<f64>,
}

impl RootTuple {
    /// Sorts the input; rejects empty or non-finite tuples.
    pub fn new(mut roots: Vec<f64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(invalid("root tuple must have at least one entry"));
        }
        if roots.iter().any(|r| !r.is_finite()) {
            return Err(invalid("root tuple entries must be finite"));
        }
        roots.sort_by(f64::total_cmp);
        Ok(RootTuple { roots })
    }

    /// Caller guarantees `roots` is nonempty, finite and ascending.
    pub(crate) fn from_sorted(roots: Vec<f64>) -> Self {
        debug_assert!(!roots.is_empty());
        debug_assert!(roots.windows(2).all(|w| w[0] <= w[1]));
        RootTuple { roots }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, c: f64) -> Self {
        assert!(n >= 1, "root tuple size must be positive");
        RootTuple { roots: vec![c; n] }
    }

    pub fn n(&self) -> usize {
        self.roots.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.roots
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.roots
    }

    /// Multiplies every entry by `s`, re-sorting when `s < 0`.
    pub fn scaled(&self, s: f64) -> RootTuple {
        let mut roots: Vec<f64> = self.roots.iter().map(|r| r * s).collect();
        if s < 0.0 {
            roots.reverse();
        }
        RootTuple { roots }
    }

    pub fn shifted(&self, s: f64) -> RootTuple {
        RootTuple { roots: self.roots.iter().map(|r| r + s).collect() }
    }

    /// Largest entrywise distance; panics on a size mismatch.
    pub fn max_abs_diff(&self, other: &RootTuple) -> f64 {
        assert_eq!(self.n(), other.n(), "tuple sizes differ");
        self.roots
            .iter()
            .zip(&other.roots)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.roots.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

impl Deref for RootTuple {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.roots
    }
}

/// Degree-N monic polynomial Σ_k (−1)^k α_k x^{N−k}, stored through the signed
/// elementary symmetric values α_0 = 1, α_1, …, α_N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonicPolynomial {
    alpha: Vec<f64>,
}

impl MonicPolynomial {
    pub fn from_alpha(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(invalid("monic polynomial needs degree at least 1"));
        }
        if alpha[0] != 1.0 {
            return Err(invalid(format!("alpha_0 must be exactly 1, got {}", alpha[0])));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
        Ok(MonicPolynomial { alpha })
    }

    pub fn from_roots(roots: &RootTuple) -> Self {
        MonicPolynomial { alpha: elementary_symmetric(roots) }
    }

    pub fn degree(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Monomial coefficients in ascending powers of x.
    pub fn monomial_coeffs(&self) -> Vec<f64> {
        let n = self.degree();
        let mut asc = vec![0.0; n + 1];
        for (k, a) in self.alpha.iter().enumerate() {
            asc[n - k] = if k % 2 == 0 { *a } else { -*a };
        }
        asc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.monomial_coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Bound on the modulus of every root: 2·max_k |α_k|^{1/k}.
    pub fn root_bound(&self) -> f64 {
        self.alpha
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a.abs().powf(1.0 / k as f64))
            .fold(0.0, f64::max)
            * 2.0
    }

    /// 1e−12 · max(1, root bound).
    pub fn default_tol(&self) -> f64 {
        DEFAULT_REL_TOL * self.root_bound().max(1.0)
    }

    pub fn roots(&self) -> Result<RootTuple> {
        roots_of_monic(self, self.default_tol())
    }
}

pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// (e_0, …, e_N) by multiplying out ∏(1 + x_i s) one factor at a time.
pub fn elementary_symmetric(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e
}

/// ∂e_k/∂x_i at `x`, i.e. e_{k−1} of `x` with entry `i` (0-based) removed.
pub fn partial_esp(i: usize, k: usize, x: &[f64]) -> Result<f64> {
    let n = x.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let rest: Vec<f64> = x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
    Ok(elementary_symmetric(&rest)[k - 1])
}

/// Newton's identities: (p_1, …, p_N) ↦ (e_0, …, e_N) with
/// k·e_k = Σ_{j=1}^{k} (−1)^{j−1} e_{k−j} p_j.
pub fn newton_esp_from_power_sums<T>(power_sums: &[T]) -> Vec<T>
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let n = power_sums.len();
    let mut e: Vec<T> = Vec::with_capacity(n + 1);
    e.push(T::from(1.0));
    for k in 1..=n {
        let mut acc = T::from(0.0);
        for j in 1..=k {
            let term = e[k - j] * power_sums[j - 1];
            acc = if j % 2 == 1 { acc + term } else { acc - term };
        }
        e.push(acc / T::from(k as f64));
    }
    e
}

/// All N real roots, ascending, by recursive derivative interlacing.
///
/// The critical points of p split the line into N closed intervals, each
/// holding exactly one root of a real-rooted p; the sign of p at both ends of
/// each interval is known in advance, so every root is found by bisection.
/// An endpoint whose value is indistinguishable from zero at the working
/// tolerance is reported as a (multiple) root.
pub fn roots_of_monic(p: &MonicPolynomial, tol: f64) -> Result<RootTuple> {
    let n = p.degree();
    let bound = p.root_bound();
    if bound == 0.0 {
        return Ok(RootTuple::zeros(n));
    }
    let outer = bound * 1.000_001 + f64::MIN_POSITIVE;
    let rho = (tol / bound.max(1.0)).max(32.0 * n as f64 * f64::EPSILON);
    let roots = interlacing_roots(&p.monomial_coeffs(), outer, rho, tol)?;
    Ok(RootTuple::from_sorted(roots))
}

/// Horner value together with Σ|c_j||x|^j, the natural scale of rounding error.
fn eval_with_magnitude(asc: &[f64], x: f64) -> (f64, f64) {
    let ax = x.abs();
    asc.iter().rev().fold((0.0, 0.0), |(v, m), &c| (v * x + c, m * ax + c.abs()))
}

fn interlacing_roots(asc: &[f64], outer: f64, rho: f64, tol: f64) -> Result<Vec<f64>> {
    let n = asc.len() - 1;
    if n == 1 {
        return Ok(vec![-asc[0] / asc[1]]);
    }
    let deriv: Vec<f64> =
        (1..=n).map(|j| j as f64 * asc[j] / n as f64).collect();
    let critical = interlacing_roots(&deriv, outer, rho, tol)?;

    let classify = |x: f64| {
        let (v, m) = eval_with_magnitude(asc, x);
        (v, v.abs() <= rho * m)
    };

    let mut roots = Vec::with_capacity(n);
    for i in 0..n {
        let mut lo = if i == 0 { -outer } else { critical[i - 1] };
        let mut hi = if i == n - 1 { outer } else { critical[i] };
        if hi < lo {
            std::mem::swap(&mut lo, &mut hi);
        }
        // p has sign (−1)^{n−1−i} just left of the next root above this interval.
        let sign_hi = if (n - 1 - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        let (v_lo, zero_lo) = classify(lo);
        let (v_hi, zero_hi) = classify(hi);
        let root = match (zero_lo, zero_hi) {
            (true, true) => {
                if v_lo.abs() <= v_hi.abs() {
                    lo
                } else {
                    hi
                }
            }
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => {
                if v_hi * sign_hi < 0.0 || v_lo * sign_hi > 0.0 {
                    return Err(Error::NotRealRooted(format!(
                        "no sign change on [{lo:e}, {hi:e}] (values {v_lo:e}, {v_hi:e})"
                    )));
                }
                bisect(asc, lo, hi, sign_hi, tol)
            }
        };
        roots.push(root);
    }
    // Ties in the isolation can leave adjacent roots out of order by an ulp.
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn bisect(asc: &[f64], mut lo: f64, mut hi: f64, sign_hi: f64, tol: f64) -> f64 {
    let floor = tol * 1e-3;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= floor.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
            return mid;
        }
        let (v, _) = eval_with_magnitude(asc, mid);
        if v == 0.0 {
            return mid;
        }
        if v * sign_hi > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}
