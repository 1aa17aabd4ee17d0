//! Finite free additive convolution ⊞_N and related constructions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elemsym::{elementary_symmetric, newton_esp_from_power_sums, roots_of_monic};
use crate::elemsym::{MonicPolynomial, RootTuple};
use crate::error::{invalid, Error, Result};
use crate::orthopoly::{eigen_tridiag, hermite_jacobi, laguerre_jacobi, DEFAULT_EIGEN_TOL};

/// Falling factorial n(n−1)···(n−k+1) as a float.
pub fn falling(n: f64, k: usize) -> f64 {
    (0..k).map(|m| n - m as f64).product()
}

/// Binomial coefficient C(n, k) as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, m| acc * (n - m) as f64 / (m + 1) as f64)
}

fn check_same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// Convolution in coefficient space: both inputs are (e_0..e_N).
///
/// e_k(c) = Σ_{i+j=k} (N−i)!(N−j)!/(N!(N−k)!) e_i(a) e_j(b), with the weight
/// built as the ratio Π_{m<i}(N−j−m)/(N−m) so nothing overflows. Symmetric
/// pairs are added together, so swapping the arguments gives identical bits.
pub fn boxplus_esp(ea: &[f64], eb: &[f64]) -> Result<Vec<f64>> {
    check_same_n(ea.len(), eb.len())?;
    let n = ea.len() - 1;
    let nf = n as f64;
    let mut ec = vec![0.0; n + 1];
    for (k, slot) in ec.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=k / 2 {
            let j = k - i;
            if j > n {
                continue;
            }
            let w: f64 = (0..i).map(|m| (nf - j as f64 - m as f64) / (nf - m as f64)).product();
            acc += if i == j {
                w * (ea[i] * eb[j])
            } else {
                w * (ea[i] * eb[j] + ea[j] * eb[i])
            };
        }
        *slot = acc;
    }
    Ok(ec)
}

/// a ⊞_N b. A non-positive `tol` selects the default root tolerance.
pub fn boxplus(a: &RootTuple, b: &RootTuple, tol: f64) -> Result<RootTuple> {
    check_same_n(a.n(), b.n())?;
    let ec = boxplus_esp(&elementary_symmetric(a), &elementary_symmetric(b))?;
    solve(ec, tol)
}

fn solve(alpha: Vec<f64>, tol: f64) -> Result<RootTuple> {
    let p = MonicPolynomial::from_alpha(alpha)?;
    let tol = if tol > 0.0 { tol } else { p.default_tol() };
    roots_of_monic(&p, tol)
}

/// Differential operator Σ_k c_k D^k, kept to order N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FFFOperator {
    pub coeffs: Vec<f64>,
    pub degree: usize,
}

impl FFFOperator {
    pub fn identity(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = 1.0;
        FFFOperator { coeffs, degree: n }
    }

    /// Product of operators with terms of order above N dropped.
    pub fn compose(&self, other: &FFFOperator) -> Result<FFFOperator> {
        check_same_n(self.degree, other.degree)?;
        let n = self.degree;
        let mut coeffs = vec![0.0; n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Ok(FFFOperator { coeffs, degree: n })
    }

    /// The operator applied to x^N, as ascending monomial coefficients.
    pub fn apply_to_monomial(&self) -> Vec<f64> {
        let n = self.degree;
        let mut asc = vec![0.0; n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            asc[n - k] = c * falling(n as f64, k);
        }
        asc
    }

    /// Inverse transform: the monic polynomial p with p̂(D) = self.
    pub fn to_polynomial(&self) -> Result<MonicPolynomial> {
        let n = self.degree as f64;
        let alpha = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| sign(k) * c * falling(n, k))
            .collect();
        MonicPolynomial::from_alpha(alpha)
    }
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// c_k = (−1)^k α_k / (k!·C(N,k)).
pub fn fff(p: &MonicPolynomial) -> FFFOperator {
    let n = p.degree();
    let coeffs = p
        .alpha()
        .iter()
        .enumerate()
        .map(|(k, a)| sign(k) * a / falling(n as f64, k))
        .collect();
    FFFOperator { coeffs, degree: n }
}

/// a ⊞_N b computed as the inverse transform of the product of transforms.
pub fn fff_product_convolution(a: &RootTuple, b: &RootTuple) -> Result<RootTuple> {
    check_same_n(a.n(), b.n())?;
    let pa = fff(&MonicPolynomial::from_roots(a));
    let pb = fff(&MonicPolynomial::from_roots(b));
    let r = pa.compose(&pb)?.to_polynomial()?;
    roots_of_monic(&r, r.default_tol())
}

/// √t times the zeros of the degree-N Hermite polynomial.
pub fn hermite_roots(n: usize, t: f64) -> Result<RootTuple> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("scale must be >= 0, got {t}")));
    }
    let z = eigen_tridiag(&hermite_jacobi(n)?, DEFAULT_EIGEN_TOL);
    let mut z = z.into_vec();
    // enforce the exact reflection symmetry of the spectrum
    for i in 0..n / 2 {
        let v = 0.5 * (z[n - 1 - i] - z[i]);
        z[i] = -v;
        z[n - 1 - i] = v;
    }
    if n % 2 == 1 {
        z[n / 2] = 0.0;
    }
    let rt = t.sqrt();
    Ok(RootTuple::from_sorted(z.into_iter().map(|x| rt * x).collect()))
}

/// t times the zeros of L_N^{(α)}.
pub fn laguerre_roots(n: usize, alpha: f64, t: f64) -> Result<RootTuple> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("scale must be >= 0, got {t}")));
    }
    Ok(eigen_tridiag(&laguerre_jacobi(n, alpha)?, DEFAULT_EIGEN_TOL).scaled(t))
}

/// Complex points s_1..s_N with (1/N)Σ(z − s_i)^N = ∏(z − a_i); unordered.
#[derive(Debug, Clone, PartialEq)]
pub struct MKLift {
    pub s: Vec<Complex64>,
    pub n: usize,
}

const DK_ITERATIONS: usize = 500;
const DK_RESTARTS: usize = 5;

/// Solve for the lift via power sums, Newton's identities and Durand–Kerner.
/// `tol` bounds the final Durand–Kerner step relative to the root scale.
pub fn markov_krein_lift(a: &RootTuple, tol: f64) -> Result<MKLift> {
    let n = a.n();
    let centre = a.iter().sum::<f64>() / n as f64;
    let e = elementary_symmetric(&a.shifted(-centre));
    let power_sums: Vec<f64> =
        (1..=n).map(|k| n as f64 * e[k] / binomial(n, k)).collect();
    let es = newton_esp_from_power_sums(&power_sums);
    let scale = es
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v.abs().powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    let shift = Complex64::new(centre, 0.0);
    if scale == 0.0 || n == 1 {
        return Ok(MKLift { s: vec![shift; n], n });
    }
    // monic z^N − e_1 z^{N−1} + … in the variable z/scale
    let desc: Vec<f64> =
        es.iter().enumerate().map(|(k, v)| sign(k) * v / scale.powi(k as i32)).collect();
    let roots = durand_kerner(&desc, tol)?;
    Ok(MKLift { s: roots.into_iter().map(|z| z * scale + shift).collect(), n })
}

fn durand_kerner(desc: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    let n = desc.len() - 1;
    let eval = |z: Complex64| desc.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6b_6c69_6674);
    let seed = Complex64::new(0.4, 0.9);
    for attempt in 0..=DK_RESTARTS {
        let mut z: Vec<Complex64> = if attempt == 0 {
            (0..n).map(|i| seed.powu(i as u32 + 1)).collect()
        } else {
            (0..n)
                .map(|_| {
                    let r = 0.5 + rng.random::<f64>();
                    Complex64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
                })
                .collect()
        };
        for _ in 0..DK_ITERATIONS {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if j != i {
                        denom *= z[i] - z[j];
                    }
                }
                if denom.norm() == 0.0 {
                    denom = Complex64::new(f64::EPSILON, 0.0);
                }
                let step = eval(z[i]) / denom;
                z[i] -= step;
                max_step = max_step.max(step.norm());
            }
            if !max_step.is_finite() {
                break;
            }
            if max_step < tol {
                return Ok(z);
            }
        }
    }
    Err(Error::NoConvergence { attempts: DK_RESTARTS + 1 })
}

/// Inverse of [`markov_krein_lift`]: e_k(a) = C(N,k)·(1/N)Σ s_i^k, then real roots.
pub fn markov_krein_project(lift: &MKLift, tol: f64) -> Result<RootTuple> {
    let n = lift.n;
    if lift.s.len() != n || n == 0 {
        return Err(Error::DimensionMismatch { left: n, right: lift.s.len() });
    }
    let centre = lift.s.iter().sum::<Complex64>() / n as f64;
    if centre.im.abs() > tol * centre.norm().max(1.0) {
        return Err(Error::NotRealRooted(format!("lift centroid has imaginary part {}", centre.im)));
    }
    let centred: Vec<Complex64> = lift.s.iter().map(|z| z - centre.re).collect();
    let scale = centred.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut alpha = vec![1.0];
    let mut pow = vec![Complex64::new(1.0, 0.0); n];
    for k in 1..=n {
        let mut sum = Complex64::new(0.0, 0.0);
        for (p, z) in pow.iter_mut().zip(&centred) {
            *p *= z;
            sum += *p;
        }
        let ek = sum * binomial(n, k) / n as f64;
        let allowance = tol * binomial(n, k) * scale.powi(k as i32).max(f64::MIN_POSITIVE);
        if ek.im.abs() > allowance {
            return Err(Error::NotRealRooted(format!(
                "e_{k} has imaginary part {} above tolerance",
                ek.im
            )));
        }
        alpha.push(ek.re);
    }
    let p = MonicPolynomial::from_alpha(alpha)?;
    Ok(roots_of_monic(&p, p.default_tol())?.shifted(centre.re))
}
