//! End-to-end acceptance suite. Every criterion prints one PASS/FAIL line with
//! its worst observed error and its runtime against the allowed budget; the
//! test fails if any criterion fails.

use std::time::{Duration, Instant};

use freezing_dyson::dynamics::{
    gaussian_gk, gaussian_limit_closed, laguerre_gk, laguerre_limit_closed, limit_roots,
    moment_sequence,
};
use freezing_dyson::elemsym::{elementary_symmetric, partial_esp};
use freezing_dyson::finfree::{
    boxplus, hermite_roots, laguerre_roots, markov_krein_lift, markov_krein_project,
};
use freezing_dyson::orthopoly::{
    christoffel_darboux_weights, dual_weights, eigen_tridiag, hermite_jacobi, laguerre_jacobi,
    spectral_measure, DEFAULT_EIGEN_TOL,
};
use freezing_dyson::stats::{
    clt_covariance_gaussian, clt_covariance_laguerre, esp_process_estimate, primitive_clt_check,
    process_clt_covariance, within, CltKind, DEFAULT_REL_TOL,
};
use freezing_dyson::stochastic::{simulate_dyson, simulate_laguerre, PathEnsemble, SimConfig};
use freezing_dyson::RootTuple;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Sorted tuple of `n` draws from [lo, hi) with all gaps at least `min_gap`.
fn spread_tuple(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, min_gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= min_gap) {
            return v;
        }
    }
}

fn c1_hermite_semigroup() -> Outcome {
    let scales = [0.25, 1.0, 4.0];
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        for &t in &scales {
            for &s in &scales {
                let lhs = boxplus(&hermite_roots(n, t).unwrap(), &hermite_roots(n, s).unwrap(), 0.0).unwrap();
                worst = worst.max(lhs.max_abs_diff(&hermite_roots(n, t + s).unwrap()));
            }
        }
    }
    outcome(worst < 1e-9, format!("max root error {worst:.2e} (< 1e-9)"))
}

fn c2_laguerre_convolution() -> Outcome {
    let alphas = [0.5, 1.0, 2.5];
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        for &a1 in &alphas {
            for &a2 in &alphas {
                let lhs = boxplus(
                    &laguerre_roots(n, a1, 1.0).unwrap(),
                    &laguerre_roots(n, a2, 1.0).unwrap(),
                    0.0,
                )
                .unwrap();
                let rhs = laguerre_roots(n, n as f64 + a1 + a2 - 1.0, 1.0).unwrap();
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
    }
    outcome(worst < 1e-8, format!("max root error {worst:.2e} (< 1e-8)"))
}

fn c3_dual_routes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_g, mut worst_l): (f64, f64) = (0.0, 0.0);
    for case in 0..100 {
        let n = 1 + case % 8;
        let g0 = RootTuple::new((0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        let l0 = RootTuple::new((0..n).map(|_| rng.random_range(0.0..4.0)).collect()).unwrap();
        let alpha = n as f64 - 0.5 + rng.random_range(0.1..3.0);
        for t in [0.1, 1.0, 4.0] {
            let ode = limit_roots(&gaussian_gk(&g0), t, 0.0).unwrap();
            worst_g = worst_g.max(ode.max_abs_diff(&gaussian_limit_closed(&g0, t).unwrap()));
            let ode = limit_roots(&laguerre_gk(&l0, alpha).unwrap(), t, 0.0).unwrap();
            worst_l = worst_l.max(ode.max_abs_diff(&laguerre_limit_closed(&l0, alpha, t).unwrap()));
        }
    }
    outcome(
        worst_g < 1e-8 && worst_l < 1e-8,
        format!("gaussian {worst_g:.2e}, laguerre {worst_l:.2e} (< 1e-8)"),
    )
}

fn c4_lemma_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 2 + case % 7;
        let x = spread_tuple(&mut rng, n, -5.0, 5.0, 0.05);
        let e = elementary_symmetric(&x);
        for k in 2..=n {
            let mut lhs = 0.0;
            for i in 0..n {
                let d = partial_esp(i, k, &x).unwrap();
                for j in 0..n {
                    if j != i {
                        lhs += d / (x[i] - x[j]);
                    }
                }
            }
            let rhs = -(((n - k + 1) * (n - k + 2)) as f64) / 2.0 * e[k - 2];
            worst = worst.max((lhs - rhs).abs() / rhs.abs());
        }
    }
    outcome(worst < 1e-9, format!("max relative error {worst:.2e} (< 1e-9)"))
}

fn c5_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let u = moment_sequence(n, 10).u;
        let z = eigen_tridiag(&hermite_jacobi(n).unwrap(), DEFAULT_EIGEN_TOL);
        for (k, &uk) in u.iter().enumerate() {
            let oracle = z.iter().map(|x| x.powi(k as i32)).sum::<f64>() / n as f64;
            let err = if uk == 0.0 { oracle.abs() } else { (uk - oracle).abs() / uk.abs() };
            worst = worst.max(err);
        }
    }
    outcome(worst < 1e-9, format!("max relative error {worst:.2e} (< 1e-9)"))
}

fn c6_dual_weights() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        let j = hermite_jacobi(n).unwrap();
        let dual = j.dual();
        let m = spectral_measure(&dual, DEFAULT_EIGEN_TOL);
        let cd = christoffel_darboux_weights(&dual, &m.atoms);
        let direct = dual_weights(&j, &m.atoms);
        for i in 0..n {
            let w = 1.0 / n as f64;
            worst = worst.max((m.weights[i] - w).abs()).max((cd[i] - w).abs()).max((direct[i] - w).abs());
        }
        for alpha in [0.5, 1.0, 2.5] {
            let j = laguerre_jacobi(n, alpha).unwrap();
            let dual = j.dual();
            let m = spectral_measure(&dual, DEFAULT_EIGEN_TOL);
            let cd = christoffel_darboux_weights(&dual, &m.atoms);
            let direct = dual_weights(&j, &m.atoms);
            let c = n as f64 * (alpha + n as f64 - 1.0);
            for i in 0..n {
                let w = m.atoms[i] / c;
                worst = worst.max((m.weights[i] - w).abs()).max((cd[i] - w).abs()).max((direct[i] - w).abs());
            }
        }
    }
    outcome(worst < 1e-9, format!("max weight error {worst:.2e} (< 1e-9)"))
}

/// Ensemble mean of e_k against g_k at every record time, with budget
/// 3·stderr + 5·dt·max(1, max_t |g_k|).
fn drift_law_errors(ens: &PathEnsemble, g: &freezing_dyson::dynamics::GkTrajectory) -> (bool, f64) {
    let est = esp_process_estimate(ens);
    let dt = ens.step;
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for k in 1..=ens.config.n {
        let scale = ens.times.iter().map(|&t| g.coeff_polys[k].eval(t).abs()).fold(1.0, f64::max);
        for (r, &t) in ens.times.iter().enumerate() {
            let m = est[r][k];
            let budget = 3.0 * m.stderr + 5.0 * dt * scale;
            let err = (m.mean - g.coeff_polys[k].eval(t)).abs();
            worst_ratio = worst_ratio.max(err / budget);
            ok &= err <= budget;
        }
    }
    (ok, worst_ratio)
}

fn c7_drift_law() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [1.0, 4.0] {
        let base = SimConfig {
            beta,
            n: 4,
            alpha: 1.5,
            t_end: 1.0,
            dt: 1e-3,
            initial: RootTuple::new(vec![-1.5, -0.5, 0.5, 1.5]).unwrap(),
            seed: 70 + beta as u64,
            paths: 10_000,
            record_times: vec![0.2, 0.4, 0.6, 0.8, 1.0],
        };
        let ens = simulate_dyson(&base).unwrap();
        let (g_ok, g_ratio) = drift_law_errors(&ens, &gaussian_gk(&base.initial));
        let lcfg = SimConfig { initial: RootTuple::new(vec![0.5, 1.0, 2.0, 3.0]).unwrap(), ..base };
        let ens = simulate_laguerre(&lcfg).unwrap();
        let (l_ok, l_ratio) = drift_law_errors(&ens, &laguerre_gk(&lcfg.initial, 1.5).unwrap());
        ok &= g_ok && l_ok;
        parts.push(format!("beta={beta}: gaussian {g_ratio:.2}, laguerre {l_ratio:.2}"));
    }
    outcome(ok, format!("worst error/budget {} (<= 1)", parts.join("; ")))
}

fn frozen_fraction(ens: &PathEnsemble, target: &RootTuple, tol: f64) -> f64 {
    let hits = ens
        .snapshot(0)
        .filter(|lam| lam.iter().zip(target.iter()).all(|(a, b)| (a - b).abs() <= tol))
        .count();
    hits as f64 / ens.paths() as f64
}

fn c8_freezing_lln() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [3, 4] {
        let cfg = SimConfig {
            beta: 1e6,
            n,
            alpha: 1.0,
            t_end: 1.0,
            dt: 1e-4,
            initial: RootTuple::zeros(n),
            seed: 80 + n as u64,
            paths: 1000,
            record_times: vec![1.0],
        };
        let fg = frozen_fraction(&simulate_dyson(&cfg).unwrap(), &hermite_roots(n, 1.0).unwrap(), 0.02);
        let fl = frozen_fraction(&simulate_laguerre(&cfg).unwrap(), &laguerre_roots(n, 1.0, 1.0).unwrap(), 0.05);
        ok &= fg >= 0.95 && fl >= 0.95;
        parts.push(format!("N={n}: gaussian {:.1}%, laguerre {:.1}%", 100.0 * fg, 100.0 * fl));
    }
    outcome(ok, format!("{} (>= 95%)", parts.join("; ")))
}

fn c9_static_clt() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let g = clt_covariance_gaussian(1e4, n, 100_000, 90 + n as u64).unwrap();
        let l = clt_covariance_laguerre(1e4, n, 1.0, 100_000, 95 + n as u64).unwrap();
        ok &= g.passes(DEFAULT_REL_TOL) && l.passes(DEFAULT_REL_TOL);
        let worst = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
        parts.push(format!(
            "N={n}: gaussian diag rel {:.3} / {}, laguerre diag rel {:.3} / {}",
            worst(&g.diag_rel_err),
            if g.passes(DEFAULT_REL_TOL) { "ok" } else { "bad" },
            worst(&l.diag_rel_err),
            if l.passes(DEFAULT_REL_TOL) { "ok" } else { "bad" },
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c10_primitive_clt() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, seed) in [(CltKind::Gaussian, 101), (CltKind::Laguerre { alpha: 1.5 }, 102)] {
        let r = primitive_clt_check(1e4, 4, 100_000, seed, kind).unwrap();
        let vars_ok = (0..4).all(|i| {
            within(r.estimate.cov[(i, i)], r.target_var[i], r.estimate.stderr[(i, i)], DEFAULT_REL_TOL)
        });
        ok &= vars_ok;
        let worst = r.var_rel_err().into_iter().fold(0.0, f64::max);
        parts.push(format!("{kind:?}: worst variance rel err {worst:.3}"));
    }
    outcome(ok, format!("{} (<= 5% or 3 SE)", parts.join("; ")))
}

fn c11_process_clt() -> Outcome {
    let cfg = SimConfig {
        beta: 1e4,
        n: 4,
        alpha: 1.0,
        t_end: 1.0,
        dt: 1e-4,
        initial: RootTuple::zeros(4),
        seed: 110,
        paths: 20_000,
        record_times: vec![0.5, 1.0],
    };
    let ens = simulate_dyson(&cfg).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for order in 0..=2 {
        let c = process_clt_covariance(&ens, order, 0, 1).unwrap();
        ok &= c.passes();
        parts.push(format!(
            "n={order}: {:.4} vs {:.4} ({:.2} SE)",
            c.estimate,
            c.target,
            (c.estimate - c.target).abs() / c.stderr
        ));
    }
    outcome(ok, format!("{} (<= 3 SE)", parts.join("; ")))
}

fn c12_markov_krein() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = 1 + case % 8;
        let a = RootTuple::new(spread_tuple(&mut rng, n, -5.0, 5.0, 0.1)).unwrap();
        let lift = markov_krein_lift(&a, 1e-12).unwrap();
        let back = markov_krein_project(&lift, 1e-8).unwrap();
        worst = worst.max(back.max_abs_diff(&a));
    }
    outcome(worst < 1e-6, format!("max round-trip error {worst:.2e} (< 1e-6)"))
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        (1, "Hermite semigroup under finite free convolution", 1, c1_hermite_semigroup),
        (2, "Laguerre parameter addition under convolution", 1, c2_laguerre_convolution),
        (3, "ODE route equals closed-form convolution route", 5, c3_dual_routes),
        (4, "elementary symmetric interaction identity", 1, c4_lemma_identity),
        (5, "moment recursion equals Hermite zero moments", 1, c5_moments),
        (6, "dual spectral weights", 1, c6_dual_weights),
        (7, "simulated e_k means follow the deterministic drift", 120, c7_drift_law),
        (8, "freezing law of large numbers", 300, c8_freezing_lln),
        (9, "static CLT covariance diagonalised by Q", 180, c9_static_clt),
        (10, "primitive statistic CLT variances", 180, c10_primitive_clt),
        (11, "process CLT time covariance", 300, c11_process_clt),
        (12, "Markov-Krein lift round trip", 2, c12_markov_krein),
    ];
    let mut failures = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = out.ok && in_time;
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2}s / {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
        if !pass {
            failures.push(id);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
