//! Subcommand implementations.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use freezing_dyson::dynamics::{
    gaussian_gk, gaussian_limit_closed, laguerre_gk, laguerre_limit_closed, limit_roots,
    moment_sequence, GkTrajectory,
};
use freezing_dyson::finfree::{boxplus, hermite_roots, laguerre_roots};
use freezing_dyson::stats::{
    clt_covariance_gaussian, clt_covariance_laguerre, esp_process_estimate, primitive_clt_check,
    CltKind, DEFAULT_REL_TOL,
};
use freezing_dyson::stochastic::{simulate_dyson, simulate_laguerre, PathEnsemble, SimConfig};
use freezing_dyson::{Error, RootTuple};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{usage, CliError, FileConfig};
use crate::output::{csv_row, fmt_f64, read_tuple, write_text, Sink};
use crate::{Common, Format};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Hermite,
    Laguerre,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[value(alias = "dyson")]
    #[serde(alias = "dyson")]
    Gaussian,
    Laguerre,
}

fn open(common: &Common) -> Result<FileConfig, CliError> {
    FileConfig::load(common.config.as_deref())
}

fn sink(common: &Common, cfg: &FileConfig, command: &'static str, resolved: impl Serialize) -> Result<Sink, CliError> {
    let format = cfg.pick_or(common.format, "format", Format::Csv)?;
    let out = cfg.pick(common.out.clone(), "out")?;
    Ok(Sink::new(format, out, command, resolved))
}

fn initial_tuple(cfg: &FileConfig, file: Option<PathBuf>, n: Option<usize>) -> Result<RootTuple, CliError> {
    let values = match file {
        Some(path) => Some(read_tuple(&path)?),
        None => cfg.pick::<Vec<f64>>(None, "initial")?,
    };
    match (values, n) {
        (Some(v), Some(n)) if v.len() != n => Err(Error::DimensionMismatch { left: n, right: v.len() }.into()),
        (Some(v), _) => Ok(RootTuple::new(v)?),
        (None, Some(n)) if n > 0 => Ok(RootTuple::zeros(n)),
        (None, Some(_)) => Err(usage("--n must be positive")),
        (None, None) => Err(usage("give --initial or --n")),
    }
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    /// Laguerre parameter
    #[arg(long)]
    alpha: Option<f64>,
    /// Scale: Hermite zeros are multiplied by √t, Laguerre zeros by t
    #[arg(long)]
    t: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct ZerosConfig {
    family: Family,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    t: f64,
}

pub fn zeros(a: ZerosArgs) -> Result<(), CliError> {
    let cfg = open(&a.common)?;
    let family = cfg.pick_or(a.family, "family", Family::Hermite)?;
    let n: usize = cfg.require(a.n, "n")?;
    let t = cfg.pick_or(a.t, "t", 1.0)?;
    let (roots, alpha) = match family {
        Family::Hermite => (hermite_roots(n, t)?, None),
        Family::Laguerre => {
            let alpha: f64 = cfg.require(a.alpha, "alpha")?;
            (laguerre_roots(n, alpha, t)?, Some(alpha))
        }
    };
    let out = sink(&a.common, &cfg, "zeros", ZerosConfig { family, n, alpha, t })?;
    out.emit(&[csv_row(&roots)], json!({ "roots": roots }))
}

#[derive(Args, Debug)]
pub struct ConvolveArgs {
    /// CSV file with the first tuple
    a: Option<PathBuf>,
    /// CSV file with the second tuple
    b: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct ConvolveConfig {
    a: Vec<f64>,
    b: Vec<f64>,
}

pub fn convolve(args: ConvolveArgs) -> Result<(), CliError> {
    let cfg = open(&args.common)?;
    let pa: PathBuf = cfg.require(args.a, "a")?;
    let pb: PathBuf = cfg.require(args.b, "b")?;
    let a = RootTuple::new(read_tuple(&pa)?)?;
    let b = RootTuple::new(read_tuple(&pb)?)?;
    let c = boxplus(&a, &b, 0.0)?;
    let out = sink(&args.common, &cfg, "convolve", ConvolveConfig { a: a.to_vec(), b: b.to_vec() })?;
    out.emit(&[csv_row(&c)], json!({ "roots": c }))
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// CSV file with the initial tuple (zeros of size --n when omitted)
    #[arg(long)]
    initial: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Also evaluate the other route and report the largest root discrepancy
    #[arg(long)]
    verify_ode: bool,
    /// Laguerre: use the convolution closed form (needs alpha > n - 1/2)
    #[arg(long)]
    closed_form: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct LimitConfig {
    kind: Kind,
    initial: Vec<f64>,
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    route: &'static str,
    verify_ode: bool,
}

pub fn limit(a: LimitArgs) -> Result<(), CliError> {
    let cfg = open(&a.common)?;
    let kind = cfg.pick_or(a.kind, "kind", Kind::Gaussian)?;
    let n = cfg.pick(a.n, "n")?;
    let initial = initial_tuple(&cfg, a.initial, n)?;
    let t: f64 = cfg.require(a.t, "t")?;
    let verify = cfg.switch(a.verify_ode, "verify_ode")?;
    let closed = cfg.switch(a.closed_form, "closed_form")?;
    let ode = |traj: GkTrajectory| limit_roots(&traj, t, 0.0);
    let (roots, other, route, alpha) = match kind {
        Kind::Gaussian => {
            let roots = gaussian_limit_closed(&initial, t)?;
            let other = if verify { Some(ode(gaussian_gk(&initial))?) } else { None };
            (roots, other, "closed-form", None)
        }
        Kind::Laguerre => {
            let alpha: f64 = cfg.require(a.alpha, "alpha")?;
            if closed {
                let roots = laguerre_limit_closed(&initial, alpha, t)?;
                let other = if verify { Some(ode(laguerre_gk(&initial, alpha)?)?) } else { None };
                (roots, other, "closed-form", Some(alpha))
            } else {
                let roots = ode(laguerre_gk(&initial, alpha)?)?;
                let applies = alpha > initial.n() as f64 - 0.5;
                let other = if verify && applies { Some(laguerre_limit_closed(&initial, alpha, t)?) } else { None };
                if verify && !applies {
                    eprintln!("note: closed form needs alpha > n - 1/2; nothing to compare against");
                }
                (roots, other, "ode", Some(alpha))
            }
        }
    };
    let discrepancy = other.map(|o| o.max_abs_diff(&roots));
    let resolved = LimitConfig { kind, initial: initial.to_vec(), t, alpha, route, verify_ode: verify };
    let out = sink(&a.common, &cfg, "limit", resolved)?;
    let mut lines = Vec::new();
    if let Some(d) = discrepancy {
        eprintln!("max route discrepancy: {d:e}");
        lines.push(format!("# max route discrepancy: {}", fmt_f64(d)));
    }
    lines.push(csv_row(&roots));
    out.emit(&lines, json!({ "roots": roots, "route": route, "route_discrepancy": discrepancy }))
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Time horizon
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV file with the initial tuple (zeros of size --n when omitted)
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Comma-separated record times (default: the horizon only)
    #[arg(long, value_delimiter = ',')]
    record: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct SimulateConfig {
    kind: Kind,
    #[serde(flatten)]
    sim: SimConfig,
}

#[derive(Serialize)]
struct EspCheck {
    time: f64,
    k: usize,
    mean: f64,
    stderr: f64,
    target: f64,
    budget: f64,
    pass: bool,
}

fn esp_summary(ens: &PathEnsemble, traj: &GkTrajectory) -> Vec<EspCheck> {
    let est = esp_process_estimate(ens);
    let mut checks = Vec::new();
    for k in 1..=ens.config.n {
        let scale = ens.times.iter().map(|&t| traj.coeff_polys[k].eval(t).abs()).fold(1.0, f64::max);
        for (r, &time) in ens.times.iter().enumerate() {
            let m = est[r][k];
            let target = traj.coeff_polys[k].eval(time);
            let budget = 3.0 * m.stderr + 5.0 * ens.step * scale;
            checks.push(EspCheck {
                time,
                k,
                mean: m.mean,
                stderr: m.stderr,
                target,
                budget,
                pass: (m.mean - target).abs() <= budget,
            });
        }
    }
    checks
}

pub fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let cfg = open(&a.common)?;
    let kind = cfg.pick_or(a.kind, "kind", Kind::Gaussian)?;
    let n = cfg.pick(a.n, "n")?;
    let initial = initial_tuple(&cfg, a.initial, n)?;
    let t_end = cfg.pick_or(a.t, "t", 1.0)?;
    let sim = SimConfig {
        beta: cfg.pick_or(a.beta, "beta", 1.0)?,
        n: initial.n(),
        alpha: cfg.pick_or(a.alpha, "alpha", 1.0)?,
        t_end,
        dt: cfg.pick_or(a.dt, "dt", 1e-3)?,
        initial,
        seed: cfg.pick_or(a.seed, "seed", 0)?,
        paths: cfg.pick_or(a.paths, "paths", 1000)?,
        record_times: cfg.pick_or(a.record, "record", vec![t_end])?,
    };
    let (ens, traj) = match kind {
        Kind::Gaussian => (simulate_dyson(&sim)?, gaussian_gk(&sim.initial)),
        Kind::Laguerre => (simulate_laguerre(&sim)?, laguerre_gk(&sim.initial, sim.alpha)?),
    };
    let out = sink(&a.common, &cfg, "simulate", SimulateConfig { kind, sim: sim.clone() })?;

    let mut header = vec!["path".to_string(), "time".to_string()];
    header.extend((1..=sim.n).map(|i| format!("x{i}")));
    let mut lines = vec![header.join(",")];
    for p in 0..ens.paths() {
        for (r, &time) in ens.times.iter().enumerate() {
            lines.push(format!("{p},{},{}", fmt_f64(time), csv_row(ens.get(p, r))));
        }
    }
    let paths: Vec<Vec<&[f64]>> =
        (0..ens.paths()).map(|p| (0..ens.records()).map(|r| ens.get(p, r)).collect()).collect();
    out.emit(&lines, json!({ "times": ens.times, "paths": paths }))?;

    let checks = esp_summary(&ens, &traj);
    let summary = json!({
        "metadata": out.metadata(),
        "step": ens.step,
        "gap_clamps": ens.gap_clamps,
        "all_pass": checks.iter().all(|c| c.pass),
        "esp_checks": checks,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    match &out.path {
        Some(p) => {
            let mut name = p.clone().into_os_string();
            name.push(".summary.json");
            write_text(Some(&PathBuf::from(name)), &text)
        }
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

#[derive(Args, Debug)]
pub struct CltArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of Monte Carlo samples
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct CltConfig {
    kind: Kind,
    n: usize,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    samples: usize,
    seed: u64,
    rel_tol: f64,
}

pub fn clt(a: CltArgs) -> Result<(), CliError> {
    let cfg = open(&a.common)?;
    let kind = cfg.pick_or(a.kind, "kind", Kind::Gaussian)?;
    let n: usize = cfg.require(a.n, "n")?;
    let beta = cfg.pick_or(a.beta, "beta", 1e4)?;
    let samples = cfg.pick_or(a.paths, "paths", 100_000)?;
    let seed = cfg.pick_or(a.seed, "seed", 0)?;
    let (report, prim, alpha) = match kind {
        Kind::Gaussian => (
            clt_covariance_gaussian(beta, n, samples, seed)?,
            primitive_clt_check(beta, n, samples, seed.wrapping_add(1), CltKind::Gaussian)?,
            None,
        ),
        Kind::Laguerre => {
            let alpha = cfg.pick_or(a.alpha, "alpha", 1.0)?;
            (
                clt_covariance_laguerre(beta, n, alpha, samples, seed)?,
                primitive_clt_check(beta, n, samples, seed.wrapping_add(1), CltKind::Laguerre { alpha })?,
                Some(alpha),
            )
        }
    };
    let rel_tol = DEFAULT_REL_TOL;
    let resolved = CltConfig { kind, n, beta, alpha, samples, seed, rel_tol };
    let out = sink(&a.common, &cfg, "clt", resolved)?;

    let mut lines = vec!["section,row,col,estimate,stderr,target".to_string()];
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { report.target_diag[i] } else { 0.0 };
            lines.push(format!(
                "rotated,{i},{j},{},{},{}",
                fmt_f64(report.rotated[(i, j)]),
                fmt_f64(report.mc_stderr[(i, j)]),
                fmt_f64(target)
            ));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { prim.target_var[i] } else { 0.0 };
            lines.push(format!(
                "primitive,{i},{j},{},{},{}",
                fmt_f64(prim.estimate.cov[(i, j)]),
                fmt_f64(prim.estimate.stderr[(i, j)]),
                fmt_f64(target)
            ));
        }
    }
    lines.push(format!("# covariance pass: {}", report.passes(rel_tol)));
    lines.push(format!("# primitive pass: {}", prim.passes(rel_tol)));
    out.emit(
        &lines,
        json!({
            "covariance": report,
            "covariance_pass": report.passes(rel_tol),
            "primitive": prim,
            "primitive_pass": prim.passes(rel_tol),
        }),
    )
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Highest moment order
    #[arg(long)]
    max: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct MomentsConfig {
    n: usize,
    max: usize,
}

pub fn moments(a: MomentsArgs) -> Result<(), CliError> {
    let cfg = open(&a.common)?;
    let n: usize = cfg.require(a.n, "n")?;
    let max = cfg.pick_or(a.max, "max", 10)?;
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    if max > 40 {
        return Err(usage("--max must be at most 40"));
    }
    let u = moment_sequence(n, max).u;
    let out = sink(&a.common, &cfg, "moments", MomentsConfig { n, max })?;
    out.emit(&[csv_row(&u)], json!({ "u": u }))
}
