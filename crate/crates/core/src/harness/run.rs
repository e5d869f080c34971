//! The `eigs`, `solve`, `mc` and `residual` pipelines.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use super::config::{ExperimentConfig, InitialCondition};
use super::output::{encode_record, write_csv, write_json_17, ResultRow};
use crate::error::{FracError, Result};
use crate::fractional::{caputo_derivative, Interpolation, SampledFunction1D, ScalarField};
use crate::special::ml;
use crate::spectral::{
    eigensystem_analytic, eigensystem_numeric_1d, weyl_slope, EigenSystem, SpectralSolution, SubordinationRule,
};
use crate::stochastic::{mc_bias, mc_solution_with, McBias, McEstimate, McOptions, PathRecord};

/// Slack for the quadrature in the subordination route when comparing it
/// with the Mittag-Leffler series.
pub const SUBORDINATION_TOL: f64 = 1e-8;

/// Eigensystem for the config: loaded from `eigensystem_path` when set,
/// closed form for alpha = 2, finite elements otherwise.
pub fn build_eigensystem(cfg: &ExperimentConfig) -> Result<EigenSystem> {
    if let Some(path) = &cfg.eigensystem_path {
        let eig = EigenSystem::from_json_file(Path::new(path))?;
        if eig.alpha != cfg.alpha || eig.domain != cfg.domain {
            return Err(FracError::Config(format!(
                "eigensystem file {path} was built for alpha = {} on {:?}",
                eig.alpha, eig.domain
            )));
        }
        if eig.n_modes() < cfg.n_modes {
            return Err(FracError::Config(format!(
                "eigensystem file {path} holds {} modes, {} requested",
                eig.n_modes(),
                cfg.n_modes
            )));
        }
        return Ok(eig.truncated(cfg.n_modes));
    }
    compute_eigensystem(cfg)
}

fn compute_eigensystem(cfg: &ExperimentConfig) -> Result<EigenSystem> {
    if cfg.alpha == 2.0 {
        eigensystem_analytic(&cfg.domain, 2.0, cfg.n_modes)
    } else {
        eigensystem_numeric_1d(&cfg.domain, cfg.alpha, cfg.mesh_size, cfg.n_modes)
    }
}

fn read_table(path: &str) -> Result<SampledFunction1D> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FracError::Config(format!("cannot read initial condition table {path}: {e}")))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed.as_deref() {
            Some([x, v]) => {
                xs.push(*x);
                vs.push(*v);
            }
            _ => return Err(FracError::Config(format!("{path}:{}: expected two numbers", i + 1))),
        }
    }
    SampledFunction1D::new(xs, vs, Interpolation::Linear)
}

/// The initial datum as a field on R^d, zero off the domain. Only `psi_k`
/// needs the eigensystem.
pub fn build_field(cfg: &ExperimentConfig, eig: Option<&EigenSystem>) -> Result<ScalarField> {
    let domain = cfg.domain.clone();
    let radius = domain.enclosing_radius();
    let field = match &cfg.initial_condition {
        InitialCondition::Sin => {
            let (lo, hi) = domain.bounds();
            let (lo, hi) = (lo.to_vec(), hi.to_vec());
            ScalarField::compact(radius, move |x| {
                if !domain.contains(x) {
                    return 0.0;
                }
                x.iter()
                    .zip(lo.iter().zip(&hi))
                    .map(|(v, (a, b))| (PI * (v - a) / (b - a)).sin())
                    .product()
            })
            .with_sup_norm(1.0)
        }
        InitialCondition::Bump => {
            let c = domain.center();
            let half: Vec<f64> = domain.side_lengths().iter().map(|l| 0.5 * l).collect();
            ScalarField::compact(radius, move |x| {
                let r2: f64 = x
                    .iter()
                    .zip(c.iter().zip(&half))
                    .map(|(v, (m, h))| ((v - m) / h).powi(2))
                    .sum();
                if r2 < 1.0 {
                    (1.0 - 1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                }
            })
            .with_sup_norm(1.0)
        }
        InitialCondition::Psi(k) => {
            let eig = eig.ok_or_else(|| FracError::Config("psi_k initial condition without an eigensystem".into()))?;
            if *k > eig.n_modes() {
                return Err(FracError::Config(format!("psi_{k} needs at least {k} modes")));
            }
            let sup = eig.sup_norms()[k - 1];
            let eig = Arc::new(eig.clone());
            let n = k - 1;
            ScalarField::compact(radius, move |x| eig.eval(n, x)).with_sup_norm(sup)
        }
        InitialCondition::Table(path) => {
            let table = read_table(path)?;
            let sup = table.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            ScalarField::compact(radius, move |x| {
                if domain.contains(x) {
                    table.eval(x[0]).unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .with_sup_norm(sup)
        }
    };
    Ok(field)
}

/// Output sink: the configured file or standard output.
pub fn open_output(path: Option<&str>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn mc_options(cfg: &ExperimentConfig, cell: usize, keep_records: bool) -> McOptions {
    McOptions {
        n_paths: cfg.n_paths,
        dt: cfg.dt,
        seed: cfg.seed,
        stream_offset: (cell * cfg.n_paths) as u64,
        keep_records,
    }
}

fn write_records(path: &str, records: &[PathRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        w.write_all(&encode_record(r.stream_id, r.killed, r.score))?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluates the three solution routes at every (t, x), times outermost.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let params = cfg.params()?;
    let eig = build_eigensystem(cfg)?;
    let field = build_field(cfg, Some(&eig))?;
    let sol = SpectralSolution::from_field(&eig, cfg.beta, &field)?;
    let rule = SubordinationRule::new(cfg.beta)?;
    let keep = cfg.records_path.is_some();
    let mut records = Vec::new();
    let mut rows = Vec::with_capacity(cfg.times.len() * cfg.points.len());
    for &t in &cfg.times {
        for x in &cfg.points {
            let spec = sol.eval_at(t, x)?;
            let sub = sol.eval_subordination(&rule, t, x)?;
            let tol = spec.bound + SUBORDINATION_TOL;
            if (spec.value - sub).abs() > tol {
                return Err(FracError::RouteMismatch(format!(
                    "t = {t}, x = {x:?}: series {} vs subordination {sub}, tolerance {tol:e}",
                    spec.value
                )));
            }
            let (u_mc, mc_se) = if cfg.n_paths > 0 {
                let (est, recs) =
                    mc_solution_with(&cfg.domain, params, &field, t, x, &mc_options(cfg, rows.len(), keep))?;
                records.extend(recs);
                (est.value, est.std_error)
            } else {
                (f64::NAN, f64::NAN)
            };
            rows.push(ResultRow {
                t,
                x: x.clone(),
                u_spectral: spec.value,
                u_subordination: sub,
                u_mc,
                mc_se,
                trunc_bound: spec.bound,
            });
        }
    }
    if let Some(path) = &cfg.records_path {
        write_records(path, &records)?;
    }
    Ok(rows)
}

/// `solve` end to end: compute and write the CSV.
pub fn solve_to_output(cfg: &ExperimentConfig) -> Result<()> {
    let rows = run_solve(cfg)?;
    let mut out = open_output(cfg.output_path.as_deref())?;
    write_csv(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct McRow {
    pub t: f64,
    pub x: Vec<f64>,
    #[serde(flatten)]
    pub estimate: McEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<McBias>,
}

/// Monte Carlo only, with optional dt-halving bias measurement.
pub fn run_mc(cfg: &ExperimentConfig) -> Result<Vec<McRow>> {
    cfg.validate()?;
    if cfg.n_paths == 0 {
        return Err(FracError::Config("mc needs n_paths >= 100".into()));
    }
    let params = cfg.params()?;
    let eig = match cfg.initial_condition {
        InitialCondition::Psi(_) => Some(build_eigensystem(cfg)?),
        _ => None,
    };
    let field = build_field(cfg, eig.as_ref())?;
    let keep = cfg.records_path.is_some();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for &t in &cfg.times {
        for x in &cfg.points {
            let opts = mc_options(cfg, rows.len(), keep);
            let (est, recs) = mc_solution_with(&cfg.domain, params, &field, t, x, &opts)?;
            records.extend(recs);
            let bias = if cfg.mc_bias {
                Some(mc_bias(&cfg.domain, params, &field, t, x, &opts)?)
            } else {
                None
            };
            rows.push(McRow {
                t,
                x: x.clone(),
                estimate: est,
                bias,
            });
        }
    }
    if let Some(path) = &cfg.records_path {
        write_records(path, &records)?;
    }
    Ok(rows)
}

pub fn mc_to_output(cfg: &ExperimentConfig) -> Result<()> {
    let rows = run_mc(cfg)?;
    let mut out = open_output(cfg.output_path.as_deref())?;
    write_json_17(&mut out, &rows)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenSummary {
    pub alpha: f64,
    pub n_modes: usize,
    pub lambdas: Vec<f64>,
    pub gram_defect: f64,
    /// Fitted exponent of lambda_n ~ n^s over the upper half of the modes.
    pub weyl_slope: Option<f64>,
}

/// Builds the eigensystem; writes it to `eigensystem_path` (or standard
/// output) and returns a summary.
pub fn run_eigs(cfg: &ExperimentConfig) -> Result<EigenSummary> {
    cfg.validate()?;
    let eig = compute_eigensystem(cfg)?;
    match &cfg.eigensystem_path {
        Some(p) => eig.to_json_file(Path::new(p))?,
        None => {
            let mut out = std::io::stdout().lock();
            eig.write_json(&mut out)?;
            writeln!(out)?;
        }
    }
    let n = eig.n_modes();
    Ok(EigenSummary {
        alpha: eig.alpha,
        n_modes: n,
        lambdas: eig.lambdas.clone(),
        gram_defect: eig.gram_defect(),
        weyl_slope: (n >= 8).then(|| weyl_slope(&eig.lambdas, n / 2, n)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeResidual {
    pub n: usize,
    pub lambda: f64,
    pub max_residual: f64,
    /// max_residual / lambda
    pub relative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub beta: f64,
    pub grid_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub modes: Vec<ModeResidual>,
}

pub const RESIDUAL_GRID: usize = 4096;

/// max over the grid points in [t_min, t_max] of |D^beta g + lambda g| for
/// g(t) = e(-lambda t^beta), with the derivative taken by the L1 scheme on a
/// uniform grid over [0, t_max].
pub fn caputo_residual<E: Fn(f64) -> f64>(beta: f64, lambda: f64, t_min: f64, t_max: f64, e: E) -> Result<f64> {
    let h = t_max / (RESIDUAL_GRID - 1) as f64;
    let grid: Vec<f64> = (0..RESIDUAL_GRID).map(|i| i as f64 * h).collect();
    let g = SampledFunction1D::from_fn(grid.clone(), Interpolation::Linear, |t| e(-lambda * t.powf(beta)))?;
    let mut worst = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        if t < t_min - 1e-12 || i == 0 {
            continue;
        }
        let d = if beta == 1.0 {
            (g.values()[i] - g.values()[i - 1]) / h
        } else {
            caputo_derivative(&g, beta, t)?
        };
        worst = worst.max((d + lambda * g.values()[i]).abs());
    }
    Ok(worst)
}

/// Caputo eigenrelation residual of the time factors of the first modes.
pub fn run_residual(cfg: &ExperimentConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let eig = build_eigensystem(cfg)?;
    let t_max = cfg.times.iter().cloned().fold(0.0, f64::max);
    let t_min = cfg
        .times
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .min(0.05 * t_max);
    let mut modes = Vec::new();
    for (n, &lambda) in eig.lambdas.iter().enumerate().take(8) {
        let r = caputo_residual(cfg.beta, lambda, t_min, t_max, |x| ml(cfg.beta, x))?;
        modes.push(ModeResidual {
            n: n + 1,
            lambda,
            max_residual: r,
            relative: r / lambda,
        });
    }
    Ok(ResidualReport {
        beta: cfg.beta,
        grid_points: RESIDUAL_GRID,
        t_min,
        t_max,
        modes,
    })
}
