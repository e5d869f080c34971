use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::paths::{simulate_coupled_path, simulate_killed_path};
use super::rng::RngStream;
use super::sampling::sample_inverse_subordinator;
use crate::error::{FracError, Result};
use crate::fractional::ScalarField;
use crate::special::FracParams;
use crate::spectral::Domain;

/// Monte Carlo estimate of u(t, x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub kill_fraction: f64,
    pub seed: u64,
    pub dt: f64,
}

/// Raw result of one path, in stream order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRecord {
    pub stream_id: u64,
    pub killed: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOptions {
    pub n_paths: usize,
    /// Step on the operational clock; `None` means 1e-3 t^beta.
    pub dt: Option<f64>,
    pub seed: u64,
    /// Path i uses stream `stream_offset + i`.
    pub stream_offset: u64,
    pub keep_records: bool,
}

impl McOptions {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        McOptions {
            n_paths,
            dt: None,
            seed,
            stream_offset: 0,
            keep_records: false,
        }
    }
}

/// Bias of the dt-monitored estimator, from coupled dt and dt/2 paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McBias {
    pub coarse: f64,
    pub fine: f64,
    /// Standard error of the coarse minus fine difference.
    pub diff_se: f64,
    /// |coarse - fine| / (1 - 2^{-1/2}): the O(sqrt dt) error extrapolated to dt -> 0.
    pub bias: f64,
}

pub fn default_dt(beta: f64, t: f64) -> f64 {
    1e-3 * t.powf(beta)
}

fn check_mc_args(domain: &Domain, t: f64, x: &[f64], n_paths: usize, dt: f64) -> Result<()> {
    domain.require_contains(x)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(FracError::param("t", t, "must be positive"));
    }
    if n_paths < 100 {
        return Err(FracError::param("n_paths", n_paths as f64, "must be at least 100"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FracError::param("dt", dt, "must be positive"));
    }
    Ok(())
}

fn summarise(scores: &[f64], killed: usize, seed: u64, dt: f64) -> McEstimate {
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    McEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
        n_paths: scores.len(),
        kill_fraction: killed as f64 / n,
        seed,
        dt,
    }
}

/// u(t, x) = E_x[f(X^D_{E_t})] by direct simulation. Paths run in parallel
/// and are reduced in stream order, so the result does not depend on the
/// number of workers.
#[allow(clippy::too_many_arguments)]
pub fn mc_solution(
    domain: &Domain,
    params: FracParams,
    f: &ScalarField,
    t: f64,
    x: &[f64],
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<McEstimate> {
    let opts = McOptions {
        dt: Some(dt),
        ..McOptions::new(n_paths, seed)
    };
    mc_solution_with(domain, params, f, t, x, &opts).map(|r| r.0)
}

pub fn mc_solution_with(
    domain: &Domain,
    params: FracParams,
    f: &ScalarField,
    t: f64,
    x: &[f64],
    opts: &McOptions,
) -> Result<(McEstimate, Vec<PathRecord>)> {
    let dt = opts.dt.unwrap_or_else(|| default_dt(params.beta, t));
    check_mc_args(domain, t, x, opts.n_paths, dt)?;
    let records: Vec<PathRecord> = (0..opts.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let stream_id = opts.stream_offset + i;
            let mut rng = RngStream::new(opts.seed, stream_id);
            let s = sample_inverse_subordinator(params.beta, t, &mut rng);
            let out = simulate_killed_path(domain, x, s, dt, params.alpha, &mut rng)?;
            let score = if out.killed { 0.0 } else { f.eval(&out.position) };
            Ok(PathRecord {
                stream_id,
                killed: out.killed,
                score,
            })
        })
        .collect::<Result<_>>()?;
    let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
    let killed = records.iter().filter(|r| r.killed).count();
    let est = summarise(&scores, killed, opts.seed, dt);
    Ok((est, if opts.keep_records { records } else { Vec::new() }))
}

/// Streams used by `mc_bias` start here so they never overlap the estimator's.
const BIAS_STREAM_BASE: u64 = 1 << 63;

/// Measures the discrete-monitoring bias at step `dt` by halving it.
pub fn mc_bias(
    domain: &Domain,
    params: FracParams,
    f: &ScalarField,
    t: f64,
    x: &[f64],
    opts: &McOptions,
) -> Result<McBias> {
    let dt = opts.dt.unwrap_or_else(|| default_dt(params.beta, t));
    check_mc_args(domain, t, x, opts.n_paths, dt)?;
    let pairs: Vec<(f64, f64)> = (0..opts.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(opts.seed, BIAS_STREAM_BASE + opts.stream_offset + i);
            let s = sample_inverse_subordinator(params.beta, t, &mut rng);
            let out = simulate_coupled_path(domain, x, s, dt, params.alpha, &mut rng)?;
            let v = if out.coarse_killed { 0.0 } else { f.eval(&out.position) };
            let w = if out.fine_killed { 0.0 } else { v };
            Ok((v, w))
        })
        .collect::<Result<_>>()?;
    let n = pairs.len() as f64;
    let coarse = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let fine = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let dm = coarse - fine;
    let var = pairs.iter().map(|p| (p.0 - p.1 - dm).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McBias {
        coarse,
        fine,
        diff_se: (var / n).sqrt(),
        bias: dm.abs() / (1.0 - 0.5f64.sqrt()),
    })
}
