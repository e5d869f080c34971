use rand::Rng;

use super::sampling::add_stable_increment;
use crate::error::{FracError, Result};
use crate::spectral::Domain;

/// End state of one killed path run for operational time `operational_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub killed: bool,
    /// X_S when the path survived; the first outside position otherwise.
    pub position: Vec<f64>,
    pub operational_time: f64,
    pub steps: usize,
}

/// A path monitored on two nested grids, dt and dt/2, driven by the same increments.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledOutcome {
    pub coarse_killed: bool,
    pub fine_killed: bool,
    pub position: Vec<f64>,
    pub operational_time: f64,
    pub steps: usize,
}

fn step_count(horizon: f64, dt: f64) -> usize {
    // a last step shorter than 1e-9 dt is merged into the previous one
    (horizon / dt - 1e-9).ceil().max(0.0) as usize
}

fn check_path_args(domain: &Domain, x0: &[f64], horizon: f64, dt: f64, alpha: f64) -> Result<()> {
    domain.require_contains(x0)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FracError::param("dt", dt, "must be positive"));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(FracError::param("horizon", horizon, "must be finite and non-negative"));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(FracError::param("alpha", alpha, "must lie in (0, 2]"));
    }
    Ok(())
}

/// Runs the stable process from `x0` on the grid {0, dt, 2dt, ..., horizon}
/// and kills it at the first grid time outside the domain.
pub fn simulate_killed_path<R: Rng + ?Sized>(
    domain: &Domain,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<PathOutcome> {
    check_path_args(domain, x0, horizon, dt, alpha)?;
    let n = step_count(horizon, dt);
    let mut x = x0.to_vec();
    let mut prev = 0.0;
    for j in 1..=n {
        let now = if j == n { horizon } else { j as f64 * dt };
        add_stable_increment(alpha, now - prev, rng, &mut x);
        prev = now;
        if !domain.contains(&x) {
            return Ok(PathOutcome {
                killed: true,
                position: x,
                operational_time: horizon,
                steps: j,
            });
        }
    }
    Ok(PathOutcome {
        killed: false,
        position: x,
        operational_time: horizon,
        steps: n,
    })
}

/// Same process checked on the dt/2 grid (fine) and on the dt grid (coarse).
/// Coarse increments are sums of two fine ones, so each marginal has the law
/// of `simulate_killed_path` at its own step.
pub fn simulate_coupled_path<R: Rng + ?Sized>(
    domain: &Domain,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<CoupledOutcome> {
    check_path_args(domain, x0, horizon, dt, alpha)?;
    let h = 0.5 * dt;
    let n = step_count(horizon, h);
    let mut x = x0.to_vec();
    let mut prev = 0.0;
    let mut fine_killed = false;
    for j in 1..=n {
        let now = if j == n { horizon } else { j as f64 * h };
        add_stable_increment(alpha, now - prev, rng, &mut x);
        prev = now;
        if !domain.contains(&x) {
            fine_killed = true;
            if j % 2 == 0 || j == n {
                return Ok(CoupledOutcome {
                    coarse_killed: true,
                    fine_killed,
                    position: x,
                    operational_time: horizon,
                    steps: j,
                });
            }
        }
    }
    Ok(CoupledOutcome {
        coarse_killed: false,
        fine_killed,
        position: x,
        operational_time: horizon,
        steps: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::RngStream;
    use std::f64::consts::PI;

    #[test]
    fn empty_path() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let mut rng = RngStream::new(0, 0);
        let out = simulate_killed_path(&d, &[0.3], 0.0, 1e-3, 1.5, &mut rng).unwrap();
        assert!(!out.killed);
        assert_eq!(out.position, vec![0.3]);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn rejects_outside_start() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let mut rng = RngStream::new(0, 0);
        let err = simulate_killed_path(&d, &[1.0], 0.5, 1e-3, 1.5, &mut rng).unwrap_err();
        assert_eq!(err.kind(), "point_outside_domain");
    }

    #[test]
    fn grid_ends_at_horizon() {
        assert_eq!(step_count(1.0, 0.1), 10);
        assert_eq!(step_count(1.05, 0.1), 11);
        assert_eq!(step_count(0.3, 0.1), 3);
    }

    #[test]
    fn survivors_stay_inside() {
        let d = Domain::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let mut rng = RngStream::new(2, 0);
        for _ in 0..200 {
            let out = simulate_killed_path(&d, &[0.2, -0.1], 0.4, 1e-2, 1.2, &mut rng).unwrap();
            assert_eq!(!out.killed, d.contains(&out.position));
        }
    }

    fn brownian_survival(s: f64) -> f64 {
        // P(tau > s) from x = pi/2 on (0, pi) with generator the Laplacian
        let mut acc = 0.0;
        for n in (1..200).step_by(2) {
            let nf = n as f64;
            acc += (-nf * nf * s).exp() * 4.0 / (PI * nf) * (nf * PI / 2.0).sin();
        }
        acc
    }

    #[test]
    fn brownian_survival_converges_under_halving() {
        let d = Domain::interval(0.0, PI).unwrap();
        let want = brownian_survival(0.5);
        let n = 20_000;
        let (mut coarse, mut fine) = (0usize, 0usize);
        for i in 0..n {
            let mut rng = RngStream::new(17, i);
            let out = simulate_coupled_path(&d, &[PI / 2.0], 0.5, 4e-3, 2.0, &mut rng).unwrap();
            coarse += !out.coarse_killed as usize;
            fine += !out.fine_killed as usize;
            assert!(out.coarse_killed <= out.fine_killed);
        }
        let pc = coarse as f64 / n as f64;
        let pf = fine as f64 / n as f64;
        let extrapolated = pc - (pc - pf) / (1.0 - 0.5f64.sqrt());
        let se = (want * (1.0 - want) / n as f64).sqrt();
        assert!(pc > want && pf > want, "discrete monitoring overestimates survival");
        assert!(
            (extrapolated - want).abs() < 3.0 * se + 0.5 * (pc - pf),
            "{extrapolated} vs {want}"
        );
    }

    #[test]
    fn kill_fraction_grows_near_boundary() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let n = 20_000;
        let frac = |x0: f64| {
            let mut killed = 0;
            for i in 0..n {
                let mut rng = RngStream::new(8, i);
                killed += simulate_killed_path(&d, &[x0], 0.05, 1e-3, 1.0, &mut rng)
                    .unwrap()
                    .killed as usize;
            }
            killed as f64 / n as f64
        };
        let (a, b) = (frac(0.9), frac(0.99));
        let se = ((a * (1.0 - a) + b * (1.0 - b)) / n as f64).sqrt();
        assert!(b - a > 4.0 * se, "{a} {b}");
    }
}
