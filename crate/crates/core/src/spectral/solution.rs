use std::f64::consts::E;

use super::eigen::EigenSystem;
use crate::error::{FracError, Result};
use crate::fractional::ScalarField;
use crate::quadrature::gl16;
use crate::special::{gamma, kernel_sup_constant, mittag_leffler, subordinator_density};

/// Relative size below which a trailing term |c_n| sup|psi_n| is dropped.
pub const TRUNCATION_RTOL: f64 = 1e-8;
/// Largest accepted tail bound, relative to the value (kernel) or to
/// ||f|| (solutions).
pub const TAIL_TOLERANCE: f64 = 1e-4;

/// <f, psi_n> for every stored mode, and ||f||_{L^2(D)}.
///
/// Fails when f does not vanish outside the domain.
pub fn project_with_norm(f: &ScalarField, eig: &EigenSystem) -> Result<(Vec<f64>, f64)> {
    let (pts, wts) = eig.quadrature();
    let n = eig.n_modes();
    let mut coeffs = vec![0.0; n];
    let mut norm2 = 0.0;
    let mut sup = 0.0f64;
    let mut psi = Vec::with_capacity(n);
    for (p, w) in pts.iter().zip(&wts) {
        let v = f.eval(p);
        if v == 0.0 {
            continue;
        }
        sup = sup.max(v.abs());
        norm2 += w * v * v;
        eig.eval_all(p, &mut psi);
        for (c, s) in coeffs.iter_mut().zip(&psi) {
            *c += w * v * s;
        }
    }
    check_exterior(f, eig, sup)?;
    Ok((coeffs, norm2.sqrt()))
}

pub fn project(f: &ScalarField, eig: &EigenSystem) -> Result<Vec<f64>> {
    project_with_norm(f, eig).map(|(c, _)| c)
}

// samples just outside every face, along the face-centre normal
fn check_exterior(f: &ScalarField, eig: &EigenSystem, sup: f64) -> Result<()> {
    let (lo, hi) = eig.domain.bounds();
    let centre = eig.domain.center();
    let lens = eig.domain.side_lengths();
    let tol = 1e-9 * sup.max(1e-300);
    for axis in 0..lo.len() {
        for s in [1e-3, 0.05, 0.3] {
            for x in [lo[axis] - s * lens[axis], hi[axis] + s * lens[axis]] {
                let mut p = centre.clone();
                p[axis] = x;
                let v = f.eval(&p);
                if v.abs() > tol {
                    return Err(FracError::Config(format!(
                        "initial condition is {v:e} at {p:?}, outside the domain"
                    )));
                }
            }
        }
    }
    Ok(())
}

// extrapolation model for modes beyond the computed ones
#[derive(Debug, Clone)]
struct TailModel {
    /// lambda_n >= weyl_lo n^{alpha/d}
    weyl_lo: f64,
    /// lambda_n <= weyl_hi n^{alpha/d}
    weyl_hi: f64,
    /// sup|psi_n| <= sup_const lambda_n^{d/(2 alpha)}
    sup_const: f64,
    exponent: f64,
    n: usize,
}

impl TailModel {
    fn new(eig: &EigenSystem) -> Result<Self> {
        let d = eig.dim() as f64;
        let exponent = eig.alpha / d;
        let ratios: Vec<f64> = eig
            .lambdas
            .iter()
            .enumerate()
            .map(|(i, l)| l / ((i + 1) as f64).powf(exponent))
            .collect();
        let weyl_lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let weyl_hi = ratios.iter().cloned().fold(0.0, f64::max);
        let m = kernel_sup_constant(eig.dim(), eig.alpha)?;
        Ok(TailModel {
            weyl_lo,
            weyl_hi,
            sup_const: (E * m).sqrt(),
            exponent,
            n: eig.n_modes(),
        })
    }

    /// Bound for sum_{n > N} C n^{-q} sup|psi_n| m(lambda_n t^beta), with
    /// m(x) = 1 / (1 + x / Gamma(1 + beta)) dominating E_beta(-x).
    fn series_tail(&self, amp: f64, q: f64, decay: Option<(f64, f64)>) -> f64 {
        if amp == 0.0 {
            return 0.0;
        }
        // sup|psi_n| grows like n^{1/2} under the Weyl upper law
        let growth = 0.5;
        let decay_exp = if decay.is_some() { self.exponent } else { 0.0 };
        if q - growth + decay_exp <= 1.0 + 1e-9 {
            return f64::INFINITY;
        }
        let sup_scale = self.sup_const * self.weyl_hi.powf(1.0 / (2.0 * self.exponent));
        let term = |n: f64| {
            let mut v = amp * n.powf(-q) * sup_scale * n.powf(growth);
            if let Some((tb, g1b)) = decay {
                v /= 1.0 + self.weyl_lo * n.powf(self.exponent) * tb / g1b;
            }
            v
        };
        let start = self.n + 1;
        let stop = 64 * start;
        let mut s = 0.0;
        for n in start..stop {
            s += term(n as f64);
        }
        // remaining power-law tail by comparison with the integral
        let r = q - growth + decay_exp;
        s + term(stop as f64) * stop as f64 / (r - 1.0)
    }
}

/// Evaluated solution value with its truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub bound: f64,
}

/// Mittag-Leffler series solution over a fixed eigensystem.
#[derive(Debug, Clone)]
pub struct SpectralSolution<'a> {
    pub eig: &'a EigenSystem,
    pub coefficients: Vec<f64>,
    pub beta: f64,
    pub f_norm: f64,
    /// Modes actually summed.
    pub n_eff: usize,
    /// Reconstruction bound at t = 0.
    pub truncation_bound: f64,
    sups: Vec<f64>,
    tail: TailModel,
    coef_amp: f64,
    coef_decay: f64,
}

impl<'a> SpectralSolution<'a> {
    /// `f_norm` defaults to the coefficient l2 norm (a lower bound for
    /// ||f|| by Bessel's inequality).
    pub fn new(eig: &'a EigenSystem, beta: f64, coefficients: Vec<f64>, f_norm: Option<f64>) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(FracError::param("beta", beta, "must lie in (0, 1]"));
        }
        if coefficients.len() > eig.n_modes() {
            return Err(FracError::Config(format!(
                "{} coefficients for {} modes",
                coefficients.len(),
                eig.n_modes()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(FracError::Config("coefficients must be finite".into()));
        }
        let mut coefficients = coefficients;
        coefficients.resize(eig.n_modes(), 0.0);
        let coef_norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        let f_norm = f_norm.unwrap_or(coef_norm).max(coef_norm);
        let sups = eig.sup_norms();
        let drop = TRUNCATION_RTOL * f_norm;
        let n_eff = coefficients
            .iter()
            .zip(&sups)
            .rposition(|(c, s)| (c * s).abs() > drop)
            .map_or(0, |i| i + 1);
        let (coef_amp, coef_decay) = fit_decay(&coefficients, f_norm);
        let mut sol = SpectralSolution {
            eig,
            coefficients,
            beta,
            f_norm,
            n_eff,
            truncation_bound: 0.0,
            sups,
            tail: TailModel::new(eig)?,
            coef_amp,
            coef_decay,
        };
        sol.truncation_bound = sol.bound_with(0.0, &vec![1.0; sol.eig.n_modes()]);
        Ok(sol)
    }

    pub fn from_field(eig: &'a EigenSystem, beta: f64, f: &ScalarField) -> Result<Self> {
        let (c, norm) = project_with_norm(f, eig)?;
        Self::new(eig, beta, c, Some(norm))
    }

    /// E_beta(-lambda_n t^beta) for every stored mode.
    pub fn time_factors(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(FracError::param("t", t, "must be finite and non-negative"));
        }
        let tb = t.powf(self.beta);
        self.eig
            .lambdas
            .iter()
            .map(|l| mittag_leffler(self.beta, -l * tb).map(|v| v.value))
            .collect()
    }

    /// Truncation bound at time t: dropped computed modes plus the
    /// extrapolated tail beyond them.
    pub fn bound_at(&self, t: f64) -> Result<f64> {
        let factors = self.time_factors(t)?;
        Ok(self.bound_with(t, &factors))
    }

    fn bound_with(&self, t: f64, factors: &[f64]) -> f64 {
        let dropped: f64 = (self.n_eff..self.eig.n_modes())
            .map(|n| (self.coefficients[n] * self.sups[n] * factors[n]).abs())
            .sum();
        let decay = if t > 0.0 {
            Some((t.powf(self.beta), gamma(1.0 + self.beta)))
        } else {
            None
        };
        dropped + self.tail.series_tail(self.coef_amp, self.coef_decay, decay)
    }

    /// u(t, x) with its truncation bound; zero off the domain.
    ///
    /// For t > 0 a bound above TAIL_TOLERANCE ||f|| is an error; at t = 0
    /// the value is the truncated reconstruction of f and the bound is only
    /// reported.
    pub fn eval_at(&self, t: f64, x: &[f64]) -> Result<Evaluation> {
        let factors = self.time_factors(t)?;
        self.eval_with(t, &factors, x)
    }

    /// Evaluates several points sharing one time.
    pub fn eval_many(&self, t: f64, xs: &[Vec<f64>]) -> Result<Vec<Evaluation>> {
        let factors = self.time_factors(t)?;
        xs.iter().map(|x| self.eval_with(t, &factors, x)).collect()
    }

    fn eval_with(&self, t: f64, factors: &[f64], x: &[f64]) -> Result<Evaluation> {
        let bound = self.bound_with(t, factors);
        if t > 0.0 && bound > TAIL_TOLERANCE * self.f_norm {
            return Err(FracError::TruncationInsufficient {
                bound,
                tolerance: TAIL_TOLERANCE * self.f_norm,
            });
        }
        if !self.eig.domain.contains(x) {
            return Ok(Evaluation { value: 0.0, bound });
        }
        let mut psi = Vec::new();
        self.eig.eval_all(x, &mut psi);
        let value = (0..self.n_eff)
            .map(|n| factors[n] * self.coefficients[n] * psi[n])
            .sum();
        Ok(Evaluation { value, bound })
    }

    /// u(t, x) through the subordination integral against g_beta.
    pub fn eval_subordination(&self, rule: &SubordinationRule, t: f64, x: &[f64]) -> Result<f64> {
        if rule.beta != self.beta {
            return Err(FracError::Config("subordination rule built for another beta".into()));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(FracError::param("t", t, "must be positive and finite"));
        }
        if !self.eig.domain.contains(x) {
            return Ok(0.0);
        }
        let mut psi = Vec::new();
        self.eig.eval_all(x, &mut psi);
        Ok((0..self.n_eff)
            .map(|n| rule.factor(self.eig.lambdas[n], t) * self.coefficients[n] * psi[n])
            .sum())
    }

    /// Smallest integer k above -1 + (3d + 4) / (2 alpha), and the partial
    /// sum of lambda_n^{2k} <f, psi_n>^2 over the computed modes.
    pub fn smoothness_partial_sum(&self) -> (u32, f64) {
        let d = self.eig.dim() as f64;
        let threshold = -1.0 + (3.0 * d + 4.0) / (2.0 * self.eig.alpha);
        let k = (threshold.floor() + 1.0).max(0.0) as u32;
        let s = self
            .eig
            .lambdas
            .iter()
            .zip(&self.coefficients)
            .map(|(l, c)| l.powi(2 * k as i32) * c * c)
            .sum();
        (k, s)
    }
}

// Power-law envelope |c_n| <= amp n^{-q} fitted on the upper half of the
// computed modes. Coefficients at rounding level are treated as zero.
fn fit_decay(coeffs: &[f64], f_norm: f64) -> (f64, f64) {
    let n = coeffs.len();
    let floor = 1e-12 * f_norm;
    let window: Vec<(f64, f64)> = (n.div_ceil(2)..n)
        .filter(|&i| coeffs[i].abs() > floor)
        .map(|i| (((i + 1) as f64).ln(), coeffs[i].abs().ln()))
        .collect();
    if window.is_empty() {
        return (0.0, 0.0);
    }
    let q = if window.len() >= 3 {
        let k = window.len() as f64;
        let mx = window.iter().map(|p| p.0).sum::<f64>() / k;
        let my = window.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = window.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = window.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            (-sxy / sxx).max(0.0)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let amp = window
        .iter()
        .map(|(ln_n, ln_c)| (ln_c + q * ln_n).exp())
        .fold(0.0, f64::max);
    (amp, q)
}

/// Series solution u(t, x) = sum E_beta(-lambda_n t^beta) c_n psi_n(x).
pub fn solve_spectral(eig: &EigenSystem, beta: f64, f_coeffs: &[f64], t: f64, x: &[f64]) -> Result<f64> {
    SpectralSolution::new(eig, beta, f_coeffs.to_vec(), None)?
        .eval_at(t, x)
        .map(|e| e.value)
}

/// Same solution through int_0^inf g_beta(u) T_{(t/u)^beta} f du.
pub fn solve_subordination(eig: &EigenSystem, beta: f64, f_coeffs: &[f64], t: f64, x: &[f64]) -> Result<f64> {
    let rule = SubordinationRule::new(beta)?;
    SpectralSolution::new(eig, beta, f_coeffs.to_vec(), None)?.eval_subordination(&rule, t, x)
}

/// Killed transition density p_D(t, x, y) = sum e^{-lambda_n t} psi_n(x) psi_n(y).
pub fn killed_heat_kernel(eig: &EigenSystem, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    killed_heat_kernel_with_bound(eig, t, x, y).and_then(|(v, bound)| {
        if bound > TAIL_TOLERANCE * v.abs() {
            Err(FracError::TruncationInsufficient {
                bound,
                tolerance: TAIL_TOLERANCE * v.abs(),
            })
        } else {
            Ok(v)
        }
    })
}

/// Kernel value and the bound on the omitted modes, without the check.
pub fn killed_heat_kernel_with_bound(eig: &EigenSystem, t: f64, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(FracError::param("t", t, "must be positive and finite"));
    }
    if !eig.domain.contains(x) || !eig.domain.contains(y) {
        return Ok((0.0, 0.0));
    }
    let mut px = Vec::new();
    let mut py = Vec::new();
    eig.eval_all(x, &mut px);
    eig.eval_all(y, &mut py);
    let v = eig
        .lambdas
        .iter()
        .zip(px.iter().zip(&py))
        .map(|(l, (a, b))| (-l * t).exp() * a * b)
        .sum();
    Ok((v, kernel_tail(eig, t)?))
}

// sum_{n > N} e^{-lambda_n t} sup|psi_n|^2 under the Weyl lower law and the
// semigroup sup bound
fn kernel_tail(eig: &EigenSystem, t: f64) -> Result<f64> {
    let tail = TailModel::new(eig)?;
    let d = eig.dim() as f64;
    let mut s = 0.0;
    let mut n = eig.n_modes() + 1;
    loop {
        let nf = n as f64;
        let lam_lo = tail.weyl_lo * nf.powf(tail.exponent);
        let lam_hi = tail.weyl_hi * nf.powf(tail.exponent);
        let term = (-lam_lo * t).exp() * tail.sup_const.powi(2) * lam_hi.powf(d / eig.alpha);
        s += term;
        if term < 1e-18 * s.max(1e-300) || n > 1_000_000 * eig.n_modes() {
            break;
        }
        n += 1;
    }
    Ok(s)
}

/// Quadrature for int_0^inf g_beta(u) h((t/u)^beta) du in s = ln u.
#[derive(Debug, Clone)]
pub struct SubordinationRule {
    pub beta: f64,
    // (e^{-beta s}, weight including g_beta(e^s) e^s)
    nodes: Vec<(f64, f64)>,
}

impl SubordinationRule {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(FracError::param("beta", beta, "must lie in (0, 1]"));
        }
        if beta == 1.0 {
            return Ok(SubordinationRule {
                beta,
                nodes: vec![(1.0, 1.0)],
            });
        }
        let width = 0.5f64.min(1.0 - beta).max(0.05);
        let weight = |s: f64| -> Result<f64> {
            let u = s.exp();
            Ok(subordinator_density(beta, u)? * u)
        };
        // the density mass above e^{s_hi} is of order e^{-28}
        let s_hi = 28.0 / beta;
        let mut s_lo = 0.0;
        let mut peak = weight(0.0)?;
        loop {
            s_lo -= width;
            let w = weight(s_lo)?;
            peak = peak.max(w);
            if w < 1e-18 * peak {
                break;
            }
            if s_lo < -200.0 {
                return Err(FracError::NonConvergence("subordinator density left tail".into()));
            }
        }
        let panels = ((s_hi - s_lo) / width).ceil() as usize;
        let h = (s_hi - s_lo) / panels as f64;
        let mut nodes = Vec::with_capacity(16 * panels);
        let mut mass = 0.0;
        for p in 0..panels {
            let a = s_lo + h * p as f64;
            for (s, w) in gl16().mapped(a, a + h) {
                let ws = w * weight(s)?;
                mass += ws;
                nodes.push(((-beta * s).exp(), ws));
            }
        }
        if (mass - 1.0).abs() > 1e-8 {
            return Err(FracError::NonConvergence(format!(
                "subordinator density integrates to {mass} on the quadrature"
            )));
        }
        Ok(SubordinationRule { beta, nodes })
    }

    /// int g_beta(u) exp(-lambda (t/u)^beta) du.
    pub fn factor(&self, lambda: f64, t: f64) -> f64 {
        if self.beta == 1.0 {
            return (-lambda * t).exp();
        }
        let a = lambda * t.powf(self.beta);
        self.nodes.iter().map(|(e, w)| w * (-a * e).exp()).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
