//! Pointwise fractional operators: the Caputo time derivative on sampled
//! data and the singular-integral form of the fractional Laplacian.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::quadrature::{gl16, tanh_sinh, GaussLegendre};
use crate::special::{frac_laplacian_constant, gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    Cubic,
}

/// Samples of a real function on a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct SampledFunction1D {
    grid: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
    // second derivatives of the natural cubic spline
    curvature: Vec<f64>,
}

impl SampledFunction1D {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(FracError::Config(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(FracError::Config("a sampled function needs at least two points".into()));
        }
        if grid.iter().any(|g| !g.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(FracError::Config("grid and values must be finite".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FracError::Config("grid must be strictly increasing".into()));
        }
        let curvature = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::Cubic => natural_spline(&grid, &values),
        };
        Ok(SampledFunction1D {
            grid,
            values,
            interpolation,
            curvature,
        })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Vec<f64>, interpolation: Interpolation, f: F) -> Result<Self> {
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values, interpolation)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn span(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    /// Interpolated value; `None` outside the grid span.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let j = self.interval_of(t);
        let (x0, x1) = (self.grid[j], self.grid[j + 1]);
        let (y0, y1) = (self.values[j], self.values[j + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let linear = a * y0 + b * y1;
        Some(match self.interpolation {
            Interpolation::Linear => linear,
            Interpolation::Cubic => {
                let (m0, m1) = (self.curvature[j], self.curvature[j + 1]);
                linear + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
            }
        })
    }

    // index j with grid[j] <= t <= grid[j+1]
    fn interval_of(&self, t: f64) -> usize {
        let n = self.grid.len();
        match self.grid.binary_search_by(|g| g.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => (i - 1).min(n - 2),
        }
    }
}

fn natural_spline(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // tridiagonal system for interior curvatures (Thomas algorithm)
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for i in 2..n - 1 {
        let lower = x[i] - x[i - 1];
        let w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        let next = if i + 1 < n - 1 { m[i + 1] } else { 0.0 };
        m[i] = (rhs[i] - upper[i] * next) / diag[i];
    }
    m
}

/// Caputo derivative of order `beta` at `t`, by the L1 scheme.
///
/// The samples are joined piecewise linearly from `grid[0]`, which plays the
/// role of the initial time, and the kernel (t - r)^{-beta} is integrated
/// exactly on every piece. `t` must lie in (grid[0], grid_last]; an off-grid
/// `t` closes with a partial piece whose endpoint value is interpolated.
///
/// The result is exact for piecewise-linear data, so the error is that of
/// linear interpolation of f weighted by the kernel.
pub fn caputo_derivative(f: &SampledFunction1D, beta: f64, t: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(FracError::param("beta", beta, "must lie in (0, 1)"));
    }
    let (lo, hi) = f.span();
    if !(t > lo && t <= hi) {
        return Err(FracError::param("t", t, "must lie inside the sample grid span"));
    }
    let grid = f.grid();
    let values = f.values();
    let p = 1.0 - beta;
    let mut sum = 0.0;
    let mut j = 0;
    while j + 1 < grid.len() && grid[j + 1] <= t {
        let slope = (values[j + 1] - values[j]) / (grid[j + 1] - grid[j]);
        sum += slope * ((t - grid[j]).powf(p) - (t - grid[j + 1]).powf(p));
        j += 1;
    }
    if grid[j] < t {
        let ft = f.eval(t).expect("t checked against the span");
        let slope = (ft - values[j]) / (t - grid[j]);
        sum += slope * (t - grid[j]).powf(p);
    }
    Ok(sum / gamma(2.0 - beta))
}

type FieldFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real function on R^d, zero outside the ball of radius `support_radius`
/// about the origin.
#[derive(Clone)]
pub struct ScalarField {
    evaluator: Arc<FieldFn>,
    support_radius: f64,
    sup_norm: Option<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("support_radius", &self.support_radius)
            .field("sup_norm", &self.sup_norm)
            .finish_non_exhaustive()
    }
}

impl ScalarField {
    /// Field vanishing outside the ball of the given radius.
    pub fn compact<F>(support_radius: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        assert!(support_radius.is_finite() && support_radius >= 0.0);
        ScalarField {
            evaluator: Arc::new(f),
            support_radius,
            sup_norm: None,
        }
    }

    /// Field without compact support. `sup_norm` bounds |f| and is needed to
    /// truncate far-field integrals.
    pub fn global<F>(sup_norm: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            evaluator: Arc::new(f),
            support_radius: f64::INFINITY,
            sup_norm: Some(sup_norm),
        }
    }

    pub fn with_sup_norm(mut self, sup_norm: f64) -> Self {
        self.sup_norm = Some(sup_norm);
        self
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn sup_norm(&self) -> Option<f64> {
        self.sup_norm
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.support_radius.is_finite() {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 > self.support_radius * self.support_radius {
                return 0.0;
            }
        }
        (self.evaluator)(x)
    }
}

/// Quadrature settings for [`frac_laplacian_pointwise`].
#[derive(Debug, Clone, Copy)]
pub struct FracLaplacianOptions {
    /// Radius of the inner shell treated with the Taylor correction.
    pub delta: f64,
    /// Absolute tolerance for the far-field truncation and the shell check.
    pub tol: f64,
    /// Largest radial panel width in the outer integral.
    pub max_panel: f64,
    /// Cap on the truncation radius for fields without compact support.
    pub max_radius: f64,
}

impl Default for FracLaplacianOptions {
    fn default() -> Self {
        FracLaplacianOptions {
            delta: 0.1,
            tol: 1e-7,
            max_panel: 0.05,
            max_radius: 1e6,
        }
    }
}

/// Delta^{alpha/2} f(x) from the principal-value integral
/// c_{d,alpha} int (f(x+y) - f(x) - grad f(x).y 1{|y|<=1}) |y|^{-d-alpha} dy,
/// computed in symmetrised radial form along a set of directions.
///
/// Near the origin the second difference is replaced by its quadratic
/// model, integrated analytically, and the remainder by tanh-sinh. The
/// computation is repeated with half the shell radius; disagreement above
/// the tolerance means f is not smooth enough at x.
pub fn frac_laplacian_pointwise(f: &ScalarField, alpha: f64, x: &[f64]) -> Result<f64> {
    frac_laplacian_with(f, alpha, x, &FracLaplacianOptions::default())
}

pub fn frac_laplacian_with(f: &ScalarField, alpha: f64, x: &[f64], opts: &FracLaplacianOptions) -> Result<f64> {
    let d = x.len();
    if !(1..=3).contains(&d) {
        return Err(FracError::Unsupported(format!(
            "pointwise fractional Laplacian in dimension {d}"
        )));
    }
    let c = frac_laplacian_constant(d, alpha)?;
    let fx = f.eval(x);
    let radius = far_radius(f, alpha, x, opts)?;

    let full = shell_sum(f, alpha, x, fx, radius, opts.delta, opts)?;
    let half = shell_sum(f, alpha, x, fx, radius, 0.5 * opts.delta, opts)?;
    let scale = 1.0 + fx.abs();
    if (c * (full - half)).abs() > 100.0 * opts.tol * scale {
        return Err(FracError::NonConvergence(format!(
            "inner-shell estimates differ by {:e} at x = {:?}",
            (c * (full - half)).abs(),
            x
        )));
    }
    Ok(c * half)
}

// Radius past which the integrand is either -2 f(x) |y|^{-d-alpha} exactly
// (compact support) or bounded by the far-field truncation tolerance.
fn far_radius(f: &ScalarField, alpha: f64, x: &[f64], opts: &FracLaplacianOptions) -> Result<f64> {
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if f.support_radius().is_finite() {
        return Ok((f.support_radius() + xnorm).max(2.0 * opts.delta));
    }
    let sup = f
        .sup_norm()
        .ok_or_else(|| FracError::Config("fields without compact support need a sup norm".into()))?;
    // |f(x+y) + f(x-y) - 2 f(x)| <= 4 sup, integrated past R
    let r = (4.0 * sup / (alpha * opts.tol)).powf(1.0 / alpha);
    if r > opts.max_radius {
        return Err(FracError::NonConvergence(format!(
            "far-field truncation radius {r:e} exceeds the cap {:e}",
            opts.max_radius
        )));
    }
    Ok(r.max(2.0 * opts.delta))
}

// Integral over directions of the radial integral, without the constant.
fn shell_sum(
    f: &ScalarField,
    alpha: f64,
    x: &[f64],
    fx: f64,
    radius: f64,
    delta: f64,
    opts: &FracLaplacianOptions,
) -> Result<f64> {
    let d = x.len();
    let mut total = 0.0;
    for (dir, w) in directions(d) {
        total += w * radial(f, alpha, x, &dir, fx, radius, delta, opts)?;
    }
    Ok(total)
}

// Direction nodes and weights such that sum w g(omega) approximates
// (1/2) int_{S^{d-1}} g for g even in omega.
fn directions(d: usize) -> Vec<(Vec<f64>, f64)> {
    match d {
        1 => vec![(vec![1.0], 1.0)],
        2 => {
            // half circle, periodic trapezoid
            let n = 64;
            (0..n)
                .map(|k| {
                    let phi = PI * k as f64 / n as f64;
                    (vec![phi.cos(), phi.sin()], PI / n as f64)
                })
                .collect()
        }
        _ => {
            // upper hemisphere: Gauss-Legendre in cos(theta), trapezoid in phi
            let rule = GaussLegendre::new(24);
            let nphi = 48;
            let mut out = Vec::new();
            for (z, wz) in rule.mapped(0.0, 1.0) {
                let s = (1.0 - z * z).sqrt();
                for k in 0..nphi {
                    let phi = 2.0 * PI * k as f64 / nphi as f64;
                    out.push((vec![s * phi.cos(), s * phi.sin(), z], wz * 2.0 * PI / nphi as f64));
                }
            }
            out
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn radial(
    f: &ScalarField,
    alpha: f64,
    x: &[f64],
    dir: &[f64],
    fx: f64,
    radius: f64,
    delta: f64,
    opts: &FracLaplacianOptions,
) -> Result<f64> {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    let mut second_diff = |r: f64| {
        for i in 0..x.len() {
            xp[i] = x[i] + r * dir[i];
            xm[i] = x[i] - r * dir[i];
        }
        f.eval(&xp) + f.eval(&xm) - 2.0 * fx
    };

    // quadratic model D(r) ~ kappa r^2 from a Richardson pair of small steps
    let h = 1e-3 * delta;
    let k1 = second_diff(h) / (h * h);
    let k2 = second_diff(0.5 * h) / (0.25 * h * h);
    let kappa = (4.0 * k2 - k1) / 3.0;

    let inner = tanh_sinh(
        0.0,
        delta,
        |r, dl, _| {
            // below h the remainder is O(r^{3-alpha}) and only roundoff is left
            if dl < h {
                return 0.0;
            }
            (second_diff(r) - kappa * dl * dl) * dl.powf(-1.0 - alpha)
        },
        1e-10,
    );
    let mut total = inner.value + kappa * delta.powf(2.0 - alpha) / (2.0 - alpha);

    // outer: geometric panels, each split to at most max_panel wide
    let rule = gl16();
    let mut lo = delta;
    while lo < radius {
        let hi = (2.0 * lo).min(radius);
        let pieces = ((hi - lo) / opts.max_panel).ceil().max(1.0) as usize;
        let w = (hi - lo) / pieces as f64;
        for p in 0..pieces {
            let a = lo + w * p as f64;
            let b = if p + 1 == pieces { hi } else { a + w };
            total += rule.integrate(a, b, |r| second_diff(r) * r.powf(-1.0 - alpha));
        }
        lo = hi;
    }
    if f.support_radius().is_finite() {
        // past the support only -2 f(x) survives
        total += -2.0 * fx * radius.powf(-alpha) / alpha;
    }
    if !total.is_finite() {
        return Err(FracError::NonConvergence(format!(
            "non-finite radial integral at x = {x:?}"
        )));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ml;
    use approx::assert_relative_eq;

    fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(SampledFunction1D::new(vec![0.0, 1.0], vec![1.0], Interpolation::Linear).is_err());
        assert!(SampledFunction1D::new(vec![0.0, 0.0], vec![1.0, 2.0], Interpolation::Linear).is_err());
        assert!(SampledFunction1D::new(vec![0.0, 1.0], vec![1.0, f64::NAN], Interpolation::Cubic).is_err());
    }

    #[test]
    fn cubic_spline_reproduces_smooth_function() {
        let g = uniform(0.0, PI, 200);
        let s = SampledFunction1D::from_fn(g, Interpolation::Cubic, f64::sin).unwrap();
        for &t in &[0.3, 1.0, 2.2, 3.0] {
            assert!((s.eval(t).unwrap() - t.sin()).abs() < 1e-7);
        }
        assert!(s.eval(3.5).is_none());
    }

    #[test]
    fn caputo_of_identity() {
        let g = uniform(0.0, 1.0, 4096);
        let f = SampledFunction1D::from_fn(g, Interpolation::Linear, |t| t).unwrap();
        let v = caputo_derivative(&f, 0.5, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 / PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn caputo_of_constant_is_zero() {
        let g = uniform(0.0, 2.0, 100);
        let f = SampledFunction1D::from_fn(g, Interpolation::Cubic, |_| 3.0).unwrap();
        for &b in &[0.2, 0.5, 0.9] {
            assert_eq!(caputo_derivative(&f, b, 1.37).unwrap(), 0.0);
        }
    }

    #[test]
    fn caputo_rejects_out_of_range() {
        let f = SampledFunction1D::from_fn(uniform(0.0, 1.0, 10), Interpolation::Linear, |t| t).unwrap();
        assert!(caputo_derivative(&f, 0.5, 0.0).is_err());
        assert!(caputo_derivative(&f, 0.5, 1.5).is_err());
        assert!(caputo_derivative(&f, 1.0, 0.5).is_err());
    }

    #[test]
    fn caputo_power_rule_converges() {
        for &p in &[0.5f64, 1.0, 2.0, 3.0] {
            for &beta in &[0.3f64, 0.5, 0.8] {
                let exact = gamma(p + 1.0) / gamma(p + 1.0 - beta);
                let err = |n: usize| {
                    let f =
                        SampledFunction1D::from_fn(uniform(0.0, 1.0, n), Interpolation::Linear, |t| t.powf(p)).unwrap();
                    (caputo_derivative(&f, beta, 1.0).unwrap() - exact).abs() / exact
                };
                let coarse = err(1024);
                let fine = err(4096);
                assert!(fine <= 1e-3, "p={p} beta={beta} err={fine:e}");
                if coarse > 1e-13 {
                    assert!(fine < coarse, "p={p} beta={beta} {coarse:e} -> {fine:e}");
                }
            }
        }
    }

    #[test]
    fn caputo_mittag_leffler_example() {
        let beta = 0.6;
        let g = uniform(0.0, 0.5, 4096);
        let f = SampledFunction1D::from_fn(g, Interpolation::Linear, |t| ml(beta, -2.0 * t.powf(beta))).unwrap();
        let v = caputo_derivative(&f, beta, 0.5).unwrap();
        let expect = -2.0 * ml(beta, -2.0 * 0.5f64.powf(beta));
        assert!((v - expect).abs() < 2e-3, "{v} vs {expect}");
    }

    #[test]
    fn laplacian_of_cosine_matches_symbol() {
        let xi = 2.0;
        let f = ScalarField::global(1.0, move |x| (xi * x[0]).cos());
        let opts = FracLaplacianOptions {
            tol: 1e-6,
            max_panel: 0.25,
            ..Default::default()
        };
        let v = frac_laplacian_with(&f, 1.5, &[0.3], &opts).unwrap();
        let expect = -xi.powf(1.5) * (xi * 0.3).cos();
        assert!((v - expect).abs() < 1e-4, "{v} vs {expect}");
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        for d in 1..=3 {
            let f = ScalarField::global(2.0, |_| 2.0);
            let x = vec![0.2; d];
            let opts = FracLaplacianOptions {
                tol: 1e-3,
                max_panel: 1e3,
                ..Default::default()
            };
            let v = frac_laplacian_with(&f, 0.8, &x, &opts).unwrap();
            assert!(v.abs() < 1e-12, "d={d} {v}");
        }
    }

    fn bump(x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 < 1.0 {
            (1.0 - r2).powi(3)
        } else {
            0.0
        }
    }

    #[test]
    fn laplacian_of_bump_matches_riemann_sum() {
        // c int_0^inf (f(r) + f(-r) - 2 f(0)) r^{-2} dr at alpha = 1, split
        // at r = 1 where the bump vanishes; midpoint sum on 1e6 cells
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) * h;
            s += 2.0 * ((1.0 - r * r).powi(3) - 1.0) / (r * r) * h;
        }
        let oracle = (s - 2.0) / PI;
        let f = ScalarField::compact(1.0, bump);
        let v = frac_laplacian_pointwise(&f, 1.0, &[0.0]).unwrap();
        assert!((v - oracle).abs() < 1e-4, "{v} vs {oracle}");
        assert_relative_eq!(v, -6.4 / PI, max_relative = 1e-8);
    }

    #[test]
    fn laplacian_of_gaussian_matches_fourier_side() {
        // Fourier side: -(1/sqrt(pi)) int_0^inf xi^alpha e^{-xi^2/4} cos(xi x) dxi
        // e^{-64} is below double precision relative to the peak
        let f = ScalarField::compact(8.0, |x| (-x[0] * x[0]).exp());
        let opts = FracLaplacianOptions {
            tol: 1e-8,
            max_panel: 0.1,
            ..Default::default()
        };
        for &alpha in &[0.5, 1.0, 1.7] {
            for &x in &[0.0, 0.4, 1.3] {
                let oracle = -crate::quadrature::composite(gl16(), 0.0, 20.0, 400, |k| {
                    k.powf(alpha) * (-k * k / 4.0).exp() * (k * x).cos()
                }) / PI.sqrt();
                let v = frac_laplacian_with(&f, alpha, &[x], &opts).unwrap();
                assert!((v - oracle).abs() < 1e-5, "alpha={alpha} x={x}: {v} vs {oracle}");
            }
        }
    }

    #[test]
    fn laplacian_of_planar_gaussian_at_origin() {
        // radial Fourier integral: -2^alpha Gamma(1 + alpha/2)
        let f = ScalarField::compact(8.0, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let opts = FracLaplacianOptions {
            max_panel: 0.1,
            ..Default::default()
        };
        let alpha = 1.2;
        let v = frac_laplacian_with(&f, alpha, &[0.0, 0.0], &opts).unwrap();
        let expect = -(2f64.powf(alpha)) * gamma(1.0 + alpha / 2.0);
        assert_relative_eq!(v, expect, max_relative = 1e-5);
    }

    #[test]
    fn kinked_field_is_flagged() {
        let f = ScalarField::compact(2.0, |x| (1.0 - x[0].abs()).max(0.0));
        assert!(matches!(
            frac_laplacian_pointwise(&f, 1.5, &[0.0]),
            Err(FracError::NonConvergence(_))
        ));
    }
}
