//! Quadrature rules shared by the special functions and the solvers.
//!
//! Two families are provided: Gauss-Legendre rules (used composite, on
//! panels) and the tanh-sinh rule, which tolerates integrable algebraic
//! endpoint singularities and exposes the distance to both endpoints so
//! integrands can avoid cancellation near them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Shared 32-point rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// Shared 256-point rule.
pub fn gl256() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(256))
}

/// Composite Gauss-Legendre over `panels` equal pieces of [a, b].
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        total += rule.integrate(lo, hi, &mut f);
    }
    total
}

/// Result of an adaptive tanh-sinh integration.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const TS_TMAX: f64 = 6.5;
const TS_MAX_LEVEL: usize = 12;

/// Tanh-sinh quadrature on (0, 1).
///
/// The integrand receives `(x, 1 - x)`, both computed without cancellation,
/// so singular or double-exponentially decaying endpoint behaviour can be
/// evaluated accurately. Levels are refined until successive estimates
/// agree to `rel_tol`.
pub fn tanh_sinh_unit<F: FnMut(f64, f64) -> f64>(mut f: F, rel_tol: f64) -> TanhSinh {
    let mut eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let near = e / (1.0 + e);
        let far = 1.0 / (1.0 + e);
        let w = PI * t.cosh() * e / ((1.0 + e) * (1.0 + e));
        if w == 0.0 || near == 0.0 {
            return 0.0;
        }
        let v = if t >= 0.0 { f(far, near) } else { f(near, far) };
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };

    let mut h = 0.5;
    let mut evaluations = 1;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= TS_TMAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        evaluations += 2;
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for level in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TS_TMAX {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            evaluations += 2;
            k += 2;
        }
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if level >= 3 && error <= rel_tol * estimate.abs().max(1e-300) {
            break;
        }
    }
    TanhSinh {
        value: estimate,
        error_estimate: error,
        evaluations,
    }
}

/// Tanh-sinh on [a, b]; the integrand gets `(x, x - a, b - x)`.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(a: f64, b: f64, mut f: F, rel_tol: f64) -> TanhSinh {
    let len = b - a;
    let mut r = tanh_sinh_unit(
        |l, r| {
            let dl = l * len;
            let dr = r * len;
            let x = if l <= r { a + dl } else { b - dr };
            f(x, dl, dr)
        },
        rel_tol,
    );
    r.value *= len;
    r.error_estimate *= len;
    r
}

/// Tanh-sinh on [a, inf) through x = a + y / (1 - y).
pub fn tanh_sinh_half_line<F: FnMut(f64) -> f64>(a: f64, mut f: F, rel_tol: f64) -> TanhSinh {
    tanh_sinh_unit(
        |y, ybar| {
            let x = a + y / ybar;
            let jac = 1.0 / (ybar * ybar);
            if !jac.is_finite() {
                return 0.0;
            }
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        rel_tol,
    )
}

/// Kahan-Babuska (Neumaier) compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 32, 64, 256] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the limit for 8 nodes
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn gl256_integrates_smooth_function() {
        let v = gl256().integrate(0.0, PI, |x| x.sin());
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = tanh_sinh_unit(|x, _| x.powf(-0.5), 1e-14);
        assert!((r.value - 2.0).abs() < 1e-12, "{:?}", r);
        // int_0^1 ln(1-x) dx = -1, singular at the right end
        let r = tanh_sinh_unit(|_, xb| xb.ln(), 1e-14);
        assert!((r.value + 1.0).abs() < 1e-12, "{:?}", r);
    }

    #[test]
    fn half_line_exponential() {
        let r = tanh_sinh_half_line(0.0, |x| (-x).exp(), 1e-13);
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = tanh_sinh_half_line(1.0, |x| x.powf(-2.5), 1e-13);
        assert!((r.value - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
