use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};

use crate::special::zolotarev_ln_a;

/// Z_1 of the standard one-sided stable subordinator, E[exp(-eta Z_1)] = exp(-eta^beta),
/// by Kanter's representation Z = (A(theta)/W)^{(1-beta)/beta}.
/// At beta = 1 the subordinator is the identity and Z_1 = 1.
pub fn sample_one_sided_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    if beta >= 1.0 {
        return 1.0;
    }
    let u: f64 = Open01.sample(rng);
    let w: f64 = Exp1.sample(rng);
    let ln_a = zolotarev_ln_a(beta, PI * u);
    ((1.0 - beta) / beta * (ln_a - w.ln())).exp()
}

/// E_t = (t / Z_1)^beta; exactly t at beta = 1, with no draw taken.
pub fn sample_inverse_subordinator<R: Rng + ?Sized>(beta: f64, t: f64, rng: &mut R) -> f64 {
    if beta >= 1.0 {
        return t;
    }
    let z = sample_one_sided_stable(beta, rng);
    (beta * (t.ln() - z.ln())).exp()
}

/// Increment over `dt` of the isotropic stable process with symbol |xi|^alpha.
pub fn sample_stable_increment<R: Rng + ?Sized>(alpha: f64, dt: f64, d: usize, rng: &mut R) -> Vec<f64> {
    let mut x = vec![0.0; d];
    add_stable_increment(alpha, dt, rng, &mut x);
    x
}

/// Adds one increment in place: Brownian motion with covariance 2tI run for
/// an (alpha/2)-stable subordinator time.
pub(crate) fn add_stable_increment<R: Rng + ?Sized>(alpha: f64, dt: f64, rng: &mut R, x: &mut [f64]) {
    let clock = if alpha >= 2.0 {
        dt
    } else {
        dt.powf(2.0 / alpha) * sample_one_sided_stable(0.5 * alpha, rng)
    };
    let scale = (2.0 * clock).sqrt();
    for xi in x.iter_mut() {
        let n: f64 = StandardNormal.sample(rng);
        *xi += scale * n;
    }
}
