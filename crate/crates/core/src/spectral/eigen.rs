use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::domain::Domain;
use crate::error::{FracError, Result};
use crate::quadrature::{gl16, GaussLegendre};
use crate::special::frac_laplacian_constant;

/// Eigenfunction representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Eigenfunctions {
    /// Products of sines, one index per axis (alpha = 2).
    Sine { indices: Vec<Vec<usize>> },
    /// Nodal values of continuous piecewise-linear functions on a 1-D mesh
    /// that includes both endpoints.
    Mesh { mesh: Vec<f64>, psi: Vec<Vec<f64>> },
}

/// Lowest Dirichlet eigenpairs of the killed generator on a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub alpha: f64,
    pub domain: Domain,
    pub lambdas: Vec<f64>,
    pub functions: Eigenfunctions,
}

// 1-D sine eigenvalue (k pi / L)^2 and normalisation sqrt(2 / L)
fn sine_lambda(k: usize, len: f64) -> f64 {
    (k as f64 * PI / len).powi(2)
}

/// Closed-form Dirichlet eigensystem of -Laplacian (alpha = 2).
///
/// Box spectra are ordered by eigenvalue and then lexicographically by
/// index vector, which makes the order of degenerate modes reproducible.
pub fn eigensystem_analytic(domain: &Domain, alpha: f64, n_modes: usize) -> Result<EigenSystem> {
    if alpha != 2.0 {
        return Err(FracError::Unsupported(format!(
            "closed-form eigensystems exist only for alpha = 2 (got {alpha})"
        )));
    }
    domain.validate()?;
    if n_modes == 0 {
        return Err(FracError::Config("n_modes must be positive".into()));
    }
    let lens = domain.side_lengths();
    let d = lens.len();
    let mut modes: Vec<(f64, Vec<usize>)> = if d == 1 {
        (1..=n_modes).map(|k| (sine_lambda(k, lens[0]), vec![k])).collect()
    } else {
        let lmin = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut cap = (n_modes as f64).powf(2.0 / d as f64) * (PI / lmin).powi(2) * d as f64;
        loop {
            let found = enumerate_below(&lens, cap);
            if found.len() >= n_modes {
                break found;
            }
            cap *= 2.0;
        }
    };
    modes.sort_by(|(la, ia), (lb, ib)| {
        let tie = 1e-12 * la.abs().max(lb.abs());
        if (la - lb).abs() <= tie {
            ia.cmp(ib)
        } else {
            la.partial_cmp(lb).unwrap()
        }
    });
    modes.truncate(n_modes);
    let (lambdas, indices) = modes.into_iter().unzip();
    Ok(EigenSystem {
        alpha,
        domain: domain.clone(),
        lambdas,
        functions: Eigenfunctions::Sine { indices },
    })
}

fn enumerate_below(lens: &[f64], cap: f64) -> Vec<(f64, Vec<usize>)> {
    let kmax: Vec<usize> = lens.iter().map(|l| (l * cap.sqrt() / PI).floor() as usize).collect();
    let mut out = Vec::new();
    let mut idx = vec![1usize; lens.len()];
    if kmax.contains(&0) {
        return out;
    }
    loop {
        let lam: f64 = idx.iter().zip(lens).map(|(&k, &l)| sine_lambda(k, l)).sum();
        if lam <= cap {
            out.push((lam, idx.clone()));
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == idx.len() {
                return out;
            }
            if idx[axis] < kmax[axis] {
                idx[axis] += 1;
                break;
            }
            idx[axis] = 1;
            axis += 1;
        }
    }
}

// Coefficients of the even-order central-difference expansion
// delta^4 g = sum_j COEF[j] g^{(4 + 2j)}.
const FOURTH_DIFF_SERIES: [f64; 9] = [
    1.0,
    1.0 / 6.0,
    1.0 / 80.0,
    17.0 / 30240.0,
    31.0 / 1814400.0,
    1.0 / 2661120.0,
    5461.0 / 871782912000.0,
    257.0 / 3138418483200.0,
    73.0 / 84687482880000.0,
];
const STIFFNESS_SERIES_FROM: usize = 24;

/// Stiffness entry between two unit-spaced hat functions `k` nodes apart
/// for the form (1/2) int int (u(x)-u(y))(v(x)-v(y)) |x-y|^{-1-alpha},
/// i.e. without the constant c_{1,alpha} and the h^{1-alpha} scaling.
///
/// It is minus a fourth central difference of |m|^{3-alpha} divided by
/// (3-alpha)(2-alpha)(1-alpha)(-alpha), with the m^2 ln m limit at
/// alpha = 1. For large k the difference is summed from its derivative
/// expansion, which avoids the k^4 cancellation.
pub fn unit_stiffness(alpha: f64, k: usize) -> f64 {
    let p = 3.0 - alpha;
    if k >= STIFFNESS_SERIES_FROM {
        let kf = k as f64;
        let mut falling = 1.0;
        let mut sum = 0.0;
        for (j, c) in FOURTH_DIFF_SERIES.iter().enumerate() {
            if j > 0 {
                let n = 4.0 + 2.0 * j as f64;
                falling *= (p - n + 2.0) * (p - n + 1.0);
            }
            sum += c * falling * kf.powf(p - 4.0 - 2.0 * j as f64);
        }
        return -sum;
    }
    let binom = [1.0, -4.0, 6.0, -4.0, 1.0];
    let m = |j: usize| (k as f64 + 2.0 - j as f64).abs();
    if (alpha - 1.0).abs() < 1e-9 {
        let s: f64 = (0..5)
            .map(|j| {
                let mj = m(j);
                if mj == 0.0 {
                    0.0
                } else {
                    binom[j] * mj * mj * mj.ln()
                }
            })
            .sum();
        return 0.5 * s;
    }
    let s: f64 = (0..5).map(|j| binom[j] * m(j).powf(p)).sum();
    -s / (p * (p - 1.0) * (p - 2.0) * (p - 3.0))
}

/// Galerkin eigensystem of the restricted fractional Laplacian on an
/// interval, with `mesh_size` interior P1 nodes on a uniform mesh.
///
/// The stiffness matrix is the full Dirichlet form of the zero-extended
/// hats, so interaction with the exterior is included. The generalised
/// problem K v = lambda M v is reduced with the Cholesky factor of the
/// tridiagonal mass matrix and solved densely.
pub fn eigensystem_numeric_1d(domain: &Domain, alpha: f64, mesh_size: usize, n_modes: usize) -> Result<EigenSystem> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(FracError::param(
            "alpha",
            alpha,
            "numeric eigensystems need 0 < alpha < 2",
        ));
    }
    domain.validate()?;
    if domain.dim() != 1 {
        return Err(FracError::Unsupported(
            "numeric eigensystems are one-dimensional; boxes for alpha < 2 do not factorise".into(),
        ));
    }
    if mesh_size < 64 {
        return Err(FracError::Config(format!(
            "mesh_size must be at least 64 (got {mesh_size})"
        )));
    }
    if n_modes == 0 || n_modes > mesh_size / 4 {
        return Err(FracError::Config(format!(
            "n_modes must lie in [1, mesh_size/4] = [1, {}] (got {n_modes})",
            mesh_size / 4
        )));
    }
    let (lo, hi) = domain.bounds();
    let (a, b) = (lo[0], hi[0]);
    let m = mesh_size;
    let h = (b - a) / (m + 1) as f64;
    let c = frac_laplacian_constant(1, alpha)?;
    let scale = c * h.powf(1.0 - alpha);
    let row: Vec<f64> = (0..m).map(|k| scale * unit_stiffness(alpha, k)).collect();

    // Cholesky factor of the mass matrix h * tridiag(1/6, 2/3, 1/6)
    let mut ldiag = vec![0.0; m];
    let mut lsub = vec![0.0; m];
    for i in 0..m {
        let off = if i > 0 { h / 6.0 } else { 0.0 };
        if i > 0 {
            lsub[i] = off / ldiag[i - 1];
        }
        ldiag[i] = (2.0 * h / 3.0 - lsub[i] * lsub[i]).sqrt();
    }
    let forward = |mat: &mut DMatrix<f64>| {
        // rows of L^{-1} mat
        for i in 0..m {
            for j in 0..m {
                let prev = if i > 0 { mat[(i - 1, j)] } else { 0.0 };
                mat[(i, j)] = (mat[(i, j)] - lsub[i] * prev) / ldiag[i];
            }
        }
    };
    let mut reduced = DMatrix::from_fn(m, m, |i, j| row[i.abs_diff(j)]);
    forward(&mut reduced);
    reduced.transpose_mut();
    forward(&mut reduced);
    // symmetrise away rounding before the symmetric solver
    let reduced = 0.5 * (&reduced + reduced.transpose());

    let eig = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

    let mesh: Vec<f64> = (0..m + 2)
        .map(|i| if i == m + 1 { b } else { a + h * i as f64 })
        .collect();
    let mid = 0.5 * (a + b);
    let mut lambdas = Vec::with_capacity(n_modes);
    let mut psi = Vec::with_capacity(n_modes);
    for &col in order.iter().take(n_modes) {
        let lam = eig.eigenvalues[col];
        if !(lam > 0.0) {
            return Err(FracError::Eigensolve(format!("non-positive eigenvalue {lam:e}")));
        }
        let w = eig.eigenvectors.column(col);
        // back substitution with L^T
        let mut v = vec![0.0; m + 2];
        for i in (0..m).rev() {
            let next = if i + 1 < m { lsub[i + 1] * v[i + 2] } else { 0.0 };
            v[i + 1] = (w[i] - next) / ldiag[i];
        }
        let left = p1_integral(&mesh, &v, a, mid);
        let right = p1_integral(&mesh, &v, mid, b);
        let total = left.abs() + right.abs();
        let lead = if left.abs() > 1e-10 * total { left } else { right };
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        lambdas.push(lam);
        psi.push(v);
    }
    let sys = EigenSystem {
        alpha,
        domain: domain.clone(),
        lambdas,
        functions: Eigenfunctions::Mesh { mesh, psi },
    };
    let defect = sys.gram_defect();
    if !(defect <= 1e-2) {
        return Err(FracError::Eigensolve(format!(
            "Gram matrix deviates from the identity by {defect:e}; mesh too coarse"
        )));
    }
    Ok(sys)
}

// integral over [lo, hi] of the piecewise-linear interpolant
fn p1_integral(mesh: &[f64], v: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..mesh.len() - 1 {
        let (x0, x1) = (mesh[i], mesh[i + 1]);
        let a = x0.max(lo);
        let b = x1.min(hi);
        if b <= a {
            continue;
        }
        let at = |x: f64| v[i] + (v[i + 1] - v[i]) * (x - x0) / (x1 - x0);
        s += 0.5 * (b - a) * (at(a) + at(b));
    }
    s
}

// P1 mass-matrix product u^T M v on a mesh with zero endpoint values
fn p1_inner(mesh: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..mesh.len() - 1 {
        let h = mesh[i + 1] - mesh[i];
        let (u0, u1, v0, v1) = (u[i], u[i + 1], v[i], v[i + 1]);
        s += h * (2.0 * u0 * v0 + 2.0 * u1 * v1 + u0 * v1 + u1 * v0) / 6.0;
    }
    s
}

/// Least-squares slope of log lambda_n against log n over n in [lo, hi]
/// (1-based).
pub fn weyl_slope(lambdas: &[f64], lo: usize, hi: usize) -> f64 {
    let hi = hi.min(lambdas.len());
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| ((n as f64).ln(), lambdas[n - 1].ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

impl EigenSystem {
    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.functions, Eigenfunctions::Sine { .. })
    }

    /// Keeps the lowest `n` modes.
    pub fn truncated(&self, n: usize) -> EigenSystem {
        let n = n.min(self.n_modes());
        let functions = match &self.functions {
            Eigenfunctions::Sine { indices } => Eigenfunctions::Sine {
                indices: indices[..n].to_vec(),
            },
            Eigenfunctions::Mesh { mesh, psi } => Eigenfunctions::Mesh {
                mesh: mesh.clone(),
                psi: psi[..n].to_vec(),
            },
        };
        EigenSystem {
            alpha: self.alpha,
            domain: self.domain.clone(),
            lambdas: self.lambdas[..n].to_vec(),
            functions,
        }
    }

    /// psi_n(x) for 0-based `n`; zero off the domain.
    pub fn eval(&self, n: usize, x: &[f64]) -> f64 {
        if !self.domain.contains(x) {
            return 0.0;
        }
        match &self.functions {
            Eigenfunctions::Sine { indices } => {
                let (lo, hi) = self.domain.bounds();
                let mut v = 1.0;
                for (i, &k) in indices[n].iter().enumerate() {
                    let len = hi[i] - lo[i];
                    v *= (2.0 / len).sqrt() * (k as f64 * PI * (x[i] - lo[i]) / len).sin();
                }
                v
            }
            Eigenfunctions::Mesh { mesh, psi } => {
                let (j, s) = locate(mesh, x[0]);
                psi[n][j] * (1.0 - s) + psi[n][j + 1] * s
            }
        }
    }

    /// All psi_n(x) at once.
    pub fn eval_all(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        if !self.domain.contains(x) {
            out.resize(self.n_modes(), 0.0);
            return;
        }
        match &self.functions {
            Eigenfunctions::Sine { .. } => {
                out.extend((0..self.n_modes()).map(|n| self.eval(n, x)));
            }
            Eigenfunctions::Mesh { mesh, psi } => {
                let (j, s) = locate(mesh, x[0]);
                out.extend(psi.iter().map(|p| p[j] * (1.0 - s) + p[j + 1] * s));
            }
        }
    }

    /// sup_x |psi_n(x)| for every mode.
    pub fn sup_norms(&self) -> Vec<f64> {
        match &self.functions {
            Eigenfunctions::Sine { indices } => {
                let amp: f64 = self.domain.side_lengths().iter().map(|l| (2.0 / l).sqrt()).product();
                vec![amp; indices.len()]
            }
            Eigenfunctions::Mesh { psi, .. } => psi
                .iter()
                .map(|p| p.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .collect(),
        }
    }

    /// Gram matrix of the stored modes.
    ///
    /// Sine systems use per-axis Gauss-Legendre quadrature; mesh systems
    /// integrate the P1 functions exactly.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let n = self.n_modes();
        let mut g = vec![vec![0.0; n]; n];
        match &self.functions {
            Eigenfunctions::Sine { indices } => {
                let (lo, hi) = self.domain.bounds();
                let tables: Vec<Vec<Vec<f64>>> = (0..self.dim())
                    .map(|axis| {
                        let kmax = indices.iter().map(|ix| ix[axis]).max().unwrap_or(1);
                        sine_gram_1d(lo[axis], hi[axis], kmax)
                    })
                    .collect();
                for i in 0..n {
                    for j in 0..=i {
                        let v: f64 = (0..self.dim())
                            .map(|ax| tables[ax][indices[i][ax] - 1][indices[j][ax] - 1])
                            .product();
                        g[i][j] = v;
                        g[j][i] = v;
                    }
                }
            }
            Eigenfunctions::Mesh { mesh, psi } => {
                for i in 0..n {
                    for j in 0..=i {
                        let v = p1_inner(mesh, &psi[i], &psi[j]);
                        g[i][j] = v;
                        g[j][i] = v;
                    }
                }
            }
        }
        g
    }

    /// max |G - I| over the stored modes.
    pub fn gram_defect(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0f64;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Quadrature nodes and weights over the domain, fine enough for
    /// products of the stored modes with a smooth function.
    pub fn quadrature(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        match &self.functions {
            Eigenfunctions::Mesh { mesh, .. } => {
                let rule = GaussLegendre::new(8);
                let mut pts = Vec::with_capacity(8 * mesh.len());
                let mut wts = Vec::with_capacity(8 * mesh.len());
                for e in mesh.windows(2) {
                    for (x, w) in rule.mapped(e[0], e[1]) {
                        pts.push(vec![x]);
                        wts.push(w);
                    }
                }
                (pts, wts)
            }
            Eigenfunctions::Sine { indices } => {
                let (lo, hi) = self.domain.bounds();
                let axes: Vec<Vec<(f64, f64)>> = (0..self.dim())
                    .map(|ax| {
                        let kmax = indices.iter().map(|ix| ix[ax]).max().unwrap_or(1);
                        let panels = (kmax + 8).max(16);
                        let w = (hi[ax] - lo[ax]) / panels as f64;
                        (0..panels)
                            .flat_map(|p| {
                                let a = lo[ax] + w * p as f64;
                                gl16().mapped(a, a + w).collect::<Vec<_>>()
                            })
                            .collect()
                    })
                    .collect();
                let mut pts = vec![Vec::new()];
                let mut wts = vec![1.0];
                for axis in &axes {
                    let mut np = Vec::with_capacity(pts.len() * axis.len());
                    let mut nw = Vec::with_capacity(pts.len() * axis.len());
                    for (p, w) in pts.iter().zip(&wts) {
                        for (x, wx) in axis {
                            let mut q = p.clone();
                            q.push(*x);
                            np.push(q);
                            nw.push(w * wx);
                        }
                    }
                    pts = np;
                    wts = nw;
                }
                (pts, wts)
            }
        }
    }

    /// int_D u v for functions sampled through closures. Mesh systems use the
    /// exact P1 mass matrix on nodal values.
    pub fn integrate_product<U, V>(&self, u: U, v: V) -> f64
    where
        U: Fn(&[f64]) -> f64,
        V: Fn(&[f64]) -> f64,
    {
        match &self.functions {
            Eigenfunctions::Mesh { mesh, .. } => {
                let uu: Vec<f64> = mesh
                    .iter()
                    .map(|&x| if self.domain.contains(&[x]) { u(&[x]) } else { 0.0 })
                    .collect();
                let vv: Vec<f64> = mesh
                    .iter()
                    .map(|&x| if self.domain.contains(&[x]) { v(&[x]) } else { 0.0 })
                    .collect();
                p1_inner(mesh, &uu, &vv)
            }
            Eigenfunctions::Sine { .. } => {
                let (pts, wts) = self.quadrature();
                pts.iter().zip(&wts).map(|(p, w)| w * u(p) * v(p)).sum()
            }
        }
    }

    pub fn to_json_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_json(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let (mesh, psi, sine_indices) = match &self.functions {
            Eigenfunctions::Mesh { mesh, psi } => (mesh.clone(), psi.clone(), None),
            Eigenfunctions::Sine { indices } => {
                if self.dim() == 1 {
                    // tabulate on a uniform grid for external consumers
                    let (lo, hi) = self.domain.bounds();
                    let n = 512;
                    let mesh: Vec<f64> = (0..=n).map(|i| lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64).collect();
                    let psi = (0..self.n_modes())
                        .map(|k| mesh.iter().map(|&x| self.eval(k, &[x])).collect())
                        .collect();
                    (mesh, psi, Some(indices.clone()))
                } else {
                    (Vec::new(), Vec::new(), Some(indices.clone()))
                }
            }
        };
        let file = EigenFile {
            alpha: self.alpha,
            domain: self.domain.clone(),
            lambdas: self.lambdas.clone(),
            mesh,
            psi,
            sine_indices,
        };
        crate::harness::output::write_json_17(w, &file)?;
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let f: EigenFile = serde_json::from_str(text)?;
        f.domain.validate()?;
        if f.lambdas.is_empty() || f.lambdas.iter().any(|l| !(*l > 0.0)) {
            return Err(FracError::Config("eigensystem needs positive eigenvalues".into()));
        }
        if f.lambdas.windows(2).any(|w| w[1] < w[0]) {
            return Err(FracError::Config("eigenvalues must be non-decreasing".into()));
        }
        let functions = match f.sine_indices {
            Some(indices) => {
                if indices.len() != f.lambdas.len()
                    || indices.iter().any(|ix| ix.len() != f.domain.dim() || ix.contains(&0))
                {
                    return Err(FracError::Config("sine indices do not match the eigenvalues".into()));
                }
                Eigenfunctions::Sine { indices }
            }
            None => {
                let (lo, hi) = f.domain.bounds();
                if f.domain.dim() != 1
                    || f.mesh.len() < 3
                    || f.mesh[0] != lo[0]
                    || *f.mesh.last().unwrap() != hi[0]
                    || f.mesh.windows(2).any(|w| w[1] <= w[0])
                {
                    return Err(FracError::Config(
                        "mesh must be increasing and span the interval".into(),
                    ));
                }
                if f.psi.len() != f.lambdas.len() || f.psi.iter().any(|p| p.len() != f.mesh.len()) {
                    return Err(FracError::Config(
                        "psi must hold one nodal vector per eigenvalue".into(),
                    ));
                }
                Eigenfunctions::Mesh {
                    mesh: f.mesh,
                    psi: f.psi,
                }
            }
        };
        Ok(EigenSystem {
            alpha: f.alpha,
            domain: f.domain,
            lambdas: f.lambdas,
            functions,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct EigenFile {
    alpha: f64,
    domain: Domain,
    lambdas: Vec<f64>,
    mesh: Vec<f64>,
    psi: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sine_indices: Option<Vec<Vec<usize>>>,
}

// element index j and local coordinate s in [0, 1] with x in [mesh[j], mesh[j+1]]
fn locate(mesh: &[f64], x: f64) -> (usize, f64) {
    let n = mesh.len();
    let j = match mesh.binary_search_by(|m| m.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => (i.max(1) - 1).min(n - 2),
    };
    let s = ((x - mesh[j]) / (mesh[j + 1] - mesh[j])).clamp(0.0, 1.0);
    (j, s)
}

fn sine_gram_1d(a: f64, b: f64, kmax: usize) -> Vec<Vec<f64>> {
    let len = b - a;
    let panels = 2 * kmax + 8;
    let w = len / panels as f64;
    let mut nodes = Vec::new();
    for p in 0..panels {
        let lo = a + w * p as f64;
        nodes.extend(gl16().mapped(lo, lo + w));
    }
    let norm = (2.0 / len).sqrt();
    let vals: Vec<Vec<f64>> = (1..=kmax)
        .map(|k| {
            nodes
                .iter()
                .map(|(x, _)| norm * (k as f64 * PI * (x - a) / len).sin())
                .collect()
        })
        .collect();
    let mut g = vec![vec![0.0; kmax]; kmax];
    for i in 0..kmax {
        for j in 0..=i {
            let v: f64 = nodes
                .iter()
                .enumerate()
                .map(|(q, (_, w))| w * vals[i][q] * vals[j][q])
                .sum();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}
