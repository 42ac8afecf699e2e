//! Eigensolvers for symmetric PSD matrices and the Laplacian diffusion
//! simulation.
//!
//! Two solver routes with one contract: a dense full decomposition (the
//! oracle, default up to [`DENSE_LIMIT`]) and a Lanczos path with full
//! reorthogonalization and explicit deflation of the all-ones vector for
//! larger orders.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::rng::rng_from_seed;

/// Largest order accepted by the dense decomposition.
pub const DENSE_LIMIT: usize = 4000;

/// Default residual tolerance factor for the Fiedler solve.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Gap threshold factor below which the Fiedler pair is flagged degenerate.
pub const DEGENERACY_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Dense,
    Iterative,
    #[default]
    Auto,
}

/// Order above which `Solver::Auto` switches from dense to iterative.
pub const AUTO_DENSE_CUTOFF: usize = 600;

/// Full eigendecomposition, eigenvalues ascending, eigenvectors orthonormal
/// in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }
}

/// One eigenpair of a supra-Laplacian, plus solve diagnostics.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub mu: f64,
    /// Unit-norm eigenvector, orthogonal to the all-ones vector, sign-fixed
    /// so its first component above 1e-12 in magnitude is positive.
    pub vector: Vec<f64>,
    /// `||Q x - mu x||_2`.
    pub residual: f64,
    /// `mu_{N-2} - mu_{N-1}` when the order permits.
    pub gap: Option<f64>,
    pub degenerate: bool,
}

/// Dense full decomposition with ascending eigenvalue order.
pub fn full_spectrum(q: &SymMatrix) -> Result<Spectrum> {
    let n = q.order();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionLimit {
            order: n,
            limit: DENSE_LIMIT,
        });
    }
    let dense = q.to_dense();
    let eig = SymmetricEigen::new(dense);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    Ok(Spectrum {
        eigenvalues,
        vectors,
    })
}

/// Fiedler pair with automatic solver selection.
pub fn fiedler_pair(q: &SymMatrix, tol: f64) -> Result<SpectralResult> {
    fiedler_pair_with(q, Solver::Auto, tol)
}

pub fn fiedler_pair_with(q: &SymMatrix, solver: Solver, tol: f64) -> Result<SpectralResult> {
    let n = q.order();
    if n < 2 {
        return Err(Error::Parameter("fiedler pair needs order >= 2".into()));
    }
    let use_dense = match solver {
        Solver::Dense => true,
        Solver::Iterative => false,
        Solver::Auto => n <= AUTO_DENSE_CUTOFF,
    };
    let (mu, mut vector, gap) = if use_dense {
        dense_fiedler(q)?
    } else {
        lanczos_fiedler(q, tol)?
    };
    project_out_ones(&mut vector);
    normalize(&mut vector);
    orient_sign(&mut vector);
    let residual = residual_norm(q, mu, &vector);
    let degenerate = gap.is_some_and(|g| g < DEGENERACY_FACTOR * mu.abs().max(1.0));
    Ok(SpectralResult {
        mu,
        vector,
        residual,
        gap,
        degenerate,
    })
}

fn dense_fiedler(q: &SymMatrix) -> Result<(f64, Vec<f64>, Option<f64>)> {
    let n = q.order();
    let spec = full_spectrum(q)?;
    let mu = spec.eigenvalues[1];
    let gap = (n > 2).then(|| spec.eigenvalues[2] - spec.eigenvalues[1]);
    // In a two-component system the kernel is two-dimensional and the solver
    // returns an arbitrary orthonormal basis of it; pick the basis vector
    // with the larger component orthogonal to the all-ones direction.
    let mut v = spec.eigenvector(1);
    if mu.abs() < 1e-9 {
        let mut v0 = spec.eigenvector(0);
        project_out_ones(&mut v);
        project_out_ones(&mut v0);
        if norm(&v0) > norm(&v) {
            v = v0;
        }
    }
    Ok((mu, v, gap))
}

/// Lanczos with full reorthogonalization on `sigma I - Q`, deflating the
/// all-ones kernel vector, targeting the two smallest eigenvalues of `Q`
/// on the complement of `u`.
fn lanczos_fiedler(q: &SymMatrix, tol: f64) -> Result<(f64, Vec<f64>, Option<f64>)> {
    let n = q.order();
    let sigma = gershgorin_bound(q).max(1.0);
    let tol_res = tol.max(1e-14) * (1.0 + sigma);
    let u_comp = (n as f64).sqrt().recip();
    let max_dim = n - 1; // dimension of the deflated space
    let check_every = 8;

    // deterministic start vector orthogonal to u
    let mut rng = rng_from_seed(0x1a2c_305f ^ n as u64);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project_out_ones(&mut v);
    normalize(&mut v);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new(); // betas[j] couples v_j and v_{j+1}
    let mut w = vec![0.0; n];
    let mut iterations = 0usize;

    loop {
        // w = (sigma I - Q) v
        q.matvec(&v, &mut w);
        for i in 0..n {
            w[i] = sigma * v[i] - w[i];
        }
        let a = dot(&w, &v);
        alphas.push(a);
        basis.push(v.clone());
        // full reorthogonalization against u and the whole basis, twice
        for _ in 0..2 {
            let mean: f64 = w.iter().sum::<f64>() * u_comp;
            for x in w.iter_mut() {
                *x -= mean * u_comp;
            }
            for b in &basis {
                let c = dot(&w, b);
                for i in 0..n {
                    w[i] -= c * b[i];
                }
            }
        }
        let beta = norm(&w);
        iterations += 1;
        let m = basis.len();
        let done_space = m == max_dim;
        if m % check_every == 0 || done_space || beta < 1e-13 * sigma {
            if let Some(out) =
                ritz_extract(&alphas, &betas, beta, &basis, sigma, tol_res, done_space)
            {
                return Ok(out);
            }
            if done_space {
                // the full deflated space is spanned; extraction is exact
                return ritz_extract(&alphas, &betas, 0.0, &basis, sigma, f64::INFINITY, true)
                    .ok_or(Error::ConvergenceFailure { iterations });
            }
        }
        if beta < 1e-13 * sigma {
            // invariant subspace hit before convergence: continue with a
            // fresh direction orthogonal to everything so far
            let mut f: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            for _ in 0..2 {
                let mean: f64 = f.iter().sum::<f64>() * u_comp;
                for x in f.iter_mut() {
                    *x -= mean * u_comp;
                }
                for b in &basis {
                    let c = dot(&f, b);
                    for i in 0..n {
                        f[i] -= c * b[i];
                    }
                }
            }
            let fnorm = norm(&f);
            if fnorm < 1e-12 {
                return Err(Error::ConvergenceFailure { iterations });
            }
            betas.push(0.0);
            v = f;
            for x in v.iter_mut() {
                *x /= fnorm;
            }
        } else {
            betas.push(beta);
            v = w.iter().map(|x| x / beta).collect();
        }
        if iterations > 4 * n {
            return Err(Error::ConvergenceFailure { iterations });
        }
    }
}

/// Ritz extraction from the tridiagonal matrix; returns the converged
/// Fiedler data `(mu, vector, gap)` or None if not yet converged.
fn ritz_extract(
    alphas: &[f64],
    betas: &[f64],
    boundary_beta: f64,
    basis: &[Vec<f64>],
    sigma: f64,
    tol_res: f64,
    exact: bool,
) -> Option<(f64, Vec<f64>, Option<f64>)> {
    let m = alphas.len();
    if m < 2 {
        return None;
    }
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut idx: Vec<usize> = (0..m).collect();
    // descending in theta = largest of (sigma I - Q)
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (i1, i2) = (idx[0], idx[1]);
    let res1 = boundary_beta * eig.eigenvectors[(m - 1, i1)].abs();
    let res2 = boundary_beta * eig.eigenvectors[(m - 1, i2)].abs();
    if !exact && (res1 > tol_res || res2 > tol_res) {
        return None;
    }
    let mu = sigma - eig.eigenvalues[i1];
    let mu2 = sigma - eig.eigenvalues[i2];
    let n = basis[0].len();
    let mut x = vec![0.0; n];
    for (j, b) in basis.iter().enumerate() {
        let c = eig.eigenvectors[(j, i1)];
        for i in 0..n {
            x[i] += c * b[i];
        }
    }
    Some((mu, x, Some(mu2 - mu)))
}

/// Integration scheme for [`simulate_diffusion_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionMethod {
    /// Exact stepping through the eigenbasis (orders within the dense limit).
    Exact,
    /// Explicit Euler; requires `dt * mu_1 < 2`.
    Euler,
}

#[derive(Debug, Clone)]
pub struct DiffusionResult {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares exponential decay rate over the tail window (the first
    /// 20% of steps are excluded from the fit).
    pub rate: f64,
}

/// Integrates `ds/dt = -Q s` and fits the decay rate of `||s(t)||`.
pub fn simulate_diffusion(q: &SymMatrix, s0: &[f64], dt: f64, steps: usize) -> Result<DiffusionResult> {
    let method = if q.order() <= DENSE_LIMIT {
        DiffusionMethod::Exact
    } else {
        DiffusionMethod::Euler
    };
    simulate_diffusion_with(q, s0, dt, steps, method)
}

pub fn simulate_diffusion_with(
    q: &SymMatrix,
    s0: &[f64],
    dt: f64,
    steps: usize,
    method: DiffusionMethod,
) -> Result<DiffusionResult> {
    let n = q.order();
    if s0.len() != n {
        return Err(Error::Parameter(format!(
            "initial state length {} does not match order {n}",
            s0.len()
        )));
    }
    if steps < 2 {
        return Err(Error::Parameter("need at least 2 steps".into()));
    }
    let s0n = norm(s0);
    if s0n == 0.0 {
        return Err(Error::Parameter("initial state is zero".into()));
    }
    let mean: f64 = s0.iter().sum::<f64>();
    if mean.abs() > 1e-8 * (n as f64).sqrt() * s0n {
        return Err(Error::NonOrthogonalInitial);
    }

    let mut norms = Vec::with_capacity(steps + 1);
    match method {
        DiffusionMethod::Exact => {
            let spec = full_spectrum(q)?;
            let s = DVector::from_row_slice(s0);
            let coeffs = spec.vectors.transpose() * s;
            for k in 0..=steps {
                let t = k as f64 * dt;
                let nrm2: f64 = coeffs
                    .iter()
                    .zip(&spec.eigenvalues)
                    .map(|(c, l)| c * c * (-2.0 * l * t).exp())
                    .sum();
                norms.push(nrm2.max(0.0).sqrt());
            }
        }
        DiffusionMethod::Euler => {
            let bound = gershgorin_bound(q);
            if dt * bound >= 2.0 {
                return Err(Error::StabilityViolation(dt * bound));
            }
            let mut s = s0.to_vec();
            let mut qs = vec![0.0; n];
            norms.push(norm(&s));
            for _ in 0..steps {
                q.matvec(&s, &mut qs);
                for i in 0..n {
                    s[i] -= dt * qs[i];
                }
                norms.push(norm(&s));
            }
        }
    }
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let skip = steps / 5;
    let rate = fit_decay_rate(&times[skip..], &norms[skip..]);
    Ok(DiffusionResult { times, norms, rate })
}

/// Least-squares slope of `ln norm` against `t`; returns the decay rate
/// (minus the slope). Samples more than 8 decades below the window start
/// end the fit — past that point roundoff residue of undamped modes
/// flattens the curve.
fn fit_decay_rate(times: &[f64], norms: &[f64]) -> f64 {
    let floor = norms.first().copied().unwrap_or(0.0) * 1e-8;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(norms)
        .take_while(|&(_, &v)| v > floor)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let tm: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    if den == 0.0 {
        0.0
    } else {
        -(num / den)
    }
}

/// Upper bound on the spectral radius, `max_i sum_j |q_ij|`.
pub fn gershgorin_bound(q: &SymMatrix) -> f64 {
    q.inf_norm()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
}

/// Removes the component along the all-ones direction.
pub(crate) fn project_out_ones(a: &mut [f64]) {
    let mean: f64 = a.iter().sum::<f64>() / a.len() as f64;
    for x in a.iter_mut() {
        *x -= mean;
    }
}

/// Sign convention: first component with magnitude above 1e-12 is positive.
pub(crate) fn orient_sign(a: &mut [f64]) {
    if let Some(lead) = a.iter().find(|x| x.abs() > 1e-12) {
        if *lead < 0.0 {
            for x in a.iter_mut() {
                *x = -*x;
            }
        }
    }
}

fn residual_norm(q: &SymMatrix, mu: f64, x: &[f64]) -> f64 {
    let qx = q.apply(x);
    qx.iter()
        .zip(x)
        .map(|(a, b)| (a - mu * b) * (a - mu * b))
        .sum::<f64>()
        .sqrt()
}
