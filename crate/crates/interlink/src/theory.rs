//! Closed-form mean-field predictions and perturbation-theory estimates for
//! the algebraic connectivity of coupled systems.
//!
//! Everything here is driven by the single-layer spectrum or by small
//! linear solves; no eigendecomposition of the coupled system is performed.

use nalgebra::DVector;

use crate::coupling::{CoupledSystem, Strategy};
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::spectral::{dot, norm, DENSE_LIMIT};

/// Mean-field closed forms for one interlinking strategy.
///
/// `mu_at` is continuous, piecewise linear, and nondecreasing in `alpha`,
/// with `mu_at(0) = 0`.
#[derive(Debug, Clone)]
pub struct MeanFieldPrediction {
    pub strategy: Strategy,
    /// Ascending single-layer Laplacian spectrum.
    pub omega: Vec<f64>,
    pub n1: usize,
    /// Critical coupling weight where the second and third eigenvalues swap.
    pub alpha_threshold: f64,
    /// Critical interlink count (real-valued closed form).
    pub link_threshold: f64,
}

impl MeanFieldPrediction {
    /// Single-layer algebraic connectivity `omega_{N1-1}`.
    pub fn omega_fiedler(&self) -> f64 {
        self.omega[1]
    }

    /// First integer interlink count at or after the transition.
    pub fn link_threshold_ceil(&self) -> usize {
        self.link_threshold.ceil() as usize
    }

    /// Predicted algebraic connectivity at coupling weight `alpha`.
    pub fn mu_at(&self, alpha: f64) -> f64 {
        let w1 = self.omega_fiedler();
        let n1 = self.n1 as f64;
        match self.strategy {
            Strategy::Diagonal => (2.0 * alpha).min(w1),
            Strategy::General => (2.0 * alpha * n1).min(w1 + alpha * n1),
            _ => unreachable!(),
        }
    }

    /// Predicted connectivity after adding `count` discrete interlinks
    /// (`alpha = count / N1` diagonal, `count / N1^2` general).
    pub fn mu_at_count(&self, count: usize) -> f64 {
        self.mu_at(self.alpha_for_count(count))
    }

    pub fn alpha_for_count(&self, count: usize) -> f64 {
        let n1 = self.n1 as f64;
        match self.strategy {
            Strategy::Diagonal => count as f64 / n1,
            Strategy::General => count as f64 / (n1 * n1),
            _ => unreachable!(),
        }
    }

    /// Full coupled spectrum at weight `alpha`, ascending.
    pub fn coupled_spectrum(&self, alpha: f64) -> Vec<f64> {
        let n1 = self.n1 as f64;
        let mut out: Vec<f64> = match self.strategy {
            Strategy::Diagonal => self
                .omega
                .iter()
                .flat_map(|&w| [w, w + 2.0 * alpha])
                .collect(),
            Strategy::General => {
                let mut v = vec![0.0, 2.0 * alpha * n1];
                for &w in &self.omega[1..] {
                    v.push(w + alpha * n1);
                    v.push(w + alpha * n1);
                }
                v
            }
            _ => unreachable!(),
        };
        out.sort_by(f64::total_cmp);
        out
    }
}

fn validate_omega(omega: &[f64]) -> Result<()> {
    if omega.len() < 2 {
        return Err(Error::Parameter("spectrum needs at least 2 entries".into()));
    }
    if omega[0].abs() > 1e-9 {
        return Err(Error::Parameter(format!(
            "smallest eigenvalue must be 0, got {}",
            omega[0]
        )));
    }
    if omega.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("spectrum must be ascending".into()));
    }
    Ok(())
}

/// Diagonal mean-field (`B = I`): the coupled spectrum is
/// `{omega_i} u {omega_i + 2 alpha}`, so `mu(alpha) = min(2 alpha, omega_1)`
/// with threshold `alpha_I = omega_1 / 2` and `l_I = omega_1 N1 / 2`.
pub fn meanfield_diagonal(omega: &[f64]) -> Result<MeanFieldPrediction> {
    validate_omega(omega)?;
    let n1 = omega.len();
    let w1 = omega[1];
    Ok(MeanFieldPrediction {
        strategy: Strategy::Diagonal,
        omega: omega.to_vec(),
        n1,
        alpha_threshold: w1 / 2.0,
        link_threshold: w1 * n1 as f64 / 2.0,
    })
}

/// General mean-field (`B = J`): `mu(alpha) = min(2 alpha N1, omega_1 + alpha N1)`
/// with threshold `alpha_J = omega_1 / N1` and `l_J = omega_1 N1`.
pub fn meanfield_general(omega: &[f64]) -> Result<MeanFieldPrediction> {
    validate_omega(omega)?;
    let n1 = omega.len();
    let w1 = omega[1];
    Ok(MeanFieldPrediction {
        strategy: Strategy::General,
        omega: omega.to_vec(),
        n1,
        alpha_threshold: w1 / n1 as f64,
        link_threshold: w1 * n1 as f64,
    })
}

/// The antisymmetric flat vector `(1,...,1,-1,...,-1)/sqrt(N)`, the zero
/// order starting point of the expansion.
pub fn natural_indicator(n1: usize) -> Vec<f64> {
    let c = 1.0 / ((2 * n1) as f64).sqrt();
    (0..2 * n1).map(|i| if i < n1 { c } else { -c }).collect()
}

fn require_explicit(sys: &CoupledSystem) -> Result<()> {
    if sys.interlinks().strategy.is_mean_field() {
        return Err(Error::Parameter(
            "perturbation theory applies to explicit interlink strategies".into(),
        ));
    }
    if sys.interlinks().pairs.is_empty() {
        return Err(Error::EmptyInterlinks);
    }
    Ok(())
}

/// First order coefficient `mu1 = x0' Q_B x0`; equals `2k / N1` for `k`
/// unweighted interlinks.
pub fn perturb_mu1(sys: &CoupledSystem) -> Result<f64> {
    require_explicit(sys)?;
    let x0 = natural_indicator(sys.n1());
    Ok(sys.interlink_laplacian().quadratic_form(&x0))
}

/// First order eigenvector term: the solution of
/// `Q_A x1 = -(Q_B - mu1) x0` orthogonal to the kernel of `Q_A`.
pub fn perturb_x1(sys: &CoupledSystem) -> Result<Vec<f64>> {
    require_explicit(sys)?;
    if !sys.layer().is_connected() {
        return Err(Error::SingularSystem);
    }
    let n1 = sys.n1();
    let n = 2 * n1;
    let mu1 = perturb_mu1(sys)?;
    let x0 = natural_indicator(n1);
    let qb = sys.interlink_laplacian();
    let qa = sys.clone().with_alpha(0.0).supra_laplacian();
    let mut rhs: Vec<f64> = qb.apply(&x0);
    for (r, x) in rhs.iter_mut().zip(&x0) {
        *r = -(*r - mu1 * x);
    }
    let mut x1 = if n <= DENSE_LIMIT {
        solve_deflated_dense(&qa, &rhs, n1)?
    } else {
        solve_deflated_cg(&qa, &rhs, n1)?
    };
    // scrub kernel components picked up by rounding
    let u_corr: f64 = x1.iter().sum::<f64>() / n as f64;
    for v in x1.iter_mut() {
        *v -= u_corr;
    }
    let c = dot(&x1, &x0);
    for (v, x) in x1.iter_mut().zip(&x0) {
        *v -= c * x;
    }
    // residual contract
    let mut res = qa.apply(&x1);
    for i in 0..n {
        res[i] -= rhs[i];
    }
    let scale = 1.0 + qa.inf_norm();
    if norm(&res) > 1e-9 * scale {
        return Err(Error::ConvergenceFailure { iterations: 0 });
    }
    Ok(x1)
}

/// Second order coefficient `mu2 = x0' Q_B x1 = -x1' Q_A x1 <= 0`, computed
/// along both routes and cross-checked.
pub fn perturb_mu2(sys: &CoupledSystem) -> Result<f64> {
    let x1 = perturb_x1(sys)?;
    perturb_mu2_from(sys, &x1)
}

fn perturb_mu2_from(sys: &CoupledSystem, x1: &[f64]) -> Result<f64> {
    let x0 = natural_indicator(sys.n1());
    let qb = sys.interlink_laplacian();
    let qa = sys.clone().with_alpha(0.0).supra_laplacian();
    let via_qb = dot(&x0, &qb.apply(x1));
    let via_qa = -qa.quadratic_form(x1);
    if (via_qb - via_qa).abs() > 1e-9 * via_qb.abs().max(1.0) {
        return Err(Error::CrossCheckFailed {
            lhs: via_qb,
            rhs: via_qa,
        });
    }
    Ok(via_qb)
}

/// Variational upper bounds on `mu_{N-1}(Q_A + alpha Q_B)` from the zero
/// and first order test vectors.
///
/// `bound0 = alpha * mu1`; `bound1` evaluates the Rayleigh quotient of
/// `x0 + alpha x1`.
pub fn perturb_upper_bounds(sys: &CoupledSystem, alpha: f64) -> Result<(f64, f64)> {
    let est = perturbation_estimate(sys)?;
    Ok(est.bounds(alpha))
}

/// All perturbation coefficients for one explicit system.
#[derive(Debug, Clone)]
pub struct PerturbationEstimate {
    /// Always zero for the decoupled starting point.
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    /// `x1' Q_B x1`, the cubic term of the first order bound.
    qb_x1_form: f64,
    x1_norm2: f64,
}

impl PerturbationEstimate {
    /// `(bound0, bound1)` at coupling weight `alpha`.
    pub fn bounds(&self, alpha: f64) -> (f64, f64) {
        let bound0 = alpha * self.mu1;
        let bound1 = (alpha * self.mu1 + alpha * alpha * self.mu2
            + alpha * alpha * alpha * self.qb_x1_form)
            / (1.0 + alpha * alpha * self.x1_norm2);
        (bound0, bound1)
    }

    /// Truncated series `alpha mu1 + alpha^2 mu2`.
    pub fn mu_estimate(&self, alpha: f64) -> f64 {
        alpha * self.mu1 + alpha * alpha * self.mu2
    }
}

pub fn perturbation_estimate(sys: &CoupledSystem) -> Result<PerturbationEstimate> {
    let mu1 = perturb_mu1(sys)?;
    let x1 = perturb_x1(sys)?;
    let mu2 = perturb_mu2_from(sys, &x1)?;
    let qb = sys.interlink_laplacian();
    let qb_x1_form = qb.quadratic_form(&x1);
    let x1_norm2 = dot(&x1, &x1);
    Ok(PerturbationEstimate {
        mu0: 0.0,
        mu1,
        mu2,
        x0: natural_indicator(sys.n1()),
        x1,
        qb_x1_form,
        x1_norm2,
    })
}

/// Direct solve of the kernel-deflated system: `Q_A` is completed to a
/// positive definite operator by rank-one terms on the two per-layer flat
/// vectors; for a right side orthogonal to the kernel the solution is the
/// min-norm one.
fn solve_deflated_dense(qa: &SymMatrix, rhs: &[f64], n1: usize) -> Result<Vec<f64>> {
    let mut a = qa.to_dense();
    let scale = qa.inf_norm().max(1.0) / n1 as f64;
    for block in 0..2 {
        for i in 0..n1 {
            for j in 0..n1 {
                a[(block * n1 + i, block * n1 + j)] += scale;
            }
        }
    }
    let chol = a.cholesky().ok_or(Error::SingularSystem)?;
    let x = chol.solve(&DVector::from_row_slice(rhs));
    Ok(x.iter().copied().collect())
}

/// Conjugate gradient fallback for orders beyond the dense limit.
fn solve_deflated_cg(qa: &SymMatrix, rhs: &[f64], n1: usize) -> Result<Vec<f64>> {
    let n = 2 * n1;
    let scale = qa.inf_norm().max(1.0) / n1 as f64;
    let apply = |x: &[f64], out: &mut Vec<f64>| {
        qa.matvec(x, out);
        let s1: f64 = x[..n1].iter().sum();
        let s2: f64 = x[n1..].iter().sum();
        for i in 0..n1 {
            out[i] += scale * s1;
            out[n1 + i] += scale * s2;
        }
    };
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let rhs_norm = norm(rhs).max(1e-300);
    let mut rr = dot(&r, &r);
    for it in 0..(20 * n) {
        if rr.sqrt() <= 1e-13 * rhs_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::ConvergenceFailure { iterations: it });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr.sqrt() <= 1e-10 * rhs_norm {
        Ok(x)
    } else {
        Err(Error::ConvergenceFailure { iterations: 20 * n })
    }
}

/// Dense matrix helper for tests and the CLI `theory` table.
pub fn layer_spectrum(layer: &crate::graph::Graph) -> Result<Vec<f64>> {
    Ok(crate::spectral::full_spectrum(&layer.laplacian())?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::CoupledSystem;
    use crate::gen;
    use crate::graph::Graph;
    use crate::spectral::{fiedler_pair, full_spectrum, DEFAULT_TOL};

    fn k3() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn meanfield_diagonal_k3() {
        let p = meanfield_diagonal(&[0.0, 3.0, 3.0]).unwrap();
        assert!((p.mu_at(0.5) - 1.0).abs() < 1e-15);
        assert!((p.alpha_threshold - 1.5).abs() < 1e-15);
        assert!((p.link_threshold - 4.5).abs() < 1e-15);
        assert_eq!(p.mu_at(0.0), 0.0);
        assert!((p.mu_at(10.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn meanfield_general_k3() {
        let p = meanfield_general(&[0.0, 3.0, 3.0]).unwrap();
        assert!((p.mu_at(0.5) - 3.0).abs() < 1e-15);
        assert!((p.alpha_threshold - 1.0).abs() < 1e-15);
        assert!((p.link_threshold - 9.0).abs() < 1e-15);
        assert_eq!(p.mu_at(0.0), 0.0);
        // past the crossing the slope halves: min(12, 9 + ...) -> second arm
        assert!((p.mu_at(2.0) - 9.0).abs() < 1e-15);
        // oracle check on the dense supra-Laplacian
        for alpha in [0.5, 2.0] {
            let sys = CoupledSystem::mean_field_general(k3(), alpha);
            let spec = full_spectrum(&sys.supra_laplacian()).unwrap();
            assert!((spec.eigenvalues[1] - p.mu_at(alpha)).abs() < 1e-9);
        }
    }

    #[test]
    fn meanfield_rejects_bad_spectra() {
        assert!(meanfield_diagonal(&[0.5, 3.0]).is_err());
        assert!(meanfield_diagonal(&[0.0, 3.0, 2.0]).is_err());
    }

    #[test]
    fn mu1_values() {
        // single interlink on a 1000-node layer: 2 / N1
        let layer = gen::gen_watts_strogatz(1000, 2, 0.0, 1).unwrap();
        let sys = CoupledSystem::explicit(layer, Strategy::Diagonal, vec![(0, 0)]).unwrap();
        assert!((perturb_mu1(&sys).unwrap() - 0.002).abs() < 1e-12);

        let sys = CoupledSystem::diagonal(k3(), 3, 1).unwrap();
        assert!((perturb_mu1(&sys).unwrap() - 2.0).abs() < 1e-12);

        let empty = CoupledSystem::diagonal(k3(), 0, 1).unwrap();
        assert!(matches!(perturb_mu1(&empty), Err(Error::EmptyInterlinks)));
    }

    #[test]
    fn mu1_linear_in_interlink_count() {
        let layer = gen::gen_random_regular(12, 3, 4).unwrap();
        let one = CoupledSystem::explicit(layer.clone(), Strategy::General, vec![(0, 5)]).unwrap();
        let three = CoupledSystem::explicit(
            layer,
            Strategy::General,
            vec![(0, 5), (2, 2), (7, 1)],
        )
        .unwrap();
        let m1 = perturb_mu1(&one).unwrap();
        let m3 = perturb_mu1(&three).unwrap();
        assert!((m3 - 3.0 * m1).abs() < 1e-12);
    }

    #[test]
    fn x1_two_k3_single_interlink() {
        let sys = CoupledSystem::explicit(k3(), Strategy::Diagonal, vec![(0, 0)]).unwrap();
        let x1 = perturb_x1(&sys).unwrap();
        // hand solve: K3 acts as 3I on the deflated space, so
        // x1 = (y, -y) with y = (-4/3, 2/3, 2/3) / (3 sqrt 6)
        let s = 1.0 / (3.0 * 6.0f64.sqrt());
        let expect = [
            -4.0 / 3.0 * s,
            2.0 / 3.0 * s,
            2.0 / 3.0 * s,
            4.0 / 3.0 * s,
            -2.0 / 3.0 * s,
            -2.0 / 3.0 * s,
        ];
        for (a, b) in x1.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // orthogonality constraints
        let x0 = natural_indicator(3);
        assert!(dot(&x1, &x0).abs() < 1e-10);
        assert!(x1.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn x1_vanishes_for_full_diagonal() {
        let sys = CoupledSystem::diagonal(k3(), 3, 1).unwrap();
        let x1 = perturb_x1(&sys).unwrap();
        assert!(norm(&x1) < 1e-10);
        let mu2 = perturb_mu2(&sys).unwrap();
        assert!(mu2.abs() < 1e-10);
    }

    #[test]
    fn x1_requires_connected_layer() {
        let layer = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let sys = CoupledSystem::explicit(layer, Strategy::Diagonal, vec![(0, 0)]).unwrap();
        assert!(matches!(perturb_x1(&sys), Err(Error::SingularSystem)));
    }

    #[test]
    fn mu2_two_k3_single_interlink() {
        let sys = CoupledSystem::explicit(k3(), Strategy::Diagonal, vec![(0, 0)]).unwrap();
        let mu2 = perturb_mu2(&sys).unwrap();
        assert!(mu2 < 0.0);
        assert!((mu2 - (-8.0 / 27.0)).abs() < 1e-10, "{mu2}");
    }

    #[test]
    fn second_order_estimate_below_first() {
        let sys = CoupledSystem::explicit(k3(), Strategy::Diagonal, vec![(0, 0)]).unwrap();
        let est = perturbation_estimate(&sys).unwrap();
        for alpha in [0.05, 0.1, 0.5, 1.0] {
            assert!(est.mu_estimate(alpha) <= alpha * est.mu1);
        }
    }

    #[test]
    fn bounds_dominate_oracle() {
        let sys = CoupledSystem::explicit(k3(), Strategy::Diagonal, vec![(0, 0)]).unwrap();
        let est = perturbation_estimate(&sys).unwrap();
        let (b0, _) = est.bounds(1.0);
        assert!((b0 - 2.0 / 3.0).abs() < 1e-12);
        for alpha in [0.01, 0.05, 0.1, 0.2, 1.0] {
            let q = sys.clone().with_alpha(alpha).supra_laplacian();
            let mu = fiedler_pair(&q, DEFAULT_TOL).unwrap().mu;
            let (b0, b1) = est.bounds(alpha);
            assert!(mu <= b1 + 1e-9, "alpha {alpha}: mu {mu} > bound1 {b1}");
            assert!(b1 <= b0 + 1e-12, "alpha {alpha}: bound1 {b1} > bound0 {b0}");
        }
        // bounds vanish with alpha
        let (b0, b1) = est.bounds(0.0);
        assert_eq!(b0, 0.0);
        assert_eq!(b1, 0.0);
    }

    #[test]
    fn cg_route_matches_dense_route() {
        let layer = gen::gen_random_regular(30, 4, 2).unwrap();
        let sys = CoupledSystem::diagonal(layer, 4, 9).unwrap();
        let qa = sys.clone().with_alpha(0.0).supra_laplacian();
        let mu1 = perturb_mu1(&sys).unwrap();
        let x0 = natural_indicator(sys.n1());
        let qb = sys.interlink_laplacian();
        let mut rhs = qb.apply(&x0);
        for (r, x) in rhs.iter_mut().zip(&x0) {
            *r = -(*r - mu1 * x);
        }
        let a = solve_deflated_dense(&qa, &rhs, sys.n1()).unwrap();
        let b = solve_deflated_cg(&qa, &rhs, sys.n1()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}
