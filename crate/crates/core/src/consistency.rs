//! Multiscale operators on random geometric graphs and their continuum limits.

use crate::error::{invalid, Result};
use crate::graph::{epsilon_graph, rescaled_laplacian, sigma_eta, KernelProfile, PointCloud};
use crate::laplacian::{MultiscaleOperator, ScaleTerm};
use crate::learning::supervised_solve;
use crate::spectral::{smallest_eigenpairs, truncated_solve, FidelityTerm};

/// Length scales `eps_k = c_k (log n / n)^(1/(d+4))`, strictly decreasing,
/// each paired with a coefficient and a power.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonLadder {
    pub constants: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub powers: Vec<u32>,
    pub kernel: KernelProfile,
}

impl EpsilonLadder {
    pub fn validate(&self) -> Result<()> {
        let q = self.constants.len();
        if q == 0 || self.coeffs.len() != q || self.powers.len() != q {
            return Err(invalid("ladder needs equally many constants, coefficients and powers"));
        }
        if self.constants.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(invalid("ladder constants must be positive"));
        }
        if self.constants.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("ladder length scales must be strictly decreasing"));
        }
        Ok(())
    }

    pub fn epsilons(&self, n: usize, d: usize) -> Vec<f64> {
        let nf = n as f64;
        let base = (nf.ln() / nf).powf(1.0 / (d as f64 + 4.0));
        self.constants.iter().map(|c| c * base).collect()
    }

    /// `sum_k lambda_k Delta_{n, eps_k}^{p_k}` on the cloud.
    pub fn operator(&self, cloud: &PointCloud) -> Result<MultiscaleOperator> {
        self.validate()?;
        let (n, d) = (cloud.n(), cloud.dim());
        let sigma = sigma_eta(self.kernel, d)?;
        let mut terms = Vec::with_capacity(self.constants.len());
        for ((eps, &coeff), &power) in self.epsilons(n, d).into_iter().zip(&self.coeffs).zip(&self.powers) {
            let w = epsilon_graph(cloud, eps, self.kernel)?;
            terms.push(ScaleTerm {
                laplacian: rescaled_laplacian(w, n, eps, d, sigma)?,
                coeff,
                power,
            });
        }
        MultiscaleOperator::new(terms)
    }

    /// `sum_k lambda_k beta^{p_k}` for a continuum Laplacian eigenvalue `beta`.
    pub fn limit_eigenvalue(&self, beta: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.powers)
            .map(|(l, &p)| l * beta.powi(p as i32))
            .sum()
    }
}

/// Smallest `count` eigenvalues of `-Laplace` on the unit flat torus
/// `[0,1)^d`: `4 pi^2 |m|^2` over integer vectors `m`, with multiplicity.
pub fn torus_eigenvalues(d: usize, count: usize) -> Vec<f64> {
    let mut radius = 1i64;
    loop {
        let mut norms = Vec::new();
        let side = (2 * radius + 1) as usize;
        let total = side.pow(d as u32);
        for idx in 0..total {
            let mut r = idx;
            let mut s = 0i64;
            for _ in 0..d {
                let m = (r % side) as i64 - radius;
                r /= side;
                s += m * m;
            }
            norms.push(s);
        }
        norms.sort_unstable();
        // complete up to |m|^2 <= radius^2
        let complete = norms.iter().filter(|&&s| s <= radius * radius).count();
        if complete >= count {
            let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
            return norms[..count].iter().map(|&s| four_pi2 * s as f64).collect();
        }
        radius *= 2;
    }
}

/// `|u_T - u|` in `L2(mu_n)` between the truncated minimizer with `T` modes
/// and the full minimizer of `|u - y|^2_{mu_n} + tau <u, M u>_{mu_n}`, for each `T`.
pub fn truncation_errors(
    op: &MultiscaleOperator,
    y: &[f64],
    tau: f64,
    ts: &[usize],
    eig_tol: f64,
    solve_tol: f64,
) -> Result<Vec<(usize, f64)>> {
    let t_max = ts.iter().copied().max().ok_or_else(|| invalid("no truncation levels"))?;
    let basis = smallest_eigenpairs(op, t_max, eig_tol)?;
    let full = supervised_solve(op, y, tau, solve_tol)?;
    let fid = FidelityTerm::LeastSquares { target: y.to_vec() };
    let n = y.len() as f64;
    ts.iter()
        .map(|&t| {
            let u = truncated_solve(&basis.truncate(t), &fid, tau)?;
            let e = (u.iter().zip(&full).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n).sqrt();
            Ok((t, e))
        })
        .collect()
}
