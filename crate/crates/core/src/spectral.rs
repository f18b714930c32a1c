//! Lowest eigenpairs by Lanczos, and spectrally truncated energies/solvers.

use std::io::Write;

use faer::{Mat, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, HohlError, Result};
use crate::laplacian::LinearOperator;
use crate::linalg::{axpy, dot, norm};

/// Lowest `T` eigenpairs. Vectors are stored with unit Euclidean norm; the
/// accessors return them normalized in `L2(mu_n)`, i.e. scaled by `sqrt(n)`.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    n: usize,
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector with `(1/n) sum psi^2 = 1`.
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        let s = (self.n as f64).sqrt();
        self.vectors[i].iter().map(|x| x * s).collect()
    }

    pub fn unit_vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    /// First `t` pairs only.
    pub fn truncate(&self, t: usize) -> SpectralBasis {
        let t = t.min(self.len());
        SpectralBasis {
            n: self.n,
            eigenvalues: self.eigenvalues[..t].to_vec(),
            vectors: self.vectors[..t].to_vec(),
        }
    }

    /// `<v, psi_i>` in `L2(mu_n)`.
    pub fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        let s = (self.n as f64).sqrt();
        self.vectors.iter().map(|phi| dot(v, phi) / s).collect()
    }

    /// `sum_i c_i psi_i`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let s = (self.n as f64).sqrt();
        let mut out = vec![0.0; self.n];
        for (c, phi) in coeffs.iter().zip(&self.vectors) {
            axpy(c * s, phi, &mut out);
        }
        out
    }

    pub fn write_eigenvalues_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,eigenvalue")?;
        for (i, b) in self.eigenvalues.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, b)?;
        }
        Ok(())
    }

    /// One block of `n` lines per eigenvector, each headed by `# eigenvector <i>`.
    pub fn write_eigenvectors<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.len() {
            writeln!(out, "# eigenvector {}", i + 1)?;
            for x in self.eigenvector(i) {
                writeln!(out, "{x}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Residual tolerance relative to `max(beta_T, 1)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed: 0x1a2c_05e5,
        }
    }
}

pub fn smallest_eigenpairs<A: LinearOperator + ?Sized>(op: &A, t: usize, tol: f64) -> Result<SpectralBasis> {
    smallest_eigenpairs_with(
        op,
        t,
        &LanczosOptions {
            tol,
            ..LanczosOptions::default()
        },
    )
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(v, q);
            axpy(-c, q, v);
        }
    }
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, deflate: &[&[Vec<f64>]]) -> Option<Vec<f64>> {
    for _ in 0..3 {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let before = norm(&v);
        for set in deflate {
            orthogonalize(&mut v, set);
        }
        let after = norm(&v);
        if after > 1e-8 * before {
            v.iter_mut().for_each(|x| *x /= after);
            return Some(v);
        }
    }
    None
}

/// Lanczos run with full reorthogonalization against `locked` and the run's
/// own basis. Returns the basis and the tridiagonal coefficients.
fn lanczos_run<A: LinearOperator + ?Sized>(
    op: &A,
    locked: &[Vec<f64>],
    m: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = op.dim();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let Some(q0) = random_unit(n, rng, &[locked]) else {
        return (basis, alpha, beta);
    };
    basis.push(q0);
    let mut scale: f64 = 0.0;
    let mut w = vec![0.0; n];
    loop {
        let j = basis.len() - 1;
        op.apply_into(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        if basis.len() == m {
            break;
        }
        let b = norm(&w);
        scale = scale.max(a.abs() + b + if j > 0 { beta[j - 1] } else { 0.0 });
        if b > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        } else {
            match random_unit(n, rng, &[locked, &basis]) {
                Some(r) => {
                    beta.push(0.0);
                    basis.push(r);
                }
                None => break,
            }
        }
    }
    (basis, alpha, beta)
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
    let k = alpha.len();
    let t = Mat::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = t.self_adjoint_eigen(Side::Lower).map_err(|_| HohlError::EigenNotConverged {
        converged: 0,
        requested: k,
    })?;
    let vals: Vec<f64> = (0..k).map(|i| eig.S()[i]).collect();
    let vecs = eig.U().to_owned();
    Ok((vals, vecs))
}

/// Lowest `t` eigenpairs of a symmetric positive semi-definite operator.
///
/// Converged Ritz pairs are locked and deflated from later runs; after `t`
/// pairs are locked, further deflated runs check for eigenvalues that were
/// missed (repeated eigenvalues), growing the subspace until the residuals
/// meet the tolerance or the whole space is spanned.
pub fn smallest_eigenpairs_with<A: LinearOperator + ?Sized>(
    op: &A,
    t: usize,
    opts: &LanczosOptions,
) -> Result<SpectralBasis> {
    let n = op.dim();
    if t == 0 || t > n {
        return Err(invalid(format!("requested {t} eigenpairs of an operator of size {n}")));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut m = n.min((2 * t + 20).max(40));
    let mut av = vec![0.0; n];
    loop {
        let avail = n - locked.len();
        if avail == 0 {
            break;
        }
        let need = t.saturating_sub(locked.len());
        let verifying = need == 0;
        let want = need.max(1);
        let size = avail.min(m.max(want + 20));
        let (basis, alpha, beta) = lanczos_run(op, &locked, size, &mut rng);
        if basis.is_empty() {
            break;
        }
        let (theta, s) = tridiagonal_eigen(&alpha, &beta)?;
        let k = basis.len();
        let spans_rest = k == avail;
        let top = locked_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = theta[(want.min(k)) - 1].abs().max(top).max(1.0);
        let mut accepted = 0;
        for i in 0..want.min(k) {
            let mut y = vec![0.0; n];
            for (j, q) in basis.iter().enumerate() {
                axpy(s[(j, i)], q, &mut y);
            }
            let ny = norm(&y);
            y.iter_mut().for_each(|x| *x /= ny);
            op.apply_into(&y, &mut av);
            axpy(-theta[i], &y, &mut av);
            let res = norm(&av);
            if res > opts.tol * scale && !spans_rest {
                break;
            }
            if verifying && theta[i] >= top - opts.tol * scale {
                break;
            }
            orthogonalize(&mut y, &locked);
            let ny = norm(&y);
            y.iter_mut().for_each(|x| *x /= ny);
            locked_vals.push(theta[i]);
            locked.push(y);
            accepted += 1;
        }
        if verifying {
            if accepted == 0 {
                let converged_first = spans_rest || {
                    let mut y = vec![0.0; n];
                    for (j, q) in basis.iter().enumerate() {
                        axpy(s[(j, 0)], q, &mut y);
                    }
                    let ny = norm(&y);
                    y.iter_mut().for_each(|x| *x /= ny);
                    op.apply_into(&y, &mut av);
                    axpy(-theta[0], &y, &mut av);
                    norm(&av) <= opts.tol * scale
                };
                if converged_first || size == avail {
                    break;
                }
                m = avail.min(2 * m);
            }
        } else if accepted == 0 {
            if size == avail {
                return Err(HohlError::EigenNotConverged {
                    converged: locked.len(),
                    requested: t,
                });
            }
            m = avail.min(2 * m);
        }
    }
    if locked.len() < t {
        return Err(HohlError::EigenNotConverged {
            converged: locked.len(),
            requested: t,
        });
    }
    let mut order: Vec<usize> = (0..locked.len()).collect();
    order.sort_by(|&a, &b| locked_vals[a].total_cmp(&locked_vals[b]));
    order.truncate(t);
    let floor = -1e-10 * locked_vals[order[t - 1]].abs().max(1.0);
    let eigenvalues = order
        .iter()
        .map(|&i| {
            let v = locked_vals[i];
            if v < 0.0 && v >= floor {
                0.0
            } else {
                v
            }
        })
        .collect();
    let vectors = order.iter().map(|&i| locked[i].clone()).collect();
    Ok(SpectralBasis { n, eigenvalues, vectors })
}

/// `sum_i beta_i <v, psi_i>^2` in `L2(mu_n)`.
pub fn truncated_energy(basis: &SpectralBasis, v: &[f64]) -> Result<f64> {
    if v.len() != basis.n {
        return Err(HohlError::DimensionMismatch {
            expected: basis.n,
            got: v.len(),
        });
    }
    Ok(basis
        .coefficients(v)
        .iter()
        .zip(&basis.eigenvalues)
        .map(|(c, b)| b * c * c)
        .sum())
}

#[derive(Clone, Debug)]
pub enum FidelityTerm {
    /// `(1/n) sum (u_i - y_i)^2`.
    LeastSquares { target: Vec<f64> },
}

impl FidelityTerm {
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        match self {
            FidelityTerm::LeastSquares { target } => {
                u.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / target.len() as f64
            }
        }
    }
}

/// Minimizer of `tau * truncated_energy(u) + fidelity(u)` over the span of
/// the basis: coefficients `<y, psi_i> / (1 + tau beta_i)`.
pub fn truncated_solve(basis: &SpectralBasis, fidelity: &FidelityTerm, tau: f64) -> Result<Vec<f64>> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(invalid("tau must be nonnegative"));
    }
    match fidelity {
        FidelityTerm::LeastSquares { target } => {
            if target.len() != basis.n {
                return Err(HohlError::DimensionMismatch {
                    expected: basis.n,
                    got: target.len(),
                });
            }
            let c: Vec<f64> = basis
                .coefficients(target)
                .iter()
                .zip(&basis.eigenvalues)
                .map(|(y, b)| y / (1.0 + tau * b))
                .collect();
            Ok(basis.synthesize(&c))
        }
    }
}
