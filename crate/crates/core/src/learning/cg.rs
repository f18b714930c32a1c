use crate::error::{invalid, HohlError, Result};
use crate::laplacian::{LinearOperator, MultiscaleOperator};
use crate::linalg::{axpy, dot, norm};

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `|b - A x| / |b|` recomputed from the returned solution.
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite
/// `A`. The stopping test is checked against the true residual; if the
/// recurrence drifted, iteration restarts from the current iterate.
pub fn conjugate_gradient<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    precond_diag: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let n = op.dim();
    if b.len() != n || precond_diag.len() != n {
        return Err(HohlError::DimensionMismatch {
            expected: n,
            got: b.len().min(precond_diag.len()),
        });
    }
    if precond_diag.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(invalid("preconditioner diagonal must be positive"));
    }
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let target = tol * bnorm;
    let mut r = b.to_vec();
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let mut true_res = bnorm;
    while iterations < max_iter {
        let mut z: Vec<f64> = r.iter().zip(precond_diag).map(|(a, d)| a / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            op.apply_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                break;
            }
            let alpha = rz / pap;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            iterations += 1;
            if norm(&r) <= target {
                break;
            }
            for i in 0..n {
                z[i] = r[i] / precond_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        op.apply_into(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        true_res = norm(&r);
        if true_res <= target {
            return Ok(CgOutcome {
                solution: x,
                iterations,
                relative_residual: true_res / bnorm,
            });
        }
    }
    Err(HohlError::NotConverged {
        what: "conjugate gradient",
        iterations,
        residual: true_res / bnorm,
    })
}

/// `x -> x + tau M x`.
pub struct ShiftedOperator<'a> {
    pub op: &'a MultiscaleOperator,
    pub tau: f64,
}

impl LinearOperator for ShiftedOperator<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply_into(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi + self.tau * *yi;
        }
    }
}

/// Solves `(I + tau M) u = y` to relative residual `tol`, with at most `10 n`
/// iterations.
pub fn supervised_solve(op: &MultiscaleOperator, y: &[f64], tau: f64, tol: f64) -> Result<Vec<f64>> {
    supervised_solve_with_stats(op, y, tau, tol).map(|o| o.solution)
}

pub fn supervised_solve_with_stats(op: &MultiscaleOperator, y: &[f64], tau: f64, tol: f64) -> Result<CgOutcome> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let diag: Vec<f64> = op.diagonal_estimate().iter().map(|d| 1.0 + tau * d.max(0.0)).collect();
    let shifted = ShiftedOperator { op, tau };
    conjugate_gradient(&shifted, y, &diag, tol, 10 * op.dim().max(1))
}
