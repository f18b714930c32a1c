use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::ssl::{argmax, LabeledDataset};
use crate::error::{invalid, HohlError, Result};
use crate::linalg::{cholesky_with_ridge, submatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Acquisition {
    /// Query the unlabelled vertex with the smallest gap between its two
    /// highest class scores.
    Margin,
}

impl Acquisition {
    pub fn score(self, class_scores: &[f64]) -> f64 {
        match self {
            Acquisition::Margin => {
                let mut top = f64::NEG_INFINITY;
                let mut second = f64::NEG_INFINITY;
                for &s in class_scores {
                    if s > top {
                        second = top;
                        top = s;
                    } else if s > second {
                        second = s;
                    }
                }
                1.0 - (top - second)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ActiveOutcome {
    /// Accuracy on the still-unlabelled vertices before each query and after
    /// the last one (`budget + 1` entries unless the pool ran out).
    pub accuracy: Vec<f64>,
    pub queried: Vec<usize>,
}

/// Labels, scores and factorization carried between queries.
///
/// The factor of `M_uu` for the initial unlabelled set is kept; revealing a
/// label at `k` updates every class score by the Green's function of the
/// current constrained system, `u += (y_k - u_k) / g_k * g`, where `g` is
/// obtained from the initial factor by a Schur complement over the vertices
/// queried so far.
pub struct AcquisitionState {
    truth: Vec<usize>,
    n_classes: usize,
    free: Vec<usize>,
    active: Vec<bool>,
    factor: faer::linalg::solvers::Llt<f64>,
    /// Row-major `|free| x n_classes`.
    scores: Vec<f64>,
    queried_local: Vec<usize>,
    green_columns: Vec<Vec<f64>>,
    remaining: usize,
    pub ridge: f64,
}

impl AcquisitionState {
    pub fn new(m: &Mat<f64>, truth: &[usize], n_classes: usize, initial: &[usize], budget: usize) -> Result<Self> {
        let n = truth.len();
        if m.nrows() != n || m.ncols() != n {
            return Err(HohlError::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
        if n_classes < 2 {
            return Err(invalid("margin acquisition needs at least two classes"));
        }
        let data = LabeledDataset::from_truth(truth, n_classes, initial)?;
        if initial.is_empty() {
            return Err(invalid("at least one initial label is required"));
        }
        let free = data.unlabeled();
        if budget > free.len() {
            log::warn!("label budget {budget} exceeds the {} unlabelled vertices; truncating", free.len());
        }
        let remaining = budget.min(free.len());
        let lab = data.labeled();
        let a = submatrix(m, &free, &free);
        let k = n_classes;
        let rhs = Mat::from_fn(free.len(), k, |i, c| {
            -lab.iter()
                .filter(|&&l| truth[l] == c)
                .map(|&l| m[(free[i], l)])
                .sum::<f64>()
        });
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        let (factor, ridge) = cholesky_with_ridge(&a, 1e-8 * trace / n as f64)?;
        let sol = factor.solve(&rhs);
        let mut scores = vec![0.0; free.len() * k];
        for i in 0..free.len() {
            for c in 0..k {
                scores[i * k + c] = sol[(i, c)];
            }
        }
        Ok(Self {
            truth: truth.to_vec(),
            n_classes,
            active: vec![true; free.len()],
            free,
            factor,
            scores,
            queried_local: Vec::new(),
            green_columns: Vec::new(),
            remaining,
            ridge,
        })
    }

    pub fn remaining_budget(&self) -> usize {
        self.remaining
    }

    pub fn class_scores(&self, vertex: usize) -> Option<&[f64]> {
        let i = self.free.binary_search(&vertex).ok()?;
        let k = self.n_classes;
        Some(&self.scores[i * k..(i + 1) * k])
    }

    pub fn unlabeled(&self) -> Vec<usize> {
        (0..self.free.len()).filter(|&i| self.active[i]).map(|i| self.free[i]).collect()
    }

    pub fn accuracy(&self) -> f64 {
        let k = self.n_classes;
        let (mut hits, mut total) = (0usize, 0usize);
        for (i, &v) in self.free.iter().enumerate() {
            if self.active[i] {
                total += 1;
                if argmax(&self.scores[i * k..(i + 1) * k]) == self.truth[v] {
                    hits += 1;
                }
            }
        }
        if total == 0 {
            f64::NAN
        } else {
            hits as f64 / total as f64
        }
    }

    /// Vertex with the highest acquisition score, lowest index on ties.
    pub fn select(&self, acquisition: Acquisition) -> Option<usize> {
        let k = self.n_classes;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.free.len() {
            if !self.active[i] {
                continue;
            }
            let s = acquisition.score(&self.scores[i * k..(i + 1) * k]);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best.map(|(i, _)| self.free[i])
    }

    /// Reveals the true class of `vertex` and updates all scores.
    pub fn reveal(&mut self, vertex: usize) -> Result<()> {
        if self.remaining == 0 {
            return Err(invalid("label budget exhausted"));
        }
        let p = match self.free.binary_search(&vertex) {
            Ok(p) if self.active[p] => p,
            _ => return Err(invalid(format!("vertex {vertex} is not an unlabelled vertex"))),
        };
        let m = self.free.len();
        let mut e = Mat::<f64>::zeros(m, 1);
        e[(p, 0)] = 1.0;
        let col = self.factor.solve(&e);
        let g: Vec<f64> = (0..m).map(|i| col[(i, 0)]).collect();
        let mut gc = g.clone();
        let s = self.queried_local.len();
        if s > 0 {
            let gss = Mat::from_fn(s, s, |a, b| self.green_columns[a][self.queried_local[b]]);
            let rhs = Mat::from_fn(s, 1, |a, _| g[self.queried_local[a]]);
            let z = match gss.llt(Side::Lower) {
                Ok(f) => f.solve(&rhs),
                Err(_) => return Err(HohlError::NotPositiveDefinite { ridge: self.ridge }),
            };
            for (a, col) in self.green_columns.iter().enumerate() {
                let za = z[(a, 0)];
                for i in 0..m {
                    gc[i] -= za * col[i];
                }
            }
        }
        let gk = gc[p];
        if !(gk > 0.0) {
            return Err(HohlError::NotPositiveDefinite { ridge: self.ridge });
        }
        let k = self.n_classes;
        let y = self.truth[vertex];
        for c in 0..k {
            let target = if c == y { 1.0 } else { 0.0 };
            let alpha = (target - self.scores[p * k + c]) / gk;
            for i in 0..m {
                self.scores[i * k + c] += alpha * gc[i];
            }
            self.scores[p * k + c] = target;
        }
        self.active[p] = false;
        self.queried_local.push(p);
        self.green_columns.push(g);
        self.remaining -= 1;
        Ok(())
    }
}

/// Sequential querying from a dense operator. Accuracy is recorded on the
/// unlabelled vertices before the first query and after each one.
pub fn active_learn(
    m: &Mat<f64>,
    truth: &[usize],
    n_classes: usize,
    initial: &[usize],
    budget: usize,
    acquisition: Acquisition,
) -> Result<ActiveOutcome> {
    let mut state = AcquisitionState::new(m, truth, n_classes, initial, budget)?;
    let mut accuracy = vec![state.accuracy()];
    let mut queried = Vec::with_capacity(budget);
    while state.remaining_budget() > 0 {
        let Some(v) = state.select(acquisition) else { break };
        state.reveal(v)?;
        queried.push(v);
        accuracy.push(state.accuracy());
    }
    Ok(ActiveOutcome { accuracy, queried })
}
