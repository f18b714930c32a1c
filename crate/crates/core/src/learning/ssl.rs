use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::error::{invalid, HohlError, Result};
use crate::laplacian::GraphLaplacian;
use crate::linalg::{cholesky_with_ridge, submatrix};

/// Vertices `0..n`, some carrying a class in `0..n_classes`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    n_classes: usize,
    labels: Vec<Option<usize>>,
}

impl LabeledDataset {
    pub fn new(n: usize, n_classes: usize, labeled: &[(usize, usize)]) -> Result<Self> {
        if n_classes == 0 {
            return Err(invalid("need at least one class"));
        }
        let mut labels = vec![None; n];
        for &(v, c) in labeled {
            if v >= n {
                return Err(invalid(format!("labelled vertex {v} out of range for n = {n}")));
            }
            if c >= n_classes {
                return Err(invalid(format!("class {c} out of range for {n_classes} classes")));
            }
            match labels[v] {
                Some(old) if old != c => return Err(invalid(format!("vertex {v} labelled {old} and {c}"))),
                _ => labels[v] = Some(c),
            }
        }
        Ok(Self { n_classes, labels })
    }

    /// Labels the given vertices with their ground-truth classes.
    pub fn from_truth(truth: &[usize], n_classes: usize, vertices: &[usize]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = vertices
            .iter()
            .map(|&v| (v, truth.get(v).copied().unwrap_or(usize::MAX)))
            .collect();
        Self::new(truth.len(), n_classes, &pairs)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        self.labels[v]
    }

    pub fn labeled(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.labels[v].is_some()).collect()
    }

    pub fn unlabeled(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.labels[v].is_none()).collect()
    }

    /// Most frequent labelled class, lowest index on ties.
    pub fn majority_class(&self) -> Option<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for c in self.labels.iter().flatten() {
            counts[*c] += 1;
        }
        let best = counts.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
        (*best.1 > 0).then_some(best.0)
    }
}

#[derive(Clone, Debug)]
pub struct SslOutcome {
    pub predictions: Vec<usize>,
    /// Row-major `n x n_classes` class scores; labelled rows are one-hot,
    /// rows resolved by the majority fallback are zero.
    pub scores: Vec<f64>,
    /// Vertices in components without any label.
    pub fallback: Vec<usize>,
    /// Diagonal shift used for the solve (0 when none was needed).
    pub ridge: f64,
}

impl SslOutcome {
    pub fn accuracy(&self, truth: &[usize], over: &[usize]) -> f64 {
        if over.is_empty() {
            return f64::NAN;
        }
        let hits = over.iter().filter(|&&v| self.predictions[v] == truth[v]).count();
        hits as f64 / over.len() as f64
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

/// Connected components of the off-diagonal support of a dense matrix.
pub(crate) fn components(m: &Mat<f64>) -> Vec<usize> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if m[(i, j)] != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Hard-constraint classification: for each class `c` solve
/// `M_uu u_c = -M_ul 1_c` and predict the argmax over classes.
pub fn ssl_classify(op: &GraphLaplacian, data: &LabeledDataset) -> Result<SslOutcome> {
    ssl_classify_dense(&crate::laplacian::LinearOperator::to_dense(op), data)
}

pub fn ssl_classify_dense(m: &Mat<f64>, data: &LabeledDataset) -> Result<SslOutcome> {
    let n = data.n();
    if m.nrows() != n || m.ncols() != n {
        return Err(HohlError::DimensionMismatch {
            expected: n,
            got: m.nrows(),
        });
    }
    let k = data.n_classes();
    let majority = data
        .majority_class()
        .ok_or_else(|| invalid("at least one labelled vertex is required"))?;
    let comp = components(m);
    let mut has_label = vec![false; n];
    for v in data.labeled() {
        has_label[comp[v]] = true;
    }
    let mut scores = vec![0.0; n * k];
    let mut predictions = vec![majority; n];
    let mut fallback = Vec::new();
    let mut free = Vec::new();
    for v in 0..n {
        match data.label(v) {
            Some(c) => {
                scores[v * k + c] = 1.0;
                predictions[v] = c;
            }
            None if has_label[comp[v]] => free.push(v),
            None => fallback.push(v),
        }
    }
    let mut ridge = 0.0;
    if !free.is_empty() {
        let lab = data.labeled();
        let a = submatrix(m, &free, &free);
        let rhs = Mat::from_fn(free.len(), k, |i, c| {
            let u = free[i];
            -lab.iter()
                .filter(|&&l| data.label(l) == Some(c))
                .map(|&l| m[(u, l)])
                .sum::<f64>()
        });
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        let (factor, used) = cholesky_with_ridge(&a, 1e-8 * trace / n as f64)?;
        ridge = used;
        let sol = factor.solve(&rhs);
        for (i, &u) in free.iter().enumerate() {
            let row: Vec<f64> = (0..k).map(|c| sol[(i, c)]).collect();
            predictions[u] = argmax(&row);
            scores[u * k..(u + 1) * k].copy_from_slice(&row);
        }
    }
    Ok(SslOutcome {
        predictions,
        scores,
        fallback,
        ridge,
    })
}
