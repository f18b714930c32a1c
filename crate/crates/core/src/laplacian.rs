//! Graph Laplacians and the multiscale operator `M = sum_k lambda_k L_k^{p_k}`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use faer::{Mat, Side};

use crate::adjacency::WeightedAdjacency;
use crate::error::{invalid, io_err, parse_err, HohlError, Result};
use crate::hypergraph::SkeletonGroup;

/// Symmetric operator applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// Column-by-column dense copy, symmetrized.
    fn to_dense(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::<f64>::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply_into(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        m
    }
}

/// `c (D - W)` with `D` stored explicitly.
#[derive(Clone, Debug)]
pub struct GraphLaplacian {
    adjacency: WeightedAdjacency,
    diag: Vec<f64>,
    scale: f64,
}

impl GraphLaplacian {
    /// Combinatorial Laplacian `D - W` with `D = diag(W 1)`.
    pub fn from_adjacency(adjacency: WeightedAdjacency) -> Self {
        let diag = adjacency.degrees();
        Self {
            adjacency,
            diag,
            scale: 1.0,
        }
    }

    pub(crate) fn from_parts(adjacency: WeightedAdjacency, diag: Vec<f64>) -> Self {
        Self {
            adjacency,
            diag,
            scale: 1.0,
        }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn adjacency(&self) -> &WeightedAdjacency {
        &self.adjacency
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.diag.iter().map(|d| d * self.scale).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.scale * self.diag[i]
        } else {
            -self.scale * self.adjacency.get(i, j)
        }
    }

    /// Largest `|sum_j L_ij|` over rows.
    pub fn max_row_sum(&self) -> f64 {
        self.adjacency
            .degrees()
            .iter()
            .zip(&self.diag)
            .map(|(deg, d)| (self.scale * (d - deg)).abs())
            .fold(0.0, f64::max)
    }

    /// Writes `i j value` for the off-diagonal entries with `i < j`.
    pub fn write_coo<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# n={}", self.n())?;
        for (i, j, w) in self.adjacency.edges() {
            writeln!(out, "{i} {j} {}", -self.scale * w)?;
        }
        Ok(())
    }

    pub fn read_coo(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
        Self::parse_coo(std::io::BufReader::new(f), path)
    }

    /// Inverse of [`write_coo`](Self::write_coo). Either triangle (or both,
    /// if consistent) may be listed; diagonal lines are ignored and the
    /// diagonal is rebuilt from zero row sums.
    pub fn parse_coo<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut declared_n = None;
        let mut max_v: Option<usize> = None;
        let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (ln, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| io_err(origin, e))?;
            let t = line.trim();
            if let Some(c) = t.strip_prefix('#') {
                if let Some(v) = c.trim().strip_prefix("n=") {
                    declared_n = Some(v.trim().parse::<usize>().map_err(|_| parse_err(origin, ln + 1, "bad n"))?);
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err(origin, ln + 1, "expected 'i j value'"));
            }
            let i: usize = toks[0].parse().map_err(|_| parse_err(origin, ln + 1, "bad row index"))?;
            let j: usize = toks[1].parse().map_err(|_| parse_err(origin, ln + 1, "bad column index"))?;
            let v: f64 = toks[2].parse().map_err(|_| parse_err(origin, ln + 1, "bad value"))?;
            max_v = Some(max_v.unwrap_or(0).max(i).max(j));
            if i == j {
                continue;
            }
            let key = (i.min(j), i.max(j));
            match entries.get(&key) {
                Some(&old) if old != v => {
                    return Err(parse_err(origin, ln + 1, format!("asymmetric entry ({i}, {j})")));
                }
                _ => {
                    entries.insert(key, v);
                }
            }
        }
        let n = declared_n.unwrap_or(max_v.map_or(0, |m| m + 1));
        let w = WeightedAdjacency::from_signed_edges(n, entries.into_iter().map(|((i, j), v)| (i, j, -v)))?;
        Ok(Self::from_adjacency(w))
    }
}

impl LinearOperator for GraphLaplacian {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.adjacency.mul_vec(x, y);
        for i in 0..y.len() {
            y[i] = self.scale * (self.diag[i] * x[i] - y[i]);
        }
    }

    fn to_dense(&self) -> Mat<f64> {
        let n = self.n();
        let mut m = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for (j, w) in self.adjacency.row(i) {
                m[(i, j)] = -self.scale * w;
            }
            m[(i, i)] = self.scale * self.diag[i];
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct ScaleTerm {
    pub laplacian: GraphLaplacian,
    pub coeff: f64,
    pub power: u32,
}

/// `M = sum_k coeff_k L_k^{power_k}` with nondecreasing powers.
#[derive(Clone, Debug)]
pub struct MultiscaleOperator {
    n: usize,
    terms: Vec<ScaleTerm>,
}

impl MultiscaleOperator {
    pub fn new(terms: Vec<ScaleTerm>) -> Result<Self> {
        let n = match terms.first() {
            Some(t) => t.laplacian.n(),
            None => return Err(invalid("multiscale operator needs at least one term")),
        };
        for (k, t) in terms.iter().enumerate() {
            if t.laplacian.n() != n {
                return Err(HohlError::DimensionMismatch {
                    expected: n,
                    got: t.laplacian.n(),
                });
            }
            if !(t.coeff.is_finite() && t.coeff > 0.0) {
                return Err(invalid(format!("coefficient {} of term {k} must be positive", t.coeff)));
            }
            if t.power == 0 {
                return Err(invalid("powers must be at least 1"));
            }
            if k > 0 && t.power < terms[k - 1].power {
                return Err(invalid("powers must be nondecreasing"));
            }
            if k > 0 && t.power == terms[k - 1].power {
                log::debug!("terms {} and {k} share power {}", k - 1, t.power);
            }
        }
        Ok(Self { n, terms })
    }

    pub fn single(l: GraphLaplacian) -> Self {
        Self {
            n: l.n(),
            terms: vec![ScaleTerm {
                laplacian: l,
                coeff: 1.0,
                power: 1,
            }],
        }
    }

    /// Unscaled Laplacians of the segment skeletons.
    pub fn from_groups(groups: Vec<SkeletonGroup>) -> Result<Self> {
        Self::new(
            groups
                .into_iter()
                .map(|g| ScaleTerm {
                    laplacian: GraphLaplacian::from_adjacency(g.adjacency),
                    coeff: g.coeff,
                    power: g.power,
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[ScaleTerm] {
        &self.terms
    }

    /// `sum_k coeff_k diag(L_k)^{p_k}`, exact when all powers are 1.
    pub fn diagonal_estimate(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for t in &self.terms {
            for (acc, x) in d.iter_mut().zip(t.laplacian.diagonal()) {
                *acc += t.coeff * x.powi(t.power as i32);
            }
        }
        d
    }

    /// `v^T M v`, evaluated as `|L^m v|^2` for even powers `2m` and
    /// `(L^m v)^T L (L^m v)` for odd powers. Rounding-level negative values
    /// are clamped to zero.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.n);
        let mut total = 0.0;
        let mut magnitude = 0.0;
        let mut cur = vec![0.0; self.n];
        let mut next = vec![0.0; self.n];
        for t in &self.terms {
            cur.copy_from_slice(v);
            for _ in 0..t.power / 2 {
                t.laplacian.apply_into(&cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
            }
            let norm2: f64 = cur.iter().map(|x| x * x).sum();
            let q = if t.power % 2 == 0 {
                magnitude += t.coeff * norm2;
                norm2
            } else {
                t.laplacian.apply_into(&cur, &mut next);
                let nn: f64 = next.iter().map(|x| x * x).sum();
                magnitude += t.coeff * (norm2 * nn).sqrt();
                cur.iter().zip(&next).map(|(a, b)| a * b).sum()
            };
            total += t.coeff * q;
        }
        let tol = 1e-12 * magnitude.max(1.0);
        if total < 0.0 && total >= -tol {
            0.0
        } else {
            total
        }
    }

    /// Dense `n x n` copy of `M`, refused above `budget` entries.
    pub fn materialize(&self, budget: usize) -> Result<Mat<f64>> {
        let entries = self.n.saturating_mul(self.n);
        if entries > budget {
            return Err(HohlError::TooLarge { entries, budget });
        }
        Ok(self.to_dense())
    }
}

impl LinearOperator for MultiscaleOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let mut cur = vec![0.0; self.n];
        let mut next = vec![0.0; self.n];
        for t in &self.terms {
            cur.copy_from_slice(x);
            for _ in 0..t.power {
                t.laplacian.apply_into(&cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
            }
            for (acc, c) in y.iter_mut().zip(&cur) {
                *acc += t.coeff * c;
            }
        }
    }
}

pub fn apply(op: &MultiscaleOperator, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != op.dim() {
        return Err(HohlError::DimensionMismatch {
            expected: op.dim(),
            got: v.len(),
        });
    }
    Ok(op.apply(v))
}

pub fn quadratic_form(op: &MultiscaleOperator, v: &[f64]) -> Result<f64> {
    if v.len() != op.dim() {
        return Err(HohlError::DimensionMismatch {
            expected: op.dim(),
            got: v.len(),
        });
    }
    Ok(op.quadratic_form(v))
}

pub const DEFAULT_DENSE_BUDGET: usize = 100_000_000;

/// `M` written as a signed graph Laplacian: `W = -offdiag(M)`, `D = diag(M)`.
pub fn materialize_graph(op: &MultiscaleOperator, budget: usize) -> Result<GraphLaplacian> {
    let m = op.materialize(budget)?;
    Ok(dense_to_laplacian(&m))
}

pub(crate) fn dense_to_laplacian(m: &Mat<f64>) -> GraphLaplacian {
    let n = m.nrows();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[i * n + j] = -m[(i, j)];
            }
        }
    }
    let diag = (0..n).map(|i| m[(i, i)]).collect();
    GraphLaplacian::from_parts(WeightedAdjacency::from_dense(n, w).expect("finite square block"), diag)
}

pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| HohlError::EigenNotConverged {
            converged: 0,
            requested: m.nrows(),
        })?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub const EIGENCHECK_MAX_N: usize = 500;

/// With every term sharing `l`, the spectrum of `sum_k c_k l^{p_k}` is
/// `sum_k c_k a_i^{p_k}` over the eigenvalues `a_i` of `l`. Returns the
/// (predicted, computed) pairs, both ascending.
pub fn shared_basis_eigencheck(l: &GraphLaplacian, coeffs: &[f64], powers: &[u32]) -> Result<Vec<(f64, f64)>> {
    let n = l.n();
    if n > EIGENCHECK_MAX_N {
        return Err(invalid(format!("eigencheck limited to n <= {EIGENCHECK_MAX_N}, got {n}")));
    }
    if coeffs.len() != powers.len() || coeffs.is_empty() {
        return Err(invalid("coefficients and powers must be nonempty and of equal length"));
    }
    let op = MultiscaleOperator::new(
        coeffs
            .iter()
            .zip(powers)
            .map(|(&c, &p)| ScaleTerm {
                laplacian: l.clone(),
                coeff: c,
                power: p,
            })
            .collect(),
    )?;
    let base = symmetric_eigenvalues(&l.to_dense())?;
    let mut predicted: Vec<f64> = base
        .iter()
        .map(|&a| coeffs.iter().zip(powers).map(|(&c, &p)| c * a.powi(p as i32)).sum())
        .collect();
    predicted.sort_by(f64::total_cmp);
    let computed = symmetric_eigenvalues(&op.to_dense())?;
    Ok(predicted.into_iter().zip(computed).collect())
}
