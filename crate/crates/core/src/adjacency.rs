//! Symmetric weighted adjacency matrices: CSR, implicit clique lists
//! (products in `O(sum |e|)`), or a dense row-major block.

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Clique {
    pub vertices: Vec<usize>,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StorageKind {
    Sparse,
    Cliques,
    Dense,
}

#[derive(Clone, Debug)]
enum Store {
    Sparse {
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    },
    Cliques {
        cliques: Vec<Clique>,
        incidence: Vec<Vec<u32>>,
    },
    Dense(Vec<f64>),
}

/// Symmetric matrix with zero diagonal. Weights are nonnegative unless the
/// matrix was produced by a signed constructor.
#[derive(Clone, Debug)]
pub struct WeightedAdjacency {
    n: usize,
    store: Store,
}

impl WeightedAdjacency {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            store: Store::Sparse {
                row_ptr: vec![0; n + 1],
                cols: Vec::new(),
                vals: Vec::new(),
            },
        }
    }

    /// Undirected edges `(i, j, w)`; duplicates are summed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::build_sparse(n, edges, false)
    }

    /// Like [`from_edges`](Self::from_edges) but allows negative weights.
    pub fn from_signed_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::build_sparse(n, edges, true)
    }

    fn build_sparse<I>(n: usize, edges: I, signed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut trip: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(invalid(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(invalid(format!("self-loop at vertex {i}")));
            }
            if !w.is_finite() || (!signed && w < 0.0) {
                return Err(invalid(format!("invalid weight {w} on edge ({i}, {j})")));
            }
            trip.push((i, j, w));
            trip.push((j, i, w));
        }
        trip.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut rows = Vec::with_capacity(trip.len());
        for (i, j, w) in trip {
            if let (Some(&last_i), Some(&last_j)) = (rows.last(), cols.last()) {
                if last_i == i && last_j == j {
                    *vals.last_mut().unwrap() += w;
                    continue;
                }
            }
            rows.push(i);
            cols.push(j);
            vals.push(w);
        }
        // drop exact zeros
        let mut k = 0;
        for t in 0..cols.len() {
            if vals[t] != 0.0 {
                rows[k] = rows[t];
                cols[k] = cols[t];
                vals[k] = vals[t];
                k += 1;
            }
        }
        rows.truncate(k);
        cols.truncate(k);
        vals.truncate(k);
        for &i in &rows {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n,
            store: Store::Sparse { row_ptr, cols, vals },
        })
    }

    /// Sum of weighted complete graphs. Vertex lists are sorted and deduplicated.
    pub fn from_cliques(n: usize, cliques: Vec<Clique>) -> Result<Self> {
        let mut kept = Vec::with_capacity(cliques.len());
        for mut c in cliques {
            c.vertices.sort_unstable();
            c.vertices.dedup();
            if let Some(&v) = c.vertices.last() {
                if v >= n {
                    return Err(invalid(format!("clique vertex {v} out of range for n = {n}")));
                }
            }
            if !c.weight.is_finite() || c.weight < 0.0 {
                return Err(invalid(format!("invalid clique weight {}", c.weight)));
            }
            if c.vertices.len() >= 2 && c.weight != 0.0 {
                kept.push(c);
            }
        }
        let mut incidence = vec![Vec::new(); n];
        for (id, c) in kept.iter().enumerate() {
            for &v in &c.vertices {
                incidence[v].push(id as u32);
            }
        }
        Ok(Self {
            n,
            store: Store::Cliques {
                cliques: kept,
                incidence,
            },
        })
    }

    /// Row-major dense block; the diagonal is ignored and forced to zero.
    /// The block is symmetrized by averaging with its transpose.
    pub fn from_dense(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid(format!("dense block has {} entries, expected {}", data.len(), n * n)));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("dense block has non-finite entries"));
        }
        for i in 0..n {
            data[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let s = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = s;
                data[j * n + i] = s;
            }
        }
        Ok(Self {
            n,
            store: Store::Dense(data),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn storage(&self) -> StorageKind {
        match self.store {
            Store::Sparse { .. } => StorageKind::Sparse,
            Store::Cliques { .. } => StorageKind::Cliques,
            Store::Dense(_) => StorageKind::Dense,
        }
    }

    pub fn cliques(&self) -> Option<&[Clique]> {
        match &self.store {
            Store::Cliques { cliques, .. } => Some(cliques),
            _ => None,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j || i >= self.n || j >= self.n {
            return 0.0;
        }
        match &self.store {
            Store::Sparse { row_ptr, cols, vals } => {
                let r = &cols[row_ptr[i]..row_ptr[i + 1]];
                match r.binary_search(&j) {
                    Ok(p) => vals[row_ptr[i] + p],
                    Err(_) => 0.0,
                }
            }
            Store::Cliques { cliques, incidence } => incidence[i]
                .iter()
                .map(|&c| &cliques[c as usize])
                .filter(|c| c.vertices.binary_search(&j).is_ok())
                .map(|c| c.weight)
                .sum(),
            Store::Dense(d) => d[i * self.n + j],
        }
    }

    /// Nonzero entries of row `i` in increasing column order.
    pub fn row(&self, i: usize) -> Vec<(usize, f64)> {
        match &self.store {
            Store::Sparse { row_ptr, cols, vals } => (row_ptr[i]..row_ptr[i + 1])
                .map(|p| (cols[p], vals[p]))
                .collect(),
            Store::Cliques { cliques, incidence } => {
                let mut acc: Vec<(usize, f64)> = Vec::new();
                for &c in &incidence[i] {
                    let c = &cliques[c as usize];
                    for &v in &c.vertices {
                        if v != i {
                            acc.push((v, c.weight));
                        }
                    }
                }
                acc.sort_by_key(|e| e.0);
                let mut out: Vec<(usize, f64)> = Vec::with_capacity(acc.len());
                for (v, w) in acc {
                    match out.last_mut() {
                        Some(last) if last.0 == v => last.1 += w,
                        _ => out.push((v, w)),
                    }
                }
                out
            }
            Store::Dense(d) => (0..self.n)
                .filter(|&j| j != i && d[i * self.n + j] != 0.0)
                .map(|j| (j, d[i * self.n + j]))
                .collect(),
        }
    }

    /// Undirected edges with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                if j > i {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn degrees(&self) -> Vec<f64> {
        let n = self.n;
        match &self.store {
            Store::Sparse { row_ptr, vals, .. } => (0..n)
                .map(|i| vals[row_ptr[i]..row_ptr[i + 1]].iter().sum())
                .collect(),
            Store::Cliques { cliques, .. } => {
                let mut d = vec![0.0; n];
                for c in cliques {
                    let s = c.weight * (c.vertices.len() as f64 - 1.0);
                    for &v in &c.vertices {
                        d[v] += s;
                    }
                }
                d
            }
            Store::Dense(d) => (0..n).map(|i| d[i * n..(i + 1) * n].iter().sum()).collect(),
        }
    }

    /// `y = W x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        match &self.store {
            Store::Sparse { row_ptr, cols, vals } => {
                for i in 0..n {
                    let mut s = 0.0;
                    for p in row_ptr[i]..row_ptr[i + 1] {
                        s += vals[p] * x[cols[p]];
                    }
                    y[i] = s;
                }
            }
            Store::Cliques { cliques, .. } => {
                y.iter_mut().for_each(|v| *v = 0.0);
                for c in cliques {
                    let s: f64 = c.vertices.iter().map(|&v| x[v]).sum();
                    for &v in &c.vertices {
                        y[v] += c.weight * (s - x[v]);
                    }
                }
            }
            Store::Dense(d) => {
                for i in 0..n {
                    let row = &d[i * n..(i + 1) * n];
                    y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// Number of stored nonzero entries counting both triangles.
    pub fn nnz(&self) -> usize {
        match &self.store {
            Store::Sparse { cols, .. } => cols.len(),
            Store::Cliques { .. } => (0..self.n).map(|i| self.row(i).len()).sum(),
            Store::Dense(d) => d.iter().filter(|v| **v != 0.0).count(),
        }
    }

    pub fn min_weight(&self) -> f64 {
        match &self.store {
            Store::Sparse { vals, .. } => vals.iter().copied().fold(f64::INFINITY, f64::min),
            Store::Cliques { cliques, .. } => cliques.iter().map(|c| c.weight).fold(f64::INFINITY, f64::min),
            Store::Dense(d) => {
                let n = self.n;
                let mut m = f64::INFINITY;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            m = m.min(d[i * n + j]);
                        }
                    }
                }
                m
            }
        }
    }

    pub fn to_sparse(&self) -> WeightedAdjacency {
        if let Store::Sparse { .. } = self.store {
            return self.clone();
        }
        Self::build_sparse(self.n, self.edges(), true).expect("valid entries")
    }

    /// Row-major dense copy with zero diagonal.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        if let Store::Dense(d) = &self.store {
            return d.clone();
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for (j, w) in self.row(i) {
                out[i * n + j] = w;
            }
        }
        out
    }

    /// Entrywise sum. Clique lists are concatenated; otherwise CSR.
    pub fn sum(parts: &[&WeightedAdjacency]) -> Result<WeightedAdjacency> {
        let n = match parts.first() {
            Some(p) => p.n,
            None => return Err(invalid("sum of zero adjacencies")),
        };
        if parts.iter().any(|p| p.n != n) {
            return Err(invalid("adjacency sizes differ"));
        }
        if parts.iter().all(|p| p.storage() == StorageKind::Cliques) {
            let all = parts
                .iter()
                .flat_map(|p| p.cliques().unwrap().iter().cloned())
                .collect();
            return Self::from_cliques(n, all);
        }
        let signed = parts.iter().any(|p| p.min_weight() < 0.0);
        Self::build_sparse(n, parts.iter().flat_map(|p| p.edges()), signed)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &WeightedAdjacency) -> f64 {
        assert_eq!(self.n, other.n);
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            let a = self.row(i);
            let b = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < a.len() || q < b.len() {
                let ja = a.get(p).map_or(usize::MAX, |e| e.0);
                let jb = b.get(q).map_or(usize::MAX, |e| e.0);
                if ja == jb {
                    m = m.max((a[p].1 - b[q].1).abs());
                    p += 1;
                    q += 1;
                } else if ja < jb {
                    m = m.max(a[p].1.abs());
                    p += 1;
                } else {
                    m = m.max(b[q].1.abs());
                    q += 1;
                }
            }
        }
        m
    }
}
