#![allow(dead_code)]

use hohl::{Hyperedge, Hypergraph, WeightedAdjacency};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize, h: usize, max_size: usize) -> Hypergraph {
    let edges = (0..h)
        .map(|_| {
            let size = rng.random_range(2..=max_size.min(n));
            let mut vs: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = rng.random_range(i..n);
                vs.swap(i, j);
            }
            vs.truncate(size);
            Hyperedge {
                vertices: vs,
                weight: rng.random_range(0.5..2.0),
            }
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> WeightedAdjacency {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..1.0)));
            }
        }
        if i + 1 < n {
            edges.push((i, i + 1, rng.random_range(0.1..1.0)));
        }
    }
    WeightedAdjacency::from_edges(n, edges).unwrap()
}

/// Dense Laplacian `D - W` assembled from pairwise lookups only.
pub fn dense_laplacian(w: &WeightedAdjacency, scale: f64) -> DMatrix<f64> {
    let n = w.n();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut deg = 0.0;
        for j in 0..n {
            if i != j {
                let x = w.get(i, j);
                l[(i, j)] = -scale * x;
                deg += x;
            }
        }
        l[(i, i)] = scale * deg;
    }
    l
}

pub fn dense_power(a: &DMatrix<f64>, p: u32) -> DMatrix<f64> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..p {
        out = &out * a;
    }
    out
}

pub fn to_faer(a: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn from_faer(a: &faer::Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn sorted_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
