mod common;

use common::*;
use hohl::laplacian::{symmetric_eigenvalues, DEFAULT_DENSE_BUDGET};
use hohl::{
    group_segments, materialize_graph, shared_basis_eigencheck, skeleton_decompose, CoefficientRule, GraphLaplacian,
    LinearOperator, MultiscaleOperator, ScaleTerm,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

struct Case {
    op: MultiscaleOperator,
    dense: DMatrix<f64>,
}

/// Random multiscale operator and its dense oracle built from nalgebra powers.
fn random_case(seed: u64) -> Case {
    let mut r = rng(seed);
    let n = r.random_range(4..30);
    let q = r.random_range(1..=4);
    let mut powers: Vec<u32> = (0..q).map(|_| r.random_range(1..=4)).collect();
    powers.sort_unstable();
    let mut terms = Vec::new();
    let mut dense = DMatrix::zeros(n, n);
    for &p in &powers {
        let w = random_graph(&mut r, n, 0.3);
        let scale = r.random_range(0.2..2.0);
        let coeff = r.random_range(0.1..3.0);
        dense += coeff * dense_power(&dense_laplacian(&w, scale), p);
        terms.push(ScaleTerm {
            laplacian: GraphLaplacian::from_adjacency(w).scaled(scale),
            coeff,
            power: p,
        });
    }
    Case {
        op: MultiscaleOperator::new(terms).unwrap(),
        dense,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn apply_matches_dense_powers(seed in any::<u64>()) {
        let c = random_case(seed);
        let n = c.op.dim();
        let mut r = rng(seed ^ 1);
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let got = dvec(&c.op.apply(&v));
        let want = &c.dense * dvec(&v);
        let tol = 1e-9 * max_abs(&c.dense).max(1.0) * n as f64;
        prop_assert!((got - want).amax() <= tol);
    }

    #[test]
    fn quadratic_form_is_nonnegative_and_matches(seed in any::<u64>()) {
        let c = random_case(seed);
        let n = c.op.dim();
        let mut r = rng(seed ^ 2);
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let q = c.op.quadratic_form(&v);
        let vv = dvec(&v);
        let want = vv.dot(&(&c.dense * &vv));
        prop_assert!(q >= 0.0);
        prop_assert!((q - want).abs() <= 1e-9 * want.abs().max(1.0));
        let ones = vec![1.0; n];
        prop_assert!(c.op.quadratic_form(&ones) <= 1e-10 * max_abs(&c.dense).max(1.0) * n as f64);
    }

    #[test]
    fn materialized_graph_reproduces_operator(seed in any::<u64>()) {
        let c = random_case(seed);
        let g = materialize_graph(&c.op, DEFAULT_DENSE_BUDGET).unwrap();
        let scale = max_abs(&c.dense).max(1.0);
        prop_assert!(g.max_row_sum() <= 1e-10 * scale);
        let back = from_faer(&g.to_dense());
        prop_assert!((back - &c.dense).amax() <= 1e-9 * scale);
    }

    #[test]
    fn single_scale_form_is_edge_sum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..40);
        let w = random_graph(&mut r, n, 0.4);
        let v: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += 0.5 * w.get(i, j) * (v[i] - v[j]).powi(2);
            }
        }
        let op = MultiscaleOperator::single(GraphLaplacian::from_adjacency(w));
        prop_assert!((op.quadratic_form(&v) - sum).abs() <= 1e-10 * sum.max(1.0));
    }
}

#[test]
fn shared_basis_spectrum() {
    for seed in 0..40u64 {
        let mut r = rng(seed);
        let n = r.random_range(3..60);
        let w = random_graph(&mut r, n, 0.2);
        let l = GraphLaplacian::from_adjacency(w.clone());
        let q = r.random_range(1..=4);
        let coeffs: Vec<f64> = (0..q).map(|_| r.random_range(0.1..2.0)).collect();
        let mut powers: Vec<u32> = (0..q).map(|_| r.random_range(1..=4)).collect();
        powers.sort_unstable();
        let pairs = shared_basis_eigencheck(&l, &coeffs, &powers).unwrap();
        // independent route: nalgebra eigenvalues of L, pushed through the polynomial
        let mut oracle: Vec<f64> = sorted_eigenvalues(&dense_laplacian(&w, 1.0))
            .iter()
            .map(|&a| coeffs.iter().zip(&powers).map(|(c, &p)| c * a.powi(p as i32)).sum())
            .collect();
        oracle.sort_by(f64::total_cmp);
        let top = oracle.last().unwrap().abs().max(1.0);
        for ((pred, comp), want) in pairs.iter().zip(&oracle) {
            assert!((pred - comp).abs() <= 1e-8 * top, "seed {seed}: {pred} vs {comp}");
            assert!((pred - want).abs() <= 1e-8 * top);
        }
    }
    let big = GraphLaplacian::from_adjacency(hohl::WeightedAdjacency::empty(501));
    assert!(shared_basis_eigencheck(&big, &[1.0], &[1]).is_err());
}

#[test]
fn hypergraph_operator_is_psd_with_zero_row_sums() {
    for seed in 0..30u64 {
        let mut r = rng(seed);
        let h = random_hypergraph(&mut r, 25, 30, 8);
        let sk = skeleton_decompose(&h);
        let q = r.random_range(1..=sk.len().min(4));
        let rule = if seed % 2 == 0 { CoefficientRule::RC } else { CoefficientRule::QC };
        let op = MultiscaleOperator::from_groups(group_segments(&sk, q, rule).unwrap()).unwrap();
        let m = op.materialize(DEFAULT_DENSE_BUDGET).unwrap();
        let ev = symmetric_eigenvalues(&m).unwrap();
        let top = ev.last().unwrap().abs().max(1.0);
        assert!(ev[0] >= -1e-10 * top, "seed {seed}: min eigenvalue {}", ev[0]);
        let g = materialize_graph(&op, DEFAULT_DENSE_BUDGET).unwrap();
        assert!(g.max_row_sum() <= 1e-10 * top);
    }
}

#[test]
fn clique_storage_matches_sparse_storage() {
    let mut r = rng(7);
    let h = random_hypergraph(&mut r, 30, 20, 10);
    let c = hohl::clique_expand(&h);
    let s = c.to_sparse();
    assert_eq!(c.storage(), hohl::StorageKind::Cliques);
    let lc = MultiscaleOperator::single(GraphLaplacian::from_adjacency(c));
    let ls = MultiscaleOperator::single(GraphLaplacian::from_adjacency(s));
    let v: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
    let (a, b) = (lc.apply(&v), ls.apply(&v));
    for i in 0..30 {
        assert!((a[i] - b[i]).abs() < 1e-12);
    }
}
