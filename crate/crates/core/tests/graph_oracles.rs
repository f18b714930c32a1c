mod common;

use common::rng;
use hohl::graph::{distance, sphere_area};
use hohl::{epsilon_graph, knn_selftuning_graph, rescaled_laplacian, sigma_eta, KernelProfile, KnnIndex, Metric, PointCloud};
use proptest::prelude::*;
use rand::Rng;

fn cloud(seed: u64, n: usize, d: usize, metric: Metric) -> PointCloud {
    let mut r = rng(seed);
    let data = (0..n * d).map(|_| r.random::<f64>()).collect();
    PointCloud::new(d, data, metric).unwrap()
}

/// Brute-force weights straight from the definition.
fn eps_oracle(pc: &PointCloud, eps: f64, profile: KernelProfile) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..pc.n() {
        for j in (i + 1)..pc.n() {
            let t = distance(pc.metric(), pc.point(i), pc.point(j)) / eps;
            let w = match profile {
                KernelProfile::Indicator => {
                    if t <= 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                KernelProfile::Smooth => {
                    if t < 1.0 {
                        (-1.0 / (1.0 - t * t)).exp()
                    } else {
                        0.0
                    }
                }
            };
            if w > 0.0 {
                out.push((i, j, w));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn epsilon_graph_matches_definition(seed in any::<u64>(), d in 1usize..4, torus in any::<bool>(), smooth in any::<bool>()) {
        let metric = if torus { Metric::Torus } else { Metric::Euclidean };
        let profile = if smooth { KernelProfile::Smooth } else { KernelProfile::Indicator };
        let pc = cloud(seed, 60, d, metric);
        let eps = 0.35;
        let w = epsilon_graph(&pc, eps, profile).unwrap();
        prop_assert_eq!(w.edges(), eps_oracle(&pc, eps, profile));
    }

    #[test]
    fn knn_graph_matches_definition(seed in any::<u64>(), k in 1usize..8, cosine in any::<bool>()) {
        let metric = if cosine { Metric::Cosine } else { Metric::Euclidean };
        let pc = cloud(seed, 40, 3, metric);
        let w = knn_selftuning_graph(&pc, k).unwrap();
        let n = pc.n();
        let dist = |i: usize, j: usize| distance(metric, pc.point(i), pc.point(j));
        // k-th neighbour distance and neighbour sets by full sort
        let mut nbrs = Vec::new();
        let mut dk = Vec::new();
        for i in 0..n {
            let mut row: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (dist(i, j), j)).collect();
            row.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dk.push(row[k - 1].0);
            nbrs.push(row[..k].iter().map(|e| e.1).collect::<Vec<_>>());
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let wij = if nbrs[i].contains(&j) { (-4.0 * dist(i, j).powi(2) / dk[i].powi(2)).exp() } else { 0.0 };
                let wji = if nbrs[j].contains(&i) { (-4.0 * dist(i, j).powi(2) / dk[j].powi(2)).exp() } else { 0.0 };
                prop_assert!((w.get(i, j) - wij.max(wji)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn grid_search_matches_brute_force() {
    let pc = cloud(11, 20_500, 2, Metric::Torus);
    let eps = 0.012;
    let w = epsilon_graph(&pc, eps, KernelProfile::Indicator).unwrap();
    let mut expect = 0usize;
    for i in 0..pc.n() {
        for j in (i + 1)..pc.n() {
            if distance(Metric::Torus, pc.point(i), pc.point(j)) <= eps {
                expect += 1;
                assert_eq!(w.get(i, j), 1.0);
            }
        }
    }
    assert_eq!(w.edges().len(), expect);
}

#[test]
fn knn_prefix_graphs_reuse_one_search() {
    let pc = cloud(5, 80, 4, Metric::Euclidean);
    let idx = KnnIndex::build(&pc, 10).unwrap();
    for k in [3, 7, 10] {
        let a = idx.selftuning_graph(k).unwrap();
        let b = knn_selftuning_graph(&pc, k).unwrap();
        assert_eq!(a.max_abs_diff(&b), 0.0);
    }
    assert!(idx.selftuning_graph(11).is_err());
    assert!(KnnIndex::build(&pc, 80).is_err());
}

#[test]
fn indicator_moment_closed_form() {
    let pi = std::f64::consts::PI;
    // ball volume omega_d with int_{B} h_1^2 dh = omega_d / (d + 2)
    let ball = |d: usize| sphere_area(d) / d as f64;
    assert!((ball(3) - 4.0 * pi / 3.0).abs() < 1e-14);
    for d in 1..=6 {
        let want = ball(d) / (d as f64 + 2.0);
        assert!((sigma_eta(KernelProfile::Indicator, d).unwrap() - want).abs() < 1e-14);
    }
}

#[test]
fn rescaling_constant() {
    let pc = cloud(2, 30, 2, Metric::Torus);
    let w = epsilon_graph(&pc, 0.4, KernelProfile::Indicator).unwrap();
    let sigma = sigma_eta(KernelProfile::Indicator, 2).unwrap();
    let l = rescaled_laplacian(w, 30, 0.4, 2, sigma).unwrap();
    let c = 2.0 / (sigma * 30.0 * 0.4f64.powi(4));
    assert!((l.scale() - c).abs() < 1e-12 * c);
}
