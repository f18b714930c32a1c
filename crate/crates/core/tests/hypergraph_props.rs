mod common;

use std::collections::HashMap;

use hohl::{
    categorical_hypergraph, clique_expand, group_segments, skeleton_decompose, CoefficientRule, Hyperedge, Hypergraph,
    WeightedAdjacency,
};
use hohl::data::{CategoricalColumn, CategoricalTable};
use proptest::prelude::*;

fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
    (3usize..14).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::vec(0..n, 1..n + 2), 1u8..4), 1..12).prop_map(move |raw| {
            let edges = raw
                .into_iter()
                .map(|(vs, w)| Hyperedge {
                    vertices: vs,
                    weight: f64::from(w),
                })
                .collect();
            Hypergraph::new(n, edges).unwrap()
        })
    })
}

/// Pair weights straight from the hyperedge list.
fn pair_weights(h: &Hypergraph, size: Option<usize>) -> HashMap<(usize, usize), f64> {
    let mut m = HashMap::new();
    for e in h.edges() {
        if size.is_some_and(|s| s != e.vertices.len()) {
            continue;
        }
        for (a, &i) in e.vertices.iter().enumerate() {
            for &j in &e.vertices[a + 1..] {
                *m.entry((i, j)).or_insert(0.0) += e.weight;
            }
        }
    }
    m
}

fn assert_matches(w: &WeightedAdjacency, pairs: &HashMap<(usize, usize), f64>) {
    for i in 0..w.n() {
        for j in 0..w.n() {
            let expect = if i == j { 0.0 } else { pairs.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0) };
            assert_eq!(w.get(i, j), expect, "entry ({i}, {j})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn skeletons_match_pair_counts(h in arb_hypergraph()) {
        let sk = skeleton_decompose(&h);
        let sizes: Vec<usize> = h.size_histogram().keys().copied().collect();
        prop_assert_eq!(sk.keys().copied().collect::<Vec<_>>(), sizes);
        for (&s, w) in &sk {
            assert_matches(w, &pair_weights(&h, Some(s)));
        }
        let all: Vec<&WeightedAdjacency> = sk.values().collect();
        if all.is_empty() {
            prop_assert_eq!(clique_expand(&h).nnz(), 0);
        } else {
            let summed = WeightedAdjacency::sum(&all).unwrap();
            prop_assert!(summed.max_abs_diff(&clique_expand(&h)) < 1e-12);
        }
        assert_matches(&clique_expand(&h), &pair_weights(&h, None));
    }

    #[test]
    fn segments_partition_sizes(h in arb_hypergraph(), q in 1usize..5, qc in any::<bool>()) {
        let sk = skeleton_decompose(&h);
        let m = sk.len();
        let rule = if qc { CoefficientRule::QC } else { CoefficientRule::RC };
        if q > m {
            prop_assert!(group_segments(&sk, q, rule).is_err());
            return Ok(());
        }
        let g = group_segments(&sk, q, rule).unwrap();
        prop_assert_eq!(g.len(), q);
        let flat: Vec<usize> = g.iter().flat_map(|s| s.sizes.clone()).collect();
        let mut desc: Vec<usize> = sk.keys().copied().collect();
        desc.reverse();
        prop_assert_eq!(flat, desc);
        for (l, s) in g.iter().enumerate() {
            let len = m / q + usize::from(l < m % q);
            prop_assert_eq!(s.sizes.len(), len);
            prop_assert_eq!(s.power as usize, l + 1);
            let lf = (l + 1) as f64;
            prop_assert_eq!(s.coeff, if qc { lf * lf } else { lf });
        }
        let parts: Vec<&WeightedAdjacency> = g.iter().map(|s| &s.adjacency).collect();
        prop_assert!(WeightedAdjacency::sum(&parts).unwrap().max_abs_diff(&clique_expand(&h)) < 1e-12);
    }

    #[test]
    fn hyperedge_file_roundtrip(h in arb_hypergraph()) {
        let mut buf = Vec::new();
        h.write(&mut buf).unwrap();
        let back = Hypergraph::parse(&buf[..], std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(back, h);
    }
}

#[test]
fn categorical_groups_need_two_members() {
    let col = |name: &str, v: &[&str]| {
        let vals: Vec<Option<&str>> = v.iter().map(|s| Some(*s)).collect();
        CategoricalColumn::from_values(name, &vals)
    };
    let t = CategoricalTable::new(
        4,
        vec![col("a", &["x", "x", "y", "z"]), col("b", &["?", "?", "?", "k"])],
    )
    .unwrap();
    let h = categorical_hypergraph(&t);
    let mut edges: Vec<Vec<usize>> = h.edges().iter().map(|e| e.vertices.clone()).collect();
    edges.sort();
    assert_eq!(edges, vec![vec![0, 1], vec![0, 1, 2]]);
    assert!(h.edges().iter().all(|e| e.weight == 1.0));
}
