//! Distributional correctness of the tree sampler: uniformity against the
//! matrix-tree count, order invariance, and margin stability.

mod common;

use std::collections::HashMap;

use ust_core::estimators::{chi_square_uniform, gamma_q};
use ust_core::graph::{count_spanning_trees, SmallGraph};
use ust_core::lattice::Point;
use ust_core::rng::RandomSource;
use ust_core::wilson::{sample_ust, tree_edge_key, wilson_forest};

fn sample_histogram(
    g: &SmallGraph,
    order: &[u32],
    samples: usize,
    seed: u64,
) -> HashMap<Vec<(u32, u32)>, u64> {
    let mut hist: HashMap<Vec<(u32, u32)>, u64> = HashMap::new();
    let mut rng = RandomSource::new(seed, 0);
    for _ in 0..samples {
        let parent = wilson_forest(g, &[0], order, &mut rng).unwrap();
        *hist.entry(tree_edge_key(&parent)).or_insert(0) += 1;
    }
    hist
}

/// Chi-square uniformity of a sampled histogram whose expected class count
/// comes from the matrix-tree oracle.
fn uniformity_p(g: &SmallGraph, samples: usize, seed: u64) -> f64 {
    let expected_classes: u64 = count_spanning_trees(g)
        .unwrap()
        .to_string()
        .parse()
        .expect("class count fits u64");
    let order: Vec<u32> = (1..g.vertex_count() as u32).collect();
    let hist = sample_histogram(g, &order, samples, seed);
    assert!(hist.len() as u64 <= expected_classes, "more classes than trees");
    if expected_classes == 1 {
        // Unique spanning tree: every sample must be it.
        assert_eq!(hist.len(), 1);
        assert_eq!(*hist.values().next().unwrap(), samples as u64);
        return 1.0;
    }
    let mut counts: Vec<u64> = hist.values().copied().collect();
    counts.resize(expected_classes as usize, 0);
    chi_square_uniform::<f64>(&counts).unwrap().p_value
}

#[test]
fn wilson_uniform_on_graphs_with_few_trees() {
    // Every graph here has at most 10 spanning trees; 1e5 samples each.
    let cases: Vec<(SmallGraph, &str)> = vec![
        (SmallGraph::path(4), "path"),
        (SmallGraph::grid(2, 2), "4-cycle"),
        (SmallGraph::cycle(5), "5-cycle"),
        (SmallGraph::cycle(9), "9-cycle"),
    ];
    for (g, name) in cases {
        let p = uniformity_p(&g, 100_000, 0xD15C0);
        assert!(p > 1e-3, "{name}: p = {p}");
    }
}

#[test]
fn wilson_law_invariant_under_vertex_order() {
    // Same graph, forward vs reversed processing order: the two empirical
    // tree distributions agree (two-sample chi-square).
    let g = SmallGraph::grid(2, 3);
    let n = 60_000usize;
    let fwd_order: Vec<u32> = (1..6).collect();
    let rev_order: Vec<u32> = (1..6).rev().collect();
    let a = sample_histogram(&g, &fwd_order, n, 11);
    let b = sample_histogram(&g, &rev_order, n, 12);
    let mut keys: Vec<_> = a.keys().chain(b.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    let mut stat = 0.0;
    let mut df = 0usize;
    for k in &keys {
        let x = *a.get(k).unwrap_or(&0) as f64;
        let y = *b.get(k).unwrap_or(&0) as f64;
        if x + y > 0.0 {
            stat += (x - y).powi(2) / (x + y);
            df += 1;
        }
    }
    let p = gamma_q((df as f64 - 1.0) / 2.0, stat / 2.0);
    assert!(p > 1e-3, "order dependence detected: stat {stat}, p {p}");
}

#[test]
fn edge_marginals_stable_under_margin() {
    // Central 3x3 window of side-6 trees, margins 2 vs 3, 1e4 trees each:
    // per-edge empirical inclusion probabilities agree within 3 sigma
    // (the bulk law is insensitive to where the wired boundary sits).
    let n = 10_000usize;
    let marginals = |margin: f64, stream_base: u64| -> HashMap<(Point, Point), f64> {
        let mut counts: HashMap<(Point, Point), u64> = HashMap::new();
        for i in 0..n {
            let mut rng = RandomSource::new(77, stream_base + i as u64);
            let t = sample_ust(6, margin, &mut rng).unwrap();
            for (v, p) in t.edges() {
                if let (Some(a), Some(b)) = (t.point_of(v), t.point_of(p)) {
                    if a.linf() <= 1 && b.linf() <= 1 {
                        let key = if a < b { (a, b) } else { (b, a) };
                        *counts.entry(key).or_insert(0) += 1;
                    }
                }
            }
        }
        counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / n as f64))
            .collect()
    };
    let m2 = marginals(2.0, 0);
    let m3 = marginals(3.0, 1_000_000);
    assert_eq!(m2.len(), 12, "12 window edges");
    for (edge, &p2) in &m2 {
        let p3 = m3[edge];
        let pool = (p2 + p3) / 2.0;
        let se = (pool * (1.0 - pool) * 2.0 / n as f64).sqrt();
        let z = (p2 - p3).abs() / se;
        assert!(z < 3.0, "edge {edge:?}: margins differ by {z} sigma");
    }
}
