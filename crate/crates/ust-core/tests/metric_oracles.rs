//! Metric operations against brute-force oracles.

mod common;

use common::{line_tree, loop_erase_reference, min_cover_exact, pairwise_diameter_sq, random_lattice_tree};
use ust_core::lattice::{srw_step, Point};
use ust_core::metrics::{
    ball_inclusion_stats, covering_number, intrinsic_ball, schramm_distance, tree_dist, tree_path,
    uniform_volume_check, ClipPolicy,
};
use ust_core::rng::RandomSource;
use ust_core::wilson::{lerw_to_radius, loop_erase, sample_ust};

#[test]
fn loop_erase_matches_reference_and_is_idempotent() {
    let mut rng = RandomSource::new(41, 0);
    for _ in 0..12 {
        let mut walk = vec![Point::new(0, 0)];
        for _ in 0..10_000 {
            walk.push(srw_step(*walk.last().unwrap(), &mut rng));
        }
        let fast = loop_erase(&walk).unwrap();
        assert_eq!(fast, loop_erase_reference(&walk));
        assert_eq!(loop_erase(&fast).unwrap(), fast, "idempotent");
        assert_eq!(fast.first(), walk.first());
        assert_eq!(fast.last(), walk.last());
    }
}

#[test]
fn tree_dist_matches_bfs_on_random_trees() {
    let mut rng = RandomSource::new(42, 0);
    for round in 0..8 {
        let t = random_lattice_tree(20, 100, &mut rng);
        let verts: Vec<u32> = t.vertices().collect();
        for _ in 0..40 {
            let a = verts[rng.next_below(verts.len() as u32) as usize];
            let b = verts[rng.next_below(verts.len() as u32) as usize];
            assert_eq!(
                tree_dist(&t, a, b).unwrap(),
                common::bfs_distance(&t, a, b),
                "round {round}"
            );
            let path = tree_path(&t, a, b).unwrap();
            assert_eq!(path.len_edges() as u32, tree_dist(&t, a, b).unwrap());
            // Endpoints and consecutive adjacency.
            assert_eq!(*path.vertices.first().unwrap(), a);
            assert_eq!(*path.vertices.last().unwrap(), b);
            for w in path.vertices.windows(2) {
                let pa = t.point_of(w[0]).unwrap();
                let pb = t.point_of(w[1]).unwrap();
                assert_eq!(pa.dist2(pb), 1);
            }
        }
    }
}

#[test]
fn schramm_calipers_equals_pairwise_oracle() {
    // Loop-erased walks give long, twisty integer paths; the hull +
    // calipers diameter must agree exactly with the quadratic scan.
    let mut rng = RandomSource::new(43, 0);
    for _ in 0..25 {
        let path = lerw_to_radius(24.0, 4.0, &mut rng).unwrap();
        assert!(path.len() <= 1000, "keep the oracle quadratic cost sane");
        let mut pts = path.clone();
        let fast = ust_core::metrics::points_diameter_sq(&mut pts);
        assert_eq!(fast, pairwise_diameter_sq(&path));
    }
}

#[test]
fn schramm_on_tree_matches_pairwise_along_path() {
    let mut rng = RandomSource::new(44, 0);
    let t = sample_ust(16, 2.0, &mut rng).unwrap();
    let verts: Vec<u32> = t.vertices().filter(|&v| t.in_window(v)).collect();
    for _ in 0..60 {
        let a = verts[rng.next_below(verts.len() as u32) as usize];
        let b = verts[rng.next_below(verts.len() as u32) as usize];
        let Ok(d) = schramm_distance(&t, a, b) else { continue };
        let path = tree_path(&t, a, b).unwrap();
        let pts: Vec<Point> = path.vertices.iter().map(|&v| t.point_of(v).unwrap()).collect();
        assert_eq!(d.squared(), pairwise_diameter_sq(&pts));
    }
}

#[test]
fn covering_number_within_exact_bracket() {
    // The greedy cover is at least the exact minimum at radius s and at
    // most the exact minimum at radius s/2.
    let mut rng = RandomSource::new(45, 0);
    for round in 0..12 {
        let t = if round % 2 == 0 {
            line_tree(9)
        } else {
            random_lattice_tree(10, 17, &mut rng)
        };
        let r = 4.0 + f64::from(rng.next_below(4));
        let ball = intrinsic_ball(&t, t.root(), r, ClipPolicy::Window).unwrap();
        let members: Vec<u32> = {
            let mut m: Vec<u32> = ball.dist.keys().copied().collect();
            m.sort_unstable();
            m
        };
        if members.len() > 20 {
            continue;
        }
        let dist: Vec<Vec<u32>> = members
            .iter()
            .map(|&x| members.iter().map(|&y| tree_dist(&t, x, y).unwrap()).collect())
            .collect();
        for s in [1.0, 2.0, r / 2.0, r] {
            if s <= 0.0 || s > r {
                continue;
            }
            let greedy = covering_number(&t, r, s).unwrap();
            let exact = min_cover_exact(&dist, s);
            let packing_bound = min_cover_exact(&dist, s / 2.0);
            assert!(exact <= greedy, "greedy {greedy} below exact {exact}");
            assert!(
                greedy <= packing_bound,
                "greedy {greedy} above packing bound {packing_bound}"
            );
        }
    }
}

#[test]
fn schramm_metric_symmetric_with_triangle_inequality() {
    let mut rng = RandomSource::new(49, 0);
    let t = sample_ust(12, 2.0, &mut rng).unwrap();
    let verts: Vec<u32> = t.vertices().filter(|&v| t.in_window(v)).collect();
    for _ in 0..200 {
        let pick = |rng: &mut RandomSource| verts[rng.next_below(verts.len() as u32) as usize];
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let (Ok(ab), Ok(ba), Ok(ac), Ok(cb)) = (
            schramm_distance(&t, a, b),
            schramm_distance(&t, b, a),
            schramm_distance(&t, a, c),
            schramm_distance(&t, c, b),
        ) else {
            continue;
        };
        assert_eq!(ab, ba, "symmetric");
        assert!(
            ab.value() <= ac.value() + cb.value() + 1e-9,
            "triangle: {} > {} + {}",
            ab.value(),
            ac.value(),
            cb.value()
        );
    }
}

#[test]
fn covering_number_monotone_in_s_on_random_trees() {
    let mut rng = RandomSource::new(46, 0);
    for _ in 0..100 {
        let t = random_lattice_tree(12, 40, &mut rng);
        let r = 6.0;
        let mut last = usize::MAX;
        for s in [1.5, 2.0, 3.0, 6.0] {
            let c = covering_number(&t, r, s).unwrap();
            assert!(c <= last);
            last = c;
        }
    }
}

#[test]
fn uniform_volume_failure_rate_decreases_in_lambda() {
    // Qualitative tail monotonicity across sampled trees.
    let n = 8;
    let mut fails = [0usize; 3];
    let trees = 1000;
    for i in 0..trees {
        let mut rng = RandomSource::new(47, i);
        let t = sample_ust(28, 2.0, &mut rng).unwrap();
        for (k, lambda) in [4.0, 8.0, 16.0].into_iter().enumerate() {
            let out = uniform_volume_check(&t, lambda, n, 4).unwrap();
            if !out.pass {
                fails[k] += 1;
            }
        }
    }
    assert!(fails[0] >= fails[1] && fails[1] >= fails[2], "{fails:?}");
    assert!(fails[0] > 0, "lambda = 4 should fail sometimes at this scale");
}

#[test]
fn ball_inclusion_shrinks_with_lambda_and_is_split_stable() {
    let r = 6.0;
    let sample = |seed_lo: u64, n: u64| -> Vec<ust_core::wilson::SpanningTree> {
        (0..n)
            .map(|i| {
                let mut rng = RandomSource::new(48, seed_lo + i);
                sample_ust(64, 2.0, &mut rng).unwrap()
            })
            .collect()
    };
    let batch_a = sample(0, 150);
    let batch_b = sample(150, 150);

    let tight_a = ball_inclusion_stats(&batch_a, r, 2.0).unwrap();
    let loose_a = ball_inclusion_stats(&batch_a, r, 32.0).unwrap();
    assert!(
        loose_a.intrinsic_escapes_euclidean <= tight_a.intrinsic_escapes_euclidean,
        "{loose_a:?} vs {tight_a:?}"
    );
    assert!(
        loose_a.euclidean_escapes_intrinsic <= tight_a.euclidean_escapes_intrinsic,
        "{loose_a:?} vs {tight_a:?}"
    );

    // Split-sample stability of the frequencies across disjoint seed
    // ranges, within 2 standard errors of the pooled proportion.
    let tight_b = ball_inclusion_stats(&batch_b, r, 2.0).unwrap();
    for (fa, fb) in [
        (tight_a.intrinsic_escapes_euclidean, tight_b.intrinsic_escapes_euclidean),
        (tight_a.euclidean_escapes_intrinsic, tight_b.euclidean_escapes_intrinsic),
    ] {
        let n = 150.0;
        let pool = (fa + fb) / 2.0;
        let se = (pool * (1.0 - pool) * 2.0 / n).sqrt();
        if se > 0.0 {
            assert!((fa - fb).abs() <= 2.0 * se, "fa {fa} fb {fb} se {se}");
        } else {
            assert_eq!(fa, fb);
        }
    }
}
