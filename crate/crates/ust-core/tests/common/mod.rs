//! Shared generators and independent oracles for the integration suites.
//! Everything here recomputes results by brute force or classical linear
//! algebra, independent of the library's own algorithms.

#![allow(dead_code)]

use std::collections::HashMap;

use ust_core::lattice::{Boundary, GridBox, Point};
use ust_core::rng::RandomSource;
use ust_core::spatial::MeasuredSpatialTree;
use ust_core::wilson::SpanningTree;

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Random lattice tree on `n` vertices inside a side-`side` box, grown by
/// uniform attachment (not the UST law; structure fodder for oracles).
pub fn random_lattice_tree(side: i32, n: usize, rng: &mut RandomSource) -> SpanningTree {
    let grid = GridBox::new(side, Boundary::Free).unwrap();
    let mut vertices = vec![Point::new(0, 0)];
    let mut occupied: HashMap<Point, ()> = HashMap::new();
    occupied.insert(vertices[0], ());
    let mut edges = Vec::new();
    let mut guard = 0;
    while vertices.len() < n {
        guard += 1;
        assert!(guard < 100_000, "box too small for requested tree");
        let v = vertices[rng.next_below(vertices.len() as u32) as usize];
        let q = v.step(rng.next_direction());
        if grid.contains(q) && !occupied.contains_key(&q) {
            occupied.insert(q, ());
            edges.push((q, v));
            vertices.push(q);
        }
    }
    SpanningTree::from_edges(grid, side, Point::new(0, 0), &edges).unwrap()
}

/// Straight path tree along the x axis, rooted at the origin.
pub fn line_tree(len: i32) -> SpanningTree {
    let grid = GridBox::new(len, Boundary::Free).unwrap();
    let mut edges = Vec::new();
    for x in 1..=len {
        edges.push((Point::new(x, 0), Point::new(x - 1, 0)));
        edges.push((Point::new(-x, 0), Point::new(-x + 1, 0)));
    }
    SpanningTree::from_edges(grid, len, Point::new(0, 0), &edges).unwrap()
}

/// Random measured rooted spatial tree on `n` points: random topology,
/// edge weights in (0.2, 1.2], masses in (0.1, 1.1], embeddings in the
/// unit square. The metric is a genuine tree metric by construction.
pub fn random_spatial_tree(n: usize, rng: &mut RandomSource) -> MeasuredSpatialTree<f64> {
    let mut parent = vec![0usize; n];
    let mut weight = vec![0.0f64; n];
    for i in 1..n {
        parent[i] = rng.next_below(i as u32) as usize;
        weight[i] = 0.2 + rng.next_f64();
    }
    // Path-sum distances via root distances and lowest common ancestors.
    let mut depth_w = vec![0.0f64; n];
    let mut ancestors: Vec<Vec<usize>> = vec![vec![0]; n];
    for i in 1..n {
        depth_w[i] = depth_w[parent[i]] + weight[i];
        let mut chain = ancestors[parent[i]].clone();
        chain.push(i);
        ancestors[i] = chain;
    }
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut lca = 0;
            for (a, b) in ancestors[i].iter().zip(ancestors[j].iter()) {
                if a == b {
                    lca = *a;
                } else {
                    break;
                }
            }
            dist[i * n + j] = depth_w[i] + depth_w[j] - 2.0 * depth_w[lca];
        }
    }
    let mass: Vec<f64> = (0..n).map(|_| 0.1 + rng.next_f64()).collect();
    let embed: Vec<[f64; 2]> = (0..n).map(|_| [rng.next_f64(), rng.next_f64()]).collect();
    MeasuredSpatialTree::new(dist, mass, embed, 0).unwrap()
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Quadratic-time chronological loop erasure.
pub fn loop_erase_reference(walk: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for &p in walk {
        if let Some(i) = out.iter().position(|&q| q == p) {
            out.truncate(i + 1);
        } else {
            out.push(p);
        }
    }
    out
}

/// Breadth-first distances over the undirected tree.
pub fn bfs_distance(t: &SpanningTree, from: u32, to: u32) -> u32 {
    let mut dist: HashMap<u32, u32> = HashMap::new();
    dist.insert(from, 0);
    let mut frontier = vec![from];
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            let d = dist[&v] + 1;
            for u in t.tree_neighbors(v) {
                if !dist.contains_key(&u) {
                    dist.insert(u, d);
                    if u == to {
                        return d;
                    }
                    next.push(u);
                }
            }
        }
        if to == from {
            return 0;
        }
        assert!(!next.is_empty(), "vertices not connected");
        frontier = next;
    }
}

/// All-pairs squared Euclidean diameter.
pub fn pairwise_diameter_sq(points: &[Point]) -> u64 {
    let mut best = 0;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(a.dist2(b));
        }
    }
    best
}

/// Exact minimum number of radius-`s` balls (centers inside the set)
/// covering the whole set, by subset dynamic programming. `dist` is the
/// pairwise metric of at most 20 elements.
pub fn min_cover_exact(dist: &[Vec<u32>], s: f64) -> usize {
    let n = dist.len();
    assert!(n <= 20);
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let ball_masks: Vec<u32> = (0..n)
        .map(|c| {
            let mut m = 0u32;
            for v in 0..n {
                if f64::from(dist[c][v]) <= s {
                    m |= 1 << v;
                }
            }
            m
        })
        .collect();
    let mut best = vec![u32::MAX; (full as usize) + 1];
    best[0] = 0;
    for mask in 0..=full {
        if best[mask as usize] == u32::MAX {
            continue;
        }
        if mask == full {
            break;
        }
        let missing = (!mask & full).trailing_zeros() as usize;
        for c in 0..n {
            if ball_masks[c] & (1 << missing) != 0 {
                let nm = (mask | ball_masks[c]) as usize;
                best[nm] = best[nm].min(best[mask as usize] + 1);
            }
        }
    }
    best[full as usize] as usize
}

/// Effective resistance from the graph Laplacian: solve `L v = e_x - e_y`
/// grounded at `y` by Gaussian elimination, resistance `v_x`.
pub fn laplacian_resistance(t: &SpanningTree, x: u32, y: u32) -> f64 {
    let verts: Vec<u32> = t.vertices().collect();
    let index: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut lap = vec![vec![0.0f64; n]; n];
    for &v in &verts {
        if v != t.root() {
            let (i, j) = (index[&v], index[&t.parent(v)]);
            lap[i][i] += 1.0;
            lap[j][j] += 1.0;
            lap[i][j] -= 1.0;
            lap[j][i] -= 1.0;
        }
    }
    // Ground y: drop its row and column.
    let g = index[&y];
    let keep: Vec<usize> = (0..n).filter(|&i| i != g).collect();
    let m = keep.len();
    let mut a = vec![vec![0.0f64; m + 1]; m];
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            a[r][c] = lap[i][j];
        }
        a[r][m] = if i == index[&x] { 1.0 } else { 0.0 };
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-12, "grounded Laplacian is nonsingular");
        for c in col..=m {
            a[col][c] /= d;
        }
        for r in 0..m {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let xr = keep.iter().position(|&i| i == index[&x]).unwrap();
    a[xr][m]
}

/// Dense transition-matrix power for the lazy tree walk: returns the full
/// distribution at time `tmax` started from `start`, plus the one-step
/// matrix for symmetry checks.
pub fn dense_heat_kernel(
    t: &SpanningTree,
    start: u32,
    laziness: f64,
    tmax: usize,
) -> (Vec<u32>, Vec<f64>, Vec<Vec<f64>>) {
    let verts: Vec<u32> = t.vertices().collect();
    let index: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut step = vec![vec![0.0f64; n]; n];
    for &v in &verts {
        let i = index[&v];
        let deg = t.tree_degree(v) as f64;
        step[i][i] += laziness;
        for u in t.tree_neighbors(v) {
            step[index[&u]][i] += (1.0 - laziness) / deg;
        }
    }
    let mut p = vec![0.0f64; n];
    p[index[&start]] = 1.0;
    for _ in 0..tmax {
        let mut q = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += step[i][j] * p[j];
            }
            q[i] = acc;
        }
        p = q;
    }
    (verts, p, step)
}

/// Exact Prohorov distance by full-space enumeration: candidate values are
/// all pairwise distances and all slack values at those fattenings, and
/// feasibility is checked over every subset of the whole space.
pub fn prohorov_naive(dist: &[f64], mu: &[f64], nu: &[f64]) -> f64 {
    let n = mu.len();
    assert!(n <= 10 && dist.len() == n * n);
    let subsets: u32 = 1 << n;
    let msum = |mask: u32, w: &[f64]| -> f64 {
        (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| w[i]).sum()
    };
    let fatten = |mask: u32, eps: f64| -> u32 {
        let mut out = 0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                for j in 0..n {
                    if dist[i * n + j] <= eps {
                        out |= 1 << j;
                    }
                }
            }
        }
        out
    };
    let mut cands = vec![0.0f64];
    for i in 0..n {
        for j in 0..n {
            cands.push(dist[i * n + j]);
        }
    }
    for &delta in cands.clone().iter() {
        for mask in 0..subsets {
            let f = fatten(mask, delta);
            cands.push(msum(mask, mu) - msum(f, nu));
            cands.push(msum(mask, nu) - msum(f, mu));
        }
    }
    cands.retain(|&c| c >= 0.0);
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup();
    let feasible = |eps: f64| -> bool {
        (0..subsets).all(|mask| {
            msum(mask, mu) <= msum(fatten(mask, eps), nu) + eps + 1e-15
                && msum(mask, nu) <= msum(fatten(mask, eps), mu) + eps + 1e-15
        })
    };
    // Feasibility is monotone in eps: binary search the candidate list.
    let mut lo = 0usize;
    let mut hi = cands.len() - 1;
    assert!(feasible(cands[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

/// Gluing-grid oracle for the compact-tree distance: for every covering
/// correspondence containing the root pair, scans the gluing slack over
/// `[dis/2, dis/2 + maxdist]` at the given resolution and evaluates the
/// full objective, keeping the overall minimum. Restricted to trees of at
/// most 4 points each.
pub fn delta_c_grid_oracle(
    a: &MeasuredSpatialTree<f64>,
    b: &MeasuredSpatialTree<f64>,
    step: f64,
) -> f64 {
    let (na, nb) = (a.len(), b.len());
    assert!(na <= 4 && nb <= 4);
    let bits = na * nb;
    let root_bit = 1u32 << (a.root() * nb + b.root());
    let maxdist = {
        let diam = |t: &MeasuredSpatialTree<f64>| -> f64 {
            let mut d: f64 = 0.0;
            for i in 0..t.len() {
                for j in 0..t.len() {
                    d = d.max(t.dist(i, j));
                }
            }
            d
        };
        diam(a).max(diam(b))
    };

    let mut best = f64::INFINITY;
    'masks: for mask in 1u32..(1 << bits) {
        if mask & root_bit == 0 {
            continue;
        }
        for i in 0..na {
            if mask & (((1u32 << nb) - 1) << (i * nb)) == 0 {
                continue 'masks;
            }
        }
        for j in 0..nb {
            let mut cm = 0u32;
            for i in 0..na {
                cm |= 1 << (i * nb + j);
            }
            if mask & cm == 0 {
                continue 'masks;
            }
        }
        let pairs: Vec<(usize, usize)> = (0..bits)
            .filter(|&p| mask & (1 << p) != 0)
            .map(|p| (p / nb, p % nb))
            .collect();
        let mut dis: f64 = 0.0;
        for &(i, j) in &pairs {
            for &(k, l) in &pairs {
                dis = dis.max((a.dist(i, k) - b.dist(j, l)).abs());
            }
        }
        let e0 = pairs
            .iter()
            .map(|&(i, j)| a.embed_dist(i, b, j))
            .fold(0.0f64, f64::max);

        let mut tau = dis / 2.0;
        let end = dis / 2.0 + maxdist;
        while tau <= end + 1e-12 {
            // The objective is at least tau + e0; once that passes the
            // incumbent, larger slacks cannot win for this correspondence.
            if tau + e0 >= best {
                break;
            }
            let cross = |x: usize, y: usize| -> f64 {
                pairs
                    .iter()
                    .map(|&(k, l)| a.dist(x, k) + tau + b.dist(l, y))
                    .fold(f64::INFINITY, f64::min)
            };
            let n = na + nb;
            let mut mu = vec![0.0; n];
            let mut nuv = vec![0.0; n];
            mu[..na].copy_from_slice(a.masses());
            nuv[na..].copy_from_slice(b.masses());
            let dist_fn = |i: usize, j: usize| -> f64 {
                match (i < na, j < na) {
                    (true, true) => a.dist(i, j),
                    (false, false) => b.dist(i - na, j - na),
                    (true, false) => cross(i, j - na),
                    (false, true) => cross(j, i - na),
                }
            };
            let p = ust_core::spatial::prohorov_with(n, dist_fn, &mu, &nuv).unwrap();
            let sup = pairs
                .iter()
                .map(|&(i, j)| cross(i, j) + a.embed_dist(i, b, j))
                .fold(0.0f64, f64::max);
            best = best.min(p + sup);
            tau += step;
        }
    }
    best
}
