//! Self-contained generators and oracles for the acceptance suite.

#![allow(dead_code)]

use std::collections::HashMap;

use ust_core::lattice::{Boundary, GridBox, Point};
use ust_core::rng::RandomSource;
use ust_core::spatial::MeasuredSpatialTree;
use ust_core::wilson::SpanningTree;

/// Random lattice tree on `n` vertices grown by uniform attachment.
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

/// Random measured rooted spatial tree on `n` points (tree metric by
/// construction).
pub fn random_spatial_tree(n: usize, rng: &mut RandomSource) -> MeasuredSpatialTree<f64> {
    let mut parent = vec![0usize; n];
    let mut weight = vec![0.0f64; n];
    for i in 1..n {
        parent[i] = rng.next_below(i as u32) as usize;
        weight[i] = 0.2 + rng.next_f64();
    }
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

/// Effective resistance from the grounded graph Laplacian by Gaussian
/// elimination.
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
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-12);
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

/// Gluing-grid oracle for the compact-tree distance (sizes at most 4): for
/// every covering correspondence containing the root pair, scan the gluing
/// slack over `[dis/2, dis/2 + maxdist]` at the given resolution and take
/// the overall minimum of the full objective.
pub fn delta_c_grid_oracle(
    a: &MeasuredSpatialTree<f64>,
    b: &MeasuredSpatialTree<f64>,
    step: f64,
) -> f64 {
    let (na, nb) = (a.len(), b.len());
    assert!(na <= 4 && nb <= 4);
    let bits = na * nb;
    let root_bit = 1u32 << (a.root() * nb + b.root());
    let diam = |t: &MeasuredSpatialTree<f64>| -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..t.len() {
            for j in 0..t.len() {
                d = d.max(t.dist(i, j));
            }
        }
        d
    };
    let maxdist = diam(a).max(diam(b));

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
            if tau + e0 >= best {
                break; // objective is at least tau + e0
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
