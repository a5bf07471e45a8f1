//! Finite measured, rooted, spatial trees and the distances between them:
//! exact Prohorov distance on finite supports, a certified upper-bound
//! surrogate for the compact-tree distance (correspondence infimum), and
//! the exponentially-weighted integral distance over restrictions.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::metrics::tree_dist;
use crate::wilson::SpanningTree;

/// Growth exponent used for the metric rescaling, as an `F`.
fn kappa<F: Float>() -> F {
    F::from(1.25).unwrap()
}

// ---------------------------------------------------------------------------
// Measured rooted spatial trees
// ---------------------------------------------------------------------------

/// Finite point set with a tree metric, per-point mass, planar embedding and
/// a root: the finite stand-in for a measured, rooted, spatial tree.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSpatialTree<F> {
    n: usize,
    /// Row-major `n x n` symmetric distance matrix.
    dist: Vec<F>,
    mass: Vec<F>,
    embed: Vec<[F; 2]>,
    root: usize,
}

impl<F: Float> MeasuredSpatialTree<F> {
    pub fn new(dist: Vec<F>, mass: Vec<F>, embed: Vec<[F; 2]>, root: usize) -> Result<Self> {
        let n = mass.len();
        if n == 0 {
            return Err(Error::InvalidInput("spatial tree needs at least one point".into()));
        }
        if dist.len() != n * n || embed.len() != n || root >= n {
            return Err(Error::InvalidInput("inconsistent spatial tree data".into()));
        }
        for i in 0..n {
            if dist[i * n + i] != F::zero() {
                return Err(Error::InvalidInput("nonzero diagonal distance".into()));
            }
            if mass[i] < F::zero() {
                return Err(Error::InvalidInput("negative mass".into()));
            }
            for j in 0..n {
                if dist[i * n + j] != dist[j * n + i] || dist[i * n + j] < F::zero() {
                    return Err(Error::InvalidInput("distance matrix not symmetric".into()));
                }
            }
        }
        Ok(MeasuredSpatialTree { n, dist, mass, embed, root })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> F {
        self.dist[i * self.n + j]
    }

    pub fn mass(&self, i: usize) -> F {
        self.mass[i]
    }

    pub fn masses(&self) -> &[F] {
        &self.mass
    }

    pub fn embed(&self, i: usize) -> [F; 2] {
        self.embed[i]
    }

    pub fn total_mass(&self) -> F {
        self.mass.iter().fold(F::zero(), |a, &b| a + b)
    }

    /// Euclidean distance between embedded points of two trees.
    pub fn embed_dist(&self, i: usize, other: &Self, j: usize) -> F {
        let a = self.embed[i];
        let b = other.embed[j];
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Restriction to the closed ball of radius `r` around the root; the
    /// root itself always stays.
    pub fn restrict(&self, r: F) -> Self {
        if r < F::zero() {
            // Closed-ball convention still keeps the root at its own
            // distance zero only for r >= 0; clamp.
            return self.restrict(F::zero());
        }
        let keep: Vec<usize> = (0..self.n)
            .filter(|&i| self.dist(self.root, i) <= r)
            .collect();
        let m = keep.len();
        let mut dist = vec![F::zero(); m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                dist[a * m + b] = self.dist(i, j);
            }
        }
        let mass = keep.iter().map(|&i| self.mass[i]).collect();
        let embed = keep.iter().map(|&i| self.embed[i]).collect();
        let root = keep.iter().position(|&i| i == self.root).expect("root kept");
        MeasuredSpatialTree { n: m, dist, mass, embed, root }
    }

    /// Sorted distances from the root (the jump radii of `restrict`).
    pub fn restriction_radii(&self) -> Vec<F> {
        let mut radii: Vec<F> = (0..self.n).map(|i| self.dist(self.root, i)).collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        radii
    }

    /// Whether the four-point condition holds on every quadruple within
    /// `tol`: of the three pairing sums, the largest is attained at least
    /// twice.
    pub fn four_point_holds(&self, tol: F) -> bool {
        for w in 0..self.n {
            for x in w..self.n {
                for y in x..self.n {
                    for z in y..self.n {
                        let s1 = self.dist(w, x) + self.dist(y, z);
                        let s2 = self.dist(w, y) + self.dist(x, z);
                        let s3 = self.dist(w, z) + self.dist(x, y);
                        let max = s1.max(s2).max(s3);
                        let hits = [s1, s2, s3]
                            .iter()
                            .filter(|&&s| max - s <= tol)
                            .count();
                        if hits < 2 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Builds the rescaled measured rooted spatial tree of a sampled spanning
/// tree: distances `delta^k d_tree`, masses `delta^2` per vertex, embedding
/// `delta` times the lattice coordinates, rooted at the origin.
///
/// `sample` selects the vertex subset (`None` takes the whole trusted
/// window, capped at 2048 points since the distance matrix is dense).
pub fn from_spanning_tree<F: Float>(
    t: &SpanningTree,
    delta: F,
    sample: Option<&[u32]>,
) -> Result<MeasuredSpatialTree<F>> {
    if delta <= F::zero() || delta > F::one() {
        return Err(Error::InvalidInput("delta must lie in (0, 1]".into()));
    }
    let verts: Vec<u32> = match sample {
        Some(s) => s.to_vec(),
        None => t
            .vertices()
            .filter(|&v| t.in_window(v))
            .collect(),
    };
    let n = verts.len();
    if n > 2048 {
        return Err(Error::Capacity(format!(
            "dense spatial tree capped at 2048 points, got {n}"
        )));
    }
    let origin = t.id_of(Point::ORIGIN);
    let root = verts
        .iter()
        .position(|&v| v == origin)
        .ok_or_else(|| Error::InvalidInput("sample must contain the origin".into()))?;

    let scale_d = delta.powf(kappa::<F>());
    let scale_m = delta * delta;
    let mut dist = vec![F::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = tree_dist(t, verts[i], verts[j])?;
            let val = scale_d * F::from(d).unwrap();
            dist[i * n + j] = val;
            dist[j * n + i] = val;
        }
    }
    let mut mass = Vec::with_capacity(n);
    let mut embed = Vec::with_capacity(n);
    for &v in &verts {
        let p = t
            .point_of(v)
            .ok_or_else(|| Error::InvalidInput("wired super-vertex has no embedding".into()))?;
        mass.push(scale_m);
        embed.push([delta * F::from(p.x).unwrap(), delta * F::from(p.y).unwrap()]);
    }
    MeasuredSpatialTree::new(dist, mass, embed, root)
}

// ---------------------------------------------------------------------------
// Exact Prohorov distance on finite supports
// ---------------------------------------------------------------------------

/// Exact Prohorov distance between two finite measures on a common finite
/// metric space: the least `e` with `mu(A) <= nu(A^e) + e` and `nu(A) <=
/// mu(A^e) + e` for every `A`, with closed `e`-fattenings.
///
/// Binding sets lie inside the supports, so the scan enumerates subsets of
/// each support (capped at 16 points per support) against the candidate
/// levels where a fattening can change, plus the slack values in between;
/// that makes the result exact on finite spaces.
pub fn prohorov<F: Float>(dist: &[F], mu: &[F], nu: &[F]) -> Result<F> {
    let n = mu.len();
    if nu.len() != n || dist.len() != n * n {
        return Err(Error::InvalidInput("measure/matrix shapes differ".into()));
    }
    prohorov_with(n, |i, j| dist[i * n + j], mu, nu)
}

/// [`prohorov`] with the metric given as a closure (used for glued spaces
/// that are never materialized).
pub fn prohorov_with<F: Float>(
    n: usize,
    dist: impl Fn(usize, usize) -> F,
    mu: &[F],
    nu: &[F],
) -> Result<F> {
    let supp_mu: Vec<usize> = (0..n).filter(|&i| mu[i] > F::zero()).collect();
    let supp_nu: Vec<usize> = (0..n).filter(|&i| nu[i] > F::zero()).collect();
    if supp_mu.len() > 16 || supp_nu.len() > 16 {
        return Err(Error::Capacity(format!(
            "prohorov exact path capped at support size 16, got {} and {}",
            supp_mu.len(),
            supp_nu.len()
        )));
    }
    if supp_mu.is_empty() && supp_nu.is_empty() {
        return Ok(F::zero());
    }

    // Candidate levels: cross distances between the supports.
    let mut levels: Vec<F> = vec![F::zero()];
    for &i in &supp_mu {
        for &j in &supp_nu {
            levels.push(dist(i, j));
        }
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();

    // Subset sums of each measure over its own support.
    let mu_sum = subset_sums(&supp_mu, mu);
    let nu_sum = subset_sums(&supp_nu, nu);

    let mut best: Option<F> = None;
    for (k, &delta) in levels.iter().enumerate() {
        // Fattening masks at level delta, restricted to the other support.
        let h1 = worst_slack(&supp_mu, &supp_nu, &mu_sum, &nu_sum, delta, &dist);
        let h2 = worst_slack(&supp_nu, &supp_mu, &nu_sum, &mu_sum, delta, &|i, j| dist(j, i));
        let h = h1.max(h2);
        let cand = if h <= delta {
            Some(delta)
        } else if k + 1 == levels.len() || h < levels[k + 1] {
            Some(h)
        } else {
            None
        };
        if let Some(c) = cand {
            best = Some(match best {
                Some(b) => b.min(c),
                None => c,
            });
        }
    }
    Ok(best.expect("last level always yields a candidate"))
}

/// Subset sums of `weights` over the index list `supp`, indexed by mask.
fn subset_sums<F: Float>(supp: &[usize], weights: &[F]) -> Vec<F> {
    let m = supp.len();
    let mut out = vec![F::zero(); 1 << m];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        out[mask] = out[mask & (mask - 1)] + weights[supp[low]];
    }
    out
}

/// max over A subsets of `from` of  sum_from(A) - sum_to(A^delta).
fn worst_slack<F: Float>(
    from: &[usize],
    to: &[usize],
    from_sum: &[F],
    to_sum: &[F],
    delta: F,
    dist: &impl Fn(usize, usize) -> F,
) -> F {
    let m = from.len();
    if m == 0 {
        return F::zero();
    }
    // Neighborhood of each `from` point inside `to`, as a to-mask.
    let hoods: Vec<usize> = from
        .iter()
        .map(|&i| {
            let mut mask = 0usize;
            for (b, &j) in to.iter().enumerate() {
                if dist(i, j) <= delta {
                    mask |= 1 << b;
                }
            }
            mask
        })
        .collect();
    let mut fat = vec![0usize; 1 << m];
    let mut worst = F::zero(); // A = empty set gives 0
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        fat[mask] = fat[mask & (mask - 1)] | hoods[low];
        let slack = from_sum[mask] - to_sum[fat[mask]];
        if slack > worst {
            worst = slack;
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Correspondences and the compact-distance surrogate
// ---------------------------------------------------------------------------

/// Relation between the point sets of two trees covering both sides and
/// containing the root pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn is_valid(&self, na: usize, nb: usize, root_a: usize, root_b: usize) -> bool {
        let mut rows = vec![false; na];
        let mut cols = vec![false; nb];
        let mut has_root = false;
        for &(i, j) in &self.pairs {
            if i >= na || j >= nb {
                return false;
            }
            rows[i] = true;
            cols[j] = true;
            has_root |= i == root_a && j == root_b;
        }
        has_root && rows.iter().all(|&r| r) && cols.iter().all(|&c| c)
    }
}

/// Certified bracket for the compact-tree distance between two measured
/// rooted spatial trees.
#[derive(Debug, Clone)]
pub struct DeltaCBound<F> {
    /// Upper bound: the best value over the glued-union family searched.
    pub upper: F,
    /// Cheap universal lower bound (total-mass gap and root embedding gap).
    pub lower: F,
    pub witness: Correspondence,
    /// Whether the full correspondence family was enumerated (trees of at
    /// most 4 points each); otherwise the value comes from seeded local
    /// search and is an upper bound that may exceed the family infimum.
    pub exhaustive: bool,
}

/// Evaluates the glued-union objective for one correspondence: Prohorov
/// distance in the union metric glued with slack `dis(C)/2`, plus the
/// worst pair separation `dis(C)/2 + max d_E(embeddings)`.
fn objective<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    pairs: &[(usize, usize)],
) -> F {
    let tau = distortion(a, b, pairs) / F::from(2).unwrap();
    let e0 = pairs
        .iter()
        .map(|&(i, j)| a.embed_dist(i, &b, j))
        .fold(F::zero(), F::max);
    prohorov_glued(a, b, pairs, tau) + tau + e0
}

fn distortion<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    pairs: &[(usize, usize)],
) -> F {
    let mut dis = F::zero();
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[idx..] {
            let gap = (a.dist(i, k) - b.dist(j, l)).abs();
            if gap > dis {
                dis = gap;
            }
        }
    }
    dis
}

/// Prohorov distance between the two mass vectors in the glued union
/// space: within-tree distances as given, cross distances through the best
/// correspondence pair plus the slack `tau`.
fn prohorov_glued<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    pairs: &[(usize, usize)],
    tau: F,
) -> F {
    let na = a.len();
    let n = na + b.len();
    let mut mu = vec![F::zero(); n];
    let mut nu = vec![F::zero(); n];
    mu[..na].copy_from_slice(a.masses());
    nu[na..].copy_from_slice(b.masses());
    let cross = |x: usize, y: usize| -> F {
        pairs
            .iter()
            .map(|&(k, l)| a.dist(x, k) + b.dist(l, y))
            .fold(F::infinity(), F::min)
            + tau
    };
    let dist = move |i: usize, j: usize| -> F {
        match (i < na, j < na) {
            (true, true) => a.dist(i, j),
            (false, false) => b.dist(i - na, j - na),
            (true, false) => cross(i, j - na),
            (false, true) => cross(j, i - na),
        }
    };
    prohorov_with(n, dist, &mu, &nu).expect("glued supports within cap")
}

/// Upper/lower bracket for the compact-tree distance via the glued-union
/// correspondence family.
///
/// For trees of at most 4 points each, every covering correspondence
/// containing the root pair is enumerated, which makes the upper bound the
/// exact minimum over the family. Larger instances run a seeded local
/// search (3 deterministic seeds: rank matching along root distances,
/// nearest embeddings, nearest root-distance profiles) within `budget`
/// objective evaluations.
pub fn delta_c_surrogate<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    budget: usize,
) -> Result<DeltaCBound<F>> {
    if a.len() > 16 || b.len() > 16 {
        // The glued-union Prohorov term runs the exact scan over each
        // tree's support, which is capped at 16.
        return Err(Error::Capacity(format!(
            "surrogate capped at 16 points per tree, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let lower = (a.total_mass() - b.total_mass())
        .abs()
        .max(a.embed_dist(a.root(), b, b.root()));

    // Identical data: the diagonal correspondence is optimal at zero.
    if a == b {
        let pairs: Vec<(usize, usize)> = (0..a.len()).map(|i| (i, i)).collect();
        return Ok(DeltaCBound {
            upper: F::zero(),
            lower,
            witness: Correspondence { pairs },
            exhaustive: true,
        });
    }

    let (na, nb) = (a.len(), b.len());
    if na <= 4 && nb <= 4 {
        Ok(enumerate_all(a, b, lower))
    } else {
        Ok(local_search(a, b, lower, budget))
    }
}

fn enumerate_all<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    lower: F,
) -> DeltaCBound<F> {
    let (na, nb) = (a.len(), b.len());
    let bits = na * nb;
    let root_bit = 1u32 << (a.root() * nb + b.root());
    let row_mask: Vec<u32> = (0..na)
        .map(|i| ((1u32 << nb) - 1) << (i * nb))
        .collect();
    let col_mask: Vec<u32> = (0..nb)
        .map(|j| {
            let mut m = 0u32;
            for i in 0..na {
                m |= 1 << (i * nb + j);
            }
            m
        })
        .collect();

    let mut best: Option<(F, u32)> = None;
    let mass_gap = (a.total_mass() - b.total_mass()).abs();
    let two = F::from(2).unwrap();
    'masks: for mask in 1u32..(1 << bits) {
        if mask & root_bit == 0 {
            continue;
        }
        for rm in &row_mask {
            if mask & rm == 0 {
                continue 'masks;
            }
        }
        for cm in &col_mask {
            if mask & cm == 0 {
                continue 'masks;
            }
        }
        let pairs: Vec<(usize, usize)> = (0..bits)
            .filter(|&p| mask & (1 << p) != 0)
            .map(|p| (p / nb, p % nb))
            .collect();
        // Cheap part first: tau + embedding sup + mass gap bounds the
        // objective from below.
        let tau = distortion(a, b, &pairs) / two;
        let e0 = pairs
            .iter()
            .map(|&(i, j)| a.embed_dist(i, &b, j))
            .fold(F::zero(), F::max);
        if let Some((bv, _)) = best {
            if tau + e0 + mass_gap >= bv {
                continue;
            }
        }
        let val = prohorov_glued(a, b, &pairs, tau) + tau + e0;
        match best {
            Some((bv, _)) if bv <= val => {}
            _ => best = Some((val, mask)),
        }
    }
    let (upper, mask) = best.expect("the full correspondence is always valid");
    let pairs: Vec<(usize, usize)> = (0..bits)
        .filter(|&p| mask & (1 << p) != 0)
        .map(|p| (p / nb, p % nb))
        .collect();
    DeltaCBound {
        upper,
        lower,
        witness: Correspondence { pairs },
        exhaustive: true,
    }
}

fn local_search<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    lower: F,
    budget: usize,
) -> DeltaCBound<F> {
    let (na, nb) = (a.len(), b.len());
    let mut evals = 0usize;
    let mut best_val = F::infinity();
    let mut best_pairs: Vec<(usize, usize)> = Vec::new();

    let consider = |pairs: &mut Vec<(usize, usize)>,
                        evals: &mut usize,
                        best_val: &mut F,
                        best_pairs: &mut Vec<(usize, usize)>| {
        pairs.sort_unstable();
        pairs.dedup();
        *evals += 1;
        let val = objective(a, b, pairs);
        if val < *best_val {
            *best_val = val;
            *best_pairs = pairs.clone();
            true
        } else {
            false
        }
    };

    for seed in seeds(a, b) {
        let mut pairs = seed;
        consider(&mut pairs, &mut evals, &mut best_val, &mut best_pairs);
        // First-improvement local search over single-pair edits.
        let mut improved = true;
        while improved && evals < budget {
            improved = false;
            let current = best_pairs.clone();
            // Try removing non-essential pairs.
            for idx in 0..current.len() {
                if evals >= budget {
                    break;
                }
                let mut cand = current.clone();
                cand.remove(idx);
                let still_valid =
                    Correspondence { pairs: cand.clone() }.is_valid(na, nb, a.root(), b.root());
                if !still_valid {
                    continue;
                }
                if consider(&mut cand, &mut evals, &mut best_val, &mut best_pairs) {
                    improved = true;
                    break;
                }
            }
            if improved {
                continue;
            }
            // Try adding or swapping one pair.
            for i in 0..na {
                for j in 0..nb {
                    if evals >= budget {
                        break;
                    }
                    if current.contains(&(i, j)) {
                        continue;
                    }
                    let mut cand = current.clone();
                    cand.push((i, j));
                    if consider(&mut cand, &mut evals, &mut best_val, &mut best_pairs) {
                        improved = true;
                        break;
                    }
                }
                if improved {
                    break;
                }
            }
        }
        if evals >= budget {
            break;
        }
    }

    DeltaCBound {
        upper: best_val,
        lower,
        witness: Correspondence { pairs: best_pairs },
        exhaustive: false,
    }
}

/// Deterministic seed correspondences for the local search.
fn seeds<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
) -> Vec<Vec<(usize, usize)>> {
    let (na, nb) = (a.len(), b.len());
    let rank = |t: &MeasuredSpatialTree<F>| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..t.len()).collect();
        idx.sort_by(|&x, &y| {
            t.dist(t.root(), x)
                .partial_cmp(&t.dist(t.root(), y))
                .unwrap()
                .then(x.cmp(&y))
        });
        idx
    };
    let ra = rank(a);
    let rb = rank(b);

    // Seed 1: proportional rank matching along root distances.
    let mut s1 = vec![(a.root(), b.root())];
    for (i, &ai) in ra.iter().enumerate() {
        let j = (i * nb) / na;
        s1.push((ai, rb[j]));
    }
    for (j, &bj) in rb.iter().enumerate() {
        let i = (j * na) / nb;
        s1.push((ra[i], bj));
    }

    // Seed 2: nearest embeddings, both directions.
    let mut s2 = vec![(a.root(), b.root())];
    for i in 0..na {
        let j = (0..nb)
            .min_by(|&x, &y| {
                a.embed_dist(i, b, x)
                    .partial_cmp(&a.embed_dist(i, b, y))
                    .unwrap()
                    .then(x.cmp(&y))
            })
            .unwrap();
        s2.push((i, j));
    }
    for j in 0..nb {
        let i = (0..na)
            .min_by(|&x, &y| {
                a.embed_dist(x, b, j)
                    .partial_cmp(&a.embed_dist(y, b, j))
                    .unwrap()
                    .then(x.cmp(&y))
            })
            .unwrap();
        s2.push((i, j));
    }

    // Seed 3: nearest root-distance profile, both directions.
    let mut s3 = vec![(a.root(), b.root())];
    let prof = |t: &MeasuredSpatialTree<F>, i: usize| t.dist(t.root(), i);
    for i in 0..na {
        let j = (0..nb)
            .min_by(|&x, &y| {
                (prof(a, i) - prof(b, x))
                    .abs()
                    .partial_cmp(&(prof(a, i) - prof(b, y)).abs())
                    .unwrap()
                    .then(x.cmp(&y))
            })
            .unwrap();
        s3.push((i, j));
    }
    for j in 0..nb {
        let i = (0..na)
            .min_by(|&x, &y| {
                (prof(a, x) - prof(b, j))
                    .abs()
                    .partial_cmp(&(prof(a, y) - prof(b, j)).abs())
                    .unwrap()
                    .then(x.cmp(&y))
            })
            .unwrap();
        s3.push((i, j));
    }

    vec![s1, s2, s3]
}

// ---------------------------------------------------------------------------
// The integral distance over restrictions
// ---------------------------------------------------------------------------

/// Result of the exponentially-weighted restriction integral.
#[derive(Debug, Clone, Copy)]
pub struct DeltaResult<F> {
    /// Quadrature value of the integral up to `rmax`.
    pub value: F,
    /// Tail bound added to the reported error: the integrand is capped at
    /// one, so the truncated tail is at most `exp(-rmax)`.
    pub truncation_error: F,
    /// Whether every cell used the exhaustively enumerated family.
    pub exhaustive: bool,
}

/// Integral over `r` of `exp(-r) * min(1, delta_c(a^(r), b^(r)))`,
/// evaluated exactly per cell of the joint restriction-jump grid (refined
/// to steps of at most `grid`), with the surrogate providing the
/// `delta_c` values.
pub fn delta_distance<F: Float>(
    a: &MeasuredSpatialTree<F>,
    b: &MeasuredSpatialTree<F>,
    rmax: F,
    grid: F,
    budget: usize,
) -> Result<DeltaResult<F>> {
    if rmax <= F::zero() || grid <= F::zero() {
        return Err(Error::InvalidInput("rmax and grid must be positive".into()));
    }
    // Joint jump set, refined.
    let mut cuts: Vec<F> = vec![F::zero(), rmax];
    for r in a.restriction_radii().into_iter().chain(b.restriction_radii()) {
        if r > F::zero() && r < rmax {
            cuts.push(r);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut refined: Vec<F> = Vec::with_capacity(cuts.len() * 2);
    for w in cuts.windows(2) {
        refined.push(w[0]);
        let width = w[1] - w[0];
        let pieces = (width / grid).ceil().to_f64().unwrap() as usize;
        for p in 1..pieces {
            refined.push(w[0] + width * F::from(p).unwrap() / F::from(pieces).unwrap());
        }
    }
    refined.push(rmax);

    let count_within = |t: &MeasuredSpatialTree<F>, r: F| -> usize {
        (0..t.len()).filter(|&i| t.dist(t.root(), i) <= r).count()
    };

    let mut cache: HashMap<(usize, usize), (F, bool)> = HashMap::new();
    let mut value = F::zero();
    let mut exhaustive = true;
    for w in refined.windows(2) {
        let (r0, r1) = (w[0], w[1]);
        let key = (count_within(a, r0), count_within(b, r0));
        let (dc, exact) = match cache.get(&key) {
            Some(&v) => v,
            None => {
                let bound = delta_c_surrogate(&a.restrict(r0), &b.restrict(r0), budget)?;
                let v = (bound.upper.min(F::one()), bound.exhaustive);
                cache.insert(key, v);
                v
            }
        };
        exhaustive &= exact;
        let weight = (-r0).exp() - (-r1).exp();
        value = value + weight * dc;
    }
    Ok(DeltaResult {
        value,
        truncation_error: (-rmax).exp(),
        exhaustive,
    })
}

// ---------------------------------------------------------------------------
// Interchange format mst-v1
// ---------------------------------------------------------------------------

/// Serializes a spatial tree in `mst-v1` format: header, one `idx mass ex
/// ey` line per point, then the strict upper triangle of the distance
/// matrix row-major, one row per line.
pub fn save_mst(t: &MeasuredSpatialTree<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mst-v1 n={} root={}", t.len(), t.root());
    for i in 0..t.len() {
        let e = t.embed(i);
        let _ = writeln!(out, "{} {} {} {}", i, t.mass(i), e[0], e[1]);
    }
    for i in 0..t.len().saturating_sub(1) {
        let row: Vec<String> = (i + 1..t.len()).map(|j| t.dist(i, j).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses `mst-v1` text.
pub fn load_mst(text: &str) -> Result<MeasuredSpatialTree<f64>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
    let mut tokens = header.split_ascii_whitespace();
    if tokens.next() != Some("mst-v1") {
        return Err(Error::Parse { line: 1, msg: "expected magic token 'mst-v1'".into() });
    }
    let mut n: Option<usize> = None;
    let mut root: Option<usize> = None;
    for tok in tokens {
        match tok.split_once('=') {
            Some(("n", v)) => n = v.parse().ok(),
            Some(("root", v)) => root = v.parse().ok(),
            _ => return Err(Error::Parse { line: 1, msg: format!("bad header token '{tok}'") }),
        }
    }
    let (n, root) = match (n, root) {
        (Some(n), Some(r)) if n >= 1 && r < n => (n, r),
        _ => return Err(Error::Parse { line: 1, msg: "header needs n and root < n".into() }),
    };

    let mut mass = vec![0.0; n];
    let mut embed = vec![[0.0; 2]; n];
    for want in 0..n {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: want + 2, msg: "missing point line".into() })?;
        let lineno = idx + 1;
        let toks: Vec<&str> = line.split_ascii_whitespace().collect();
        if toks.len() != 4 {
            return Err(Error::Parse { line: lineno, msg: "point line needs 4 fields".into() });
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: "bad index".into() })?;
        if i != want {
            return Err(Error::Parse { line: lineno, msg: format!("expected index {want}") });
        }
        let m: f64 = toks[1]
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: "bad mass".into() })?;
        let ex: f64 = toks[2]
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: "bad embedding x".into() })?;
        let ey: f64 = toks[3]
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: "bad embedding y".into() })?;
        mass[i] = m;
        embed[i] = [ex, ey];
    }

    let mut dist = vec![0.0; n * n];
    let mut expect = n * (n - 1) / 2;
    let mut i = 0usize;
    let mut j = 1usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        for tok in line.split_ascii_whitespace() {
            if expect == 0 {
                return Err(Error::Parse { line: lineno, msg: "extra distance values".into() });
            }
            let d: f64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: lineno, msg: "bad distance".into() })?;
            dist[i * n + j] = d;
            dist[j * n + i] = d;
            expect -= 1;
            j += 1;
            if j == n {
                i += 1;
                j = i + 1;
            }
        }
    }
    if expect != 0 {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("{expect} distance values missing"),
        });
    }
    MeasuredSpatialTree::new(dist, mass, embed, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;
    use crate::wilson::{sample_ust, SpanningTree};

    fn single_point(mass: f64, x: f64, y: f64) -> MeasuredSpatialTree<f64> {
        MeasuredSpatialTree::new(vec![0.0], vec![mass], vec![[x, y]], 0).unwrap()
    }

    /// Origin plus the first `n - 1` other window vertices.
    fn sample_with_origin(t: &SpanningTree, n: usize) -> Vec<u32> {
        let origin = t.id_of(Point::ORIGIN);
        let mut verts = vec![origin];
        verts.extend(
            t.vertices()
                .filter(|&v| t.in_window(v) && v != origin)
                .take(n - 1),
        );
        verts
    }

    #[test]
    fn from_spanning_tree_two_vertices() {
        use crate::lattice::{Boundary, GridBox};
        use crate::wilson::SpanningTree;
        let grid = GridBox::new(1, Boundary::Free).unwrap();
        let t = SpanningTree::from_edges(
            grid,
            1,
            Point::new(0, 0),
            &[(Point::new(1, 0), Point::new(0, 0))],
        )
        .unwrap();
        let ids = [t.id_of(Point::new(0, 0)), t.id_of(Point::new(1, 0))];
        let m = from_spanning_tree::<f64>(&t, 1.0, Some(&ids)).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.dist(0, 1), 1.0);
        assert_eq!(m.mass(0), 1.0);
        assert_eq!(m.embed(1), [1.0, 0.0]);
        assert_eq!(m.root(), 0);
    }

    #[test]
    fn rescaling_is_uniform_over_pairs() {
        let mut rng = RandomSource::new(31, 0);
        let t = sample_ust(6, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 20);
        let delta = 0.5f64;
        let m = from_spanning_tree(&t, delta, Some(&verts)).unwrap();
        let scale = delta.powf(1.25);
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let d = crate::metrics::tree_dist(&t, verts[i], verts[j]).unwrap();
                let ratio = m.dist(i, j) / f64::from(d);
                assert!((ratio - scale).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restrict_trivia() {
        let mut rng = RandomSource::new(32, 0);
        let t = sample_ust(5, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 14);
        let m = from_spanning_tree::<f64>(&t, 1.0, Some(&verts)).unwrap();
        let all = m.restrict(1e18);
        assert_eq!(all.len(), m.len());
        let just_root = m.restrict(0.0);
        assert_eq!(just_root.len(), 1);
        assert_eq!(just_root.root(), 0);
        // Projection property.
        let r = 3.0;
        let once = m.restrict(r);
        let twice = once.restrict(r);
        assert_eq!(once, twice);
    }

    #[test]
    fn prohorov_trivia() {
        // Equal measures.
        let d = vec![0.0, 1.0, 1.0, 0.0];
        let p = prohorov(&d, &[0.3, 0.7], &[0.3, 0.7]).unwrap();
        assert_eq!(p, 0.0);
        // Unit Diracs at distance 0.3.
        let d = vec![0.0, 0.3, 0.3, 0.0];
        let p = prohorov(&d, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((p - 0.3).abs() < 1e-15);
        // Same point, masses 1 vs 2: pure mass gap.
        let p = prohorov(&[0.0], &[1.0], &[2.0]).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prohorov_mixed_case() {
        // mu = delta_x, nu = (1/2)(delta_x + delta_y), |xy| = 1:
        // A = {x}: 1 <= 1/2 + e needs e >= 1/2 until e >= 1 fattens to y.
        let d = vec![0.0, 1.0, 1.0, 0.0];
        let p = prohorov(&d, &[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((p - 0.5).abs() < 1e-15, "{p}");
    }

    #[test]
    fn delta_c_identical_trees_zero() {
        let mut rng = RandomSource::new(33, 0);
        let t = sample_ust(4, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 12);
        let m = from_spanning_tree::<f64>(&t, 0.25, Some(&verts)).unwrap();
        let b = delta_c_surrogate(&m, &m, 1000).unwrap();
        assert!(b.upper <= 1e-12);
        assert!(b.exhaustive);
    }

    #[test]
    fn delta_c_single_points_mass_gap() {
        let a = single_point(1.0, 0.0, 0.0);
        let b = single_point(2.0, 0.0, 0.0);
        let bd = delta_c_surrogate(&a, &b, 10).unwrap();
        assert!((bd.upper - 1.0).abs() < 1e-15);
        assert!((bd.lower - 1.0).abs() < 1e-15);
        assert_eq!(bd.witness.pairs, vec![(0, 0)]);
    }

    #[test]
    fn surrogate_upper_at_least_lower() {
        let a = single_point(1.0, 0.0, 0.0);
        let b = single_point(1.0, 3.0, 4.0);
        let bd = delta_c_surrogate(&a, &b, 10).unwrap();
        assert!((bd.lower - 5.0).abs() < 1e-15, "root embedding gap");
        assert!(bd.upper >= bd.lower - 1e-15);
    }

    #[test]
    fn delta_distance_identity_and_symmetry() {
        let mut rng = RandomSource::new(34, 0);
        let t = sample_ust(4, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 10);
        let m = from_spanning_tree::<f64>(&t, 0.3, Some(&verts)).unwrap();
        let d = delta_distance(&m, &m, 6.0, 0.25, 1000).unwrap();
        assert!(d.value <= 1e-12);

        let m2 = m.restrict(1.0);
        let ab = delta_distance(&m, &m2, 5.0, 0.25, 4000).unwrap();
        let ba = delta_distance(&m2, &m, 5.0, 0.25, 4000).unwrap();
        assert!((ab.value - ba.value).abs() < 1e-9);
    }

    #[test]
    fn restriction_tail_bound() {
        let mut rng = RandomSource::new(35, 0);
        let t = sample_ust(4, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 8);
        let m = from_spanning_tree::<f64>(&t, 0.6, Some(&verts)).unwrap();
        for r in [1.0, 2.0] {
            let cut = m.restrict(r);
            let d = delta_distance(&m, &cut, 9.0, 0.2, 3000).unwrap();
            assert!(
                d.value <= (-r).exp() + 1e-9,
                "distance {} exceeds exp(-{r})",
                d.value
            );
        }
    }

    #[test]
    fn four_point_condition_on_rescaled_tree() {
        let mut rng = RandomSource::new(36, 0);
        let t = sample_ust(5, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 12);
        let m = from_spanning_tree::<f64>(&t, 0.5, Some(&verts)).unwrap();
        assert!(m.four_point_holds(1e-12));
    }

    #[test]
    fn mst_roundtrip() {
        let mut rng = RandomSource::new(37, 0);
        let t = sample_ust(3, 2.0, &mut rng).unwrap();
        let verts = sample_with_origin(&t, 9);
        let m = from_spanning_tree::<f64>(&t, 0.35, Some(&verts)).unwrap();
        let s = save_mst(&m);
        let m2 = load_mst(&s).unwrap();
        assert_eq!(save_mst(&m2), s);
        assert_eq!(m2, m);
    }

    #[test]
    fn mst_load_errors() {
        assert!(load_mst("").is_err());
        assert!(load_mst("mst-v1 n=2 root=0\n0 1 0 0\n").is_err());
        let bad = "mst-v1 n=2 root=5\n0 1 0 0\n1 1 1 0\n1\n";
        assert!(load_mst(bad).is_err());
    }
}
