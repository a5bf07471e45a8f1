//! Metric structure of a sampled tree: the intrinsic (shortest-path) metric,
//! the Schramm metric (Euclidean diameter of the unique tree path),
//! intrinsic balls and volumes, covering numbers, and the uniform-volume and
//! ball-inclusion diagnostics.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::wilson::SpanningTree;
use crate::{LERW_GROWTH_EXPONENT, VOLUME_GROWTH_EXPONENT};

// ---------------------------------------------------------------------------
// Paths and the intrinsic metric
// ---------------------------------------------------------------------------

/// The unique path between two tree vertices, endpoints included.
#[derive(Debug, Clone)]
pub struct TreePath {
    pub vertices: Vec<u32>,
}

impl TreePath {
    /// Intrinsic length (edge count) of the path.
    pub fn len_edges(&self) -> usize {
        self.vertices.len() - 1
    }
}

fn require_vertex(t: &SpanningTree, v: u32) -> Result<()> {
    if !t.contains(v) {
        return Err(Error::OutOfDomain(format!("vertex {v} not in tree")));
    }
    Ok(())
}

/// Lowest common ancestor of `x` and `y` under the current root.
pub fn lowest_common_ancestor(t: &SpanningTree, x: u32, y: u32) -> Result<u32> {
    require_vertex(t, x)?;
    require_vertex(t, y)?;
    let (mut a, mut b) = (x, y);
    while t.depth(a) > t.depth(b) {
        a = t.parent(a);
    }
    while t.depth(b) > t.depth(a) {
        b = t.parent(b);
    }
    while a != b {
        a = t.parent(a);
        b = t.parent(b);
    }
    Ok(a)
}

/// Intrinsic distance `depth(x) + depth(y) - 2 depth(lca)`.
pub fn tree_dist(t: &SpanningTree, x: u32, y: u32) -> Result<u32> {
    let m = lowest_common_ancestor(t, x, y)?;
    Ok(t.depth(x) + t.depth(y) - 2 * t.depth(m))
}

/// The unique path from `x` to `y` through their lowest common ancestor.
pub fn tree_path(t: &SpanningTree, x: u32, y: u32) -> Result<TreePath> {
    let m = lowest_common_ancestor(t, x, y)?;
    let mut up = Vec::new();
    let mut v = x;
    while v != m {
        up.push(v);
        v = t.parent(v);
    }
    up.push(m);
    let mut down = Vec::new();
    let mut w = y;
    while w != m {
        down.push(w);
        w = t.parent(w);
    }
    up.extend(down.into_iter().rev());
    Ok(TreePath { vertices: up })
}

// ---------------------------------------------------------------------------
// Schramm metric
// ---------------------------------------------------------------------------

/// A distance whose square is an integer; comparisons stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SqrtDist(u64);

impl SqrtDist {
    pub fn from_squared(d2: u64) -> Self {
        SqrtDist(d2)
    }

    pub fn squared(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        (self.0 as f64).sqrt()
    }
}

/// Schramm distance between `x` and `y`: the Euclidean diameter of the
/// unique tree path between them, computed by convex hull plus rotating
/// calipers. Paths through the wired super-vertex have no embedding and
/// are refused as truncated.
pub fn schramm_distance(t: &SpanningTree, x: u32, y: u32) -> Result<SqrtDist> {
    let path = tree_path(t, x, y)?;
    let mut pts = Vec::with_capacity(path.vertices.len());
    for &v in &path.vertices {
        match t.point_of(v) {
            Some(p) => pts.push(p),
            None => {
                return Err(Error::Truncated(
                    "path crosses the wired super-vertex; no embedding".into(),
                ))
            }
        }
    }
    Ok(SqrtDist(points_diameter_sq(&mut pts)))
}

/// Squared Euclidean diameter of a point set (hull + antipodal scan).
pub fn points_diameter_sq(pts: &mut Vec<Point>) -> u64 {
    let h = convex_hull(pts);
    let n = h.len();
    match n {
        0 => 0,
        1 => 0,
        2 => h[0].dist2(h[1]),
        _ => {
            let mut best = 0u64;
            let mut j = 1usize;
            let mut advances = 0usize;
            for i in 0..n {
                let i1 = (i + 1) % n;
                while advances <= 2 * n
                    && twice_area(h[i], h[i1], h[(j + 1) % n]) > twice_area(h[i], h[i1], h[j])
                {
                    j = (j + 1) % n;
                    advances += 1;
                }
                best = best.max(h[i].dist2(h[j])).max(h[i1].dist2(h[j]));
            }
            best
        }
    }
}

/// Twice the unsigned triangle area.
fn twice_area(a: Point, b: Point, c: Point) -> i64 {
    let abx = i64::from(b.x) - i64::from(a.x);
    let aby = i64::from(b.y) - i64::from(a.y);
    let acx = i64::from(c.x) - i64::from(a.x);
    let acy = i64::from(c.y) - i64::from(a.y);
    (abx * acy - aby * acx).abs()
}

fn cross(o: Point, a: Point, b: Point) -> i64 {
    let oax = i64::from(a.x) - i64::from(o.x);
    let oay = i64::from(a.y) - i64::from(o.y);
    let obx = i64::from(b.x) - i64::from(o.x);
    let oby = i64::from(b.y) - i64::from(o.y);
    oax * oby - oay * obx
}

/// Strictly convex hull (monotone chain, collinear points dropped),
/// counterclockwise.
fn convex_hull(pts: &mut Vec<Point>) -> Vec<Point> {
    pts.sort_unstable();
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts.clone();
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * n);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

// ---------------------------------------------------------------------------
// Intrinsic balls
// ---------------------------------------------------------------------------

/// Where ball enumeration stops expanding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipPolicy {
    /// Stop at the trusted window edge (and at the wired super-vertex).
    Window,
    /// Expand through the whole retained box; only the wired super-vertex
    /// truncates.
    Box,
}

fn clips(t: &SpanningTree, v: u32, policy: ClipPolicy) -> bool {
    match policy {
        ClipPolicy::Window => t.on_truncation_boundary(v),
        ClipPolicy::Box => t.point_of(v).is_none(),
    }
}

/// Ball summary per the public reporting schema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallStats {
    pub center: u32,
    pub radius: f64,
    /// Counting-measure mass (vertex count) of the ball.
    pub volume: usize,
    /// Vertices at the outermost included distance.
    pub boundary_size: usize,
}

/// Fixed reporting row for per-measurement statistics:
/// `stat,center_x,center_y,radius,value,truncated`.
pub fn stat_csv_row(stat: &str, center: Point, radius: f64, value: f64, truncated: bool) -> String {
    format!("{stat},{},{},{radius},{value},{truncated}", center.x, center.y)
}

/// Header matching [`stat_csv_row`].
pub const STAT_CSV_HEADER: &str = "stat,center_x,center_y,radius,value,truncated";

/// Breadth-first enumeration of an intrinsic ball.
#[derive(Debug, Clone)]
pub struct IntrinsicBall {
    pub center: u32,
    pub radius: f64,
    /// Tree distance from the center for every ball vertex.
    pub dist: HashMap<u32, u32>,
    /// Whether the ball touched the clip boundary, so that its volume may
    /// be an undercount of the unclipped ball.
    pub truncated: bool,
}

impl IntrinsicBall {
    pub fn volume(&self) -> usize {
        self.dist.len()
    }

    pub fn stats(&self) -> BallStats {
        let rim = self.radius.floor() as u32;
        BallStats {
            center: self.center,
            radius: self.radius,
            volume: self.volume(),
            boundary_size: self.dist.values().filter(|&&d| d == rim).count(),
        }
    }
}

/// Enumerates `{y : d(x, y) <= r}` by breadth-first search over the tree,
/// stopping at the clip boundary and flagging the ball as truncated if it
/// touches it.
pub fn intrinsic_ball(
    t: &SpanningTree,
    center: u32,
    radius: f64,
    policy: ClipPolicy,
) -> Result<IntrinsicBall> {
    require_vertex(t, center)?;
    if radius < 0.0 {
        return Err(Error::InvalidInput("negative radius".into()));
    }
    let limit = radius.floor() as u32;
    let mut dist = HashMap::new();
    dist.insert(center, 0);
    let mut frontier = vec![center];
    let mut truncated = clips(t, center, policy);
    let mut d = 0u32;
    while d < limit && !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            if clips(t, v, policy) {
                continue;
            }
            for u in t.tree_neighbors(v) {
                if dist.contains_key(&u) {
                    continue;
                }
                dist.insert(u, d);
                if clips(t, u, policy) {
                    truncated = true;
                }
                next.push(u);
            }
        }
        frontier = next;
    }
    Ok(IntrinsicBall {
        center,
        radius,
        dist,
        truncated,
    })
}

/// Cumulative volume profile of balls around one center.
#[derive(Debug, Clone)]
pub struct BallProfile {
    /// `cumulative[d]` = volume of the radius-`d` ball.
    pub cumulative: Vec<u64>,
    /// Smallest distance at which the enumeration touched the clip
    /// boundary; radii at or above this are flagged.
    pub truncated_from: Option<u32>,
}

impl BallProfile {
    pub fn volume_at(&self, r: f64) -> Option<u64> {
        let d = r.floor() as usize;
        self.cumulative.get(d.min(self.cumulative.len() - 1)).copied()
    }

    pub fn is_truncated_at(&self, r: f64) -> bool {
        self.truncated_from
            .map_or(false, |d0| f64::from(d0) <= r)
    }
}

/// One breadth-first pass recording all ball volumes up to `max_radius`.
pub fn ball_volume_profile(
    t: &SpanningTree,
    center: u32,
    max_radius: u32,
    policy: ClipPolicy,
) -> Result<BallProfile> {
    require_vertex(t, center)?;
    let mut seen: HashMap<u32, ()> = HashMap::new();
    seen.insert(center, ());
    let mut counts = vec![0u64; max_radius as usize + 1];
    counts[0] = 1;
    let mut truncated_from = clips(t, center, policy).then_some(0u32);
    let mut frontier = vec![center];
    let mut d = 0u32;
    while d < max_radius && !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            if clips(t, v, policy) {
                continue;
            }
            for u in t.tree_neighbors(v) {
                if seen.contains_key(&u) {
                    continue;
                }
                seen.insert(u, ());
                counts[d as usize] += 1;
                if clips(t, u, policy) && truncated_from.is_none() {
                    truncated_from = Some(d);
                }
                next.push(u);
            }
        }
        frontier = next;
    }
    let mut cumulative = counts;
    for i in 1..cumulative.len() {
        cumulative[i] += cumulative[i - 1];
    }
    Ok(BallProfile {
        cumulative,
        truncated_from,
    })
}

// ---------------------------------------------------------------------------
// Covering numbers
// ---------------------------------------------------------------------------

/// Size of a greedy farthest-point cover of the radius-`r` ball around the
/// root by balls of radius `s`.
///
/// The greedy centers are pairwise more than `s` apart, so the value is an
/// upper bound on the minimum cover number N(r, s) and at most N(r, s/2);
/// order-of-magnitude statements about N survive the substitution.
pub fn covering_number(t: &SpanningTree, r: f64, s: f64) -> Result<usize> {
    if !(s > 0.0) || s > r {
        return Err(Error::InvalidInput(format!("need 0 < s <= r, got s={s}, r={r}")));
    }
    let ball = intrinsic_ball(t, t.root(), r, ClipPolicy::Window)?;
    if ball.truncated {
        return Err(Error::Truncated(format!(
            "radius-{r} ball around the root is window-clipped"
        )));
    }
    // dist_to_centers starts as distance to the root (the first center).
    let mut dist_to_centers = ball.dist.clone();
    let mut centers = 1usize;
    loop {
        let (&far, &fd) = dist_to_centers
            .iter()
            .max_by_key(|&(&v, &d)| (d, std::cmp::Reverse(v)))
            .expect("ball is nonempty");
        if f64::from(fd) <= s {
            return Ok(centers);
        }
        centers += 1;
        // Multi-source relaxation from the new center, restricted to the ball.
        let mut frontier = vec![far];
        *dist_to_centers.get_mut(&far).unwrap() = 0;
        let mut d = 0u32;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &v in &frontier {
                for u in t.tree_neighbors(v) {
                    if let Some(cur) = dist_to_centers.get_mut(&u) {
                        if *cur > d {
                            *cur = d;
                            next.push(u);
                        }
                    }
                }
            }
            frontier = next;
        }
    }
}

// ---------------------------------------------------------------------------
// Uniform volume predicate
// ---------------------------------------------------------------------------

/// Worst case seen by [`uniform_volume_check`].
#[derive(Debug, Clone, Copy)]
pub struct VolumeWitness {
    pub center: Point,
    pub radius: f64,
    pub volume: u64,
    /// Smallest slack ratio across both bounds; below 1 means violated.
    pub margin_ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct UniformVolumeOutcome {
    pub pass: bool,
    pub worst: VolumeWitness,
}

/// Evaluates the uniform-volume predicate: for centers on a deterministic
/// sub-lattice of spacing `ceil(n/8)` inside `B_E(0, n)` (plus the origin)
/// and radii on a geometric grid spanning `[exp(-lambda^{1/40}) n^k, n^k]`
/// with `k` the growth exponent, checks
/// `lambda^-1 R^{8/5} <= |B(x, R)| <= lambda R^{8/5}`.
///
/// Grid centers that are not tree vertices are skipped (sampled spanning
/// trees contain every window point; hand-built trees need not). Any
/// window-clipped ball is an error.
pub fn uniform_volume_check(
    t: &SpanningTree,
    lambda: f64,
    n: i32,
    radius_steps: usize,
) -> Result<UniformVolumeOutcome> {
    if !(lambda >= 1.0) || n < 1 || radius_steps < 1 {
        return Err(Error::InvalidInput("need lambda >= 1, n >= 1, steps >= 1".into()));
    }
    let rmax = f64::from(n).powf(LERW_GROWTH_EXPONENT);
    let rmin = (-lambda.powf(1.0 / 40.0)).exp() * rmax;
    let radii: Vec<f64> = if radius_steps == 1 {
        vec![rmax]
    } else {
        (0..radius_steps)
            .map(|i| rmin * (rmax / rmin).powf(i as f64 / (radius_steps - 1) as f64))
            .collect()
    };

    let spacing = (f64::from(n) / 8.0).ceil() as i32;
    let reach = n / spacing;
    let mut worst = VolumeWitness {
        center: Point::ORIGIN,
        radius: rmax,
        volume: 0,
        margin_ratio: f64::INFINITY,
    };
    for cx in -reach..=reach {
        for cy in -reach..=reach {
            let c = Point::new(cx * spacing, cy * spacing);
            let cid = t.id_of(c);
            if !t.contains(cid) {
                continue;
            }
            let profile = ball_volume_profile(t, cid, rmax.floor() as u32, ClipPolicy::Window)?;
            for &r in &radii {
                if profile.is_truncated_at(r) {
                    return Err(Error::Truncated(format!(
                        "volume ball of radius {r} at ({}, {}) is window-clipped",
                        c.x, c.y
                    )));
                }
                let vol = profile.volume_at(r).unwrap() as f64;
                let scale = r.powf(VOLUME_GROWTH_EXPONENT);
                let ratio = (vol / (scale / lambda)).min(lambda * scale / vol);
                if ratio < worst.margin_ratio {
                    worst = VolumeWitness {
                        center: c,
                        radius: r,
                        volume: vol as u64,
                        margin_ratio: ratio,
                    };
                }
            }
        }
    }
    Ok(UniformVolumeOutcome {
        pass: worst.margin_ratio >= 1.0,
        worst,
    })
}

// ---------------------------------------------------------------------------
// Ball inclusion statistics
// ---------------------------------------------------------------------------

/// Empirical frequencies of the two non-inclusion events between intrinsic
/// and Euclidean balls at the growth-exponent scaling.
#[derive(Debug, Clone, Copy)]
pub struct InclusionStats {
    /// Frequency of `B_tree(0, r^k / lambda)` not contained in `B_E(0, r)`.
    pub intrinsic_escapes_euclidean: f64,
    /// Frequency of `B_E(0, r)` not contained in `B_tree(0, lambda r^k)`.
    pub euclidean_escapes_intrinsic: f64,
    pub trees: usize,
}

/// Evaluates both non-inclusion frequencies across a collection of sampled
/// trees. Enumeration runs over the whole retained box, so the window must
/// be comfortably larger than `r`.
pub fn ball_inclusion_stats(
    trees: &[SpanningTree],
    r: f64,
    lambda: f64,
) -> Result<InclusionStats> {
    if trees.is_empty() {
        return Err(Error::InvalidInput("no trees supplied".into()));
    }
    if !(r >= 1.0) || !(lambda > 0.0) {
        return Err(Error::InvalidInput("need r >= 1 and lambda > 0".into()));
    }
    let rk = r.powf(LERW_GROWTH_EXPONENT);
    let mut escapes_euclid = 0usize;
    let mut escapes_tree = 0usize;
    for t in trees {
        let origin = t.id_of(Point::ORIGIN);
        require_vertex(t, origin)?;

        let small = intrinsic_ball(t, origin, rk / lambda, ClipPolicy::Box)?;
        if small.truncated {
            return Err(Error::Truncated(
                "inner intrinsic ball reached the wired class; enlarge the margin".into(),
            ));
        }
        let r2 = r * r;
        if small.dist.keys().any(|&v| {
            t.point_of(v)
                .map_or(true, |p| p.dist2(Point::ORIGIN) as f64 > r2)
        }) {
            escapes_euclid += 1;
        }

        let big = intrinsic_ball(t, origin, lambda * rk, ClipPolicy::Box)?;
        if big.truncated {
            return Err(Error::Truncated(
                "outer intrinsic ball reached the wired class; enlarge the margin".into(),
            ));
        }
        let rad = r.floor() as i32;
        let mut escaped = false;
        'disc: for x in -rad..=rad {
            for y in -rad..=rad {
                let p = Point::new(x, y);
                if p.dist2(Point::ORIGIN) as f64 > r2 {
                    continue;
                }
                let id = t.id_of(p);
                if !t.contains(id) || !big.dist.contains_key(&id) {
                    escaped = true;
                    break 'disc;
                }
            }
        }
        if escaped {
            escapes_tree += 1;
        }
    }
    let n = trees.len() as f64;
    Ok(InclusionStats {
        intrinsic_escapes_euclidean: escapes_euclid as f64 / n,
        euclidean_escapes_intrinsic: escapes_tree as f64 / n,
        trees: trees.len(),
    })
}
