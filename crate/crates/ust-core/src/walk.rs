//! Simple random walk on a sampled tree, exit times, deterministic
//! heat-kernel iteration, and effective resistance.

use std::collections::HashMap;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::metrics::{intrinsic_ball, tree_dist, ClipPolicy};
use crate::rng::RandomSource;
use crate::wilson::{SpanningTree, STEP_BUDGET};

// ---------------------------------------------------------------------------
// Random walk traces
// ---------------------------------------------------------------------------

/// How a walk ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkOutcome {
    /// Ran for the requested number of steps.
    Completed,
    /// Touched the truncation boundary (window edge or wired class) and
    /// stopped; the trace up to and including the touch is retained.
    WindowExit { at_step: usize },
}

/// Trace of a tree walk with per-edge crossing counts.
#[derive(Debug, Clone)]
pub struct WalkTrace {
    pub positions: Vec<u32>,
    /// Crossings of each tree edge, keyed by the child endpoint of the edge.
    pub crossings: HashMap<u32, u64>,
    pub outcome: WalkOutcome,
}

impl WalkTrace {
    pub fn step_count(&self) -> usize {
        self.positions.len() - 1
    }
}

#[inline]
fn pick_neighbor(t: &SpanningTree, v: u32, rng: &mut RandomSource) -> u32 {
    let kids = t.children(v);
    let deg = kids.len() as u32 + u32::from(v != t.root());
    let k = rng.next_below(deg);
    if (k as usize) < kids.len() {
        kids[k as usize]
    } else {
        t.parent(v)
    }
}

/// Runs the simple random walk on the tree: at each step the walk jumps to
/// a uniformly chosen tree neighbor. The walk is confined to the trusted
/// window; touching the truncation boundary ends the trace with a
/// [`WalkOutcome::WindowExit`].
pub fn srw_on_tree(
    t: &SpanningTree,
    start: u32,
    steps: u64,
    rng: &mut RandomSource,
) -> Result<WalkTrace> {
    if !t.contains(start) {
        return Err(Error::OutOfDomain(format!("start vertex {start} not in tree")));
    }
    let mut positions = Vec::with_capacity((steps + 1).min(1 << 22) as usize);
    positions.push(start);
    let mut crossings: HashMap<u32, u64> = HashMap::new();
    let mut v = start;
    let mut outcome = WalkOutcome::Completed;
    for step in 1..=steps {
        let u = pick_neighbor(t, v, rng);
        let child = if t.parent(u) == v { u } else { v };
        *crossings.entry(child).or_insert(0) += 1;
        positions.push(u);
        v = u;
        if t.on_truncation_boundary(v) {
            outcome = WalkOutcome::WindowExit { at_step: step as usize };
            break;
        }
    }
    Ok(WalkTrace {
        positions,
        crossings,
        outcome,
    })
}

/// Independent samples of the exit time of the walk from the intrinsic ball
/// of radius `r` around the root (strictly exceeding the closed ball), all
/// started at the root.
///
/// The ball must not be window-truncated.
pub fn exit_time_from_ball(
    t: &SpanningTree,
    r: f64,
    rng: &mut RandomSource,
    replicas: usize,
) -> Result<Vec<u64>> {
    let ball = intrinsic_ball(t, t.root(), r, ClipPolicy::Window)?;
    if ball.truncated {
        return Err(Error::Truncated(format!(
            "intrinsic ball of radius {r} is window-clipped"
        )));
    }
    let limit = r.floor() as u32;
    let mut out = Vec::with_capacity(replicas);
    for _ in 0..replicas {
        let mut v = t.root();
        let mut tau = 0u64;
        while t.depth(v) <= limit {
            v = pick_neighbor(t, v, rng);
            tau += 1;
            if tau > STEP_BUDGET {
                return Err(Error::StepBudget {
                    budget: STEP_BUDGET,
                    context: format!("exit from intrinsic ball of radius {r}"),
                });
            }
        }
        out.push(tau);
    }
    Ok(out)
}

/// Per-edge crossing counts of one walk, snapshotted at the requested step
/// counts (ascending). Reproduces the data layer of a walk-range picture.
#[derive(Debug, Clone)]
pub struct RangeSnapshot {
    pub steps: u64,
    /// (child endpoint of edge, crossings) pairs, child id ascending.
    pub edges: Vec<(u32, u64)>,
}

pub fn walk_range_profile(
    t: &SpanningTree,
    snapshot_steps: &[u64],
    rng: &mut RandomSource,
) -> Result<Vec<RangeSnapshot>> {
    if snapshot_steps.windows(2).any(|w| w[0] >= w[1]) || snapshot_steps.is_empty() {
        return Err(Error::InvalidInput(
            "snapshot step counts must be ascending and nonempty".into(),
        ));
    }
    let mut crossings: HashMap<u32, u64> = HashMap::new();
    let mut v = t.root();
    let mut out = Vec::with_capacity(snapshot_steps.len());
    let mut step = 0u64;
    for &target in snapshot_steps {
        while step < target {
            let u = pick_neighbor(t, v, rng);
            let child = if t.parent(u) == v { u } else { v };
            *crossings.entry(child).or_insert(0) += 1;
            v = u;
            step += 1;
            if t.on_truncation_boundary(v) {
                return Err(Error::Truncated(format!(
                    "range walk left the window at step {step}"
                )));
            }
        }
        let mut edges: Vec<(u32, u64)> = crossings.iter().map(|(&c, &n)| (c, n)).collect();
        edges.sort_unstable();
        out.push(RangeSnapshot { steps: target, edges });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Heat kernel iteration
// ---------------------------------------------------------------------------

/// Distribution snapshot of the lazy walk at one time.
#[derive(Debug, Clone)]
pub struct HeatKernelVector<F> {
    pub time: u64,
    pub laziness: F,
    /// Global vertex ids of the support.
    pub vertices: Vec<u32>,
    pub mass: Vec<F>,
}

impl<F: Float> HeatKernelVector<F> {
    pub fn total_mass(&self) -> F {
        self.mass.iter().fold(F::zero(), |a, &b| a + b)
    }
}

/// Result of a deterministic heat-kernel iteration.
#[derive(Debug, Clone)]
pub struct HeatKernelRun<F> {
    /// `return_prob[t]` is the mass at the start vertex at time `t`.
    pub return_prob: Vec<F>,
    pub snapshots: Vec<HeatKernelVector<F>>,
    /// Cumulative mass observed on the truncation boundary, an upper bound
    /// on the total-variation error versus the un-clipped dynamics.
    pub boundary_leak: f64,
}

/// Iterates the exact distribution of the lazy simple random walk on the
/// window-restricted component of `start`, optionally further cut at an
/// intrinsic radius.
///
/// Each step applies `p <- laziness * p + (1 - laziness) * P p` with `P`
/// the tree-walk kernel of the clipped component. Cumulative mass on the
/// clip boundary (window edge, wired class, or the support-radius rim) is
/// monitored; if it exceeds `leak_tolerance` before `tmax`, the run aborts
/// naming the first bad time, since from then on the clipped dynamics no
/// longer represents the full tree to the requested accuracy.
///
/// `support_radius` trades memory and time for a larger monitored rim: a
/// radius a few times `tmax^{1/d_w}` keeps the leak far below any useful
/// tolerance while shrinking the support from the whole window to the
/// intrinsic ball.
pub fn heat_kernel_iterate<F: Float>(
    t: &SpanningTree,
    start: u32,
    tmax: u64,
    laziness: F,
    snapshot_times: &[u64],
    leak_tolerance: f64,
    support_radius: Option<u32>,
) -> Result<HeatKernelRun<F>> {
    if !t.contains(start) {
        return Err(Error::OutOfDomain(format!("start vertex {start} not in tree")));
    }
    if laziness < F::zero() || laziness >= F::one() {
        return Err(Error::InvalidInput("laziness must lie in [0, 1)".into()));
    }
    if t.on_truncation_boundary(start) {
        return Err(Error::Truncated("start vertex on the truncation boundary".into()));
    }

    // Window component of the start vertex (cut at the support radius if
    // given), in discovery order.
    let cap = support_radius.unwrap_or(u32::MAX);
    let mut local: HashMap<u32, u32> = HashMap::new();
    let mut verts: Vec<u32> = Vec::new();
    let mut dist: Vec<u32> = Vec::new();
    local.insert(start, 0);
    verts.push(start);
    dist.push(0);
    let mut head = 0usize;
    while head < verts.len() {
        let v = verts[head];
        let d = dist[head];
        head += 1;
        if t.on_truncation_boundary(v) || d >= cap {
            continue; // rim vertices are kept but not expanded
        }
        for u in t.tree_neighbors(v) {
            if !local.contains_key(&u) {
                local.insert(u, verts.len() as u32);
                verts.push(u);
                dist.push(d + 1);
            }
        }
    }
    let n = verts.len();

    // Clipped adjacency in CSR form, with clipped degrees.
    let mut adj_start = vec![0u32; n + 1];
    for (i, &v) in verts.iter().enumerate() {
        let deg = t
            .tree_neighbors(v)
            .filter(|u| local.contains_key(u))
            .count() as u32;
        adj_start[i + 1] = adj_start[i] + deg;
    }
    let mut adj = vec![0u32; adj_start[n] as usize];
    {
        let mut cursor: Vec<u32> = adj_start[..n].to_vec();
        for (i, &v) in verts.iter().enumerate() {
            for u in t.tree_neighbors(v) {
                if let Some(&j) = local.get(&u) {
                    adj[cursor[i] as usize] = j;
                    cursor[i] += 1;
                }
            }
        }
    }
    let boundary: Vec<u32> = verts
        .iter()
        .enumerate()
        .filter(|&(i, &v)| {
            t.on_truncation_boundary(v)
                || (adj_start[i + 1] - adj_start[i]) != t.tree_degree(v)
        })
        .map(|(i, _)| i as u32)
        .collect();

    let inv_deg: Vec<F> = (0..n)
        .map(|i| {
            let d = adj_start[i + 1] - adj_start[i];
            if d == 0 {
                F::zero()
            } else {
                F::one() / F::from(d).unwrap()
            }
        })
        .collect();

    let hop = F::one() - laziness;
    let mut p = vec![F::zero(); n];
    p[0] = F::one();
    let mut q = vec![F::zero(); n];
    let mut return_prob = Vec::with_capacity(tmax as usize + 1);
    return_prob.push(F::one());
    let mut snapshots = Vec::with_capacity(snapshot_times.len());
    let mut leak = 0f64;
    let mut snap_iter = snapshot_times.iter().peekable();
    if snap_iter.peek() == Some(&&0) {
        snap_iter.next();
        snapshots.push(make_snapshot(0, laziness, &verts, &p));
    }

    let mut weighted = vec![F::zero(); n];
    for step in 1..=tmax {
        for ((w, &m), &d) in weighted.iter_mut().zip(&p).zip(&inv_deg) {
            *w = m * d;
        }
        let mut total = F::zero();
        for i in 0..n {
            let mut acc = F::zero();
            for &j in &adj[adj_start[i] as usize..adj_start[i + 1] as usize] {
                acc = acc + weighted[j as usize];
            }
            let m = laziness * p[i] + hop * acc;
            q[i] = m;
            total = total + m;
        }
        // Unit-mass drift guard; structural conservation holds, this only
        // removes accumulated rounding.
        let drift = (total - F::one()).abs();
        if drift > F::epsilon() + F::epsilon() {
            let scale = F::one() / total;
            for m in q.iter_mut() {
                *m = *m * scale;
            }
        }
        for &b in &boundary {
            leak += q[b as usize].to_f64().unwrap_or(0.0);
        }
        if leak > leak_tolerance {
            return Err(Error::Truncated(format!(
                "boundary mass exceeded {leak_tolerance:.1e} at time {step}"
            )));
        }
        std::mem::swap(&mut p, &mut q);
        return_prob.push(p[0]);
        if snap_iter.peek() == Some(&&step) {
            snap_iter.next();
            snapshots.push(make_snapshot(step, laziness, &verts, &p));
        }
    }

    Ok(HeatKernelRun {
        return_prob,
        snapshots,
        boundary_leak: leak,
    })
}

fn make_snapshot<F: Float>(
    time: u64,
    laziness: F,
    verts: &[u32],
    p: &[F],
) -> HeatKernelVector<F> {
    HeatKernelVector {
        time,
        laziness,
        vertices: verts.to_vec(),
        mass: p.to_vec(),
    }
}

// ---------------------------------------------------------------------------
// Effective resistance
// ---------------------------------------------------------------------------

/// Effective resistance between two tree vertices with unit conductances.
///
/// On a tree the current flows along the unique path, so the resistance is
/// the series sum of the unit edges: exactly the intrinsic distance. The
/// Laplacian-solve oracle in the test suite confirms the identity.
pub fn effective_resistance(t: &SpanningTree, x: u32, y: u32) -> Result<f64> {
    Ok(f64::from(tree_dist(t, x, y)?))
}
