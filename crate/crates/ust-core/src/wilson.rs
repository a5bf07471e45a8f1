//! Loop-erased random walk and Wilson's algorithm.
//!
//! Wilson's algorithm is implemented in the forward-walk-then-erase form:
//! from each unvisited vertex, run a simple random walk until it hits the
//! current tree, keeping for every vertex the direction of its most recent
//! exit; retracing those directions from the start vertex yields exactly the
//! loop-erasure of the walk, which is attached to the tree. The stack
//! formulation is an equivalent description of the same law.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{BoxGraph, WalkGraph};
use crate::lattice::{Boundary, GridBox, Point};
use crate::rng::RandomSource;

/// Lattice steps allowed per random-walk excursion before the sampler
/// assumes a misconfiguration and aborts.
pub const STEP_BUDGET: u64 = 1_000_000_000;

/// Sentinel for unused parent slots.
pub(crate) const NO_VERTEX: u32 = u32::MAX;

// ---------------------------------------------------------------------------
// Loop erasure
// ---------------------------------------------------------------------------

/// Chronological loop erasure of a lattice walk.
///
/// Scans forward; on revisiting a point, the path is truncated back to the
/// first occurrence of that point. The result is self-avoiding, keeps the
/// endpoints, and the operation is idempotent.
pub fn loop_erase(walk: &[Point]) -> Result<Vec<Point>> {
    if walk.is_empty() {
        return Err(Error::InvalidInput("loop erasure of an empty walk".into()));
    }
    let mut pos: HashMap<Point, usize> = HashMap::with_capacity(walk.len());
    let mut out: Vec<Point> = Vec::with_capacity(walk.len().min(4096));
    for &p in walk {
        if let Some(&i) = pos.get(&p) {
            for q in out.drain(i + 1..) {
                pos.remove(&q);
            }
        } else {
            pos.insert(p, out.len());
            out.push(p);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spanning trees on lattice boxes
// ---------------------------------------------------------------------------

/// Provenance recorded with a sampled tree; echoed in snapshot headers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeMeta {
    pub seed: u64,
    pub margin: f64,
}

impl Default for TreeMeta {
    fn default() -> Self {
        TreeMeta { seed: 0, margin: 1.0 }
    }
}

/// Rooted tree on lattice points of a box, stored as a parent map.
///
/// The vertex set need not span the whole box (hand-built trees are
/// supported); trees produced by [`sample_ust`] do span it. Under the wired
/// boundary the identified boundary class appears as one extra super-vertex
/// without an embedding; every tree edge incident to it remembers the
/// boundary lattice point it crosses through.
///
/// `window_side` marks the trusted inner window `[-window_side,
/// window_side]^2`: statistics that would be affected by the box boundary
/// are flagged or refused outside it. For trees built without a margin the
/// window is the whole box.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    graph: BoxGraph,
    root: u32,
    parent: Vec<u32>,
    depth: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    live_count: usize,
    window_side: i32,
    /// Boundary crossing (raw grid id) for each edge incident to the wired
    /// super-vertex, keyed by the child endpoint of the edge. When the
    /// super-vertex is the root, its entry stores a representative point.
    wired_cross: HashMap<u32, u32>,
    meta: TreeMeta,
}

impl SpanningTree {
    /// Builds a tree from a parent map over box-graph vertex ids.
    ///
    /// `parent` must be sized `graph.slot_count()`, with `NO_VERTEX` in the
    /// slots of absent vertices and `parent[root] == root`. Validates the
    /// full invariant set: single root, acyclicity, connectivity, and the
    /// depth relation (depths are computed here).
    pub(crate) fn from_parts(
        graph: BoxGraph,
        root: u32,
        parent: Vec<u32>,
        wired_cross: HashMap<u32, u32>,
        window_side: i32,
        meta: TreeMeta,
    ) -> Result<Self> {
        if window_side < 0 || window_side > graph.side() {
            return Err(Error::InvalidInput(format!(
                "window side {window_side} outside box of side {}",
                graph.side()
            )));
        }
        let slots = graph.slot_count();
        if parent.len() != slots {
            return Err(Error::Integrity("parent map has wrong size".into()));
        }
        if parent[root as usize] != root {
            return Err(Error::Integrity("root does not map to itself".into()));
        }

        // Children in CSR form.
        let mut counts = vec![0u32; slots + 1];
        let mut live_count = 0usize;
        for v in 0..slots as u32 {
            let p = parent[v as usize];
            if p == NO_VERTEX {
                continue;
            }
            live_count += 1;
            if v != root {
                if p == v {
                    return Err(Error::Integrity(format!("second root at vertex {v}")));
                }
                if parent[p as usize] == NO_VERTEX {
                    return Err(Error::Integrity(format!("vertex {v} has a dead parent {p}")));
                }
                counts[p as usize + 1] += 1;
            }
        }
        let mut child_start = counts;
        for i in 0..slots {
            child_start[i + 1] += child_start[i];
        }
        let mut children = vec![0u32; live_count.saturating_sub(1)];
        let mut cursor = child_start.clone();
        for v in 0..slots as u32 {
            let p = parent[v as usize];
            if p == NO_VERTEX || v == root {
                continue;
            }
            children[cursor[p as usize] as usize] = v;
            cursor[p as usize] += 1;
        }

        // Depths by traversal from the root; anything unreached is either a
        // second component or a parent cycle.
        let mut depth = vec![u32::MAX; slots];
        depth[root as usize] = 0;
        let mut stack = vec![root];
        let mut reached = 1usize;
        while let Some(v) = stack.pop() {
            let d = depth[v as usize] + 1;
            let s = child_start[v as usize] as usize;
            let e = child_start[v as usize + 1] as usize;
            for &c in &children[s..e] {
                depth[c as usize] = d;
                reached += 1;
                stack.push(c);
            }
        }
        if reached != live_count {
            // Every unreached vertex has a live parent chain that never
            // touches the rooted part, so the chain must close a cycle;
            // Floyd's tortoise and hare names a vertex on it.
            let bad = (0..slots as u32)
                .find(|&v| parent[v as usize] != NO_VERTEX && depth[v as usize] == u32::MAX)
                .expect("an unreached vertex exists");
            let mut slow = bad;
            let mut fast = bad;
            loop {
                slow = parent[slow as usize];
                fast = parent[parent[fast as usize] as usize];
                if slow == fast {
                    break;
                }
            }
            let name = graph
                .point_of(slow)
                .map(|p| format!("({}, {})", p.x, p.y))
                .unwrap_or_else(|| "the wired super-vertex".into());
            return Err(Error::Integrity(format!("parent cycle through {name}")));
        }

        let tree = SpanningTree {
            graph,
            root,
            parent,
            depth,
            child_start,
            children,
            live_count,
            window_side,
            wired_cross,
            meta,
        };
        Ok(tree)
    }

    /// Hand-construction from explicit (child, parent) lattice edges.
    ///
    /// Boundary points are aliased under the wired condition; the root is
    /// given as a lattice point and must not alias the super-vertex.
    pub fn from_edges(
        grid: GridBox,
        window_side: i32,
        root: Point,
        edges: &[(Point, Point)],
    ) -> Result<Self> {
        let graph = BoxGraph::new(grid);
        let mut parent = vec![NO_VERTEX; graph.slot_count()];
        let mut wired_cross = HashMap::new();
        if !grid.contains(root) {
            return Err(Error::OutOfDomain("root outside box".into()));
        }
        let root_id = graph.id_of(root);
        parent[root_id as usize] = root_id;
        for &(c, p) in edges {
            if !grid.contains(c) || !grid.contains(p) {
                return Err(Error::OutOfDomain(format!(
                    "edge ({},{})-({},{}) leaves the box",
                    c.x, c.y, p.x, p.y
                )));
            }
            if c.dist2(p) != 1 {
                return Err(Error::InvalidInput(format!(
                    "edge ({},{})-({},{}) is not a lattice edge",
                    c.x, c.y, p.x, p.y
                )));
            }
            let cid = graph.id_of(c);
            let pid = graph.id_of(p);
            if parent[cid as usize] != NO_VERTEX {
                return Err(Error::Integrity(format!(
                    "vertex ({}, {}) assigned two parents",
                    c.x, c.y
                )));
            }
            parent[cid as usize] = pid;
            if pid == graph.wired_id() {
                wired_cross.insert(cid, graph.raw_id(p));
            }
            if cid == graph.wired_id() {
                wired_cross.insert(cid, graph.raw_id(c));
            }
        }
        Self::from_parts(graph, root_id, parent, wired_cross, window_side, TreeMeta::default())
    }

    pub fn graph(&self) -> &BoxGraph {
        &self.graph
    }

    pub fn box_side(&self) -> i32 {
        self.graph.side()
    }

    pub fn window_side(&self) -> i32 {
        self.window_side
    }

    pub fn boundary(&self) -> Boundary {
        self.graph.boundary()
    }

    pub fn meta(&self) -> TreeMeta {
        self.meta
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.live_count
    }

    pub fn edge_count(&self) -> usize {
        self.live_count - 1
    }

    /// Whether `v` is a vertex of this tree.
    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        (v as usize) < self.parent.len() && self.parent[v as usize] != NO_VERTEX
    }

    /// Parent of `v`; the root maps to itself.
    #[inline]
    pub fn parent(&self, v: u32) -> u32 {
        self.parent[v as usize]
    }

    /// Distance to the root along the tree.
    #[inline]
    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    #[inline]
    pub fn children(&self, v: u32) -> &[u32] {
        let s = self.child_start[v as usize] as usize;
        let e = self.child_start[v as usize + 1] as usize;
        &self.children[s..e]
    }

    /// Degree of `v` in the tree.
    #[inline]
    pub fn tree_degree(&self, v: u32) -> u32 {
        self.children(v).len() as u32 + u32::from(v != self.root)
    }

    /// Tree neighbors of `v`: children then parent.
    pub fn tree_neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.children(v)
            .iter()
            .copied()
            .chain((v != self.root).then(|| self.parent(v)))
    }

    /// Lattice point of `v`, `None` for the wired super-vertex.
    #[inline]
    pub fn point_of(&self, v: u32) -> Option<Point> {
        self.graph.point_of(v)
    }

    /// Vertex id of a lattice point (aliased under wired boundary).
    #[inline]
    pub fn id_of(&self, p: Point) -> u32 {
        self.graph.id_of(p)
    }

    /// Id of the wired super-vertex if this tree has one.
    pub fn wired_vertex(&self) -> Option<u32> {
        match self.boundary() {
            Boundary::Wired => Some(self.graph.wired_id()),
            Boundary::Free => None,
        }
    }

    /// Whether `v` lies strictly inside the trusted window. The wired
    /// super-vertex never does.
    #[inline]
    pub fn in_window(&self, v: u32) -> bool {
        self.point_of(v).map_or(false, |p| p.linf() <= self.window_side)
    }

    /// Whether `v` sits on the truncation boundary: the window edge or the
    /// wired super-vertex, when the retained box extends beyond the window.
    /// Trees whose window is the whole box are self-contained objects (the
    /// wired class is then an ordinary vertex) and have no truncation.
    #[inline]
    pub fn on_truncation_boundary(&self, v: u32) -> bool {
        if self.window_side >= self.box_side() {
            return false;
        }
        match self.point_of(v) {
            None => true,
            Some(p) => p.linf() >= self.window_side,
        }
    }

    /// Iterator over live vertex ids in id order.
    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.parent.len() as u32).filter(move |&v| self.parent[v as usize] != NO_VERTEX)
    }

    /// Boundary crossing point of the wired edge whose child endpoint is
    /// `v`, if that edge exists.
    pub fn wired_crossing(&self, v: u32) -> Option<Point> {
        self.wired_cross.get(&v).and_then(|&raw| {
            let g = self.graph.grid();
            let w = (2 * g.side + 1) as u32;
            Some(Point::new((raw % w) as i32 - g.side, (raw / w) as i32 - g.side))
        })
    }

    /// Tree edges as (child, parent) id pairs, in child id order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.vertices()
            .filter(move |&v| v != self.root)
            .map(move |v| (v, self.parent(v)))
    }

    /// Re-roots the tree at `new_root`, reversing parent pointers along the
    /// path to the old root and recomputing depths.
    pub fn reroot(self, new_root: u32) -> Result<Self> {
        if !self.contains(new_root) {
            return Err(Error::OutOfDomain(format!("vertex {new_root} not in tree")));
        }
        if new_root == self.root {
            return Ok(self);
        }
        let SpanningTree {
            graph,
            root: old_root,
            mut parent,
            mut wired_cross,
            window_side,
            meta,
            ..
        } = self;

        // Collect the path new_root -> old_root, then flip each edge. Edges
        // are flipped from the old-root end back, so a crossing entry keyed
        // by the wired vertex is read before it can be overwritten.
        let mut path = vec![new_root];
        let mut v = new_root;
        while v != old_root {
            v = parent[v as usize];
            path.push(v);
        }
        let wired = graph.wired_id();
        for pair in path.windows(2).rev() {
            let (a, b) = (pair[0], pair[1]); // b was parent of a
            parent[b as usize] = a;
            if a == wired {
                // Old edge wired -> b, keyed by the wired vertex.
                let c = wired_cross
                    .remove(&wired)
                    .expect("wired parent edge must have a crossing");
                wired_cross.insert(b, c);
            } else if b == wired {
                // Old edge a -> wired becomes wired -> a; the key moves.
                let c = wired_cross
                    .remove(&a)
                    .expect("edge into the wired vertex must have a crossing");
                wired_cross.insert(wired, c);
            }
        }
        parent[new_root as usize] = new_root;
        Self::from_parts(graph, new_root, parent, wired_cross, window_side, meta)
    }

    /// Checks the structural invariants explicitly (used on every sampled
    /// tree in test builds).
    pub fn validate(&self) -> Result<()> {
        let mut edges = 0usize;
        for v in self.vertices() {
            if v != self.root {
                edges += 1;
                let p = self.parent(v);
                if !self.contains(p) {
                    return Err(Error::Integrity(format!("vertex {v} has dead parent")));
                }
                if self.depth(v) != self.depth(p) + 1 {
                    return Err(Error::Integrity(format!("depth relation fails at {v}")));
                }
                // Edge geometry: endpoints are lattice neighbors, or the
                // edge crosses the wired boundary through a recorded point
                // (crossings are keyed by the child endpoint).
                match (self.point_of(v), self.point_of(p)) {
                    (Some(a), Some(b)) => {
                        if a.dist2(b) != 1 {
                            return Err(Error::Integrity(format!(
                                "edge ({},{})-({},{}) is not a lattice edge",
                                a.x, a.y, b.x, b.y
                            )));
                        }
                    }
                    _ => {
                        let cross = self.wired_crossing(v);
                        let interior = self.point_of(v).or_else(|| self.point_of(p));
                        match (cross, interior) {
                            (Some(c), Some(q)) if c.dist2(q) == 1 => {}
                            _ => {
                                return Err(Error::Integrity(format!(
                                    "wired edge at {v} lacks a valid crossing"
                                )))
                            }
                        }
                    }
                }
            } else if self.depth(v) != 0 {
                return Err(Error::Integrity("root has nonzero depth".into()));
            }
        }
        if edges + 1 != self.live_count {
            return Err(Error::Integrity(format!(
                "edge count {edges} != vertex count {} - 1",
                self.live_count
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Wilson's algorithm
// ---------------------------------------------------------------------------

/// Wilson's algorithm on an arbitrary graph, started from a set of roots.
///
/// Returns the parent map of a uniform spanning tree of the graph obtained
/// by contracting `roots` to a single vertex (each root maps to itself).
/// `order` must cover every vertex that should join the tree.
pub fn wilson_forest<G: WalkGraph>(
    g: &G,
    roots: &[u32],
    order: &[u32],
    rng: &mut RandomSource,
) -> Result<Vec<u32>> {
    if roots.is_empty() {
        return Err(Error::InvalidInput("wilson needs at least one root".into()));
    }
    let slots = g.slot_count();
    let mut parent = vec![NO_VERTEX; slots];
    let mut in_tree = vec![false; slots];
    let mut next = vec![NO_VERTEX; slots];
    for &r in roots {
        in_tree[r as usize] = true;
        parent[r as usize] = r;
    }
    for &start in order {
        if in_tree[start as usize] {
            continue;
        }
        let mut v = start;
        let mut steps = 0u64;
        while !in_tree[v as usize] {
            let n = g.random_neighbor(v, rng);
            next[v as usize] = n;
            v = n;
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(Error::StepBudget {
                    budget: STEP_BUDGET,
                    context: format!("wilson walk from vertex {start}"),
                });
            }
        }
        v = start;
        while !in_tree[v as usize] {
            in_tree[v as usize] = true;
            parent[v as usize] = next[v as usize];
            v = next[v as usize];
        }
    }
    Ok(parent)
}

/// Wilson's algorithm on a lattice box, producing a [`SpanningTree`].
///
/// `roots` must contain exactly one vertex id of the box graph (use the
/// wired super-vertex to sample the wired UST); `order` defaults to the
/// boustrophedon scan when `None`.
pub fn wilson(
    grid: GridBox,
    root: u32,
    order: Option<&[u32]>,
    rng: &mut RandomSource,
    window_side: i32,
    meta: TreeMeta,
) -> Result<SpanningTree> {
    let graph = BoxGraph::new(grid);
    if !graph.is_vertex(root) {
        return Err(Error::OutOfDomain(format!("root id {root} is not a vertex")));
    }
    let own_order;
    let order = match order {
        Some(o) => o,
        None => {
            own_order = boustrophedon_order(&graph);
            &own_order
        }
    };

    let slots = graph.slot_count();
    let wired = graph.wired_id();
    let mut parent = vec![NO_VERTEX; slots];
    let mut in_tree = vec![false; slots];
    let mut next = vec![NO_VERTEX; slots];
    let mut next_cross = vec![NO_VERTEX; slots];
    in_tree[root as usize] = true;
    parent[root as usize] = root;

    let s = grid.side;
    for &start in order {
        if in_tree[start as usize] {
            continue;
        }
        let mut id = start;
        let mut p = graph.point_of(id);
        let mut steps = 0u64;
        while !in_tree[id as usize] {
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(Error::StepBudget {
                    budget: STEP_BUDGET,
                    context: format!("wilson walk from vertex {start}"),
                });
            }
            if id == wired {
                let k = rng.next_below(graph.degree(wired));
                let (nid, cross) = graph.wired_edge(k);
                next[id as usize] = nid;
                next_cross[id as usize] = cross;
                id = nid;
                p = graph.point_of(id);
                continue;
            }
            let q0 = p.expect("interior walk state");
            let q = match grid.boundary {
                Boundary::Wired => q0.step(rng.next_direction()),
                Boundary::Free => {
                    let mut opts = [0u32; 4];
                    let mut m = 0;
                    for d in 0..4 {
                        if grid.contains(q0.step(d)) {
                            opts[m as usize] = d;
                            m += 1;
                        }
                    }
                    q0.step(opts[rng.next_below(m) as usize])
                }
            };
            if grid.boundary == Boundary::Wired && grid.on_boundary(q) {
                next[id as usize] = wired;
                next_cross[id as usize] = graph.raw_id(q);
                id = wired;
                p = None;
            } else {
                let nid = graph.raw_id(q);
                next[id as usize] = nid;
                id = nid;
                p = Some(q);
            }
        }
        // Retrace, attaching the loop-erased branch.
        let mut v = start;
        while !in_tree[v as usize] {
            in_tree[v as usize] = true;
            parent[v as usize] = next[v as usize];
            v = next[v as usize];
        }
    }

    // Crossing table from the final parent assignment. Once a vertex joins
    // the tree it is never walked from again, so its last recorded exit is
    // exactly its parent edge.
    let mut wired_cross = HashMap::new();
    if grid.boundary == Boundary::Wired {
        for v in 0..slots as u32 {
            if parent[v as usize] == NO_VERTEX || parent[v as usize] == v {
                continue;
            }
            if parent[v as usize] == wired || v == wired {
                wired_cross.insert(v, next_cross[v as usize]);
            }
        }
        if parent[wired as usize] == wired {
            // Root case: record a canonical representative for snapshots.
            wired_cross.insert(wired, graph.raw_id(Point::new(s, s)));
        }
    }

    let tree = SpanningTree::from_parts(graph, root, parent, wired_cross, window_side, meta)?;
    #[cfg(debug_assertions)]
    tree.validate()?;
    Ok(tree)
}

/// Deterministic boustrophedon scan over the live non-wired vertices.
pub fn boustrophedon_order(graph: &BoxGraph) -> Vec<u32> {
    let s = graph.side();
    let inner = match graph.boundary() {
        Boundary::Wired => s - 1,
        Boundary::Free => s,
    };
    let mut order = Vec::with_capacity(((2 * inner + 1) * (2 * inner + 1)) as usize);
    let mut left_to_right = true;
    for y in -inner..=inner {
        let xs: Box<dyn Iterator<Item = i32>> = if left_to_right {
            Box::new(-inner..=inner)
        } else {
            Box::new((-inner..=inner).rev())
        };
        for x in xs {
            order.push(graph.id_of(Point::new(x, y)));
        }
        left_to_right = !left_to_right;
    }
    order
}

/// Samples the uniform spanning tree of the box `[-m, m]^2`, `m =
/// ceil(margin * side)`, with wired boundary, re-rooted at the origin.
///
/// The inner `[-side, side]^2` window is the trusted region for
/// measurements; the full parent structure of the box is retained for path
/// queries. The margin is the finite-volume approximation knob for the
/// infinite-volume tree.
pub fn sample_ust(side: i32, margin: f64, rng: &mut RandomSource) -> Result<SpanningTree> {
    if side < 1 {
        return Err(Error::InvalidInput(format!("side must be >= 1, got {side}")));
    }
    if !(margin >= 1.0) {
        return Err(Error::InvalidInput(format!("margin must be >= 1, got {margin}")));
    }
    let box_side = (margin * f64::from(side)).ceil() as i32;
    let grid = GridBox::new(box_side, Boundary::Wired)?;
    let graph = BoxGraph::new(grid);
    let root = graph.wired_id();
    let meta = TreeMeta { seed: rng.seed(), margin };
    let tree = wilson(grid, root, None, rng, side, meta)?;
    let origin = tree.id_of(Point::ORIGIN);
    let tree = tree.reroot(origin)?;
    #[cfg(debug_assertions)]
    tree.validate()?;
    Ok(tree)
}

// ---------------------------------------------------------------------------
// Loop-erased walk to a radius
// ---------------------------------------------------------------------------

/// Runs a simple random walk from the origin until it first exits the
/// Euclidean ball of radius `margin * r`, loop-erases it on the fly, and
/// truncates the result at its own exit time of the radius-`r` ball.
///
/// The returned self-avoiding path starts at the origin and ends at its
/// first point strictly outside `B(0, r)`; its edge count samples the
/// length of the infinite loop-erased walk stopped at radius `r`, with the
/// outer radius playing the role of the paper-style truncation device.
pub fn lerw_to_radius(r: f64, margin: f64, rng: &mut RandomSource) -> Result<Vec<Point>> {
    if !(r >= 1.0) {
        return Err(Error::InvalidInput(format!("radius must be >= 1, got {r}")));
    }
    if !(margin >= 1.0) {
        return Err(Error::InvalidInput(format!("margin must be >= 1, got {margin}")));
    }
    let outer = (margin * r).ceil();
    let half = outer as i32 + 1;
    let width = (2 * half + 1) as usize;
    let origin = Point::ORIGIN;
    let outer2 = outer * outer;

    // On-line chronological erasure: the stack is the loop-erasure of the
    // walk so far; marks hold stack indices of points currently on it.
    let mut mark = vec![u32::MAX; width * width];
    let gi = |p: Point| -> usize { ((p.y + half) as usize) * width + (p.x + half) as usize };
    let mut stack = vec![origin];
    mark[gi(origin)] = 0;

    let mut p = origin;
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps > STEP_BUDGET {
            return Err(Error::StepBudget {
                budget: STEP_BUDGET,
                context: format!("loop-erased walk to radius {r}"),
            });
        }
        p = crate::lattice::srw_step(p, rng);
        let idx = gi(p);
        if mark[idx] != u32::MAX {
            let keep = mark[idx] as usize + 1;
            for q in stack.drain(keep..) {
                mark[gi(q)] = u32::MAX;
            }
        } else {
            mark[idx] = stack.len() as u32;
            stack.push(p);
        }
        if p.dist2(origin) as f64 > outer2 {
            break;
        }
    }

    let exit = crate::lattice::exit_time(&stack, origin, r)
        .expect("the walk exited the outer ball, so the erasure exits the inner one");
    stack.truncate(exit + 1);
    Ok(stack)
}

/// Canonical undirected edge list of a parent map (for histogramming
/// sampled trees).
pub fn tree_edge_key(parent: &[u32]) -> Vec<(u32, u32)> {
    let mut edges: Vec<(u32, u32)> = parent
        .iter()
        .enumerate()
        .filter(|&(v, &p)| p != NO_VERTEX && p != v as u32)
        .map(|(v, &p)| (p.min(v as u32), p.max(v as u32)))
        .collect();
    edges.sort_unstable();
    edges
}
