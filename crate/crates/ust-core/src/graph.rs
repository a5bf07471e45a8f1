//! Graph views used by the tree sampler: small explicit graphs for oracles
//! and tests, and the lattice box graph with wired or free boundary.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, GridBox, Point};
use crate::rng::RandomSource;

/// Minimal interface the random-walk tree sampler needs.
pub trait WalkGraph {
    /// Upper bound (exclusive) on vertex ids; dense per-vertex arrays are
    /// sized by this. Ids below the bound need not all be live vertices.
    fn slot_count(&self) -> usize;

    /// Degree of `v`, counting edge multiplicities.
    fn degree(&self, v: u32) -> u32;

    /// The `k`-th neighbor of `v`, `k < degree(v)`.
    fn neighbor(&self, v: u32, k: u32) -> u32;

    /// Uniform random neighbor of `v`.
    #[inline]
    fn random_neighbor(&self, v: u32, rng: &mut RandomSource) -> u32 {
        self.neighbor(v, rng.next_below(self.degree(v)))
    }
}

/// Explicit adjacency-list multigraph on vertices `0..n`.
///
/// Used for distributional oracles (spanning-tree counting, uniformity
/// tests) on instances small enough to enumerate.
#[derive(Debug, Clone)]
pub struct SmallGraph {
    adj: Vec<Vec<u32>>,
}

impl SmallGraph {
    pub fn new(n: usize) -> Self {
        SmallGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        assert!(
            (u as usize) < self.adj.len() && (v as usize) < self.adj.len(),
            "edge endpoint out of range"
        );
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    /// The `rows x cols` grid graph, vertex `(r, c)` at id `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = SmallGraph::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = (r * cols + c) as u32;
                if c + 1 < cols {
                    g.add_edge(v, v + 1);
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols as u32);
                }
            }
        }
        g
    }

    /// Path graph on `n` vertices.
    pub fn path(n: usize) -> Self {
        let mut g = SmallGraph::new(n);
        for v in 0..n.saturating_sub(1) {
            g.add_edge(v as u32, v as u32 + 1);
        }
        g
    }

    /// Cycle graph on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        let mut g = SmallGraph::path(n);
        g.add_edge(n as u32 - 1, 0);
        g
    }
}

impl WalkGraph for SmallGraph {
    fn slot_count(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: u32) -> u32 {
        self.adj[v as usize].len() as u32
    }

    fn neighbor(&self, v: u32, k: u32) -> u32 {
        self.adj[v as usize][k as usize]
    }
}

/// Vertex-id view of a [`GridBox`].
///
/// Ids are assigned on the full `(2 side + 1)^2` grid in row-major order.
/// Under the wired boundary every boundary point aliases the single
/// super-vertex [`BoxGraph::wired_id`]; the boundary points' own grid slots
/// are then unused (the super-vertex keeps parallel edges, one per boundary
/// crossing, which is what makes the walk law on the contracted multigraph
/// correct).
#[derive(Debug, Clone)]
pub struct BoxGraph {
    grid: GridBox,
    width: u32,
    /// Wired-boundary edges as (interior endpoint id, boundary crossing
    /// raw id), with multiplicity. Boundary-boundary edges contract to
    /// self-loops and are dropped.
    wired_adj: Vec<(u32, u32)>,
}

impl BoxGraph {
    pub fn new(grid: GridBox) -> Self {
        let width = (2 * grid.side + 1) as u32;
        let mut wired_adj = Vec::new();
        if grid.boundary == Boundary::Wired {
            let s = grid.side;
            for x in -s..=s {
                for y in -s..=s {
                    let p = Point::new(x, y);
                    if !grid.on_boundary(p) {
                        continue;
                    }
                    let raw = ((p.y + s) as u32) * width + (p.x + s) as u32;
                    for d in 0..4 {
                        let q = p.step(d);
                        if grid.contains(q) && !grid.on_boundary(q) {
                            let qid = ((q.y + s) as u32) * width + (q.x + s) as u32;
                            wired_adj.push((qid, raw));
                        }
                    }
                }
            }
        }
        BoxGraph {
            grid,
            width,
            wired_adj,
        }
    }

    /// The `k`-th edge of the wired super-vertex as (interior endpoint,
    /// boundary crossing raw id).
    pub fn wired_edge(&self, k: u32) -> (u32, u32) {
        self.wired_adj[k as usize]
    }

    pub fn grid(&self) -> GridBox {
        self.grid
    }

    pub fn side(&self) -> i32 {
        self.grid.side
    }

    pub fn boundary(&self) -> Boundary {
        self.grid.boundary
    }

    /// Id of the wired super-vertex (only meaningful under wired boundary).
    pub fn wired_id(&self) -> u32 {
        self.width * self.width
    }

    /// Id of a lattice point, with wired aliasing applied.
    #[inline]
    pub fn id_of(&self, p: Point) -> u32 {
        if self.grid.boundary == Boundary::Wired && self.grid.on_boundary(p) {
            return self.wired_id();
        }
        self.raw_id(p)
    }

    /// Id of a lattice point without aliasing (boundary points keep their
    /// grid slot). Used by the snapshot format to name wired crossings.
    #[inline]
    pub fn raw_id(&self, p: Point) -> u32 {
        debug_assert!(self.grid.contains(p));
        ((p.y + self.grid.side) as u32) * self.width + (p.x + self.grid.side) as u32
    }

    /// Lattice point of an id; `None` for the wired super-vertex.
    #[inline]
    pub fn point_of(&self, id: u32) -> Option<Point> {
        if id == self.wired_id() {
            return None;
        }
        let s = self.grid.side;
        Some(Point::new(
            (id % self.width) as i32 - s,
            (id / self.width) as i32 - s,
        ))
    }

    /// Whether `id` is a live vertex of the graph (interior point, free
    /// boundary point, or the wired super-vertex).
    pub fn is_vertex(&self, id: u32) -> bool {
        match self.grid.boundary {
            Boundary::Free => id < self.wired_id(),
            Boundary::Wired => {
                if id == self.wired_id() {
                    true
                } else {
                    self.point_of(id).map_or(false, |p| !self.grid.on_boundary(p))
                }
            }
        }
    }

    /// Iterator over live vertex ids in row-major order (wired super-vertex
    /// last).
    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        let wired = self.grid.boundary == Boundary::Wired;
        let max = self.wired_id();
        (0..max)
            .filter(move |&id| self.is_vertex(id))
            .chain(wired.then_some(max))
    }

    /// Number of live vertices.
    pub fn vertex_count(&self) -> usize {
        let w = self.width as usize;
        match self.grid.boundary {
            Boundary::Free => w * w,
            Boundary::Wired => (w - 2) * (w - 2) + 1,
        }
    }
}

impl WalkGraph for BoxGraph {
    fn slot_count(&self) -> usize {
        self.wired_id() as usize + 1
    }

    fn degree(&self, v: u32) -> u32 {
        if v == self.wired_id() {
            return self.wired_adj.len() as u32;
        }
        let p = self.point_of(v).expect("interior id");
        match self.grid.boundary {
            // Interior points always have all four moves inside the closure.
            Boundary::Wired => 4,
            Boundary::Free => (0..4).filter(|&d| self.grid.contains(p.step(d))).count() as u32,
        }
    }

    fn neighbor(&self, v: u32, k: u32) -> u32 {
        if v == self.wired_id() {
            return self.wired_adj[k as usize].0;
        }
        let p = self.point_of(v).expect("interior id");
        match self.grid.boundary {
            Boundary::Wired => self.id_of(p.step(k)),
            Boundary::Free => {
                let mut seen = 0;
                for d in 0..4 {
                    let q = p.step(d);
                    if self.grid.contains(q) {
                        if seen == k {
                            return self.raw_id(q);
                        }
                        seen += 1;
                    }
                }
                unreachable!("neighbor index out of range")
            }
        }
    }
}

/// Exact number of spanning trees of `g` via a determinant of the reduced
/// Laplacian, computed with fraction-free (Bareiss) elimination over big
/// integers. Edge multiplicities are respected; disconnected graphs give 0.
///
/// Capped at 25 vertices; this exists as a verification oracle, not a
/// production counter.
pub fn count_spanning_trees(g: &SmallGraph) -> Result<BigUint> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidInput("empty graph".into()));
    }
    if n > 25 {
        return Err(Error::Capacity(format!(
            "spanning-tree counting capped at 25 vertices, got {n}"
        )));
    }
    if n == 1 {
        return Ok(BigUint::one());
    }

    // Reduced Laplacian: drop row/column 0.
    let m = n - 1;
    let mut a = vec![vec![BigInt::zero(); m]; m];
    for v in 1..n {
        a[v - 1][v - 1] = BigInt::from(g.neighbors(v as u32).len());
        for &u in g.neighbors(v as u32) {
            if u as usize >= 1 {
                a[v - 1][u as usize - 1] -= BigInt::one();
            }
        }
    }

    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..m {
        if a[k][k].is_zero() {
            match (k + 1..m).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigUint::zero()),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev; // exact by Bareiss
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }

    let det = if sign < 0 { -a[m - 1][m - 1].clone() } else { a[m - 1][m - 1].clone() };
    debug_assert!(!det.is_negative(), "reduced Laplacian determinant negative");
    Ok(det.magnitude().clone())
}
