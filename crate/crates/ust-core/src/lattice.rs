//! Square-lattice geometry: points, boxes, boundary conditions, and the raw
//! simple random walk.
//!
//! Euclidean balls follow the closed-ball convention `B(x, r) = {y : d(x, y)
//! <= r}`, and "exit" always means strict exceedance of the radius. Distance
//! comparisons against a radius are made on squared values, so membership
//! tests are exact whenever `r * r` is exactly representable.

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Lattice point of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

/// The four unit steps, in the fixed order +x, -x, +y, -y.
pub const STEPS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance, exact in integer arithmetic.
    #[inline]
    pub fn dist2(self, other: Point) -> u64 {
        let dx = i64::from(self.x) - i64::from(other.x);
        let dy = i64::from(self.y) - i64::from(other.y);
        (dx * dx + dy * dy) as u64
    }

    /// Euclidean distance.
    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self.dist2(other) as f64).sqrt()
    }

    /// Chebyshev distance from the origin, `max(|x|, |y|)`.
    #[inline]
    pub fn linf(self) -> i32 {
        self.x.abs().max(self.y.abs())
    }

    /// The neighbor one unit step in direction `dir` (an index into
    /// [`STEPS`]).
    #[inline]
    pub fn step(self, dir: u32) -> Point {
        let (dx, dy) = STEPS[dir as usize];
        Point {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    /// Whether the squared distance to `center` exceeds `radius` (strict
    /// closed-ball exit test).
    #[inline]
    pub fn outside_ball(self, center: Point, radius: f64) -> bool {
        self.dist2(center) as f64 > radius * radius
    }
}

/// Boundary condition of a finite box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// All boundary vertices are identified into one super-vertex.
    Wired,
    /// Boundary vertices are ordinary vertices of reduced degree.
    Free,
}

impl Boundary {
    pub fn label(self) -> &'static str {
        match self {
            Boundary::Wired => "wired",
            Boundary::Free => "free",
        }
    }
}

/// The box `[-side, side]^2` of the square lattice with a boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBox {
    pub side: i32,
    pub boundary: Boundary,
}

impl GridBox {
    pub fn new(side: i32, boundary: Boundary) -> Result<Self> {
        if side < 1 {
            return Err(Error::InvalidInput(format!("box side must be >= 1, got {side}")));
        }
        Ok(GridBox { side, boundary })
    }

    /// Whether `p` lies in the box closure.
    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        p.linf() <= self.side
    }

    /// Whether `p` is a boundary point of the box.
    #[inline]
    pub fn on_boundary(&self, p: Point) -> bool {
        p.linf() == self.side
    }

    /// Number of lattice points in the box closure.
    pub fn point_count(&self) -> usize {
        let w = 2 * self.side as usize + 1;
        w * w
    }

    /// Lattice neighbors of `v` inside the box closure, in step order.
    ///
    /// Under the wired boundary all boundary points belong to the same
    /// aliased root class; the points returned here are still the raw
    /// lattice points, and identification happens at the vertex-id level
    /// (see [`crate::graph::BoxGraph`]).
    pub fn neighbors(&self, v: Point) -> Result<Vec<Point>> {
        if !self.contains(v) {
            return Err(Error::OutOfDomain(format!(
                "({}, {}) outside box of side {}",
                v.x, v.y, self.side
            )));
        }
        Ok((0..4)
            .map(|d| v.step(d))
            .filter(|p| self.contains(*p))
            .collect())
    }
}

/// One step of the simple random walk on the full lattice.
///
/// Returns one of the four neighbors of `v` with probability 1/4 each and
/// consumes exactly one random word.
#[inline]
pub fn srw_step(v: Point, rng: &mut RandomSource) -> Point {
    v.step(rng.next_direction())
}

/// First index of `path` strictly outside the closed Euclidean ball
/// `B(center, radius)`, or `None` if the path never exits (the caller is
/// expected to extend the walk).
pub fn exit_time(path: &[Point], center: Point, radius: f64) -> Option<usize> {
    let r2 = radius * radius;
    path.iter().position(|p| p.dist2(center) as f64 > r2)
}
