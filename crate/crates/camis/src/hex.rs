//! Regular hexagonal lattice: axial indexing, neighborhoods, and point location.
//!
//! Nodes are addressed by axial coordinates `(i, j)`. With resolution `h`
//! (the distance between any node and each of its six neighbors), the node
//! position in the plane is
//!
//! ```text
//! x = h * (i + j/2),    y = h * (sqrt(3)/2) * j
//! ```
//!
//! so every row `j` is shifted half a step relative to the row below and the
//! lattice tiles the plane with equilateral triangles of side `h`.

use crate::geom::Vec2;
use serde::{Deserialize, Serialize};

/// Axial coordinates of a hexagonal-grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HexIndex {
    pub i: i32,
    pub j: i32,
}

impl HexIndex {
    pub const fn new(i: i32, j: i32) -> Self {
        HexIndex { i, j }
    }
}

/// Axial offsets of the six neighbors, in the fixed order
/// `(+1,0), (0,+1), (-1,+1), (-1,0), (0,-1), (+1,-1)`.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// The six neighbors of `idx`, in the fixed order of [`NEIGHBOR_OFFSETS`].
///
/// Out-of-bounds filtering is the caller's concern.
pub fn neighborhood(idx: HexIndex) -> [HexIndex; 6] {
    NEIGHBOR_OFFSETS.map(|(di, dj)| HexIndex::new(idx.i + di, idx.j + dj))
}

/// Plane position of a node for resolution `h`.
pub fn hex_position(idx: HexIndex, h: f64) -> Vec2 {
    debug_assert!(h > 0.0);
    Vec2::new(
        h * (idx.i as f64 + 0.5 * idx.j as f64),
        h * (3.0f64.sqrt() / 2.0) * idx.j as f64,
    )
}

/// Fractional axial coordinates of an arbitrary plane point.
pub fn axial_coords(p: Vec2, h: f64) -> (f64, f64) {
    let jf = p.y / (h * 3.0f64.sqrt() / 2.0);
    let ifr = p.x / h - 0.5 * jf;
    (ifr, jf)
}

/// Node whose position is nearest to `p` (by rounding in axial space and
/// checking the surrounding candidates).
pub fn nearest_node(p: Vec2, h: f64) -> HexIndex {
    let (ifr, jf) = axial_coords(p, h);
    let (i0, j0) = (ifr.floor() as i32, jf.floor() as i32);
    let mut best = HexIndex::new(i0, j0);
    let mut best_d = f64::INFINITY;
    for dj in 0..=1 {
        for di in 0..=1 {
            let cand = HexIndex::new(i0 + di, j0 + dj);
            let d = hex_position(cand, h).distance(p);
            if d < best_d {
                best_d = d;
                best = cand;
            }
        }
    }
    best
}

/// A lattice triangle containing a query point, with barycentric weights.
///
/// The triangular faces of the lattice come in two orientations per axial
/// unit cell: `(i,j), (i+1,j), (i,j+1)` (lower) and
/// `(i+1,j), (i,j+1), (i+1,j+1)` (upper).
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub vertices: [HexIndex; 3],
    pub weights: [f64; 3],
}

/// Locate the lattice triangle containing `p` and compute barycentric weights.
///
/// Weights are non-negative and sum to one (up to rounding); points on an
/// edge are assigned consistently to one of the adjacent triangles.
pub fn containing_triangle(p: Vec2, h: f64) -> Triangle {
    let (ifr, jf) = axial_coords(p, h);
    let (i0, j0) = (ifr.floor() as i32, jf.floor() as i32);
    let (u, v) = (ifr - i0 as f64, jf - j0 as f64);
    let vertices = if u + v <= 1.0 {
        [
            HexIndex::new(i0, j0),
            HexIndex::new(i0 + 1, j0),
            HexIndex::new(i0, j0 + 1),
        ]
    } else {
        [
            HexIndex::new(i0 + 1, j0),
            HexIndex::new(i0, j0 + 1),
            HexIndex::new(i0 + 1, j0 + 1),
        ]
    };
    // Barycentric weights in axial space equal those in the plane because the
    // axial map is affine.
    let weights = if u + v <= 1.0 {
        [1.0 - u - v, u, v]
    } else {
        [1.0 - v, 1.0 - u, u + v - 1.0]
    };
    Triangle { vertices, weights }
}
