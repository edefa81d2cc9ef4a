//! Hexagonal terrain: raster resampling, per-node steepness and aspect, and
//! the text artifact format consumed by the planner.
//!
//! Each node carries the local surface description used by the cost model:
//! steepness `alpha` (angle between the surface normal and vertical) and
//! aspect `gamma` (unit vector in the ground plane pointing downhill). Both
//! come from a least-squares plane fit over the node and its six neighbors,
//! which is exact on affine elevation fields.

use crate::error::Error;
use crate::geom::Vec2;
use crate::hex::{self, HexIndex};
use crate::raster::ElevationGrid;
use crate::Result;
use std::fmt::Write as _;

/// Per-node terrain sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexNode {
    pub elevation: f64,
    /// Steepness in radians, in `[0, pi/2)`.
    pub alpha: f64,
    /// Downhill unit vector; `(1, 0)` by convention on flat ground.
    pub gamma: Vec2,
    /// True when the node is flat and `gamma` is the conventional filler.
    pub isotropic: bool,
    pub valid: bool,
}

impl HexNode {
    fn invalid() -> Self {
        HexNode {
            elevation: 0.0,
            alpha: 0.0,
            gamma: Vec2::new(1.0, 0.0),
            isotropic: true,
            valid: false,
        }
    }
}

/// Hexagonal node lattice over a rectangular world region.
///
/// Axial indices range over an inclusive box; nodes of the box that fall
/// outside the source raster (or over nodata) are marked invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct HexTerrain {
    /// Lattice resolution: distance between neighboring nodes, meters.
    pub h: f64,
    /// World position of the lattice origin node (0, 0).
    pub offset: Vec2,
    pub i_min: i32,
    pub i_max: i32,
    pub j_min: i32,
    pub j_max: i32,
    nodes: Vec<HexNode>,
}

impl HexTerrain {
    pub fn n_i(&self) -> usize {
        (self.i_max - self.i_min + 1) as usize
    }

    pub fn n_j(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, idx: HexIndex) -> bool {
        idx.i >= self.i_min && idx.i <= self.i_max && idx.j >= self.j_min && idx.j <= self.j_max
    }

    /// Dense storage slot of a node, when inside the index box.
    pub fn slot(&self, idx: HexIndex) -> Option<usize> {
        if self.contains(idx) {
            Some((idx.j - self.j_min) as usize * self.n_i() + (idx.i - self.i_min) as usize)
        } else {
            None
        }
    }

    /// Axial index stored at a dense slot.
    pub fn index_of_slot(&self, slot: usize) -> HexIndex {
        let n_i = self.n_i();
        HexIndex::new(
            (slot % n_i) as i32 + self.i_min,
            (slot / n_i) as i32 + self.j_min,
        )
    }

    pub fn node(&self, idx: HexIndex) -> Option<&HexNode> {
        self.slot(idx).map(|s| &self.nodes[s])
    }

    pub fn node_mut(&mut self, idx: HexIndex) -> Option<&mut HexNode> {
        self.slot(idx).map(move |s| &mut self.nodes[s])
    }

    pub fn nodes(&self) -> &[HexNode] {
        &self.nodes
    }

    /// World position of a node.
    pub fn position(&self, idx: HexIndex) -> Vec2 {
        self.offset + hex::hex_position(idx, self.h)
    }

    /// Iterator over all in-box indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = HexIndex> + '_ {
        (0..self.nodes.len()).map(|s| self.index_of_slot(s))
    }

    pub fn is_valid(&self, idx: HexIndex) -> bool {
        self.node(idx).is_some_and(|n| n.valid)
    }

    /// Valid node nearest to a world position, searching outward a few rings.
    pub fn nearest_valid_node(&self, p: Vec2) -> Result<HexIndex> {
        let center = hex::nearest_node(p - self.offset, self.h);
        if self.is_valid(center) {
            return Ok(center);
        }
        for ring in 1..=3 {
            let mut best: Option<(f64, HexIndex)> = None;
            for dj in -ring..=ring {
                for di in -ring..=ring {
                    let cand = HexIndex::new(center.i + di, center.j + dj);
                    if self.is_valid(cand) {
                        let d = self.position(cand).distance(p);
                        if best.map_or(true, |(bd, bi)| d < bd || (d == bd && cand < bi)) {
                            best = Some((d, cand));
                        }
                    }
                }
            }
            if let Some((_, idx)) = best {
                return Ok(idx);
            }
        }
        Err(Error::Bounds(format!("no valid node near ({:.3}, {:.3})", p.x, p.y)))
    }

    /// Barycentric interpolation of elevation, steepness, and aspect at a
    /// world position. Invalid vertices are dropped and the weights
    /// renormalized; `None` when no valid vertex supports the point.
    pub fn interpolate(&self, p: Vec2) -> Option<TerrainSample> {
        let tri = hex::containing_triangle(p - self.offset, self.h);
        let mut w_total = 0.0;
        let mut z = 0.0;
        let mut alpha = 0.0;
        let mut gvec = Vec2::default();
        for (vtx, w) in tri.vertices.iter().zip(tri.weights) {
            if let Some(n) = self.node(*vtx) {
                if n.valid && w > 0.0 {
                    w_total += w;
                    z += w * n.elevation;
                    alpha += w * n.alpha;
                    if !n.isotropic {
                        gvec = gvec + n.gamma * w;
                    }
                }
            }
        }
        if w_total < 1e-9 {
            return None;
        }
        let alpha = alpha / w_total;
        let (gamma, isotropic) = match gvec.normalized() {
            Some(g) => (g, false),
            None => (Vec2::new(1.0, 0.0), true),
        };
        Some(TerrainSample { elevation: z / w_total, alpha, gamma, isotropic })
    }

    /// Largest steepness among valid nodes, radians.
    pub fn max_alpha(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.valid)
            .map(|n| n.alpha)
            .fold(0.0, f64::max)
    }
}

/// Interpolated terrain quantities at an arbitrary position.
#[derive(Debug, Clone, Copy)]
pub struct TerrainSample {
    pub elevation: f64,
    pub alpha: f64,
    pub gamma: Vec2,
    pub isotropic: bool,
}

/// Resample a raster onto the hexagonal lattice at resolution `h`.
///
/// The lattice covers the raster's cell-center extent; elevations come from
/// bilinear interpolation, and nodes over nodata regions or outside the
/// extent are marked invalid. Steepness and aspect are left unfilled (see
/// [`slope_fields`]).
pub fn resample_to_hex(grid: &ElevationGrid, h: f64) -> Result<HexTerrain> {
    if h < grid.cell_size {
        return Err(Error::Contract(format!(
            "hex resolution {h} must be at least the raster cell size {}",
            grid.cell_size
        )));
    }
    let (x0, y0, x1, y1) = grid.support();
    resample_region(grid, h, x0, y0, x1, y1)
}

/// Resample onto the lattice covering an explicit world rectangle.
pub fn resample_region(
    grid: &ElevationGrid,
    h: f64,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
) -> Result<HexTerrain> {
    let (sx0, sy0, sx1, sy1) = grid.support();
    let eps = 1e-9;
    if x0 < sx0 - eps || y0 < sy0 - eps || x1 > sx1 + eps || y1 > sy1 + eps {
        return Err(Error::Bounds(format!(
            "requested hex extent [{x0}, {x1}] x [{y0}, {y1}] exceeds raster extent \
             [{sx0}, {sx1}] x [{sy0}, {sy1}]"
        )));
    }
    let row_step = h * 3.0f64.sqrt() / 2.0;
    let j_max = ((y1 - y0) / row_step + eps).floor() as i32;
    let i_hi = ((x1 - x0) / h + eps).floor() as i32;
    // Row j is shifted by j/2 steps; the index box covers every row's span.
    let i_lo = -(((j_max as f64) / 2.0).ceil() as i32);
    let mut terrain = HexTerrain {
        h,
        offset: Vec2::new(x0, y0),
        i_min: i_lo,
        i_max: i_hi,
        j_min: 0,
        j_max,
        nodes: Vec::new(),
    };
    let mut nodes = Vec::with_capacity(terrain.n_i() * terrain.n_j());
    for j in 0..=j_max {
        for i in i_lo..=i_hi {
            let p = terrain.offset + hex::hex_position(HexIndex::new(i, j), h);
            let inside = p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps && p.y <= y1 + eps;
            let node = match (inside, grid.sample(p.x, p.y)) {
                (true, Some(z)) => HexNode {
                    elevation: z,
                    alpha: 0.0,
                    gamma: Vec2::new(1.0, 0.0),
                    isotropic: true,
                    valid: true,
                },
                _ => HexNode::invalid(),
            };
            nodes.push(node);
        }
    }
    terrain.nodes = nodes;
    Ok(terrain)
}

/// Fit a least-squares plane through each node and its valid neighbors and
/// fill steepness `alpha` and downhill aspect `gamma`.
///
/// Nodes with fewer than 3 valid stencil points (or a degenerate fit) are
/// marked invalid. Results do not depend on iteration order.
pub fn slope_fields(terrain: &mut HexTerrain) {
    let mut updates: Vec<(usize, HexNode)> = Vec::new();
    for slot in 0..terrain.len() {
        let idx = terrain.index_of_slot(slot);
        let node = terrain.nodes()[slot];
        if !node.valid {
            continue;
        }
        let center = terrain.position(idx);
        let mut pts: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, node.elevation)];
        for nb in hex::neighborhood(idx) {
            if let Some(n) = terrain.node(nb) {
                if n.valid {
                    let p = terrain.position(nb) - center;
                    pts.push((p.x, p.y, n.elevation));
                }
            }
        }
        let fitted = if pts.len() < 3 { None } else { fit_plane(&pts) };
        let new_node = match fitted {
            Some((a, b)) => {
                let grad = (a * a + b * b).sqrt();
                let alpha = grad.atan();
                let (gamma, isotropic) = match Vec2::new(-a, -b).normalized() {
                    Some(g) if grad > 1e-12 => (g, false),
                    _ => (Vec2::new(1.0, 0.0), true),
                };
                HexNode { elevation: node.elevation, alpha, gamma, isotropic, valid: true }
            }
            None => HexNode::invalid(),
        };
        updates.push((slot, new_node));
    }
    for (slot, node) in updates {
        terrain.nodes[slot] = node;
    }
}

/// Least-squares fit of `z = a*x + b*y + c`; returns the gradient `(a, b)`.
fn fit_plane(pts: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    let (mut sxz, mut syz) = (0.0, 0.0);
    for &(x, y, z) in pts {
        sx += x;
        sy += y;
        sz += z;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxz += x * z;
        syz += y * z;
    }
    // Normal equations for [a, b, c].
    let m = [[sxx, sxy, sx], [sxy, syy, sy], [sx, sy, n]];
    let rhs = [sxz, syz, sz];
    let det = det3(&m);
    if det.abs() < 1e-12 {
        return None;
    }
    let a = det3(&replace_col(&m, 0, &rhs)) / det;
    let b = det3(&replace_col(&m, 1, &rhs)) / det;
    Some((a, b))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn replace_col(m: &[[f64; 3]; 3], col: usize, rhs: &[f64; 3]) -> [[f64; 3]; 3] {
    let mut out = *m;
    for r in 0..3 {
        out[r][col] = rhs[r];
    }
    out
}

const ARTIFACT_MAGIC: &str = "camis-terrain v1";

/// Serialize a terrain to the versioned text artifact format.
///
/// All numbers use shortest round-trip formatting, so re-serializing a
/// parsed artifact is byte-identical.
pub fn write_artifact(terrain: &HexTerrain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{ARTIFACT_MAGIC}");
    let _ = writeln!(out, "h {}", terrain.h);
    let _ = writeln!(out, "offset {} {}", terrain.offset.x, terrain.offset.y);
    let _ = writeln!(
        out,
        "bounds {} {} {} {}",
        terrain.i_min, terrain.i_max, terrain.j_min, terrain.j_max
    );
    let _ = writeln!(out, "nodes {}", terrain.len());
    for slot in 0..terrain.len() {
        let idx = terrain.index_of_slot(slot);
        let n = &terrain.nodes()[slot];
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            idx.i,
            idx.j,
            n.elevation,
            n.alpha,
            n.gamma.x,
            n.gamma.y,
            n.isotropic as u8,
            n.valid as u8
        );
    }
    out
}

/// Parse the text artifact format.
pub fn parse_artifact(text: &str) -> Result<HexTerrain> {
    let mut lines = text.lines().enumerate();
    let fmt_err = |line: usize, msg: String| Error::Format { line: line + 1, msg };
    let (l0, magic) = lines
        .next()
        .ok_or_else(|| fmt_err(0, "empty artifact".into()))?;
    if magic.trim() != ARTIFACT_MAGIC {
        return Err(fmt_err(l0, format!("unrecognized artifact header `{magic}`")));
    }

    let mut expect = |label: &str| -> Result<(usize, Vec<String>)> {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| fmt_err(0, format!("missing `{label}` line")))?;
        let mut toks = line.split_whitespace().map(str::to_owned);
        let key = toks.next().unwrap_or_default();
        if key != label {
            return Err(fmt_err(ln, format!("expected `{label}`, found `{key}`")));
        }
        Ok((ln, toks.collect()))
    };

    let (ln, hv) = expect("h")?;
    let h: f64 = hv
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| fmt_err(ln, "bad h".into()))?;
    let (ln, off) = expect("offset")?;
    if off.len() != 2 {
        return Err(fmt_err(ln, "offset needs 2 fields".into()));
    }
    let offset = Vec2::new(
        off[0].parse().map_err(|_| fmt_err(ln, "bad offset".into()))?,
        off[1].parse().map_err(|_| fmt_err(ln, "bad offset".into()))?,
    );
    let (ln, b) = expect("bounds")?;
    if b.len() != 4 {
        return Err(fmt_err(ln, "bounds needs 4 fields".into()));
    }
    let bi: Vec<i32> = b
        .iter()
        .map(|s| s.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| fmt_err(ln, "bad bounds".into()))?;
    let (ln, nv) = expect("nodes")?;
    let count: usize = nv
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| fmt_err(ln, "bad node count".into()))?;

    let mut terrain = HexTerrain {
        h,
        offset,
        i_min: bi[0],
        i_max: bi[1],
        j_min: bi[2],
        j_max: bi[3],
        nodes: vec![HexNode::invalid(); count],
    };
    if terrain.n_i() * terrain.n_j() != count {
        return Err(Error::Data(format!(
            "node count {count} does not match bounds box {}x{}",
            terrain.n_i(),
            terrain.n_j()
        )));
    }
    let mut filled = 0usize;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 8 {
            return Err(fmt_err(ln, format!("expected 8 node fields, got {}", f.len())));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| fmt_err(ln, format!("cannot parse `{s}`")))
        };
        let idx = HexIndex::new(
            f[0].parse().map_err(|_| fmt_err(ln, "bad i".into()))?,
            f[1].parse().map_err(|_| fmt_err(ln, "bad j".into()))?,
        );
        let slot = terrain
            .slot(idx)
            .ok_or_else(|| fmt_err(ln, format!("node ({}, {}) outside bounds", idx.i, idx.j)))?;
        terrain.nodes[slot] = HexNode {
            elevation: parse(f[2])?,
            alpha: parse(f[3])?,
            gamma: Vec2::new(parse(f[4])?, parse(f[5])?),
            isotropic: f[6] == "1",
            valid: f[7] == "1",
        };
        filled += 1;
    }
    if filled != count {
        return Err(Error::Data(format!("expected {count} node lines, got {filled}")));
    }
    Ok(terrain)
}
