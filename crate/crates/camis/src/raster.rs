//! Square elevation rasters: ESRI ASCII grid and CSV lattice ingestion,
//! mean-filter smoothing, and bilinear sampling.
//!
//! Values are stored row-major from the southern row upward, so the world
//! y-coordinate increases with the row index. The ASCII grid format lists the
//! northern row first; the parser and writer perform the flip.

use crate::error::Error;
use crate::Result;
use std::fmt::Write as _;
use std::path::Path;

/// Input raster formats understood by [`load_elevation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    /// ESRI ASCII grid (`ncols`/`nrows`/... header followed by rows).
    AsciiGrid,
    /// `x,y,z` triples on a complete regular lattice.
    Csv,
}

/// A square raster of elevations with cell size and nodata handling.
///
/// `origin_x`/`origin_y` locate the lower-left corner of the lower-left
/// cell; cell `(col, row)` is centered at
/// `(origin_x + (col + 0.5) * cell_size, origin_y + (row + 0.5) * cell_size)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationGrid {
    pub n_cols: usize,
    pub n_rows: usize,
    pub cell_size: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub nodata: f64,
    /// Row-major from the southern row; length `n_cols * n_rows`.
    pub values: Vec<f64>,
}

impl ElevationGrid {
    /// Build a grid from south-up row-major values, validating invariants.
    pub fn new(
        n_cols: usize,
        n_rows: usize,
        cell_size: f64,
        origin_x: f64,
        origin_y: f64,
        nodata: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_cols < 2 || n_rows < 2 {
            return Err(Error::Data(format!(
                "grid must be at least 2x2, got {n_cols}x{n_rows}"
            )));
        }
        if !(cell_size > 0.0) {
            return Err(Error::Data(format!("cell size must be positive, got {cell_size}")));
        }
        if values.len() != n_cols * n_rows {
            return Err(Error::Data(format!(
                "expected {} values, got {}",
                n_cols * n_rows,
                values.len()
            )));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() && v != nodata {
                return Err(Error::Data(format!("non-finite elevation at value index {k}")));
            }
        }
        Ok(ElevationGrid { n_cols, n_rows, cell_size, origin_x, origin_y, nodata, values })
    }

    /// Synthesize a grid by evaluating `f(x, y)` at every cell center.
    pub fn from_fn(
        n_cols: usize,
        n_rows: usize,
        cell_size: f64,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(n_cols * n_rows);
        for row in 0..n_rows {
            for col in 0..n_cols {
                let x = (col as f64 + 0.5) * cell_size;
                let y = (row as f64 + 0.5) * cell_size;
                values.push(f(x, y));
            }
        }
        ElevationGrid {
            n_cols,
            n_rows,
            cell_size,
            origin_x: 0.0,
            origin_y: 0.0,
            nodata: -9999.0,
            values,
        }
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata
    }

    /// Value at `(col, row)` counted from the south row; `None` for nodata.
    pub fn value(&self, col: usize, row: usize) -> Option<f64> {
        let v = self.values[row * self.n_cols + col];
        if self.is_nodata(v) {
            None
        } else {
            Some(v)
        }
    }

    /// World position of the center of cell `(col, row)`.
    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        (
            self.origin_x + (col as f64 + 0.5) * self.cell_size,
            self.origin_y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    /// Extent of the cell-center lattice: `(x_min, y_min, x_max, y_max)`.
    pub fn support(&self) -> (f64, f64, f64, f64) {
        let (x0, y0) = self.cell_center(0, 0);
        let (x1, y1) = self.cell_center(self.n_cols - 1, self.n_rows - 1);
        (x0, y0, x1, y1)
    }

    /// Bilinear interpolation at a world position over cell centers.
    ///
    /// Returns `None` when the point lies outside the cell-center extent or
    /// any of the four surrounding samples is nodata.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        let gx = (x - self.origin_x) / self.cell_size - 0.5;
        let gy = (y - self.origin_y) / self.cell_size - 0.5;
        let eps = 1e-9;
        if gx < -eps || gy < -eps || gx > (self.n_cols - 1) as f64 + eps || gy > (self.n_rows - 1) as f64 + eps {
            return None;
        }
        let gx = gx.clamp(0.0, (self.n_cols - 1) as f64);
        let gy = gy.clamp(0.0, (self.n_rows - 1) as f64);
        let c0 = (gx.floor() as usize).min(self.n_cols - 2);
        let r0 = (gy.floor() as usize).min(self.n_rows - 2);
        let fx = gx - c0 as f64;
        let fy = gy - r0 as f64;
        let z00 = self.value(c0, r0)?;
        let z10 = self.value(c0 + 1, r0)?;
        let z01 = self.value(c0, r0 + 1)?;
        let z11 = self.value(c0 + 1, r0 + 1)?;
        Some(
            z00 * (1.0 - fx) * (1.0 - fy)
                + z10 * fx * (1.0 - fy)
                + z01 * (1.0 - fx) * fy
                + z11 * fx * fy,
        )
    }
}

/// Load an elevation raster from a file in the given format.
pub fn load_elevation(path: &Path, format: RasterFormat) -> Result<ElevationGrid> {
    let text = std::fs::read_to_string(path)?;
    match format {
        RasterFormat::AsciiGrid => parse_ascii_grid(&text),
        RasterFormat::Csv => parse_csv(&text),
    }
}

/// Parse an ESRI ASCII grid.
///
/// Header keys are matched case-insensitively. `ncols`, `nrows` and
/// `cellsize` are required; `xllcorner`/`yllcorner` default to 0 and
/// `NODATA_value` to -9999 when absent.
pub fn parse_ascii_grid(text: &str) -> Result<ElevationGrid> {
    let mut n_cols = None;
    let mut n_rows = None;
    let mut cell_size = None;
    let mut origin_x = 0.0;
    let mut origin_y = 0.0;
    let mut nodata = -9999.0;

    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(lineno, line)) = lines.peek() {
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else {
            lines.next();
            continue; // blank line
        };
        if key.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            let value = tokens.next().ok_or_else(|| Error::Format {
                line: lineno + 1,
                msg: format!("header key `{key}` has no value"),
            })?;
            let parse_f = |v: &str| -> Result<f64> {
                v.parse::<f64>().map_err(|_| Error::Format {
                    line: lineno + 1,
                    msg: format!("cannot parse `{v}` as a number"),
                })
            };
            let parse_n = |v: &str| -> Result<usize> {
                v.parse::<usize>().map_err(|_| Error::Format {
                    line: lineno + 1,
                    msg: format!("cannot parse `{v}` as a count"),
                })
            };
            match key.to_ascii_lowercase().as_str() {
                "ncols" => n_cols = Some(parse_n(value)?),
                "nrows" => n_rows = Some(parse_n(value)?),
                "xllcorner" => origin_x = parse_f(value)?,
                "yllcorner" => origin_y = parse_f(value)?,
                "cellsize" => cell_size = Some(parse_f(value)?),
                "nodata_value" => nodata = parse_f(value)?,
                other => {
                    return Err(Error::Format {
                        line: lineno + 1,
                        msg: format!("unknown header key `{other}`"),
                    })
                }
            }
            lines.next();
        } else {
            break; // first data row
        }
    }

    let n_cols = n_cols.ok_or_else(|| Error::Format { line: 1, msg: "missing ncols".into() })?;
    let n_rows = n_rows.ok_or_else(|| Error::Format { line: 1, msg: "missing nrows".into() })?;
    let cell_size =
        cell_size.ok_or_else(|| Error::Format { line: 1, msg: "missing cellsize".into() })?;

    let mut values = Vec::with_capacity(n_cols * n_rows);
    let mut last_line = 0;
    for (lineno, line) in lines {
        last_line = lineno + 1;
        for token in line.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| Error::Format {
                line: lineno + 1,
                msg: format!("cannot parse `{token}` as an elevation"),
            })?;
            values.push(v);
            if values.len() > n_cols * n_rows {
                return Err(Error::Format {
                    line: lineno + 1,
                    msg: format!("expected {} values, got more", n_cols * n_rows),
                });
            }
        }
    }
    if values.len() != n_cols * n_rows {
        return Err(Error::Format {
            line: last_line,
            msg: format!("expected {} values, got {}", n_cols * n_rows, values.len()),
        });
    }

    // File order is north row first; flip to south-up storage.
    let mut south_up = vec![0.0; values.len()];
    for file_row in 0..n_rows {
        let row = n_rows - 1 - file_row;
        south_up[row * n_cols..(row + 1) * n_cols]
            .copy_from_slice(&values[file_row * n_cols..(file_row + 1) * n_cols]);
    }
    ElevationGrid::new(n_cols, n_rows, cell_size, origin_x, origin_y, nodata, south_up)
}

/// Serialize a grid as an ESRI ASCII grid string.
///
/// Numbers are printed with shortest round-trip formatting, so
/// `parse_ascii_grid(write_ascii_grid(g))` reproduces `g` bit-exactly and
/// re-serializing yields byte-identical output.
pub fn write_ascii_grid(grid: &ElevationGrid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", grid.n_cols);
    let _ = writeln!(out, "nrows {}", grid.n_rows);
    let _ = writeln!(out, "xllcorner {}", grid.origin_x);
    let _ = writeln!(out, "yllcorner {}", grid.origin_y);
    let _ = writeln!(out, "cellsize {}", grid.cell_size);
    let _ = writeln!(out, "NODATA_value {}", grid.nodata);
    for file_row in 0..grid.n_rows {
        let row = grid.n_rows - 1 - file_row;
        let slice = &grid.values[row * grid.n_cols..(row + 1) * grid.n_cols];
        let mut first = true;
        for v in slice {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Parse `x,y,z` triples forming a complete regular lattice.
///
/// An optional `x,y,z` header line is accepted. Row/column spacing must be
/// uniform and equal in both axes, and every lattice site must appear
/// exactly once.
pub fn parse_csv(text: &str) -> Result<ElevationGrid> {
    let mut points: Vec<(f64, f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.to_ascii_lowercase().replace(' ', "") == "x,y,z" {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Format {
                line: lineno + 1,
                msg: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        let mut nums = [0.0; 3];
        for (k, f) in fields.iter().enumerate() {
            nums[k] = f.parse().map_err(|_| Error::Format {
                line: lineno + 1,
                msg: format!("cannot parse `{f}` as a number"),
            })?;
        }
        if !nums.iter().all(|v| v.is_finite()) {
            return Err(Error::Data(format!("non-finite value at line {}", lineno + 1)));
        }
        points.push((nums[0], nums[1], nums[2]));
    }
    if points.is_empty() {
        return Err(Error::Format { line: 1, msg: "no data rows".into() });
    }

    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let n_cols = xs.len();
    let n_rows = ys.len();
    if n_cols < 2 || n_rows < 2 {
        return Err(Error::Data(format!("lattice must be at least 2x2, got {n_cols}x{n_rows}")));
    }
    let step = xs[1] - xs[0];
    let check_progression = |vals: &[f64], axis: &str| -> Result<()> {
        for w in vals.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::Data(format!(
                    "irregular {axis} spacing: {} vs {}",
                    w[1] - w[0],
                    step
                )));
            }
        }
        Ok(())
    };
    check_progression(&xs, "x")?;
    check_progression(&ys, "y")?;

    let col_of = |x: f64| ((x - xs[0]) / step).round() as usize;
    let row_of = |y: f64| ((y - ys[0]) / step).round() as usize;
    let mut values = vec![f64::NAN; n_cols * n_rows];
    let mut seen = vec![false; n_cols * n_rows];
    for &(x, y, z) in &points {
        let (c, r) = (col_of(x), row_of(y));
        let k = r * n_cols + c;
        if seen[k] {
            return Err(Error::Data(format!("duplicate lattice site at ({x}, {y})")));
        }
        seen[k] = true;
        values[k] = z;
    }
    if let Some(k) = seen.iter().position(|&s| !s) {
        let (r, c) = (k / n_cols, k % n_cols);
        return Err(Error::Data(format!(
            "incomplete lattice: missing site at ({}, {})",
            xs[c], ys[r]
        )));
    }

    // Cell centers sit on the sample points: shift the origin back half a cell.
    ElevationGrid::new(
        n_cols,
        n_rows,
        step,
        xs[0] - 0.5 * step,
        ys[0] - 0.5 * step,
        -9999.0,
        values,
    )
}

/// Replace each cell by the mean of non-nodata cells within the square
/// window of the given radius. Radius 0 is the identity; windows containing
/// only nodata keep nodata.
pub fn smooth(grid: &ElevationGrid, window_radius: usize) -> ElevationGrid {
    if window_radius == 0 {
        return grid.clone();
    }
    let r = window_radius as isize;
    let (nc, nr) = (grid.n_cols as isize, grid.n_rows as isize);
    let mut values = Vec::with_capacity(grid.values.len());
    for row in 0..nr {
        for col in 0..nc {
            let mut sum = 0.0;
            let mut count = 0usize;
            for dr in -r..=r {
                for dc in -r..=r {
                    let (c, rw) = (col + dc, row + dr);
                    if c < 0 || rw < 0 || c >= nc || rw >= nr {
                        continue;
                    }
                    if let Some(v) = grid.value(c as usize, rw as usize) {
                        sum += v;
                        count += 1;
                    }
                }
            }
            values.push(if count == 0 { grid.nodata } else { sum / count as f64 });
        }
    }
    ElevationGrid { values, ..grid.clone() }
}
