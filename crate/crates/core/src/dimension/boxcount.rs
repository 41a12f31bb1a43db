//! Counting of `delta`-mesh cells.
//!
//! Cells are half-open, `[i d, (i+1) d) x [j d, (j+1) d)`, anchored at the
//! origin. A coordinate lying exactly on the upper edge of the occupied
//! range belongs to the cell below it, so a segment `[0, 1]` meets exactly
//! `1 / d` cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::surface::HeightField;

pub const MESH_CONVENTION: &str =
    "half-open cells anchored at the origin; upper edge of the occupied range closed";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub delta: f64,
    pub count: u64,
}

/// Counts at a decreasing sequence of mesh sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountSeries {
    pub entries: Vec<BoxCount>,
    pub convention: String,
}

impl BoxCountSeries {
    pub fn new(entries: Vec<BoxCount>) -> Result<Self> {
        if let Some(w) = entries.windows(2).find(|w| w[1].delta >= w[0].delta) {
            return Err(Error::BoxCount(format!(
                "mesh sizes must strictly decrease ({} then {})",
                w[0].delta, w[1].delta
            )));
        }
        if let Some(e) = entries.iter().find(|e| !(e.delta > 0.0) || e.count == 0) {
            return Err(Error::BoxCount(format!(
                "invalid entry: delta {} count {}",
                e.delta, e.count
            )));
        }
        if let Some(w) = entries.windows(2).find(|w| w[1].count < w[0].count) {
            return Err(Error::BoxCount(format!(
                "count decreased from {} to {} as delta shrank",
                w[0].count, w[1].count
            )));
        }
        Ok(Self {
            entries,
            convention: MESH_CONVENTION.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::BoxCount(format!(
            "mesh size must be positive, got {delta}"
        )))
    }
}

/// Cell index of `v`, moving values on the closed upper edge `top` down.
fn cell_index(v: f64, delta: f64, top: f64, bottom: f64) -> i64 {
    let q = v / delta;
    let idx = q.floor();
    if v == top && top > bottom && q == idx {
        idx as i64 - 1
    } else {
        idx as i64
    }
}

/// Number of cells met by the vertical range `[lo, hi]`.
pub(crate) fn range_cells(lo: f64, hi: f64, delta: f64) -> u64 {
    let bottom = (lo / delta).floor();
    let top = ((hi / delta).ceil() - 1.0).max(bottom);
    (top - bottom) as u64 + 1
}

/// Number of mesh squares containing at least one of the points.
pub fn box_count_curve(points: &[(f64, f64)], delta: f64) -> Result<u64> {
    check_delta(delta)?;
    if points.is_empty() {
        return Err(Error::BoxCount("no points to count".into()));
    }
    let fold = |(lo, hi): (f64, f64), v: f64| (lo.min(v), hi.max(v));
    let init = (f64::INFINITY, f64::NEG_INFINITY);
    let (xmin, xmax) = points.iter().map(|p| p.0).fold(init, fold);
    let (ymin, ymax) = points.iter().map(|p| p.1).fold(init, fold);
    let mut cells: Vec<(i64, i64)> = points
        .iter()
        .map(|&(x, y)| {
            (
                cell_index(x, delta, xmax, xmin),
                cell_index(y, delta, ymax, ymin),
            )
        })
        .collect();
    par::sort_unstable(&mut cells);
    cells.dedup();
    Ok(cells.len() as u64)
}

/// Mesh squares met by the graph of a continuous function sampled at
/// `points` (sorted by x).
///
/// Each closed column `[c d, (c+1) d]` contributes the cells spanned by the
/// sampled values over it; the graph is connected inside a column, so it
/// meets every cell between its lowest and highest value there.
pub fn box_count_graph(points: &[(f64, f64)], delta: f64) -> Result<u64> {
    check_delta(delta)?;
    if points.is_empty() {
        return Err(Error::BoxCount("no points to count".into()));
    }
    if points.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::BoxCount("graph samples must be sorted by x".into()));
    }
    let xmin = points[0].0;
    let xmax = points[points.len() - 1].0;
    let first = (xmin / delta).floor() as i64;
    let last = (((xmax / delta).ceil() as i64) - 1).max(first);
    let columns = (last - first + 1) as usize;
    Ok(par::sum_range(columns, |c| {
        let left = (first + c as i64) as f64 * delta;
        let right = left + delta;
        let a = points.partition_point(|p| p.0 < left);
        let b = points.partition_point(|p| p.0 <= right);
        if a >= b {
            return 0;
        }
        let (lo, hi) = points[a..b]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.1), hi.max(p.1))
            });
        range_cells(lo, hi, delta)
    }))
}

/// Mesh cubes met by the graph of a height field over `[0, 1]^2`.
///
/// `delta` must be a whole multiple of the grid step. Each closed column of
/// side `delta` contributes the cubes spanned by its sampled heights.
pub fn box_count_surface(field: &HeightField, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    let m = field.resolution();
    let ratio = delta * m as f64;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) || !m.is_multiple_of(k as usize) {
        return Err(Error::BoxCount(format!(
            "mesh size {delta} is not a divisor-aligned multiple of the grid step 1/{m}"
        )));
    }
    let k = k as usize;
    let cols = m / k;
    Ok(par::sum_range(cols, |cj| {
        let mut total = 0;
        for ci in 0..cols {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in cj * k..=(cj + 1) * k {
                for i in ci * k..=(ci + 1) * k {
                    let v = field.get(i, j);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            total += range_cells(lo, hi, delta);
        }
        total
    }))
}
