//! Surfaces `F(x, y) = sum coeff_i(x, y) f_i(x) + sum coeff_j(x, y) g_j(y)`
//! over the unit square, built from attractor curves.

use serde::{Deserialize, Serialize};

use crate::catalog::BivariateFunctionSpec;
use crate::dimension::{box_count_surface, fit_dimension, BoxCount, BoxCountSeries, Estimate};
use crate::error::{Error, Result};
use crate::par;
use crate::rifs::{interpolate, AttractorSampling, RifsModel};

/// A curve on `[0, 1]`, linear between samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Curve {
    /// Samples sorted by x; the abscissae are mapped affinely onto `[0, 1]`.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Surface("a curve needs at least two samples".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Surface(
                "curve samples must strictly increase in x".into(),
            ));
        }
        let x0 = points[0].0;
        let width = points[points.len() - 1].0 - x0;
        let mut xs: Vec<f64> = points.iter().map(|p| (p.0 - x0) / width).collect();
        *xs.last_mut().unwrap() = 1.0;
        Ok(Self {
            xs,
            ys: points.iter().map(|p| p.1).collect(),
        })
    }

    pub fn from_sampling(sampling: &AttractorSampling) -> Result<Self> {
        Self::from_points(&sampling.points())
    }

    /// Refines `model` until the samples are no more than `max_gap` apart
    /// on the unit interval, starting from `min_depth`.
    pub fn from_model(model: &RifsModel, min_depth: u32, max_gap: f64) -> Result<(Self, u32)> {
        let (x0, xn) = model.data().span();
        let mut refiner = crate::rifs::Refiner::new(model);
        while refiner.current().depth < min_depth
            || refiner.current().max_gap() / (xn - x0) > max_gap
        {
            refiner.step();
        }
        let depth = refiner.current().depth;
        Ok((Self::from_sampling(refiner.current())?, depth))
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.xs, &self.ys, x)
    }

    pub fn max_gap(&self) -> f64 {
        self.xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceTerm {
    pub curve: Curve,
    pub coeff: BivariateFunctionSpec,
}

/// Curves in x and curves in y, each weighted by a coefficient function.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurfaceSpec {
    pub x_terms: Vec<SurfaceTerm>,
    pub y_terms: Vec<SurfaceTerm>,
}

impl SurfaceSpec {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let fx: f64 = self
            .x_terms
            .iter()
            .map(|t| t.coeff.eval(x, y) * t.curve.eval(x))
            .sum();
        let gy: f64 = self
            .y_terms
            .iter()
            .map(|t| t.coeff.eval(x, y) * t.curve.eval(y))
            .sum();
        fx + gy
    }
}

/// Heights on the `(m + 1) x (m + 1)` uniform grid over `[0, 1]^2`, stored
/// row by row: index `j * (m + 1) + i` holds `F(i / m, j / m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightField {
    resolution: usize,
    heights: Vec<f64>,
}

impl HeightField {
    pub fn from_fn(resolution: usize, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> Self {
        let side = resolution + 1;
        let m = resolution as f64;
        let rows = par::map_range(side, |j| {
            (0..side)
                .map(|i| f(i as f64 / m, j as f64 / m))
                .collect::<Vec<_>>()
        });
        Self {
            resolution,
            heights: rows.concat(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Height at grid node `(i / m, j / m)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.heights[j * (self.resolution + 1) + i]
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.heights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| {
                (lo.min(h), hi.max(h))
            })
    }
}

/// Evaluates the surface on the grid of resolution `m`.
pub fn eval_surface(spec: &SurfaceSpec, resolution: usize) -> Result<HeightField> {
    if resolution < 2 {
        return Err(Error::Surface(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    if spec.x_terms.is_empty() && spec.y_terms.is_empty() {
        return Err(Error::Surface("surface has no terms".into()));
    }
    let limit = 1.0 / (4.0 * resolution as f64);
    for t in spec.x_terms.iter().chain(&spec.y_terms) {
        t.coeff.validate()?;
        if t.curve.max_gap() > limit {
            return Err(Error::Surface(format!(
                "curve spacing {} is coarser than 1/(4m) = {limit}; refine the curve further",
                t.curve.max_gap()
            )));
        }
    }
    let field = HeightField::from_fn(resolution, |x, y| spec.eval(x, y));
    if field.heights.iter().any(|h| !h.is_finite()) {
        return Err(Error::Surface("surface has non-finite heights".into()));
    }
    Ok(field)
}

/// `1 + max` of the dimensions of the component curves.
pub fn surface_dimension_formula(x_dims: &[f64], y_dims: &[f64]) -> Result<f64> {
    if x_dims.is_empty() && y_dims.is_empty() {
        return Err(Error::Surface("no curve dimensions given".into()));
    }
    let all = x_dims.iter().chain(y_dims);
    if let Some(d) = all.clone().find(|d| !(1.0..=2.0).contains(*d)) {
        return Err(Error::Surface(format!(
            "curve dimension {d} is outside [1, 2]"
        )));
    }
    Ok(1.0 + all.copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Box-counts the graph of the field at each scale and fits the slope over
/// all of them.
pub fn estimate_surface_dimension(field: &HeightField, scales: &[f64]) -> Result<Estimate> {
    let entries = scales
        .iter()
        .map(|&delta| {
            Ok(BoxCount {
                delta,
                count: box_count_surface(field, delta)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let series = BoxCountSeries::new(entries)?;
    let fit = fit_dimension(&series)?;
    Ok(Estimate {
        fitted_scales: series.len(),
        series,
        estimate: fit.estimate,
        r_squared: fit.r_squared,
        depth: None,
        samples: field.heights.len(),
    })
}
