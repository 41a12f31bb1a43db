use serde::{Deserialize, Serialize};

use super::boxcount::{box_count_graph, BoxCount, BoxCountSeries};
use super::theory::{check_hypotheses, spectral_bounds, TheoryBounds};
use crate::catalog::ScalarFunctionSpec;
use crate::error::{Error, Result};
use crate::rifs::{Refiner, RifsModel};

/// Least-squares slope of `ln N` against `-ln delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub estimate: f64,
    pub r_squared: f64,
}

pub fn fit_dimension(series: &BoxCountSeries) -> Result<Fit> {
    if series.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 scales, got {}",
            series.len()
        )));
    }
    let xs: Vec<f64> = series.entries.iter().map(|e| -e.delta.ln()).collect();
    let ys: Vec<f64> = series
        .entries
        .iter()
        .map(|e| (e.count as f64).ln())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("all mesh sizes are equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Ok(Fit {
        estimate: slope,
        r_squared,
    })
}

/// A measured dimension together with the counts it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Every scale that was counted.
    pub series: BoxCountSeries,
    /// The regression uses the last `fitted_scales` entries of `series`.
    pub fitted_scales: usize,
    pub estimate: f64,
    pub r_squared: f64,
    /// Refinement depth of the sampled attractor, for curves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    pub samples: usize,
}

/// Knobs for measuring a curve's dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveEstimateOptions {
    /// First exponent in `delta_r = base^-r / n`.
    pub r_min: u32,
    /// Last exponent; by default the one giving roughly `2^-12 / n`.
    pub r_max: Option<u32>,
    /// Required ratio between each mesh size and the sample spacing.
    pub oversample: f64,
    /// Refinement stops before the sampling grows past this.
    pub max_points: usize,
}

impl Default for CurveEstimateOptions {
    fn default() -> Self {
        Self {
            r_min: 2,
            r_max: None,
            oversample: 16.0,
            max_points: 1 << 24,
        }
    }
}

/// Bounds, measurement and notes for one curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheoryBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypotheses_unmet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
    pub notes: Vec<String>,
}

/// Mesh sizes `base^-r / n` for `r` in `r_min..=r_max`, in the unit square.
pub fn curve_scales(base: usize, regions: usize, r_min: u32, r_max: u32) -> Vec<f64> {
    (r_min..=r_max)
        .map(|r| (base as f64).powi(-(r as i32)) / regions as f64)
        .collect()
}

fn fit_counts(entries: Vec<BoxCount>, samples: usize) -> Result<Estimate> {
    let series = BoxCountSeries::new(entries)?;
    let skip = usize::from(series.len() >= 5);
    let fitted = BoxCountSeries::new(series.entries[skip..].to_vec())?;
    let fit = fit_dimension(&fitted)?;
    Ok(Estimate {
        fitted_scales: fitted.len(),
        series,
        estimate: fit.estimate,
        r_squared: fit.r_squared,
        depth: None,
        samples,
    })
}

/// Box-counts a graph sampled on `[0, 1]` at each mesh size and fits the
/// slope. With five or more sizes the coarsest is left out of the fit.
pub fn estimate_graph_dimension(points: &[(f64, f64)], deltas: &[f64]) -> Result<Estimate> {
    let entries = deltas
        .iter()
        .map(|&delta| {
            Ok(BoxCount {
                delta,
                count: box_count_graph(points, delta)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fit_counts(entries, points.len())
}

/// Measures the box-counting dimension of the attractor.
///
/// The mesh base is the number of regions per domain when the spectral
/// hypotheses hold, otherwise 2. Each mesh size is counted on the first
/// refinement whose spacing is `oversample` times finer, so every scale
/// sees about the same number of samples per column.
pub fn estimate_curve_dimension(
    model: &RifsModel,
    opts: &CurveEstimateOptions,
) -> Result<(Estimate, Vec<String>)> {
    measure_curve(model, opts, |_, y| y)
}

/// Like [`estimate_curve_dimension`] for the graph of `weight(x) * f(x)`,
/// with `x` taken on `[0, 1]`.
pub fn estimate_weighted_curve_dimension(
    model: &RifsModel,
    opts: &CurveEstimateOptions,
    weight: &ScalarFunctionSpec,
) -> Result<(Estimate, Vec<String>)> {
    measure_curve(model, opts, |x, y| weight.eval(x) * y)
}

fn measure_curve(
    model: &RifsModel,
    opts: &CurveEstimateOptions,
    value: impl Fn(f64, f64) -> f64,
) -> Result<(Estimate, Vec<String>)> {
    let base = check_hypotheses(model).unwrap_or(2);
    let r_max = opts
        .r_max
        .unwrap_or_else(|| (12.0 / (base as f64).log2()).floor() as u32);
    if r_max < opts.r_min + 2 {
        return Err(Error::Degenerate(format!(
            "scale range {}..={} holds fewer than 3 scales",
            opts.r_min, r_max
        )));
    }
    if !(opts.oversample >= 1.0) {
        return Err(Error::Degenerate(format!(
            "oversample must be at least 1, got {}",
            opts.oversample
        )));
    }
    let (x0, xn) = model.data().span();
    let width = xn - x0;
    let growth = model
        .domains()
        .domains
        .iter()
        .map(|d| d.len())
        .max()
        .unwrap_or(2);
    let mut refiner = Refiner::new(model);
    let mut notes = Vec::new();
    let mut entries = Vec::new();
    for delta in curve_scales(base, model.regions(), opts.r_min, r_max) {
        while refiner.current().max_gap() / width > delta / opts.oversample {
            if refiner.current().len() * growth > opts.max_points {
                notes.push(format!(
                    "mesh {delta:e} counted at depth {} ({} points), coarser than requested",
                    refiner.current().depth,
                    refiner.current().len()
                ));
                break;
            }
            refiner.step();
        }
        let points: Vec<(f64, f64)> = refiner
            .current()
            .points()
            .into_iter()
            .map(|(x, y)| {
                let u = (x - x0) / width;
                (u, value(u, y))
            })
            .collect();
        entries.push(BoxCount {
            delta,
            count: box_count_graph(&points, delta)?,
        });
    }
    let mut estimate = fit_counts(entries, refiner.current().len())?;
    estimate.depth = Some(refiner.current().depth);
    Ok((estimate, notes))
}

/// Runs the spectral bounds when their hypotheses hold, then the measurement.
pub fn analyze_curve(model: &RifsModel, opts: &CurveEstimateOptions) -> Result<DimensionReport> {
    let mut notes = Vec::new();
    let (theory, hypotheses_unmet) = match spectral_bounds(model) {
        Ok(t) => (Some(t), None),
        Err(Error::Hypothesis(msg)) => {
            notes.push(format!("hypotheses unmet: {msg}; bounds not computed"));
            (None, Some(msg))
        }
        Err(e) => return Err(e),
    };
    let (estimate, more) = estimate_curve_dimension(model, opts)?;
    notes.extend(more);
    if let Some(t) = &theory {
        notes.extend(t.notes.iter().cloned());
    }
    Ok(DimensionReport {
        theory,
        hypotheses_unmet,
        estimate: Some(estimate),
        notes,
    })
}
