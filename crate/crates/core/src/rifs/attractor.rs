use serde::{Deserialize, Serialize};

use super::RifsModel;
use crate::par;

/// Attractor points grouped by region, each group sorted by x.
///
/// Every point is exactly on the attractor: depth 0 holds the nodes, and
/// each further depth applies the maps to points already on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorSampling {
    pub depth: u32,
    pub per_region: Vec<Vec<(f64, f64)>>,
}

impl AttractorSampling {
    /// All points sorted by x, with the shared region endpoints merged.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let total = self.per_region.iter().map(Vec::len).sum::<usize>();
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(total);
        for region in &self.per_region {
            for &p in region {
                match out.last() {
                    // coincident abscissae at region boundaries: keep the first
                    Some(last) if last.0 == p.0 => {
                        if p < *last {
                            *out.last_mut().unwrap() = p;
                        }
                    }
                    _ => out.push(p),
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.per_region.iter().map(Vec::len).sum::<usize>() + 1 - self.per_region.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_region.is_empty()
    }

    /// Largest gap between consecutive abscissae.
    pub fn max_gap(&self) -> f64 {
        self.per_region
            .iter()
            .flat_map(|r| r.windows(2).map(|w| w[1].0 - w[0].0))
            .fold(0.0, f64::max)
    }
}

/// Steps the attractor refinement one depth at a time.
pub struct Refiner<'a> {
    model: &'a RifsModel,
    current: AttractorSampling,
}

impl<'a> Refiner<'a> {
    pub fn new(model: &'a RifsModel) -> Self {
        let data = model.data();
        let per_region = (0..model.regions())
            .map(|r| vec![data.nodes()[r], data.nodes()[r + 1]])
            .collect();
        Self {
            model,
            current: AttractorSampling {
                depth: 0,
                per_region,
            },
        }
    }

    pub fn current(&self) -> &AttractorSampling {
        &self.current
    }

    pub fn into_sampling(self) -> AttractorSampling {
        self.current
    }

    /// One application of the set operator: region `i` becomes `W_i` of the
    /// union of the current sets of the regions inside its domain.
    pub fn step(&mut self) {
        let model = self.model;
        let data = model.data();
        let prev = &self.current.per_region;
        let next = par::map_range(model.regions(), |r| {
            let domain = model.domain_of(r);
            let size: usize = prev[domain.start..domain.end]
                .iter()
                .map(|s| s.len() - 1)
                .sum::<usize>()
                + 1;
            let mut image = Vec::with_capacity(size);
            for (k, set) in prev[domain.start..domain.end].iter().enumerate() {
                let skip = usize::from(k > 0);
                image.extend(
                    set[skip..]
                        .iter()
                        .map(|&(x, y)| (model.map(r).apply(x), model.vertical(r, x, y))),
                );
            }
            if model.is_flipped(r) {
                image.reverse();
            }
            // domain endpoints land on region endpoints, which are nodes
            image[0] = data.nodes()[r];
            *image.last_mut().unwrap() = data.nodes()[r + 1];
            image
        });
        self.current = AttractorSampling {
            depth: self.current.depth + 1,
            per_region: next,
        };
    }
}

/// Attractor points after `depth` applications of the set operator.
pub fn refine_attractor(model: &RifsModel, depth: u32) -> AttractorSampling {
    let mut refiner = Refiner::new(model);
    for _ in 0..depth {
        refiner.step();
    }
    refiner.into_sampling()
}

/// Piecewise-linear interpolation through sorted points. Arguments within a
/// relative 1e-12 of a knot return the knot value.
pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let scale = 1e-12 * (xs[n - 1] - xs[0]).abs().max(f64::MIN_POSITIVE);
    let k = xs.partition_point(|&v| v < x);
    if k < n && (xs[k] - x).abs() <= scale {
        return ys[k];
    }
    if k > 0 && (x - xs[k - 1]).abs() <= scale {
        return ys[k - 1];
    }
    if k == 0 {
        return ys[0];
    }
    if k == n {
        return ys[n - 1];
    }
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

/// Largest violation of the fixed-point equation over the sampled points:
/// `|y - F_i(L_i^-1(x), f(L_i^-1(x)))|` for each point `(x, y)` in region
/// `i`, where `f` interpolates the sampling piecewise linearly.
pub fn functional_residual(model: &RifsModel, sampling: &AttractorSampling) -> f64 {
    let points = sampling.points();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (xs, ys) = (&xs, &ys);
    par::max_range(sampling.per_region.len(), |r| {
        sampling.per_region[r]
            .iter()
            .map(|&(x, y)| {
                let pre = model.map(r).invert(x);
                let f = interpolate(xs, ys, pre);
                (y - model.vertical(r, pre, f)).abs()
            })
            .fold(0.0, f64::max)
    })
}
