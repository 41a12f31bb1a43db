use serde::{Deserialize, Serialize};

use crate::catalog::{abs_extrema, lipschitz_bound};
use crate::error::{Error, Result};
use crate::rifs::contraction::b_lipschitz;
use crate::rifs::{AttractorSampling, RifsModel};

/// `max f - min f` over the samples whose abscissa lies in `[lo, hi]`.
pub fn max_variation(points: &[(f64, f64)], lo: f64, hi: f64) -> Result<f64> {
    let (min, max) = points
        .iter()
        .filter(|p| p.0 >= lo && p.0 <= hi)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.1), b.max(p.1))
        });
    if min > max {
        return Err(Error::InvalidSpec(format!(
            "no samples inside [{lo}, {hi}]"
        )));
    }
    Ok(max - min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationRow {
    /// 0-based region index.
    pub region: usize,
    /// Variation of the curve over the region.
    pub lhs: f64,
    /// Bound from the variation over the source domain.
    pub rhs: f64,
    pub ok: bool,
}

/// Checks, region by region, that the variation over the region is bounded
/// by `s_bar L_a R[domain] + |domain| (c_s a_bar + L_b)`, where `R[domain]`
/// and `a_bar` are measured on the sampled curve.
pub fn variation_check(model: &RifsModel, sampling: &AttractorSampling) -> Vec<VariationRow> {
    let points = sampling.points();
    let (hlo, hhi) = model.envelope();
    let l_a = lipschitz_bound(model.ordinate_map(), hlo, hhi);
    let slack = 1e-9 * (hhi - hlo);
    (0..model.regions())
        .map(|r| {
            let (rlo, rhi) = model.data().region_interval(r);
            let (dlo, dhi) = model.domain_interval(r);
            let s = model.scaling(r);
            let s_bar = abs_extrema(s, rlo, rhi).max_abs;
            let c_s = lipschitz_bound(s, rlo, rhi);
            let lhs = max_variation(&points, rlo, rhi).unwrap_or(0.0);
            let domain_variation = max_variation(&points, dlo, dhi).unwrap_or(0.0);
            let a_bar = points
                .iter()
                .filter(|p| p.0 >= dlo && p.0 <= dhi)
                .map(|p| model.ordinate_map().eval(p.1).abs())
                .fold(0.0, f64::max);
            let rhs = s_bar * l_a * domain_variation
                + (dhi - dlo) * (c_s * a_bar + b_lipschitz(model, r));
            VariationRow {
                region: r,
                lhs,
                rhs,
                ok: lhs <= rhs + slack,
            }
        })
        .collect()
}
