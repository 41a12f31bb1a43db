use serde::{Deserialize, Serialize};

use super::RifsModel;
use crate::catalog::{abs_extrema, lipschitz_bound};
use crate::error::{Error, Result};

/// Constants showing that every `W_i` contracts in the metric
/// `|x - x'| + theta * |y - y'|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// Largest `|slope|` of the affine maps.
    pub c_l: f64,
    /// Largest Lipschitz constant of a scaling factor on its region.
    pub c_s: f64,
    /// Largest Lipschitz bound of `b_i(x) = -s_i(L_i x) g(x) + h(L_i x)` on its domain.
    pub l_b: f64,
    /// Max `|a|` over the y-envelope.
    pub a_bar: f64,
    /// Max `|s_i|` over all regions.
    pub s_bar: f64,
    /// Lipschitz constant of the ordinate map on the y-envelope.
    pub l_a: f64,
    /// `theta` must stay below this for the x-part to contract.
    pub theta_threshold: f64,
    pub theta_used: f64,
    pub overall_factor: f64,
    /// Per-region Lipschitz bounds of `b_i`.
    pub region_l_b: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Certified upper bound on the Lipschitz constant of
/// `b_i(x) = -s_i(L_i x) g(x) + h(L_i x)` over the domain of region `i`.
pub(crate) fn b_lipschitz(model: &RifsModel, r: usize) -> f64 {
    let (dlo, dhi) = model.domain_interval(r);
    let (rlo, rhi) = model.data().region_interval(r);
    let c = model.map(r).slope.abs();
    let s = model.scaling(r);
    let c_s = lipschitz_bound(s, rlo, rhi);
    let s_bar = abs_extrema(s, rlo, rhi).max_abs;
    let g_bar = abs_extrema(model.base(), dlo, dhi).max_abs;
    let l_g = lipschitz_bound(model.base(), dlo, dhi);
    let l_h = lipschitz_bound(model.interpolant(), rlo, rhi);
    c * c_s * g_bar + s_bar * l_g + c * l_h
}

/// Computes the contraction constants and picks `theta`.
///
/// The x-part of the bound is `c_L + theta * (c_s c_L a_bar + L_b)`, which
/// stays below 1 exactly when `theta < (1 - c_L) / (c_s c_L a_bar + L_b)`;
/// half of that threshold is used. The y-part is `s_bar * L_a`. A y-part
/// equal to 1 because `|s|` touches `1 / L_a` at isolated points is reported
/// with a warning; anything else at or above 1 is an error.
pub fn contraction_report(model: &RifsModel) -> Result<ContractionReport> {
    let n = model.regions();
    let (hlo, hhi) = model.envelope();
    let c_l = (0..n).map(|r| model.map(r).slope.abs()).fold(0.0, f64::max);
    let mut c_s = 0.0f64;
    let mut s_bar = 0.0f64;
    for r in 0..n {
        let (lo, hi) = model.data().region_interval(r);
        c_s = c_s.max(lipschitz_bound(model.scaling(r), lo, hi));
        s_bar = s_bar.max(abs_extrema(model.scaling(r), lo, hi).max_abs);
    }
    let region_l_b: Vec<f64> = (0..n).map(|r| b_lipschitz(model, r)).collect();
    let l_b = region_l_b.iter().copied().fold(0.0, f64::max);
    let a_bar = abs_extrema(model.ordinate_map(), hlo, hhi).max_abs;
    let l_a = lipschitz_bound(model.ordinate_map(), hlo, hhi);

    let coupling = c_s * c_l * a_bar + l_b;
    let (theta_threshold, theta_used) = if coupling > 0.0 {
        let t = (1.0 - c_l) / coupling;
        (t, 0.5 * t)
    } else {
        (f64::INFINITY, 1.0)
    };
    let x_part = c_l + theta_used * coupling;
    let y_part = s_bar * l_a;
    let overall_factor = x_part.max(y_part);

    let mut warnings = Vec::new();
    if overall_factor >= 1.0 {
        let marginal = x_part < 1.0
            && y_part <= 1.0 + 1e-12
            && model
                .warnings()
                .iter()
                .any(|w| w.contains("isolated points"));
        if !marginal {
            return Err(Error::NonContractive(overall_factor));
        }
        warnings.push(format!(
            "s_bar * L_a = {y_part} touches 1 at isolated points; contraction is marginal"
        ));
    }

    Ok(ContractionReport {
        c_l,
        c_s,
        l_b,
        a_bar,
        s_bar,
        l_a,
        theta_threshold,
        theta_used,
        overall_factor,
        region_l_b,
        warnings,
    })
}
