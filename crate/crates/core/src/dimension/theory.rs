use serde::{Deserialize, Serialize};

use super::spectral::{check_irreducible, spectral_radius_general, DEFAULT_TOL};
use crate::catalog::abs_extrema;
use crate::error::{Error, Result};
use crate::rifs::{InterpolationData, RifsModel};

/// Predicted box-counting dimension of the attractor curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryBounds {
    /// Spectral radius of `diag(min |s_i|) C`.
    pub lambda_lower: f64,
    /// Spectral radius of `diag(max |s_i|) C`.
    pub lambda_upper: f64,
    /// Regions per domain.
    pub a: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Set when the bounds pin the dimension down.
    pub exact: Option<f64>,
    pub notes: Vec<String>,
}

/// Per-region `(min |s_i|, max |s_i|)` over the region.
pub fn scaling_envelopes(model: &RifsModel) -> (Vec<f64>, Vec<f64>) {
    (0..model.regions())
        .map(|r| {
            let (lo, hi) = model.data().region_interval(r);
            let e = abs_extrema(model.scaling(r), lo, hi);
            (e.min_abs, e.max_abs)
        })
        .unzip()
}

/// True if every node inside the domain `[start, end]` lies on one line.
///
/// Compares the largest triangle area over consecutive triples against
/// `1e-12 * diameter^2`.
pub fn collinearity_test(data: &InterpolationData, start: usize, end: usize) -> bool {
    let nodes = &data.nodes()[start..=end];
    let scale = data.diameter();
    let tol = 1e-12 * scale * scale;
    nodes.windows(3).all(|w| {
        let (a, b, c) = (w[0], w[1], w[2]);
        let area = 0.5 * ((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1)).abs();
        area <= tol
    })
}

/// Checks the hypotheses under which the spectral bounds hold. Returns the
/// number of regions per domain.
pub fn check_hypotheses(model: &RifsModel) -> Result<usize> {
    let data = model.data();
    let n = data.regions();
    let (x0, xn) = data.span();
    let step = (xn - x0) / n as f64;
    for i in 0..n {
        let w = data.x(i + 1) - data.x(i);
        if (w - step).abs() > 1e-12 * (xn - x0) {
            return Err(Error::Hypothesis(format!(
                "nodes are not uniformly spaced (region {} has width {w}, expected {step})",
                i + 1
            )));
        }
    }
    let domains = &model.domains().domains;
    let a = domains[0].len();
    if let Some(d) = domains.iter().find(|d| d.len() != a) {
        return Err(Error::Hypothesis(format!(
            "domains differ in length ({} and {} regions)",
            a,
            d.len()
        )));
    }
    if a < 2 {
        return Err(Error::Hypothesis(
            "domains must span at least two regions".into(),
        ));
    }
    if !model.ordinate_map().is_identity() {
        return Err(Error::Hypothesis(
            "ordinate map must be the identity".into(),
        ));
    }
    if !check_irreducible(model.connection()) {
        return Err(Error::Hypothesis("connection matrix is reducible".into()));
    }
    if domains
        .iter()
        .all(|d| collinearity_test(data, d.start, d.end))
    {
        return Err(Error::Hypothesis(
            "the nodes of every domain are collinear".into(),
        ));
    }
    Ok(a)
}

/// Lower and upper bounds on the box-counting dimension from the spectral
/// radii of the scaled connection matrices.
///
/// With `lambda_upper <= 1` the dimension is 1. Otherwise the upper bound is
/// `1 + log_a lambda_upper`, and the lower bound is `1 + log_a lambda_lower`
/// when `lambda_lower > 1`, else 1. Constant scaling factors with equal
/// radii give the exact value `1 + log_a lambda`.
pub fn spectral_bounds(model: &RifsModel) -> Result<TheoryBounds> {
    let a = check_hypotheses(model)?;
    let (lower, upper) = scaling_envelopes(model);
    let c = model.connection();
    let lambda_lower = spectral_radius_general(&c.scale_rows(&lower)?, DEFAULT_TOL)?;
    let lambda_upper = spectral_radius_general(&c.scale_rows(&upper)?, DEFAULT_TOL)?;
    let log_a = |v: f64| v.ln() / (a as f64).ln();
    let mut notes = Vec::new();

    let (lower_bound, upper_bound, mut exact) = if lambda_upper <= 1.0 {
        (1.0, 1.0, Some(1.0))
    } else if lambda_lower > 1.0 {
        (1.0 + log_a(lambda_lower), 1.0 + log_a(lambda_upper), None)
    } else {
        notes.push(format!(
            "lambda_lower = {lambda_lower} <= 1: the spectral lower bound needs lambda_lower > 1, \
             so the lower bound falls back to 1 (the dimension of any curve)"
        ));
        (1.0, 1.0 + log_a(lambda_upper), None)
    };
    let constant = (0..model.regions()).all(|r| model.scaling(r).is_constant());
    if exact.is_none()
        && constant
        && lambda_lower > 1.0
        && (lambda_upper - lambda_lower).abs() <= 1e-9 * lambda_upper
    {
        exact = Some(1.0 + log_a(lambda_upper));
    }
    let upper_bound = if upper_bound > 2.0 {
        notes.push(format!("upper bound {upper_bound} clamped to 2"));
        2.0
    } else {
        upper_bound
    };

    Ok(TheoryBounds {
        lambda_lower,
        lambda_upper,
        a,
        lower_bound,
        upper_bound,
        exact,
        notes,
    })
}
