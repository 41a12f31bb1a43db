//! A closed catalog of one- and two-variable functions.
//!
//! Every free function of the construction (vertical scaling factors, the
//! ordinate map, the base and interpolant functions, surface coefficients)
//! is described by a [`ScalarFunctionSpec`] or [`BivariateFunctionSpec`].
//! The catalog is small enough that Lipschitz constants and absolute-value
//! extrema can be computed exactly or certified numerically, see
//! [`lipschitz_bound`] and [`abs_extrema`].

mod bounds;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{abs_extrema, lipschitz_bound, AbsExtrema};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    Cos,
    Sin,
}

/// A univariate function from the catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFunctionSpec {
    Constant {
        value: f64,
    },
    Affine {
        slope: f64,
        intercept: f64,
    },
    /// Coefficients in ascending order of degree.
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// `amplitude * wave(omega * x + phase)`.
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
        wave: Wave,
    },
    /// The interpolating polynomial through the given nodes.
    Lagrange(LagrangeNodes),
    Sum {
        terms: Vec<ScalarFunctionSpec>,
    },
    Scaled {
        factor: f64,
        inner: Box<ScalarFunctionSpec>,
    },
}

impl ScalarFunctionSpec {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::Affine { slope, intercept }
    }

    pub fn identity() -> Self {
        Self::affine(1.0, 0.0)
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let spec = Self::Polynomial { coefficients };
        spec.validate()?;
        Ok(spec)
    }

    pub fn cos(amplitude: f64, omega: f64, phase: f64) -> Self {
        Self::Sinusoid {
            amplitude,
            omega,
            phase,
            wave: Wave::Cos,
        }
    }

    pub fn sin(amplitude: f64, omega: f64, phase: f64) -> Self {
        Self::Sinusoid {
            amplitude,
            omega,
            phase,
            wave: Wave::Sin,
        }
    }

    pub fn sum(terms: Vec<ScalarFunctionSpec>) -> Self {
        Self::Sum { terms }
    }

    pub fn scaled(factor: f64, inner: ScalarFunctionSpec) -> Self {
        Self::Scaled {
            factor,
            inner: Box::new(inner),
        }
    }

    /// Checks the structural invariants of the spec and every nested spec.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{what} must be finite")))
            }
        };
        match self {
            Self::Constant { value } => finite(*value, "constant value"),
            Self::Affine { slope, intercept } => {
                finite(*slope, "slope")?;
                finite(*intercept, "intercept")
            }
            Self::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidSpec(
                        "polynomial needs at least one coefficient".into(),
                    ));
                }
                coefficients
                    .iter()
                    .try_for_each(|&c| finite(c, "polynomial coefficient"))
            }
            Self::Sinusoid {
                amplitude,
                omega,
                phase,
                ..
            } => {
                finite(*amplitude, "amplitude")?;
                finite(*omega, "omega")?;
                finite(*phase, "phase")
            }
            // invariants enforced at construction
            Self::Lagrange(_) => Ok(()),
            Self::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("sum needs at least one term".into()));
                }
                terms.iter().try_for_each(Self::validate)
            }
            Self::Scaled { factor, inner } => {
                finite(*factor, "scale factor")?;
                inner.validate()
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine { slope, intercept } => slope * x + intercept,
            Self::Polynomial { coefficients } => horner(coefficients, x),
            Self::Sinusoid {
                amplitude,
                omega,
                phase,
                wave,
            } => {
                let t = omega * x + phase;
                amplitude
                    * match wave {
                        Wave::Cos => t.cos(),
                        Wave::Sin => t.sin(),
                    }
            }
            Self::Lagrange(nodes) => nodes.eval(x),
            Self::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
            Self::Scaled { factor, inner } => factor * inner.eval(x),
        }
    }

    /// The exact derivative, itself a catalog function.
    pub fn derivative(&self) -> ScalarFunctionSpec {
        match self {
            Self::Constant { .. } => Self::constant(0.0),
            Self::Affine { slope, .. } => Self::constant(*slope),
            Self::Polynomial { coefficients } => Self::Polynomial {
                coefficients: poly_derivative(coefficients),
            },
            Self::Sinusoid {
                amplitude,
                omega,
                phase,
                wave,
            } => match wave {
                Wave::Cos => Self::sin(-amplitude * omega, *omega, *phase),
                Wave::Sin => Self::cos(amplitude * omega, *omega, *phase),
            },
            Self::Lagrange(nodes) => Self::Polynomial {
                coefficients: poly_derivative(&nodes.monomial),
            },
            Self::Sum { terms } => Self::Sum {
                terms: terms.iter().map(Self::derivative).collect(),
            },
            Self::Scaled { factor, inner } => Self::scaled(*factor, inner.derivative()),
        }
    }

    /// A cheap upper bound of `|f|` on `[lo, hi]`. Not tight; used for
    /// remainder terms in certified refinement.
    pub(crate) fn coarse_abs_bound(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Self::Constant { value } => value.abs(),
            Self::Affine { .. } => self.eval(lo).abs().max(self.eval(hi).abs()),
            Self::Polynomial { coefficients } => poly_abs_bound(coefficients, lo, hi),
            Self::Sinusoid { amplitude, .. } => amplitude.abs(),
            Self::Lagrange(nodes) => poly_abs_bound(&nodes.monomial, lo, hi),
            Self::Sum { terms } => terms.iter().map(|t| t.coarse_abs_bound(lo, hi)).sum(),
            Self::Scaled { factor, inner } => factor.abs() * inner.coarse_abs_bound(lo, hi),
        }
    }

    /// True if the function is constant by construction.
    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::Affine { slope, .. } => *slope == 0.0,
            Self::Polynomial { coefficients } => coefficients[1..].iter().all(|&c| c == 0.0),
            Self::Sinusoid {
                amplitude, omega, ..
            } => *amplitude == 0.0 || *omega == 0.0,
            Self::Lagrange(nodes) => nodes.monomial[1..].iter().all(|&c| c == 0.0),
            Self::Sum { terms } => terms.iter().all(Self::is_constant),
            Self::Scaled { factor, inner } => *factor == 0.0 || inner.is_constant(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Affine { slope, intercept } if *slope == 1.0 && *intercept == 0.0)
    }
}

/// Nodes of an interpolating polynomial, with barycentric weights and the
/// monomial form precomputed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawNodes", into = "RawNodes")]
pub struct LagrangeNodes {
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
    monomial: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawNodes {
    nodes: Vec<(f64, f64)>,
}

impl TryFrom<RawNodes> for LagrangeNodes {
    type Error = Error;

    fn try_from(raw: RawNodes) -> Result<Self> {
        LagrangeNodes::new(raw.nodes)
    }
}

impl From<LagrangeNodes> for RawNodes {
    fn from(n: LagrangeNodes) -> Self {
        RawNodes { nodes: n.nodes }
    }
}

impl PartialEq for LagrangeNodes {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl LagrangeNodes {
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidSpec(
                "lagrange needs at least one node".into(),
            ));
        }
        if nodes.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSpec("lagrange nodes must be finite".into()));
        }
        for (i, a) in nodes.iter().enumerate() {
            if nodes[i + 1..].iter().any(|b| b.0 == a.0) {
                return Err(Error::InvalidSpec(format!(
                    "duplicate lagrange abscissa {}",
                    a.0
                )));
            }
        }
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(j, (xj, _))| {
                let prod: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, (xk, _))| xj - xk)
                    .product();
                1.0 / prod
            })
            .collect();
        let monomial = newton_to_monomial(&nodes);
        Ok(Self {
            nodes,
            weights,
            monomial,
        })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Monomial coefficients, ascending.
    pub fn monomial(&self) -> &[f64] {
        &self.monomial
    }

    /// Barycentric evaluation (second form). Exact at the nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xj, yj), wj) in self.nodes.iter().zip(&self.weights) {
            let d = x - xj;
            if d == 0.0 {
                return *yj;
            }
            let t = wj / d;
            num += t * yj;
            den += t;
        }
        num / den
    }
}

/// The interpolating polynomial of degree at most `nodes.len() - 1`.
///
/// One node gives a constant, two give an affine function, more give a
/// [`ScalarFunctionSpec::Lagrange`] evaluated in barycentric form.
pub fn lagrange_from_nodes(nodes: &[(f64, f64)]) -> Result<ScalarFunctionSpec> {
    let lagrange = LagrangeNodes::new(nodes.to_vec())?;
    Ok(match nodes {
        [(_, y)] => ScalarFunctionSpec::constant(*y),
        [(x0, y0), (x1, y1)] => {
            let slope = (y1 - y0) / (x1 - x0);
            ScalarFunctionSpec::affine(slope, y0 - slope * x0)
        }
        _ => ScalarFunctionSpec::Lagrange(lagrange),
    })
}

/// One separable term `fx(x) * fy(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub fx: ScalarFunctionSpec,
    pub fy: ScalarFunctionSpec,
}

/// `value(x, y) = sum of fx(x) * fy(y)` over the terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivariateFunctionSpec {
    pub terms: Vec<SeparableTerm>,
}

impl BivariateFunctionSpec {
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        let spec = Self { terms };
        spec.validate()?;
        Ok(spec)
    }

    /// `f(x)`, constant in y.
    pub fn of_x(f: ScalarFunctionSpec) -> Self {
        Self {
            terms: vec![SeparableTerm {
                fx: f,
                fy: ScalarFunctionSpec::constant(1.0),
            }],
        }
    }

    /// `f(y)`, constant in x.
    pub fn of_y(f: ScalarFunctionSpec) -> Self {
        Self {
            terms: vec![SeparableTerm {
                fx: ScalarFunctionSpec::constant(1.0),
                fy: f,
            }],
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::of_x(ScalarFunctionSpec::constant(value))
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidSpec(
                "bivariate function needs at least one term".into(),
            ));
        }
        self.terms.iter().try_for_each(|t| {
            t.fx.validate()?;
            t.fy.validate()
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|t| t.fx.eval(x) * t.fy.eval(y)).sum()
    }
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coefficients: &[f64]) -> Vec<f64> {
    if coefficients.len() <= 1 {
        return vec![0.0];
    }
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Bound on `|p|` over `[lo, hi]` from the Taylor expansion at the midpoint.
fn poly_abs_bound(coefficients: &[f64], lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    // shifted coefficients: p(mid + t) = sum b_k t^k
    let mut shifted = coefficients.to_vec();
    let n = shifted.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            shifted[j] += mid * shifted[j + 1];
        }
    }
    shifted
        .iter()
        .enumerate()
        .map(|(k, b)| b.abs() * half.powi(k as i32))
        .sum()
}

fn newton_to_monomial(nodes: &[(f64, f64)]) -> Vec<f64> {
    let n = nodes.len();
    let mut dd: Vec<f64> = nodes.iter().map(|&(_, y)| y).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i].0 - nodes[i - level].0);
        }
    }
    let mut poly = vec![dd[n - 1]];
    for k in (0..n - 1).rev() {
        // poly * (x - x_k) + dd[k]
        let xk = nodes[k].0;
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= xk * c;
        }
        next[0] += dd[k];
        poly = next;
    }
    poly
}
