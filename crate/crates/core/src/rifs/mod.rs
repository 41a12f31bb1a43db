//! Recurrent iterated function systems that interpolate a data set.
//!
//! A model partitions the data interval into regions `[x_{i-1}, x_i]`,
//! assigns each region a domain spanning at least two regions, and maps
//! each domain onto its region with
//!
//! ```text
//! W_i(x, y) = (L_i(x), s_i(L_i(x)) * (a(y) - g(x)) + h(L_i(x)))
//! ```
//!
//! where `L_i` is affine, `s_i` is the vertical scaling factor, `a` the
//! ordinate map, `g` the base function and `h` the interpolant. The
//! attractor is the graph of a continuous function through every node.

mod attractor;
pub(crate) mod contraction;

use serde::{Deserialize, Serialize};

use crate::catalog::{abs_extrema, lagrange_from_nodes, lipschitz_bound, ScalarFunctionSpec};
use crate::dimension::{check_irreducible, NonnegativeMatrix};
use crate::error::{Error, Result};

pub(crate) use attractor::interpolate;
pub use attractor::{functional_residual, refine_attractor, AttractorSampling, Refiner};
pub use contraction::{contraction_report, ContractionReport};

/// Tolerance for the interpolation conditions on `g`, `h` and `a`.
const MATCH_TOL: f64 = 1e-9;
/// Tolerance on `|s| * L_a` at which a touch of 1 counts as marginal.
const SCALING_TOL: f64 = 1e-12;
/// Attractor points sampled when sizing the envelope.
const ENVELOPE_SAMPLES: usize = 4096;

/// Interpolation nodes `(x_i, y_i)`, `i = 0..=n`, with `x` strictly increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct InterpolationData {
    nodes: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for InterpolationData {
    type Error = Error;

    fn try_from(nodes: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(nodes)
    }
}

impl From<InterpolationData> for Vec<(f64, f64)> {
    fn from(d: InterpolationData) -> Self {
        d.nodes
    }
}

impl InterpolationData {
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidModel(format!(
                "need at least 3 nodes (2 regions), got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidModel("nodes must be finite".into()));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidModel(format!(
                "node abscissae must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Number of regions `n`.
    pub fn regions(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.nodes[i].0
    }

    pub fn y(&self, i: usize) -> f64 {
        self.nodes[i].1
    }

    /// `[x_{r}, x_{r+1}]` for 0-based region `r`.
    pub fn region_interval(&self, r: usize) -> (f64, f64) {
        (self.x(r), self.x(r + 1))
    }

    pub fn span(&self) -> (f64, f64) {
        (self.x(0), self.x(self.regions()))
    }

    /// Distance between the two farthest nodes.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                d = d.max((a.0 - b.0).hypot(a.1 - b.1));
            }
        }
        d
    }
}

/// A domain `[x_start, x_end]` given by node indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Domain {
    pub start: usize,
    pub end: usize,
}

impl From<(usize, usize)> for Domain {
    fn from((start, end): (usize, usize)) -> Self {
        Self { start, end }
    }
}

impl From<Domain> for (usize, usize) {
    fn from(d: Domain) -> Self {
        (d.start, d.end)
    }
}

impl Domain {
    /// Number of regions inside the domain.
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// True if 0-based region `r` lies inside the domain.
    pub fn contains_region(&self, r: usize) -> bool {
        self.start <= r && r < self.end
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DomainSpec {
    pub domains: Vec<Domain>,
}

impl DomainSpec {
    pub fn new(domains: Vec<Domain>) -> Self {
        Self { domains }
    }

    pub fn validate(&self, data: &InterpolationData) -> Result<()> {
        if self.domains.is_empty() {
            return Err(Error::InvalidModel(
                "at least one domain is required".into(),
            ));
        }
        let n = data.regions();
        for (k, d) in self.domains.iter().enumerate() {
            if d.end > n || d.start >= d.end {
                return Err(Error::InvalidModel(format!(
                    "domain {} = [{}, {}] must satisfy 0 <= start < end <= {n}",
                    k + 1,
                    d.start,
                    d.end
                )));
            }
            if d.len() < 2 {
                return Err(Error::InvalidModel(format!(
                    "domain {} = [{}, {}] must span at least two regions",
                    k + 1,
                    d.start,
                    d.end
                )));
            }
        }
        Ok(())
    }
}

/// Region-to-domain map, 0-based on both sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionDomainAssignment {
    pub gamma: Vec<usize>,
}

impl RegionDomainAssignment {
    pub fn new(gamma: Vec<usize>) -> Self {
        Self { gamma }
    }

    /// From the 1-based convention used in configuration files.
    pub fn from_one_based(gamma: &[usize]) -> Result<Self> {
        gamma
            .iter()
            .map(|&k| {
                k.checked_sub(1).ok_or_else(|| {
                    Error::InvalidModel("gamma entries are 1-based domain indices".into())
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn validate(&self, regions: usize, domains: usize) -> Result<()> {
        if self.gamma.len() != regions {
            return Err(Error::InvalidModel(format!(
                "gamma must assign a domain to each of the {regions} regions, got {} entries",
                self.gamma.len()
            )));
        }
        if let Some((i, &k)) = self.gamma.iter().enumerate().find(|(_, &k)| k >= domains) {
            return Err(Error::InvalidModel(format!(
                "gamma maps region {} to domain {}, but only {domains} domains exist",
                i + 1,
                k + 1
            )));
        }
        Ok(())
    }
}

/// `x -> slope * x + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub slope: f64,
    pub offset: f64,
}

impl AffineMap {
    /// Maps `[from_lo, from_hi]` onto `[to_lo, to_hi]`, reversing the
    /// orientation when `flip` is set.
    pub fn between(from: (f64, f64), to: (f64, f64), flip: bool) -> Self {
        let (t0, t1) = if flip { (to.1, to.0) } else { to };
        let slope = (t1 - t0) / (from.1 - from.0);
        Self {
            slope,
            offset: t0 - slope * from.0,
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.offset
    }

    pub fn invert(&self, x: f64) -> f64 {
        (x - self.offset) / self.slope
    }
}

/// Inputs to [`build_model`].
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub data: InterpolationData,
    pub domains: DomainSpec,
    pub gamma: RegionDomainAssignment,
    /// One scaling factor per region, or a single one shared by all regions.
    pub scaling: Vec<ScalarFunctionSpec>,
    pub ordinate_map: ScalarFunctionSpec,
    pub base: ScalarFunctionSpec,
    pub interpolant: ScalarFunctionSpec,
    /// Per-region orientation reversal of the affine maps; empty means none.
    pub flip: Vec<bool>,
}

/// A validated system, immutable after [`build_model`].
#[derive(Clone, Debug, Serialize)]
pub struct RifsModel {
    data: InterpolationData,
    domains: DomainSpec,
    gamma: RegionDomainAssignment,
    maps: Vec<AffineMap>,
    flip: Vec<bool>,
    scaling: Vec<ScalarFunctionSpec>,
    ordinate_map: ScalarFunctionSpec,
    base: ScalarFunctionSpec,
    interpolant: ScalarFunctionSpec,
    connection: NonnegativeMatrix,
    stochastic: NonnegativeMatrix,
    envelope: (f64, f64),
    warnings: Vec<String>,
}

/// Validates the inputs and assembles the system.
///
/// Builds orientation-preserving affine maps (unless flipped), derives the
/// connection and row-stochastic matrices, checks the endpoint conditions
/// that make every `W_i` send domain endpoint nodes to region endpoint
/// nodes, and checks the vertical scaling bound `|s_i| * L_a < 1`. A bound
/// that touches 1 only at isolated points is recorded as a warning.
pub fn build_model(spec: ModelSpec) -> Result<RifsModel> {
    let ModelSpec {
        data,
        domains,
        gamma,
        scaling,
        ordinate_map,
        base,
        interpolant,
        flip,
    } = spec;
    let n = data.regions();
    domains.validate(&data)?;
    gamma.validate(n, domains.domains.len())?;
    let mut warnings = Vec::new();

    let scaling = match scaling.len() {
        1 => vec![scaling[0].clone(); n],
        len if len == n => scaling,
        len => {
            return Err(Error::InvalidModel(format!(
                "expected 1 or {n} scaling factors, got {len}"
            )))
        }
    };
    for s in scaling.iter().chain([&ordinate_map, &base, &interpolant]) {
        s.validate()?;
    }
    let flip = match flip.len() {
        0 => vec![false; n],
        len if len == n => flip,
        len => {
            return Err(Error::InvalidModel(format!(
                "expected {n} orientation flags, got {len}"
            )))
        }
    };

    let maps: Vec<AffineMap> = (0..n)
        .map(|r| {
            let d = domains.domains[gamma.gamma[r]];
            AffineMap::between(
                (data.x(d.start), data.x(d.end)),
                data.region_interval(r),
                flip[r],
            )
        })
        .collect();
    if let Some((r, m)) = maps.iter().enumerate().find(|(_, m)| m.slope.abs() >= 1.0) {
        return Err(Error::InvalidModel(format!(
            "map onto region {} is not a contraction (|slope| = {})",
            r + 1,
            m.slope.abs()
        )));
    }

    let (connection, stochastic) = derive_connectivity(&domains, &gamma)?;
    if !check_irreducible(&connection) {
        warnings.push("connection matrix is reducible".to_string());
    }
    for (k, _) in domains.domains.iter().enumerate() {
        if !gamma.gamma.contains(&k) {
            warnings.push(format!("domain {} is not assigned to any region", k + 1));
        }
    }

    let (ymin, ymax) = data
        .nodes()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(y), hi.max(y))
        });
    let margin = 0.5 * (ymax - ymin) + 1.0;
    let envelope = (ymin - margin, ymax + margin);

    // interpolation conditions behind the endpoint equation
    for (i, &(x, y)) in data.nodes().iter().enumerate() {
        let v = interpolant.eval(x);
        if (v - y).abs() > MATCH_TOL * (1.0 + y.abs()) {
            return Err(Error::InvalidModel(format!(
                "interpolant misses node {i}: h({x}) = {v}, expected {y}"
            )));
        }
    }
    let mut used_endpoints: Vec<usize> = gamma
        .gamma
        .iter()
        .flat_map(|&k| [domains.domains[k].start, domains.domains[k].end])
        .collect();
    used_endpoints.sort_unstable();
    used_endpoints.dedup();
    for &i in &used_endpoints {
        let (x, y) = data.nodes()[i];
        let g = base.eval(x);
        if (g - y).abs() > MATCH_TOL * (1.0 + y.abs()) {
            return Err(Error::InvalidModel(format!(
                "base function misses domain endpoint node {i}: g({x}) = {g}, expected {y}"
            )));
        }
        let a = ordinate_map.eval(y);
        if (a - y).abs() > MATCH_TOL * (1.0 + y.abs()) {
            return Err(Error::InvalidModel(format!(
                "ordinate map does not fix domain endpoint value {y}: a({y}) = {a}"
            )));
        }
    }

    let lip_a = lipschitz_bound(&ordinate_map, envelope.0, envelope.1);
    warnings.extend(scaling_check(&data, &scaling, lip_a)?);

    let mut model = RifsModel {
        data,
        domains,
        gamma,
        maps,
        flip,
        scaling,
        ordinate_map,
        base,
        interpolant,
        connection,
        stochastic,
        envelope,
        warnings,
    };
    widen_envelope(&mut model)?;
    Ok(model)
}

/// Grows the envelope to hold a sampled attractor with margin, and repeats
/// the scaling check on the wider interval.
///
/// The margin around the node values is a guess; rough scaling factors
/// push the attractor well beyond it.
fn widen_envelope(model: &mut RifsModel) -> Result<()> {
    let mut refiner = Refiner::new(model);
    while refiner.current().len() < ENVELOPE_SAMPLES {
        refiner.step();
    }
    let (lo, hi) = refiner
        .current()
        .per_region
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidModel(
            "attractor samples are not finite".into(),
        ));
    }
    let (elo, ehi) = model.envelope;
    if lo >= elo && hi <= ehi {
        return Ok(());
    }
    let margin = 0.5 * (hi - lo) + 1.0;
    model.envelope = (elo.min(lo - margin), ehi.max(hi + margin));
    let lip_a = lipschitz_bound(&model.ordinate_map, model.envelope.0, model.envelope.1);
    for w in scaling_check(&model.data, &model.scaling, lip_a)? {
        if !model.warnings.contains(&w) {
            model.warnings.push(w);
        }
    }
    Ok(())
}

/// Rejects `|s_i| * L_a >= 1` except where it touches 1 at isolated points,
/// which yields a warning.
fn scaling_check(
    data: &InterpolationData,
    scaling: &[ScalarFunctionSpec],
    lip_a: f64,
) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    for (r, s) in scaling.iter().enumerate() {
        let (lo, hi) = data.region_interval(r);
        let e = abs_extrema(s, lo, hi);
        let bound = e.max_abs * lip_a;
        if bound > 1.0 + SCALING_TOL {
            return Err(Error::InvalidModel(format!(
                "scaling bound violated on region {}: max |s| * L_a = {bound} >= 1",
                r + 1
            )));
        }
        if bound >= 1.0 - SCALING_TOL {
            // analytic s: |s| * L_a = 1 on a set of positive length only if constant
            if e.min_abs * lip_a >= 1.0 - SCALING_TOL {
                return Err(Error::InvalidModel(format!(
                    "scaling bound violated on region {}: |s| * L_a = 1 throughout",
                    r + 1
                )));
            }
            warnings.push(format!(
                "region {}: |s| * L_a reaches 1 at isolated points (max {bound})",
                r + 1
            ));
        }
    }

    Ok(warnings)
}

/// Lagrange polynomial through the nodes at domain endpoints; the natural
/// choice of base function `g`.
///
/// Taking `g` equal to an interpolant through every node makes that
/// interpolant the attractor, whatever the scaling factors.
pub fn endpoint_interpolant(
    data: &InterpolationData,
    domains: &DomainSpec,
) -> Result<ScalarFunctionSpec> {
    let mut idx: Vec<usize> = domains
        .domains
        .iter()
        .flat_map(|d| [d.start, d.end])
        .collect();
    idx.sort_unstable();
    idx.dedup();
    let nodes: Vec<(f64, f64)> = idx.iter().map(|&i| data.nodes()[i]).collect();
    lagrange_from_nodes(&nodes)
}

/// Connection matrix `C` and row-stochastic matrix `M`.
///
/// `M_ij = 1 / a_i` when region `i` lies inside the domain assigned to
/// region `j`, where `a_i` counts such `j`; `C_ij = 1` iff `M_ji > 0`.
pub fn derive_connectivity(
    domains: &DomainSpec,
    gamma: &RegionDomainAssignment,
) -> Result<(NonnegativeMatrix, NonnegativeMatrix)> {
    let n = gamma.gamma.len();
    let mut connection = NonnegativeMatrix::zeros(n);
    let mut stochastic = NonnegativeMatrix::zeros(n);
    for i in 0..n {
        let inside: Vec<usize> = (0..n)
            .filter(|&j| domains.domains[gamma.gamma[j]].contains_region(i))
            .collect();
        if inside.is_empty() {
            return Err(Error::InvalidModel(format!(
                "region {} lies in no assigned domain",
                i + 1
            )));
        }
        let p = 1.0 / inside.len() as f64;
        for &j in &inside {
            stochastic.set(i, j, p);
            connection.set(j, i, 1.0);
        }
    }
    Ok((connection, stochastic))
}

impl RifsModel {
    pub fn data(&self) -> &InterpolationData {
        &self.data
    }

    pub fn domains(&self) -> &DomainSpec {
        &self.domains
    }

    pub fn gamma(&self) -> &RegionDomainAssignment {
        &self.gamma
    }

    pub fn regions(&self) -> usize {
        self.data.regions()
    }

    pub fn map(&self, region: usize) -> &AffineMap {
        &self.maps[region]
    }

    pub fn is_flipped(&self, region: usize) -> bool {
        self.flip[region]
    }

    /// The domain assigned to `region`.
    pub fn domain_of(&self, region: usize) -> Domain {
        self.domains.domains[self.gamma.gamma[region]]
    }

    pub fn domain_interval(&self, region: usize) -> (f64, f64) {
        let d = self.domain_of(region);
        (self.data.x(d.start), self.data.x(d.end))
    }

    pub fn scaling(&self, region: usize) -> &ScalarFunctionSpec {
        &self.scaling[region]
    }

    pub fn ordinate_map(&self) -> &ScalarFunctionSpec {
        &self.ordinate_map
    }

    pub fn base(&self) -> &ScalarFunctionSpec {
        &self.base
    }

    pub fn interpolant(&self) -> &ScalarFunctionSpec {
        &self.interpolant
    }

    pub fn connection(&self) -> &NonnegativeMatrix {
        &self.connection
    }

    pub fn stochastic(&self) -> &NonnegativeMatrix {
        &self.stochastic
    }

    /// The y-envelope `H`.
    pub fn envelope(&self) -> (f64, f64) {
        self.envelope
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `F_i(x, y)` without the domain check.
    #[inline]
    pub(crate) fn vertical(&self, region: usize, x: f64, y: f64) -> f64 {
        let lx = self.maps[region].apply(x);
        self.scaling[region].eval(lx) * (self.ordinate_map.eval(y) - self.base.eval(x))
            + self.interpolant.eval(lx)
    }

    /// `F_i(x, y) = s_i(L_i(x)) * (a(y) - g(x)) + h(L_i(x))` for `x` in the
    /// region's domain.
    pub fn eval_f(&self, region: usize, x: f64, y: f64) -> Result<f64> {
        if region >= self.regions() {
            return Err(Error::InvalidModel(format!("no region {}", region + 1)));
        }
        let (lo, hi) = self.domain_interval(region);
        let slack = 1e-12 * (hi - lo);
        if x < lo - slack || x > hi + slack {
            return Err(Error::InvalidModel(format!(
                "x = {x} lies outside the domain [{lo}, {hi}] of region {}",
                region + 1
            )));
        }
        Ok(self.vertical(region, x, y))
    }
}
