//! The JSON run configuration.

use std::path::{Path, PathBuf};

use fractalis::catalog::{lagrange_from_nodes, BivariateFunctionSpec, ScalarFunctionSpec};
use fractalis::dimension::CurveEstimateOptions;
use fractalis::rifs::{
    build_model, endpoint_interpolant, Domain, DomainSpec, InterpolationData, ModelSpec,
    RegionDomainAssignment, RifsModel,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Curve,
    Surface,
    Analyze,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Refinement depth of the curve, or the minimum depth of surface curves.
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default)]
    pub curve: Option<CurveConfig>,
    #[serde(default)]
    pub surface: Option<SurfaceConfig>,
    #[serde(default)]
    pub analysis: CurveEstimateOptions,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_depth() -> u32 {
    8
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths resolve against the config file's directory.
    pub dir: Option<PathBuf>,
}

/// One curve: data nodes, domains as pairs of 0-based node indices, and the
/// 1-based domain of every region.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub nodes: Vec<(f64, f64)>,
    pub domains: Vec<(usize, usize)>,
    pub gamma: Vec<usize>,
    pub scaling: Scaling,
    /// Defaults to the identity.
    #[serde(default)]
    pub ordinate_map: Option<ScalarFunctionSpec>,
    /// Defaults to the Lagrange polynomial through the domain endpoints.
    #[serde(default)]
    pub base: Option<ScalarFunctionSpec>,
    /// Defaults to the Lagrange polynomial through all nodes.
    #[serde(default)]
    pub interpolant: Option<ScalarFunctionSpec>,
    #[serde(default)]
    pub flip: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scaling {
    Shared(ScalarFunctionSpec),
    PerRegion(Vec<ScalarFunctionSpec>),
}

/// A curve given inline or as the path of another config holding one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSource {
    Inline(Box<CurveConfig>),
    File(PathBuf),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceTermConfig {
    pub curve: CurveSource,
    pub coeff: BivariateFunctionSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub x_terms: Vec<SurfaceTermConfig>,
    #[serde(default)]
    pub y_terms: Vec<SurfaceTermConfig>,
    /// Declared curve dimensions, overriding the spectral prediction.
    #[serde(default)]
    pub dims: Option<DeclaredDims>,
    /// Mesh sizes for a box-count estimate of the surface; none skips it.
    #[serde(default)]
    pub scales: Vec<f64>,
    #[serde(default = "default_true")]
    pub obj: bool,
}

fn default_resolution() -> usize {
    256
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredDims {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Reads and parses a config, naming the file in errors.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl CurveConfig {
    /// Validates the curve and builds the model; `field` names it in errors.
    pub fn build(&self, field: &str) -> Result<RifsModel, CliError> {
        let err = |e: fractalis::Error| CliError::Config(format!("{field}: {e}"));
        let data = InterpolationData::new(self.nodes.clone()).map_err(err)?;
        let domains = DomainSpec::new(
            self.domains
                .iter()
                .map(|&(start, end)| Domain { start, end })
                .collect(),
        );
        domains
            .validate(&data)
            .map_err(|e| CliError::Config(format!("{field}.domains: {e}")))?;
        let gamma = RegionDomainAssignment::from_one_based(&self.gamma)
            .map_err(|e| CliError::Config(format!("{field}.gamma: {e}")))?;
        let base = match &self.base {
            Some(b) => b.clone(),
            None => endpoint_interpolant(&data, &domains).map_err(err)?,
        };
        let interpolant = match &self.interpolant {
            Some(h) => h.clone(),
            None => lagrange_from_nodes(&self.nodes).map_err(err)?,
        };
        let scaling = match &self.scaling {
            Scaling::Shared(s) => vec![s.clone()],
            Scaling::PerRegion(v) => v.clone(),
        };
        build_model(ModelSpec {
            data,
            domains,
            gamma,
            scaling,
            ordinate_map: self
                .ordinate_map
                .clone()
                .unwrap_or_else(ScalarFunctionSpec::identity),
            base,
            interpolant,
            flip: self.flip.clone(),
        })
        .map_err(err)
    }
}

impl CurveSource {
    /// The inline curve, or the `curve` section of the referenced config.
    pub fn resolve(&self, config_dir: &Path, field: &str) -> Result<CurveConfig, CliError> {
        match self {
            CurveSource::Inline(c) => Ok((**c).clone()),
            CurveSource::File(p) => {
                let path = config_dir.join(p);
                load(&path)?.curve.ok_or_else(|| {
                    CliError::Config(format!("{field}: {} has no curve section", path.display()))
                })
            }
        }
    }
}
