//! Config-driven front end: generate curves and surfaces, and measure their
//! dimension.

pub mod config;
pub mod export;

use std::fmt;
use std::path::{Path, PathBuf};

use fractalis::dimension::{analyze_curve, spectral_bounds, Estimate};
use fractalis::rifs::{contraction_report, functional_residual, refine_attractor, RifsModel};
use fractalis::surface::{
    estimate_surface_dimension, eval_surface, surface_dimension_formula, Curve, SurfaceSpec,
    SurfaceTerm,
};
use serde::Serialize;

use config::{Mode, RunConfig, SurfaceTermConfig};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, or a model that fails validation.
    Config(String),
    /// A numerical procedure failed on valid input.
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn from_lib(context: &str, e: fractalis::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(format!("{context}: {e}"))
        } else {
            CliError::Config(format!("{context}: {e}"))
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Command-line values that replace config fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub depth: Option<u32>,
    pub resolution: Option<usize>,
}

/// A loaded config with its overrides applied.
struct Job {
    config: RunConfig,
    config_dir: PathBuf,
    out_dir: PathBuf,
}

impl Job {
    fn load(mode: Mode, path: &Path, ov: &Overrides) -> Result<Self, CliError> {
        let mut config = config::load(path)?;
        if config.mode != mode {
            return Err(CliError::Config(format!(
                "mode: config is for {:?} but the command is {:?}",
                config.mode, mode
            )));
        }
        if let Some(d) = ov.depth {
            config.depth = d;
        }
        if let (Some(r), Some(s)) = (ov.resolution, config.surface.as_mut()) {
            s.resolution = r;
        }
        let config_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let out_dir = match (&ov.out_dir, &config.output.dir) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) => config_dir.join(d),
            (None, None) => PathBuf::from("."),
        };
        Ok(Self {
            config,
            config_dir,
            out_dir,
        })
    }

    fn curve_model(&self) -> Result<RifsModel, CliError> {
        self.config
            .curve
            .as_ref()
            .ok_or_else(|| CliError::Config("curve: section missing".into()))?
            .build("curve")
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

#[derive(Serialize)]
struct CurveReport {
    depth: u32,
    points: usize,
    points_per_region: Vec<usize>,
    envelope: (f64, f64),
    functional_residual: f64,
    contraction: fractalis::rifs::ContractionReport,
    connection: Vec<Vec<f64>>,
    stochastic: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

/// Writes `curve.csv` and `curve_report.json`.
pub fn cmd_curve(config_path: &Path, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let job = Job::load(Mode::Curve, config_path, ov)?;
    let model = job.curve_model()?;
    let contraction = contraction_report(&model).map_err(|e| CliError::from_lib("curve", e))?;
    let sampling = refine_attractor(&model, job.config.depth);
    let points = sampling.points();
    let mut warnings = model.warnings().to_vec();
    warnings.extend(contraction.warnings.iter().cloned());
    let report = CurveReport {
        depth: sampling.depth,
        points: points.len(),
        points_per_region: sampling.per_region.iter().map(Vec::len).collect(),
        envelope: model.envelope(),
        functional_residual: functional_residual(&model, &sampling),
        contraction,
        connection: model.connection().rows(),
        stochastic: model.stochastic().rows(),
        warnings,
    };
    Ok(vec![
        job.write("curve.csv", export::curve_csv(&points).as_bytes())?,
        job.write_json("curve_report.json", &report)?,
    ])
}

#[derive(Serialize)]
struct SurfaceCurveInfo {
    axis: &'static str,
    index: usize,
    depth: u32,
    samples: usize,
    /// Dimension used in the formula, declared or predicted.
    dimension: Option<f64>,
    dimension_source: String,
    /// Spectral bounds on the curve's dimension, when they apply.
    bounds: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct SurfaceReport {
    resolution: usize,
    /// Heights mapped to gray 0 and 65535 in the PGM.
    height_min: f64,
    height_max: f64,
    corner_height: f64,
    curves: Vec<SurfaceCurveInfo>,
    formula_dimension: Option<f64>,
    /// The formula applied to the lower and to the upper curve bounds.
    formula_bounds: Option<(f64, f64)>,
    estimate: Option<Estimate>,
    notes: Vec<String>,
}

fn build_terms(
    job: &Job,
    terms: &[SurfaceTermConfig],
    axis: &'static str,
    resolution: usize,
    info: &mut Vec<SurfaceCurveInfo>,
) -> Result<Vec<SurfaceTerm>, CliError> {
    terms
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let field = format!("surface.{axis}_terms[{index}].curve");
            let model = t.curve.resolve(&job.config_dir, &field)?.build(&field)?;
            t.coeff.validate().map_err(|e| {
                CliError::Config(format!("surface.{axis}_terms[{index}].coeff: {e}"))
            })?;
            let max_gap = 1.0 / (4.0 * resolution as f64);
            let (curve, depth) = Curve::from_model(&model, job.config.depth, max_gap)
                .map_err(|e| CliError::from_lib(&field, e))?;
            let bounds = spectral_bounds(&model);
            let (dimension, dimension_source) = match &bounds {
                Ok(t) => match t.exact {
                    Some(d) => (Some(d), "spectral prediction".to_string()),
                    None => (
                        None,
                        format!(
                            "spectral bounds [{}, {}] only",
                            t.lower_bound, t.upper_bound
                        ),
                    ),
                },
                Err(e) => (None, e.to_string()),
            };
            info.push(SurfaceCurveInfo {
                axis,
                index,
                depth,
                samples: curve.len(),
                dimension,
                dimension_source,
                bounds: bounds.ok().map(|t| (t.lower_bound, t.upper_bound)),
            });
            Ok(SurfaceTerm {
                curve,
                coeff: t.coeff.clone(),
            })
        })
        .collect()
}

/// Writes `surface.pgm`, optionally `surface.obj`, and `surface_report.json`.
pub fn cmd_surface(config_path: &Path, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let job = Job::load(Mode::Surface, config_path, ov)?;
    let cfg = job
        .config
        .surface
        .clone()
        .ok_or_else(|| CliError::Config("surface: section missing".into()))?;
    if cfg.resolution < 2 {
        return Err(CliError::Config(format!(
            "surface.resolution: must be at least 2, got {}",
            cfg.resolution
        )));
    }
    let mut curves = Vec::new();
    let spec = SurfaceSpec {
        x_terms: build_terms(&job, &cfg.x_terms, "x", cfg.resolution, &mut curves)?,
        y_terms: build_terms(&job, &cfg.y_terms, "y", cfg.resolution, &mut curves)?,
    };
    let field =
        eval_surface(&spec, cfg.resolution).map_err(|e| CliError::from_lib("surface", e))?;

    let mut notes = Vec::new();
    if let Some(d) = &cfg.dims {
        if d.x.len() != cfg.x_terms.len() || d.y.len() != cfg.y_terms.len() {
            return Err(CliError::Config(format!(
                "surface.dims: expected {} x and {} y dimensions",
                cfg.x_terms.len(),
                cfg.y_terms.len()
            )));
        }
        for c in curves.iter_mut() {
            let list = if c.axis == "x" { &d.x } else { &d.y };
            c.dimension = Some(list[c.index]);
            c.dimension_source = "declared".into();
        }
    }
    let formula_dimension = if curves.iter().all(|c| c.dimension.is_some()) {
        let dims = |axis: &str| -> Vec<f64> {
            curves
                .iter()
                .filter(|c| c.axis == axis)
                .filter_map(|c| c.dimension)
                .collect()
        };
        Some(
            surface_dimension_formula(&dims("x"), &dims("y"))
                .map_err(|e| CliError::Config(format!("surface.dims: {e}")))?,
        )
    } else {
        notes.push("some curve dimensions are unknown; declare them under surface.dims".into());
        None
    };
    let formula_bounds = if curves.iter().all(|c| c.bounds.is_some()) {
        let side = |axis: &str, pick: fn((f64, f64)) -> f64| -> Vec<f64> {
            curves
                .iter()
                .filter(|c| c.axis == axis)
                .filter_map(|c| c.bounds.map(pick))
                .collect()
        };
        let lo = surface_dimension_formula(&side("x", |b| b.0), &side("y", |b| b.0));
        let hi = surface_dimension_formula(&side("x", |b| b.1), &side("y", |b| b.1));
        lo.ok().zip(hi.ok())
    } else {
        None
    };
    let estimate = if cfg.scales.is_empty() {
        None
    } else {
        Some(
            estimate_surface_dimension(&field, &cfg.scales)
                .map_err(|e| CliError::from_lib("surface.scales", e))?,
        )
    };

    let (height_min, height_max) = field.min_max();
    let report = SurfaceReport {
        resolution: cfg.resolution,
        height_min,
        height_max,
        corner_height: field.get(0, 0),
        curves,
        formula_dimension,
        formula_bounds,
        estimate,
        notes,
    };
    let mut written = vec![job.write("surface.pgm", &export::pgm(&field))?];
    if cfg.obj {
        written.push(job.write("surface.obj", export::obj(&field).as_bytes())?);
    }
    written.push(job.write_json("surface_report.json", &report)?);
    Ok(written)
}

/// Writes `dimension_report.json` and `box_counts.csv`.
pub fn cmd_analyze(config_path: &Path, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let job = Job::load(Mode::Analyze, config_path, ov)?;
    let model = job.curve_model()?;
    let mut report = analyze_curve(&model, &job.config.analysis)
        .map_err(|e| CliError::from_lib("analyze", e))?;
    report.notes.extend(model.warnings().iter().cloned());
    let csv = report
        .estimate
        .as_ref()
        .map(|e| export::box_count_csv(&e.series))
        .unwrap_or_default();
    Ok(vec![
        job.write_json("dimension_report.json", &report)?,
        job.write("box_counts.csv", csv.as_bytes())?,
    ])
}

/// Dispatches on the mode.
pub fn run(mode: Mode, config_path: &Path, ov: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    match mode {
        Mode::Curve => cmd_curve(config_path, ov),
        Mode::Surface => cmd_surface(config_path, ov),
        Mode::Analyze => cmd_analyze(config_path, ov),
    }
}
