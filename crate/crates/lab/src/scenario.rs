//! Scenario files and their materialisation into initial data.
//!
//! A scenario file is one JSON object with the sections `model`, `grid`,
//! `initial`, `solver` and `seeds`. It may instead name a built-in preset
//! (`"preset"`, with optional `"params"`); any sections given next to the
//! preset are merged over the preset's own.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use eplab_core::profiles::{self, DensityProfile, VelocityProfile};
use eplab_core::{Family, FlowField, GasModel, Grid1D, SolverConfig};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{io_err, LabError, Result};
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub x0: f64,
    pub family: Family,
}

impl Seed {
    /// File stem used for the path dump.
    pub fn label(&self, index: usize) -> String {
        format!("{:02}_{}", index, self.family.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Profiles {
        density: DensityProfile,
        velocity: VelocityProfile,
    },
    /// Columns `x, rho0, u0`, resolved against the scenario file's directory.
    Csv { path: PathBuf },
    Samples {
        x: Vec<f64>,
        rho0: Vec<f64>,
        u0: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: GasModel,
    pub grid: Grid1D,
    pub initial: InitialSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seeds: Vec<Seed>,
    /// Preset parameters, echoed into every report.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, f64>,
}

/// A configuration together with its sampled initial data.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub init: FlowField,
    base_dir: PathBuf,
}

/// Command-line style overrides applied after loading.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let base_dir = base_dir.into();
        config.solver.validate()?;
        let init = materialize(&config, &base_dir)?;
        Ok(Self {
            config,
            init,
            base_dir,
        })
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn model(&self) -> &GasModel {
        &self.config.model
    }

    pub fn with_overrides(&self, o: &Overrides) -> Result<Self> {
        let mut config = self.config.clone();
        if let Some(n) = o.n {
            let g = config.grid;
            config.grid = Grid1D::new(g.x_min(), g.x_max(), n)?;
        }
        if let Some(cfl) = o.cfl {
            config.solver.cfl = cfl;
        }
        if let Some(t_end) = o.t_end {
            config.solver.t_end = t_end;
        }
        Self::new(config, self.base_dir.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.config)?)
    }
}

/// Loads a scenario file; relative CSV paths resolve against its directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    build_scenario(&text, &base)
}

/// Parses scenario text and samples the initial data.
pub fn build_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    let value: Value = serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))?;
    let config = resolve_config(value)?;
    Scenario::new(config, base_dir)
}

/// A preset by name, with parameter overrides.
pub fn preset_scenario(name: &str, params: &Map<String, Value>) -> Result<Scenario> {
    let config = presets::preset_config(name, params)?;
    Scenario::new(config, ".")
}

fn resolve_config(value: Value) -> Result<ScenarioConfig> {
    let Value::Object(mut obj) = value else {
        return Err(LabError::Parse("scenario must be a JSON object".into()));
    };
    let preset = obj.remove("preset");
    let params = obj.remove("params");
    let merged = match preset {
        None => {
            if params.is_some() {
                return Err(LabError::Parse("`params` given without a `preset`".into()));
            }
            Value::Object(obj)
        }
        Some(Value::String(name)) => {
            let params = match params {
                None => Map::new(),
                Some(Value::Object(p)) => p,
                Some(_) => return Err(LabError::Parse("`params` must be an object".into())),
            };
            if name == presets::CUSTOM {
                if !params.is_empty() {
                    return Err(LabError::UnsupportedParameters(
                        "the custom preset takes no parameters".into(),
                    ));
                }
                Value::Object(obj)
            } else {
                let base = presets::preset_config(&name, &params)?;
                let mut base = serde_json::to_value(base)?;
                merge(&mut base, Value::Object(obj));
                base
            }
        }
        Some(_) => return Err(LabError::Parse("`preset` must be a string".into())),
    };
    serde_json::from_value(merged).map_err(|e| LabError::Parse(e.to_string()))
}

/// Objects merge key by key; anything else replaces.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    // Initial data is replaced whole; its kinds do not mix.
                    Some(slot) if k != "initial" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn materialize(config: &ScenarioConfig, base_dir: &Path) -> Result<FlowField> {
    let grid = config.grid;
    match &config.initial {
        InitialSpec::Profiles { density, velocity } => {
            Ok(profiles::sample(grid, density, velocity)?)
        }
        InitialSpec::Csv { path } => {
            let full = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            let (x, rho0, u0) = read_initial_csv(&full)?;
            resample(grid, &x, &rho0, &u0)
        }
        InitialSpec::Samples { x, rho0, u0 } => resample(grid, x, rho0, u0),
    }
}

#[derive(Deserialize)]
struct InitialRow {
    x: f64,
    rho0: f64,
    u0: f64,
}

/// Reads `x, rho0, u0` columns.
pub fn read_initial_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let (mut x, mut rho, mut u) = (Vec::new(), Vec::new(), Vec::new());
    for row in reader.deserialize() {
        let row: InitialRow =
            row.map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))?;
        x.push(row.x);
        rho.push(row.rho0);
        u.push(row.u0);
    }
    Ok((x, rho, u))
}

/// Linear interpolation of samples onto the cell centres.
fn resample(grid: Grid1D, x: &[f64], rho0: &[f64], u0: &[f64]) -> Result<FlowField> {
    if x.len() < 2 || rho0.len() != x.len() || u0.len() != x.len() {
        return Err(LabError::Parse(
            "initial samples need at least two rows and equal column lengths".into(),
        ));
    }
    if x.windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(LabError::Parse("sample x must increase strictly".into()));
    }
    let (first, last) = (x[0], x[x.len() - 1]);
    let centers = grid.centers();
    if centers[0] < first || centers[centers.len() - 1] > last {
        return Err(LabError::UnsupportedParameters(format!(
            "grid centres [{}, {}] reach beyond the samples [{first}, {last}]",
            centers[0],
            centers[centers.len() - 1]
        )));
    }
    let lerp = |values: &[f64], p: f64| {
        let j = x.partition_point(|&v| v <= p).clamp(1, x.len() - 1);
        let w = (p - x[j - 1]) / (x[j] - x[j - 1]);
        if w == 0.0 {
            values[j - 1]
        } else {
            values[j - 1] * (1.0 - w) + values[j] * w
        }
    };
    let rho = centers.iter().map(|&p| lerp(rho0, p)).collect();
    let u = centers.iter().map(|&p| lerp(u0, p)).collect();
    Ok(FlowField::new(grid, rho, u)?)
}
