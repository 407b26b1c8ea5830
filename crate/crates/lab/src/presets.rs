//! Built-in scenarios.
//!
//! Every preset takes named numeric parameters; unknown names and values
//! outside a preset's range are rejected with
//! [`LabError::UnsupportedParameters`].

use std::collections::BTreeMap;

use eplab_core::profiles::{self, DensityProfile, VelocityProfile};
use eplab_core::{classify, to_riemann, Family, GasModel, Grid1D, SolverConfig, Verdict};
use serde_json::{Map, Value};

use crate::error::{LabError, Result};
use crate::scenario::{InitialSpec, ScenarioConfig, Seed};

pub const PAPER_EX4: &str = "paper-ex4";
pub const GAUSS_SUBCRITICAL: &str = "gauss-subcritical";
pub const EXPANDING_SUBCRITICAL: &str = "expanding-subcritical";
pub const COMPRESSIVE_SUBCRITICAL: &str = "compressive-subcritical";
pub const ISOTHERMAL_BREAKDOWN: &str = "isothermal-breakdown";
pub const PRESSURELESS: &str = "pressureless";
pub const CUSTOM: &str = "custom";

/// `(name, one-line description)` for every preset.
pub const PRESETS: &[(&str, &str)] = &[
    (
        PAPER_EX4,
        "gas at rest on a density step 1 -> 1/2 ramped over [0, eps]; breaks down for small eps",
    ),
    (
        GAUSS_SUBCRITICAL,
        "algebraic bump at rest with bounded slopes; smooth for all time",
    ),
    (
        EXPANDING_SUBCRITICAL,
        "algebraic bump with an outward tanh velocity; smooth",
    ),
    (
        COMPRESSIVE_SUBCRITICAL,
        "algebraic bump with a weak inward velocity dip; smooth",
    ),
    (
        ISOTHERMAL_BREAKDOWN,
        "isothermal bump with a strong inward velocity dip; breaks down",
    ),
    (
        PRESSURELESS,
        "pressureless bump with an inward dip of adjustable slope at the centre",
    ),
    (
        CUSTOM,
        "user-supplied model, grid and initial data (CSV or inline samples)",
    ),
];

/// Reads numeric parameters and remembers which ones were consumed.
struct Params<'a> {
    map: &'a Map<String, Value>,
    used: Vec<&'static str>,
    record: BTreeMap<String, f64>,
}

impl<'a> Params<'a> {
    fn new(map: &'a Map<String, Value>) -> Self {
        Self {
            map,
            used: Vec::new(),
            record: BTreeMap::new(),
        }
    }

    fn get(&mut self, name: &'static str, default: f64) -> Result<f64> {
        self.used.push(name);
        let v = match self.map.get(name) {
            None => default,
            Some(v) => v.as_f64().ok_or_else(|| {
                LabError::UnsupportedParameters(format!("`{name}` must be a number"))
            })?,
        };
        if !v.is_finite() {
            return Err(LabError::UnsupportedParameters(format!(
                "`{name}` must be finite"
            )));
        }
        self.record.insert(name.to_string(), v);
        Ok(v)
    }

    fn positive(&mut self, name: &'static str, default: f64) -> Result<f64> {
        let v = self.get(name, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(LabError::UnsupportedParameters(format!(
                "`{name}` must be positive, got {v}"
            )))
        }
    }

    fn count(&mut self, name: &'static str, default: usize) -> Result<usize> {
        let v = self.get(name, default as f64)?;
        if v >= 8.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(LabError::UnsupportedParameters(format!(
                "`{name}` must be an integer >= 8"
            )))
        }
    }

    fn optional(&mut self, name: &'static str) -> Result<Option<f64>> {
        if self.map.contains_key(name) {
            self.positive(name, 0.0).map(Some)
        } else {
            self.used.push(name);
            Ok(None)
        }
    }

    fn finish(self, preset: &str) -> Result<BTreeMap<String, f64>> {
        let unknown: Vec<&String> = self
            .map
            .keys()
            .filter(|k| !self.used.contains(&k.as_str()))
            .collect();
        if unknown.is_empty() {
            Ok(self.record)
        } else {
            Err(LabError::UnsupportedParameters(format!(
                "{preset} does not take {unknown:?}"
            )))
        }
    }
}

fn model(a: f64, gamma: f64, k: f64) -> Result<GasModel> {
    GasModel::new(a, gamma, k).map_err(|e| LabError::UnsupportedParameters(e.to_string()))
}

fn seeds(lo: f64, hi: f64, count: usize) -> Vec<Seed> {
    (0..count)
        .flat_map(|i| {
            let x0 = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            [
                Seed {
                    x0,
                    family: Family::Lambda,
                },
                Seed {
                    x0,
                    family: Family::Mu,
                },
            ]
        })
        .collect()
}

fn bump(amplitude: f64, width: f64) -> DensityProfile {
    DensityProfile::Bump {
        lorentz_amplitude: amplitude,
        lorentz_width: width,
        gauss_amplitude: 0.0,
        gauss_width: 1.0,
        center: 0.0,
    }
}

/// Five crossings of the bump's full width at half maximum by the fastest
/// initial characteristic.
fn crossing_time(
    grid: Grid1D,
    rho: &DensityProfile,
    u: &VelocityProfile,
    width: f64,
    model: &GasModel,
) -> Result<f64> {
    let init = profiles::sample(grid, rho, u)?;
    let rf = to_riemann(&init, model)?;
    let speed = rf
        .lambda
        .iter()
        .chain(&rf.mu)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(5.0 * 2.0 * width / speed)
}

pub fn preset_config(name: &str, params: &Map<String, Value>) -> Result<ScenarioConfig> {
    let mut p = Params::new(params);
    let mut config = match name {
        PAPER_EX4 => paper_ex4(&mut p)?,
        GAUSS_SUBCRITICAL | EXPANDING_SUBCRITICAL | COMPRESSIVE_SUBCRITICAL => {
            subcritical(name, &mut p)?
        }
        ISOTHERMAL_BREAKDOWN => isothermal_breakdown(&mut p)?,
        PRESSURELESS => pressureless(&mut p)?,
        CUSTOM => {
            return Err(LabError::UnsupportedParameters(
                "the custom preset needs model, grid and initial sections in a scenario file"
                    .into(),
            ))
        }
        other => return Err(LabError::UnknownPreset(other.to_string())),
    };
    config.metadata = p.finish(name)?;
    Ok(config)
}

fn paper_ex4(p: &mut Params) -> Result<ScenarioConfig> {
    let eps = p.positive("eps", 0.1)?;
    let sigma = p.positive("sigma", 0.1 * eps)?;
    let plateau = p.positive("plateau", 1.5)?;
    let taper_width = p.positive("taper_width", 2.0)?;
    let gamma = p.get("gamma", 3.0)?;
    let a = p.positive("A", 1.0)?;
    let k = p.positive("k", 1.0)?;
    let n = p.count("n", 16384)?;
    let half = p.positive("half_width", 4.0)?;
    let t_end = p.positive("t_end", 1.0)?;
    let snapshot_dt = p.positive("snapshot_dt", 0.005)?;
    let density = DensityProfile::Ramp {
        eps,
        sigma,
        plateau,
        taper_width,
    };
    density
        .validate()
        .map_err(|e| LabError::UnsupportedParameters(e.to_string()))?;
    if half <= eps + plateau {
        return Err(LabError::UnsupportedParameters(
            "half_width must exceed eps + plateau".into(),
        ));
    }
    Ok(ScenarioConfig {
        name: PAPER_EX4.into(),
        model: model(a, gamma, k)?,
        grid: Grid1D::new(-half, half, n)?,
        initial: InitialSpec::Profiles {
            density,
            velocity: VelocityProfile::Rest,
        },
        solver: SolverConfig {
            t_end,
            snapshot_dt,
            ..Default::default()
        },
        seeds: seeds(-1.0, 1.0 + eps, 12),
        metadata: BTreeMap::new(),
    })
}

fn subcritical(name: &str, p: &mut Params) -> Result<ScenarioConfig> {
    let default_gamma = if name == COMPRESSIVE_SUBCRITICAL {
        2.0
    } else {
        1.0
    };
    let gamma = p.get("gamma", default_gamma)?;
    let a = p.positive("A", 1.0)?;
    let k = p.positive("k", 1.0)?;
    let amplitude = p.positive("amplitude", 1.0)?;
    let width = p.positive("width", 2.0)?;
    let n = p.count("n", 4096)?;
    let half = p.positive("half_width", 20.0)?;
    let snapshot_dt = p.positive("snapshot_dt", 0.02)?;
    let velocity = match name {
        EXPANDING_SUBCRITICAL => {
            let speed = p.positive("speed", if gamma == 1.0 { 1.8 } else { 1.6 })?;
            let w = p.positive("speed_width", 1.0)?;
            VelocityProfile::Tanh {
                amplitude: -speed,
                width: w,
                center: 0.0,
            }
        }
        COMPRESSIVE_SUBCRITICAL => {
            let slope = p.get("slope", -0.3)?;
            let w = p.positive("dip_width", 1.0)?;
            VelocityProfile::Dip {
                slope,
                width: w,
                center: 0.0,
            }
        }
        _ => VelocityProfile::Rest,
    };
    let t_end_override = p.optional("t_end")?;
    let model = model(a, gamma, k)?;
    let grid = Grid1D::new(-half, half, n)?;
    let density = bump(amplitude, width);
    let t_end = match t_end_override {
        Some(t) => t,
        None => crossing_time(grid, &density, &velocity, width, &model)?,
    };
    p.record.insert("t_end".into(), t_end);

    let init = profiles::sample(grid, &density, &velocity)?;
    let report = classify(&init, &model)?;
    if name == GAUSS_SUBCRITICAL && !report.bounded_slopes_condition {
        return Err(LabError::UnsupportedParameters(
            "gauss-subcritical needs |r0|, |s0| <= sqrt(2 k rho0) everywhere".into(),
        ));
    }
    if report.verdict != Verdict::GlobalSmooth {
        return Err(LabError::UnsupportedParameters(format!(
            "{name} parameters are not sub-critical (verdict {:?})",
            report.verdict
        )));
    }
    let spread = 0.75 * width;
    Ok(ScenarioConfig {
        name: name.into(),
        model,
        grid,
        initial: InitialSpec::Profiles { density, velocity },
        solver: SolverConfig {
            t_end,
            snapshot_dt,
            ..Default::default()
        },
        seeds: seeds(-spread, spread, 12),
        metadata: BTreeMap::new(),
    })
}

fn isothermal_breakdown(p: &mut Params) -> Result<ScenarioConfig> {
    let a = p.positive("A", 1.0)?;
    let k = p.positive("k", 1.0)?;
    let amplitude = p.positive("amplitude", 1.0)?;
    let width = p.positive("width", 2.0)?;
    let slope = p.get("slope", -3.0)?;
    let dip_width = p.positive("dip_width", 1.0)?;
    let n = p.count("n", 8192)?;
    let half = p.positive("half_width", 4.0)?;
    let t_end = p.positive("t_end", 1.5)?;
    let snapshot_dt = p.positive("snapshot_dt", 0.01)?;
    Ok(ScenarioConfig {
        name: ISOTHERMAL_BREAKDOWN.into(),
        model: model(a, 1.0, k)?,
        grid: Grid1D::new(-half, half, n)?,
        initial: InitialSpec::Profiles {
            density: bump(amplitude, width),
            velocity: VelocityProfile::Dip {
                slope,
                width: dip_width,
                center: 0.0,
            },
        },
        solver: SolverConfig {
            t_end,
            snapshot_dt,
            ..Default::default()
        },
        seeds: seeds(-1.0, 1.0, 12),
        metadata: BTreeMap::new(),
    })
}

fn pressureless(p: &mut Params) -> Result<ScenarioConfig> {
    let k = p.positive("k", 1.0)?;
    let amplitude = p.positive("amplitude", 1.0)?;
    let width = p.positive("width", 2.0)?;
    let slope = p.get("slope", -1.0)?;
    let dip_width = p.positive("dip_width", 1.0)?;
    let n = p.count("n", 32768)?;
    let half = p.positive("half_width", 6.0)?;
    let t_end = p.positive("t_end", 2.0)?;
    let snapshot_dt = p.positive("snapshot_dt", 0.01)?;
    Ok(ScenarioConfig {
        name: PRESSURELESS.into(),
        model: model(0.0, 1.0, k)?,
        grid: Grid1D::new(-half, half, n)?,
        initial: InitialSpec::Profiles {
            density: bump(amplitude, width),
            velocity: VelocityProfile::Dip {
                slope,
                width: dip_width,
                center: 0.0,
            },
        },
        solver: SolverConfig {
            t_end,
            snapshot_dt,
            ..Default::default()
        },
        seeds: seeds(-1.5, 1.5, 12),
        metadata: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(v: Value) -> Map<String, Value> {
        match v {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn every_listed_preset_builds_or_explains() {
        for (name, _) in PRESETS {
            let small = params(serde_json::json!({"n": 256}));
            match preset_config(name, &small) {
                Ok(c) => assert_eq!(c.name, *name),
                Err(LabError::UnsupportedParameters(_)) => assert_eq!(*name, CUSTOM),
                Err(e) => panic!("{name}: {e}"),
            }
        }
    }

    #[test]
    fn ramp_step_values() {
        let c = preset_config(PAPER_EX4, &params(serde_json::json!({"n": 1600}))).unwrap();
        assert_eq!(c.metadata["eps"], 0.1);
        assert!((c.metadata["sigma"] - 0.01).abs() < 1e-15);
        assert_eq!(c.model.gamma(), 3.0);
    }

    #[test]
    fn subcritical_guard_rejects_steep_data() {
        let steep = params(serde_json::json!({"n": 512, "width": 0.2}));
        assert!(matches!(
            preset_config(GAUSS_SUBCRITICAL, &steep),
            Err(LabError::UnsupportedParameters(_))
        ));
        let neg = params(serde_json::json!({"eps": -1.0}));
        assert!(matches!(
            preset_config(PAPER_EX4, &neg),
            Err(LabError::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn subcritical_t_end_spans_five_crossings() {
        let c = preset_config(GAUSS_SUBCRITICAL, &params(serde_json::json!({"n": 512}))).unwrap();
        // Isothermal sound speed √A = 1, FWHM = 4.
        assert!((c.solver.t_end - 20.0).abs() < 1e-12);
    }
}
