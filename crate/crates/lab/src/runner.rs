//! Classification, simulation and verification of one scenario.

use eplab_core::characteristics::{ode_residual, PathPoint};
use eplab_core::{
    classify, field_from_density, riccati_blowup_bound, to_riemann, trace_paths, verify_lower_trap,
    verify_monotone_buffer, CharPath, Family, MonotonicityReport, Outcome, RiccatiBound,
    SimulationTrace, SnapshotSeries, Termination, ThresholdReport, TraceOptions, Verdict,
};
use serde::Serialize;

use crate::error::Result;
use crate::scenario::{Scenario, ScenarioConfig, Seed};

/// Relative slack on the invariant-region check.
pub const REGION_TOLERANCE: f64 = 0.05;
/// Relative slack on the Riccati ordering and dominance checks.
pub const RICCATI_TOLERANCE: f64 = 0.1;
/// Boundary-cell mass fraction above which the domain is reported as too
/// small for the whole-line field.
pub const SUPPORT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub label: String,
    pub family: Family,
    pub x0: f64,
    pub terminated: Option<Termination>,
    pub samples: usize,
    #[serde(rename = "min_X")]
    pub min_x: f64,
    #[serde(rename = "max_X")]
    pub max_x: f64,
    #[serde(rename = "min_Y")]
    pub min_y: f64,
    #[serde(rename = "max_Y")]
    pub max_y: f64,
    /// Largest relative mismatch between the slope's finite-difference
    /// derivative and its equation over the first half of the path.
    pub ode_mismatch: Option<f64>,
    pub buffer: Option<MonotonicityReport>,
    pub trap: Option<MonotonicityReport>,
    pub error: Option<String>,
    #[serde(skip)]
    pub path: Option<CharPath>,
}

impl PathReport {
    pub fn violations(&self) -> usize {
        self.buffer.as_ref().map_or(0, |r| r.violations.len())
            + self.trap.as_ref().map_or(0, |r| r.violations.len())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RiccatiCheck {
    pub family: Family,
    pub x0: f64,
    pub index: usize,
    pub bound: RiccatiBound,
    pub t_c_numeric: Option<f64>,
    /// `t_c_numeric ≤ 1.1 t_c_bound`.
    pub ordering_ok: bool,
    /// The traced slope stays below the bounding curve, up to 10%.
    pub dominance_ok: bool,
    pub path_label: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionCheck {
    pub lower: f64,
    pub upper: f64,
    pub path_min: f64,
    pub path_max: f64,
    pub field_min: f64,
    pub field_max: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsistencyStatus {
    Agree,
    Disagree,
    ResolvedEmpirically,
}

#[derive(Debug, Clone, Serialize)]
pub struct Consistency {
    pub status: ConsistencyStatus,
    pub annotation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub outcome: Outcome,
    pub blowup_time: Option<f64>,
    pub steps: usize,
    pub snapshots: usize,
    pub gradient_cap: f64,
    pub max_abs_ux: f64,
    pub mass_drift: f64,
    pub apriori_ok: bool,
    pub max_abs_phi_x: f64,
    pub e0: f64,
    pub boundary_contact: bool,
}

impl TraceSummary {
    fn of(trace: &SimulationTrace) -> Self {
        Self {
            outcome: trace.outcome,
            blowup_time: trace.blowup_time,
            steps: trace.steps,
            snapshots: trace.times.len(),
            gradient_cap: trace.gradient_cap,
            max_abs_ux: trace.max_abs_ux.iter().copied().fold(0.0, f64::max),
            mass_drift: trace.mass_drift(),
            apriori_ok: trace.apriori_ok(),
            max_abs_phi_x: trace.max_abs_phi_x.iter().copied().fold(0.0, f64::max),
            e0: trace.e0,
            boundary_contact: trace.boundary_contact,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub paths: Vec<PathReport>,
    pub riccati: Option<RiccatiCheck>,
    pub invariant_region: Option<RegionCheck>,
}

impl Verification {
    pub fn violations(&self) -> usize {
        self.paths.iter().map(PathReport::violations).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: ScenarioConfig,
    pub threshold: ThresholdReport,
    pub summary: TraceSummary,
    #[serde(flatten)]
    pub verification: Verification,
    pub support_warning: Option<String>,
    pub consistency: Consistency,
    #[serde(skip)]
    pub trace: SimulationTrace,
}

pub fn classify_scenario(s: &Scenario) -> Result<ThresholdReport> {
    Ok(classify(&s.init, s.model())?)
}

/// Runs the solver with snapshot storage switched on.
pub fn simulate_scenario(s: &Scenario) -> Result<SimulationTrace> {
    let mut cfg = s.config.solver;
    cfg.keep_snapshots = true;
    Ok(eplab_core::simulate(&s.init, &cfg, s.model())?)
}

/// Warns when the boundary cells or the exterior hold a noticeable part of
/// the charge.
pub fn support_warning(s: &Scenario) -> Result<Option<String>> {
    let pf = field_from_density(&s.init)?;
    Ok((pf.boundary_mass_fraction > SUPPORT_TOLERANCE).then(|| {
        format!(
            "{:.2e} of the charge sits in the boundary cells or outside the grid",
            pf.boundary_mass_fraction
        )
    }))
}

/// Seed of the Riccati bound at the worst breakdown margin: the smaller
/// scaled slope there, bounded on the other side by `M0` (or, for γ = 1, by
/// the largest opposite slope).
pub fn riccati_seed(
    s: &Scenario,
    report: &ThresholdReport,
) -> Result<(Family, f64, usize, RiccatiBound)> {
    let model = s.model();
    let rf = to_riemann(&s.init, model)?;
    let i = report.worst_breakdown.index;
    let (family, x0, other) = if rf.scaled_r[i] <= rf.scaled_s[i] {
        (Family::Lambda, rf.scaled_r[i], &rf.scaled_s)
    } else {
        (Family::Mu, rf.scaled_s[i], &rf.scaled_r)
    };
    let y1 = if model.is_isothermal() {
        other.iter().copied().fold(model.poisson_scale(), f64::max)
    } else {
        report.m0
    };
    let bound = riccati_blowup_bound(x0, y1, s.init.rho()[i], model)?;
    Ok((family, s.init.grid().center(i), i, bound))
}

fn extremes(points: &[PathPoint]) -> [f64; 4] {
    points.iter().fold(
        [
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ],
        |[a, b, c, d], p| {
            [
                a.min(p.scaled_r),
                b.max(p.scaled_r),
                c.min(p.scaled_s),
                d.max(p.scaled_s),
            ]
        },
    )
}

fn ode_mismatch(path: &CharPath, s: &Scenario, scale: f64) -> Option<f64> {
    let residual = ode_residual(path, s.model());
    let keep = residual.len() / 2;
    if keep == 0 {
        return None;
    }
    Some(
        residual[..keep]
            .iter()
            .map(|(_, d, r)| (d - r).abs() / scale)
            .fold(0.0, f64::max),
    )
}

/// Traces the configured seeds (plus the Riccati seed for breakdown data)
/// and runs the monotonicity, region and Riccati checks.
pub fn verify(
    s: &Scenario,
    report: &ThresholdReport,
    trace: &SimulationTrace,
) -> Result<Verification> {
    let model = s.model();
    let mut seeds: Vec<(String, Seed)> = s
        .config
        .seeds
        .iter()
        .enumerate()
        .map(|(i, seed)| (seed.label(i), *seed))
        .collect();
    let riccati_seed = if report.verdict == Verdict::FiniteTimeBreakdown {
        let seed = riccati_seed(s, report)?;
        seeds.push((
            format!("riccati_{}", seed.0.name()),
            Seed {
                x0: seed.1,
                family: seed.0,
            },
        ));
        Some(seed)
    } else {
        None
    };

    let mut paths = Vec::with_capacity(seeds.len());
    if trace.snapshots.len() >= 2 {
        let series = SnapshotSeries::new(&trace.snapshots, model)?;
        let opts = TraceOptions {
            blowup_ux_limit: Some(0.5 * trace.gradient_cap),
            ..Default::default()
        };
        let pairs: Vec<(f64, Family)> = seeds.iter().map(|(_, s)| (s.x0, s.family)).collect();
        let traced = trace_paths(&series, &pairs, &opts)?;
        let scale = report.m0 * report.m0 * s.init.rho().iter().copied().fold(0.0, f64::max).sqrt();
        for ((label, seed), result) in seeds.iter().zip(traced) {
            paths.push(match result {
                Ok(path) => {
                    let [min_x, max_x, min_y, max_y] = extremes(&path.points);
                    PathReport {
                        label: label.clone(),
                        family: seed.family,
                        x0: seed.x0,
                        terminated: Some(path.terminated),
                        samples: path.points.len(),
                        min_x,
                        max_x,
                        min_y,
                        max_y,
                        ode_mismatch: ode_mismatch(&path, s, scale.max(f64::MIN_POSITIVE)),
                        buffer: Some(verify_monotone_buffer(&path, model, report.m0)),
                        trap: Some(verify_lower_trap(&path, report.k0)),
                        error: None,
                        path: Some(path),
                    }
                }
                Err(e) => PathReport {
                    label: label.clone(),
                    family: seed.family,
                    x0: seed.x0,
                    terminated: None,
                    samples: 0,
                    min_x: f64::NAN,
                    max_x: f64::NAN,
                    min_y: f64::NAN,
                    max_y: f64::NAN,
                    ode_mismatch: None,
                    buffer: None,
                    trap: None,
                    error: Some(e.to_string()),
                    path: None,
                },
            });
        }
    }

    let riccati = riccati_seed.map(|(family, x0, index, bound)| {
        let label = format!("riccati_{}", family.name());
        let t_c_numeric = trace.blowup_time;
        let ordering_ok =
            t_c_numeric.is_some_and(|t| t <= (1.0 + RICCATI_TOLERANCE) * bound.t_c_bound);
        let dominance_ok = paths
            .iter()
            .find(|p| p.label == label)
            .and_then(|p| p.path.as_ref())
            .is_some_and(|path| {
                path.points
                    .iter()
                    .filter(|p| p.t < bound.t_c_bound)
                    .all(|p| {
                        let b = bound.bound_curve(p.t);
                        p.carried(family) <= b + RICCATI_TOLERANCE * b.abs()
                    })
            });
        RiccatiCheck {
            family,
            x0,
            index,
            bound,
            t_c_numeric,
            ordering_ok,
            dominance_ok,
            path_label: label,
        }
    });

    let invariant_region = (report.verdict == Verdict::GlobalSmooth).then(|| {
        let traced: Vec<&PathReport> = paths.iter().filter(|p| p.path.is_some()).collect();
        let path_min = traced
            .iter()
            .map(|p| p.min_x.min(p.min_y))
            .fold(f64::INFINITY, f64::min);
        let path_max = traced
            .iter()
            .map(|p| p.max_x.max(p.max_y))
            .fold(f64::NEG_INFINITY, f64::max);
        let field_min = trace
            .min_x
            .iter()
            .chain(&trace.min_y)
            .copied()
            .fold(f64::INFINITY, f64::min);
        let field_max = trace
            .max_x
            .iter()
            .chain(&trace.max_y)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let lower = -report.k0;
        let upper = report.m0;
        let ok = path_min >= lower * (1.0 + REGION_TOLERANCE)
            && path_max <= upper * (1.0 + REGION_TOLERANCE);
        RegionCheck {
            lower,
            upper,
            path_min,
            path_max,
            field_min,
            field_max,
            ok,
        }
    });

    Ok(Verification {
        paths,
        riccati,
        invariant_region,
    })
}

/// Compares the verdict with what the solver saw. Indeterminate data are
/// settled by the run itself.
pub fn consistency(report: &ThresholdReport, trace: &SimulationTrace) -> Consistency {
    use ConsistencyStatus::*;
    let outcome = match trace.outcome {
        Outcome::ReachedTEnd => "reached t_end".to_string(),
        Outcome::BlowupDetected { t_c } => format!("blow-up detected at t = {t_c}"),
        Outcome::VacuumFormed { t } => format!("vacuum formed at t = {t}"),
        Outcome::StepLimit { t } => format!("step limit hit at t = {t}"),
    };
    let status = match (report.verdict, trace.outcome) {
        (Verdict::Indeterminate, _) => ResolvedEmpirically,
        (Verdict::GlobalSmooth, Outcome::ReachedTEnd)
        | (Verdict::FiniteTimeBreakdown, Outcome::BlowupDetected { .. }) => Agree,
        _ => Disagree,
    };
    let annotation = match status {
        ResolvedEmpirically => format!("resolved-empirically: {outcome}"),
        _ => format!("{:?} verdict, {outcome}", report.verdict),
    };
    Consistency { status, annotation }
}

/// Classify, simulate, trace and cross-check.
pub fn run(s: &Scenario) -> Result<RunReport> {
    let threshold = classify_scenario(s)?;
    let trace = simulate_scenario(s)?;
    let verification = verify(s, &threshold, &trace)?;
    let consistency = consistency(&threshold, &trace);
    Ok(RunReport {
        scenario: s.config.clone(),
        threshold,
        summary: TraceSummary::of(&trace),
        verification,
        support_warning: support_warning(s)?,
        consistency,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::scenario::preset_scenario;

    fn params(v: serde_json::Value) -> serde_json::Map<String, serde_json::Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn coarse_subcritical_run_agrees() {
        let s = preset_scenario(
            presets::GAUSS_SUBCRITICAL,
            &params(serde_json::json!({"n": 512, "t_end": 4.0})),
        )
        .unwrap();
        let r = run(&s).unwrap();
        assert_eq!(r.consistency.status, ConsistencyStatus::Agree);
        assert_eq!(r.verification.violations(), 0);
        assert!(r.verification.invariant_region.unwrap().ok);
        assert_eq!(r.verification.paths.len(), 24);
    }

    #[test]
    fn breakdown_run_seeds_riccati_path() {
        let s = preset_scenario(
            presets::ISOTHERMAL_BREAKDOWN,
            &params(serde_json::json!({"n": 1024})),
        )
        .unwrap();
        let r = run(&s).unwrap();
        assert_eq!(r.threshold.verdict, Verdict::FiniteTimeBreakdown);
        let ric = r.verification.riccati.as_ref().unwrap();
        assert!(r
            .verification
            .paths
            .iter()
            .any(|p| p.label == ric.path_label));
        assert!(ric.bound.t_c_bound > 0.0);
    }
}
