//! Conservative local Lax-Friedrichs (Rusanov) scheme for `(ρ, ρu)` with the
//! nonlocal source `−kρφ_x`.
//!
//! Boundaries are zero-gradient outflow. Whatever mass crosses them is added
//! to [`FlowField::exterior_mass`], so the field `φ_x` stays the whole-line
//! field and the total charge is conserved to rounding.
//!
//! [`simulate`] samples `max|u_x|` every half snapshot interval. Breakdown is
//! declared when a sample exceeds the gradient cap and the sample half an
//! interval earlier was already at least half the cap.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gas::{riemann_from_arrays, FlowField, GasModel, DEFAULT_RHO_FLOOR};
use crate::num;
use crate::poisson::fill_field;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_dt: f64,
    /// Fixed cap on `max|u_x|`. When `None` the cap is
    /// `blowup_cap_factor` times [`gradient_scale`] of the initial data.
    pub blowup_gradient_cap: Option<f64>,
    pub blowup_cap_factor: f64,
    pub rho_floor: f64,
    pub max_steps: usize,
    /// Keep integrating to `t_end` after breakdown has been detected.
    pub stop_on_blowup: bool,
    /// Store every snapshot for offline characteristic tracing.
    pub keep_snapshots: bool,
    /// Width of the window over which `u²` is averaged to smooth the
    /// dissipation speed. `None` means a 64th of the domain.
    pub dissipation_window: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            t_end: 1.0,
            snapshot_dt: 0.01,
            blowup_gradient_cap: None,
            blowup_cap_factor: 10.0,
            rho_floor: DEFAULT_RHO_FLOOR,
            max_steps: 50_000_000,
            stop_on_blowup: true,
            keep_snapshots: true,
            dissipation_window: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidConfig("cfl must lie in (0, 1)"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig("t_end must be positive"));
        }
        if !(self.snapshot_dt > 0.0 && self.snapshot_dt.is_finite()) {
            return Err(Error::InvalidConfig("snapshot_dt must be positive"));
        }
        if let Some(cap) = self.blowup_gradient_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidConfig("blowup_gradient_cap must be positive"));
            }
        }
        if !(self.blowup_cap_factor > 1.0) {
            return Err(Error::InvalidConfig("blowup_cap_factor must exceed 1"));
        }
        if !(self.rho_floor > 0.0) {
            return Err(Error::InvalidConfig("rho_floor must be positive"));
        }
        if let Some(w) = self.dissipation_window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig("dissipation_window must be positive"));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Outcome {
    ReachedTEnd,
    BlowupDetected { t_c: f64 },
    VacuumFormed { t: f64 },
    StepLimit { t: f64 },
}

impl Outcome {
    pub fn is_blowup(&self) -> bool {
        matches!(self, Outcome::BlowupDetected { .. })
    }
}

/// Diagnostics at every snapshot plus the stored snapshots themselves.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    /// Whole-line mass: in-domain plus exterior.
    pub mass: Vec<f64>,
    pub mass_in_domain: Vec<f64>,
    pub max_abs_ux: Vec<f64>,
    pub max_abs_rhox: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "min_X"))]
    pub min_x: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "min_Y"))]
    pub min_y: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "max_X"))]
    pub max_x: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "max_Y"))]
    pub max_y: Vec<f64>,
    /// `sup max(|R|, |S|)`.
    pub sup_invariants: Vec<f64>,
    /// `C0 + kE0t`.
    pub apriori_bound: Vec<f64>,
    /// `sup max(|R|, |S|) ≤ 1.05 (C0 + kE0t)`.
    pub apriori_bound_ok: Vec<bool>,
    pub max_abs_phi_x: Vec<f64>,
    /// Half-snapshot samples of `max|u_x|` used by the breakdown detector.
    pub monitor_times: Vec<f64>,
    pub monitor_ux: Vec<f64>,
    pub e0: f64,
    pub c0: f64,
    pub gradient_cap: f64,
    /// First sample time above the cap that was later confirmed, even when
    /// the run continued past it.
    pub blowup_time: Option<f64>,
    /// Mass crossed the boundaries by more than `1e−8 E0`.
    pub boundary_contact: bool,
    pub steps: usize,
    pub outcome: Outcome,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub snapshots: Vec<FlowField>,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub final_state: FlowField,
}

impl SimulationTrace {
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass
            .iter()
            .map(|m| num::abs(m - m0) / m0)
            .fold(0.0, f64::max)
    }

    pub fn apriori_ok(&self) -> bool {
        self.apriori_bound_ok.iter().all(|ok| *ok)
    }

    /// `max|u_x|` interpolated linearly between monitor samples.
    pub fn ux_at(&self, t: f64) -> Option<f64> {
        let ts = &self.monitor_times;
        if ts.is_empty() || t < ts[0] || t > ts[ts.len() - 1] {
            return None;
        }
        let j = ts.partition_point(|&s| s <= t);
        if j == ts.len() {
            return Some(self.monitor_ux[j - 1]);
        }
        let (t0, t1) = (ts[j - 1], ts[j]);
        let w = (t - t0) / (t1 - t0);
        Some(self.monitor_ux[j - 1] * (1.0 - w) + self.monitor_ux[j] * w)
    }
}

/// `F(ρ, m) = (m, m²/ρ + Aρ^γ)`.
pub fn physical_flux(rho: f64, m: f64, model: &GasModel) -> Result<(f64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::NonPositiveDensity {
            index: 0,
            value: rho,
        });
    }
    Ok((m, m * m / rho + model.pressure(rho)))
}

/// Gradient scale of initial data:
/// `max(1, max|u0x|, max|r0|, max|s0|, √(2k max ρ0))`.
pub fn gradient_scale(init: &FlowField, model: &GasModel) -> Result<f64> {
    let rf = riemann_from_arrays(init.grid(), init.rho(), init.u(), model)?;
    let ux = num::max_abs(&init.velocity_gradient());
    let slopes = num::max_abs(&rf.slope_r).max(num::max_abs(&rf.slope_s));
    let poisson = num::sqrt(2.0 * model.k() * num::max_of(init.rho()));
    Ok(1f64.max(ux).max(slopes).max(poisson))
}

/// Largest stable time step for the current state.
pub fn stable_dt(state: &FlowField, cfg: &SolverConfig, model: &GasModel) -> f64 {
    Workspace::new(state, cfg).stable_dt(cfg.cfl, model)
}

/// One explicit step of size [`stable_dt`] (capped at `t_end`).
pub fn step(state: &FlowField, cfg: &SolverConfig, model: &GasModel) -> Result<FlowField> {
    cfg.validate()?;
    let dt = stable_dt(state, cfg, model).min(cfg.t_end - state.t());
    let mut ws = Workspace::new(state, cfg);
    ws.advance(dt, model, cfg.rho_floor)?;
    Ok(ws.to_field(state))
}

/// Conserved variables plus scratch buffers reused across steps.
struct Workspace {
    rho: Vec<f64>,
    m: Vec<f64>,
    phi_x: Vec<f64>,
    flux_rho: Vec<f64>,
    flux_m: Vec<f64>,
    /// Running sums of `u²` and the windowed mean built from them.
    prefix: Vec<f64>,
    ubar2: Vec<f64>,
    half_window: usize,
    exterior: [f64; 2],
    t: f64,
    dx: f64,
}

impl Workspace {
    fn new(state: &FlowField, cfg: &SolverConfig) -> Self {
        let n = state.rho().len();
        let grid = state.grid();
        let width = cfg.dissipation_window.unwrap_or(grid.length() / 64.0);
        let half_window = libm::round(0.5 * width / grid.dx()).max(1.0) as usize;
        Self {
            prefix: vec![0.0; n + 1],
            ubar2: vec![0.0; n],
            half_window,
            rho: state.rho().to_vec(),
            m: state.momentum(),
            phi_x: Vec::with_capacity(n),
            flux_rho: vec![0.0; n + 1],
            flux_m: vec![0.0; n + 1],
            exterior: state.exterior_mass(),
            t: state.t(),
            dx: state.grid().dx(),
        }
    }

    fn velocity(&self) -> Vec<f64> {
        self.m.iter().zip(&self.rho).map(|(m, r)| m / r).collect()
    }

    fn to_field(&self, like: &FlowField) -> FlowField {
        FlowField::from_parts(
            *like.grid(),
            self.rho.clone(),
            self.velocity(),
            self.t,
            self.exterior,
        )
    }

    /// Mean of `u²` over the window around each cell.
    fn smooth_speed_scale(&mut self) {
        let n = self.rho.len();
        for i in 0..n {
            let u = self.m[i] / self.rho[i];
            self.prefix[i + 1] = self.prefix[i] + u * u;
        }
        let h = self.half_window;
        for i in 0..n {
            let lo = i.saturating_sub(h);
            let hi = (i + h + 1).min(n);
            self.ubar2[i] = ((self.prefix[hi] - self.prefix[lo]) / (hi - lo) as f64).max(0.0);
        }
    }

    fn max_speed_and_density(&mut self, model: &GasModel) -> (f64, f64) {
        self.smooth_speed_scale();
        (0..self.rho.len()).fold((0.0f64, 0.0f64), |(s, r), i| {
            let cell = cell_state(self.rho[i], self.m[i], self.ubar2[i], model);
            (s.max(cell.speed), r.max(self.rho[i]))
        })
    }

    fn stable_dt(&mut self, cfl: f64, model: &GasModel) -> f64 {
        let (speed, rho_max) = self.max_speed_and_density(model);
        let mut dt = f64::INFINITY;
        if speed > 0.0 {
            dt = cfl * self.dx / speed;
        }
        if model.k() > 0.0 {
            dt = dt.min(cfl / num::sqrt(model.k() * rho_max));
        }
        dt
    }

    fn advance(&mut self, dt: f64, model: &GasModel, rho_floor: f64) -> Result<()> {
        let n = self.rho.len();
        let dx = self.dx;
        fill_field(&self.rho, dx, self.exterior, &mut self.phi_x);

        // Interface j sits between cells j−1 and j; ghosts copy the end cells.
        self.smooth_speed_scale();
        let mut left = cell_state(self.rho[0], self.m[0], self.ubar2[0], model);
        for j in 0..=n {
            let right = if j < n {
                cell_state(self.rho[j], self.m[j], self.ubar2[j], model)
            } else {
                left
            };
            let a = left.speed.max(right.speed);
            self.flux_rho[j] = 0.5 * (left.f_rho + right.f_rho) - 0.5 * a * (right.rho - left.rho);
            self.flux_m[j] = 0.5 * (left.f_m + right.f_m) - 0.5 * a * (right.m - left.m);
            left = right;
        }

        let ratio = dt / dx;
        let k = model.k();
        for i in 0..n {
            let source = -k * self.rho[i] * self.phi_x[i];
            self.rho[i] -= ratio * (self.flux_rho[i + 1] - self.flux_rho[i]);
            self.m[i] += -ratio * (self.flux_m[i + 1] - self.flux_m[i]) + dt * source;
        }
        self.exterior[0] -= dt * self.flux_rho[0];
        self.exterior[1] += dt * self.flux_rho[n];
        self.t += dt;

        if let Some(i) = self.rho.iter().position(|&r| !(r >= rho_floor)) {
            return Err(Error::VacuumFormed {
                t: self.t,
                min_rho: self.rho[i],
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct CellState {
    rho: f64,
    m: f64,
    f_rho: f64,
    f_m: f64,
    speed: f64,
}

/// Dissipation speed `c + √(u² + ū²)` with `ū²` the windowed mean of `u²`.
/// It bounds `|u| + c` and stays smooth where `u` changes sign; `|u| + c`
/// has a corner there that puts an O(1) error into `u_x`.
#[inline]
fn cell_state(rho: f64, m: f64, ubar2: f64, model: &GasModel) -> CellState {
    let u = m / rho;
    let c = model.sound_speed(rho);
    // Aρ^γ = c²ρ/γ saves a second power evaluation.
    let p = c * c * rho / model.gamma();
    CellState {
        rho,
        m,
        f_rho: m,
        f_m: m * u + p,
        speed: num::sqrt(u * u + ubar2) + c,
    }
}

struct Diagnostics {
    e0: f64,
    c0: f64,
    k: f64,
}

impl SimulationTrace {
    fn record(&mut self, field: &FlowField, model: &GasModel, diag: &Diagnostics) -> Result<()> {
        let rf = riemann_from_arrays(field.grid(), field.rho(), field.u(), model)?;
        let t = field.t();
        let [left, right] = field.exterior_mass();
        let in_domain = field.mass_in_domain();
        let mut phi = Vec::new();
        fill_field(
            field.rho(),
            field.grid().dx(),
            field.exterior_mass(),
            &mut phi,
        );
        let sup = rf.sup_invariants();
        let bound = diag.c0 + diag.k * diag.e0 * t;
        self.times.push(t);
        self.mass.push(in_domain + left + right);
        self.mass_in_domain.push(in_domain);
        self.max_abs_ux
            .push(num::max_abs(&field.velocity_gradient()));
        self.max_abs_rhox
            .push(num::max_abs(&field.density_gradient()));
        self.min_x.push(num::min_of(&rf.scaled_r));
        self.min_y.push(num::min_of(&rf.scaled_s));
        self.max_x.push(num::max_of(&rf.scaled_r));
        self.max_y.push(num::max_of(&rf.scaled_s));
        self.sup_invariants.push(sup);
        self.apriori_bound.push(bound);
        self.apriori_bound_ok.push(sup <= 1.05 * bound);
        self.max_abs_phi_x.push(num::max_abs(&phi));
        if num::abs(left) + num::abs(right) > 1e-8 * diag.e0 {
            self.boundary_contact = true;
        }
        Ok(())
    }
}

/// Runs to `t_end`, breakdown, vacuum or the step limit.
pub fn simulate(init: &FlowField, cfg: &SolverConfig, model: &GasModel) -> Result<SimulationTrace> {
    cfg.validate()?;
    let rf0 = riemann_from_arrays(init.grid(), init.rho(), init.u(), model)?;
    let e0 = init.mass_in_domain() + init.exterior_mass()[0] + init.exterior_mass()[1];
    let diag = Diagnostics {
        e0,
        c0: rf0.sup_invariants(),
        k: model.k(),
    };
    let cap = match cfg.blowup_gradient_cap {
        Some(cap) => cap,
        None => cfg.blowup_cap_factor * gradient_scale(init, model)?,
    };

    let mut trace = SimulationTrace {
        times: Vec::new(),
        mass: Vec::new(),
        mass_in_domain: Vec::new(),
        max_abs_ux: Vec::new(),
        max_abs_rhox: Vec::new(),
        min_x: Vec::new(),
        min_y: Vec::new(),
        max_x: Vec::new(),
        max_y: Vec::new(),
        sup_invariants: Vec::new(),
        apriori_bound: Vec::new(),
        apriori_bound_ok: Vec::new(),
        max_abs_phi_x: Vec::new(),
        monitor_times: Vec::new(),
        monitor_ux: Vec::new(),
        e0,
        c0: diag.c0,
        gradient_cap: cap,
        blowup_time: None,
        boundary_contact: false,
        steps: 0,
        outcome: Outcome::ReachedTEnd,
        snapshots: Vec::new(),
        final_state: init.clone(),
    };

    let start = init.t();
    let half = 0.5 * cfg.snapshot_dt;
    let t_end = start + cfg.t_end;
    let mut ws = Workspace::new(init, cfg);
    let mut sample_index = 0usize;
    let mut pending: Option<f64> = None;
    let mut outcome = None;

    trace.record(init, model, &diag)?;
    trace.monitor_times.push(start);
    trace.monitor_ux.push(trace.max_abs_ux[0]);
    if cfg.keep_snapshots {
        trace.snapshots.push(init.clone());
    }

    while ws.t < t_end {
        if trace.steps >= cfg.max_steps {
            outcome = Some(Outcome::StepLimit { t: ws.t });
            break;
        }
        let next_sample = (start + (sample_index + 1) as f64 * half).min(t_end);
        let mut dt = ws.stable_dt(cfg.cfl, model);
        let remaining = next_sample - ws.t;
        // Land exactly on sample times without leaving a sliver step.
        let landing = dt >= remaining;
        if landing {
            dt = remaining;
        } else if remaining < 2.0 * dt {
            dt = 0.5 * remaining;
        }
        if !(dt > 1e-14 * num::abs(ws.t).max(1.0)) {
            return Err(Error::CflViolation { t: ws.t, dt });
        }
        match ws.advance(dt, model, cfg.rho_floor) {
            Ok(()) => {}
            Err(Error::VacuumFormed { t, .. }) => {
                outcome = Some(Outcome::VacuumFormed { t });
                break;
            }
            Err(e) => return Err(e),
        }
        trace.steps += 1;
        if !landing {
            continue;
        }
        ws.t = next_sample;
        sample_index += 1;

        let field = ws.to_field(init);
        let ux = num::max_abs(&field.velocity_gradient());
        let previous = *trace.monitor_ux.last().unwrap_or(&0.0);
        trace.monitor_times.push(ws.t);
        trace.monitor_ux.push(ux);
        let at_snapshot = sample_index.is_multiple_of(2) || ws.t >= t_end;

        let mut confirmed = false;
        if trace.blowup_time.is_none() && ux > cap {
            if previous >= 0.5 * cap {
                trace.blowup_time = Some(pending.unwrap_or(ws.t));
                confirmed = true;
            } else {
                pending = Some(ws.t);
            }
        } else if ux <= cap {
            pending = None;
        }
        let stop = confirmed && cfg.stop_on_blowup;
        if at_snapshot || stop {
            trace.record(&field, model, &diag)?;
            if cfg.keep_snapshots {
                trace.snapshots.push(field);
            }
        }
        if stop {
            break;
        }
    }

    let final_state = ws.to_field(init);
    if outcome.is_some() && trace.times.last() != Some(&final_state.t()) {
        // Vacuum or step limit mid-interval: diagnostics only if still valid.
        if trace.record(&final_state, model, &diag).is_ok() && cfg.keep_snapshots {
            trace.snapshots.push(final_state.clone());
        }
    }
    trace.outcome = match (outcome, trace.blowup_time) {
        (Some(o), _) => o,
        (None, Some(t_c)) => Outcome::BlowupDetected { t_c },
        (None, None) => Outcome::ReachedTEnd,
    };
    trace.final_state = final_state;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::Grid1D;

    fn field(grid: Grid1D, rho: impl Fn(f64) -> f64, u: impl Fn(f64) -> f64) -> FlowField {
        let xs = grid.centers();
        FlowField::new(
            grid,
            xs.iter().map(|&x| rho(x)).collect(),
            xs.iter().map(|&x| u(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn flux_examples() {
        let g2 = GasModel::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(physical_flux(1.0, 0.0, &g2).unwrap(), (0.0, 1.0));
        let p0 = GasModel::new(0.0, 1.0, 1.0).unwrap();
        assert_eq!(physical_flux(1.0, 2.0, &p0).unwrap(), (2.0, 4.0));
        let g3 = GasModel::new(1.0, 3.0, 1.0).unwrap();
        let (a, b) = physical_flux(2.0, 2.0, &g3).unwrap();
        assert_eq!(a, 2.0);
        assert!((b - 10.0).abs() < 1e-12);
        assert!(physical_flux(0.0, 1.0, &g3).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SolverConfig {
            cfl: 1.2,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            t_end: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn plateau_interior_is_exact_without_forces() {
        let grid = Grid1D::new(-2.0, 2.0, 200).unwrap();
        let model = GasModel::new(0.0, 1.0, 0.0).unwrap();
        let init = field(grid, |x| if x.abs() < 1.0 { 1.0 } else { 0.1 }, |_| 0.0);
        let cfg = SolverConfig {
            t_end: 0.1,
            ..Default::default()
        };
        let next = step(&init, &cfg, &model).unwrap();
        assert_eq!(next.rho()[100], 1.0);
        assert_eq!(next.rho(), init.rho());
    }

    #[test]
    fn uniform_translation_advects_plateau() {
        let grid = Grid1D::new(-4.0, 4.0, 400).unwrap();
        let model = GasModel::new(0.0, 1.0, 0.0).unwrap();
        let init = field(grid, |x| if x.abs() < 1.0 { 1.0 } else { 0.1 }, |_| 0.5);
        let cfg = SolverConfig {
            t_end: 2.0,
            snapshot_dt: 0.5,
            ..Default::default()
        };
        let trace = simulate(&init, &cfg, &model).unwrap();
        assert_eq!(trace.outcome, Outcome::ReachedTEnd);
        let end = &trace.final_state;
        // Plateau centre moves from 0 to 1; interior stays at the plateau value.
        let centre = grid.cell_of(1.0);
        assert!((end.rho()[centre] - 1.0).abs() < 1e-9);
        assert!(end.u().iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(trace.mass_drift() < 1e-13);
    }

    #[test]
    fn step_conserves_mass() {
        let grid = Grid1D::new(-5.0, 5.0, 256).unwrap();
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        let init = field(grid, |x| 0.3 + libm::exp(-x * x), |x| -0.5 * libm::sin(x));
        let cfg = SolverConfig::default();
        let next = step(&init, &cfg, &model).unwrap();
        let total =
            |f: &FlowField| f.mass_in_domain() + f.exterior_mass()[0] + f.exterior_mass()[1];
        assert!((total(&next) - total(&init)).abs() <= 1e-14 * total(&init));
        assert!(next.t() > 0.0);
    }

    #[test]
    fn burgers_blowup_time() {
        // u0 = −tanh(x): min u0x = −1 at the origin, so characteristics cross
        // at t = 1. With the default cap of 10 the exact gradient 1/(1−t)
        // crosses it at t = 0.9; diffusion delays detection a little.
        let grid = Grid1D::new(-6.0, 6.0, 4096).unwrap();
        let model = GasModel::new(0.0, 1.0, 0.0).unwrap();
        let init = field(grid, |_| 1.0, |x| -libm::tanh(x));
        let cfg = SolverConfig {
            t_end: 2.0,
            snapshot_dt: 0.02,
            ..Default::default()
        };
        let trace = simulate(&init, &cfg, &model).unwrap();
        match trace.outcome {
            Outcome::BlowupDetected { t_c } => assert!(t_c > 0.9 && t_c < 1.1, "t_c = {t_c}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vacuum_is_reported() {
        let grid = Grid1D::new(-1.0, 1.0, 64).unwrap();
        let model = GasModel::new(0.0, 1.0, 0.0).unwrap();
        let init = field(grid, |_| 1e-6, |x| if x > 0.0 { 1.0 } else { -1.0 });
        let cfg = SolverConfig {
            t_end: 1.0,
            rho_floor: 1e-8,
            ..Default::default()
        };
        let trace = simulate(&init, &cfg, &model).unwrap();
        assert!(matches!(trace.outcome, Outcome::VacuumFormed { .. }));
    }

    #[test]
    fn field_bound_and_apriori_hold_on_smooth_run() {
        let grid = Grid1D::new(-8.0, 8.0, 512).unwrap();
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        let init = field(grid, |x| 0.2 + 0.8 * libm::exp(-x * x), |_| 0.0);
        let cfg = SolverConfig {
            t_end: 2.0,
            snapshot_dt: 0.1,
            ..Default::default()
        };
        let trace = simulate(&init, &cfg, &model).unwrap();
        assert_eq!(trace.outcome, Outcome::ReachedTEnd);
        assert!(trace.apriori_ok());
        for (phi, m) in trace.max_abs_phi_x.iter().zip(&trace.mass) {
            assert!(*phi <= 0.5 * m * (1.0 + 1e-12));
        }
        assert!(trace.mass_drift() < 1e-12);
        assert_eq!(trace.times.len(), 21);
        assert!((trace.times[20] - 2.0).abs() < 1e-12);
    }
}
