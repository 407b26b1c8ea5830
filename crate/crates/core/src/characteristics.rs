//! λ/μ characteristic paths traced offline through stored snapshots, the
//! Riccati blow-up bound, and checks of the invariant-region dynamics
//!
//! ```text
//! X' = √ρ (k − (1+θ)/2 X² + (θ/2) X Y)    along λ,
//! Y' = √ρ (k − (1+θ)/2 Y² + (θ/2) X Y)    along μ.
//! ```

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gas::{riemann_from_arrays, FlowField, GasModel, Grid1D};
use crate::num;
use crate::threshold::buffer_lower_edge;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Family {
    /// `dx/dt = λ = u − c`; carries `X`.
    Lambda,
    /// `dx/dt = μ = u + c`; carries `Y`.
    Mu,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Lambda => "lambda",
            Family::Mu => "mu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathPoint {
    pub t: f64,
    pub x: f64,
    #[cfg_attr(feature = "serde", serde(rename = "X"))]
    pub scaled_r: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Y"))]
    pub scaled_s: f64,
    pub rho: f64,
    pub ux: f64,
}

impl PathPoint {
    /// The scaled slope carried by `family`.
    pub fn carried(&self, family: Family) -> f64 {
        match family {
            Family::Lambda => self.scaled_r,
            Family::Mu => self.scaled_s,
        }
    }

    pub fn other(&self, family: Family) -> f64 {
        match family {
            Family::Lambda => self.scaled_s,
            Family::Mu => self.scaled_r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Termination {
    ReachedEnd,
    LeftDomain { t: f64 },
    BlowupVicinity { t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CharPath {
    pub family: Family,
    pub x0: f64,
    /// One sample per snapshot time, starting at the seed.
    pub points: Vec<PathPoint>,
    pub terminated: Termination,
}

impl CharPath {
    pub fn carried(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.carried(self.family)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Largest distance, in cells, that the traced characteristic may move
    /// between two stored snapshots.
    pub max_cells_per_interval: f64,
    /// Integration substep, in cells travelled.
    pub substep_cells: f64,
    /// Stop once the local `|u_x|` exceeds this value.
    pub blowup_ux_limit: Option<f64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            max_cells_per_interval: 32.0,
            substep_cells: 0.5,
            blowup_ux_limit: None,
        }
    }
}

struct Frame {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    scaled_r: Vec<f64>,
    scaled_s: Vec<f64>,
    rho: Vec<f64>,
    ux: Vec<f64>,
}

impl Frame {
    fn speed(&self, grid: &Grid1D, family: Family, x: f64) -> f64 {
        match family {
            Family::Lambda => grid.interpolate(&self.lambda, x),
            Family::Mu => grid.interpolate(&self.mu, x),
        }
    }

    fn sample(&self, grid: &Grid1D, t: f64, x: f64) -> PathPoint {
        PathPoint {
            t,
            x,
            scaled_r: grid.interpolate(&self.scaled_r, x),
            scaled_s: grid.interpolate(&self.scaled_s, x),
            rho: grid.interpolate(&self.rho, x),
            ux: grid.interpolate(&self.ux, x),
        }
    }

    /// Largest `|u_x|` over the cells next to `x`.
    fn local_ux(&self, grid: &Grid1D, x: f64) -> f64 {
        let c = grid.cell_of(x);
        let lo = c.saturating_sub(1);
        let hi = (c + 1).min(grid.n() - 1);
        num::max_abs(&self.ux[lo..=hi])
    }
}

/// Read-only view of a snapshot sequence. Characteristic data are derived
/// two frames at a time while tracing, so long runs stay cheap in memory.
pub struct SnapshotSeries<'a> {
    grid: Grid1D,
    model: GasModel,
    snapshots: &'a [FlowField],
}

impl<'a> SnapshotSeries<'a> {
    pub fn new(snapshots: &'a [FlowField], model: &GasModel) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or(Error::InvalidConfig("no snapshots to trace through"))?;
        let grid = *first.grid();
        for w in snapshots.windows(2) {
            if w[1].grid() != &grid {
                return Err(Error::InvalidConfig("snapshots live on different grids"));
            }
            if !(w[1].t() > w[0].t()) {
                return Err(Error::InvalidConfig(
                    "snapshot times must increase strictly",
                ));
            }
        }
        Ok(Self {
            grid,
            model: *model,
            snapshots,
        })
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.snapshots[j].t()
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    fn frame(&self, j: usize) -> Result<Frame> {
        let snap = &self.snapshots[j];
        let rf = riemann_from_arrays(&self.grid, snap.rho(), snap.u(), &self.model)?;
        Ok(Frame {
            lambda: rf.lambda,
            mu: rf.mu,
            scaled_r: rf.scaled_r,
            scaled_s: rf.scaled_s,
            rho: snap.rho().to_vec(),
            ux: snap.velocity_gradient(),
        })
    }
}

fn lerp_speed(a: &Frame, b: &Frame, grid: &Grid1D, family: Family, w: f64, x: f64) -> f64 {
    let va = a.speed(grid, family, x);
    if w == 0.0 {
        return va;
    }
    va * (1.0 - w) + b.speed(grid, family, x) * w
}

/// Integrates `dx/dt = λ` or `μ` with Heun's method through the series,
/// using linear interpolation in `x` and `t`.
pub fn trace_path(
    series: &SnapshotSeries,
    x0: f64,
    family: Family,
    opts: &TraceOptions,
) -> Result<CharPath> {
    trace_paths(series, &[(x0, family)], opts)?
        .pop()
        .expect("one seed in, one path out")
}

struct Active {
    path: CharPath,
    x: f64,
    done: bool,
    failed: Option<Error>,
}

/// Traces several seeds in one sweep over the snapshots. The outer error is
/// for the series itself; each seed gets its own result.
pub fn trace_paths(
    series: &SnapshotSeries,
    seeds: &[(f64, Family)],
    opts: &TraceOptions,
) -> Result<Vec<Result<CharPath>>> {
    let grid = series.grid;
    let dx = grid.dx();
    let mut current = series.frame(0)?;
    let t_start = series.time(0);
    let mut active: Vec<Active> = seeds
        .iter()
        .map(|&(x0, family)| {
            let inside = grid.contains(x0);
            let points = if inside {
                alloc::vec![current.sample(&grid, t_start, x0)]
            } else {
                Vec::new()
            };
            Active {
                path: CharPath {
                    family,
                    x0,
                    points,
                    terminated: Termination::ReachedEnd,
                },
                x: x0,
                done: !inside,
                failed: (!inside).then_some(Error::PathLeftDomain { x0 }),
            }
        })
        .collect();

    for j in 0..series.len().saturating_sub(1) {
        if active.iter().all(|a| a.done) {
            break;
        }
        let next = series.frame(j + 1)?;
        let (t0, t1) = (series.time(j), series.time(j + 1));
        let span = t1 - t0;
        for a in active.iter_mut().filter(|a| !a.done) {
            let family = a.path.family;
            let local = num::abs(current.speed(&grid, family, a.x))
                .max(num::abs(next.speed(&grid, family, a.x)));
            let cells = local * span / dx;
            if cells > opts.max_cells_per_interval {
                a.failed = Some(Error::SnapshotsTooSparse {
                    index: j,
                    next: j + 1,
                    cells,
                });
                a.done = true;
                continue;
            }
            let substeps = libm::ceil(cells / opts.substep_cells).max(2.0) as usize;
            let h = span / substeps as f64;
            let mut x = a.x;
            for q in 0..substeps {
                let w0 = q as f64 / substeps as f64;
                let w1 = (q + 1) as f64 / substeps as f64;
                let v1 = lerp_speed(&current, &next, &grid, family, w0, x);
                let guess = x + h * v1;
                let v2 = lerp_speed(&current, &next, &grid, family, w1, guess);
                x += 0.5 * h * (v1 + v2);
                if !grid.contains(x) {
                    a.path.terminated = Termination::LeftDomain { t: t0 + w1 * span };
                    a.done = true;
                    break;
                }
            }
            if a.done {
                continue;
            }
            a.x = x;
            if let Some(limit) = opts.blowup_ux_limit {
                if next.local_ux(&grid, x) > limit {
                    a.path.terminated = Termination::BlowupVicinity { t: t1 };
                    a.done = true;
                    continue;
                }
            }
            a.path.points.push(next.sample(&grid, t1, x));
        }
        current = next;
    }

    Ok(active
        .into_iter()
        .map(|a| match a.failed {
            Some(e) => Err(e),
            None => Ok(a.path),
        })
        .collect())
}

/// Upper bound for a super-critical scaled slope `X0 < −√(2k)` carried
/// along its characteristic:
///
/// ```text
/// X(t) ≤ X0 Y1 / (Y1 + X0 X1 ln(1 + √ρ0 Y1 t/2)),   X1 = (X0² − 2k)/X0²,
/// ```
///
/// obtained by integrating `X' ≤ −X1 X²/(Y1 t + 2/√ρ0)`. `Y1` bounds the
/// other slope from above.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiccatiBound {
    #[cfg_attr(feature = "serde", serde(rename = "X0"))]
    pub x0: f64,
    #[cfg_attr(feature = "serde", serde(rename = "Y1"))]
    pub y1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "X1"))]
    pub x1: f64,
    pub rho0: f64,
    pub t_c_bound: f64,
}

impl RiccatiBound {
    /// Value of the bounding curve; `−∞` from `t_c_bound` on.
    pub fn bound_curve(&self, t: f64) -> f64 {
        if t >= self.t_c_bound {
            return f64::NEG_INFINITY;
        }
        let log = num::ln1p(num::sqrt(self.rho0) * self.y1 * t / 2.0);
        self.x0 * self.y1 / (self.y1 + self.x0 * self.x1 * log)
    }
}

pub fn riccati_blowup_bound(x0: f64, y1: f64, rho0: f64, model: &GasModel) -> Result<RiccatiBound> {
    let threshold = -model.poisson_scale();
    if !(x0 < threshold) {
        return Err(Error::NotSupercritical {
            value: x0,
            threshold,
        });
    }
    if !(y1 > 0.0 && y1.is_finite()) {
        return Err(Error::InvalidConfig("Y1 must be positive and finite"));
    }
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(Error::NonPositiveDensity {
            index: 0,
            value: rho0,
        });
    }
    let x1 = (x0 * x0 - 2.0 * model.k()) / (x0 * x0);
    let t_c_bound = 2.0 / (num::sqrt(rho0) * y1) * num::expm1(-y1 / (x0 * x1));
    Ok(RiccatiBound {
        x0,
        y1,
        x1,
        rho0,
        t_c_bound,
    })
}

/// Right-hand side of the carried slope's equation at one sample.
pub fn slope_rhs(carried: f64, other: f64, rho: f64, model: &GasModel) -> f64 {
    let theta = model.theta();
    num::sqrt(rho)
        * (model.k() - 0.5 * (1.0 + theta) * carried * carried + 0.5 * theta * carried * other)
}

/// Compares the finite-difference derivative of the carried slope with the
/// right-hand side at interval midpoints. Returns `(t_mid, derivative, rhs)`.
pub fn ode_residual(path: &CharPath, model: &GasModel) -> Vec<(f64, f64, f64)> {
    path.points
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let dt = b.t - a.t;
            let derivative = (b.carried(path.family) - a.carried(path.family)) / dt;
            let rhs = 0.5
                * (slope_rhs(a.carried(path.family), a.other(path.family), a.rho, model)
                    + slope_rhs(b.carried(path.family), b.other(path.family), b.rho, model));
            (0.5 * (a.t + b.t), derivative, rhs)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub t: f64,
    pub value: f64,
    pub next: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotonicityReport {
    pub lower: f64,
    pub upper: f64,
    pub tolerance: f64,
    /// Sample pairs whose first value fell inside `(lower, upper)`.
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_pairs(
    path: &CharPath,
    lower: f64,
    upper: f64,
    tolerance: f64,
    bad: impl Fn(f64, f64) -> bool,
) -> MonotonicityReport {
    let values = path.carried();
    let mut checked = 0;
    let mut violations = Vec::new();
    for (i, w) in values.windows(2).enumerate() {
        if w[0] > lower && w[0] < upper {
            checked += 1;
            if bad(w[0], w[1]) {
                violations.push(Violation {
                    t: path.points[i].t,
                    value: w[0],
                    next: w[1],
                });
            }
        }
    }
    MonotonicityReport {
        lower,
        upper,
        tolerance,
        checked,
        violations,
    }
}

/// Inside the buffer zone `(C+(M0), M0)` the carried slope must not
/// increase. Guard band `0.02 M0`, tolerance `0.01 M0`.
pub fn verify_monotone_buffer(path: &CharPath, model: &GasModel, m0: f64) -> MonotonicityReport {
    let delta = 0.02 * m0;
    let tolerance = 1e-2 * m0;
    let lower = buffer_lower_edge(m0, model) + delta;
    check_pairs(path, lower, m0 - delta, tolerance, |a, b| b - a > tolerance)
}

/// Inside `(−K0, 0)` the carried slope must not decrease. Guard band
/// `0.02 K0`, tolerance `0.01 K0`.
pub fn verify_lower_trap(path: &CharPath, k0: f64) -> MonotonicityReport {
    let delta = 0.02 * k0;
    let tolerance = 1e-2 * k0;
    check_pairs(path, -k0 + delta, -delta, tolerance, |a, b| {
        a - b > tolerance
    })
}
