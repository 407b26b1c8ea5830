//! Gas model, grid, flow snapshots and the Riemann-invariant transforms.
//!
//! For `γ > 1` the invariants are `R, S = u ∓ h(ρ)` with
//! `h(ρ) = 2√(Aγ)/(γ−1) · ρ^((γ−1)/2)`; the isothermal case `γ = 1` uses
//! `h(ρ) = √A ln ρ` and is selected by exact equality on `γ`.

use alloc::vec::Vec;

use crate::diff::gradient;
use crate::error::{Error, Result};
use crate::num;

/// Density below which a state is treated as vacuum.
pub const DEFAULT_RHO_FLOOR: f64 = 1e-10;

/// Physical parameters of `p(ρ) = Aρ^γ` with Poisson coupling `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "ModelParams", into = "ModelParams")
)]
pub struct GasModel {
    a: f64,
    gamma: f64,
    k: f64,
    theta: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct ModelParams {
    #[serde(rename = "A")]
    a: f64,
    gamma: f64,
    k: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<ModelParams> for GasModel {
    type Error = Error;
    fn try_from(p: ModelParams) -> Result<Self> {
        GasModel::new(p.a, p.gamma, p.k)
    }
}

#[cfg(feature = "serde")]
impl From<GasModel> for ModelParams {
    fn from(m: GasModel) -> Self {
        ModelParams {
            a: m.a,
            gamma: m.gamma,
            k: m.k,
        }
    }
}

impl GasModel {
    /// `k = 0` is accepted: it decouples the Poisson forcing and is used for
    /// pure gas-dynamics and Burgers checks.
    pub fn new(a: f64, gamma: f64, k: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidModel(
                "pressure amplitude A must be finite and >= 0",
            ));
        }
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::InvalidModel("adiabatic exponent gamma must be >= 1"));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidModel(
                "Poisson coupling k must be finite and >= 0",
            ));
        }
        Ok(Self {
            a,
            gamma,
            k,
            theta: 0.5 * (gamma - 1.0),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `θ = (γ − 1)/2`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_isothermal(&self) -> bool {
        self.gamma == 1.0
    }

    pub fn is_pressureless(&self) -> bool {
        self.a == 0.0
    }

    /// `√(2k)`, the Poisson scale of the scaled slopes.
    pub fn poisson_scale(&self) -> f64 {
        num::sqrt(2.0 * self.k)
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        if self.is_isothermal() {
            self.a * rho
        } else {
            self.a * num::powf(rho, self.gamma)
        }
    }

    /// `√(Aγ) ρ^θ`: half the gap between the two characteristic speeds.
    pub fn sound_speed(&self, rho: f64) -> f64 {
        if self.a == 0.0 {
            0.0
        } else if self.is_isothermal() {
            num::sqrt(self.a)
        } else {
            num::sqrt(self.a * self.gamma) * num::powf(rho, self.theta)
        }
    }

    /// `h(ρ)` such that `R = u − h`, `S = u + h`.
    pub fn riemann_offset(&self, rho: f64) -> f64 {
        if self.a == 0.0 {
            0.0
        } else if self.is_isothermal() {
            num::sqrt(self.a) * num::ln(rho)
        } else {
            num::sqrt(self.a * self.gamma) * num::powf(rho, self.theta) / self.theta
        }
    }

    /// `h(ρ) − h(1)`. Same spatial gradient as `h`, but it stays well
    /// conditioned as `γ → 1⁺`, where `h` itself grows like `1/(γ−1)`.
    pub fn riemann_offset_shifted(&self, rho: f64) -> f64 {
        if self.a == 0.0 {
            0.0
        } else if self.is_isothermal() {
            num::sqrt(self.a) * num::ln(rho)
        } else {
            num::sqrt(self.a * self.gamma) * num::expm1(self.theta * num::ln(rho)) / self.theta
        }
    }

    /// Inverse of [`riemann_offset`](Self::riemann_offset).
    pub fn density_from_offset(&self, h: f64) -> Result<f64> {
        if self.a == 0.0 {
            return Err(Error::DegeneratePressure);
        }
        if self.is_isothermal() {
            Ok(num::exp(h / num::sqrt(self.a)))
        } else {
            let base = self.theta * h / num::sqrt(self.a * self.gamma);
            Ok(num::powf(base.max(0.0), 1.0 / self.theta))
        }
    }
}

/// Uniform cell-centred grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "GridParams", into = "GridParams"))]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct GridParams {
    x_min: f64,
    x_max: f64,
    n: usize,
}

#[cfg(feature = "serde")]
impl TryFrom<GridParams> for Grid1D {
    type Error = Error;
    fn try_from(p: GridParams) -> Result<Self> {
        Grid1D::new(p.x_min, p.x_max, p.n)
    }
}

#[cfg(feature = "serde")]
impl From<Grid1D> for GridParams {
    fn from(g: Grid1D) -> Self {
        GridParams {
            x_min: g.x_min,
            x_max: g.x_max,
            n: g.n,
        }
    }
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid("need finite x_min < x_max"));
        }
        if n < 8 {
            return Err(Error::InvalidGrid("need at least 8 cells"));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            dx: (x_max - x_min) / n as f64,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.center(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Linear interpolation of cell-centred `values` at `x`, clamped to the
    /// end values within the outer half cells.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let s = (x - self.x_min) / self.dx - 0.5;
        if s <= 0.0 {
            return values[0];
        }
        let last = self.n - 1;
        if s >= last as f64 {
            return values[last];
        }
        let i = s as usize;
        let w = s - i as f64;
        values[i] * (1.0 - w) + values[i + 1] * w
    }

    /// Index of the cell containing `x` (clamped).
    pub fn cell_of(&self, x: f64) -> usize {
        let s = (x - self.x_min) / self.dx;
        if s <= 0.0 {
            0
        } else {
            (s as usize).min(self.n - 1)
        }
    }
}

/// One time level of `(ρ, u)` on a grid.
///
/// `exterior_mass` holds the mass that has left through the left and right
/// boundaries; it keeps the whole-line charge and field exact when the
/// solver runs with outflow boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    grid: Grid1D,
    rho: Vec<f64>,
    u: Vec<f64>,
    t: f64,
    exterior_mass: [f64; 2],
}

impl FlowField {
    pub fn new(grid: Grid1D, rho: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        Self::with_floor(grid, rho, u, DEFAULT_RHO_FLOOR)
    }

    pub fn with_floor(grid: Grid1D, rho: Vec<f64>, u: Vec<f64>, rho_floor: f64) -> Result<Self> {
        for len in [rho.len(), u.len()] {
            if len != grid.n() {
                return Err(Error::LengthMismatch {
                    expected: grid.n(),
                    got: len,
                });
            }
        }
        check_density(&rho, rho_floor)?;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite velocity"));
        }
        Ok(Self {
            grid,
            rho,
            u,
            t: 0.0,
            exterior_mass: [0.0; 2],
        })
    }

    pub(crate) fn from_parts(
        grid: Grid1D,
        rho: Vec<f64>,
        u: Vec<f64>,
        t: f64,
        exterior_mass: [f64; 2],
    ) -> Self {
        Self {
            grid,
            rho,
            u,
            t,
            exterior_mass,
        }
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Declares charge lying outside the grid, `[left, right]`.
    pub fn with_exterior_mass(mut self, exterior: [f64; 2]) -> Self {
        self.exterior_mass = exterior;
        self
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Mass outside the domain, `[left, right]`.
    pub fn exterior_mass(&self) -> [f64; 2] {
        self.exterior_mass
    }

    /// `Σ ρ_i dx` over the grid only.
    pub fn mass_in_domain(&self) -> f64 {
        num::sum(self.rho.iter().copied()) * self.grid.dx()
    }

    pub fn momentum(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.u).map(|(r, v)| r * v).collect()
    }

    pub fn velocity_gradient(&self) -> Vec<f64> {
        gradient(&self.u, self.grid.dx())
    }

    pub fn density_gradient(&self) -> Vec<f64> {
        gradient(&self.rho, self.grid.dx())
    }
}

pub(crate) fn check_density(rho: &[f64], floor: f64) -> Result<()> {
    match rho
        .iter()
        .position(|&r| !(r > 0.0 && r >= floor && r.is_finite()))
    {
        Some(index) => Err(Error::NonPositiveDensity {
            index,
            value: rho[index],
        }),
        None => Ok(()),
    }
}

/// Per-cell Riemann data derived from one [`FlowField`].
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannFields {
    /// `R = u − h(ρ)`.
    pub riemann_r: Vec<f64>,
    /// `S = u + h(ρ)`.
    pub riemann_s: Vec<f64>,
    /// `r = ∂x R`.
    pub slope_r: Vec<f64>,
    /// `s = ∂x S`.
    pub slope_s: Vec<f64>,
    /// `X = r / √ρ`.
    pub scaled_r: Vec<f64>,
    /// `Y = s / √ρ`.
    pub scaled_s: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl RiemannFields {
    pub fn len(&self) -> usize {
        self.riemann_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.riemann_r.is_empty()
    }

    /// `min_i min(X_i, Y_i)`.
    pub fn min_scaled(&self) -> f64 {
        num::min_of(&self.scaled_r).min(num::min_of(&self.scaled_s))
    }

    /// `max_i max(X_i, Y_i)`.
    pub fn max_scaled(&self) -> f64 {
        num::max_of(&self.scaled_r).max(num::max_of(&self.scaled_s))
    }

    /// `sup_i max(|R_i|, |S_i|)`.
    pub fn sup_invariants(&self) -> f64 {
        num::max_abs(&self.riemann_r).max(num::max_abs(&self.riemann_s))
    }
}

/// Riemann invariants, their slopes and the characteristic speeds.
///
/// Slopes use the same second-order stencils as the rest of the crate and are
/// computed from the shifted offset, so they stay accurate for `γ` close to 1.
pub fn to_riemann(field: &FlowField, model: &GasModel) -> Result<RiemannFields> {
    riemann_from_arrays(field.grid(), field.rho(), field.u(), model)
}

pub fn riemann_from_arrays(
    grid: &Grid1D,
    rho: &[f64],
    u: &[f64],
    model: &GasModel,
) -> Result<RiemannFields> {
    check_density(rho, 0.0)?;
    let n = rho.len();
    let dx = grid.dx();
    let mut riemann_r = Vec::with_capacity(n);
    let mut riemann_s = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    let mut shifted = Vec::with_capacity(n);
    for (&r, &v) in rho.iter().zip(u) {
        let h = model.riemann_offset(r);
        let c = model.sound_speed(r);
        riemann_r.push(v - h);
        riemann_s.push(v + h);
        lambda.push(v - c);
        mu.push(v + c);
        shifted.push(model.riemann_offset_shifted(r));
    }
    let ux = gradient(u, dx);
    let hx = gradient(&shifted, dx);
    let slope_r: Vec<f64> = ux.iter().zip(&hx).map(|(a, b)| a - b).collect();
    let slope_s: Vec<f64> = ux.iter().zip(&hx).map(|(a, b)| a + b).collect();
    let scaled_r = slope_r
        .iter()
        .zip(rho)
        .map(|(s, r)| s / num::sqrt(*r))
        .collect();
    let scaled_s = slope_s
        .iter()
        .zip(rho)
        .map(|(s, r)| s / num::sqrt(*r))
        .collect();
    Ok(RiemannFields {
        riemann_r,
        riemann_s,
        slope_r,
        slope_s,
        scaled_r,
        scaled_s,
        lambda,
        mu,
    })
}

/// What [`from_riemann`] does when the recovered density falls below a floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VacuumPolicy {
    Error(f64),
    Clamp(f64),
}

impl Default for VacuumPolicy {
    fn default() -> Self {
        VacuumPolicy::Error(DEFAULT_RHO_FLOOR)
    }
}

/// `u = (R+S)/2` and `ρ = h⁻¹((S−R)/2)`; errors on vacuum.
pub fn from_riemann(r: &[f64], s: &[f64], model: &GasModel) -> Result<(Vec<f64>, Vec<f64>)> {
    from_riemann_with(r, s, model, VacuumPolicy::default())
}

pub fn from_riemann_with(
    r: &[f64],
    s: &[f64],
    model: &GasModel,
    policy: VacuumPolicy,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if r.len() != s.len() {
        return Err(Error::LengthMismatch {
            expected: r.len(),
            got: s.len(),
        });
    }
    if model.is_pressureless() {
        return Err(Error::DegeneratePressure);
    }
    let mut rho = Vec::with_capacity(r.len());
    let mut u = Vec::with_capacity(r.len());
    for (index, (&ri, &si)) in r.iter().zip(s).enumerate() {
        if !model.is_isothermal() && si < ri {
            return Err(Error::InvalidInvariantOrder { index });
        }
        let mut density = model.density_from_offset(0.5 * (si - ri))?;
        match policy {
            VacuumPolicy::Error(floor) if !(density > floor) => {
                return Err(Error::NonPositiveDensity {
                    index,
                    value: density,
                });
            }
            VacuumPolicy::Clamp(floor) => density = density.max(floor),
            _ => {}
        }
        rho.push(density);
        u.push(0.5 * (ri + si));
    }
    Ok((rho, u))
}

/// `√(Aγ) ρ^((γ−1)/2)` per cell, so that `λ = u − c` and `μ = u + c`.
pub fn sound_term(rho: &[f64], model: &GasModel) -> Result<Vec<f64>> {
    check_density(rho, 0.0)?;
    Ok(rho.iter().map(|&r| model.sound_speed(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn uniform(rho: f64, u: f64) -> FlowField {
        let grid = Grid1D::new(0.0, 1.0, 8).unwrap();
        FlowField::new(grid, vec![rho; 8], vec![u; 8]).unwrap()
    }

    #[test]
    fn invariants_at_unit_density_gamma_two() {
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        let rf = to_riemann(&uniform(1.0, 0.0), &model).unwrap();
        let two_root_two = 2.0 * 2f64.sqrt();
        assert!((rf.riemann_r[3] + two_root_two).abs() < 1e-14);
        assert!((rf.riemann_s[3] - two_root_two).abs() < 1e-14);
        assert!((rf.lambda[3] + 2f64.sqrt()).abs() < 1e-14);
        assert!((rf.mu[3] - 2f64.sqrt()).abs() < 1e-14);
        let (rho, u) = from_riemann(&rf.riemann_r, &rf.riemann_s, &model).unwrap();
        assert!((rho[0] - 1.0).abs() < 1e-14 && u[0].abs() < 1e-14);
    }

    #[test]
    fn isothermal_log_vanishes_at_unit_density() {
        let model = GasModel::new(1.0, 1.0, 1.0).unwrap();
        let rf = to_riemann(&uniform(1.0, 3.0), &model).unwrap();
        assert_eq!(rf.riemann_r[0], 3.0);
        assert_eq!(rf.riemann_s[0], 3.0);
        let (rho, u) = from_riemann(&[3.0], &[3.0], &model).unwrap();
        assert_eq!((rho[0], u[0]), (1.0, 3.0));
    }

    #[test]
    fn pressureless_collapses_to_velocity() {
        for gamma in [1.0, 1.4, 3.0] {
            let model = GasModel::new(0.0, gamma, 1.0).unwrap();
            let rf = to_riemann(&uniform(0.7, -1.25), &model).unwrap();
            assert!(rf
                .riemann_r
                .iter()
                .chain(&rf.riemann_s)
                .all(|&v| v == -1.25));
            assert!(rf
                .lambda
                .iter()
                .zip(&rf.mu)
                .all(|(l, m)| *l == -1.25 && *m == -1.25));
            assert_eq!(
                from_riemann(&rf.riemann_r, &rf.riemann_s, &model),
                Err(Error::DegeneratePressure)
            );
        }
    }

    #[test]
    fn coincident_invariants_are_vacuum() {
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            from_riemann(&[0.5], &[0.5], &model),
            Err(Error::NonPositiveDensity { index: 0, .. })
        ));
        let (rho, _) =
            from_riemann_with(&[0.5], &[0.5], &model, VacuumPolicy::Clamp(1e-10)).unwrap();
        assert_eq!(rho[0], 1e-10);
        assert_eq!(
            from_riemann(&[1.0], &[0.0], &model),
            Err(Error::InvalidInvariantOrder { index: 0 })
        );
    }

    #[test]
    fn sound_term_examples() {
        let m3 = GasModel::new(1.0, 3.0, 1.0).unwrap();
        assert!((sound_term(&[4.0], &m3).unwrap()[0] - 4.0 * 3f64.sqrt()).abs() < 1e-12);
        let m0 = GasModel::new(0.0, 2.0, 1.0).unwrap();
        assert_eq!(sound_term(&[5.0, 0.1], &m0).unwrap(), vec![0.0, 0.0]);
        for gamma in [1.0, 1.4, 2.0, 3.0] {
            let m = GasModel::new(1.0, gamma, 1.0).unwrap();
            assert!((sound_term(&[1.0], &m).unwrap()[0] - gamma.sqrt()).abs() < 1e-14);
        }
        assert!(matches!(
            sound_term(&[1.0, 0.0], &m3),
            Err(Error::NonPositiveDensity { index: 1, .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(GasModel::new(-1.0, 2.0, 1.0).is_err());
        assert!(GasModel::new(1.0, 0.9, 1.0).is_err());
        assert!(GasModel::new(1.0, 2.0, -1.0).is_err());
        assert!(Grid1D::new(1.0, 0.0, 16).is_err());
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        let grid = Grid1D::new(0.0, 1.0, 8).unwrap();
        assert!(matches!(
            FlowField::new(grid, vec![1.0; 7], vec![0.0; 8]),
            Err(Error::LengthMismatch {
                expected: 8,
                got: 7
            })
        ));
        let mut rho = vec![1.0; 8];
        rho[5] = 1e-12;
        assert!(matches!(
            FlowField::new(grid, rho, vec![0.0; 8]),
            Err(Error::NonPositiveDensity { index: 5, .. })
        ));
    }

    #[test]
    fn theta_and_isothermal_flag() {
        let m = GasModel::new(1.0, 1.4, 2.0).unwrap();
        assert!((m.theta() - 0.2).abs() < 1e-15);
        assert!(!m.is_isothermal());
        assert!(GasModel::new(1.0, 1.0, 2.0).unwrap().is_isothermal());
        assert!(!GasModel::new(1.0, 1.0 + 1e-12, 2.0)
            .unwrap()
            .is_isothermal());
    }

    #[test]
    fn interpolation_is_linear_between_centers() {
        let grid = Grid1D::new(0.0, 8.0, 8).unwrap();
        let values: Vec<f64> = grid.centers().iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((grid.interpolate(&values, 3.3) - 7.6).abs() < 1e-12);
        assert_eq!(grid.interpolate(&values, 0.1), values[0]);
        assert_eq!(grid.interpolate(&values, 7.9), values[7]);
        assert_eq!(grid.cell_of(3.3), 3);
    }
}
