//! Whole-line electric field `φ_x` from the density.
//!
//! The field solves `−φ_xx = ρ` with the symmetric far-field condition
//! `φ_x(−∞) = −φ_x(+∞)`:
//!
//! ```text
//! φ_x(x) = ½ ( ∫_x^∞ ρ − ∫_{−∞}^x ρ ),     |φ_x| ≤ E0/2,
//! ```
//!
//! so the momentum source `−kρφ_x` pushes charge apart. The half-difference
//! `½(∫_{−∞}^x ρ − ∫_x^∞ ρ)` is available as
//! [`PoissonField::half_difference`]; it is `−φ_x`.
//!
//! Integrals use midpoint cumulative sums: the sum over all cells to the left
//! plus half of the current cell. Mass that the solver has let out through
//! the boundaries is added on the side it left from.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gas::{FlowField, GasModel};
use crate::num;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoissonOptions {
    /// Upper limit on the total charge.
    pub max_charge: f64,
    /// Fraction of `E0` allowed in the two boundary cells before the
    /// density counts as not interior-supported.
    pub support_tol: f64,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        Self {
            max_charge: 1e12,
            support_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonField {
    pub phi_x: Vec<f64>,
    /// Total charge `E0 = ∫ρ` over the whole line.
    pub e0: f64,
    /// Mass in the two boundary cells plus exterior mass, relative to `E0`.
    pub boundary_mass_fraction: f64,
}

impl PoissonField {
    /// `½(∫_{−∞}^x ρ − ∫_x^∞ ρ) = −φ_x`; nondecreasing, with derivative `ρ`.
    pub fn half_difference(&self) -> Vec<f64> {
        self.phi_x.iter().map(|v| -v).collect()
    }

    pub fn support_violated(&self, tol: f64) -> bool {
        self.boundary_mass_fraction > tol
    }

    pub fn max_abs(&self) -> f64 {
        num::max_abs(&self.phi_x)
    }
}

/// Midpoint-rule charge `Σ ρ_i dx`.
pub fn charge_of(rho: &[f64], dx: f64) -> f64 {
    num::sum(rho.iter().copied()) * dx
}

/// Whole-line charge of a snapshot, including mass that left the domain.
pub fn total_charge(field: &FlowField) -> f64 {
    let [left, right] = field.exterior_mass();
    field.mass_in_domain() + left + right
}

pub fn field_from_density(field: &FlowField) -> Result<PoissonField> {
    field_from_profile(
        field.rho(),
        field.grid().dx(),
        field.exterior_mass(),
        &PoissonOptions::default(),
    )
}

/// Field of an arbitrary nonnegative density sampled on cells of width `dx`.
pub fn field_from_profile(
    rho: &[f64],
    dx: f64,
    exterior_mass: [f64; 2],
    opts: &PoissonOptions,
) -> Result<PoissonField> {
    let mut phi_x = Vec::new();
    let e0 = fill_field(rho, dx, exterior_mass, &mut phi_x);
    if !e0.is_finite() || e0 > opts.max_charge {
        return Err(Error::UnboundedCharge(e0));
    }
    let n = rho.len();
    let edge = (rho[0] + rho[n - 1]) * dx + exterior_mass[0].abs() + exterior_mass[1].abs();
    let boundary_mass_fraction = if e0 > 0.0 { edge / e0 } else { 0.0 };
    Ok(PoissonField {
        phi_x,
        e0,
        boundary_mass_fraction,
    })
}

/// Writes `φ_x` into `out` and returns `E0`. Used by the solver every step.
pub(crate) fn fill_field(rho: &[f64], dx: f64, exterior_mass: [f64; 2], out: &mut Vec<f64>) -> f64 {
    let e0 = charge_of(rho, dx) + exterior_mass[0] + exterior_mass[1];
    let half = 0.5 * e0;
    out.clear();
    out.reserve(rho.len());
    // Running left mass with compensation so that the right end lands on E0.
    let mut left = exterior_mass[0];
    let mut carry = 0.0;
    for &r in rho {
        let half_cell = 0.5 * r * dx;
        out.push(half - (left + carry + half_cell));
        let add = r * dx;
        let t = left + add;
        if num::abs(left) >= num::abs(add) {
            carry += (left - t) + add;
        } else {
            carry += (add - t) + left;
        }
        left = t;
    }
    e0
}

/// `−k ρ_i φ_x,i`: the momentum source. The mass equation has none.
pub fn momentum_source(rho: &[f64], pf: &PoissonField, model: &GasModel) -> Vec<f64> {
    rho.iter()
        .zip(&pf.phi_x)
        .map(|(r, p)| -model.k() * r * p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::Grid1D;
    use alloc::vec;

    /// Cell averages of the indicator of `[a, b]` scaled by `height`.
    fn box_averages(grid: &Grid1D, a: f64, b: f64, height: f64) -> Vec<f64> {
        (0..grid.n())
            .map(|i| {
                let lo = grid.x_min() + i as f64 * grid.dx();
                let hi = lo + grid.dx();
                height * (hi.min(b) - lo.max(a)).max(0.0) / grid.dx()
            })
            .collect()
    }

    #[test]
    fn unit_box_charge_and_field() {
        let grid = Grid1D::new(-2.0, 3.0, 1000).unwrap();
        let rho = box_averages(&grid, 0.0, 1.0, 1.0);
        let pf = field_from_profile(&rho, grid.dx(), [0.0; 2], &PoissonOptions::default()).unwrap();
        assert!((pf.e0 - 1.0).abs() < 1e-12);
        for (i, half) in pf.half_difference().iter().enumerate() {
            let x = grid.center(i);
            let exact = if x < 0.0 {
                -0.5
            } else if x > 1.0 {
                0.5
            } else {
                x - 0.5
            };
            assert!((half - exact).abs() < 1e-12, "x = {x}");
            assert!((pf.phi_x[i] + exact).abs() < 1e-12);
        }
    }

    #[test]
    fn charge_scales_and_adds() {
        let grid = Grid1D::new(-1.0, 4.0, 1024).unwrap();
        let two = box_averages(&grid, 0.0, 1.0, 2.0);
        assert!((charge_of(&two, grid.dx()) - 2.0).abs() < 1e-12);
        let mut both = box_averages(&grid, 0.0, 1.0, 1.0);
        for (a, b) in both.iter_mut().zip(box_averages(&grid, 2.0, 3.0, 1.0)) {
            *a += b;
        }
        assert!((charge_of(&both, grid.dx()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_charge_gives_zero_field() {
        let pf = field_from_profile(&[0.0; 16], 0.1, [0.0; 2], &PoissonOptions::default()).unwrap();
        assert_eq!(pf.e0, 0.0);
        assert!(pf.phi_x.iter().all(|v| *v == 0.0));
        assert!(!pf.support_violated(1e-8));
    }

    #[test]
    fn symmetric_density_has_zero_field_at_center() {
        let grid = Grid1D::new(-5.0, 5.0, 257).unwrap();
        let rho: Vec<f64> = grid.centers().iter().map(|x| libm::exp(-x * x)).collect();
        let pf = field_from_profile(&rho, grid.dx(), [0.0; 2], &PoissonOptions::default()).unwrap();
        assert!(pf.phi_x[128].abs() < 1e-14);
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        assert!(momentum_source(&rho, &pf, &model)[128].abs() < 1e-14);
    }

    #[test]
    fn source_is_minus_k_rho_phi() {
        let pf = PoissonField {
            phi_x: vec![0.5, 0.0],
            e0: 1.0,
            boundary_mass_fraction: 0.0,
        };
        let model = GasModel::new(1.0, 2.0, 2.0).unwrap();
        assert_eq!(momentum_source(&[1.0, 3.0], &pf, &model), vec![-1.0, 0.0]);
    }

    #[test]
    fn exterior_mass_enters_the_far_field() {
        let rho = [0.0; 8];
        let pf = field_from_profile(&rho, 0.5, [1.0, 3.0], &PoissonOptions::default()).unwrap();
        assert_eq!(pf.e0, 4.0);
        // Left mass pulls φ_x down by 1, right mass holds it up: ½(3 − 1).
        assert!(pf.phi_x.iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn unbounded_charge_and_support_flags() {
        let opts = PoissonOptions {
            max_charge: 10.0,
            support_tol: 1e-8,
        };
        assert!(matches!(
            field_from_profile(&[100.0; 8], 1.0, [0.0; 2], &opts),
            Err(Error::UnboundedCharge(_))
        ));
        assert!(matches!(
            field_from_profile(
                &[f64::INFINITY; 8],
                1.0,
                [0.0; 2],
                &PoissonOptions::default()
            ),
            Err(Error::UnboundedCharge(_))
        ));
        let pf = field_from_profile(&[1.0; 8], 1.0, [0.0; 2], &opts).unwrap();
        assert!(pf.support_violated(opts.support_tol));
    }
}
