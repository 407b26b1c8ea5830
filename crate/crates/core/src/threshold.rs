//! Critical-threshold classification of initial data.
//!
//! Everything is phrased through the scaled slopes `X0 = r0/√ρ0`,
//! `Y0 = s0/√ρ0`, computed with the same stencils as [`crate::gas`]:
//!
//! * `γ = 1`: smooth for all time iff `min(X0, Y0) ≥ −√(2k)` everywhere.
//! * `γ > 1`: smooth if `min(X0, Y0) ≥ −K0` everywhere (invariant region
//!   `[−K0, M0]`); breaks down if `min(X0, Y0) < −√(2k)` somewhere. Data in
//!   between is reported as [`Verdict::Indeterminate`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gas::{riemann_from_arrays, FlowField, GasModel, RiemannFields};
use crate::num;

/// Relative slack on margin comparisons, so that data sitting exactly on a
/// threshold is not flipped by rounding in the difference stencils.
const MARGIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    GlobalSmooth,
    FiniteTimeBreakdown,
    Indeterminate,
}

/// Which result produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum AppliedTheorem {
    /// Isothermal iff-threshold `r0, s0 ≥ −√(2kρ0)`.
    IsothermalThreshold,
    /// Invariant region `[−K0, M0]` for `γ > 1`.
    InvariantRegion,
    /// Super-critical breakdown `r0 or s0 < −√(2kρ0)`.
    SupercriticalBreakdown,
    /// Between the sufficient and the breakdown conditions.
    None,
}

/// A margin value together with where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorstMargin {
    pub value: f64,
    pub x: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdReport {
    pub verdict: Verdict,
    pub applied_theorem: AppliedTheorem,
    pub gamma: f64,
    #[cfg_attr(feature = "serde", serde(rename = "M0"))]
    pub m0: f64,
    #[cfg_attr(feature = "serde", serde(rename = "K0"))]
    pub k0: f64,
    /// `min(r0, s0) + √(2kρ0)` when `γ = 1`; equals
    /// `u0x + √(2kρ0) − √A|ρ0x|/ρ0`.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub margins_iso: Option<Vec<f64>>,
    /// `min(r0, s0) + K0√ρ0`: nonnegative everywhere means the invariant
    /// region applies.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub margins_gamma: Vec<f64>,
    /// `min(r0, s0) + √(2kρ0)`: negative anywhere means breakdown.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub margins_breakdown: Vec<f64>,
    pub worst_iso: Option<WorstMargin>,
    pub worst_gamma: WorstMargin,
    pub worst_breakdown: WorstMargin,
    /// Location of the worst violation of the condition behind the verdict.
    pub witness_x: Option<f64>,
    /// `min_x min(X0, Y0)`.
    pub min_scaled: f64,
    /// `max_x max(X0, Y0)`.
    pub max_scaled: f64,
    /// `|u0x| ≤ √(2kρ0) − √(Aγ)|ρ0x|ρ0^((γ−3)/2)` everywhere, i.e.
    /// `max(|r0|, |s0|) ≤ √(2kρ0)`.
    pub bounded_slopes_condition: bool,
    /// `min(X0, Y0) ≥ θ(1−1/√2)M0/(2(1+θ)) − √(k/(1+θ))` everywhere; a
    /// simplified sufficient condition that implies `min(X0, Y0) ≥ −K0`.
    pub simplified_condition: bool,
}

/// `M0 = max(√(2k), max X0, max Y0)`.
pub fn compute_m0(rf0: &RiemannFields, k: f64) -> f64 {
    num::sqrt(2.0 * k).max(rf0.max_scaled())
}

/// `K0 = (−θM0 + √(θ²M0² + 8k(1+θ))) / (2(1+θ))`, the positive root of
/// `k − (1+θ)/2·K² − (θ/2)M0·K = 0`.
pub fn compute_k0(m0: f64, model: &GasModel) -> f64 {
    k0_from(m0, model.theta(), model.k())
}

pub(crate) fn k0_from(m0: f64, theta: f64, k: f64) -> f64 {
    let b = theta * m0;
    let disc = num::sqrt(b * b + 8.0 * k * (1.0 + theta));
    // Rationalised form avoids cancellation when θM0 dominates.
    let root = if b > 0.0 {
        8.0 * k * (1.0 + theta) / (b + disc)
    } else {
        disc - b
    };
    root / (2.0 * (1.0 + theta))
}

/// Lower edge `C+(M) = √((2k + θM²)/(1+θ))` of the buffer zone `(C+(M), M)`.
pub fn buffer_lower_edge(m: f64, model: &GasModel) -> f64 {
    let theta = model.theta();
    num::sqrt((2.0 * model.k() + theta * m * m) / (1.0 + theta))
}

/// Classifies with the rule matching `model.gamma()`.
pub fn classify(data: &FlowField, model: &GasModel) -> Result<ThresholdReport> {
    if model.is_isothermal() {
        classify_isothermal(data, model)
    } else {
        classify_gamma(data, model)
    }
}

pub fn classify_isothermal(data: &FlowField, model: &GasModel) -> Result<ThresholdReport> {
    if !model.is_isothermal() {
        return Err(Error::WrongGamma {
            routine: "classify_isothermal",
            gamma: model.gamma(),
        });
    }
    let rf = riemann_from_arrays(data.grid(), data.rho(), data.u(), model)?;
    Ok(build_report(data, model, &rf))
}

pub fn classify_gamma(data: &FlowField, model: &GasModel) -> Result<ThresholdReport> {
    if model.is_isothermal() {
        return Err(Error::WrongGamma {
            routine: "classify_gamma",
            gamma: model.gamma(),
        });
    }
    let rf = riemann_from_arrays(data.grid(), data.rho(), data.u(), model)?;
    Ok(build_report(data, model, &rf))
}

fn worst(margins: &[f64], data: &FlowField) -> WorstMargin {
    let (index, value) =
        margins
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) },
            );
    WorstMargin {
        value,
        x: data.grid().center(index),
        index,
    }
}

fn build_report(data: &FlowField, model: &GasModel, rf: &RiemannFields) -> ThresholdReport {
    let k = model.k();
    let theta = model.theta();
    let poisson = num::sqrt(2.0 * k);
    let m0 = compute_m0(rf, k);
    let k0 = compute_k0(m0, model);
    let simplified_floor = theta * (1.0 - core::f64::consts::FRAC_1_SQRT_2) * m0
        / (2.0 * (1.0 + theta))
        - num::sqrt(k / (1.0 + theta));

    let n = data.rho().len();
    let mut margins_gamma = Vec::with_capacity(n);
    let mut margins_breakdown = Vec::with_capacity(n);
    let mut any_breakdown = false;
    let mut all_invariant = true;
    let mut bounded_slopes_condition = true;
    let mut simplified_condition = true;
    for i in 0..n {
        let rho = data.rho()[i];
        let root = num::sqrt(rho);
        let low = rf.slope_r[i].min(rf.slope_s[i]);
        let high = num::abs(rf.slope_r[i]).max(num::abs(rf.slope_s[i]));
        let mg = low + k0 * root;
        let mb = low + poisson * root;
        margins_gamma.push(mg);
        margins_breakdown.push(mb);
        if mb < -MARGIN_EPS * (poisson * root).max(f64::MIN_POSITIVE) {
            any_breakdown = true;
        }
        if mg < -MARGIN_EPS * (k0 * root).max(f64::MIN_POSITIVE) {
            all_invariant = false;
        }
        if high > poisson * root * (1.0 + MARGIN_EPS) {
            bounded_slopes_condition = false;
        }
        let scaled_low = rf.scaled_r[i].min(rf.scaled_s[i]);
        if scaled_low < simplified_floor - MARGIN_EPS * num::abs(simplified_floor) {
            simplified_condition = false;
        }
    }

    let worst_gamma = worst(&margins_gamma, data);
    let worst_breakdown = worst(&margins_breakdown, data);
    let (verdict, applied_theorem, witness_x) = if model.is_isothermal() {
        if any_breakdown {
            (
                Verdict::FiniteTimeBreakdown,
                AppliedTheorem::IsothermalThreshold,
                Some(worst_breakdown.x),
            )
        } else {
            (
                Verdict::GlobalSmooth,
                AppliedTheorem::IsothermalThreshold,
                None,
            )
        }
    } else if any_breakdown {
        (
            Verdict::FiniteTimeBreakdown,
            AppliedTheorem::SupercriticalBreakdown,
            Some(worst_breakdown.x),
        )
    } else if all_invariant {
        (Verdict::GlobalSmooth, AppliedTheorem::InvariantRegion, None)
    } else {
        (
            Verdict::Indeterminate,
            AppliedTheorem::None,
            Some(worst_gamma.x),
        )
    };
    let (margins_iso, worst_iso) = if model.is_isothermal() {
        (Some(margins_breakdown.clone()), Some(worst_breakdown))
    } else {
        (None, None)
    };

    ThresholdReport {
        verdict,
        applied_theorem,
        gamma: model.gamma(),
        m0,
        k0,
        margins_iso,
        margins_gamma,
        margins_breakdown,
        worst_iso,
        worst_gamma,
        worst_breakdown,
        witness_x,
        min_scaled: rf.min_scaled(),
        max_scaled: rf.max_scaled(),
        bounded_slopes_condition,
        simplified_condition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::Grid1D;
    use alloc::vec;

    fn field(grid: Grid1D, rho: impl Fn(f64) -> f64, u: impl Fn(f64) -> f64) -> FlowField {
        let xs = grid.centers();
        FlowField::new(
            grid,
            xs.iter().map(|&x| rho(x)).collect(),
            xs.iter().map(|&x| u(x)).collect(),
        )
        .unwrap()
    }

    fn quadratic_residual(k0: f64, m0: f64, theta: f64, k: f64) -> f64 {
        k - 0.5 * (1.0 + theta) * k0 * k0 - 0.5 * theta * m0 * k0
    }

    #[test]
    fn k0_examples() {
        let iso = GasModel::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(compute_k0(2.0, &iso), 2.0);
        let g2 = GasModel::new(1.0, 2.0, 1.0).unwrap();
        let k0 = compute_k0(2f64.sqrt(), &g2);
        // Root of the quadratic, found independently by bisection.
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if quadratic_residual(mid, 2f64.sqrt(), 0.5, 1.0) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((k0 - lo).abs() < 1e-12);
        assert!((k0 - 0.942809).abs() < 1e-6);
        let tiny = GasModel::new(1.0, 2.0, 1e-12).unwrap();
        assert!(compute_k0(2.0, &tiny) < 1e-11);
    }

    #[test]
    fn m0_uses_max_semantics() {
        let rf = RiemannFields {
            riemann_r: vec![0.0; 3],
            riemann_s: vec![0.0; 3],
            slope_r: vec![0.0; 3],
            slope_s: vec![0.0; 3],
            scaled_r: vec![-1.0, 3.0, 0.0],
            scaled_s: vec![1.0, -2.0, 0.5],
            lambda: vec![0.0; 3],
            mu: vec![0.0; 3],
        };
        assert_eq!(compute_m0(&rf, 1.0), 3.0);
        let neg = RiemannFields {
            scaled_r: vec![-1.0; 3],
            scaled_s: vec![-0.5; 3],
            ..rf
        };
        assert_eq!(compute_m0(&neg, 1.0), 2f64.sqrt());
    }

    #[test]
    fn isothermal_margin_example_and_wrong_gamma() {
        let grid = Grid1D::new(-1.0, 1.0, 64).unwrap();
        let model = GasModel::new(1.0, 1.0, 1.0).unwrap();
        let data = field(grid, |_| 1.0, |x| -x);
        let rep = classify_isothermal(&data, &model).unwrap();
        let m = rep.margins_iso.as_ref().unwrap();
        assert!(m.iter().all(|v| (v - (2f64.sqrt() - 1.0)).abs() < 1e-12));
        assert_eq!(rep.verdict, Verdict::GlobalSmooth);
        assert!(matches!(
            classify_gamma(&data, &model),
            Err(Error::WrongGamma { .. })
        ));
        let g2 = GasModel::new(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            classify_isothermal(&data, &g2),
            Err(Error::WrongGamma { .. })
        ));
    }

    #[test]
    fn isothermal_equality_is_smooth() {
        let grid = Grid1D::new(-1.0, 1.0, 64).unwrap();
        let model = GasModel::new(1.0, 1.0, 1.0).unwrap();
        let data = field(grid, |_| 1.0, |x| -2f64.sqrt() * x);
        let rep = classify(&data, &model).unwrap();
        assert_eq!(rep.verdict, Verdict::GlobalSmooth);
        assert!(rep.worst_iso.unwrap().value.abs() < 1e-12);
        let steeper = field(grid, |_| 1.0, |x| -1.0001 * 2f64.sqrt() * x);
        let rep = classify(&steeper, &model).unwrap();
        assert_eq!(rep.verdict, Verdict::FiniteTimeBreakdown);
        assert!(rep.witness_x.is_some());
    }

    #[test]
    fn pressureless_reduces_to_velocity_threshold() {
        let grid = Grid1D::new(-3.0, 3.0, 128).unwrap();
        let model = GasModel::new(0.0, 1.0, 2.0).unwrap();
        let rho = |x: f64| 1.0 + 0.5 * libm::exp(-x * x);
        let data = field(grid, rho, |x| -0.7 * libm::sin(x));
        let rep = classify(&data, &model).unwrap();
        let ux = data.velocity_gradient();
        for (i, m) in rep.margins_iso.unwrap().iter().enumerate() {
            let expected = ux[i] + (2.0 * 2.0 * data.rho()[i]).sqrt();
            assert!((m - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_between_conditions_is_indeterminate() {
        // Flat density, compressive velocity: X0 = Y0 = u0x, M0 = √2, K0 = √2/1.5.
        let grid = Grid1D::new(-1.0, 1.0, 64).unwrap();
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        let data = field(grid, |_| 1.0, |x| -1.2 * x);
        let rep = classify(&data, &model).unwrap();
        assert!((rep.m0 - 2f64.sqrt()).abs() < 1e-12);
        assert!((rep.k0 - 2f64.sqrt() / 1.5).abs() < 1e-12);
        assert_eq!(rep.verdict, Verdict::Indeterminate);
        assert_eq!(rep.applied_theorem, AppliedTheorem::None);
        assert!(rep.bounded_slopes_condition);
        let mild = field(grid, |_| 1.0, |x| -0.9 * x);
        assert_eq!(
            classify(&mild, &model).unwrap().verdict,
            Verdict::GlobalSmooth
        );
        let steep = field(grid, |_| 1.0, |x| -1.5 * x);
        let rep = classify(&steep, &model).unwrap();
        assert_eq!(rep.verdict, Verdict::FiniteTimeBreakdown);
        assert_eq!(rep.applied_theorem, AppliedTheorem::SupercriticalBreakdown);
    }

    #[test]
    fn buffer_edge_example() {
        let model = GasModel::new(1.0, 2.0, 1.0).unwrap();
        let c = buffer_lower_edge(2.0, &model);
        assert!((c - (8.0f64 / 3.0).sqrt()).abs() < 1e-14);
        // c is the largest root of k − (1+θ)/2 c² + (θ/2) M² = 0.
        assert!((1.0 - 0.75 * c * c + 0.25 * 4.0).abs() < 1e-12);
        let iso = GasModel::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(buffer_lower_edge(5.0, &iso), 2f64.sqrt());
    }
}
