//! Closed-form initial profiles.
//!
//! Densities decay algebraically, so the total charge is finite while the
//! scaled slopes `X0`, `Y0` stay bounded in the tails. A Gaussian tail would
//! make `ρ_x/ρ^(3/2)` grow without bound and spoil every threshold.

use crate::error::{Error, Result};
use crate::gas::{FlowField, Grid1D};
use crate::num;

use core::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DensityProfile {
    /// `a/(1 + ((x−c)/w)²) + p·exp(−(x−c)²/(2v²))`.
    Bump {
        lorentz_amplitude: f64,
        lorentz_width: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        gauss_amplitude: f64,
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        gauss_width: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        center: f64,
    },
    /// Plateau 1 for `x < 0`, linear ramp down to ½ over `[0, ε]`, plateau ½
    /// after. Corners are rounded over `±σ`; beyond `plateau` on either side
    /// the level decays like `1/(1 + (d/taper_width)²)`.
    Ramp {
        eps: f64,
        sigma: f64,
        plateau: f64,
        taper_width: f64,
    },
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

impl DensityProfile {
    /// The ramp with the default rounding `σ = ε/10`.
    pub fn ramp(eps: f64) -> Self {
        DensityProfile::Ramp {
            eps,
            sigma: 0.1 * eps,
            plateau: 1.5,
            taper_width: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DensityProfile::Bump {
                lorentz_amplitude,
                lorentz_width,
                gauss_amplitude,
                gauss_width,
                center,
            } => {
                if !(lorentz_amplitude > 0.0 && lorentz_width > 0.0) {
                    return Err(Error::InvalidConfig("bump needs a positive algebraic part"));
                }
                if !(gauss_amplitude >= 0.0 && gauss_width > 0.0 && center.is_finite()) {
                    return Err(Error::InvalidConfig("bad Gaussian part of bump"));
                }
            }
            DensityProfile::Ramp {
                eps,
                sigma,
                plateau,
                taper_width,
            } => {
                if !(eps > 0.0 && sigma > 0.0 && sigma <= 0.5 * eps) {
                    return Err(Error::InvalidConfig("ramp needs 0 < sigma <= eps/2"));
                }
                if !(plateau >= sigma && taper_width > 0.0) {
                    return Err(Error::InvalidConfig(
                        "ramp plateau and taper must be positive",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            DensityProfile::Bump {
                lorentz_amplitude,
                lorentz_width,
                gauss_amplitude,
                gauss_width,
                center,
            } => {
                let z = (x - center) / lorentz_width;
                let g = (x - center) / gauss_width;
                lorentz_amplitude / (1.0 + z * z) + gauss_amplitude * num::exp(-0.5 * g * g)
            }
            DensityProfile::Ramp {
                eps,
                sigma,
                plateau,
                taper_width,
            } => {
                let level = 1.0 - (soft_relu(x, sigma) - soft_relu(x - eps, sigma)) / (2.0 * eps);
                let d = if x < -plateau {
                    -plateau - x
                } else if x > eps + plateau {
                    x - eps - plateau
                } else {
                    0.0
                };
                let z = d / taper_width;
                level / (1.0 + z * z)
            }
        }
    }

    /// Charge outside `[x_min, x_max]`, `[left, right]`.
    pub fn tail_mass(&self, x_min: f64, x_max: f64) -> [f64; 2] {
        match *self {
            DensityProfile::Bump {
                lorentz_amplitude,
                lorentz_width,
                gauss_amplitude,
                gauss_width,
                center,
            } => {
                let side = |d: f64| {
                    let lorentz =
                        lorentz_amplitude * lorentz_width * lorentz_tail(d / lorentz_width);
                    let gauss = gauss_amplitude
                        * gauss_width
                        * num::sqrt(PI / 2.0)
                        * libm::erfc(d / (gauss_width * core::f64::consts::SQRT_2));
                    lorentz + gauss
                };
                [side(center - x_min), side(x_max - center)]
            }
            DensityProfile::Ramp {
                eps,
                plateau,
                taper_width,
                ..
            } => {
                // Corners are rounded well inside the plateaus, so the tails
                // are exact Lorentzian decays of the levels 1 and ½.
                let left = taper_width * lorentz_tail((-plateau - x_min) / taper_width);
                let right = 0.5 * taper_width * lorentz_tail((x_max - eps - plateau) / taper_width);
                [left, right]
            }
        }
    }
}

/// `∫_z^∞ ds/(1+s²)`, also for `z < 0`.
fn lorentz_tail(z: f64) -> f64 {
    FRAC_PI_2 - libm::atan(z)
}

/// `max(0, x)` with the corner replaced by `(x+σ)²/(4σ)` on `|x| < σ`.
fn soft_relu(x: f64, sigma: f64) -> f64 {
    if x <= -sigma {
        0.0
    } else if x >= sigma {
        x
    } else {
        (x + sigma) * (x + sigma) / (4.0 * sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum VelocityProfile {
    Rest,
    Uniform {
        value: f64,
    },
    /// `slope · (x−c) · exp(−(x−c)²/(2w²))`; `u_x(c) = slope`.
    Dip {
        slope: f64,
        width: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        center: f64,
    },
    /// `−amplitude · tanh((x−c)/w)`.
    Tanh {
        amplitude: f64,
        width: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        center: f64,
    },
}

impl VelocityProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            VelocityProfile::Rest => true,
            VelocityProfile::Uniform { value } => value.is_finite(),
            VelocityProfile::Dip {
                slope,
                width,
                center,
            } => slope.is_finite() && width > 0.0 && center.is_finite(),
            VelocityProfile::Tanh {
                amplitude,
                width,
                center,
            } => amplitude.is_finite() && width > 0.0 && center.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("bad velocity profile parameters"))
        }
    }

    pub fn velocity(&self, x: f64) -> f64 {
        match *self {
            VelocityProfile::Rest => 0.0,
            VelocityProfile::Uniform { value } => value,
            VelocityProfile::Dip {
                slope,
                width,
                center,
            } => {
                let z = (x - center) / width;
                slope * (x - center) * num::exp(-0.5 * z * z)
            }
            VelocityProfile::Tanh {
                amplitude,
                width,
                center,
            } => -amplitude * libm::tanh((x - center) / width),
        }
    }
}

/// Point values at cell centres; the charge outside the grid is carried as
/// exterior mass.
pub fn sample(grid: Grid1D, rho: &DensityProfile, u: &VelocityProfile) -> Result<FlowField> {
    rho.validate()?;
    u.validate()?;
    let xs = grid.centers();
    let density = xs.iter().map(|&x| rho.density(x)).collect();
    let velocity = xs.iter().map(|&x| u.velocity(x)).collect();
    let field = FlowField::new(grid, density, velocity)?;
    let tails = rho.tail_mass(grid.x_min(), grid.x_max());
    Ok(field.with_exterior_mass(tails))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    #[test]
    fn ramp_matches_piecewise_definition_away_from_corners() {
        let p = DensityProfile::ramp(0.1);
        assert_eq!(p.density(-0.5), 1.0);
        assert!((p.density(1.0) - 0.5).abs() < 1e-15);
        assert!((p.density(0.05) - 0.75).abs() < 1e-15);
        // Rounded corners stay between the plateau and the ramp line.
        let c = p.density(0.0);
        assert!((c - (1.0 - 0.0025 / 0.2)).abs() < 1e-12);
        // C¹: one-sided difference quotients agree at the blend edges.
        for x in [-0.01, 0.01, 0.09, 0.11] {
            let h = 1e-7;
            let l = (p.density(x) - p.density(x - h)) / h;
            let r = (p.density(x + h) - p.density(x)) / h;
            assert!((l - r).abs() < 1e-4, "x = {x}");
        }
    }

    #[test]
    fn ramp_tapers_and_tail_mass_closes_the_charge() {
        let p = DensityProfile::ramp(0.1);
        assert!((p.density(-3.5) - 0.5).abs() < 1e-15);
        let [left, right] = p.tail_mass(-8.0, 8.0);
        let wide = quad(|x| p.density(x), -8.0 - 4000.0, -8.0, 400_000);
        assert!((left - wide).abs() < 2e-3);
        let right_num = quad(|x| p.density(x), 8.0, 8.0 + 4000.0, 400_000);
        assert!((right - right_num).abs() < 2e-3);
    }

    #[test]
    fn bump_tail_mass() {
        let p = DensityProfile::Bump {
            lorentz_amplitude: 1.0,
            lorentz_width: 2.0,
            gauss_amplitude: 0.5,
            gauss_width: 1.0,
            center: 0.0,
        };
        let [l, r] = p.tail_mass(-10.0, 10.0);
        assert!((l - r).abs() < 1e-15);
        let total = 2.0 * PI + 0.5 * (2.0 * PI).sqrt();
        let inside = quad(|x| p.density(x), -10.0, 10.0, 200_000);
        assert!((inside + l + r - total).abs() < 1e-8);
    }

    #[test]
    fn dip_slope_at_center() {
        let v = VelocityProfile::Dip {
            slope: -1.3,
            width: 0.7,
            center: 0.4,
        };
        let h = 1e-6;
        let d = (v.velocity(0.4 + h) - v.velocity(0.4 - h)) / (2.0 * h);
        assert!((d + 1.3).abs() < 1e-8);
        let t = VelocityProfile::Tanh {
            amplitude: 2.0,
            width: 0.5,
            center: 0.0,
        };
        let d = (t.velocity(h) - t.velocity(-h)) / (2.0 * h);
        assert!((d + 4.0).abs() < 1e-6);
    }

    #[test]
    fn validation() {
        assert!(DensityProfile::Ramp {
            eps: 0.1,
            sigma: 0.2,
            plateau: 1.0,
            taper_width: 1.0
        }
        .validate()
        .is_err());
        assert!(VelocityProfile::Dip {
            slope: 1.0,
            width: 0.0,
            center: 0.0
        }
        .validate()
        .is_err());
    }
}
