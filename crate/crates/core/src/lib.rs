//! Numerical laboratory for the one-dimensional Euler-Poisson system with
//! γ-law pressure.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerics:
//!
//! * [`gas`]: gas model, grids, flow snapshots and the Riemann-invariant
//!   transforms `(ρ, u) ↔ (R, S)` together with the scaled slopes `X`, `Y`.
//! * [`poisson`]: the whole-line electric field recovered from the density.
//! * [`threshold`]: critical-threshold classification of initial data.
//! * [`solver`]: conservative local Lax-Friedrichs evolution with the
//!   nonlocal Poisson source and blow-up detection.
//! * [`characteristics`]: offline tracing of λ/μ paths through stored
//!   snapshots, Riccati blow-up bounds and invariant-region checks.
//! * [`profiles`]: closed-form initial density and velocity profiles.
//!
//! IO, configuration files and the command line live in the `eplab` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod characteristics;
pub mod diff;
pub mod error;
pub mod gas;
mod num;
pub mod poisson;
pub mod profiles;
pub mod solver;
pub mod threshold;

pub use characteristics::{
    riccati_blowup_bound, trace_path, trace_paths, verify_lower_trap, verify_monotone_buffer,
    CharPath, Family, MonotonicityReport, RiccatiBound, SnapshotSeries, Termination, TraceOptions,
};
pub use error::{Error, Result};
pub use gas::{
    from_riemann, sound_term, to_riemann, FlowField, GasModel, Grid1D, RiemannFields, VacuumPolicy,
    DEFAULT_RHO_FLOOR,
};
pub use poisson::{field_from_density, momentum_source, total_charge, PoissonField};
pub use solver::{physical_flux, simulate, step, Outcome, SimulationTrace, SolverConfig};
pub use threshold::{
    classify, classify_gamma, classify_isothermal, compute_k0, compute_m0, AppliedTheorem,
    ThresholdReport, Verdict,
};
