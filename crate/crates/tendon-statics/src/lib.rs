//! Quasi-static equilibrium of a single tendon-driven robot unit on a
//! ball-socket joint.
//!
//! Given the two cable tensions, the library computes the rotation angle
//! `theta` and the average contact pressure `p` at which the unit is in
//! static equilibrium: pressure is eliminated in closed form from the force
//! balances and the remaining scalar equation in `theta` is solved by
//! bracketed bisection over the unit's mechanical range `[0, 30 deg]`.
//!
//! - [`model`] — physical quantities, contact-zone integrals, pressure
//!   elimination and the scalar equilibrium function.
//! - [`solver`] — bracketed bisection, full-state assembly, verification.
//! - [`analysis`] — curve sampling, tension sweeps, finite-difference
//!   sensitivity and the independent grid-scan oracle.
//! - [`cli`] — config loading and the solve/sweep/curve/validate commands.
//!
//! All library APIs use SI units with angles in radians; degrees appear only
//! at the CLI boundary.

pub mod analysis;
pub mod cli;
pub mod model;
pub mod solver;

pub use analysis::{
    oracle_scan, sample_curve, sensitivity, sweep, CurveSample, Sensitivity, SignChangeInterval,
    SweepRecord, SweepStatus,
};
pub use model::{
    contact_integrals, equilibrium_function, force_resultants, pressure_from_theta, residuals,
    ContactIntegrals, EquilibriumState, ForceResultants, MaterialParams, ModelError, Residuals,
    TensionInput, UnitGeometry,
};
pub use solver::{
    bisect, reference_geometry, reference_material, solve_unit, verify_state, BisectionConfig,
    RootResult, SolverError, VerificationReport,
};
