//! Convergence-region analysis for particle swarm optimization under
//! stagnation, built from stochastic Lyapunov certificates.
//!
//! The toolkit decides, for each parameter point `(c, w)`, whether a
//! positive-definite quadratic Lyapunov candidate exists whose expected
//! one-step difference is negative definite; evaluates the closed-form
//! convergence conditions for both system formulations alongside published
//! comparison regions; rasterizes all of them to measure areas, overlaps,
//! and containments; and cross-validates the certificates with seeded
//! Monte-Carlo ensembles.

pub mod acceptance;
pub mod error;
pub mod lyapunov;
pub mod model;
pub mod qe;
pub mod raster;
pub mod regions;
pub mod report;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use lyapunov::{expected_delta_v, mc_expected_delta_v, QuadForm};
pub use model::{
    build_system, scaled_moments, DriveKind, Moments, PMatrix, PTemplate, StateVec, SwarmParams,
    SystemMatrices, SystemVariant,
};
pub use qe::{
    decide_membership, feasible_1d, neg_def_condition, union_membership, Constraint,
    ConstraintSign, Decision, UniPoly,
};
pub use raster::{agreement, set_ops, subset_violations, GridSpec, Raster, SetOps};
pub use regions::{
    region_predicate, sys1_diagonal_boundary, sys1_diagonal_predicate, Region, RegionId,
    RegionRegistry,
};
pub use sim::{
    classify, run_ensemble, step_once, witness_decay_check, Dynamics, EnsembleStats, SimConfig,
    StepRandoms, Verdict, VerdictKind,
};
