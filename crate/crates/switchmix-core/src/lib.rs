//! Online mixtures of restarting base learners for mixable losses.
//!
//! The library tracks the best *switching* (piecewise-constant) estimation
//! sequence in hindsight by aggregating hyper-experts — scheduled runs of a
//! base learner — under a mixable loss. Three expert layouts are provided,
//! trading pool size for redundancy:
//!
//! * [`scheme::exp`] — one expert per binary reset pattern (`2^(T-1)` of
//!   them); exact and intractable, the desk-scale gold standard.
//! * [`scheme::quad`] — one expert per time interval (`O(T^2)`); the same
//!   modelling power at polynomial cost.
//! * [`scheme::log`] — one expert per power-of-two restart period
//!   (`O(log T)` alive at once); practical and horizon-free.
//!
//! Each layout ships several transition weightings whose mixture costs are
//! measured against their closed-form bound expressions by the test suite.
//! [`oracle`] supplies the hindsight competitors (best fixed, optimal
//! switching, segment-known and doubling oracles) and the regret
//! decomposition used in reports.
//!
//! Core math is generic over the scalar type through [`real::Real`];
//! `f64` aliases for the main entry points sit at the crate root.

pub mod engine;
pub mod error;
pub mod learner;
pub mod loss;
pub mod oracle;
pub mod path;
pub mod real;
pub mod scheme;

pub use engine::{run_mixture, ExpertPool, RunTrace, Scheme, TraceRow};
pub use error::{Error, Result};
pub use learner::{BaseLearner, LearnerKind, RegretBoundModel};
pub use loss::{Estimate, LossFamily, Observation, WeightedEstimates};
pub use oracle::{
    best_fixed, best_switching, decompose_regret, doubling_oracle, segment_known_oracle, OracleRun,
    RegretReport, SegmentSpec,
};
pub use path::{path_mixture_cost, theorem1_bound_check, PathSpec};
pub use real::Real;

/// `f64` instantiations of the main types.
pub type LossFamily64 = loss::LossFamily<f64>;
pub type Observation64 = loss::Observation<f64>;
pub type Estimate64 = loss::Estimate<f64>;
pub type WeightedEstimates64 = loss::WeightedEstimates<f64>;
pub type BaseLearner64 = learner::BaseLearner<f64>;
pub type RegretBoundModel64 = learner::RegretBoundModel<f64>;
pub type RunTrace64 = engine::RunTrace<f64>;
pub type SegmentSpec64 = oracle::SegmentSpec<f64>;
pub type RegretReport64 = oracle::RegretReport<f64>;
