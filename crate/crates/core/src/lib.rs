//! Adaptive test case prioritization and selection for continuous integration.
//!
//! Each CI cycle, a prioritization method assigns every test case a priority
//! from its metadata (estimated duration, staleness, recent verdicts), a
//! scheduler selects an ordered subset under a time budget, the schedule is
//! executed (here: replayed against logged results) and scored with NAPFD,
//! and the reinforcement-learning agents are rewarded so the next cycle's
//! priorities improve.
//!
//! The crate is generic over the floating-point scalar via [`Scalar`]
//! (implemented for `f32` and `f64`); all public types default to `f64`.

pub mod agents;
pub mod baselines;
pub mod domain;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod ingestion;
pub mod rewards;
pub mod scalar;
pub mod scheduler;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use domain::{
    CycleId, CycleLog, PrioritizedSuite, Schedule, ScheduleResult, TestCaseRecord, TestId,
};
pub use evaluation::CycleEvaluation;
pub use experiment::{ExperimentConfig, Method};
pub use ingestion::{Dataset, SyntheticSpec};
pub use rewards::{RewardAssignment, RewardKind};

/// Concrete aliases for the default `f64` instantiation.
pub type TestCaseRecord64 = domain::TestCaseRecord<f64>;
pub type CycleLog64 = domain::CycleLog<f64>;
pub type Dataset64 = ingestion::Dataset<f64>;
pub type Schedule64 = domain::Schedule<f64>;
pub type ScheduleResult64 = domain::ScheduleResult<f64>;
