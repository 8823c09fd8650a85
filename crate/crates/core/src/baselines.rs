//! Non-learning comparison prioritizers: Random, Sorting and Weighting.
//!
//! All three are stateless across cycles except through the shared
//! [`TestCaseRecord`] updates; they see exactly the same information as the
//! learning agents.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::agents::Agent;
use crate::domain::{
    scaled_features, CycleId, FeatureScaling, PrioritizedSuite, TestCaseRecord, TestId,
};
use crate::error::Result;
use crate::scalar::{self, Scalar};

/// Uniform random priority in `[0, 1)`.
pub fn random_prioritize<S: Scalar>(
    suite: &[TestCaseRecord<S>],
    current_cycle: CycleId,
    rng: &mut dyn RngCore,
) -> Result<PrioritizedSuite<S>> {
    let items = suite
        .iter()
        .map(|record| (record.id.clone(), rng.random_range(S::zero()..S::one())))
        .collect();
    PrioritizedSuite::new(current_cycle, items)
}

/// Failure-recency score: sum of `2^-k` over the k-th most recent verdicts
/// that failed (k starting at 1). Recently failed tests sort first;
/// never-run tests score 0.
pub fn sorting_score<S: Scalar>(record: &TestCaseRecord<S>) -> S {
    let half = S::one() / scalar::cast(2.0);
    let mut weight = half;
    let mut score = S::zero();
    for &passed in &record.verdict_history {
        if !passed {
            score += weight;
        }
        weight *= half;
    }
    score
}

/// Tests sorted by their recent verdicts, recent failures weighing most.
pub fn sorting_prioritize<S: Scalar>(
    suite: &[TestCaseRecord<S>],
    current_cycle: CycleId,
) -> Result<PrioritizedSuite<S>> {
    let items = suite
        .iter()
        .map(|record| (record.id.clone(), sorting_score(record)))
        .collect();
    PrioritizedSuite::new(current_cycle, items)
}

/// Equal-weight sum of the same scaled feature vector the network agent
/// sees: scaled duration + scaled staleness + history failure bits.
pub fn weighting_score<S: Scalar>(
    record: &TestCaseRecord<S>,
    current_cycle: CycleId,
    history_length: usize,
    scaling: &FeatureScaling<S>,
) -> S {
    scaled_features(record, current_cycle, history_length, scaling)
        .iter()
        .fold(S::zero(), |acc, &f| acc + f)
}

/// Naive linear prioritizer over the agent features with all weights 1.
pub fn weighting_prioritize<S: Scalar>(
    suite: &[TestCaseRecord<S>],
    current_cycle: CycleId,
    history_length: usize,
    scaling: &FeatureScaling<S>,
) -> Result<PrioritizedSuite<S>> {
    let items = suite
        .iter()
        .map(|record| {
            (
                record.id.clone(),
                weighting_score(record, current_cycle, history_length, scaling),
            )
        })
        .collect();
    PrioritizedSuite::new(current_cycle, items)
}

pub struct RandomBaseline;

impl<S: Scalar> Agent<S> for RandomBaseline {
    fn act(&mut self, _record: &TestCaseRecord<S>, _cycle: CycleId, rng: &mut dyn RngCore) -> S {
        rng.random_range(S::zero()..S::one())
    }

    fn learn(&mut self, _rewards: &BTreeMap<TestId, S>, _rng: &mut dyn RngCore) {}
}

pub struct SortingBaseline;

impl<S: Scalar> Agent<S> for SortingBaseline {
    fn act(&mut self, record: &TestCaseRecord<S>, _cycle: CycleId, _rng: &mut dyn RngCore) -> S {
        sorting_score(record)
    }

    fn learn(&mut self, _rewards: &BTreeMap<TestId, S>, _rng: &mut dyn RngCore) {}
}

pub struct WeightingBaseline<S = f64> {
    pub history_length: usize,
    pub scaling: FeatureScaling<S>,
}

impl<S: Scalar> Agent<S> for WeightingBaseline<S> {
    fn act(&mut self, record: &TestCaseRecord<S>, cycle: CycleId, _rng: &mut dyn RngCore) -> S {
        weighting_score(record, cycle, self.history_length, &self.scaling)
    }

    fn learn(&mut self, _rewards: &BTreeMap<TestId, S>, _rng: &mut dyn RngCore) {}
}
