//! Reward functions mapping a completed cycle's execution outcome to a
//! per-test-case reward over the whole suite.
//!
//! Rewards are zero or positive: in a live CI setting nothing is known about
//! test cases that were not executed, so undesired behavior cannot be
//! punished, only desired behavior reinforced.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{CycleId, ScheduleResult, TestId};
use crate::error::Error;
use crate::scalar::{self, Scalar};

/// Per-test rewards for one cycle. Covers every test of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardAssignment<S = f64> {
    pub cycle_id: CycleId,
    pub rewards: BTreeMap<TestId, S>,
}

impl<S: Scalar> RewardAssignment<S> {
    pub fn get(&self, id: &TestId) -> Option<S> {
        self.rewards.get(id).copied()
    }
}

/// Which tests' experiences are fed back to the agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackScope {
    /// Every test of the suite, scheduled or not.
    WholeSuite,
    /// Only the tests that were actually executed. A zero reward for an
    /// unscheduled test carries no information, so it is not replayed.
    ScheduledOnly,
}

/// Selector for the three reward functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    /// Whole suite rewarded with the number of scheduled failures.
    FailCount,
    /// Each scheduled test rewarded with its own failure indicator.
    TcFail,
    /// Rank-sensitive variant of the failure count.
    TimeRank,
}

impl RewardKind {
    pub const ALL: [RewardKind; 3] = [RewardKind::FailCount, RewardKind::TcFail, RewardKind::TimeRank];

    pub fn token(self) -> &'static str {
        match self {
            RewardKind::FailCount => "failcount",
            RewardKind::TcFail => "tcfail",
            RewardKind::TimeRank => "timerank",
        }
    }

    pub fn apply<S: Scalar>(self, result: &ScheduleResult<S>, suite: &[TestId]) -> RewardAssignment<S> {
        match self {
            RewardKind::FailCount => failure_count_reward(result, suite),
            RewardKind::TcFail => test_case_failure_reward(result, suite),
            RewardKind::TimeRank => time_ranked_reward(result, suite),
        }
    }

    pub fn feedback_scope(self) -> FeedbackScope {
        match self {
            RewardKind::FailCount => FeedbackScope::WholeSuite,
            RewardKind::TcFail | RewardKind::TimeRank => FeedbackScope::ScheduledOnly,
        }
    }
}

impl fmt::Display for RewardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for RewardKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "failcount" => Ok(RewardKind::FailCount),
            "tcfail" => Ok(RewardKind::TcFail),
            "timerank" => Ok(RewardKind::TimeRank),
            other => Err(Error::Config(format!(
                "unknown reward `{other}` (expected failcount|tcfail|timerank)"
            ))),
        }
    }
}

/// Every test of the suite, scheduled or not, receives the number of failed
/// test cases in the schedule.
pub fn failure_count_reward<S: Scalar>(
    result: &ScheduleResult<S>,
    suite: &[TestId],
) -> RewardAssignment<S> {
    let failed = scalar::cast::<S>(result.detected_failures() as f64);
    let rewards = suite.iter().map(|id| (id.clone(), failed)).collect();
    RewardAssignment {
        cycle_id: result.schedule.cycle_id,
        rewards,
    }
}

/// Each scheduled test receives its own failure indicator: 1 if it failed,
/// 0 if it passed. Unscheduled tests receive 0.
pub fn test_case_failure_reward<S: Scalar>(
    result: &ScheduleResult<S>,
    suite: &[TestId],
) -> RewardAssignment<S> {
    let mut rewards: BTreeMap<TestId, S> =
        suite.iter().map(|id| (id.clone(), S::zero())).collect();
    for (id, verdict) in result.executed() {
        let value = if verdict.passed { S::zero() } else { S::one() };
        rewards.insert(id.clone(), value);
    }
    RewardAssignment {
        cycle_id: result.schedule.cycle_id,
        rewards,
    }
}

/// Each scheduled test receives the total number of scheduled failures,
/// reduced for *passed* tests by the number of failures ranked after them:
/// a passed test executed before failing tests delayed the detections and
/// is rewarded less. Failed tests always receive the full failure count.
/// Unscheduled tests receive 0.
pub fn time_ranked_reward<S: Scalar>(
    result: &ScheduleResult<S>,
    suite: &[TestId],
) -> RewardAssignment<S> {
    let total_failed = result.detected_failures();
    let mut rewards: BTreeMap<TestId, S> =
        suite.iter().map(|id| (id.clone(), S::zero())).collect();

    // failures_after[i] = scheduled failures at ranks > i+1
    let n = result.verdicts.len();
    let mut failures_after = vec![0usize; n];
    let mut seen = 0usize;
    for i in (0..n).rev() {
        failures_after[i] = seen;
        if !result.verdicts[i].passed {
            seen += 1;
        }
    }

    for (i, (id, verdict)) in result.executed().enumerate() {
        let value = if verdict.passed {
            total_failed - failures_after[i]
        } else {
            total_failed
        };
        rewards.insert(id.clone(), scalar::cast(value as f64));
    }
    RewardAssignment {
        cycle_id: result.schedule.cycle_id,
        rewards,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ExecutedTest, Schedule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn result_from(verdicts: &[bool], undetected: usize) -> (ScheduleResult<f64>, Vec<TestId>) {
        let ids: Vec<TestId> = (0..verdicts.len())
            .map(|i| TestId::new(format!("t{i}")))
            .collect();
        let mut suite = ids.clone();
        for u in 0..undetected {
            suite.push(TestId::new(format!("u{u}")));
        }
        let result = ScheduleResult {
            schedule: Schedule {
                cycle_id: 0,
                ordered_test_ids: ids,
                budget: verdicts.len() as f64,
            },
            verdicts: verdicts
                .iter()
                .map(|&passed| ExecutedTest {
                    passed,
                    actual_duration: 1.0,
                })
                .collect(),
            undetected_failures: undetected,
        };
        (result, suite)
    }

    /// Naive re-derivation of the time-ranked reward: for every scheduled
    /// test, count failures ranked strictly after it by double loop.
    fn naive_time_ranked(result: &ScheduleResult<f64>, suite: &[TestId]) -> BTreeMap<TestId, f64> {
        let total_failed = result
            .verdicts
            .iter()
            .filter(|v| !v.passed)
            .count() as f64;
        let mut rewards: BTreeMap<TestId, f64> =
            suite.iter().map(|id| (id.clone(), 0.0)).collect();
        for (i, (id, verdict)) in result.executed().enumerate() {
            let mut after = 0.0;
            for (j, other) in result.verdicts.iter().enumerate() {
                if j > i && !other.passed {
                    after += 1.0;
                }
            }
            let v = if verdict.passed { 1.0 } else { 0.0 };
            rewards.insert(id.clone(), total_failed - v * after);
        }
        rewards
    }

    #[test]
    fn failure_count_rewards_whole_suite_with_constant() {
        // 3 scheduled, 2 failed, suite of 5
        let (result, suite) = result_from(&[true, false, false], 2);
        let assignment = failure_count_reward(&result, &suite);
        assert_eq!(assignment.rewards.len(), 5);
        assert!(assignment.rewards.values().all(|&r| r == 2.0));
    }

    #[test]
    fn failure_count_zero_when_nothing_failed() {
        let (result, suite) = result_from(&[true, true], 0);
        let assignment = failure_count_reward(&result, &suite);
        assert!(assignment.rewards.values().all(|&r| r == 0.0));

        let (empty, suite) = result_from(&[], 0);
        // empty schedule still rewards the (empty) suite with zeros
        assert!(failure_count_reward(&empty, &suite).rewards.is_empty());
    }

    #[test]
    fn test_case_failure_rewards_individual_verdicts() {
        let (result, mut suite) = result_from(&[true, false, false], 0);
        suite.push(TestId::new("unscheduled"));
        let assignment = test_case_failure_reward(&result, &suite);
        assert_eq!(assignment.get(&"t0".into()), Some(0.0));
        assert_eq!(assignment.get(&"t1".into()), Some(1.0));
        assert_eq!(assignment.get(&"t2".into()), Some(1.0));
        assert_eq!(assignment.get(&"unscheduled".into()), Some(0.0));
    }

    #[test]
    fn time_ranked_hand_trace() {
        // schedule [t1 pass, t2 fail, t3 fail]: |fail| = 2
        let (result, suite) = result_from(&[true, false, false], 0);
        let assignment = time_ranked_reward(&result, &suite);
        assert_eq!(assignment.get(&"t0".into()), Some(0.0));
        assert_eq!(assignment.get(&"t1".into()), Some(2.0));
        assert_eq!(assignment.get(&"t2".into()), Some(2.0));
    }

    #[test]
    fn time_ranked_passed_after_last_failure_keeps_full_reward() {
        // schedule [fail, pass]: |fail| = 1, no failures after the pass
        let (result, suite) = result_from(&[false, true], 0);
        let assignment = time_ranked_reward(&result, &suite);
        assert_eq!(assignment.get(&"t0".into()), Some(1.0));
        assert_eq!(assignment.get(&"t1".into()), Some(1.0));
    }

    #[test]
    fn time_ranked_all_passed_is_zero() {
        let (result, suite) = result_from(&[true, true, true], 0);
        let assignment = time_ranked_reward(&result, &suite);
        assert!(assignment.rewards.values().all(|&r| r == 0.0));
    }

    #[test]
    fn all_rewards_non_negative_and_cover_suite() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.random_range(0..=6);
            let verdicts: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let undetected = rng.random_range(0..=3);
            let (result, suite) = result_from(&verdicts, undetected);
            for kind in RewardKind::ALL {
                let assignment = kind.apply(&result, &suite);
                assert_eq!(assignment.rewards.len(), suite.len());
                assert!(assignment.rewards.values().all(|r| r.is_finite() && *r >= 0.0));
            }
        }
    }

    #[test]
    fn time_ranked_matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(0..=6);
            let verdicts: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
            let (result, suite) = result_from(&verdicts, rng.random_range(0..=2));
            assert_eq!(
                time_ranked_reward(&result, &suite).rewards,
                naive_time_ranked(&result, &suite)
            );
        }
    }

    #[test]
    fn time_ranked_of_failed_tests_equals_failure_count_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let n = rng.random_range(1..=6);
            let verdicts: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let (result, suite) = result_from(&verdicts, 0);
            let by_count = failure_count_reward(&result, &suite);
            let by_rank = time_ranked_reward(&result, &suite);
            for (id, verdict) in result.executed() {
                if !verdict.passed {
                    assert_eq!(by_rank.get(id), by_count.get(id));
                }
            }
        }
    }

    #[test]
    fn time_ranked_invariant_under_permuting_trailing_passes() {
        // [fail, pass_a, pass_b] and [fail, pass_b, pass_a] reward everyone
        // identically: no failure's "after" count changes.
        let (result, suite) = result_from(&[false, true, true], 0);
        let a = time_ranked_reward(&result, &suite);

        let mut swapped = result.clone();
        swapped.schedule.ordered_test_ids.swap(1, 2);
        let b = time_ranked_reward(&swapped, &suite);
        assert_eq!(a.rewards, b.rewards);
    }

    #[test]
    fn reward_kind_tokens_round_trip() {
        for kind in RewardKind::ALL {
            assert_eq!(kind.token().parse::<RewardKind>().unwrap(), kind);
        }
        assert!("napfd".parse::<RewardKind>().is_err());
    }
}
