//! Core value types shared by every module, plus the featurization of a
//! test case into the state vector consumed by the agents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Index of a CI cycle within a dataset.
pub type CycleId = u32;

/// Opaque test case identifier, unique within a dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestId(String);

impl TestId {
    pub fn new(id: impl Into<String>) -> Self {
        TestId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<&str> for TestId {
    fn from(id: &str) -> Self {
        TestId::new(id)
    }
}

/// One test case's metadata as known *before* execution in the current
/// cycle: the planning view the agents act on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCaseRecord<S = f64> {
    pub id: TestId,
    /// Over-approximation of previous durations, used for planning.
    pub estimated_duration: S,
    /// Cycle of the most recent execution; `None` if never executed.
    pub last_executed_cycle: Option<CycleId>,
    /// Most recent verdict first, `true` = passed. Length is capped at the
    /// configured history length.
    pub verdict_history: Vec<bool>,
}

impl<S: Scalar> TestCaseRecord<S> {
    /// Fresh record for a test that has never been executed.
    pub fn new(id: TestId, declared_duration: Option<S>) -> Self {
        TestCaseRecord {
            id,
            estimated_duration: declared_duration.unwrap_or_else(S::zero),
            last_executed_cycle: None,
            verdict_history: Vec::new(),
        }
    }
}

/// Ground-truth record of one CI cycle: what every test in the suite did
/// when it actually ran. Replays use it as the execution oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleLog<S = f64> {
    pub cycle_id: CycleId,
    entries: BTreeMap<TestId, LoggedExecution<S>>,
}

/// Observed outcome of one test execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedExecution<S = f64> {
    pub actual_duration: S,
    pub passed: bool,
}

impl<S: Scalar> CycleLog<S> {
    pub fn new(cycle_id: CycleId, entries: BTreeMap<TestId, LoggedExecution<S>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation(format!(
                "cycle {cycle_id} has no entries"
            )));
        }
        for (id, exec) in &entries {
            if exec.actual_duration <= S::zero() || !exec.actual_duration.is_finite() {
                return Err(Error::Validation(format!(
                    "cycle {cycle_id}, test `{id}`: actual_duration must be > 0"
                )));
            }
        }
        Ok(CycleLog { cycle_id, entries })
    }

    pub fn entries(&self) -> &BTreeMap<TestId, LoggedExecution<S>> {
        &self.entries
    }

    pub fn get(&self, id: &TestId) -> Option<&LoggedExecution<S>> {
        self.entries.get(id)
    }

    /// Test ids appearing in this cycle, in sorted order.
    pub fn test_ids(&self) -> impl Iterator<Item = &TestId> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn failure_count(&self) -> usize {
        self.entries.values().filter(|e| !e.passed).count()
    }
}

/// Agent-assigned priorities for one cycle's suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrioritizedSuite<S = f64> {
    pub cycle_id: CycleId,
    items: Vec<(TestId, S)>,
}

impl<S: Scalar> PrioritizedSuite<S> {
    /// Validates that ids are unique and priorities finite.
    pub fn new(cycle_id: CycleId, items: Vec<(TestId, S)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (id, priority) in &items {
            if !priority.is_finite() {
                return Err(Error::Validation(format!(
                    "priority of `{id}` is not finite"
                )));
            }
            if !seen.insert(id) {
                return Err(Error::Validation(format!("duplicate test id `{id}`")));
            }
        }
        Ok(PrioritizedSuite { cycle_id, items })
    }

    pub fn items(&self) -> &[(TestId, S)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Ordered, time-budgeted selection of tests for one cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule<S = f64> {
    pub cycle_id: CycleId,
    /// Execution order; position 1 runs first.
    pub ordered_test_ids: Vec<TestId>,
    /// Time limit the schedule was built against, in seconds.
    pub budget: S,
}

impl<S: Scalar> Schedule<S> {
    pub fn len(&self) -> usize {
        self.ordered_test_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered_test_ids.is_empty()
    }

    pub fn contains(&self, id: &TestId) -> bool {
        self.ordered_test_ids.iter().any(|t| t == id)
    }
}

/// 1-based position of `test_id` in the schedule's execution order.
pub fn rank<S: Scalar>(schedule: &Schedule<S>, test_id: &TestId) -> Result<usize> {
    schedule
        .ordered_test_ids
        .iter()
        .position(|id| id == test_id)
        .map(|p| p + 1)
        .ok_or_else(|| Error::TestNotInSchedule(test_id.clone()))
}

/// Verdict of one scheduled test after (virtual) execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecutedTest<S = f64> {
    pub passed: bool,
    pub actual_duration: S,
}

/// A schedule together with its execution outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult<S = f64> {
    pub schedule: Schedule<S>,
    /// One verdict per scheduled test, in schedule order.
    pub verdicts: Vec<ExecutedTest<S>>,
    /// Tests of the full suite that failed in the cycle log but were not
    /// scheduled.
    pub undetected_failures: usize,
}

impl<S: Scalar> ScheduleResult<S> {
    pub fn scheduled_count(&self) -> usize {
        self.schedule.len()
    }

    pub fn detected_failures(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.passed).count()
    }

    pub fn total_failures(&self) -> usize {
        self.detected_failures() + self.undetected_failures
    }

    /// `(test id, verdict)` pairs in execution order.
    pub fn executed(&self) -> impl Iterator<Item = (&TestId, &ExecutedTest<S>)> {
        self.schedule.ordered_test_ids.iter().zip(&self.verdicts)
    }

    /// Actual seconds the schedule took; may exceed the planning budget
    /// since selection uses estimated durations. Diagnostic only.
    pub fn actual_total_duration(&self) -> S {
        self.verdicts
            .iter()
            .fold(S::zero(), |acc, v| acc + v.actual_duration)
    }
}

/// State vector for one test case:
/// `[estimated_duration, time_since_last_run, h_1 .. h_history_length]`
/// where `h_k` is 1 if the k-th most recent execution failed and 0 if it
/// passed or is unknown. Never-executed tests get
/// `time_since_last_run = current_cycle + 1`, older than everything.
pub fn featurize<S: Scalar>(
    test: &TestCaseRecord<S>,
    current_cycle: CycleId,
    history_length: usize,
) -> Vec<S> {
    debug_assert!(history_length >= 1);
    let mut features = Vec::with_capacity(2 + history_length);
    features.push(test.estimated_duration);
    let staleness = match test.last_executed_cycle {
        Some(last) => {
            debug_assert!(last < current_cycle);
            current_cycle.saturating_sub(last)
        }
        None => current_cycle.saturating_add(1),
    };
    features.push(scalar::cast(f64::from(staleness)));
    for k in 0..history_length {
        let failed = test.verdict_history.get(k).is_some_and(|&passed| !passed);
        features.push(if failed { S::one() } else { S::zero() });
    }
    features
}

/// Scaling context shared by the network agent and the weighting baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaling<S = f64> {
    /// Maximum actual duration observed anywhere in the dataset.
    pub max_duration: S,
}

/// [`featurize`] with the duration scaled into `[0, 1]` by the dataset's
/// maximum observed duration and the staleness scaled by the maximum
/// possible staleness `current_cycle + 1`. History bits stay 0/1.
pub fn scaled_features<S: Scalar>(
    test: &TestCaseRecord<S>,
    current_cycle: CycleId,
    history_length: usize,
    scaling: &FeatureScaling<S>,
) -> Vec<S> {
    let mut features = featurize(test, current_cycle, history_length);
    if scaling.max_duration > S::zero() {
        features[0] /= scaling.max_duration;
    }
    let horizon = scalar::cast::<S>(f64::from(current_cycle) + 1.0);
    features[1] /= horizon;
    features
}

/// Record after one more execution: verdict prepended to the history
/// (capped at `history_length`), staleness reset, and the duration estimate
/// raised to the observed duration if that was larger.
pub fn update_record<S: Scalar>(
    test: &TestCaseRecord<S>,
    passed: bool,
    actual_duration: S,
    cycle: CycleId,
    history_length: usize,
) -> TestCaseRecord<S> {
    debug_assert!(actual_duration > S::zero());
    let mut history = Vec::with_capacity(history_length.min(test.verdict_history.len() + 1));
    history.push(passed);
    history.extend(test.verdict_history.iter().copied());
    history.truncate(history_length);
    TestCaseRecord {
        id: test.id.clone(),
        estimated_duration: test.estimated_duration.max(actual_duration),
        last_executed_cycle: Some(cycle),
        verdict_history: history,
    }
}
