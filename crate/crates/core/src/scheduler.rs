//! Time-budgeted schedule construction and virtual execution against a
//! cycle log.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::domain::{CycleLog, ExecutedTest, PrioritizedSuite, Schedule, ScheduleResult, TestId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cycle time limit: `ratio` of the estimated duration of the full suite.
pub fn compute_budget<S: Scalar>(estimated_durations: &[S], ratio: S) -> S {
    debug_assert!(!estimated_durations.is_empty());
    debug_assert!(ratio > S::zero() && ratio <= S::one());
    let total = estimated_durations
        .iter()
        .fold(S::zero(), |acc, &d| acc + d);
    ratio * total
}

/// Greedy selection by descending priority, ties broken uniformly at
/// random. A test is included iff its estimated duration fits the
/// remaining budget; non-fitting tests are skipped and the scan continues,
/// so a long test never blocks shorter lower-priority ones. Output order is
/// inclusion order.
pub fn build_schedule<S: Scalar>(
    prioritized: &PrioritizedSuite<S>,
    estimated_durations: &BTreeMap<TestId, S>,
    budget: S,
    rng: &mut dyn RngCore,
) -> Result<Schedule<S>> {
    debug_assert!(budget >= S::zero());
    let items = prioritized.items();
    let mut order: Vec<usize> = (0..items.len()).collect();
    // random permutation before a stable sort = uniform random tie order
    order.shuffle(rng);
    order.sort_by(|&a, &b| items[b].1.partial_cmp(&items[a].1).unwrap_or(Ordering::Equal));

    let mut remaining = budget;
    let mut ordered_test_ids = Vec::new();
    for idx in order {
        let (id, _) = &items[idx];
        let duration = *estimated_durations
            .get(id)
            .ok_or_else(|| Error::UnknownTest(id.clone()))?;
        if duration <= remaining {
            remaining -= duration;
            ordered_test_ids.push(id.clone());
        }
    }
    Ok(Schedule {
        cycle_id: prioritized.cycle_id,
        ordered_test_ids,
        budget,
    })
}

/// Replay the schedule against the logged outcomes: verdicts are copied
/// from the log in schedule order, and failures of unscheduled tests are
/// counted as undetected.
pub fn virtual_execute<S: Scalar>(
    schedule: &Schedule<S>,
    cycle_log: &CycleLog<S>,
) -> Result<ScheduleResult<S>> {
    let mut verdicts = Vec::with_capacity(schedule.len());
    for id in &schedule.ordered_test_ids {
        let logged = cycle_log
            .get(id)
            .ok_or_else(|| Error::UnknownTest(id.clone()))?;
        verdicts.push(ExecutedTest {
            passed: logged.passed,
            actual_duration: logged.actual_duration,
        });
    }
    let scheduled: BTreeSet<&TestId> = schedule.ordered_test_ids.iter().collect();
    let undetected_failures = cycle_log
        .entries()
        .iter()
        .filter(|(id, e)| !e.passed && !scheduled.contains(id))
        .count();
    Ok(ScheduleResult {
        schedule: schedule.clone(),
        verdicts,
        undetected_failures,
    })
}
