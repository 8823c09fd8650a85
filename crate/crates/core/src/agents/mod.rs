//! The two reinforcement-learning agents and their shared machinery.
//!
//! Both agents prioritize one test case at a time: the state is the test's
//! feature vector, the action is the priority emitted for the current
//! cycle. After the schedule has been executed and rewarded, the cycle's
//! experiences are fed back through [`Agent::learn`].

mod network;
mod replay;
mod tableau;

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::domain::{CycleId, TestCaseRecord, TestId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use network::{NetworkAgent, NetworkMemory, NetworkSnapshot};
pub use replay::{Experience, ReplayBuffer};
pub use tableau::{TableauAgent, TableauMemory, TableauSnapshot};

/// A prioritization policy. Baselines implement this with a no-op `learn`.
///
/// Instances are single-threaded: `act` records the decision per test id so
/// `learn` can pair it with the reward computed after execution. One `learn`
/// call ends the cycle and clears the recorded decisions.
pub trait Agent<S: Scalar>: Send {
    /// Priority for one test case in the current cycle.
    fn act(&mut self, record: &TestCaseRecord<S>, current_cycle: CycleId, rng: &mut dyn RngCore)
        -> S;

    /// Feed back this cycle's rewards. Decisions for ids absent from the
    /// map carry no usable feedback and are dropped.
    fn learn(&mut self, rewards: &BTreeMap<TestId, S>, rng: &mut dyn RngCore);
}

/// Discrete state key for the tableau representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateKey {
    pub duration_bucket: u8,
    pub staleness_bucket: u8,
    /// Bit k set = the (k+1)-th most recent execution failed.
    pub history_bits: u64,
}

/// Three logarithmically spaced duration buckets over the dataset's
/// observed duration range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationBuckets<S = f64> {
    cuts: [S; 2],
}

impl<S: Scalar> DurationBuckets<S> {
    pub fn from_range(min: S, max: S) -> Self {
        if !min.is_finite() || !max.is_finite() || min <= S::zero() || max <= min {
            // degenerate range: everything lands in bucket 0
            return DurationBuckets {
                cuts: [S::infinity(), S::infinity()],
            };
        }
        let ratio = max / min;
        let third = S::one() / crate::scalar::cast(3.0);
        DurationBuckets {
            cuts: [min * ratio.powf(third), min * ratio.powf(third + third)],
        }
    }

    fn bucket(&self, duration: S) -> u8 {
        if duration < self.cuts[0] {
            0
        } else if duration < self.cuts[1] {
            1
        } else {
            2
        }
    }
}

/// Map a raw feature vector (from [`crate::domain::featurize`]) onto a
/// discrete key: duration into its log bucket, staleness into
/// {1, 2, 3-5, >5}, history bits kept verbatim.
pub fn discretize<S: Scalar>(state: &[S], buckets: &DurationBuckets<S>) -> StateKey {
    debug_assert!(state.len() >= 2);
    debug_assert!(state.len() - 2 <= 64);
    let two = crate::scalar::cast::<S>(2.0);
    let five = crate::scalar::cast::<S>(5.0);
    let staleness = state[1];
    let staleness_bucket = if staleness <= S::one() {
        0
    } else if staleness <= two {
        1
    } else if staleness <= five {
        2
    } else {
        3
    };
    let mut history_bits = 0u64;
    let half = S::one() / two;
    for (k, &bit) in state[2..].iter().enumerate() {
        if bit >= half {
            history_bits |= 1 << k;
        }
    }
    StateKey {
        duration_bucket: buckets.bucket(state[0]),
        staleness_bucket,
        history_bits,
    }
}

/// Versioned, JSON-serializable snapshot of an agent's memory, for
/// pausing and resuming long replays. Taken between cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "agent", rename_all = "snake_case", bound = "S: Scalar")]
pub enum AgentSnapshot<S: Scalar> {
    Tableau(TableauSnapshot<S>),
    Network(NetworkSnapshot<S>),
}

pub const SNAPSHOT_VERSION: u32 = 1;

impl<S: Scalar> AgentSnapshot<S> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let snapshot: AgentSnapshot<S> = serde_json::from_str(json)?;
        let version = match &snapshot {
            AgentSnapshot::Tableau(s) => s.version,
            AgentSnapshot::Network(s) => s.version,
        };
        if version != SNAPSHOT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported snapshot version {version}, expected {SNAPSHOT_VERSION}"
            )));
        }
        Ok(snapshot)
    }
}
