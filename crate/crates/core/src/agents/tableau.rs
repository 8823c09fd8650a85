//! Tableau memory representation: per discrete state, visit counts and the
//! running mean reward of every action.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{discretize, Agent, AgentSnapshot, DurationBuckets, StateKey, SNAPSHOT_VERSION};
use crate::domain::{featurize, CycleId, TestCaseRecord, TestId};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TableauCell<S> {
    counts: Vec<u64>,
    mean_rewards: Vec<S>,
}

impl<S: Scalar> TableauCell<S> {
    fn zeros(action_count: usize) -> Self {
        TableauCell {
            counts: vec![0; action_count],
            mean_rewards: vec![S::zero(); action_count],
        }
    }
}

/// Count and mean-reward tables over (discrete state, action) pairs, plus
/// the epsilon-greedy exploration rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TableauMemory<S = f64> {
    action_count: usize,
    exploration_rate: S,
    cells: BTreeMap<StateKey, TableauCell<S>>,
}

impl<S: Scalar> TableauMemory<S> {
    pub fn new(action_count: usize, exploration_rate: S) -> Result<Self> {
        if action_count < 2 {
            return Err(Error::Config("action_count must be >= 2".into()));
        }
        if !exploration_rate.is_finite()
            || exploration_rate < S::zero()
            || exploration_rate > S::one()
        {
            return Err(Error::Config("exploration rate must be in [0, 1]".into()));
        }
        Ok(TableauMemory {
            action_count,
            exploration_rate,
            cells: BTreeMap::new(),
        })
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn exploration_rate(&self) -> S {
        self.exploration_rate
    }

    pub fn set_exploration_rate(&mut self, rate: S) {
        self.exploration_rate = rate.max(S::zero()).min(S::one());
    }

    pub fn state_count(&self) -> usize {
        self.cells.len()
    }

    /// `(counts, mean rewards)` for a state; unseen states read as all-zero.
    pub fn cell(&self, key: &StateKey) -> (Vec<u64>, Vec<S>) {
        match self.cells.get(key) {
            Some(cell) => (cell.counts.clone(), cell.mean_rewards.clone()),
            None => (
                vec![0; self.action_count],
                vec![S::zero(); self.action_count],
            ),
        }
    }

    /// Epsilon-greedy action selection: with probability `1 - epsilon` the
    /// action with the highest mean reward (ties broken uniformly at
    /// random; unseen states are all-zero, so all actions tie), otherwise a
    /// uniformly random action. The priority is the action index mapped
    /// onto `[0, 1]`.
    pub fn act(&self, key: &StateKey, rng: &mut dyn RngCore) -> (usize, S) {
        let explore = rng.random_bool(scalar::to_f64(self.exploration_rate));
        let action = if explore {
            rng.random_range(0..self.action_count)
        } else {
            let best: Vec<usize> = match self.cells.get(key) {
                Some(cell) => {
                    let max = cell
                        .mean_rewards
                        .iter()
                        .copied()
                        .fold(S::neg_infinity(), S::max);
                    (0..self.action_count)
                        .filter(|&i| cell.mean_rewards[i] == max)
                        .collect()
                }
                None => (0..self.action_count).collect(),
            };
            if best.len() == 1 {
                best[0]
            } else {
                best[rng.random_range(0..best.len())]
            }
        };
        let priority =
            scalar::cast::<S>(action as f64) / scalar::cast((self.action_count - 1) as f64);
        (action, priority)
    }

    /// Incorporate one cycle's experiences: per (state, action) cell the
    /// counter is incremented and the mean updated incrementally.
    pub fn learn(&mut self, experiences: &[(StateKey, usize, S)]) {
        for (key, action, reward) in experiences {
            debug_assert!(*action < self.action_count);
            let cell = self
                .cells
                .entry(*key)
                .or_insert_with(|| TableauCell::zeros(self.action_count));
            cell.counts[*action] += 1;
            let count = scalar::cast::<S>(cell.counts[*action] as f64);
            let mean = cell.mean_rewards[*action];
            cell.mean_rewards[*action] = mean + (*reward - mean) / count;
        }
    }
}

/// Tableau-based prioritization agent: featurizes with raw (unscaled)
/// features, discretizes, then selects epsilon-greedily.
pub struct TableauAgent<S = f64> {
    memory: TableauMemory<S>,
    buckets: DurationBuckets<S>,
    history_length: usize,
    exploration_decay: S,
    pending: Vec<(TestId, StateKey, usize)>,
}

impl<S: Scalar> TableauAgent<S> {
    pub fn new(
        memory: TableauMemory<S>,
        buckets: DurationBuckets<S>,
        history_length: usize,
        exploration_decay: S,
    ) -> Self {
        TableauAgent {
            memory,
            buckets,
            history_length,
            exploration_decay,
            pending: Vec::new(),
        }
    }

    pub fn memory(&self) -> &TableauMemory<S> {
        &self.memory
    }

    pub fn snapshot(&self) -> AgentSnapshot<S> {
        AgentSnapshot::Tableau(TableauSnapshot {
            version: SNAPSHOT_VERSION,
            action_count: self.memory.action_count,
            exploration_rate: self.memory.exploration_rate,
            exploration_decay: self.exploration_decay,
            history_length: self.history_length,
            buckets: self.buckets,
            cells: self
                .memory
                .cells
                .iter()
                .map(|(key, cell)| CellEntry {
                    key: *key,
                    counts: cell.counts.clone(),
                    mean_rewards: cell.mean_rewards.clone(),
                })
                .collect(),
        })
    }

    pub fn from_snapshot(snapshot: &TableauSnapshot<S>) -> Result<Self> {
        let mut memory = TableauMemory::new(snapshot.action_count, snapshot.exploration_rate)?;
        for entry in &snapshot.cells {
            if entry.counts.len() != snapshot.action_count
                || entry.mean_rewards.len() != snapshot.action_count
            {
                return Err(Error::Validation(
                    "snapshot cell arity does not match action count".into(),
                ));
            }
            memory.cells.insert(
                entry.key,
                TableauCell {
                    counts: entry.counts.clone(),
                    mean_rewards: entry.mean_rewards.clone(),
                },
            );
        }
        Ok(TableauAgent::new(
            memory,
            snapshot.buckets,
            snapshot.history_length,
            snapshot.exploration_decay,
        ))
    }
}

impl<S: Scalar> Agent<S> for TableauAgent<S> {
    fn act(
        &mut self,
        record: &TestCaseRecord<S>,
        current_cycle: CycleId,
        rng: &mut dyn RngCore,
    ) -> S {
        let state = featurize(record, current_cycle, self.history_length);
        let key = discretize(&state, &self.buckets);
        let (action, priority) = self.memory.act(&key, rng);
        self.pending.push((record.id.clone(), key, action));
        priority
    }

    fn learn(&mut self, rewards: &BTreeMap<TestId, S>, _rng: &mut dyn RngCore) {
        let experiences: Vec<(StateKey, usize, S)> = self
            .pending
            .drain(..)
            .filter_map(|(id, key, action)| rewards.get(&id).map(|&r| (key, action, r)))
            .collect();
        self.memory.learn(&experiences);
        let decayed = self.memory.exploration_rate * self.exploration_decay;
        self.memory.set_exploration_rate(decayed);
    }
}

/// Serializable snapshot of a tableau agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TableauSnapshot<S: Scalar> {
    pub version: u32,
    pub action_count: usize,
    pub exploration_rate: S,
    pub exploration_decay: S,
    pub history_length: usize,
    pub buckets: DurationBuckets<S>,
    pub cells: Vec<CellEntry<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry<S> {
    pub key: StateKey,
    pub counts: Vec<u64>,
    pub mean_rewards: Vec<S>,
}
