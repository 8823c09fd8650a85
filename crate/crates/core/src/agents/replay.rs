//! Bounded experience replay memory for the network agent.

use std::collections::VecDeque;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// One prioritization decision and its outcome: the state the agent saw,
/// the action (priority) it actually emitted, and the reward received.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experience<S = f64> {
    pub state: Vec<S>,
    pub action: S,
    pub reward: S,
}

/// FIFO-bounded store of past experiences, sampled in batches for training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayBuffer<S = f64> {
    capacity: usize,
    batch_size: usize,
    experiences: VecDeque<Experience<S>>,
}

impl<S: Scalar> ReplayBuffer<S> {
    pub fn new(capacity: usize, batch_size: usize) -> Self {
        assert!(capacity >= 1 && batch_size >= 1);
        ReplayBuffer {
            capacity,
            batch_size,
            experiences: VecDeque::with_capacity(capacity.min(4096)),
        }
    }

    /// Append an experience, evicting the oldest one when full.
    pub fn store(&mut self, experience: Experience<S>) {
        if self.experiences.len() == self.capacity {
            self.experiences.pop_front();
        }
        self.experiences.push_back(experience);
    }

    /// Uniform sample without replacement of `min(batch_size, len)`
    /// experiences. Empty buffer yields an empty batch.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<Experience<S>> {
        let amount = self.batch_size.min(self.experiences.len());
        if amount == 0 {
            return Vec::new();
        }
        rand::seq::index::sample(rng, self.experiences.len(), amount)
            .into_iter()
            .map(|i| self.experiences[i].clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.experiences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experiences.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn iter(&self) -> impl Iterator<Item = &Experience<S>> {
        self.experiences.iter()
    }
}
