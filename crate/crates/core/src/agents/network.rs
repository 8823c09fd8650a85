//! Network memory representation: a single-hidden-layer feedforward net
//! mapping the (scaled) feature vector to one continuous priority, trained
//! by stochastic gradient descent on replayed experiences.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::replay::{Experience, ReplayBuffer};
use super::{Agent, AgentSnapshot, SNAPSHOT_VERSION};
use crate::domain::{scaled_features, CycleId, FeatureScaling, TestCaseRecord, TestId};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Weights of the approximator: `hidden_size` tanh units feeding one linear
/// output. The regression target of an experience is its reward, so the
/// output approximates the expected reward of prioritizing a test in the
/// observed state; the Gaussian exploration noise rides on top of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMemory<S = f64> {
    input_size: usize,
    hidden_size: usize,
    /// `hidden_size x input_size`, row-major.
    w1: Vec<S>,
    b1: Vec<S>,
    w2: Vec<S>,
    b2: S,
    /// Standard deviation of the Gaussian action noise.
    exploration_rate: S,
    learning_rate: S,
}

impl<S: Scalar> NetworkMemory<S> {
    /// Seeded init with weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn init(
        input_size: usize,
        hidden_size: usize,
        learning_rate: S,
        exploration_rate: S,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        if input_size < 1 || hidden_size < 1 {
            return Err(Error::Config("network layers must be non-empty".into()));
        }
        if !learning_rate.is_finite() || learning_rate <= S::zero() {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        if !exploration_rate.is_finite() || exploration_rate < S::zero() {
            return Err(Error::Config("exploration rate must be >= 0".into()));
        }
        let input_bound = S::one() / scalar::cast::<S>(input_size as f64).sqrt();
        let hidden_bound = S::one() / scalar::cast::<S>(hidden_size as f64).sqrt();
        let mut draw = |bound: S| rng.random_range(-bound..bound);
        let w1 = (0..hidden_size * input_size)
            .map(|_| draw(input_bound))
            .collect();
        let b1 = (0..hidden_size).map(|_| draw(input_bound)).collect();
        let w2 = (0..hidden_size).map(|_| draw(hidden_bound)).collect();
        let b2 = draw(hidden_bound);
        Ok(NetworkMemory {
            input_size,
            hidden_size,
            w1,
            b1,
            w2,
            b2,
            exploration_rate,
            learning_rate,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_weights(
        input_size: usize,
        hidden_size: usize,
        w1: Vec<S>,
        b1: Vec<S>,
        w2: Vec<S>,
        b2: S,
        learning_rate: S,
        exploration_rate: S,
    ) -> Result<Self> {
        if w1.len() != hidden_size * input_size
            || b1.len() != hidden_size
            || w2.len() != hidden_size
        {
            return Err(Error::Config("weight shapes do not match layer sizes".into()));
        }
        Ok(NetworkMemory {
            input_size,
            hidden_size,
            w1,
            b1,
            w2,
            b2,
            exploration_rate,
            learning_rate,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn exploration_rate(&self) -> S {
        self.exploration_rate
    }

    pub fn set_exploration_rate(&mut self, rate: S) {
        self.exploration_rate = rate.max(S::zero());
    }

    pub fn learning_rate(&self) -> S {
        self.learning_rate
    }

    /// Number of trainable parameters.
    pub fn param_count(&self) -> usize {
        self.hidden_size * self.input_size + 2 * self.hidden_size + 1
    }

    /// Flattened parameters in `[w1, b1, w2, b2]` order.
    pub fn params(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.param_count());
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }

    pub fn set_params(&mut self, params: &[S]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                got: params.len(),
            });
        }
        let (w1, rest) = params.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, b2) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = b2[0];
        Ok(())
    }

    fn hidden_activations(&self, state: &[S]) -> Vec<S> {
        (0..self.hidden_size)
            .map(|j| {
                let row = &self.w1[j * self.input_size..(j + 1) * self.input_size];
                let mut a = self.b1[j];
                for (w, x) in row.iter().zip(state) {
                    a += *w * *x;
                }
                a.tanh()
            })
            .collect()
    }

    /// Deterministic forward pass: tanh hidden layer, linear output.
    pub fn forward(&self, state: &[S]) -> Result<S> {
        if state.len() != self.input_size {
            return Err(Error::DimensionMismatch {
                expected: self.input_size,
                got: state.len(),
            });
        }
        let hidden = self.hidden_activations(state);
        let mut y = self.b2;
        for (w, h) in self.w2.iter().zip(&hidden) {
            y += *w * *h;
        }
        Ok(y)
    }

    /// Forward pass plus Gaussian exploration noise `N(0, sigma^2)` with
    /// `sigma = exploration_rate`.
    pub fn act(&self, state: &[S], rng: &mut dyn RngCore) -> Result<S> {
        let noise = S::standard_normal(rng) * self.exploration_rate;
        Ok(self.forward(state)? + noise)
    }

    /// Mean squared-error loss `mean(0.5 * (forward(state) - reward)^2)`
    /// over the batch.
    pub fn batch_loss(&self, batch: &[Experience<S>]) -> S {
        debug_assert!(!batch.is_empty());
        let half = S::one() / scalar::cast(2.0);
        let sum = batch.iter().fold(S::zero(), |acc, e| {
            let err = self.forward(&e.state).expect("state length fixed by agent") - e.reward;
            acc + half * err * err
        });
        sum / scalar::cast(batch.len() as f64)
    }

    /// Analytic gradient of [`Self::batch_loss`], flattened in
    /// `[w1, b1, w2, b2]` order.
    pub fn batch_gradient(&self, batch: &[Experience<S>]) -> Vec<S> {
        debug_assert!(!batch.is_empty());
        let mut grad = vec![S::zero(); self.param_count()];
        for e in batch {
            self.accumulate_sample_gradient(e, &mut grad);
        }
        let scale = S::one() / scalar::cast(batch.len() as f64);
        for g in &mut grad {
            *g *= scale;
        }
        grad
    }

    /// Backpropagation of one sample's loss `0.5 * (forward - reward)^2`
    /// into the flat gradient buffer.
    fn accumulate_sample_gradient(&self, e: &Experience<S>, grad: &mut [S]) {
        debug_assert_eq!(e.state.len(), self.input_size);
        let hidden = self.hidden_activations(&e.state);
        let mut y = self.b2;
        for (w, h) in self.w2.iter().zip(&hidden) {
            y += *w * *h;
        }
        let dy = y - e.reward;

        let (gw1, rest) = grad.split_at_mut(self.w1.len());
        let (gb1, rest) = rest.split_at_mut(self.b1.len());
        let (gw2, gb2) = rest.split_at_mut(self.w2.len());

        gb2[0] += dy;
        for j in 0..self.hidden_size {
            gw2[j] += dy * hidden[j];
            let da = dy * self.w2[j] * (S::one() - hidden[j] * hidden[j]);
            gb1[j] += da;
            for i in 0..self.input_size {
                gw1[j * self.input_size + i] += da * e.state[i];
            }
        }
    }

    /// One stochastic-gradient-descent pass over the batch: per experience,
    /// one descent step on that sample's squared error.
    pub fn train(&mut self, batch: &[Experience<S>]) {
        assert!(!batch.is_empty(), "training batch must be non-empty");
        let mut grad = vec![S::zero(); self.param_count()];
        for e in batch {
            for g in &mut grad {
                *g = S::zero();
            }
            self.accumulate_sample_gradient(e, &mut grad);
            self.apply_step(&grad);
        }
        debug_assert!(self.params().iter().all(|w| w.is_finite()));
    }

    fn apply_step(&mut self, grad: &[S]) {
        let lr = self.learning_rate;
        let weights = self
            .w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(std::iter::once(&mut self.b2));
        for (w, g) in weights.zip(grad) {
            *w -= lr * *g;
        }
    }
}

/// Network-based prioritization agent with experience replay.
pub struct NetworkAgent<S = f64> {
    memory: NetworkMemory<S>,
    replay: ReplayBuffer<S>,
    scaling: FeatureScaling<S>,
    history_length: usize,
    exploration_decay: S,
    pending: Vec<(TestId, Vec<S>, S)>,
}

impl<S: Scalar> NetworkAgent<S> {
    pub fn new(
        memory: NetworkMemory<S>,
        replay: ReplayBuffer<S>,
        scaling: FeatureScaling<S>,
        history_length: usize,
        exploration_decay: S,
    ) -> Result<Self> {
        if memory.input_size() != 2 + history_length {
            return Err(Error::DimensionMismatch {
                expected: 2 + history_length,
                got: memory.input_size(),
            });
        }
        Ok(NetworkAgent {
            memory,
            replay,
            scaling,
            history_length,
            exploration_decay,
            pending: Vec::new(),
        })
    }

    pub fn memory(&self) -> &NetworkMemory<S> {
        &self.memory
    }

    pub fn replay(&self) -> &ReplayBuffer<S> {
        &self.replay
    }

    pub fn snapshot(&self) -> AgentSnapshot<S> {
        AgentSnapshot::Network(NetworkSnapshot {
            version: SNAPSHOT_VERSION,
            memory: self.memory.clone(),
            replay: self.replay.clone(),
            scaling: self.scaling,
            history_length: self.history_length,
            exploration_decay: self.exploration_decay,
        })
    }

    pub fn from_snapshot(snapshot: &NetworkSnapshot<S>) -> Result<Self> {
        NetworkAgent::new(
            snapshot.memory.clone(),
            snapshot.replay.clone(),
            snapshot.scaling,
            snapshot.history_length,
            snapshot.exploration_decay,
        )
    }
}

impl<S: Scalar> Agent<S> for NetworkAgent<S> {
    fn act(
        &mut self,
        record: &TestCaseRecord<S>,
        current_cycle: CycleId,
        rng: &mut dyn RngCore,
    ) -> S {
        let state = scaled_features(record, current_cycle, self.history_length, &self.scaling);
        let priority = self
            .memory
            .act(&state, rng)
            .expect("agent builds states matching its input layer");
        self.pending.push((record.id.clone(), state, priority));
        priority
    }

    fn learn(&mut self, rewards: &BTreeMap<TestId, S>, rng: &mut dyn RngCore) {
        for (id, state, action) in self.pending.drain(..) {
            if let Some(&reward) = rewards.get(&id) {
                self.replay.store(Experience {
                    state,
                    action,
                    reward,
                });
            }
        }
        let batch = self.replay.sample(rng);
        if !batch.is_empty() {
            self.memory.train(&batch);
        }
        let decayed = self.memory.exploration_rate() * self.exploration_decay;
        self.memory.set_exploration_rate(decayed);
    }
}

/// Serializable snapshot of a network agent, replay buffer included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct NetworkSnapshot<S: Scalar> {
    pub version: u32,
    pub memory: NetworkMemory<S>,
    pub replay: ReplayBuffer<S>,
    pub scaling: FeatureScaling<S>,
    pub history_length: usize,
    pub exploration_decay: S,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tiny_net() -> NetworkMemory<f64> {
        NetworkMemory::with_weights(
            2,
            2,
            vec![0.1, -0.2, 0.3, 0.4],
            vec![0.05, -0.05],
            vec![0.7, -0.6],
            0.1,
            0.05,
            0.0,
        )
        .unwrap()
    }

    fn random_net(seed: u64, input: usize, hidden: usize) -> NetworkMemory<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        NetworkMemory::init(input, hidden, 0.05, 0.0, &mut rng).unwrap()
    }

    fn random_batch(seed: u64, input: usize, len: usize) -> Vec<Experience<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len)
            .map(|_| Experience {
                state: (0..input).map(|_| rng.random_range(-1.0..1.0)).collect(),
                action: rng.random_range(0.0..1.0),
                reward: rng.random_range(0.0..3.0),
            })
            .collect()
    }

    #[test]
    fn all_zero_weights_output_the_bias() {
        let mut net = tiny_net();
        net.set_params(&vec![0.0; net.param_count()]).unwrap();
        assert_eq!(net.forward(&[0.3, -0.7]).unwrap(), 0.0);

        let mut params = vec![0.0; net.param_count()];
        *params.last_mut().unwrap() = 0.25;
        net.set_params(&params).unwrap();
        assert_eq!(net.forward(&[0.3, -0.7]).unwrap(), 0.25);
    }

    #[test]
    fn forward_matches_hand_computation() {
        let net = tiny_net();
        let x = [0.5, -1.0];
        // hidden: tanh(0.1*0.5 - 0.2*(-1.0) + 0.05) = tanh(0.3)
        //         tanh(0.3*0.5 + 0.4*(-1.0) - 0.05) = tanh(-0.3)
        // output: 0.1 + 0.7*tanh(0.3) - 0.6*(-tanh(0.3)) = 0.1 + 1.3*tanh(0.3)
        let expected = 0.1 + 1.3 * (0.3f64).tanh();
        assert!((net.forward(&x).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn forward_is_pure_and_checks_dimensions() {
        let net = random_net(1, 6, 12);
        let state = vec![0.4; 6];
        assert_eq!(net.forward(&state).unwrap(), net.forward(&state).unwrap());
        assert!(matches!(
            net.forward(&[0.0; 4]),
            Err(Error::DimensionMismatch { expected: 6, got: 4 })
        ));
    }

    #[test]
    fn zero_noise_act_equals_forward() {
        let net = random_net(2, 4, 8);
        let state = vec![0.1, 0.9, 0.0, 1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(net.act(&state, &mut rng).unwrap(), net.forward(&state).unwrap());
    }

    #[test]
    fn gaussian_noise_is_centered_on_the_forward_value() {
        let mut net = random_net(3, 3, 5);
        net.set_exploration_rate(0.5);
        let state = vec![0.2, 0.4, 0.6];
        let center = net.forward(&state).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|_| net.act(&state, &mut rng).unwrap())
            .sum::<f64>()
            / f64::from(draws);
        // 3 sigma / sqrt(n)
        let tolerance = 3.0 * 0.5 / f64::from(draws).sqrt();
        assert!(
            (mean - center).abs() < tolerance,
            "sample mean {mean} vs forward {center}"
        );
    }

    #[test]
    fn different_seeds_give_different_noise() {
        let mut net = random_net(5, 2, 2);
        net.set_exploration_rate(1.0);
        let state = vec![0.5, 0.5];
        let mut rng_a = ChaCha8Rng::seed_from_u64(1);
        let mut rng_b = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<f64> = (0..5).map(|_| net.act(&state, &mut rng_a).unwrap()).collect();
        let b: Vec<f64> = (0..5).map(|_| net.act(&state, &mut rng_b).unwrap()).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn repeated_training_on_one_sample_converges() {
        let mut net = random_net(6, 6, 12);
        let sample = vec![Experience {
            state: vec![0.3, 1.0, 1.0, 0.0, 1.0, 0.0],
            action: 0.5,
            reward: 1.0,
        }];
        let mut last_loss = net.batch_loss(&sample);
        for _ in 0..500 {
            net.train(&sample);
            let loss = net.batch_loss(&sample);
            assert!(loss <= last_loss + 1e-12, "loss increased: {last_loss} -> {loss}");
            last_loss = loss;
        }
        let prediction = net.forward(&sample[0].state).unwrap();
        assert!((prediction - 1.0).abs() < 0.01, "prediction {prediction}");
    }

    /// Central finite differences of `batch_loss` at the current weights.
    fn finite_difference_gradient(
        net: &NetworkMemory<f64>,
        batch: &[Experience<f64>],
        step: f64,
    ) -> Vec<f64> {
        let params = net.params();
        (0..params.len())
            .map(|i| {
                let mut plus = net.clone();
                let mut p = params.clone();
                p[i] += step;
                plus.set_params(&p).unwrap();

                let mut minus = net.clone();
                let mut m = params.clone();
                m[i] -= step;
                minus.set_params(&m).unwrap();

                (plus.batch_loss(batch) - minus.batch_loss(batch)) / (2.0 * step)
            })
            .collect()
    }

    pub(crate) fn max_relative_deviation(analytic: &[f64], numeric: &[f64]) -> f64 {
        analytic
            .iter()
            .zip(numeric)
            .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
            .fold(0.0, f64::max)
    }

    #[test]
    fn backprop_matches_central_finite_differences() {
        for seed in 0..20 {
            let net = random_net(100 + seed, 6, 12);
            let batch = random_batch(200 + seed, 6, 8);
            let analytic = net.batch_gradient(&batch);
            let numeric = finite_difference_gradient(&net, &batch, 1e-5);
            let deviation = max_relative_deviation(&analytic, &numeric);
            assert!(deviation <= 1e-4, "seed {seed}: max relative deviation {deviation}");
        }
    }

    #[test]
    fn weights_stay_finite_under_large_rewards() {
        let mut net = random_net(7, 6, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let batch: Vec<Experience<f64>> = (0..50)
                .map(|_| Experience {
                    state: (0..6).map(|_| rng.random_range(0.0..1.0)).collect(),
                    action: 0.0,
                    reward: rng.random_range(0.0..200.0),
                })
                .collect();
            net.train(&batch);
            assert!(net.params().iter().all(|w| w.is_finite()));
        }
    }

    #[test]
    #[should_panic(expected = "non-empty")]
    fn empty_batch_is_rejected() {
        let mut net = random_net(9, 2, 2);
        net.train(&[]);
    }

    #[test]
    fn agent_stores_noisy_action_and_trains_from_replay() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let memory = NetworkMemory::init(6, 12, 0.05, 0.3, &mut rng).unwrap();
        let mut agent = NetworkAgent::new(
            memory,
            ReplayBuffer::new(100, 10),
            FeatureScaling { max_duration: 10.0 },
            4,
            1.0,
        )
        .unwrap();

        let record = TestCaseRecord::<f64>::new(TestId::new("a"), Some(5.0));
        let emitted = agent.act(&record, 2, &mut rng);
        let mut rewards = BTreeMap::new();
        rewards.insert(TestId::new("a"), 1.0);
        agent.learn(&rewards, &mut rng);
        assert_eq!(agent.replay().len(), 1);
        let stored = agent.replay().iter().next().unwrap();
        assert_eq!(stored.action, emitted);
        assert_eq!(stored.reward, 1.0);
        assert!(agent.pending.is_empty());
    }

    #[test]
    fn snapshot_round_trips_through_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let memory = NetworkMemory::init(6, 12, 0.05, 0.2, &mut rng).unwrap();
        let mut agent = NetworkAgent::new(
            memory,
            ReplayBuffer::new(50, 5),
            FeatureScaling { max_duration: 3.0 },
            4,
            0.99,
        )
        .unwrap();
        let record = TestCaseRecord::<f64>::new(TestId::new("x"), Some(1.0));
        agent.act(&record, 0, &mut rng);
        let mut rewards = BTreeMap::new();
        rewards.insert(TestId::new("x"), 2.0);
        agent.learn(&rewards, &mut rng);

        let json = agent.snapshot().to_json().unwrap();
        let restored = match AgentSnapshot::<f64>::from_json(&json).unwrap() {
            AgentSnapshot::Network(s) => NetworkAgent::from_snapshot(&s).unwrap(),
            _ => panic!("expected network snapshot"),
        };
        assert_eq!(restored.memory(), agent.memory());
        assert_eq!(restored.replay(), agent.replay());
        assert_eq!(restored.snapshot().to_json().unwrap(), json);
    }
}
