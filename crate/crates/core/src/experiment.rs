//! The CI replay loop: per cycle prioritize, schedule, virtually execute,
//! evaluate, reward and learn; plus repetition management and parameter
//! sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{
    Agent, DurationBuckets, NetworkAgent, NetworkMemory, ReplayBuffer, TableauAgent, TableauMemory,
};
use crate::baselines::{RandomBaseline, SortingBaseline, WeightingBaseline};
use crate::domain::{update_record, FeatureScaling, PrioritizedSuite, TestCaseRecord, TestId};
use crate::error::{Error, Result};
use crate::evaluation::{aggregate, CycleEvaluation, RunSummary};
use crate::ingestion::Dataset;
use crate::rewards::{FeedbackScope, RewardKind};
use crate::scalar::{self, Scalar};
use crate::scheduler::{build_schedule, compute_budget, virtual_execute};

/// Prioritization method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Sorting,
    Weighting,
    Tableau,
    Network,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Random,
        Method::Sorting,
        Method::Weighting,
        Method::Tableau,
        Method::Network,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Sorting => "sorting",
            Method::Weighting => "weighting",
            Method::Tableau => "tableau",
            Method::Network => "network",
        }
    }

    /// True for the learning agents.
    pub fn is_adaptive(self) -> bool {
        matches!(self, Method::Tableau | Method::Network)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Method::Random),
            "sorting" => Ok(Method::Sorting),
            "weighting" => Ok(Method::Weighting),
            "tableau" => Ok(Method::Tableau),
            "network" => Ok(Method::Network),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected random|sorting|weighting|tableau|network)"
            ))),
        }
    }
}

/// Agent hyperparameters, defaulted to the standard parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    /// Tableau epsilon-greedy exploration rate.
    pub epsilon: f64,
    /// Network Gaussian action-noise standard deviation.
    pub sigma: f64,
    /// Multiplicative per-cycle decay of the exploration rate; 1.0 keeps it
    /// constant.
    pub exploration_decay: f64,
    pub learning_rate: f64,
    /// Number of discrete tableau actions.
    pub action_count: usize,
    pub hidden_size: usize,
    pub replay_capacity: usize,
    pub replay_batch: usize,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            epsilon: 0.2,
            sigma: 0.1,
            exploration_decay: 1.0,
            learning_rate: 0.05,
            action_count: 25,
            hidden_size: 12,
            replay_capacity: 10_000,
            replay_batch: 1_000,
        }
    }
}

/// Full experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub reward: RewardKind,
    pub history_length: usize,
    /// Cycle time limit as a fraction of the full suite's estimated
    /// duration.
    pub schedule_ratio: f64,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Worker threads for repetitions: 1 = sequential, 0 = all cores.
    pub jobs: usize,
    pub agent: AgentParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            method: Method::Network,
            reward: RewardKind::TcFail,
            history_length: 4,
            schedule_ratio: 0.5,
            repetitions: 30,
            base_seed: 0,
            jobs: 1,
            agent: AgentParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if !(self.schedule_ratio > 0.0 && self.schedule_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "schedule_ratio must be in (0, 1], got {}",
                self.schedule_ratio
            )));
        }
        if self.history_length < 1 || self.history_length > 64 {
            return Err(Error::Config("history_length must be in 1..=64".into()));
        }
        if !(0.0..=1.0).contains(&self.agent.epsilon) {
            return Err(Error::Config("epsilon must be in [0, 1]".into()));
        }
        if self.agent.sigma < 0.0 {
            return Err(Error::Config("sigma must be >= 0".into()));
        }
        if !(self.agent.exploration_decay > 0.0 && self.agent.exploration_decay <= 1.0) {
            return Err(Error::Config("exploration_decay must be in (0, 1]".into()));
        }
        if self.agent.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        if self.agent.action_count < 2 {
            return Err(Error::Config("action_count must be >= 2".into()));
        }
        if self.agent.hidden_size < 1 {
            return Err(Error::Config("hidden_size must be >= 1".into()));
        }
        if self.agent.replay_capacity < 1 || self.agent.replay_batch < 1 {
            return Err(Error::Config("replay sizes must be >= 1".into()));
        }
        Ok(())
    }

    /// Apply one `key = value` setting (config-file key space).
    pub fn apply_key_value(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                Error::Config(format!("invalid value `{value}` for key `{key}`"))
            })
        }
        match key {
            "method" => self.method = value.parse()?,
            "reward" => self.reward = value.parse()?,
            "history_length" => self.history_length = parse(key, value)?,
            "schedule_ratio" => self.schedule_ratio = parse(key, value)?,
            "repetitions" => self.repetitions = parse(key, value)?,
            "base_seed" => self.base_seed = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "epsilon" => self.agent.epsilon = parse(key, value)?,
            "sigma" => self.agent.sigma = parse(key, value)?,
            "exploration_decay" => self.agent.exploration_decay = parse(key, value)?,
            "learning_rate" => self.agent.learning_rate = parse(key, value)?,
            "action_count" => self.agent.action_count = parse(key, value)?,
            "hidden_size" => self.agent.hidden_size = parse(key, value)?,
            "replay_capacity" => self.agent.replay_capacity = parse(key, value)?,
            "replay_batch" => self.agent.replay_batch = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Load settings from a flat `key = value` file; `#` starts a comment.
    pub fn apply_config_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: index as u64 + 1,
                message: format!("expected `key = value`, found `{raw}`"),
            })?;
            self.apply_key_value(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

/// Build the configured agent for one repetition. The rng seeds network
/// weight initialization.
pub fn build_agent<S: Scalar>(
    config: &ExperimentConfig,
    dataset: &Dataset<S>,
    rng: &mut ChaCha8Rng,
) -> Result<Box<dyn Agent<S>>> {
    let stats = dataset.duration_stats();
    let scaling = FeatureScaling {
        max_duration: stats.max,
    };
    let agent: Box<dyn Agent<S>> = match config.method {
        Method::Random => Box::new(RandomBaseline),
        Method::Sorting => Box::new(SortingBaseline),
        Method::Weighting => Box::new(WeightingBaseline {
            history_length: config.history_length,
            scaling,
        }),
        Method::Tableau => {
            let memory = TableauMemory::new(
                config.agent.action_count,
                scalar::cast(config.agent.epsilon),
            )?;
            Box::new(TableauAgent::new(
                memory,
                DurationBuckets::from_range(stats.min, stats.max),
                config.history_length,
                scalar::cast(config.agent.exploration_decay),
            ))
        }
        Method::Network => {
            let memory = NetworkMemory::init(
                2 + config.history_length,
                config.agent.hidden_size,
                scalar::cast(config.agent.learning_rate),
                scalar::cast(config.agent.sigma),
                rng,
            )?;
            Box::new(NetworkAgent::new(
                memory,
                ReplayBuffer::new(config.agent.replay_capacity, config.agent.replay_batch),
                scaling,
                config.history_length,
                scalar::cast(config.agent.exploration_decay),
            )?)
        }
    };
    Ok(agent)
}

/// One repetition of a replay, steppable cycle by cycle.
///
/// Cycles are strictly sequential: the agent at cycle `i` has only seen
/// rewards from cycles before `i`. Everything is a deterministic function
/// of `(dataset, config, repetition)`.
pub struct ReplaySession<'d, S: Scalar> {
    dataset: &'d Dataset<S>,
    config: ExperimentConfig,
    rng: ChaCha8Rng,
    agent: Box<dyn Agent<S>>,
    records: BTreeMap<TestId, TestCaseRecord<S>>,
    next_cycle: usize,
    evaluations: Vec<CycleEvaluation<S>>,
}

impl<'d, S: Scalar> ReplaySession<'d, S> {
    pub fn new(
        dataset: &'d Dataset<S>,
        config: &ExperimentConfig,
        repetition: usize,
    ) -> Result<Self> {
        config.validate()?;
        let mut rng =
            ChaCha8Rng::seed_from_u64(config.base_seed.wrapping_add(repetition as u64));
        let agent = build_agent(config, dataset, &mut rng)?;
        Ok(ReplaySession {
            dataset,
            config: config.clone(),
            rng,
            agent,
            records: BTreeMap::new(),
            next_cycle: 0,
            evaluations: Vec::with_capacity(dataset.cycle_count()),
        })
    }

    /// Replay the next cycle; `None` when the dataset is exhausted.
    pub fn step(&mut self) -> Result<Option<&CycleEvaluation<S>>> {
        let Some(cycle_log) = self.dataset.cycles().get(self.next_cycle) else {
            return Ok(None);
        };
        self.next_cycle += 1;
        let cycle_id = cycle_log.cycle_id;

        // The suite is exactly the tests in this cycle's log; new ids enter
        // with a fresh record, tests absent this cycle are left untouched.
        let suite_ids: Vec<TestId> = cycle_log.test_ids().cloned().collect();
        let mut items = Vec::with_capacity(suite_ids.len());
        let mut durations = BTreeMap::new();
        for id in &suite_ids {
            let record = self.records.entry(id.clone()).or_insert_with(|| {
                TestCaseRecord::new(id.clone(), self.dataset.catalog.get(id).copied())
            });
            let priority = self.agent.act(record, cycle_id, &mut self.rng);
            items.push((id.clone(), priority));
            durations.insert(id.clone(), record.estimated_duration);
        }

        let estimated: Vec<S> = suite_ids.iter().map(|id| durations[id]).collect();
        let budget = compute_budget(&estimated, scalar::cast(self.config.schedule_ratio));
        let prioritized = PrioritizedSuite::new(cycle_id, items)?;
        let schedule = build_schedule(&prioritized, &durations, budget, &mut self.rng)?;
        let result = virtual_execute(&schedule, cycle_log)?;

        let assignment = self.config.reward.apply(&result, &suite_ids);
        let feedback: BTreeMap<TestId, S> = match self.config.reward.feedback_scope() {
            FeedbackScope::WholeSuite => assignment.rewards,
            FeedbackScope::ScheduledOnly => {
                let scheduled: std::collections::BTreeSet<&TestId> =
                    schedule.ordered_test_ids.iter().collect();
                let mut scheduled_only = assignment.rewards;
                scheduled_only.retain(|id, _| scheduled.contains(id));
                scheduled_only
            }
        };
        self.agent.learn(&feedback, &mut self.rng);

        for (id, verdict) in result.executed() {
            let record = &self.records[id];
            let updated = update_record(
                record,
                verdict.passed,
                verdict.actual_duration,
                cycle_id,
                self.config.history_length,
            );
            self.records.insert(id.clone(), updated);
        }

        self.evaluations
            .push(CycleEvaluation::from_result(&result, suite_ids.len()));
        Ok(Some(self.evaluations.last().expect("just pushed")))
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step()?.is_some() {}
        Ok(())
    }

    pub fn evaluations(&self) -> &[CycleEvaluation<S>] {
        &self.evaluations
    }

    pub fn into_evaluations(self) -> Vec<CycleEvaluation<S>> {
        self.evaluations
    }

    /// Per-test records as of the last replayed cycle.
    pub fn records(&self) -> &BTreeMap<TestId, TestCaseRecord<S>> {
        &self.records
    }

    pub fn agent_mut(&mut self) -> &mut dyn Agent<S> {
        &mut *self.agent
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Replay the whole dataset once; deterministic in
/// `(base_seed, repetition)`.
pub fn run_replay<S: Scalar>(
    dataset: &Dataset<S>,
    config: &ExperimentConfig,
    repetition: usize,
) -> Result<Vec<CycleEvaluation<S>>> {
    let mut session = ReplaySession::new(dataset, config, repetition)?;
    session.run_to_end()?;
    Ok(session.into_evaluations())
}

/// Per-repetition series plus their aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult<S = f64> {
    pub per_rep: Vec<Vec<CycleEvaluation<S>>>,
    pub summary: RunSummary<S>,
}

/// Run all repetitions (seeded `base_seed + index`) and aggregate.
pub fn run_experiment<S: Scalar>(
    dataset: &Dataset<S>,
    config: &ExperimentConfig,
) -> Result<ExperimentResult<S>> {
    config.validate()?;
    let reps: Vec<usize> = (0..config.repetitions).collect();
    let per_rep: Result<Vec<Vec<CycleEvaluation<S>>>> = if config.jobs == 1 {
        reps.iter()
            .map(|&rep| run_replay(dataset, config, rep))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| {
            reps.par_iter()
                .map(|&rep| run_replay(dataset, config, rep))
                .collect()
        })
    };
    let per_rep = per_rep?;
    let summary = aggregate(&per_rep)?;
    Ok(ExperimentResult { per_rep, summary })
}

/// One experiment per history length, everything else fixed; rows of
/// `(length, overall mean NAPFD)`.
pub fn sweep_history_length<S: Scalar>(
    dataset: &Dataset<S>,
    config: &ExperimentConfig,
    lengths: &[usize],
) -> Result<Vec<(usize, S)>> {
    lengths
        .iter()
        .map(|&length| {
            let mut swept = config.clone();
            swept.history_length = length;
            run_experiment(dataset, &swept).map(|r| (length, r.summary.overall_mean))
        })
        .collect()
}

/// One experiment per schedule ratio; rows of `(ratio, overall mean NAPFD)`.
pub fn sweep_schedule_ratio<S: Scalar>(
    dataset: &Dataset<S>,
    config: &ExperimentConfig,
    ratios: &[f64],
) -> Result<Vec<(f64, S)>> {
    ratios
        .iter()
        .map(|&ratio| {
            let mut swept = config.clone();
            swept.schedule_ratio = ratio;
            run_experiment(dataset, &swept).map(|r| (ratio, r.summary.overall_mean))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::linear_trend;
    use crate::ingestion::{generate_synthetic, SyntheticSpec};

    fn small_dataset() -> Dataset<f64> {
        generate_synthetic(&SyntheticSpec {
            n_tests: 20,
            n_cycles: 30,
            failure_rate: 0.2,
            temporal_correlation: 0.6,
            churn_rate: 0.05,
            seed: 5,
            ..SyntheticSpec::default()
        })
        .unwrap()
    }

    fn base_config(method: Method) -> ExperimentConfig {
        ExperimentConfig {
            method,
            repetitions: 3,
            base_seed: 11,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn replay_is_deterministic_per_seed() {
        let dataset = small_dataset();
        for method in Method::ALL {
            let config = base_config(method);
            let a = run_replay(&dataset, &config, 0).unwrap();
            let b = run_replay(&dataset, &config, 0).unwrap();
            assert_eq!(a, b, "method {method}");
            let c = run_replay(&dataset, &config, 1).unwrap();
            assert_ne!(a, c, "repetitions must differ for {method}");
        }
    }

    #[test]
    fn experiment_is_reproducible_and_parallel_matches_sequential() {
        let dataset = small_dataset();
        let mut config = base_config(Method::Tableau);
        let sequential = run_experiment(&dataset, &config).unwrap();
        config.jobs = 0;
        let parallel = run_experiment(&dataset, &config).unwrap();
        assert_eq!(sequential.per_rep, parallel.per_rep);
        assert_eq!(sequential.summary, parallel.summary);
    }

    #[test]
    fn single_repetition_summary_equals_its_series() {
        let dataset = small_dataset();
        let mut config = base_config(Method::Sorting);
        config.repetitions = 1;
        let result = run_experiment(&dataset, &config).unwrap();
        let series: Vec<f64> = result.per_rep[0].iter().map(|e| e.napfd).collect();
        assert_eq!(result.summary.per_cycle_mean, series);
    }

    #[test]
    fn one_cycle_dataset_yields_one_evaluation() {
        let dataset = generate_synthetic::<f64>(&SyntheticSpec {
            n_tests: 5,
            n_cycles: 1,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let series = run_replay(&dataset, &base_config(Method::Random), 0).unwrap();
        assert_eq!(series.len(), 1);
    }

    #[test]
    fn suite_size_follows_the_cycle_log() {
        let dataset = small_dataset();
        let series = run_replay(&dataset, &base_config(Method::Random), 0).unwrap();
        for (evaluation, cycle) in series.iter().zip(dataset.cycles()) {
            assert_eq!(evaluation.suite_size, cycle.len());
            assert_eq!(evaluation.cycle_id, cycle.cycle_id);
            assert!(evaluation.scheduled_count <= evaluation.suite_size);
        }
    }

    #[test]
    fn random_method_has_no_learning_trend() {
        let dataset = generate_synthetic::<f64>(&SyntheticSpec {
            n_tests: 30,
            n_cycles: 60,
            failure_rate: 0.15,
            temporal_correlation: 0.7,
            seed: 21,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let config = ExperimentConfig {
            method: Method::Random,
            repetitions: 20,
            base_seed: 3,
            ..ExperimentConfig::default()
        };
        let result = run_experiment(&dataset, &config).unwrap();
        let fit = linear_trend(&result.summary.per_cycle_mean);
        let (lo, hi) = fit.slope_confidence_95();
        assert!(
            lo <= 0.0 && 0.0 <= hi,
            "random slope CI [{lo}, {hi}] should contain 0"
        );
    }

    /// An always-failing test must end up prioritized above always-passing
    /// ones by the learning agent.
    #[test]
    fn network_learns_to_promote_a_persistent_failure() {
        use crate::domain::{CycleLog, LoggedExecution};

        let mut cycles = Vec::new();
        for cycle_id in 0..40 {
            let mut entries = BTreeMap::new();
            for t in 0..10 {
                entries.insert(
                    TestId::new(format!("t{t}")),
                    LoggedExecution {
                        actual_duration: 1.0,
                        passed: t != 0, // t0 always fails
                    },
                );
            }
            cycles.push(CycleLog::new(cycle_id, entries).unwrap());
        }
        let dataset = Dataset::new("persistent-failure", cycles).unwrap();

        let config = ExperimentConfig {
            method: Method::Network,
            reward: RewardKind::TcFail,
            repetitions: 1,
            base_seed: 2,
            agent: AgentParams {
                sigma: 0.0, // read actions noise-free
                ..AgentParams::default()
            },
            ..ExperimentConfig::default()
        };
        let mut session = ReplaySession::new(&dataset, &config, 0).unwrap();
        session.run_to_end().unwrap();

        let records = session.records().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let failing = session
            .agent_mut()
            .act(&records[&TestId::new("t0")], 40, &mut rng);
        for t in 1..10 {
            let id = TestId::new(format!("t{t}"));
            let passing = session.agent_mut().act(&records[&id], 40, &mut rng);
            assert!(
                failing > passing,
                "failing test priority {failing} vs passing {passing} (t{t})"
            );
        }
    }

    #[test]
    fn lower_budget_never_helps_random_selection() {
        let dataset = generate_synthetic::<f64>(&SyntheticSpec {
            n_tests: 50,
            n_cycles: 50,
            failure_rate: 0.2,
            temporal_correlation: 0.3,
            seed: 31,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let config = ExperimentConfig {
            method: Method::Random,
            repetitions: 10,
            base_seed: 17,
            ..ExperimentConfig::default()
        };
        let rows = sweep_schedule_ratio(&dataset, &config, &[0.2, 0.6]).unwrap();
        assert!(rows[0].1 <= rows[1].1 + 0.02, "{rows:?}");
    }

    #[test]
    fn sweep_history_length_has_one_row_per_length() {
        let dataset = small_dataset();
        let mut config = base_config(Method::Tableau);
        config.repetitions = 2;
        let rows = sweep_history_length(&dataset, &config, &[1, 2, 3, 4]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(
            rows.iter().map(|(l, _)| *l).collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );

        let single = sweep_history_length(&dataset, &config, &[4]).unwrap();
        let full = run_experiment(&dataset, &config).unwrap();
        assert_eq!(single[0].1, full.summary.overall_mean);
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("experiment.conf");
        std::fs::write(
            &path,
            "# experiment setup\n\
             method = tableau\n\
             reward = timerank\n\
             history_length = 6\n\
             schedule_ratio = 0.3\n\
             repetitions = 5\n\
             base_seed = 99\n\
             epsilon = 0.25 # inline comment\n\
             \n\
             replay_batch = 64\n",
        )
        .unwrap();
        let mut config = ExperimentConfig::default();
        config.apply_config_file(&path).unwrap();
        assert_eq!(config.method, Method::Tableau);
        assert_eq!(config.reward, RewardKind::TimeRank);
        assert_eq!(config.history_length, 6);
        assert_eq!(config.schedule_ratio, 0.3);
        assert_eq!(config.repetitions, 5);
        assert_eq!(config.base_seed, 99);
        assert_eq!(config.agent.epsilon, 0.25);
        assert_eq!(config.agent.replay_batch, 64);

        std::fs::write(&path, "method tableau\n").unwrap();
        assert!(matches!(
            config.apply_config_file(&path),
            Err(Error::Parse { line: 1, .. })
        ));

        std::fs::write(&path, "budget = 3\n").unwrap();
        assert!(matches!(
            config.apply_config_file(&path),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let bad_ratio = ExperimentConfig {
            schedule_ratio: 0.0,
            ..ExperimentConfig::default()
        };
        assert!(bad_ratio.validate().is_err());
        let no_reps = ExperimentConfig {
            repetitions: 0,
            ..ExperimentConfig::default()
        };
        assert!(no_reps.validate().is_err());
        let no_history = ExperimentConfig {
            history_length: 0,
            ..ExperimentConfig::default()
        };
        assert!(no_history.validate().is_err());
    }
}
