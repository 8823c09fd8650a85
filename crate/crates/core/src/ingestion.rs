//! Dataset loading, validation and synthetic CI history generation.
//!
//! Canonical CSV schema (header required, UTF-8, `.` decimal point):
//!
//! ```text
//! cycle,test_id,duration,verdict
//! ```
//!
//! `verdict` is `1` = passed / `0` = failed by default; [`VerdictConvention`]
//! flips that for datasets encoded the other way. Rows may appear in any
//! cycle order; they are grouped and sorted ascending on load.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{CycleId, CycleLog, LoggedExecution, TestId};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A full CI history: one validated [`CycleLog`] per cycle, plus optional
/// per-test declared durations used to seed duration estimates before the
/// first observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<S = f64> {
    pub name: String,
    cycles: Vec<CycleLog<S>>,
    pub catalog: BTreeMap<TestId, S>,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(name: impl Into<String>, cycles: Vec<CycleLog<S>>) -> Result<Self> {
        let dataset = Dataset {
            name: name.into(),
            cycles,
            catalog: BTreeMap::new(),
        };
        dataset.validate()?;
        Ok(dataset)
    }

    fn validate(&self) -> Result<()> {
        if self.cycles.is_empty() {
            return Err(Error::Validation("dataset has no cycles".into()));
        }
        for pair in self.cycles.windows(2) {
            if pair[0].cycle_id >= pair[1].cycle_id {
                return Err(Error::Validation(format!(
                    "cycle ids not strictly increasing: {} then {}",
                    pair[0].cycle_id, pair[1].cycle_id
                )));
            }
        }
        Ok(())
    }

    pub fn cycles(&self) -> &[CycleLog<S>] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Total number of logged executions.
    pub fn verdict_count(&self) -> usize {
        self.cycles.iter().map(CycleLog::len).sum()
    }

    /// Range of actual durations observed anywhere in the dataset.
    pub fn duration_stats(&self) -> DurationStats<S> {
        let mut min = S::infinity();
        let mut max = S::zero();
        for cycle in &self.cycles {
            for execution in cycle.entries().values() {
                min = min.min(execution.actual_duration);
                max = max.max(execution.actual_duration);
            }
        }
        DurationStats { min, max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationStats<S = f64> {
    pub min: S,
    pub max: S,
}

/// Meaning of verdict value `1` in a CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VerdictConvention {
    /// `1` = passed (canonical).
    #[default]
    OneIsPassed,
    /// `1` = failed.
    OneIsFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CsvOptions {
    pub verdict: VerdictConvention,
}

const CSV_HEADER: [&str; 4] = ["cycle", "test_id", "duration", "verdict"];

/// Load and validate a dataset; the dataset name is the file stem.
pub fn load_csv<S: Scalar>(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset<S>> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let file = File::open(path)?;
    read_csv(file, name, options)
}

/// [`load_csv`] over any reader.
pub fn read_csv<S: Scalar, R: Read>(
    reader: R,
    name: impl Into<String>,
    options: &CsvOptions,
) -> Result<Dataset<S>> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    if headers.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut grouped: BTreeMap<CycleId, BTreeMap<TestId, LoggedExecution<S>>> = BTreeMap::new();
    for row in csv_reader.records() {
        let record = row?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).map(str::trim).unwrap_or("");

        let cycle: CycleId = field(0).parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid cycle `{}`", field(0)),
        })?;
        let test_id = field(1);
        if test_id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty test_id".into(),
            });
        }
        let duration: S = field(2).parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid duration `{}`", field(2)),
        })?;
        if duration <= S::zero() || !duration.is_finite() {
            return Err(Error::Validation(format!(
                "line {line}: duration must be > 0, got `{}`",
                field(2)
            )));
        }
        let one = match field(3) {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("invalid verdict `{other}` (expected 0 or 1)"),
                })
            }
        };
        let passed = match options.verdict {
            VerdictConvention::OneIsPassed => one,
            VerdictConvention::OneIsFailed => !one,
        };

        let duplicate = grouped
            .entry(cycle)
            .or_default()
            .insert(
                TestId::new(test_id),
                LoggedExecution {
                    actual_duration: duration,
                    passed,
                },
            )
            .is_some();
        if duplicate {
            return Err(Error::Validation(format!(
                "line {line}: duplicate execution of `{test_id}` in cycle {cycle}"
            )));
        }
    }

    let cycles = grouped
        .into_iter()
        .map(|(cycle_id, entries)| CycleLog::new(cycle_id, entries))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(name, cycles)
}

/// Write the canonical CSV (verdict `1` = passed), rows sorted by cycle
/// then test id. Validates the dataset first.
pub fn write_csv<S: Scalar>(dataset: &Dataset<S>, path: impl AsRef<Path>) -> Result<()> {
    dataset.validate()?;
    let file = File::create(path)?;
    write_csv_to(dataset, file)
}

pub fn write_csv_to<S: Scalar, W: Write>(dataset: &Dataset<S>, writer: W) -> Result<()> {
    dataset.validate()?;
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(CSV_HEADER)?;
    for cycle in dataset.cycles() {
        let cycle_field = cycle.cycle_id.to_string();
        for (id, execution) in cycle.entries() {
            let duration_field = execution.actual_duration.to_string();
            out.write_record([
                cycle_field.as_str(),
                id.as_str(),
                duration_field.as_str(),
                if execution.passed { "1" } else { "0" },
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parameters of the synthetic CI history generator.
///
/// Failures follow a two-state Markov chain per test: a test that failed in
/// cycle `i` fails again in cycle `i+1` with probability
/// `temporal_correlation`; the pass-to-fail rate is chosen so the stationary
/// failure frequency equals `failure_rate`. Churn removes a test and
/// replaces it with a brand-new id, modelling evolving test suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_tests: usize,
    pub n_cycles: usize,
    /// Stationary probability that any given execution fails, in `[0, 1]`.
    pub failure_rate: f64,
    /// P(fail at cycle i+1 | failed at cycle i), in `[0, 1]`.
    pub temporal_correlation: f64,
    /// Per-test per-cycle probability of being replaced by a new test.
    pub churn_rate: f64,
    /// Seconds; durations are drawn uniformly per test.
    pub duration_range: (f64, f64),
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_tests: 50,
            n_cycles: 100,
            failure_rate: 0.1,
            temporal_correlation: 0.0,
            churn_rate: 0.0,
            duration_range: (1.0, 10.0),
            seed: 1,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_tests < 1 || self.n_cycles < 1 {
            return Err(Error::Config("n_tests and n_cycles must be >= 1".into()));
        }
        for (label, p) in [
            ("failure_rate", self.failure_rate),
            ("temporal_correlation", self.temporal_correlation),
            ("churn_rate", self.churn_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{label} must be in [0, 1], got {p}")));
            }
        }
        let (min, max) = self.duration_range;
        if !(min > 0.0 && min <= max && max.is_finite()) {
            return Err(Error::Config(format!(
                "duration_range must satisfy 0 < min <= max, got ({min}, {max})"
            )));
        }
        Ok(())
    }

    /// Pass-to-fail transition probability with stationary rate
    /// `failure_rate`, clamped into `[0, 1]`.
    fn fail_after_pass(&self) -> f64 {
        let f = self.failure_rate;
        let c = self.temporal_correlation;
        if f >= 1.0 {
            return 1.0;
        }
        (f * (1.0 - c) / (1.0 - f)).clamp(0.0, 1.0)
    }
}

struct ActiveTest<S> {
    id: TestId,
    duration: S,
    failed_prev: Option<bool>,
}

/// Deterministic: the same [`SyntheticSpec`] yields a byte-identical
/// dataset.
pub fn generate_synthetic<S: Scalar>(spec: &SyntheticSpec) -> Result<Dataset<S>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (min, max) = spec.duration_range;
    let mut next_id = 0usize;

    let mut fresh = |rng: &mut ChaCha8Rng| {
        let id = TestId::new(format!("t{next_id:06}"));
        next_id += 1;
        let duration = if min == max {
            min
        } else {
            rng.random_range(min..max)
        };
        ActiveTest {
            id,
            duration: scalar::cast::<S>(duration),
            failed_prev: None,
        }
    };

    let mut active: Vec<ActiveTest<S>> = (0..spec.n_tests).map(|_| fresh(&mut rng)).collect();
    let fail_after_pass = spec.fail_after_pass();

    let mut cycles = Vec::with_capacity(spec.n_cycles);
    for cycle_id in 0..spec.n_cycles {
        if cycle_id > 0 && spec.churn_rate > 0.0 {
            for test in active.iter_mut() {
                if rng.random_bool(spec.churn_rate) {
                    *test = fresh(&mut rng);
                }
            }
        }
        let mut entries = BTreeMap::new();
        for test in active.iter_mut() {
            let p_fail = if spec.failure_rate >= 1.0 {
                1.0
            } else {
                match test.failed_prev {
                    None => spec.failure_rate,
                    Some(true) => spec.temporal_correlation,
                    Some(false) => fail_after_pass,
                }
            };
            let failed = p_fail > 0.0 && rng.random_bool(p_fail);
            test.failed_prev = Some(failed);
            entries.insert(
                test.id.clone(),
                LoggedExecution {
                    actual_duration: test.duration,
                    passed: !failed,
                },
            );
        }
        cycles.push(CycleLog::new(cycle_id as CycleId, entries)?);
    }

    Dataset::new(format!("synthetic-{}", spec.seed), cycles)
}
