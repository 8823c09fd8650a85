//! NAPFD metric and the aggregate statistics reported by experiments.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::domain::{CycleId, ScheduleResult};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Normalized Average Percentage of Faults Detected for one executed
/// schedule.
///
/// `NAPFD = p - sum(rank(t) for failed t) / (detected * n) + p / (2n)` with
/// `p = detected / detectable` failures, ranks taken over the executed
/// schedule of length `n`. Extends APFD to selection settings where some
/// failures stay undetected.
///
/// Degenerate cases: a cycle with nothing to detect scores 1.0; a schedule
/// that detects none of the existing failures scores 0.0 (the rank term is
/// empty). When most failures stay undetected and the few detected ones
/// rank late, the raw formula can dip below zero; the score is clamped at 0
/// so it stays a `[0, 1]` quality measure.
pub fn napfd<S: Scalar>(result: &ScheduleResult<S>) -> S {
    let detected = result.detected_failures();
    let total = result.total_failures();
    if total == 0 {
        return S::one();
    }
    if detected == 0 {
        return S::zero();
    }
    let n = scalar::cast::<S>(result.scheduled_count() as f64);
    let p = scalar::cast::<S>(detected as f64) / scalar::cast(total as f64);
    let rank_sum: f64 = result
        .verdicts
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.passed)
        .map(|(i, _)| (i + 1) as f64)
        .sum();
    let two = scalar::cast::<S>(2.0);
    let raw =
        p - scalar::cast::<S>(rank_sum) / (scalar::cast::<S>(detected as f64) * n) + p / (two * n);
    raw.max(S::zero())
}

/// Classic APFD; defined only when every detectable failure was detected.
/// Coincides with [`napfd`] in that case.
pub fn apfd<S: Scalar>(result: &ScheduleResult<S>) -> Result<S> {
    if result.undetected_failures != 0 || result.detected_failures() == 0 {
        return Err(Error::ApfdUndefined);
    }
    Ok(napfd(result))
}

/// Per-cycle evaluation record, one per (repetition, cycle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEvaluation<S = f64> {
    pub cycle_id: CycleId,
    pub napfd: S,
    pub detected_failures: usize,
    pub total_failures: usize,
    pub scheduled_count: usize,
    pub suite_size: usize,
}

impl<S: Scalar> CycleEvaluation<S> {
    pub fn from_result(result: &ScheduleResult<S>, suite_size: usize) -> Self {
        CycleEvaluation {
            cycle_id: result.schedule.cycle_id,
            napfd: napfd(result),
            detected_failures: result.detected_failures(),
            total_failures: result.total_failures(),
            scheduled_count: result.scheduled_count(),
            suite_size,
        }
    }
}

/// Mean NAPFD per cycle over all repetitions of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary<S = f64> {
    pub cycles: Vec<CycleId>,
    pub per_cycle_mean: Vec<S>,
    pub overall_mean: S,
}

impl<S: Scalar> RunSummary<S> {
    /// Mean NAPFD over a half-open range of cycle *positions* in the series.
    pub fn mean_over(&self, range: std::ops::Range<usize>) -> S {
        mean(&self.per_cycle_mean[range])
    }
}

fn mean<S: Scalar>(values: &[S]) -> S {
    if values.is_empty() {
        return S::zero();
    }
    values.iter().fold(S::zero(), |acc, &v| acc + v) / scalar::cast(values.len() as f64)
}

/// Arithmetic mean per cycle over repetitions. All repetitions must cover
/// the identical cycle sequence.
pub fn aggregate<S: Scalar>(series: &[Vec<CycleEvaluation<S>>]) -> Result<RunSummary<S>> {
    let first = series
        .first()
        .ok_or_else(|| Error::MismatchedCycles("no repetitions".into()))?;
    let cycles: Vec<CycleId> = first.iter().map(|e| e.cycle_id).collect();
    for (rep, evals) in series.iter().enumerate() {
        let theirs: Vec<CycleId> = evals.iter().map(|e| e.cycle_id).collect();
        if theirs != cycles {
            return Err(Error::MismatchedCycles(format!(
                "repetition {rep} covers {} cycles, repetition 0 covers {}",
                theirs.len(),
                cycles.len()
            )));
        }
    }
    let reps = scalar::cast::<S>(series.len() as f64);
    let per_cycle_mean: Vec<S> = (0..cycles.len())
        .map(|i| {
            series
                .iter()
                .fold(S::zero(), |acc, rep| acc + rep[i].napfd)
                / reps
        })
        .collect();
    let overall_mean = mean(&per_cycle_mean);
    Ok(RunSummary {
        cycles,
        per_cycle_mean,
        overall_mean,
    })
}

/// Difference of two methods' mean NAPFD over one block of consecutive
/// cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockDifference<S = f64> {
    pub block_start: CycleId,
    /// Inclusive.
    pub block_end: CycleId,
    pub mean_a: S,
    pub mean_b: S,
    /// `mean_a - mean_b`.
    pub difference: S,
    /// True for a trailing block shorter than the block size.
    pub partial: bool,
}

/// Block-wise comparison of two summaries over identical cycle sets.
/// The final partial block is kept and flagged.
pub fn block_differences<S: Scalar>(
    a: &RunSummary<S>,
    b: &RunSummary<S>,
    block_size: usize,
) -> Result<Vec<BlockDifference<S>>> {
    if a.cycles != b.cycles {
        return Err(Error::MismatchedCycles(
            "block comparison needs identical cycle sets".into(),
        ));
    }
    debug_assert!(block_size >= 1);
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < a.cycles.len() {
        let end = (start + block_size).min(a.cycles.len());
        let mean_a = mean(&a.per_cycle_mean[start..end]);
        let mean_b = mean(&b.per_cycle_mean[start..end]);
        blocks.push(BlockDifference {
            block_start: a.cycles[start],
            block_end: a.cycles[end - 1],
            mean_a,
            mean_b,
            difference: mean_a - mean_b,
            partial: end - start < block_size,
        });
        start = end;
    }
    Ok(blocks)
}

/// Ordinary least-squares line fit of `values` against positions 0, 1, ...
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFit<S = f64> {
    pub slope: S,
    pub intercept: S,
    /// Standard error of the slope; infinite for fewer than 3 points.
    pub slope_stderr: S,
}

impl<S: Scalar> TrendFit<S> {
    /// 95% confidence interval of the slope (normal approximation).
    pub fn slope_confidence_95(&self) -> (S, S) {
        let half = scalar::cast::<S>(1.96) * self.slope_stderr;
        (self.slope - half, self.slope + half)
    }
}

pub fn linear_trend<S: Scalar>(values: &[S]) -> TrendFit<S> {
    let n = values.len();
    if n < 2 {
        return TrendFit {
            slope: S::zero(),
            intercept: values.first().copied().unwrap_or_else(S::zero),
            slope_stderr: S::infinity(),
        };
    }
    let nf = scalar::cast::<S>(n as f64);
    let x_mean = scalar::cast::<S>((n - 1) as f64) / scalar::cast(2.0);
    let y_mean = mean(values);
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    for (i, &y) in values.iter().enumerate() {
        let dx = scalar::cast::<S>(i as f64) - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    if n < 3 {
        return TrendFit {
            slope,
            intercept,
            slope_stderr: S::infinity(),
        };
    }
    let mut rss = S::zero();
    for (i, &y) in values.iter().enumerate() {
        let fitted = intercept + slope * scalar::cast(i as f64);
        let r = y - fitted;
        rss += r * r;
    }
    let sigma2 = rss / (nf - scalar::cast(2.0));
    TrendFit {
        slope,
        intercept,
        slope_stderr: (sigma2 / sxx).sqrt(),
    }
}

/// Per-cycle results CSV:
/// `method,reward,repetition,cycle,napfd,detected,total,scheduled,suite_size`.
pub fn write_results_csv<S: Scalar, W: Write>(
    writer: W,
    method: &str,
    reward: &str,
    per_rep: &[Vec<CycleEvaluation<S>>],
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "method",
        "reward",
        "repetition",
        "cycle",
        "napfd",
        "detected",
        "total",
        "scheduled",
        "suite_size",
    ])?;
    for (rep, evals) in per_rep.iter().enumerate() {
        for e in evals {
            let fields = [
                method.to_string(),
                reward.to_string(),
                rep.to_string(),
                e.cycle_id.to_string(),
                e.napfd.to_string(),
                e.detected_failures.to_string(),
                e.total_failures.to_string(),
                e.scheduled_count.to_string(),
                e.suite_size.to_string(),
            ];
            out.write_record(&fields)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Block comparison CSV:
/// `block_start,block_end,mean_napfd_a,mean_napfd_b,difference`.
pub fn write_blocks_csv<S: Scalar, W: Write>(
    writer: W,
    blocks: &[BlockDifference<S>],
) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "block_start",
        "block_end",
        "mean_napfd_a",
        "mean_napfd_b",
        "difference",
    ])?;
    for b in blocks {
        let fields = [
            b.block_start.to_string(),
            b.block_end.to_string(),
            b.mean_a.to_string(),
            b.mean_b.to_string(),
            b.difference.to_string(),
        ];
        out.write_record(&fields)?;
    }
    out.flush()?;
    Ok(())
}
