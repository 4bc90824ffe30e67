//! Aggregation of generation records and verdicts into run metrics, plus
//! the scale-sweep driver.

use crate::backend::{generate_over_benchmark, GenerateError, Generator};
use crate::benchbuild::{scale_benchmark, BenchError, ScaleSpec};
use crate::datamodel::{BenchmarkEntry, EvalSummary, GenerationRecord, Outcome, Verdict};
use crate::judge::{judge_over_benchmark, JudgeConfig, JudgeError, PairwiseJudge, TiePolicy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no records to aggregate")]
    Empty,
    #[error("no decidable comparisons: every verdict is a tie under the drop policy")]
    NoDecidable,
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error("invalid summary: {0}")]
    InvalidSummary(String),
}

/// Percentage of generations that exceed their length constraint.
/// Failed records are violations by construction.
pub fn violation_rate(gens: &[GenerationRecord]) -> Result<f64, MetricsError> {
    if gens.is_empty() {
        return Err(MetricsError::Empty);
    }
    let violations = gens.iter().filter(|g| g.violation).count();
    Ok(100.0 * violations as f64 / gens.len() as f64)
}

/// Pairwise win percentage against the baseline.
///
/// `half_win`: ties contribute half a win and stay in the denominator,
/// gated losses included. `drop`: ties leave numerator and denominator.
pub fn win_rate(verdicts: &[Verdict], policy: TiePolicy) -> Result<f64, MetricsError> {
    if verdicts.is_empty() {
        return Err(MetricsError::Empty);
    }
    let wins = verdicts
        .iter()
        .filter(|v| v.outcome == Outcome::CandidateWin)
        .count();
    let ties = verdicts.iter().filter(|v| v.outcome == Outcome::Tie).count();
    match policy {
        TiePolicy::HalfWin => {
            Ok(100.0 * (wins as f64 + 0.5 * ties as f64) / verdicts.len() as f64)
        }
        TiePolicy::Drop => {
            let decidable = verdicts.len() - ties;
            if decidable == 0 {
                return Err(MetricsError::NoDecidable);
            }
            Ok(100.0 * wins as f64 / decidable as f64)
        }
    }
}

/// Arithmetic mean of the word counts.
pub fn mean_words(gens: &[GenerationRecord]) -> Result<f64, MetricsError> {
    if gens.is_empty() {
        return Err(MetricsError::Empty);
    }
    let total: usize = gens.iter().map(|g| g.word_count).sum();
    Ok(total as f64 / gens.len() as f64)
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Assemble an [`EvalSummary`], rates and mean rounded to one decimal.
///
/// `failures` counts transport-failed generations plus errored verdicts;
/// both are already folded into the rates as violations/losses.
pub fn summarize(
    gens: &[GenerationRecord],
    verdicts: Option<&[Verdict]>,
    policy: TiePolicy,
    scale: f64,
) -> Result<EvalSummary, MetricsError> {
    let violation = round1(violation_rate(gens)?);
    let win = match verdicts {
        Some(v) if !v.is_empty() => Some(round1(win_rate(v, policy)?)),
        _ => None,
    };
    let mean = round1(mean_words(gens)?);
    let failures = gens.iter().filter(|g| g.failed).count()
        + verdicts
            .map(|v| v.iter().filter(|x| x.error.is_some()).count())
            .unwrap_or(0);
    let summary = EvalSummary {
        n: gens.len(),
        violation_rate: violation,
        win_rate: win,
        mean_words: mean,
        scale,
        failures,
    };
    summary.validate().map_err(MetricsError::InvalidSummary)?;
    Ok(summary)
}

/// Sweep outcome: one summary per scale factor, factors strictly
/// decreasing (each summary carries its factor in `scale`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<EvalSummary>,
}

impl SweepResult {
    pub fn check_invariants(&self) -> Result<(), String> {
        for pair in self.points.windows(2) {
            if pair[1].scale >= pair[0].scale {
                return Err(format!(
                    "factors not strictly decreasing: {} then {}",
                    pair[0].scale, pair[1].scale
                ));
            }
        }
        Ok(())
    }
}

/// Scale the benchmark by each factor (descending), generate against it,
/// and summarize. Win rates are computed only when a judge is supplied and
/// scaled entries still carry baselines; violation rates always are.
pub fn run_sweep(
    bench: &[BenchmarkEntry],
    spec: &ScaleSpec,
    generator: &dyn Generator,
    judge: Option<(&dyn PairwiseJudge, &JudgeConfig)>,
    concurrency: usize,
) -> Result<SweepResult, MetricsError> {
    let mut factors = spec.factors.clone();
    factors.sort_by(|a, b| b.partial_cmp(a).expect("validated factors"));
    let mut points = Vec::with_capacity(factors.len());
    for factor in factors {
        let scaled = scale_benchmark(bench, factor)?;
        let gens = generate_over_benchmark(generator, &scaled, concurrency)?;
        let verdicts = match judge {
            Some((judge, cfg)) if scaled.iter().any(|e| e.baseline().is_some()) => {
                Some(judge_over_benchmark(&scaled, &gens, judge, cfg, concurrency)?)
            }
            _ => None,
        };
        let policy = judge.map(|(_, cfg)| cfg.tie_policy).unwrap_or(TiePolicy::HalfWin);
        points.push(summarize(&gens, verdicts.as_deref(), policy, factor)?);
    }
    let result = SweepResult { points };
    result
        .check_invariants()
        .map_err(MetricsError::InvalidSummary)?;
    Ok(result)
}
