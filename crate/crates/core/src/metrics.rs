//! Rule-set quality metrics and induction timing.

use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::induction::{induce, Algorithm, InductionTrace, Rule, RuleSet};

/// Fraction of the rows matched by `r` that carry its consequent. `None`
/// when the rule matches no row of `d`.
pub fn rule_precision(r: &Rule, d: &Dataset) -> Option<f64> {
    let (matched, correct) = d
        .rows()
        .iter()
        .zip(d.classes())
        .filter(|(row, _)| r.antecedent.matches(row))
        .fold((0usize, 0usize), |(m, c), (_, &class)| {
            (m + 1, c + usize::from(class == r.consequent))
        });
    (matched > 0).then(|| correct as f64 / matched as f64)
}

/// Unweighted mean of [`rule_precision`] over the rules matching at least
/// one row; rules without matches are left out.
pub fn mean_precision(rs: &RuleSet, d: &Dataset) -> Result<f64> {
    if rs.is_empty() {
        return Err(Error::Undefined("mean precision of an empty rule set".into()));
    }
    let precisions: Vec<f64> = rs.rules().iter().filter_map(|r| rule_precision(r, d)).collect();
    if precisions.is_empty() {
        return Err(Error::Undefined("no rule matches any row".into()));
    }
    Ok(precisions.iter().sum::<f64>() / precisions.len() as f64)
}

/// Sum over rules of the fraction of rows each one matches. Exceeds 1 when
/// rules overlap; the default class is not counted.
pub fn overall_coverage(rs: &RuleSet, d: &Dataset) -> f64 {
    if d.is_empty() {
        return 0.0;
    }
    let matches: usize = rs
        .rules()
        .iter()
        .map(|r| d.rows().iter().filter(|row| r.antecedent.matches(row)).count())
        .sum();
    matches as f64 / d.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// Predictions that fell through to the default class.
    pub default_rule_uses: usize,
}

pub fn evaluate_test(rs: &RuleSet, test: &Dataset) -> Result<TestOutcome> {
    if test.is_empty() {
        return Err(Error::Undefined("accuracy on an empty test set".into()));
    }
    let mut correct = 0;
    let mut default_rule_uses = 0;
    for (row, &class) in test.rows().iter().zip(test.classes()) {
        let prediction = rs.classify(row)?;
        correct += usize::from(prediction.class == class);
        default_rule_uses += usize::from(prediction.rule.is_none());
    }
    Ok(TestOutcome {
        accuracy: correct as f64 / test.len() as f64,
        correct,
        total: test.len(),
        default_rule_uses,
    })
}

pub fn test_accuracy(rs: &RuleSet, test: &Dataset) -> Result<f64> {
    evaluate_test(rs, test).map(|o| o.accuracy)
}

#[derive(Debug, Clone)]
pub struct TimedInduction {
    pub rules: RuleSet,
    pub trace: InductionTrace,
    /// Median wall-clock time of the induction call alone.
    pub median: Duration,
    pub samples: Vec<Duration>,
}

/// Runs the induction `repeats` times (at least once) and keeps the median
/// duration. The rule set is the same on every run.
pub fn time_induction(algorithm: Algorithm, train: &Dataset, repeats: usize) -> TimedInduction {
    let mut samples = Vec::with_capacity(repeats.max(1));
    let mut result = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let induced = induce(algorithm, train);
        samples.push(start.elapsed());
        result = Some(induced);
    }
    let (rules, trace) = result.expect("at least one run");
    let mut sorted = samples.clone();
    sorted.sort_unstable();
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        let hi = sorted.len() / 2;
        (sorted[hi - 1] + sorted[hi]) / 2
    };
    TimedInduction {
        rules,
        trace,
        median,
        samples,
    }
}

/// One (dataset, algorithm) result row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n_rules: usize,
    /// On the training set.
    pub mean_precision: f64,
    /// On the training set.
    pub overall_coverage: f64,
    pub test_accuracy: Option<f64>,
    #[serde(serialize_with = "seconds")]
    pub induction_time: Option<Duration>,
    pub default_rule_uses: Option<usize>,
}

fn seconds<S: Serializer>(d: &Option<Duration>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_some(&((d.as_secs_f64() * 1000.0).round() / 1000.0)),
        None => s.serialize_none(),
    }
}

impl MetricsReport {
    pub fn compute(
        rs: &RuleSet,
        train: &Dataset,
        test: Option<&Dataset>,
        induction_time: Option<Duration>,
    ) -> Result<Self> {
        let test = test.map(|t| evaluate_test(rs, t)).transpose()?;
        Ok(MetricsReport {
            n_rules: rs.len(),
            mean_precision: mean_precision(rs, train)?,
            overall_coverage: overall_coverage(rs, train),
            test_accuracy: test.map(|t| t.accuracy),
            induction_time,
            default_rule_uses: test.map(|t| t.default_rule_uses),
        })
    }
}

/// `0.9531` → `95.31%`
pub fn percent(ratio: f64) -> String {
    format!("{:.2}%", ratio * 100.0)
}

/// Millisecond resolution, in seconds: `0.220s`.
pub fn format_duration(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}
