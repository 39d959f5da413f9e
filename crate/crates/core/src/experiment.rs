//! Experiment orchestration for the command-line harness: load, optionally
//! discretize and split a dataset, induce with one or both algorithms,
//! verify, measure and render reports.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, ValueEnum};
use serde::Serialize;

use crate::dataset::{
    discretize_numeric, encode_categorical, fixture, split, ClassColumn, Dataset, DatasetStats,
    RawTable, Schema, SplitSpec, FIXTURE_NAMES,
};
use crate::error::{Error, Result};
use crate::induction::{
    induce, verify_ruleset, Algorithm, InductionTrace, RuleSet, RuleSetExport, VerificationReport,
};
use crate::metrics::{format_duration, percent, time_induction, MetricsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    Rules,
    Rrules,
    Both,
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Rules => vec![Algorithm::Rules],
            AlgorithmChoice::Rrules => vec![Algorithm::Rrules],
            AlgorithmChoice::Both => Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

/// Flags describing one experiment. Suite manifests use the same flags, one
/// experiment per line.
#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Dataset CSV path or built-in fixture name (toy)
    #[arg(long)]
    pub data: Option<String>,

    #[arg(long, value_enum, default_value = "both")]
    pub algorithm: AlgorithmChoice,

    /// Fraction of rows held out for testing; 0 trains on everything
    #[arg(long, default_value_t = 0.0)]
    pub test_fraction: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Equal-width bins for numeric columns
    #[arg(long, default_value_t = 7)]
    pub bins: usize,

    /// Timed induction runs per algorithm (median reported); 0 disables timing
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,

    /// Print the induced rules
    #[arg(long)]
    pub dump_rules: bool,

    /// Verify rule sets against the training data (default)
    #[arg(long, overrides_with = "no_verify")]
    pub verify: bool,

    /// Skip verification
    #[arg(long)]
    pub no_verify: bool,

    /// Class column: first, last, a zero-based index or a header name
    #[arg(long, default_value = "last")]
    pub class_column: String,

    /// The CSV has no header row
    #[arg(long)]
    pub no_header: bool,

    /// Treat numeric columns as categorical tokens
    #[arg(long)]
    pub no_discretize: bool,

    /// Dataset name used in reports (default: fixture name or file stem)
    #[arg(long)]
    pub name: Option<String>,

    /// Print per-round induction counters to stderr
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Fixture(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub name: String,
    pub algorithms: Vec<Algorithm>,
    /// In `[0, 1)`; 0 means train-only.
    pub test_fraction: f64,
    pub seed: u64,
    pub n_bins: usize,
    pub repeats: usize,
    pub format: OutputFormat,
    pub dump_rules: bool,
    pub verify: bool,
    pub has_header: bool,
    pub class_column: ClassColumn,
    pub discretize: bool,
    pub verbosity: u8,
}

impl ExperimentConfig {
    /// Relative file paths are resolved against `base_dir` when given.
    pub fn from_args(args: &ExperimentArgs, base_dir: Option<&Path>) -> Result<Self> {
        let data = args
            .data
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--data is required".into()))?;
        let source = if FIXTURE_NAMES.contains(&data) {
            DataSource::Fixture(data.to_string())
        } else {
            let path = PathBuf::from(data);
            DataSource::File(match base_dir {
                Some(base) if path.is_relative() => base.join(path),
                _ => path,
            })
        };
        if !(0.0..1.0).contains(&args.test_fraction) {
            return Err(Error::InvalidArgument(format!(
                "--test-fraction {} outside [0, 1)",
                args.test_fraction
            )));
        }
        if args.bins == 0 {
            return Err(Error::InvalidArgument("--bins must be at least 1".into()));
        }
        let name = args.name.clone().unwrap_or_else(|| match &source {
            DataSource::Fixture(name) => name.clone(),
            DataSource::File(path) => path
                .file_stem()
                .map_or_else(|| data.to_string(), |s| s.to_string_lossy().into_owned()),
        });
        Ok(ExperimentConfig {
            source,
            name,
            algorithms: args.algorithm.algorithms(),
            test_fraction: args.test_fraction,
            seed: args.seed,
            n_bins: args.bins,
            repeats: args.repeats,
            format: args.format,
            dump_rules: args.dump_rules,
            verify: !args.no_verify,
            has_header: !args.no_header,
            class_column: args.class_column.parse()?,
            discretize: !args.no_discretize,
            verbosity: args.verbose,
        })
    }

    pub fn timing(&self) -> bool {
        self.repeats > 0
    }

    pub fn load(&self) -> Result<Dataset> {
        let dataset = match &self.source {
            DataSource::Fixture(name) => fixture(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {name:?}")))?,
            DataSource::File(path) => {
                let file = File::open(path).map_err(|e| {
                    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
                })?;
                let table =
                    RawTable::read(BufReader::new(file), self.has_header, &self.class_column)?;
                if self.discretize {
                    discretize_numeric(&table, self.n_bins)?.0
                } else {
                    encode_categorical(&table)?
                }
            }
        };
        Ok(dataset.with_name(self.name.clone()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub report: MetricsReport,
    pub verification: Option<VerificationReport>,
    #[serde(skip)]
    pub rules: RuleSet,
    #[serde(skip)]
    pub trace: InductionTrace,
}

impl AlgorithmRun {
    pub fn verified(&self) -> bool {
        self.verification.as_ref().is_none_or(VerificationReport::passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    pub dataset: String,
    pub stats: DatasetStats,
    pub train_rows: usize,
    pub test_rows: usize,
    pub seed: u64,
    pub runs: Vec<AlgorithmRun>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rule_sets: Vec<RuleSetExport>,
    #[serde(skip)]
    pub schema: Arc<Schema>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.runs.iter().all(AlgorithmRun::verified)
    }
}

/// load → (discretize) → (split) → induce → verify → metrics.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let dataset = cfg.load()?;
    let (train, test) = if cfg.test_fraction > 0.0 {
        let spec = SplitSpec {
            test_fraction: cfg.test_fraction,
            seed: cfg.seed,
        };
        let (train, test) = split(&dataset, &spec)?;
        (train, Some(test))
    } else {
        (dataset.clone(), None)
    };

    let mut runs = Vec::with_capacity(cfg.algorithms.len());
    let mut rule_sets = Vec::new();
    for &algorithm in &cfg.algorithms {
        let (rules, trace, time) = if cfg.timing() {
            let timed = time_induction(algorithm, &train, cfg.repeats);
            (timed.rules, timed.trace, Some(timed.median))
        } else {
            let (rules, trace) = induce(algorithm, &train);
            (rules, trace, None)
        };
        if cfg.verbosity > 0 {
            for it in &trace.iterations {
                eprintln!(
                    "{} {algorithm} n_c={} generated={} empty={} irrelevant={} skipped={} impure={} rules={} remaining={}",
                    cfg.name,
                    it.n_c,
                    it.generated,
                    it.discarded_empty,
                    it.discarded_irrelevant,
                    it.skipped,
                    it.impure,
                    it.rules_created,
                    it.remaining
                );
            }
        }
        let verification = cfg.verify.then(|| verify_ruleset(&rules, &train));
        let report = MetricsReport::compute(&rules, &train, test.as_ref(), time)?;
        if cfg.dump_rules {
            rule_sets.push(rules.export(train.schema()));
        }
        runs.push(AlgorithmRun {
            algorithm,
            report,
            verification,
            rules,
            trace,
        });
    }
    Ok(ExperimentOutcome {
        dataset: cfg.name.clone(),
        stats: dataset.stats(),
        train_rows: train.len(),
        test_rows: test.as_ref().map_or(0, Dataset::len),
        seed: cfg.seed,
        runs,
        rule_sets,
        schema: dataset.shared_schema().clone(),
    })
}

/// One line of the aggregated results table.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub dataset: String,
    pub algorithm: Option<Algorithm>,
    #[serde(flatten)]
    pub report: Option<MetricsReport>,
    pub verified: Option<bool>,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.verified == Some(false)
    }
}

fn rows_of(outcome: &ExperimentOutcome) -> Vec<ResultRow> {
    outcome
        .runs
        .iter()
        .map(|run| ResultRow {
            dataset: outcome.dataset.clone(),
            algorithm: Some(run.algorithm),
            report: Some(run.report.clone()),
            verified: run.verification.as_ref().map(VerificationReport::passed),
            error: None,
        })
        .collect()
}

const COLUMNS: [&str; 9] = [
    "Dataset",
    "Algorithm",
    "N Rules",
    "Train Prec.",
    "Train Cov.",
    "Test Acc.",
    "Ind. Time",
    "Default Uses",
    "Verified",
];

fn cells(row: &ResultRow) -> Vec<String> {
    let dash = || "-".to_string();
    let algorithm = row.algorithm.map_or_else(dash, |a| a.to_string());
    match (&row.report, &row.error) {
        (_, Some(error)) => vec![row.dataset.clone(), algorithm, format!("FAILED: {error}")],
        (Some(r), None) => vec![
            row.dataset.clone(),
            algorithm,
            r.n_rules.to_string(),
            percent(r.mean_precision),
            percent(r.overall_coverage),
            r.test_accuracy.map_or_else(dash, percent),
            r.induction_time.map_or_else(dash, format_duration),
            r.default_rule_uses.map_or_else(dash, |n| n.to_string()),
            match row.verified {
                Some(true) => "yes".into(),
                Some(false) => "NO".into(),
                None => dash(),
            },
        ],
        (None, None) => vec![row.dataset.clone(), algorithm],
    }
}

/// Aligned plain-text table; text columns left-aligned, numbers right. The
/// test columns are left out when no row was evaluated on a test set.
pub fn render_table(rows: &[ResultRow]) -> String {
    let tested = rows
        .iter()
        .any(|r| r.report.as_ref().is_some_and(|m| m.test_accuracy.is_some()));
    let keep = |i: usize| tested || (COLUMNS[i] != "Test Acc." && COLUMNS[i] != "Default Uses");
    let project = |line: Vec<String>| -> Vec<String> {
        if line.len() == COLUMNS.len() {
            line.into_iter().enumerate().filter(|&(i, _)| keep(i)).map(|(_, c)| c).collect()
        } else {
            line
        }
    };
    let header = project(COLUMNS.map(String::from).to_vec());
    let body: Vec<Vec<String>> = rows.iter().map(|r| project(cells(r))).collect();
    let full = header.len();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for line in &body {
        // a failure message spans the remaining columns
        let n = if line.len() == full { full } else { 2 };
        for (w, cell) in widths.iter_mut().zip(line).take(n) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        let mut text = String::new();
        for (i, cell) in line.iter().enumerate() {
            if i > 0 {
                text.push_str("  ");
            }
            if i < 2 || line.len() != full {
                let _ = write!(text, "{:<w$}", cell, w = widths.get(i).copied().unwrap_or(0));
            } else {
                let _ = write!(text, "{:>w$}", cell, w = widths[i]);
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    }
    out
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(
        "dataset,algorithm,n_rules,train_precision,train_coverage,test_accuracy,induction_time_s,default_rule_uses,verified,error\n",
    );
    let pct = |x: f64| format!("{:.2}", x * 100.0);
    for row in rows {
        let algorithm = row.algorithm.map_or(String::new(), |a| a.to_string());
        let fields: Vec<String> = match &row.report {
            Some(r) => vec![
                r.n_rules.to_string(),
                pct(r.mean_precision),
                pct(r.overall_coverage),
                r.test_accuracy.map_or(String::new(), pct),
                r.induction_time
                    .map_or(String::new(), |d| format!("{:.3}", d.as_secs_f64())),
                r.default_rule_uses.map_or(String::new(), |n| n.to_string()),
            ],
            None => vec![String::new(); 6],
        };
        let verified = row.verified.map_or(String::new(), |v| v.to_string());
        let error = row
            .error
            .as_deref()
            .map_or(String::new(), |e| format!("\"{}\"", e.replace('"', "\"\"")));
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.dataset,
            algorithm,
            fields.join(","),
            verified,
            error
        );
    }
    out
}

/// Human-readable report for a single experiment.
pub fn render_outcome(outcome: &ExperimentOutcome, cfg: &ExperimentConfig) -> Result<String> {
    let rows = rows_of(outcome);
    let mut out = match cfg.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(outcome).map_err(|e| Error::Io(e.into()))?;
            s.push('\n');
            return Ok(s);
        }
        OutputFormat::Csv => render_csv(&rows),
        OutputFormat::Table => {
            let s = outcome.stats;
            let split = if outcome.test_rows > 0 {
                format!("train {} / test {}, seed {}", outcome.train_rows, outcome.test_rows, outcome.seed)
            } else {
                "train only".to_string()
            };
            format!(
                "{}: {} examples, {} attributes, {} selectors, {} classes ({split})\n{}",
                outcome.dataset,
                s.examples,
                s.attributes,
                s.selectors,
                s.classes,
                render_table(&rows)
            )
        }
    };
    if cfg.dump_rules {
        for run in &outcome.runs {
            let _ = write!(out, "\n{} rules:\n", run.algorithm);
            out.push_str(&run.rules.dump(&outcome.schema));
        }
    }
    for run in &outcome.runs {
        if let Some(v) = &run.verification {
            for violation in v.violations.iter().take(20) {
                let _ = writeln!(out, "{} verification: {violation}", run.algorithm);
            }
        }
    }
    Ok(out)
}

/// Per-experiment RULES / RRULES ratios.
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub dataset: String,
    pub seed: u64,
    pub rules: f64,
    pub coverage: f64,
    pub time: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<ResultRow>,
    pub ratios: Vec<RatioRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| !r.failed())
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.into()))?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => Ok(render_csv(&self.rows)),
            OutputFormat::Table => {
                let mut out = render_table(&self.rows);
                if !self.ratios.is_empty() {
                    out.push_str("\nRULES / RRULES ratios\n");
                    let width = self.ratios.iter().map(|r| r.dataset.len()).max().unwrap_or(0).max(7);
                    let _ = writeln!(out, "{:<width$}  {:>6}  {:>8}  {:>8}  {:>6}", "Dataset", "Seed", "Rules", "Coverage", "Time");
                    for r in &self.ratios {
                        let time = r.time.map_or("-".to_string(), |t| format!("{t:.2}"));
                        let _ = writeln!(
                            out,
                            "{:<width$}  {:>6}  {:>8.2}  {:>8.2}  {:>6}",
                            r.dataset, r.seed, r.rules, r.coverage, time
                        );
                    }
                }
                Ok(out)
            }
        }
    }
}

/// One manifest entry: the source line and its parsed configuration.
pub type ManifestEntry = (usize, Result<ExperimentConfig>);

#[derive(Parser)]
#[command(no_binary_name = true)]
struct ManifestLine {
    #[command(flatten)]
    args: ExperimentArgs,
}

/// Parses a manifest: one experiment per line using the command-line flags,
/// `#` starts a comment. Relative data paths resolve against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: Option<&Path>) -> Vec<ManifestEntry> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                return None;
            }
            let parsed = ManifestLine::try_parse_from(line.split_whitespace())
                .map_err(|e| Error::InvalidArgument(e.to_string().lines().next().unwrap_or("").to_string()))
                .and_then(|m| ExperimentConfig::from_args(&m.args, base_dir));
            Some((i + 1, parsed))
        })
        .collect()
}

/// Runs every entry and aggregates the results sorted by dataset then
/// algorithm. A failing entry becomes a failed row; the rest still run.
/// Entries run on up to `jobs` threads, except when any entry is timed.
pub fn run_suite(entries: &[ManifestEntry], jobs: usize) -> SuiteReport {
    let timed = entries
        .iter()
        .any(|(_, cfg)| cfg.as_ref().is_ok_and(ExperimentConfig::timing));
    let jobs = if timed { 1 } else { jobs.max(1) };

    let run_one = |(line, cfg): &ManifestEntry| -> (Vec<ResultRow>, Option<RatioRow>) {
        let label = |cfg: Option<&ExperimentConfig>| {
            cfg.map_or_else(|| format!("line {line}"), |c| c.name.clone())
        };
        match cfg.as_ref().map_err(|e| e.to_string()).and_then(|c| {
            run_experiment(c).map_err(|e| e.to_string()).map(|o| (c, o))
        }) {
            Ok((_, outcome)) => (rows_of(&outcome), ratio_of(&outcome)),
            Err(error) => (
                vec![ResultRow {
                    dataset: label(cfg.as_ref().ok()),
                    algorithm: None,
                    report: None,
                    verified: None,
                    error: Some(error),
                }],
                None,
            ),
        }
    };

    let results: Vec<(Vec<ResultRow>, Option<RatioRow>)> = if jobs == 1 {
        entries.iter().map(run_one).collect()
    } else {
        let chunk = entries.len().div_ceil(jobs).max(1);
        std::thread::scope(|scope| {
            let handles: Vec<_> = entries
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(run_one).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("experiment thread panicked"))
                .collect()
        })
    };

    let mut rows: Vec<ResultRow> = Vec::new();
    let mut ratios: Vec<RatioRow> = Vec::new();
    for (r, ratio) in results {
        rows.extend(r);
        ratios.extend(ratio);
    }
    rows.sort_by(|a, b| (&a.dataset, a.algorithm).cmp(&(&b.dataset, b.algorithm)));
    ratios.sort_by(|a, b| a.dataset.cmp(&b.dataset));
    SuiteReport { rows, ratios }
}

fn ratio_of(outcome: &ExperimentOutcome) -> Option<RatioRow> {
    let find = |a: Algorithm| outcome.runs.iter().find(|r| r.algorithm == a);
    let (rules, rrules) = (find(Algorithm::Rules)?, find(Algorithm::Rrules)?);
    let (a, b) = (&rules.report, &rrules.report);
    Some(RatioRow {
        dataset: outcome.dataset.clone(),
        seed: outcome.seed,
        rules: a.n_rules as f64 / b.n_rules as f64,
        coverage: a.overall_coverage / b.overall_coverage,
        time: match (a.induction_time, b.induction_time) {
            (Some(x), Some(y)) if !y.is_zero() => Some(x.as_secs_f64() / y.as_secs_f64()),
            _ => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(line: &str) -> ExperimentConfig {
        let entries = parse_manifest(line, None);
        entries.into_iter().next().unwrap().1.unwrap()
    }

    #[test]
    fn manifest_parsing() {
        let text = "# comment\n\n--data toy --algorithm rrules  # trailing\n--data x.csv --test-fraction 1.5\n--bogus\n";
        let entries = parse_manifest(text, Some(Path::new("/tmp/m")));
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0].0, 3);
        let first = entries[0].1.as_ref().unwrap();
        assert_eq!(first.source, DataSource::Fixture("toy".into()));
        assert_eq!(first.algorithms, [Algorithm::Rrules]);
        assert!(first.verify);
        assert!(entries[1].1.is_err());
        assert!(entries[2].1.is_err());
        let relative = config("--data sub/x.csv");
        assert_eq!(relative.source, DataSource::File("sub/x.csv".into()));
        let based = &parse_manifest("--data sub/x.csv", Some(Path::new("/m")))[0].1;
        assert_eq!(based.as_ref().unwrap().source, DataSource::File("/m/sub/x.csv".into()));
        assert_eq!(based.as_ref().unwrap().name, "x");
    }

    #[test]
    fn toy_experiment() {
        let cfg = config("--data toy --repeats 0");
        let outcome = run_experiment(&cfg).unwrap();
        assert!(outcome.passed());
        let n: Vec<usize> = outcome.runs.iter().map(|r| r.report.n_rules).collect();
        assert_eq!(n, [7, 4]);
        let table = render_outcome(&outcome, &cfg).unwrap();
        assert!(table.contains("180.00%"), "{table}");
        assert!(table.starts_with("toy: 5 examples, 3 attributes, 6 selectors, 4 classes (train only)"));
        assert!(!table.contains("Test Acc."));
    }

    #[test]
    fn suite_isolates_failures() {
        let entries = parse_manifest(
            "--data toy --repeats 0\n--data /nonexistent/file.csv --repeats 0\n",
            None,
        );
        let report = run_suite(&entries, 2);
        assert_eq!(report.rows.len(), 3);
        assert!(!report.passed());
        assert_eq!(report.rows.iter().filter(|r| r.failed()).count(), 1);
        assert_eq!(report.ratios.len(), 1);
        assert!((report.ratios[0].rules - 7.0 / 4.0).abs() < 1e-12);

        let empty = run_suite(&[], 1);
        assert!(empty.passed());
        assert!(empty.rows.is_empty());
    }
}
