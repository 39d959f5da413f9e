//! Rule induction with the RULES and RRULES covering algorithms over
//! categorical (or discretized) datasets.

pub mod conditions;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod induction;
pub mod metrics;

pub use conditions::{Condition, MatchSet, Selector, SelectorIndex};
pub use dataset::{ClassColumn, Dataset, Schema, SplitSpec};
pub use error::{Error, Result};
pub use induction::{induce, induce_rrules, induce_rules, verify_ruleset, Algorithm, Rule, RuleSet};
pub use metrics::MetricsReport;
