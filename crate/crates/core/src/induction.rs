//! RULES and RRULES rule induction, first-match prediction and rule-set
//! verification.
//!
//! Both algorithms grow the antecedent length `n_c` from 1 to the number of
//! attributes. In each round the candidate conditions are the size-`n_c`
//! combinations of the selectors present in the still-unclassified rows `N`,
//! visited in lexicographic order. A candidate becomes a rule when every
//! training row it matches has the same class. They differ in two places:
//!
//! * RULES rejects a pure candidate when an existing rule's antecedent is a
//!   subset of it, and only checks `N = ∅` between rounds.
//! * RRULES rejects any candidate matching no row of `N`, and stops as soon
//!   as a new rule empties `N`.
//!
//! In the last round (`n_c` = number of attributes) an impure candidate
//! matches only identical rows with different classes; it becomes a rule for
//! the most frequent class among them.
//!
//! The search walks the combination tree depth-first and carries the
//! intersection of the prefix's match sets, so a prefix matching no
//! training row skips its whole subtree. RRULES also skips subtrees whose
//! prefix matches no row of `N`. Skipped candidates would all have been
//! discarded, so the induced rules are those of the plain candidate loop.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::conditions::{is_sorted_subset, selectors_present, Condition, MatchSet, Selector, SelectorIndex};
use crate::dataset::{modal_index, Dataset, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Rules,
    Rrules,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Rules, Algorithm::Rrules];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Rules => "RULES",
            Algorithm::Rrules => "RRULES",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rules" => Ok(Algorithm::Rules),
            "rrules" => Ok(Algorithm::Rrules),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub antecedent: Condition,
    pub consequent: usize,
    /// Creation sequence number.
    pub order: usize,
    /// Antecedent length of the round that created the rule.
    pub n_c: usize,
    /// Created for identical rows with conflicting classes; may be impure.
    pub from_inconsistency: bool,
}

/// Rules in creation order plus the fallback class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
    default_class: Option<usize>,
    algorithm: Algorithm,
    n_attributes: usize,
}

/// Outcome of classifying one example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub class: usize,
    /// Order of the first matching rule, `None` when the default was used.
    pub rule: Option<usize>,
}

impl RuleSet {
    /// Rule order numbers are reassigned to `0..len` in the given order.
    pub fn new(
        algorithm: Algorithm,
        n_attributes: usize,
        mut rules: Vec<Rule>,
        default_class: Option<usize>,
    ) -> Self {
        for (i, r) in rules.iter_mut().enumerate() {
            r.order = i;
        }
        RuleSet {
            rules,
            default_class,
            algorithm,
            n_attributes,
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn default_class(&self) -> Option<usize> {
        self.default_class
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    /// Copy without the rule at position `k`.
    pub fn without_rule(&self, k: usize) -> RuleSet {
        let rules = self
            .rules
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, r)| r.clone())
            .collect();
        RuleSet::new(self.algorithm, self.n_attributes, rules, self.default_class)
    }

    /// First rule in creation order whose antecedent matches; otherwise the
    /// default class.
    pub fn classify(&self, example: &[usize]) -> Result<Prediction> {
        if example.len() != self.n_attributes {
            return Err(Error::InvalidArgument(format!(
                "example has {} values, rule set expects {}",
                example.len(),
                self.n_attributes
            )));
        }
        if let Some(rule) = self.rules.iter().find(|r| r.antecedent.matches(example)) {
            return Ok(Prediction {
                class: rule.consequent,
                rule: Some(rule.order),
            });
        }
        self.default_class
            .map(|class| Prediction { class, rule: None })
            .ok_or_else(|| Error::Undefined("no rule matches and no default class".into()))
    }

    pub fn predict(&self, example: &[usize]) -> Result<usize> {
        self.classify(example).map(|p| p.class)
    }

    /// One line per rule, then the default:
    ///
    /// ```text
    /// [0] IF A is A1 THEN 0  (nc=1, inconsistent=false)
    /// DEFAULT 0
    /// ```
    pub fn dump(&self, schema: &Schema) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let _ = writeln!(
                out,
                "[{}] {} THEN {}  (nc={}, inconsistent={})",
                r.order,
                r.antecedent.render(schema),
                schema.class_name(r.consequent),
                r.n_c,
                r.from_inconsistency
            );
        }
        match self.default_class {
            Some(c) => {
                let _ = writeln!(out, "DEFAULT {}", schema.class_name(c));
            }
            None => out.push_str("DEFAULT -\n"),
        }
        out
    }

    /// Name-based export for downstream tooling.
    pub fn export(&self, schema: &Schema) -> RuleSetExport {
        RuleSetExport {
            algorithm: self.algorithm,
            rules: self
                .rules
                .iter()
                .map(|r| RuleRecord {
                    order: r.order,
                    conditions: r
                        .antecedent
                        .selectors()
                        .iter()
                        .map(|s| {
                            let a = &schema.attributes[s.attribute];
                            SelectorRecord {
                                attribute: a.name.clone(),
                                value: a.value_name(s.value).unwrap_or("?").to_string(),
                            }
                        })
                        .collect(),
                    class: schema.class_name(r.consequent).to_string(),
                    n_c: r.n_c,
                    inconsistent: r.from_inconsistency,
                })
                .collect(),
            default_class: self.default_class.map(|c| schema.class_name(c).to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSetExport {
    pub algorithm: Algorithm,
    pub rules: Vec<RuleRecord>,
    pub default_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleRecord {
    pub order: usize,
    pub conditions: Vec<SelectorRecord>,
    pub class: String,
    pub n_c: usize,
    pub inconsistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectorRecord {
    pub attribute: String,
    pub value: String,
}

/// Counters for one round of the outer loop. Every generated candidate
/// lands in exactly one of the other buckets:
/// `generated = discarded_empty + discarded_irrelevant + skipped + impure + rules_created`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    pub n_c: usize,
    pub generated: u64,
    /// Matched no training row.
    pub discarded_empty: u64,
    pub discarded_irrelevant: u64,
    /// RRULES only: not evaluated because a prefix matched no unclassified
    /// row. Each would have been discarded as empty or irrelevant.
    pub skipped: u64,
    /// Mixed classes before the last round.
    pub impure: u64,
    pub rules_created: u64,
    /// `|N|` at the end of the round.
    pub remaining: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InductionTrace {
    pub iterations: Vec<IterationTrace>,
}

impl InductionTrace {
    pub fn total_generated(&self) -> u64 {
        self.iterations.iter().map(|i| i.generated).sum()
    }
}

pub fn induce(algorithm: Algorithm, train: &Dataset) -> (RuleSet, InductionTrace) {
    Engine::new(algorithm, train).run()
}

pub fn induce_rules(train: &Dataset) -> (RuleSet, InductionTrace) {
    induce(Algorithm::Rules, train)
}

pub fn induce_rrules(train: &Dataset) -> (RuleSet, InductionTrace) {
    induce(Algorithm::Rrules, train)
}

/// RULES irrelevance: some existing antecedent is a subset of `c`, so a more
/// general rule already covers everything `c` matches.
pub fn is_irrelevant(c: &Condition, existing: &[Rule]) -> bool {
    existing.iter().any(|r| r.antecedent.is_subset_of(c))
}

/// Candidates of one round, grouped by attribute.
struct Round {
    pool: Vec<Selector>,
    group_of: Vec<usize>,
    /// First pool position of each group, plus a final `pool.len()`.
    group_start: Vec<usize>,
    /// `completions[g][r]`: distinct-attribute combinations of size `r`
    /// drawn from groups `g..`.
    completions: Vec<Vec<u64>>,
}

impl Round {
    fn new(pool: Vec<Selector>, n_c: usize) -> Self {
        let mut group_of = Vec::with_capacity(pool.len());
        let mut group_start = Vec::new();
        for (p, s) in pool.iter().enumerate() {
            if p == 0 || pool[p - 1].attribute != s.attribute {
                group_start.push(p);
            }
            group_of.push(group_start.len() - 1);
        }
        let groups = group_start.len();
        group_start.push(pool.len());

        let mut completions = vec![vec![0u64; n_c + 1]; groups + 1];
        completions[groups][0] = 1;
        for g in (0..groups).rev() {
            let size = (group_start[g + 1] - group_start[g]) as u64;
            for r in 0..=n_c {
                let skip = completions[g + 1][r];
                let take = if r > 0 { completions[g + 1][r - 1].saturating_mul(size) } else { 0 };
                completions[g][r] = skip.saturating_add(take);
            }
        }
        Round {
            pool,
            group_of,
            group_start,
            completions,
        }
    }
}

struct Engine<'a> {
    algorithm: Algorithm,
    train: &'a Dataset,
    index: SelectorIndex,
    class_rows: Vec<MatchSet>,
    unclassified: MatchSet,
    rules: Vec<Rule>,
    /// Rule positions keyed by the id of their smallest selector.
    rules_by_first: Vec<Vec<usize>>,
    selector_offsets: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn new(algorithm: Algorithm, train: &'a Dataset) -> Self {
        let n = train.len();
        let mut class_rows = vec![MatchSet::empty(n); train.schema().n_classes()];
        for (r, &c) in train.classes().iter().enumerate() {
            class_rows[c].insert(r);
        }
        let mut selector_offsets = Vec::with_capacity(train.n_attributes());
        let mut total = 0;
        for a in &train.schema().attributes {
            selector_offsets.push(total);
            total += a.values.len();
        }
        Engine {
            algorithm,
            train,
            index: SelectorIndex::new(train),
            class_rows,
            unclassified: MatchSet::full(n),
            rules: Vec::new(),
            rules_by_first: vec![Vec::new(); total],
            selector_offsets,
        }
    }

    fn run(mut self) -> (RuleSet, InductionTrace) {
        let n_a = self.train.n_attributes();
        let mut trace = InductionTrace::default();
        for n_c in 1..=n_a {
            if self.algorithm == Algorithm::Rules && self.unclassified.is_empty() {
                break;
            }
            let round = Round::new(selectors_present(self.train, &self.unclassified), n_c);
            let mut iteration = IterationTrace {
                n_c,
                ..IterationTrace::default()
            };
            let mut prefixes = vec![MatchSet::full(self.train.len()); n_c + 1];
            let mut chosen = Vec::with_capacity(n_c);
            let stopped = self.search(&round, n_c, 0, 0, &mut prefixes, &mut chosen, &mut iteration);
            iteration.remaining = self.unclassified.len();
            trace.iterations.push(iteration);
            if stopped {
                break;
            }
        }
        let rules = RuleSet::new(
            self.algorithm,
            n_a,
            self.rules,
            Some(self.train.modal_class()),
        );
        (rules, trace)
    }

    /// Visits candidates extending `chosen` with selectors from pool position
    /// `start` on. Returns true when RRULES has classified every row.
    #[allow(clippy::too_many_arguments)]
    fn search(
        &mut self,
        round: &Round,
        n_c: usize,
        depth: usize,
        start: usize,
        prefixes: &mut [MatchSet],
        chosen: &mut Vec<Selector>,
        trace: &mut IterationTrace,
    ) -> bool {
        let remaining = n_c - depth - 1;
        for p in start..round.pool.len() {
            let group = round.group_of[p];
            let leaves = round.completions[group + 1][remaining];
            if leaves == 0 {
                // later groups have even fewer completions
                break;
            }
            let selector = round.pool[p];
            {
                let (head, tail) = prefixes.split_at_mut(depth + 1);
                let rows = self.index.rows_of(selector).expect("selector from the training data");
                head[depth].intersection_into(rows, &mut tail[0]);
            }
            let matched = &prefixes[depth + 1];
            if matched.is_empty() {
                trace.generated += leaves;
                trace.discarded_empty += leaves;
                continue;
            }
            if remaining > 0
                && self.algorithm == Algorithm::Rrules
                && !matched.intersects(&self.unclassified)
            {
                trace.generated += leaves;
                trace.skipped += leaves;
                continue;
            }
            chosen.push(selector);
            let stop = if remaining == 0 {
                self.evaluate(chosen, &prefixes[depth + 1], n_c, trace)
            } else {
                let next = round.group_start[group + 1];
                self.search(round, n_c, depth + 1, next, prefixes, chosen, trace)
            };
            chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }

    /// Applies the candidate-loop body to one full condition with a
    /// non-empty training match set.
    fn evaluate(
        &mut self,
        selectors: &[Selector],
        matched: &MatchSet,
        n_c: usize,
        trace: &mut IterationTrace,
    ) -> bool {
        trace.generated += 1;
        if self.algorithm == Algorithm::Rrules && !matched.intersects(&self.unclassified) {
            trace.discarded_irrelevant += 1;
            return false;
        }
        let first = matched.first().expect("non-empty match set");
        let class = self.train.class_of(first);
        let pure = matched.is_subset(&self.class_rows[class]);

        if pure {
            if self.algorithm == Algorithm::Rules && self.subsumed(selectors) {
                trace.discarded_irrelevant += 1;
                return false;
            }
            self.add_rule(selectors, class, n_c, false);
        } else if n_c == self.train.n_attributes() {
            let counts: Vec<usize> = self
                .class_rows
                .iter()
                .map(|rows| matched.intersection_len(rows))
                .collect();
            self.add_rule(selectors, modal_index(&counts), n_c, true);
        } else {
            trace.impure += 1;
            return false;
        }
        trace.rules_created += 1;
        // RULES removes the training matches, RRULES the unclassified ones;
        // on N the two differences coincide.
        self.unclassified.difference_with(matched);
        self.algorithm == Algorithm::Rrules && self.unclassified.is_empty()
    }

    fn selector_id(&self, s: Selector) -> usize {
        self.selector_offsets[s.attribute] + s.value
    }

    /// [`is_irrelevant`] restricted to rules whose smallest selector occurs
    /// in `selectors`, which are the only possible subsets.
    fn subsumed(&self, selectors: &[Selector]) -> bool {
        selectors.iter().any(|&s| {
            self.rules_by_first[self.selector_id(s)]
                .iter()
                .any(|&k| is_sorted_subset(self.rules[k].antecedent.selectors(), selectors))
        })
    }

    fn add_rule(&mut self, selectors: &[Selector], consequent: usize, n_c: usize, from_inconsistency: bool) {
        let order = self.rules.len();
        let id = self.selector_id(selectors[0]);
        self.rules_by_first[id].push(order);
        self.rules.push(Rule {
            antecedent: Condition::from_sorted(selectors.to_vec()),
            consequent,
            order,
            n_c,
            from_inconsistency,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// A rule not created for an inconsistency matches a row of another class.
    Impure { rule: usize, row: usize },
    /// No rule matches the training row.
    Uncovered { row: usize },
    /// Replaying creation order, the rule matched no still-unclassified row.
    NoNewRows { rule: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Impure { rule, row } => write!(f, "rule {rule} is impure on training row {row}"),
            Violation::Uncovered { row } => write!(f, "training row {row} is not covered by any rule"),
            Violation::NoNewRows { rule } => {
                write!(f, "rule {rule} classified no previously unclassified row")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub algorithm: Algorithm,
    pub rules_checked: usize,
    pub rows_checked: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a rule set against the data it was induced from: purity of every
/// non-inconsistency rule, coverage of every row and, for RRULES, that each
/// rule classified at least one new row when it was created.
pub fn verify_ruleset(rs: &RuleSet, train: &Dataset) -> VerificationReport {
    let n = train.len();
    let index = SelectorIndex::new(train);
    let all = MatchSet::full(n);
    let mut violations = Vec::new();
    let mut covered = MatchSet::empty(n);
    let mut unclassified = MatchSet::full(n);

    for rule in rs.rules() {
        let matched = index.matches(&rule.antecedent, &all);
        if !rule.from_inconsistency {
            violations.extend(
                matched
                    .iter()
                    .filter(|&r| train.class_of(r) != rule.consequent)
                    .map(|row| Violation::Impure {
                        rule: rule.order,
                        row,
                    }),
            );
        }
        if rs.algorithm() == Algorithm::Rrules && !matched.intersects(&unclassified) {
            violations.push(Violation::NoNewRows { rule: rule.order });
        }
        unclassified.difference_with(&matched);
        covered.union_with(&matched);
    }
    violations.extend(
        (0..n)
            .filter(|&r| !covered.contains(r))
            .map(|row| Violation::Uncovered { row }),
    );
    VerificationReport {
        algorithm: rs.algorithm(),
        rules_checked: rs.len(),
        rows_checked: n,
        violations,
    }
}
