#![allow(dead_code)]

use proptest::prelude::*;
use rrules::dataset::{load_csv, ClassColumn, Dataset};

/// Raw categorical table: per-row attribute codes plus a class code.
#[derive(Debug, Clone)]
pub struct Table {
    pub n_attributes: usize,
    pub rows: Vec<Vec<u8>>,
    pub classes: Vec<u8>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (row, class) in self.rows.iter().zip(&self.classes) {
            for (a, v) in row.iter().enumerate() {
                s.push_str(&format!("a{a}v{v},"));
            }
            s.push_str(&format!("k{class}\n"));
        }
        s
    }

    pub fn dataset(&self) -> Dataset {
        load_csv(self.to_csv().as_bytes(), false, &ClassColumn::Last).expect("generated table loads")
    }
}

pub fn table(
    rows: std::ops::RangeInclusive<usize>,
    attributes: std::ops::RangeInclusive<usize>,
    values: u8,
    classes: u8,
) -> impl Strategy<Value = Table> {
    (rows, attributes).prop_flat_map(move |(n, n_a)| {
        (
            proptest::collection::vec(proptest::collection::vec(0..values, n_a), n),
            proptest::collection::vec(0..classes, n),
        )
            .prop_map(move |(rows, classes)| Table {
                n_attributes: n_a,
                rows,
                classes,
            })
    })
}

pub type NaiveRule = (Vec<(usize, usize)>, usize);

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct NaiveRound {
    /// Candidates whose selectors have distinct attributes.
    pub generated: u64,
    pub empty: u64,
    pub irrelevant: u64,
    pub impure: u64,
    pub created: u64,
    pub remaining: usize,
}

fn matches(row: &[usize], cond: &[(usize, usize)]) -> bool {
    cond.iter().all(|&(a, v)| row[a] == v)
}

fn combinations(pool: &[(usize, usize)], k: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(pool: &[(usize, usize)], k: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            go(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, k, 0, &mut Vec::new(), &mut out);
    out
}

fn distinct_attributes(cond: &[(usize, usize)]) -> bool {
    cond.windows(2).all(|w| w[0].0 != w[1].0)
}

fn modal(classes: impl Iterator<Item = usize>, n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for c in classes {
        counts[c] += 1;
    }
    let best = *counts.iter().max().unwrap();
    counts.iter().position(|&c| c == best).unwrap()
}

/// Straight transcription of the RULES and RRULES pseudocode over sets of row
/// indices: every combination of present selectors is generated, including
/// ones repeating an attribute.
pub fn naive_induce(d: &Dataset, reduced: bool) -> (Vec<NaiveRule>, Vec<NaiveRound>) {
    let n_a = d.n_attributes();
    let n_classes = d.schema().n_classes();
    let rows = d.rows();
    let classes = d.classes();
    let mut unclassified: Vec<usize> = (0..d.len()).collect();
    let mut rules: Vec<NaiveRule> = Vec::new();
    let mut rounds = Vec::new();
    'outer: for n_c in 1..=n_a {
        if !reduced && unclassified.is_empty() {
            break;
        }
        let mut present: Vec<(usize, usize)> = unclassified
            .iter()
            .flat_map(|&r| rows[r].iter().copied().enumerate())
            .collect();
        present.sort();
        present.dedup();
        let mut round = NaiveRound::default();
        for cond in combinations(&present, n_c) {
            let counted = distinct_attributes(&cond);
            round.generated += u64::from(counted);
            let m_t: Vec<usize> = (0..rows.len()).filter(|&r| matches(&rows[r], &cond)).collect();
            if m_t.is_empty() {
                round.empty += u64::from(counted);
                continue;
            }
            let m_n: Vec<usize> = unclassified
                .iter()
                .copied()
                .filter(|&r| matches(&rows[r], &cond))
                .collect();
            if reduced && m_n.is_empty() {
                round.irrelevant += 1;
                continue;
            }
            let pure = m_t.iter().all(|&r| classes[r] == classes[m_t[0]]);
            let class = if pure {
                if !reduced
                    && rules
                        .iter()
                        .any(|(ante, _)| ante.iter().all(|s| cond.contains(s)))
                {
                    round.irrelevant += 1;
                    continue;
                }
                classes[m_t[0]]
            } else if n_c == n_a {
                modal(m_t.iter().map(|&r| classes[r]), n_classes)
            } else {
                round.impure += 1;
                continue;
            };
            rules.push((cond.clone(), class));
            round.created += 1;
            let removed = if reduced { &m_n } else { &m_t };
            unclassified.retain(|r| !removed.contains(r));
            if reduced && unclassified.is_empty() {
                round.remaining = 0;
                rounds.push(round);
                break 'outer;
            }
        }
        round.remaining = unclassified.len();
        rounds.push(round);
    }
    (rules, rounds)
}

pub fn summary(rs: &rrules::RuleSet) -> Vec<NaiveRule> {
    rs.rules()
        .iter()
        .map(|r| {
            (
                r.antecedent.selectors().iter().map(|s| (s.attribute, s.value)).collect(),
                r.consequent,
            )
        })
        .collect()
}
