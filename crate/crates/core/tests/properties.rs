mod common;

use common::{naive_induce, summary, table};
use proptest::prelude::*;
use rrules::conditions::{enumerate_conditions, match_condition, selectors_present};
use rrules::dataset::{shuffled_order, split, EqualWidthBins, SplitSpec};
use rrules::induction::is_irrelevant;
use rrules::metrics::overall_coverage;
use rrules::{induce, induce_rrules, induce_rules, verify_ruleset, Algorithm, Condition, MatchSet, Selector, SelectorIndex};

fn oracle_config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

proptest! {
    #![proptest_config(oracle_config())]

    #[test]
    fn pure_rules_are_pure(t in table(1..=30, 1..=5, 3, 3)) {
        let d = t.dataset();
        for algorithm in Algorithm::ALL {
            let (rs, _) = induce(algorithm, &d);
            for rule in rs.rules().iter().filter(|r| !r.from_inconsistency) {
                for (row, &class) in d.rows().iter().zip(d.classes()) {
                    if rule.antecedent.matches(row) {
                        prop_assert_eq!(class, rule.consequent, "{} rule {}", algorithm, rule.order);
                    }
                }
            }
        }
    }

    #[test]
    fn every_training_row_is_covered(t in table(1..=30, 1..=5, 3, 3)) {
        let d = t.dataset();
        for algorithm in Algorithm::ALL {
            let (rs, _) = induce(algorithm, &d);
            for (i, row) in d.rows().iter().enumerate() {
                prop_assert!(rs.rules().iter().any(|r| r.antecedent.matches(row)), "{} row {}", algorithm, i);
            }
            prop_assert!(verify_ruleset(&rs, &d).passed());
        }
    }

    #[test]
    fn reduced_variant_is_never_larger(t in table(1..=30, 1..=5, 3, 3)) {
        let d = t.dataset();
        let (rules, _) = induce_rules(&d);
        let (rrules, _) = induce_rrules(&d);
        prop_assert!(rrules.len() <= rules.len(), "{} > {}", rrules.len(), rules.len());
        prop_assert!(overall_coverage(&rrules, &d) <= overall_coverage(&rules, &d) + 1e-12);
    }

    #[test]
    fn engines_match_naive_executor(t in table(1..=8, 1..=4, 3, 3)) {
        let d = t.dataset();
        for (algorithm, reduced) in [(Algorithm::Rules, false), (Algorithm::Rrules, true)] {
            let (rs, trace) = induce(algorithm, &d);
            let (expected, rounds) = naive_induce(&d, reduced);
            prop_assert_eq!(summary(&rs), expected, "{}", algorithm);
            prop_assert_eq!(trace.iterations.len(), rounds.len());
            for (it, round) in trace.iterations.iter().zip(&rounds) {
                prop_assert_eq!(it.generated, round.generated);
                prop_assert_eq!(it.impure, round.impure);
                prop_assert_eq!(it.rules_created, round.created);
                prop_assert_eq!(it.remaining, round.remaining);
                if reduced {
                    // pruned prefixes hide whether a leaf was empty or irrelevant
                    prop_assert_eq!(
                        it.discarded_empty + it.discarded_irrelevant + it.skipped,
                        round.empty + round.irrelevant
                    );
                } else {
                    prop_assert_eq!(it.discarded_empty, round.empty);
                    prop_assert_eq!(it.discarded_irrelevant, round.irrelevant);
                    prop_assert_eq!(it.skipped, 0);
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_powerset(
        raw in proptest::collection::btree_set((0usize..5, 0usize..3), 0..=10),
        n_c in 0usize..=5,
    ) {
        let pool: Vec<Selector> = raw.iter().map(|&(a, v)| Selector::new(a, v)).collect();
        let mut expected: Vec<Vec<usize>> = (0u32..1 << pool.len())
            .filter(|m| m.count_ones() as usize == n_c)
            .map(|m| (0..pool.len()).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|pos| {
                let attrs: std::collections::BTreeSet<_> = pos.iter().map(|&i| pool[i].attribute).collect();
                attrs.len() == pos.len()
            })
            .collect();
        expected.sort();
        if n_c == 0 {
            expected.clear();
        }
        let got: Vec<Vec<usize>> = enumerate_conditions(&pool, n_c)
            .map(|c| c.selectors().iter().map(|s| pool.iter().position(|p| p == s).unwrap()).collect())
            .collect();
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #[test]
    fn index_agrees_with_row_scan(
        t in table(1..=40, 1..=5, 4, 2),
        picks in proptest::collection::vec((0usize..5, 0usize..4), 1..=3),
        within in proptest::collection::vec(any::<bool>(), 40),
    ) {
        let d = t.dataset();
        let mut selectors: Vec<Selector> = picks
            .iter()
            .filter(|(a, _)| *a < d.n_attributes())
            .map(|&(a, v)| Selector::new(a, v % d.schema().attributes[a].values.len()))
            .collect();
        selectors.sort();
        selectors.dedup_by_key(|s| s.attribute);
        prop_assume!(!selectors.is_empty());
        let cond = Condition::new(selectors.clone()).unwrap();
        let within = MatchSet::from_indices(d.len(), (0..d.len()).filter(|&i| within[i]));
        let index = SelectorIndex::new(&d);
        let scanned = match_condition(&cond, &d, &within);
        prop_assert_eq!(&index.matches(&cond, &within), &scanned);
        let naive: Vec<usize> = within.iter().filter(|&i| cond.matches(d.row(i))).collect();
        prop_assert_eq!(scanned.iter().collect::<Vec<_>>(), naive);

        // dropping a selector can only widen the match set
        if selectors.len() > 1 {
            let shorter = Condition::new(selectors[1..].to_vec()).unwrap();
            prop_assert!(scanned.is_subset(&match_condition(&shorter, &d, &within)));
        }
    }

    #[test]
    fn present_selectors_are_those_of_the_rows(t in table(1..=20, 1..=4, 3, 2), keep in proptest::collection::vec(any::<bool>(), 20)) {
        let d = t.dataset();
        let rows = MatchSet::from_indices(d.len(), (0..d.len()).filter(|&i| keep[i]));
        let mut expected: Vec<Selector> = rows
            .iter()
            .flat_map(|r| d.row(r).iter().enumerate().map(|(a, &v)| Selector::new(a, v)).collect::<Vec<_>>())
            .collect();
        expected.sort();
        expected.dedup();
        prop_assert_eq!(selectors_present(&d, &rows), expected);
    }

    #[test]
    fn irrelevance_is_a_subset_test(t in table(2..=30, 2..=5, 3, 3)) {
        let d = t.dataset();
        let (rs, _) = induce_rules(&d);
        let rules = rs.rules();
        for (k, rule) in rules.iter().enumerate() {
            let linear = rules[..k].iter().any(|r| r.antecedent.is_subset_of(&rule.antecedent));
            prop_assert_eq!(is_irrelevant(&rule.antecedent, &rules[..k]), linear);
            if !rule.from_inconsistency {
                prop_assert!(!linear, "rule {} is subsumed by an earlier rule", k);
            }
        }
    }

    #[test]
    fn prediction_is_first_match(t in table(2..=30, 1..=4, 3, 3), probe in proptest::collection::vec(0usize..3, 4)) {
        let d = t.dataset();
        for algorithm in Algorithm::ALL {
            let (rs, _) = induce(algorithm, &d);
            let example: Vec<usize> = (0..d.n_attributes())
                .map(|a| probe[a] % d.schema().attributes[a].values.len())
                .collect();
            let expected = rs
                .rules()
                .iter()
                .find(|r| r.antecedent.matches(&example))
                .map_or(rs.default_class().unwrap(), |r| r.consequent);
            prop_assert_eq!(rs.predict(&example).unwrap(), expected);
        }
    }

    #[test]
    fn split_partitions_rows(n in 2usize..300, f in 0.01f64..0.99, seed in any::<u64>()) {
        let t = common::Table { n_attributes: 1, rows: (0..n).map(|i| vec![(i % 7) as u8]).collect(), classes: vec![0; n] };
        let d = t.dataset();
        let n_test = (f * n as f64).round() as usize;
        let result = split(&d, &SplitSpec { test_fraction: f, seed });
        if n_test == 0 || n_test == n {
            prop_assert!(result.is_err());
        } else {
            let (train, test) = result.unwrap();
            prop_assert_eq!(test.len(), n_test);
            prop_assert_eq!(train.len() + test.len(), n);
            let order = shuffled_order(n, seed);
            let mut sorted = order.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            let mut test_rows = order[n - n_test..].to_vec();
            test_rows.sort_unstable();
            let tokens: Vec<&str> = test_rows.iter().map(|&i| d.token(i, 0)).collect();
            let got: Vec<&str> = (0..test.len()).map(|i| test.token(i, 0)).collect();
            prop_assert_eq!(got, tokens);
        }
    }

    #[test]
    fn shuffle_follows_splitmix_fisher_yates(n in 0usize..200, seed in any::<u64>()) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        let mut expected: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            expected.swap(i, j);
        }
        prop_assert_eq!(shuffled_order(n, seed), expected);
    }

    #[test]
    fn bins_are_ordered_and_bounded(lo in -1e6f64..1e6, span in 0f64..1e6, k in 1usize..20, xs in proptest::collection::vec(0f64..=1.0, 1..50)) {
        let hi = lo + span;
        let bins = EqualWidthBins::new(lo, hi, k).unwrap();
        prop_assert_eq!(bins.n_bins(), k);
        prop_assert_eq!(bins.bin(lo), 0);
        prop_assert_eq!(bins.bin(hi), k - 1);
        let mut values: Vec<f64> = xs.iter().map(|x| lo + x * span).collect();
        values.sort_by(f64::total_cmp);
        let assigned: Vec<usize> = values.iter().map(|&v| bins.bin(v)).collect();
        prop_assert!(assigned.iter().all(|&b| b < k));
        prop_assert!(assigned.windows(2).all(|w| w[0] <= w[1]));
        for (&v, &b) in values.iter().zip(&assigned) {
            prop_assert!(bins.edges[b] <= v || b == 0);
            prop_assert!(v < bins.edges[b + 1] || b == k - 1);
        }
    }
}
