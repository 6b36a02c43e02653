//! Property tests over randomly generated datasets.

mod common;

use proptest::prelude::*;
use proptest::test_runner::Config;

use rare_rules::classifier::{
    evaluate, nondominated, roc_select, select_representatives, train, Classifier, Pattern,
    PerformancePoint, Provenance, RocPolicy, SelectionPolicy,
};
use rare_rules::dataset::{
    split_indices, AttributeSchema, IngestOptions, Item, Itemset, RawTable, SplitSpec,
    TransactionSet,
};
use rare_rules::mining::{count_pass, mine, MiningParams};
use rare_rules::pruning::{prune_redundant, prune_weak, stage1, threshold_risk_patterns};
use rare_rules::report::{export_tree, PatternTree};
use rare_rules::stats::{count_test, metrics, RelativeRisk};
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

use common::*;

/// Random encoded data with at least three labels of each kind, so every
/// stratified split is possible.
fn arb_data(max_attrs: usize, max_rows: usize) -> impl Strategy<Value = TransactionSet> {
    (prop::collection::vec(2usize..=3, 1..=max_attrs), 12usize..=max_rows)
        .prop_flat_map(|(levels, n)| {
            let rec = levels.iter().map(|&l| 0..l as u32).collect::<Vec<_>>();
            (
                Just(levels),
                prop::collection::vec(rec, n),
                prop::collection::vec(prop::bool::weighted(0.3), n),
            )
        })
        .prop_map(|(levels, records, mut labels)| {
            let schema = AttributeSchema::from_pairs(levels.iter().enumerate().map(|(a, &l)| {
                (format!("f{a}"), (0..l).map(|v| format!("v{v}")).collect::<Vec<_>>())
            }))
            .unwrap();
            for (i, l) in labels.iter_mut().take(6).enumerate() {
                *l = i < 3;
            }
            TransactionSet::from_records(schema, &records, &labels).unwrap()
        })
}

fn arb_params(max_length: usize) -> impl Strategy<Value = MiningParams> {
    (0.02f64..0.5, 1.0f64..2.0, 1..=max_length, 1.05f64..3.0, 1u64..4).prop_map(
        |(ls, ratio, len, tau, k)| MiningParams {
            min_local_support: ls,
            min_conf_ratio: ratio,
            max_length: len,
            rr_threshold: tau,
            test_margin: k,
        },
    )
}

fn data_and_params() -> impl Strategy<Value = (TransactionSet, MiningParams)> {
    arb_data(5, 150).prop_flat_map(|ts| {
        let m = ts.schema().len();
        (Just(ts), arb_params(m))
    })
}

fn arb_itemset(ts: &TransactionSet) -> impl Strategy<Value = Itemset> {
    let levels: Vec<usize> = ts.schema().attributes().iter().map(|a| a.level_count()).collect();
    let per_attr: Vec<_> = levels
        .into_iter()
        .map(|l| prop::option::of(0..l))
        .collect();
    per_attr.prop_filter_map("empty itemset", |choice| {
        let items: Vec<Item> = choice
            .iter()
            .enumerate()
            .filter_map(|(a, l)| l.map(|l| Item::new(a, l)))
            .collect();
        Itemset::new(items).ok()
    })
}

type NamedRule = (Vec<(String, String)>, u64, u64);

/// Rules as name pairs, order-independent.
fn named_rules(ts: &TransactionSet, params: &MiningParams) -> Vec<NamedRule> {
    let mut out: Vec<_> = mine(ts, params)
        .unwrap()
        .rules
        .iter()
        .map(|r| {
            let mut names = ts.schema().itemset_names(&r.antecedent);
            names.sort();
            (names, r.supp_count, r.conf_count)
        })
        .collect();
    out.sort();
    out
}

fn permute_rows(ts: &TransactionSet, perm: &[usize]) -> TransactionSet {
    let records: Vec<Vec<u32>> = perm.iter().map(|&r| ts.record(r).to_vec()).collect();
    let labels: Vec<bool> = perm.iter().map(|&r| ts.label(r)).collect();
    TransactionSet::from_records(ts.schema().clone(), &records, &labels).unwrap()
}

fn reverse_columns(ts: &TransactionSet) -> TransactionSet {
    let attrs: Vec<_> = ts.schema().attributes().iter().rev().cloned().collect();
    let schema = AttributeSchema::new(attrs).unwrap();
    let records: Vec<Vec<u32>> = ts
        .records()
        .map(|r| r.iter().rev().copied().collect())
        .collect();
    let labels: Vec<bool> = (0..ts.n()).map(|r| ts.label(r)).collect();
    TransactionSet::from_records(schema, &records, &labels).unwrap()
}

fn pattern(itemset: Itemset) -> Pattern {
    Pattern {
        itemset,
        validated_rr: RelativeRisk::new(2.0),
        supp_count: 1,
        conf_count: 1,
    }
}

fn classifier(schema: &AttributeSchema, sets: Vec<Itemset>) -> Classifier {
    Classifier {
        schema: schema.clone(),
        patterns: sets.into_iter().map(pattern).collect(),
        params: MiningParams::default(),
        provenance: Provenance::default(),
    }
}

fn arb_point() -> impl Strategy<Value = PerformancePoint> {
    (0u32..=20, 0u32..=20, 0.0f64..1.0).prop_map(|(s, p, e)| {
        PerformancePoint::new("", f64::from(s) / 20.0, f64::from(p) / 20.0, e)
    })
}

proptest! {
    #![proptest_config(Config { cases: 64, ..Config::default() })]

    #[test]
    fn split_is_a_partition(
        ts in arb_data(3, 120),
        seed in any::<u64>(),
        stratified in any::<bool>(),
        a in 1u32..8,
        b in 1u32..8,
        c in 1u32..8,
    ) {
        let total = f64::from(a + b + c);
        let spec = SplitSpec::new(
            [f64::from(a) / total, f64::from(b) / total, 1.0 - f64::from(a + b) / total],
            seed,
            stratified,
        ).unwrap();
        let parts = split_indices(&ts, &spec).unwrap();
        let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..ts.n()).collect::<Vec<_>>());
        prop_assert_eq!(split_indices(&ts, &spec).unwrap(), parts);
    }

    #[test]
    fn csv_round_trip_decodes_identically(ts in arb_data(4, 60)) {
        let mut buf = Vec::new();
        ts.write_csv(&mut buf, "y", "yes", "no").unwrap();
        let raw = RawTable::read(buf.as_slice()).unwrap();
        let back = raw.encode(ts.schema(), "y", "yes", &IngestOptions::default()).unwrap();
        prop_assert_eq!(back.decode(), ts.decode());
        prop_assert_eq!(back.labels(), ts.labels());
        prop_assert_eq!(back.fingerprint(), ts.fingerprint());
    }

    #[test]
    fn one_item_bit_per_attribute(ts in arb_data(5, 80)) {
        let items: Vec<Item> = ts.schema().items().collect();
        for row in 0..ts.n() {
            let set = items.iter().filter(|&&it| ts.item_column(it).get(row)).count();
            prop_assert_eq!(set, ts.schema().len());
        }
        prop_assert_eq!(ts.n_pos() + ts.n_neg(), ts.n() as u64);
    }

    #[test]
    fn counts_shrink_along_inclusion(
        (ts, sup) in arb_data(5, 150).prop_flat_map(|ts| {
            let s = arb_itemset(&ts);
            (Just(ts), s)
        }),
        keep in any::<u64>(),
    ) {
        let items: Vec<Item> = sup.iter().copied().enumerate()
            .filter(|(i, _)| keep >> (i % 64) & 1 == 1)
            .map(|(_, it)| it)
            .collect();
        prop_assume!(!items.is_empty());
        let sub = Itemset::new(items).unwrap();
        let counted = count_pass(&ts, &[sub, sup]);
        let (u, v) = (&counted[0], &counted[1]);
        prop_assert!(v.supp_count <= u.supp_count);
        prop_assert!(v.conf_count <= u.conf_count);
        prop_assert!(v.neg_count() <= u.neg_count());
        let (mu, mv) = (
            metrics(u, ts.n_pos(), ts.n_neg()).unwrap(),
            metrics(v, ts.n_pos(), ts.n_neg()).unwrap(),
        );
        prop_assert!(mv.tpr <= mu.tpr);
        prop_assert!(mu.tnr <= mv.tnr);
        for m in [mu, mv] {
            prop_assert_eq!(m.tpr + m.fnr, 1.0);
            prop_assert_eq!(m.tnr + m.fpr, 1.0);
            prop_assert_eq!(m.local_support, m.tpr);
        }
    }

    #[test]
    fn mining_ignores_row_and_column_order(
        (ts, params) in data_and_params(),
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..ts.n()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        let want = named_rules(&ts, &params);
        prop_assert_eq!(&named_rules(&permute_rows(&ts, &perm), &params), &want);
        prop_assert_eq!(&named_rules(&reverse_columns(&ts), &params), &want);
    }

    #[test]
    fn sub_antecedents_meet_local_support((ts, params) in data_and_params()) {
        let rules = mine(&ts, &params).unwrap();
        let all = all_itemset_counts(&ts);
        for r in &rules.rules {
            prop_assert!(params.meets_local_support(r.conf_count, ts.n_pos()));
            prop_assert!(params.meets_confidence(r.supp_count, r.conf_count, ts.n_pos(), ts.n() as u64));
            for sub in r.antecedent.drop_one().filter(|s| !s.is_empty()) {
                let (_, conf) = all[&sub];
                prop_assert!(params.meets_local_support(conf, ts.n_pos()), "{} under {}", sub, r.antecedent);
            }
        }
        let distinct: std::collections::HashSet<_> = rules.rules.iter().map(|r| &r.antecedent).collect();
        prop_assert_eq!(distinct.len(), rules.len());
    }

    #[test]
    fn count_test_rejects_iff_margin_reached(large in 0u64..1000, extra in 0u64..30, k in 1u64..=10) {
        let d = count_test(large + extra, large, k).unwrap();
        prop_assert_eq!(d.reject, extra >= k);
        prop_assert_eq!(d.diff_count, extra);
        prop_assert!(!count_test(large, large, k).unwrap().reject);
    }

    #[test]
    fn infinite_risk_sorts_above_finite(x in 0.0f64..1e300, y in 0.0f64..1e300) {
        let (a, b) = (RelativeRisk::new(x), RelativeRisk::new(y));
        prop_assert!(RelativeRisk::INFINITE > a);
        prop_assert!(RelativeRisk::INFINITE.exceeds(x));
        prop_assert_eq!(a.cmp(&b), x.total_cmp(&y));
        let json = serde_json::to_string(&RelativeRisk::INFINITE).unwrap();
        prop_assert_eq!(serde_json::from_str::<RelativeRisk>(&json).unwrap(), RelativeRisk::INFINITE);
    }

    #[test]
    fn pruning_respects_length_bounds_and_is_idempotent((ts, params) in data_and_params()) {
        let rules = mine(&ts, &params).unwrap();
        let risky = threshold_risk_patterns(&rules, &ts, params.rr_threshold);
        let max_len = risky.rules.iter().map(|r| r.len()).max().unwrap_or(0);
        let redundant = prune_redundant(&risky, &ts, params.test_margin);
        prop_assert!(redundant.audit.iter().all(|e| e.discarded.len() >= 2));
        let weak = prune_weak(&redundant.rules, &ts, params.test_margin);
        prop_assert!(weak.audit.iter().all(|e| e.discarded.len() < max_len));

        let family = stage1(&rules, &ts, &params).unwrap();
        prop_assert_eq!(family.rules.iter().map(|r| &r.rule).collect::<Vec<_>>(), weak.rules.rules.iter().collect::<Vec<_>>());
        for r in &family.rules {
            prop_assert!(r.metrics.relative_risk.exceeds(params.rr_threshold));
        }
        for e in &family.audit {
            prop_assert!(e.sub_pattern().is_proper_subset_of(e.sup_pattern()));
            prop_assert!(e.diff_count < e.k);
            prop_assert_eq!(e.count_sub - e.count_sup, e.diff_count);
        }
        let again = stage1(&family.to_rule_set(), &ts, &params).unwrap();
        prop_assert_eq!(&again.rules, &family.rules);
        prop_assert!(again.audit.is_empty());
    }

    #[test]
    fn adding_patterns_never_retracts_a_prediction(
        (ts, sets) in arb_data(4, 60).prop_flat_map(|ts| {
            let sets = prop::collection::vec(arb_itemset(&ts), 0..6);
            (Just(ts), sets)
        }),
        cut in 0usize..6,
    ) {
        let small = classifier(ts.schema(), sets[..cut.min(sets.len())].to_vec());
        let large = classifier(ts.schema(), sets.clone());
        for rec in ts.records() {
            if small.predict(rec).unwrap() {
                prop_assert!(large.predict(rec).unwrap());
            }
        }
        let (cm, point) = evaluate(&large, &ts).unwrap();
        prop_assert_eq!(cm.total(), ts.n() as u64);
        prop_assert_eq!(cm.tp + cm.fn_, ts.n_pos());
        prop_assert_eq!(cm.fp + cm.tn, ts.n_neg());
        prop_assert_eq!(point.global_error, (cm.fp + cm.fn_) as f64 / cm.total() as f64);
    }

    #[test]
    fn roc_choice_is_never_dominated(points in prop::collection::vec(arb_point(), 1..25)) {
        for policy in [RocPolicy::MaxMin, RocPolicy::Youden, RocPolicy::NearestCorner] {
            let (idx, p) = roc_select(&points, policy).unwrap();
            prop_assert!(!points.iter().any(|q| q.dominates(p)));
            prop_assert!(nondominated(&points).contains(&idx));
        }
    }

    #[test]
    fn selected_patterns_match_positive_records(
        (ts, params) in data_and_params(),
        seed in any::<u64>(),
        per_record in any::<bool>(),
    ) {
        let parts = split_indices(&ts, &SplitSpec { seed, ..SplitSpec::default() }).unwrap();
        let (tr, va) = (ts.subset(&parts[0]), ts.subset(&parts[1]));
        prop_assume!(tr.n_pos() > 0 && tr.n_neg() > 0 && va.n_pos() > 0);
        let policy = if per_record { SelectionPolicy::PerRecord } else { SelectionPolicy::Coverage };
        let params = MiningParams { max_length: params.max_length.min(tr.schema().len()), ..params };
        let family = stage1(&mine(&tr, &params).unwrap(), &tr, &params).unwrap();
        let c = select_representatives(&family, &va, policy).unwrap();
        let mut seen = std::collections::HashSet::new();
        for p in &c.patterns {
            prop_assert!(seen.insert(&p.itemset), "duplicate {}", p.itemset);
            prop_assert!(va.positive_rows().any(|r| p.itemset.matches(va.record(r))));
            let (supp, conf) = {
                let cover = va.cover(&p.itemset);
                (cover.count_ones(), cover.and_count(va.labels()))
            };
            prop_assert_eq!((p.supp_count, p.conf_count), (supp, conf));
        }
    }

    #[test]
    fn training_is_deterministic((ts, params) in data_and_params(), seed in any::<u64>()) {
        let parts = split_indices(&ts, &SplitSpec { seed, ..SplitSpec::default() }).unwrap();
        let (tr, va) = (ts.subset(&parts[0]), ts.subset(&parts[1]));
        prop_assume!(tr.n_pos() > 0 && tr.n_neg() > 0 && va.n_pos() > 0);
        let a = train(&tr, &va, &params, SelectionPolicy::Coverage);
        let b = train(&tr, &va, &params, SelectionPolicy::Coverage);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.classifier.to_json().unwrap(), b.classifier.to_json().unwrap()),
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false, "runs disagree on success"),
        }
    }

    #[test]
    fn tree_is_a_bijective_prefix_tree(
        (ts, sets) in arb_data(5, 30).prop_flat_map(|ts| {
            let sets = prop::collection::vec(arb_itemset(&ts), 1..8);
            (Just(ts), sets)
        }),
    ) {
        let mut unique = Vec::new();
        for s in sets {
            if !unique.contains(&s) {
                unique.push(s);
            }
        }
        let c = classifier(ts.schema(), unique);
        let tree = PatternTree::build(&c).unwrap();
        let total: usize = c.itemsets().map(Itemset::len).sum();
        prop_assert!(tree.nodes.len() <= 1 + total);
        let dot = parse_dot(&export_tree(&c).unwrap()).unwrap();
        let (root, paths) = dot_pattern_paths(&dot).unwrap();
        prop_assert_eq!(root, "Total Population");
        let mut got: Vec<Vec<String>> = paths.into_iter().map(|mut p| { p.sort(); p }).collect();
        got.sort();
        let mut want: Vec<Vec<String>> = c
            .itemsets()
            .map(|s| {
                let mut v: Vec<String> = c.schema.itemset_names(s).into_iter().map(|(a, l)| format!("{a}={l}")).collect();
                v.sort();
                v
            })
            .collect();
        want.sort();
        prop_assert_eq!(got, want);
    }
}

proptest! {
    #![proptest_config(Config { cases: 16, ..Config::default() })]

    #[test]
    fn ground_truth_agrees_with_stats(
        seed in any::<u64>(),
        n in 500usize..3000,
        rr in 1.5f64..5.0,
        level in 0usize..3,
    ) {
        let schema = AttributeSchema::from_pairs(
            (0..4).map(|a| (format!("g{a}"), vec!["x", "y", "z"])),
        )
        .unwrap();
        let planted = vec![
            PlantedPattern {
                itemset: Itemset::new(vec![Item::new(0, level), Item::new(1, 0)]).unwrap(),
                target_rr: rr,
            },
            PlantedPattern {
                itemset: Itemset::new(vec![Item::new(0, (level + 1) % 3), Item::new(2, 2)]).unwrap(),
                target_rr: rr + 1.0,
            },
        ];
        let spec = PlantSpec::new(schema, n, 0.02, planted, seed);
        let (ts, truth) = generate(&spec).unwrap();
        prop_assert_eq!(truth.n_pos, ts.n_pos());
        let itemsets: Vec<Itemset> = truth.patterns.iter().map(|p| p.itemset.clone()).collect();
        for (rule, p) in count_pass(&ts, &itemsets).iter().zip(&truth.patterns) {
            prop_assert_eq!((rule.supp_count, rule.conf_count), (p.supp_count, p.conf_count));
            let stats_rr = metrics(rule, ts.n_pos(), ts.n_neg()).ok().map(|m| m.relative_risk);
            prop_assert_eq!(stats_rr, p.realized_rr);
        }
    }
}
