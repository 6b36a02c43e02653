//! Trains a risk-pattern classifier on synthetic data and evaluates it on a
//! held-out test set.

use rare_rules::classifier::{evaluate, train, SelectionPolicy};
use rare_rules::dataset::{split, AttributeSchema, Item, Itemset, SplitSpec};
use rare_rules::mining::MiningParams;
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

fn main() -> rare_rules::Result<()> {
    let schema = AttributeSchema::from_pairs(
        ["sex", "region", "income", "smoker", "alcohol"].map(|a| (a, vec!["0", "1", "2"])),
    )?;
    let planted = vec![
        PlantedPattern { itemset: Itemset::single(Item::new(3, 2)), target_rr: 5.0 },
        PlantedPattern {
            itemset: Itemset::new(vec![Item::new(1, 0), Item::new(4, 2)])?,
            target_rr: 10.0,
        },
    ];
    let mut spec = PlantSpec::new(schema, 40_000, 0.02, planted, 5);
    spec.marginals[3] = vec![0.9, 0.07, 0.03];
    spec.marginals[4] = vec![0.6, 0.3, 0.1];
    let (data, _) = generate(&spec)?;
    let (tr, va, te) = split(&data, &SplitSpec::default())?;

    let params = MiningParams { min_conf_ratio: 3.0, ..MiningParams::default() };
    let model = train(&tr, &va, &params, SelectionPolicy::Coverage)?;
    println!(
        "{} rules mined, {} kept after pruning, {} selected",
        model.rules.len(),
        model.family.len(),
        model.classifier.len()
    );
    for p in &model.classifier.patterns {
        println!("  {}  RR={:.2}", data.schema().describe(&p.itemset), p.validated_rr);
    }

    let (cm, point) = evaluate(&model.classifier, &te)?;
    println!("tp={} fn={} fp={} tn={}", cm.tp, cm.fn_, cm.fp, cm.tn);
    println!(
        "sensitivity={:.3} specificity={:.3} error={:.3}",
        point.sensitivity, point.specificity, point.global_error
    );
    Ok(())
}
