//! First-stage pruning on data with nested planted patterns. Supersets that
//! only add a near-constant item tie their sub-pattern and are discarded.

use rare_rules::dataset::{split, AttributeSchema, Item, Itemset, SplitSpec};
use rare_rules::mining::{mine, MiningParams};
use rare_rules::pruning::stage1;
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

fn main() -> rare_rules::Result<()> {
    let schema = AttributeSchema::from_pairs([
        ("a", vec!["0", "1"]),
        ("b", vec!["0", "1"]),
        ("c", vec!["0", "1"]),
    ])?;
    let (a1, b1) = (Item::new(0, 1), Item::new(1, 1));
    let planted = vec![
        PlantedPattern { itemset: Itemset::single(a1), target_rr: 4.0 },
        PlantedPattern { itemset: Itemset::new(vec![a1, b1])?, target_rr: 12.0 },
    ];
    let mut spec = PlantSpec::new(schema, 20_000, 0.02, planted, 0);
    spec.marginals = vec![vec![0.8, 0.2], vec![0.7, 0.3], vec![1.0 - 1e-12, 1e-12]];
    let (data, _) = generate(&spec)?;
    let (train, _, _) = split(&data, &SplitSpec::default())?;

    let params = MiningParams { min_conf_ratio: 2.0, ..MiningParams::default() };
    let rules = mine(&train, &params)?;
    let family = stage1(&rules, &train, &params)?;
    let schema = train.schema();

    println!("mined:");
    for r in &rules.rules {
        println!("  {}", schema.describe(&r.antecedent));
    }
    println!("kept:");
    for r in &family.rules {
        println!("  {}  RR={:.2}", schema.describe(&r.rule.antecedent), r.metrics.relative_risk);
    }
    println!("discarded:");
    for e in &family.audit {
        println!(
            "  {} ({:?} against {}, counts {} vs {})",
            schema.describe(&e.discarded),
            e.test,
            schema.describe(&e.witness),
            e.count_sub,
            e.count_sup
        );
    }
    Ok(())
}
