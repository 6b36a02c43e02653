//! Mines class association rules from a synthetic dataset and prints them
//! with their rates and relative risk.

use rare_rules::dataset::{AttributeSchema, Item, Itemset};
use rare_rules::mining::{mine, MiningParams};
use rare_rules::stats::metrics;
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

fn main() -> rare_rules::Result<()> {
    let schema = AttributeSchema::from_pairs([
        ("smoker", vec!["no", "yes"]),
        ("exercise", vec!["low", "mid", "high"]),
        ("diet", vec!["poor", "fair", "good"]),
    ])?;
    let planted = vec![PlantedPattern {
        itemset: Itemset::new(vec![Item::new(0, 1), Item::new(1, 0)])?,
        target_rr: 6.0,
    }];
    let (ts, _) = generate(&PlantSpec::new(schema, 20_000, 0.03, planted, 1))?;

    let params = MiningParams {
        min_local_support: 0.10,
        min_conf_ratio: 1.5,
        max_length: 3,
        ..MiningParams::default()
    };
    let rules = mine(&ts, &params)?;
    println!("{} rules over {} transactions ({} positive)", rules.len(), ts.n(), ts.n_pos());
    println!("{:<36} {:>6} {:>6} {:>7} {:>7}", "antecedent", "supp", "conf", "tpr", "RR");
    for r in &rules.rules {
        let m = metrics(r, ts.n_pos(), ts.n_neg())?;
        println!(
            "{:<36} {:>6} {:>6} {:>7.3} {:>7}",
            ts.schema().describe(&r.antecedent),
            r.supp_count,
            r.conf_count,
            m.tpr,
            format!("{:.2}", m.relative_risk)
        );
    }
    Ok(())
}
