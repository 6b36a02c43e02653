//! Designs and draws a dataset with planted risk patterns, then compares
//! the target relative risks with the realized ones.

use rare_rules::dataset::{AttributeSchema, Item, Itemset};
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

fn main() -> rare_rules::Result<()> {
    let schema = AttributeSchema::from_pairs(
        (1..=6).map(|i| (format!("x{i}"), vec!["0", "1", "2"])),
    )?;
    let planted = vec![
        PlantedPattern { itemset: Itemset::single(Item::new(0, 2)), target_rr: 3.0 },
        PlantedPattern {
            itemset: Itemset::new(vec![Item::new(1, 1), Item::new(2, 0)])?,
            target_rr: 8.0,
        },
    ];
    let spec = PlantSpec::new(schema, 100_000, 0.02, planted, 42);

    let design = spec.design()?;
    println!("population positive rate {:.4}", design.positive_rate);
    for (rate, p) in design.elevated_rates.iter().zip(&design.match_probability) {
        println!("  elevated rate {rate:.4} on {:.1}% of records", 100.0 * p);
    }

    let (ts, truth) = generate(&spec)?;
    println!("{} records, {} positive", ts.n(), truth.n_pos);
    for p in &truth.patterns {
        let realized = p.realized_rr.map_or("undefined".into(), |rr| format!("{rr:.2}"));
        println!(
            "  {:<12} target {:>5.2} realized {realized} (supp {}, conf {})",
            spec.schema.describe(&p.itemset),
            p.target_rr,
            p.supp_count,
            p.conf_count
        );
    }
    truth.write_json(std::io::stdout().lock(), &spec.schema)
}
