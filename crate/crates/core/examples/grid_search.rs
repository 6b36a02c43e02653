//! Sweeps the standard parameter grid and picks an operating point on the
//! ROC frontier. Also replays selection over a saved table of points.

use rare_rules::classifier::{grid_search, roc_select, standard_grid, RocPolicy, SelectionPolicy};
use rare_rules::dataset::{split, AttributeSchema, Item, Itemset, SplitSpec};
use rare_rules::mining::MiningParams;
use rare_rules::report::{export_table, read_points};
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

const SAVED: &str = "\
label,sensitivity,specificity,classification_error
a,0.70,0.90,0.11
b,0.80,0.82,0.18
c,0.85,0.70,0.29
d,0.78,0.80,0.20
";

fn main() -> rare_rules::Result<()> {
    let schema = AttributeSchema::from_pairs((1..=6).map(|i| (format!("v{i}"), vec!["0", "1"])))?;
    let planted = vec![
        PlantedPattern { itemset: Itemset::single(Item::new(0, 1)), target_rr: 6.0 },
        PlantedPattern {
            itemset: Itemset::new(vec![Item::new(2, 1), Item::new(3, 1)])?,
            target_rr: 9.0,
        },
    ];
    let mut spec = PlantSpec::new(schema, 30_000, 0.02, planted, 3);
    spec.marginals[0] = vec![0.95, 0.05];
    let (data, _) = generate(&spec)?;
    let (tr, va, te) = split(&data, &SplitSpec::default())?;

    let grid = standard_grid(&MiningParams::default());
    let points: Vec<_> = grid_search(&tr, &va, &te, &grid, SelectionPolicy::Coverage)
        .into_iter()
        .collect::<rare_rules::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.point)
        .collect();
    print!("{}", export_table(&points));
    if let Some((i, p)) = roc_select(&points, RocPolicy::MaxMin) {
        println!("selected row {} (min rate {:.3})", i + 1, p.sensitivity.min(p.specificity));
    }

    let saved = read_points(SAVED.as_bytes())?;
    for policy in [RocPolicy::MaxMin, RocPolicy::Youden, RocPolicy::NearestCorner] {
        let (_, p) = roc_select(&saved, policy).expect("non-empty table");
        println!("{policy:?}: {}", p.label);
    }
    Ok(())
}
