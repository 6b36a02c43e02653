//! Renders a trained classifier as a Graphviz tree of its patterns.
//!
//! Pipe the output through `dot -Tpng` to draw it.

use rare_rules::classifier::{train, SelectionPolicy};
use rare_rules::dataset::{split, AttributeSchema, Item, Itemset, SplitSpec};
use rare_rules::mining::MiningParams;
use rare_rules::report::{export_tree, PatternTree};
use rare_rules::synth::{generate, PlantSpec, PlantedPattern};

fn main() -> rare_rules::Result<()> {
    let schema = AttributeSchema::from_pairs([
        ("anaemia", vec!["no", "yes"]),
        ("previa", vec!["no", "yes"]),
        ("plurality", vec!["single", "twins"]),
        ("tobacco", vec!["no", "yes"]),
    ])?;
    let planted = vec![
        PlantedPattern { itemset: Itemset::single(Item::new(2, 1)), target_rr: 8.0 },
        PlantedPattern {
            itemset: Itemset::new(vec![Item::new(0, 1), Item::new(1, 1)])?,
            target_rr: 15.0,
        },
    ];
    let mut spec = PlantSpec::new(schema, 40_000, 0.02, planted, 9);
    spec.marginals = vec![vec![0.85, 0.15], vec![0.85, 0.15], vec![0.97, 0.03], vec![0.8, 0.2]];
    let (data, _) = generate(&spec)?;
    let (tr, va, _) = split(&data, &SplitSpec::default())?;

    let model = train(&tr, &va, &MiningParams::default(), SelectionPolicy::Coverage)?;
    let tree = PatternTree::build(&model.classifier)?;
    eprintln!("{} nodes", tree.nodes.len());
    print!("{}", export_tree(&model.classifier)?);
    Ok(())
}
