//! Infers a schema from CSV text, encodes it and makes a stratified split.

use rare_rules::dataset::{split, IngestOptions, RawTable, SplitSpec};

const CSV: &str = "\
age,parity,hypertension,died
17-34,1-4,0,0
35+,5+,1,1
17-34,0,0,0
16-,0,0,0
35+,1-4,1,0
17-34,5+,0,1
35+,5+,0,0
17-34,1-4,1,1
16-,1-4,0,0
17-34,0,0,0
35+,1-4,0,1
17-34,1-4,0,0
";

fn main() -> rare_rules::Result<()> {
    let table = RawTable::read(CSV.as_bytes())?;
    let opts = IngestOptions::default();
    let schema = table.infer_schema("died", &opts)?;
    for attr in schema.attributes() {
        println!("{}: {:?}", attr.name, attr.levels);
    }

    let ts = table.encode(&schema, "died", "1", &opts)?;
    println!("{} rows, {} positive, {} items", ts.n(), ts.n_pos(), schema.item_count());

    let (train, validation, test) = split(&ts, &SplitSpec { seed: 7, ..SplitSpec::default() })?;
    for (name, part) in [("train", &train), ("validation", &validation), ("test", &test)] {
        println!("{name:>10}: {} rows, {} positive", part.n(), part.n_pos());
    }
    Ok(())
}
