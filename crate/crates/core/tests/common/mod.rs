//! Helpers shared by the integration test targets: random data, brute-force
//! oracles, a small DOT reader and the planted-pattern fixture.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rare_rules::classifier::PerformancePoint;
use rare_rules::dataset::{AttributeSchema, Item, Itemset, TransactionSet};
use rare_rules::mining::MiningParams;
use rare_rules::synth::{PlantSpec, PlantedPattern};

/// Random categorical data: up to `max_attrs` attributes with 2..=`max_levels`
/// levels, up to `max_rows` rows, at least one positive and one negative.
pub fn random_dataset(seed: u64, max_attrs: usize, max_levels: usize, max_rows: usize) -> TransactionSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=max_attrs);
    let levels: Vec<usize> = (0..m).map(|_| rng.random_range(2..=max_levels)).collect();
    let schema = AttributeSchema::from_pairs(levels.iter().enumerate().map(|(a, &l)| {
        (format!("v{a}"), (0..l).map(|x| format!("l{x}")).collect::<Vec<_>>())
    }))
    .unwrap();
    let n = rng.random_range(20..=max_rows);
    let pos_rate: f64 = rng.random_range(0.05..0.4);
    // Skewed level draws so that some itemsets are much more frequent.
    let records: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            levels
                .iter()
                .map(|&l| {
                    let u: f64 = rng.random();
                    ((u * u) * l as f64) as u32
                })
                .collect()
        })
        .collect();
    let mut labels: Vec<bool> = records
        .iter()
        .map(|r| {
            let boost = if r[0] == 0 { 2.0 } else { 1.0 };
            rng.random::<f64>() < (pos_rate * boost).min(0.9)
        })
        .collect();
    labels[0] = true;
    labels[1] = false;
    TransactionSet::from_records(schema, &records, &labels).unwrap()
}

/// Random thresholds in the ranges the oracle suite uses.
pub fn random_params(seed: u64, attrs: usize) -> MiningParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    MiningParams {
        min_local_support: rng.random_range(0.02..0.6),
        min_conf_ratio: rng.random_range(1.0..2.5),
        max_length: rng.random_range(1..=attrs),
        ..MiningParams::default()
    }
}

/// Support and class counts of every non-empty itemset that occurs in the
/// data, by enumerating each record's sub-itemsets.
pub fn all_itemset_counts(ts: &TransactionSet) -> BTreeMap<Itemset, (u64, u64)> {
    let m = ts.schema().len();
    let mut counts: HashMap<Vec<Item>, (u64, u64)> = HashMap::new();
    for (row, rec) in ts.records().enumerate() {
        let pos = u64::from(ts.label(row));
        for mask in 1u32..(1 << m) {
            let items: Vec<Item> = (0..m)
                .filter(|a| mask >> a & 1 == 1)
                .map(|a| Item::new(a, rec[a] as usize))
                .collect();
            let e = counts.entry(items).or_default();
            e.0 += 1;
            e.1 += pos;
        }
    }
    counts
        .into_iter()
        .map(|(items, c)| (Itemset::new(items).unwrap(), c))
        .collect()
}

/// Brute-force rule mining: every itemset up to `max_length` whose local
/// support and confidence ratio pass, as (itemset, supp, conf).
pub fn brute_force_mine(ts: &TransactionSet, params: &MiningParams) -> Vec<(Itemset, u64, u64)> {
    let n = ts.n() as f64;
    let n_pos = ts.n_pos() as f64;
    let mut out: Vec<(Itemset, u64, u64)> = all_itemset_counts(ts)
        .into_iter()
        .filter(|(set, (supp, conf))| {
            set.len() <= params.max_length
                && *conf as f64 >= params.min_local_support * n_pos
                && *conf as f64 * n >= params.min_conf_ratio * n_pos * *supp as f64
        })
        .map(|(set, (s, c))| (set, s, c))
        .collect();
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    out
}

/// Exact comparison of `c1 (n - s1) / (s1 (P - c1))` and the same for the
/// second pattern, with a zero denominator meaning +infinity.
pub fn cmp_rr(n: u64, n_pos: u64, (s1, c1): (u64, u64), (s2, c2): (u64, u64)) -> std::cmp::Ordering {
    let num = |s: u64, c: u64| u128::from(c) * u128::from(n - s);
    let den = |s: u64, c: u64| u128::from(s) * u128::from(n_pos - c);
    match (den(s1, c1) == 0, den(s2, c2) == 0) {
        (true, true) => std::cmp::Ordering::Equal,
        (true, false) => std::cmp::Ordering::Greater,
        (false, true) => std::cmp::Ordering::Less,
        (false, false) => (num(s1, c1) * den(s2, c2)).cmp(&(num(s2, c2) * den(s1, c1))),
    }
}

/// Nodes and edges of a DOT digraph as emitted by the report module.
#[derive(Debug, Default)]
pub struct Dot {
    pub labels: BTreeMap<String, String>,
    pub edges: Vec<(String, String)>,
}

/// Reads `digraph NAME { ... }` with node statements `id [label="..."];`,
/// edge statements `a -> b;` and attribute statements. Fails on anything else.
pub fn parse_dot(text: &str) -> Result<Dot, String> {
    let body = text
        .trim()
        .strip_prefix("digraph")
        .ok_or("missing `digraph`")?
        .trim_start();
    let open = body.find('{').ok_or("missing `{`")?;
    let name = body[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(format!("bad graph name `{name}`"));
    }
    let inner = body[open + 1..].strip_suffix('}').ok_or("missing closing `}`")?;
    let mut dot = Dot::default();
    for stmt in split_statements(inner)? {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        let is_edge = match (stmt.find("->"), stmt.find('[')) {
            (Some(e), Some(b)) => e < b,
            (e, _) => e.is_some(),
        };
        if is_edge {
            let (a, b) = stmt.split_once("->").unwrap();
            let (a, b) = (a.trim(), b.trim());
            if !is_id(a) || !is_id(b) {
                return Err(format!("bad edge `{stmt}`"));
            }
            dot.edges.push((a.to_owned(), b.to_owned()));
        } else if let Some((id, attrs)) = stmt.split_once('[') {
            let id = id.trim();
            let attrs = attrs.trim().strip_suffix(']').ok_or(format!("unclosed `[` in `{stmt}`"))?;
            if id == "node" || id == "edge" || id == "graph" {
                continue;
            }
            if !is_id(id) {
                return Err(format!("bad node id `{id}`"));
            }
            let label = attrs
                .trim()
                .strip_prefix("label=\"")
                .and_then(|s| s.strip_suffix('"'))
                .ok_or(format!("node `{id}` lacks a quoted label"))?;
            if dot.labels.insert(id.to_owned(), unescape(label)).is_some() {
                return Err(format!("node `{id}` declared twice"));
            }
        } else {
            return Err(format!("unrecognised statement `{stmt}`"));
        }
    }
    Ok(dot)
}

fn is_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

fn split_statements(body: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' if in_quotes => {
                cur.push(c);
                cur.push(chars.next().ok_or("dangling escape")?);
            }
            '"' => {
                in_quotes = !in_quotes;
                cur.push(c);
            }
            ';' | '\n' if !in_quotes => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    if in_quotes {
        return Err("unterminated string".into());
    }
    out.push(cur);
    Ok(out)
}

fn unescape(s: &str) -> String {
    s.replace("\\n", "\n").replace("\\\"", "\"").replace("\\\\", "\\")
}

/// Checks that the graph is a tree with a single root whose leaves all carry
/// an `RR=` line, and returns the item labels on the root path of every such
/// terminal node.
pub fn dot_pattern_paths(dot: &Dot) -> Result<(String, Vec<Vec<String>>), String> {
    let mut parent: HashMap<&str, &str> = HashMap::new();
    for (a, b) in &dot.edges {
        if !dot.labels.contains_key(a) || !dot.labels.contains_key(b) {
            return Err(format!("edge {a} -> {b} references an undeclared node"));
        }
        if parent.insert(b, a).is_some() {
            return Err(format!("node {b} has two parents"));
        }
    }
    let roots: Vec<&String> = dot.labels.keys().filter(|id| !parent.contains_key(id.as_str())).collect();
    if roots.len() != 1 {
        return Err(format!("{} roots", roots.len()));
    }
    let root = roots[0].clone();
    for (id, label) in &dot.labels {
        let leaf = !dot.edges.iter().any(|(a, _)| a == id);
        if leaf && *id != root && !label.contains("RR=") {
            return Err(format!("leaf {id} carries no RR"));
        }
    }
    let mut paths = Vec::new();
    for (id, label) in &dot.labels {
        if !label.contains("RR=") {
            continue;
        }
        let mut path = Vec::new();
        let mut at = id.as_str();
        let mut steps = 0;
        while at != root {
            path.push(dot.labels[at].lines().next().unwrap().to_owned());
            at = parent[at];
            steps += 1;
            if steps > dot.labels.len() {
                return Err("cycle".into());
            }
        }
        path.reverse();
        paths.push(path);
    }
    Ok((dot.labels[&root].clone(), paths))
}

/// An 18-row saved grid: (sensitivity, specificity, error).
pub const SAVED_GRID: [(f64, f64, f64); 18] = [
    (0.925, 0.684, 0.317),
    (0.925, 0.686, 0.309),
    (0.824, 0.816, 0.247),
    (0.884, 0.760, 0.247),
    (0.739, 0.867, 0.136),
    (0.739, 0.870, 0.135),
    (0.925, 0.684, 0.317),
    (0.925, 0.686, 0.309),
    (0.824, 0.816, 0.186),
    (0.884, 0.760, 0.248),
    (0.739, 0.867, 0.136),
    (0.739, 0.870, 0.136),
    (0.935, 0.679, 0.314),
    (0.930, 0.685, 0.314),
    (0.829, 0.815, 0.189),
    (0.879, 0.763, 0.251),
    (0.734, 0.867, 0.137),
    (0.734, 0.875, 0.137),
];

pub fn saved_grid_points() -> Vec<PerformancePoint> {
    SAVED_GRID
        .iter()
        .enumerate()
        .map(|(i, &(s, p, e))| PerformancePoint::new((i + 1).to_string(), s, p, e))
        .collect()
}

pub fn saved_grid_csv() -> String {
    let mut out = String::from("label,loc_supp,min_conf,max_lhs,sensitivity,specificity,classification_error\n");
    let supports = ["9%", "10%", "15%"];
    for (i, (s, p, e)) in SAVED_GRID.iter().enumerate() {
        let (ls, mc, ml) = (supports[i / 6], 3 + (i % 6) / 2, 3 + i % 2);
        out.push_str(&format!("{},{ls},{mc},{ml},{s},{p},{e}\n", i + 1));
    }
    out
}

/// Ten 4-level attributes; planted `{a1=1}` (RR 8), `{a2=1, a3=1}` (RR 15)
/// and `{a4=1, a5=1}` (RR 30) over a 2% base rate. The skewed marginals keep
/// each planted pattern's local support near 0.15 while every one-item
/// extension stays below 0.10.
pub fn planted_spec(n: usize, seed: u64) -> PlantSpec {
    let schema = AttributeSchema::from_pairs(
        (1..=10).map(|i| (format!("a{i}"), vec!["0", "1", "2", "3"])),
    )
    .unwrap();
    let item = |a: usize| Item::new(a, 1);
    let planted = vec![
        PlantedPattern {
            itemset: Itemset::new(vec![item(0)]).unwrap(),
            target_rr: 8.0,
        },
        PlantedPattern {
            itemset: Itemset::new(vec![item(1), item(2)]).unwrap(),
            target_rr: 15.0,
        },
        PlantedPattern {
            itemset: Itemset::new(vec![item(3), item(4)]).unwrap(),
            target_rr: 30.0,
        },
    ];
    let mut spec = PlantSpec::new(schema, n, 0.02, planted, seed);
    for (a, q) in [(0, 0.027), (1, 0.115), (2, 0.115), (3, 0.082), (4, 0.082)] {
        let rest = (1.0 - q) / 3.0;
        spec.marginals[a] = vec![rest, q, rest, rest];
    }
    spec
}

/// JSON form of [`planted_spec`] for the command-line tests.
pub fn planted_spec_json(n: usize, seed: u64) -> String {
    let marginal = |q: f64| {
        let rest = (1.0 - q) / 3.0;
        format!("[{rest}, {q}, {rest}, {rest}]")
    };
    let attributes: Vec<String> = (1..=10)
        .map(|i| format!("\"a{i}\": [\"0\", \"1\", \"2\", \"3\"]"))
        .collect();
    format!(
        r#"{{
  "attributes": {{ {} }},
  "marginals": {{ "a1": {}, "a2": {}, "a3": {}, "a4": {}, "a5": {} }},
  "n": {n},
  "base_positive_rate": 0.02,
  "planted": [
    {{ "items": [["a1", "1"]], "target_rr": 8.0 }},
    {{ "items": [["a2", "1"], ["a3", "1"]], "target_rr": 15.0 }},
    {{ "items": [["a4", "1"], ["a5", "1"]], "target_rr": 30.0 }}
  ],
  "noise_seed": {seed},
  "class_column": "outcome"
}}"#,
        attributes.join(", "),
        marginal(0.027),
        marginal(0.115),
        marginal(0.115),
        marginal(0.082),
        marginal(0.082),
    )
}

/// Nested plants `{a=1}` (RR 4) inside `{a=1, b=1}` (RR 12) plus an attribute
/// `c` whose second level is practically never drawn. Every superset that
/// adds `c=0` ties its sub-pattern on all counts and must be pruned.
pub fn nested_spec(n: usize, seed: u64) -> PlantSpec {
    let schema = AttributeSchema::from_pairs([
        ("a", vec!["0", "1"]),
        ("b", vec!["0", "1"]),
        ("c", vec!["0", "1"]),
    ])
    .unwrap();
    let a1 = Item::new(0, 1);
    let b1 = Item::new(1, 1);
    let planted = vec![
        PlantedPattern {
            itemset: Itemset::single(a1),
            target_rr: 4.0,
        },
        PlantedPattern {
            itemset: Itemset::new(vec![a1, b1]).unwrap(),
            target_rr: 12.0,
        },
    ];
    let mut spec = PlantSpec::new(schema, n, 0.02, planted, seed);
    spec.marginals[0] = vec![0.8, 0.2];
    spec.marginals[1] = vec![0.7, 0.3];
    spec.marginals[2] = vec![1.0 - 1e-12, 1e-12];
    spec
}

pub fn nested_params() -> MiningParams {
    MiningParams {
        min_conf_ratio: 2.0,
        ..MiningParams::default()
    }
}
