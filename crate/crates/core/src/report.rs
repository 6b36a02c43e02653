//! Tree rendering of a classifier and tabular output of performance points.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::classifier::{Classifier, PerformancePoint, PointParams};
use crate::dataset::Item;
use crate::error::{Error, Result};
use crate::stats::RelativeRisk;

pub const TABLE_HEADER: [&str; 7] = [
    "label",
    "loc_supp",
    "min_conf",
    "max_lhs",
    "sensitivity",
    "specificity",
    "classification_error",
];

/// Prefix tree of the classifier's patterns, items ordered by descending
/// frequency among the patterns, ties by item order.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternTree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    /// `None` for the root.
    pub item: Option<Item>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Set when a pattern ends here.
    pub rr: Option<RelativeRisk>,
}

impl PatternTree {
    pub fn build(c: &Classifier) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyClassifier);
        }
        let mut freq: HashMap<Item, usize> = HashMap::new();
        for it in c.itemsets().flat_map(|s| s.iter()) {
            *freq.entry(*it).or_default() += 1;
        }
        let mut nodes = vec![TreeNode {
            item: None,
            parent: None,
            children: Vec::new(),
            rr: None,
        }];
        for p in &c.patterns {
            let mut path: Vec<Item> = p.itemset.items().to_vec();
            path.sort_by(|a, b| freq[b].cmp(&freq[a]).then(a.cmp(b)));
            let mut at = 0;
            for item in path {
                at = match nodes[at]
                    .children
                    .iter()
                    .copied()
                    .find(|&ch| nodes[ch].item == Some(item))
                {
                    Some(ch) => ch,
                    None => {
                        nodes.push(TreeNode {
                            item: Some(item),
                            parent: Some(at),
                            children: Vec::new(),
                            rr: None,
                        });
                        let id = nodes.len() - 1;
                        nodes[at].children.push(id);
                        id
                    }
                };
            }
            nodes[at].rr = Some(p.validated_rr);
        }
        Ok(Self { nodes })
    }

    /// Graphviz DOT text. Terminal nodes carry `RR=<value>`.
    pub fn to_dot(&self, c: &Classifier) -> String {
        let mut out = String::from("digraph risk_patterns {\n  node [shape=box];\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let mut label = match node.item {
                None => "Total Population".to_owned(),
                Some(item) => {
                    let (a, l) = c.schema.item_names(item);
                    format!("{a}={l}")
                }
            };
            if let Some(rr) = node.rr {
                let _ = write!(label, "\\nRR={rr:.2}");
            }
            let _ = writeln!(out, "  n{id} [label=\"{}\"];", escape(&label));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for ch in &node.children {
                let _ = writeln!(out, "  n{id} -> n{ch};");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    let mut chars = label.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '"' => out.push_str("\\\""),
            // Keep the `\n` line breaks inserted above.
            '\\' if chars.peek() == Some(&'n') => out.push('\\'),
            '\\' => out.push_str("\\\\"),
            _ => out.push(ch),
        }
    }
    out
}

/// Renders the classifier as a tree rooted at "Total Population".
pub fn export_tree(c: &Classifier) -> Result<String> {
    Ok(PatternTree::build(c)?.to_dot(c))
}

/// Rounds half away from zero to `places` decimals, working on the shortest
/// decimal representation so that e.g. `0.8155` becomes `0.816`.
pub fn round_half_away(x: f64, places: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let repr = format!("{}", x.abs());
    let (int_part, frac_part) = repr.split_once('.').unwrap_or((&repr, ""));
    let mut digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes().chain(std::iter::repeat(b'0')).take(places))
        .map(|b| b - b'0')
        .collect();
    if frac_part.as_bytes().get(places).is_some_and(|&d| d >= b'5') {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - places;
    let mut out = String::new();
    if x.is_sign_negative() && digits.iter().any(|&d| d != 0) {
        out.push('-');
    }
    out.extend(digits[..split].iter().map(|d| char::from(b'0' + d)));
    if places > 0 {
        out.push('.');
        out.extend(digits[split..].iter().map(|d| char::from(b'0' + d)));
    }
    out
}

/// CSV table, one row per point; metrics at three decimals.
pub fn export_table(points: &[PerformancePoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TABLE_HEADER).expect("in-memory write");
    for p in points {
        let (s, c, m) = match &p.params {
            Some(pp) => (
                pp.min_local_support.to_string(),
                pp.min_conf_ratio.to_string(),
                pp.max_length.to_string(),
            ),
            None => Default::default(),
        };
        w.write_record([
            p.label.clone(),
            s,
            c,
            m,
            round_half_away(p.sensitivity, 3),
            round_half_away(p.specificity, 3),
            round_half_away(p.global_error, 3),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

/// Reads points from a CSV with at least `sensitivity`, `specificity` and
/// `classification_error` columns. Missing labels become the 1-based row
/// number; parameter columns are optional and may use a `%` suffix for local
/// support.
pub fn read_points<R: Read>(src: R) -> Result<Vec<PerformancePoint>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
    let header = reader.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| Error::Malformed(format!("points CSV lacks a `{name}` column")))
    };
    let (sens, spec, err) = (
        need("sensitivity")?,
        need("specificity")?,
        need("classification_error")?,
    );
    let (label, ls, mc, ml) = (col("label"), col("loc_supp"), col("min_conf"), col("max_lhs"));

    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let num = |c: usize| -> Result<f64> {
            let raw = rec.get(c).unwrap_or("");
            let (text, divisor) = match raw.strip_suffix('%') {
                Some(t) => (t, 100.0),
                None => (raw, 1.0),
            };
            text.parse::<f64>().map(|v| v / divisor).map_err(|_| {
                Error::Malformed(format!("row {row}: `{raw}` in column `{}` is not a number", &header[c]))
            })
        };
        let params = match (ls, mc, ml) {
            (Some(a), Some(b), Some(c)) if !rec.get(a).unwrap_or("").is_empty() => Some(PointParams {
                min_local_support: num(a)?,
                min_conf_ratio: num(b)?,
                max_length: num(c)? as usize,
            }),
            _ => None,
        };
        points.push(PerformancePoint {
            label: label
                .and_then(|c| rec.get(c))
                .filter(|s| !s.is_empty())
                .map_or_else(|| row.to_string(), str::to_owned),
            params,
            sensitivity: num(sens)?,
            specificity: num(spec)?,
            global_error: num(err)?,
        });
    }
    Ok(points)
}
