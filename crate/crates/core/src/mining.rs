//! Level-wise (Apriori) mining of class association rules `X -> [Y = 1]`.
//!
//! Candidate growth is driven by local support alone, the fraction of
//! positive transactions an antecedent covers, which is anti-monotone. The
//! confidence ratio only filters what is emitted.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::dataset::{AttributeSchema, Itemset, TransactionSet};
use crate::error::{Error, Result};
use crate::stats::{self, RuleMetrics};

/// An antecedent with its exact counts on some transaction set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassRule {
    pub antecedent: Itemset,
    /// Transactions containing every antecedent item.
    pub supp_count: u64,
    /// Of those, transactions in the target class.
    pub conf_count: u64,
}

impl ClassRule {
    pub fn new(antecedent: Itemset, supp_count: u64, conf_count: u64) -> Self {
        debug_assert!(conf_count <= supp_count);
        Self {
            antecedent,
            supp_count,
            conf_count,
        }
    }

    /// Matched transactions outside the target class.
    pub fn neg_count(&self) -> u64 {
        self.supp_count - self.conf_count
    }

    pub fn len(&self) -> usize {
        self.antecedent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antecedent.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiningParams {
    /// Minimum fraction of positive transactions an antecedent must cover.
    pub min_local_support: f64,
    /// Minimum confidence as a multiple of the base positive rate.
    pub min_conf_ratio: f64,
    /// Maximum antecedent length.
    pub max_length: usize,
    /// Relative-risk threshold for risk patterns; must exceed 1.
    pub rr_threshold: f64,
    /// Count margin `k` of the nested-pattern test.
    pub test_margin: u64,
}

impl Default for MiningParams {
    fn default() -> Self {
        Self {
            min_local_support: 0.10,
            min_conf_ratio: 4.0,
            max_length: 3,
            rr_threshold: 2.0,
            test_margin: 1,
        }
    }
}

impl MiningParams {
    /// Validates bounds; `attribute_count` additionally caps `max_length`.
    pub fn validate(&self, attribute_count: Option<usize>) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.min_local_support > 0.0 && self.min_local_support <= 1.0) {
            return bad(format!(
                "min_local_support {} not in (0, 1]",
                self.min_local_support
            ));
        }
        if !self.min_conf_ratio.is_finite() || self.min_conf_ratio < 1.0 {
            return bad(format!("min_conf_ratio {} must be >= 1", self.min_conf_ratio));
        }
        if self.max_length == 0 {
            return bad("max_length must be >= 1".into());
        }
        if let Some(m) = attribute_count {
            if self.max_length > m {
                return bad(format!(
                    "max_length {} exceeds attribute count {m}",
                    self.max_length
                ));
            }
        }
        if self.rr_threshold.is_nan() || self.rr_threshold <= 1.0 {
            return bad(format!("rr_threshold {} must be > 1", self.rr_threshold));
        }
        if self.test_margin == 0 {
            return bad("test margin k must be >= 1".into());
        }
        Ok(())
    }

    pub fn meets_local_support(&self, conf_count: u64, n_pos: u64) -> bool {
        n_pos > 0 && conf_count as f64 / n_pos as f64 >= self.min_local_support
    }

    pub fn meets_confidence(&self, supp_count: u64, conf_count: u64, n_pos: u64, n: u64) -> bool {
        supp_count > 0
            && conf_count as f64 / supp_count as f64
                >= self.min_conf_ratio * (n_pos as f64 / n as f64)
    }
}

/// Mined rules sorted by (length, items), with the provenance they were
/// mined under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<ClassRule>,
    pub params: MiningParams,
    pub fingerprint: String,
    pub n: usize,
    pub n_pos: u64,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn max_length(&self) -> usize {
        self.rules.iter().map(ClassRule::len).max().unwrap_or(0)
    }

    pub fn of_length(&self, len: usize) -> impl Iterator<Item = &ClassRule> + '_ {
        self.rules.iter().filter(move |r| r.len() == len)
    }

    pub fn get(&self, antecedent: &Itemset) -> Option<&ClassRule> {
        self.rules.iter().find(|r| &r.antecedent == antecedent)
    }

    /// Same provenance, different rules; restores canonical order.
    pub fn with_rules(&self, mut rules: Vec<ClassRule>) -> RuleSet {
        sort_rules(&mut rules);
        RuleSet {
            rules,
            params: self.params,
            fingerprint: self.fingerprint.clone(),
            n: self.n,
            n_pos: self.n_pos,
        }
    }

    /// JSON lines: a header with params and fingerprint, then one rule per
    /// line with items as `[attribute, level]` name pairs. When `with_metrics`
    /// is set each rule line carries its rates and relative risk.
    pub fn write_jsonl<W: Write>(
        &self,
        mut out: W,
        schema: &AttributeSchema,
        with_metrics: bool,
    ) -> Result<()> {
        let header = RuleSetHeader {
            params: self.params,
            fingerprint: self.fingerprint.clone(),
            n: self.n,
            n_pos: self.n_pos,
            rules: self.rules.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        writeln!(out)?;
        let n_neg = self.n as u64 - self.n_pos;
        for rule in &self.rules {
            let metrics = if with_metrics {
                stats::metrics(rule, self.n_pos, n_neg).ok()
            } else {
                None
            };
            let line = RuleLine {
                items: schema.itemset_names(&rule.antecedent),
                supp_count: rule.supp_count,
                conf_count: rule.conf_count,
                metrics,
            };
            serde_json::to_writer(&mut out, &line)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(src: R, schema: &AttributeSchema) -> Result<RuleSet> {
        let mut lines = src.lines();
        let header: RuleSetHeader = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Malformed("rule file has no header line".into())),
        };
        let mut rules = Vec::with_capacity(header.rules);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: RuleLine = serde_json::from_str(&line)?;
            let antecedent = schema.itemset_from_names(parsed.items)?;
            if parsed.conf_count > parsed.supp_count {
                return Err(Error::Malformed(format!(
                    "rule {} has conf_count > supp_count",
                    schema.describe(&antecedent)
                )));
            }
            rules.push(ClassRule::new(antecedent, parsed.supp_count, parsed.conf_count));
        }
        sort_rules(&mut rules);
        Ok(RuleSet {
            rules,
            params: header.params,
            fingerprint: header.fingerprint,
            n: header.n,
            n_pos: header.n_pos,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RuleSetHeader {
    params: MiningParams,
    fingerprint: String,
    n: usize,
    n_pos: u64,
    rules: usize,
}

#[derive(Serialize, Deserialize)]
struct RuleLine {
    items: Vec<(String, String)>,
    supp_count: u64,
    conf_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metrics: Option<RuleMetrics>,
}

pub(crate) fn sort_rules(rules: &mut [ClassRule]) {
    rules.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.antecedent.cmp(&b.antecedent))
    });
}

/// Frequent class association rules up to `params.max_length`.
pub fn mine(ts: &TransactionSet, params: &MiningParams) -> Result<RuleSet> {
    if ts.n_pos() == 0 {
        return Err(Error::NoPositives);
    }
    params.validate(Some(ts.schema().len()))?;
    let n = ts.n() as u64;
    let n_pos = ts.n_pos();

    let mut output = Vec::new();
    let mut candidates: Vec<Itemset> = ts.schema().items().map(Itemset::single).collect();
    let mut length = 1;
    loop {
        let counted = count_pass(ts, &candidates);
        let frequent: Vec<ClassRule> = counted
            .into_iter()
            .filter(|r| params.meets_local_support(r.conf_count, n_pos))
            .collect();
        if frequent.is_empty() {
            break;
        }
        let next_base: Vec<Itemset> = frequent.iter().map(|r| r.antecedent.clone()).collect();
        output.extend(
            frequent
                .into_iter()
                .filter(|r| params.meets_confidence(r.supp_count, r.conf_count, n_pos, n)),
        );
        if length == params.max_length {
            break;
        }
        candidates = apriori_gen(&next_base);
        if candidates.is_empty() {
            break;
        }
        length += 1;
    }
    sort_rules(&mut output);
    log::debug!("mined {} rules up to length {length}", output.len());
    Ok(RuleSet {
        rules: output,
        params: *params,
        fingerprint: ts.fingerprint(),
        n: ts.n(),
        n_pos,
    })
}

/// Joins frequent (k-1)-itemsets sharing their first k-2 items into
/// k-itemset candidates, dropping joins that repeat an attribute and any
/// candidate with an infrequent (k-1)-subset.
pub fn apriori_gen(frequent_prev: &[Itemset]) -> Vec<Itemset> {
    let mut prev = frequent_prev.to_vec();
    prev.sort_unstable();
    prev.dedup();
    let Some(first) = prev.first() else {
        return Vec::new();
    };
    let prefix_len = first.len() - 1;
    debug_assert!(prev.iter().all(|s| s.len() == prefix_len + 1));
    let known: HashSet<&Itemset> = prev.iter().collect();

    let mut out = Vec::new();
    for (i, a) in prev.iter().enumerate() {
        for b in &prev[i + 1..] {
            if a.items()[..prefix_len] != b.items()[..prefix_len] {
                break;
            }
            let last_a = a.items()[prefix_len];
            let last_b = b.items()[prefix_len];
            if last_a.attribute == last_b.attribute {
                continue;
            }
            let mut items = a.items().to_vec();
            items.push(last_b);
            let candidate = Itemset::from_sorted_unchecked(items);
            if candidate.drop_one().all(|sub| known.contains(&sub)) {
                out.push(candidate);
            }
        }
    }
    out
}

/// Exact support and class counts for each candidate, computed by
/// intersecting item columns.
pub fn count_pass(ts: &TransactionSet, candidates: &[Itemset]) -> Vec<ClassRule> {
    candidates
        .par_iter()
        .map_init(
            || BitRow::zeros(ts.n()),
            |scratch, c| count_one(ts, c, scratch),
        )
        .collect()
}

fn count_one(ts: &TransactionSet, candidate: &Itemset, scratch: &mut BitRow) -> ClassRule {
    let items = candidate.items();
    let (supp, conf) = match items {
        [] => (ts.n() as u64, ts.n_pos()),
        [single] => {
            let col = ts.item_column(*single);
            (col.count_ones(), col.and_count(ts.labels()))
        }
        [a, rest @ ..] => {
            scratch.clone_from(ts.item_column(*a));
            for it in rest {
                scratch.and_assign(ts.item_column(*it));
            }
            (scratch.count_ones(), scratch.and_count(ts.labels()))
        }
    };
    ClassRule::new(candidate.clone(), supp, conf)
}

/// Transaction-major counting: one scan, each record tested against every
/// candidate. Slow; kept to cross-check [`count_pass`].
pub fn count_pass_scan(ts: &TransactionSet, candidates: &[Itemset]) -> Vec<ClassRule> {
    let mut supp = vec![0u64; candidates.len()];
    let mut conf = vec![0u64; candidates.len()];
    for (row, record) in ts.records().enumerate() {
        let positive = ts.label(row);
        for (i, c) in candidates.iter().enumerate() {
            if c.matches(record) {
                supp[i] += 1;
                if positive {
                    conf[i] += 1;
                }
            }
        }
    }
    candidates
        .iter()
        .zip(supp.into_iter().zip(conf))
        .map(|(c, (s, p))| ClassRule::new(c.clone(), s, p))
        .collect()
}
