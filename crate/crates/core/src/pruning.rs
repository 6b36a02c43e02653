//! Reduction of mined rules to a non-redundant family of risk patterns.
//!
//! Three passes, in order:
//!
//! 1. keep rules whose relative risk exceeds the threshold;
//! 2. top-down, drop a pattern when some pattern one item shorter inside it
//!    has the same matched-negative count within margin `k` (the longer one
//!    cannot have higher relative risk), or when any sub-pattern in the family
//!    has exactly the same support;
//! 3. bottom-up, drop a pattern when some pattern one item longer containing
//!    it has the same matched-positive count within margin `k` (the shorter
//!    one cannot have higher relative risk).
//!
//! Witnesses for a pass are always taken from that pass's input family, so a
//! pattern discarded earlier in the same pass can still justify a discard.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Itemset, TransactionSet};
use crate::error::Result;
use crate::mining::{count_pass, ClassRule, MiningParams, RuleSet};
use crate::stats::{self, count_test, power_bound, RuleMetrics, Smoothing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneTest {
    /// Sub-pattern with identical support; both joint counts then coincide.
    EqualSupport,
    /// Matched-negative counts equal within the margin.
    Redundant,
    /// Matched-positive counts equal within the margin.
    Weak,
}

/// One discard decision. `sub` is the shorter pattern of the nested pair and
/// `sup` the longer; which of them was discarded depends on `test`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub discarded: Itemset,
    pub witness: Itemset,
    pub test: PruneTest,
    pub count_sub: u64,
    pub count_sup: u64,
    pub diff_count: u64,
    pub k: u64,
    pub power_lower_bound: Option<f64>,
}

impl AuditEntry {
    /// The pattern that is the shorter member of the nested pair.
    pub fn sub_pattern(&self) -> &Itemset {
        match self.test {
            PruneTest::Weak => &self.discarded,
            PruneTest::EqualSupport | PruneTest::Redundant => &self.witness,
        }
    }

    pub fn sup_pattern(&self) -> &Itemset {
        match self.test {
            PruneTest::Weak => &self.witness,
            PruneTest::EqualSupport | PruneTest::Redundant => &self.discarded,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredRule {
    pub rule: ClassRule,
    pub metrics: RuleMetrics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PruneOutcome {
    pub rules: RuleSet,
    pub audit: Vec<AuditEntry>,
}

/// Output of the first learning stage: surviving risk patterns with their
/// training metrics and every discard decision taken on the way.
#[derive(Clone, Debug, PartialEq)]
pub struct PrunedFamily {
    pub rules: Vec<ScoredRule>,
    pub audit: Vec<AuditEntry>,
    pub params: MiningParams,
    pub fingerprint: String,
    pub n: usize,
    pub n_pos: u64,
}

impl PrunedFamily {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn itemsets(&self) -> impl Iterator<Item = &Itemset> + '_ {
        self.rules.iter().map(|r| &r.rule.antecedent)
    }

    pub fn to_rule_set(&self) -> RuleSet {
        RuleSet {
            rules: self.rules.iter().map(|r| r.rule.clone()).collect(),
            params: self.params,
            fingerprint: self.fingerprint.clone(),
            n: self.n,
            n_pos: self.n_pos,
        }
    }

    /// Audit log as JSON lines: a header stating the loop bounds and margin,
    /// then one discard per line.
    pub fn write_audit<W: Write>(&self, mut out: W, schema: &AttributeSchema) -> Result<()> {
        let header = serde_json::json!({
            "redundant_lengths": "max..=2 (descending)",
            "weak_lengths": "1..=max-1 (ascending)",
            "k": self.params.test_margin,
            "rr_threshold": self.params.rr_threshold,
            "fingerprint": self.fingerprint,
            "discards": self.audit.len(),
        });
        serde_json::to_writer(&mut out, &header)?;
        writeln!(out)?;
        for e in &self.audit {
            let line = serde_json::json!({
                "discarded": schema.itemset_names(&e.discarded),
                "witness": schema.itemset_names(&e.witness),
                "test": e.test,
                "count_sub": e.count_sub,
                "count_sup": e.count_sup,
                "diff_count": e.diff_count,
                "k": e.k,
                "power_lower_bound": e.power_lower_bound,
            });
            serde_json::to_writer(&mut out, &line)?;
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Recounts `rules` on `ts` unless they were mined on it.
fn counted_on(rules: &RuleSet, ts: &TransactionSet) -> Vec<ClassRule> {
    if rules.fingerprint == ts.fingerprint() {
        return rules.rules.clone();
    }
    let itemsets: Vec<Itemset> = rules.rules.iter().map(|r| r.antecedent.clone()).collect();
    count_pass(ts, &itemsets)
}

/// Keeps rules whose relative risk on `ts` exceeds `tau`. Rules whose risk is
/// undefined (they match every transaction) are dropped.
pub fn threshold_risk_patterns(rules: &RuleSet, ts: &TransactionSet, tau: f64) -> RuleSet {
    let n = ts.n() as u64;
    let kept = counted_on(rules, ts)
        .into_iter()
        .filter(|r| {
            stats::relative_risk(r.supp_count, r.conf_count, ts.n_pos(), n, Smoothing::None)
                .is_ok_and(|rr| rr.exceeds(tau))
        })
        .collect();
    RuleSet {
        fingerprint: ts.fingerprint(),
        n: ts.n(),
        n_pos: ts.n_pos(),
        ..rules.with_rules(kept)
    }
}

fn advisory_power(n: u64, sub: u64, sup: u64, k: u64, base: u64) -> Option<f64> {
    if sub == sup || base == 0 || base == n {
        return None;
    }
    power_bound(n, sub as f64 / n as f64, sup as f64 / n as f64, k, base as f64 / n as f64).ok()
}

/// Proper non-empty subsets of `set`, shortest first.
fn proper_subsets(set: &Itemset) -> Vec<Itemset> {
    let items = set.items();
    let len = items.len();
    if len < 2 {
        return Vec::new();
    }
    let mut out: Vec<Itemset> = (1u32..(1 << len) - 1)
        .map(|mask| {
            let picked = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &it)| it)
                .collect();
            Itemset::new(picked).expect("subset of a valid itemset")
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Top-down redundancy pruning on matched-negative counts.
pub fn prune_redundant(rules: &RuleSet, ts: &TransactionSet, k: u64) -> PruneOutcome {
    let family = counted_on(rules, ts);
    let by_set: HashMap<&Itemset, &ClassRule> =
        family.iter().map(|r| (&r.antecedent, r)).collect();
    let n = ts.n() as u64;
    let n_neg = ts.n_neg();
    let max_len = family.iter().map(ClassRule::len).max().unwrap_or(0);

    let mut audit = Vec::new();
    let mut discarded = std::collections::HashSet::new();
    for len in (2..=max_len).rev() {
        for sup in family.iter().filter(|r| r.len() == len) {
            let equal_support = proper_subsets(&sup.antecedent)
                .into_iter()
                .filter_map(|s| by_set.get(&s).copied())
                .find(|sub| sub.supp_count == sup.supp_count);
            let entry = if let Some(sub) = equal_support {
                Some(AuditEntry {
                    discarded: sup.antecedent.clone(),
                    witness: sub.antecedent.clone(),
                    test: PruneTest::EqualSupport,
                    count_sub: sub.neg_count(),
                    count_sup: sup.neg_count(),
                    diff_count: sub.neg_count() - sup.neg_count(),
                    k,
                    power_lower_bound: None,
                })
            } else {
                let mut witnesses: Vec<&ClassRule> = sup
                    .antecedent
                    .drop_one()
                    .filter_map(|s| by_set.get(&s).copied())
                    .collect();
                witnesses.sort_by(|a, b| a.antecedent.cmp(&b.antecedent));
                witnesses.into_iter().find_map(|sub| {
                    let t = count_test(sub.neg_count(), sup.neg_count(), k)
                        .expect("nested counts from one transaction set");
                    (!t.reject).then(|| AuditEntry {
                        discarded: sup.antecedent.clone(),
                        witness: sub.antecedent.clone(),
                        test: PruneTest::Redundant,
                        count_sub: sub.neg_count(),
                        count_sup: sup.neg_count(),
                        diff_count: t.diff_count,
                        k,
                        power_lower_bound: advisory_power(
                            n,
                            sub.neg_count(),
                            sup.neg_count(),
                            k,
                            n_neg,
                        ),
                    })
                })
            };
            if let Some(entry) = entry {
                log::debug!(
                    "redundant: drop {} (witness {}, diff {})",
                    entry.discarded,
                    entry.witness,
                    entry.diff_count
                );
                discarded.insert(entry.discarded.clone());
                audit.push(entry);
            }
        }
    }
    let kept = family
        .iter()
        .filter(|r| !discarded.contains(&r.antecedent))
        .cloned()
        .collect();
    PruneOutcome {
        rules: rules.with_rules(kept),
        audit,
    }
}

/// Bottom-up pruning of patterns whose positive coverage is matched by a
/// longer pattern.
pub fn prune_weak(rules: &RuleSet, ts: &TransactionSet, k: u64) -> PruneOutcome {
    let family = counted_on(rules, ts);
    let n = ts.n() as u64;
    let n_pos = ts.n_pos();
    let max_len = family.iter().map(ClassRule::len).max().unwrap_or(0);

    // sub-pattern -> supersets one item longer
    let mut supersets: HashMap<Itemset, Vec<&ClassRule>> = HashMap::new();
    for r in &family {
        for s in r.antecedent.drop_one() {
            supersets.entry(s).or_default().push(r);
        }
    }
    for list in supersets.values_mut() {
        list.sort_by(|a, b| a.antecedent.cmp(&b.antecedent));
    }

    let mut audit = Vec::new();
    let mut discarded = std::collections::HashSet::new();
    for len in 1..max_len {
        for sub in family.iter().filter(|r| r.len() == len) {
            let Some(witnesses) = supersets.get(&sub.antecedent) else {
                continue;
            };
            let entry = witnesses.iter().find_map(|sup| {
                let t = count_test(sub.conf_count, sup.conf_count, k)
                    .expect("nested counts from one transaction set");
                (!t.reject).then(|| AuditEntry {
                    discarded: sub.antecedent.clone(),
                    witness: sup.antecedent.clone(),
                    test: PruneTest::Weak,
                    count_sub: sub.conf_count,
                    count_sup: sup.conf_count,
                    diff_count: t.diff_count,
                    k,
                    power_lower_bound: advisory_power(n, sub.conf_count, sup.conf_count, k, n_pos),
                })
            });
            if let Some(entry) = entry {
                log::debug!(
                    "weak: drop {} (witness {}, diff {})",
                    entry.discarded,
                    entry.witness,
                    entry.diff_count
                );
                discarded.insert(entry.discarded.clone());
                audit.push(entry);
            }
        }
    }
    let kept = family
        .iter()
        .filter(|r| !discarded.contains(&r.antecedent))
        .cloned()
        .collect();
    PruneOutcome {
        rules: rules.with_rules(kept),
        audit,
    }
}

/// Threshold, then redundancy pruning, then weak-pattern pruning.
pub fn stage1(rules: &RuleSet, ts: &TransactionSet, params: &MiningParams) -> Result<PrunedFamily> {
    params.validate(None)?;
    let risky = threshold_risk_patterns(rules, ts, params.rr_threshold);
    let redundant = prune_redundant(&risky, ts, params.test_margin);
    let weak = prune_weak(&redundant.rules, ts, params.test_margin);

    let mut audit = redundant.audit;
    audit.extend(weak.audit);
    let scored = weak
        .rules
        .rules
        .iter()
        .map(|r| {
            Ok(ScoredRule {
                rule: r.clone(),
                metrics: stats::metrics(r, ts.n_pos(), ts.n_neg())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if scored.is_empty() {
        log::warn!(
            "stage 1 discarded every rule ({} mined, {} above the risk threshold)",
            rules.len(),
            risky.len()
        );
    }
    Ok(PrunedFamily {
        rules: scored,
        audit,
        params: rules.params,
        fingerprint: ts.fingerprint(),
        n: ts.n(),
        n_pos: ts.n_pos(),
    })
}
