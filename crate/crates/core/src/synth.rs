//! Synthetic unbalanced datasets with planted risk patterns.
//!
//! Attribute levels are drawn independently from per-attribute marginals.
//! A record matching no planted pattern is positive with the base rate; a
//! record matching one or more planted patterns is positive with the largest
//! of their elevated rates. Elevated rates are solved so that, in the
//! population, each planted pattern's relative risk equals its target.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use indexmap::IndexMap;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Itemset, SchemaFile, TransactionSet};
use crate::error::{Error, Result};
use crate::stats::RelativeRisk;

const MAX_CELLS: usize = 1 << 22;
const MAX_ITERATIONS: usize = 100_000;
const TOLERANCE: f64 = 1e-13;
const DIVERGED: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedPattern {
    pub itemset: Itemset,
    pub target_rr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantSpec {
    pub schema: AttributeSchema,
    pub n: usize,
    pub base_positive_rate: f64,
    pub planted: Vec<PlantedPattern>,
    pub noise_seed: u64,
    /// Level probabilities per attribute, in schema order.
    pub marginals: Vec<Vec<f64>>,
}

impl PlantSpec {
    /// A spec with uniform marginals.
    pub fn new(
        schema: AttributeSchema,
        n: usize,
        base_positive_rate: f64,
        planted: Vec<PlantedPattern>,
        noise_seed: u64,
    ) -> Self {
        let marginals = schema
            .attributes()
            .iter()
            .map(|a| vec![1.0 / a.level_count() as f64; a.level_count()])
            .collect();
        Self {
            schema,
            n,
            base_positive_rate,
            planted,
            noise_seed,
            marginals,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.base_positive_rate > 0.0 && self.base_positive_rate < 0.5) {
            return bad(format!(
                "base_positive_rate {} not in (0, 0.5)",
                self.base_positive_rate
            ));
        }
        if self.planted.len() > 64 {
            return bad("at most 64 planted patterns".into());
        }
        for p in &self.planted {
            self.schema.validate_itemset(&p.itemset)?;
            if p.itemset.is_empty() {
                return bad("planted pattern is empty".into());
            }
            if !(p.target_rr > 1.0 && p.target_rr.is_finite()) {
                return bad(format!("target_rr {} must be > 1", p.target_rr));
            }
        }
        if self.marginals.len() != self.schema.len() {
            return bad(format!(
                "{} marginals for {} attributes",
                self.marginals.len(),
                self.schema.len()
            ));
        }
        for (m, attr) in self.marginals.iter().zip(self.schema.attributes()) {
            let sum: f64 = m.iter().sum();
            if m.len() != attr.level_count()
                || m.iter().any(|&p| p.is_nan() || p <= 0.0)
                || (sum - 1.0).abs() > 1e-9
            {
                return bad(format!(
                    "marginal of `{}` must be {} positive probabilities summing to 1",
                    attr.name,
                    attr.level_count()
                ));
            }
        }
        Ok(())
    }

    /// Solves the elevated rates and population quantities for the spec.
    pub fn design(&self) -> Result<Design> {
        self.validate()?;
        let groups = self.match_groups()?;
        let b = self.base_positive_rate;
        let k = self.planted.len();
        let mut rates: Vec<f64> = self.planted.iter().map(|p| b * p.target_rr).collect();

        let mut converged = k == 0;
        for _ in 0..MAX_ITERATIONS {
            if converged {
                break;
            }
            let achieved = population_rr(&groups, &rates, b);
            let mut change = 0.0f64;
            for j in 0..k {
                let next = rates[j] * self.planted[j].target_rr / achieved[j];
                change = change.max((next - rates[j]).abs() / rates[j]);
                rates[j] = next;
            }
            // Relative risk is scale-free once every rate dwarfs the base
            // rate, so runaway rates mean the targets cannot be met jointly.
            if !change.is_finite() || rates.iter().any(|&r| r.is_nan() || r > DIVERGED) {
                return Err(Error::InfeasibleTarget(
                    "planted targets cannot be met jointly".into(),
                ));
            }
            converged = change < TOLERANCE;
        }
        if !converged {
            return Err(Error::InfeasibleTarget(
                "elevated rates did not converge; a planted pattern may be shadowed by another"
                    .into(),
            ));
        }
        if let Some(j) = rates.iter().position(|&r| r > 1.0) {
            return Err(Error::InfeasibleTarget(format!(
                "pattern {} needs P(Y=1 | match) = {:.4} > 1",
                j + 1,
                rates[j]
            )));
        }
        let match_probability = (0..k)
            .map(|j| groups.iter().filter(|(m, _)| m >> j & 1 == 1).map(|g| g.1).sum())
            .collect();
        let positive_rate = groups.iter().map(|&(m, p)| p * rate_of(m, &rates, b)).sum();
        Ok(Design {
            elevated_rates: rates,
            match_probability,
            positive_rate,
        })
    }

    /// Probability of each set of simultaneously matched planted patterns,
    /// enumerated over the attributes the patterns mention.
    fn match_groups(&self) -> Result<Vec<(u64, f64)>> {
        let mut involved: Vec<usize> = self
            .planted
            .iter()
            .flat_map(|p| p.itemset.iter().map(|it| it.attribute))
            .collect();
        involved.sort_unstable();
        involved.dedup();
        let radices: Vec<usize> = involved
            .iter()
            .map(|&a| self.schema.attributes()[a].level_count())
            .collect();
        let cells = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r).filter(|&c| c <= MAX_CELLS))
            .ok_or_else(|| {
                Error::InvalidParams("planted patterns span too many level combinations".into())
            })?;

        let mut record = vec![0u32; self.schema.len()];
        let mut groups: BTreeMap<u64, f64> = BTreeMap::new();
        for cell in 0..cells {
            let mut rest = cell;
            let mut prob = 1.0;
            for (&a, &r) in involved.iter().zip(&radices) {
                let level = rest % r;
                rest /= r;
                record[a] = level as u32;
                prob *= self.marginals[a][level];
            }
            let mask = self.match_mask(&record);
            *groups.entry(mask).or_default() += prob;
        }
        Ok(groups.into_iter().collect())
    }

    fn match_mask(&self, record: &[u32]) -> u64 {
        self.planted
            .iter()
            .enumerate()
            .filter(|(_, p)| p.itemset.matches(record))
            .fold(0, |m, (j, _)| m | 1 << j)
    }
}

fn rate_of(mask: u64, rates: &[f64], base: f64) -> f64 {
    if mask == 0 {
        return base;
    }
    rates
        .iter()
        .enumerate()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .map(|(_, &r)| r)
        .fold(0.0, f64::max)
}

fn population_rr(groups: &[(u64, f64)], rates: &[f64], base: f64) -> Vec<f64> {
    (0..rates.len())
        .map(|j| {
            let (mut pos_in, mut p_in, mut pos_out, mut p_out) = (0.0, 0.0, 0.0, 0.0);
            for &(mask, p) in groups {
                let y = p * rate_of(mask, rates, base);
                if mask >> j & 1 == 1 {
                    pos_in += y;
                    p_in += p;
                } else {
                    pos_out += y;
                    p_out += p;
                }
            }
            (pos_in / p_in) / (pos_out / p_out)
        })
        .collect()
}

/// Population quantities implied by a spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Design {
    /// `P(Y=1 | record matches pattern j and no pattern with a higher rate)`.
    pub elevated_rates: Vec<f64>,
    pub match_probability: Vec<f64>,
    pub positive_rate: f64,
}

/// Realized counts of one planted pattern in the generated data.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedTruth {
    pub itemset: Itemset,
    pub target_rr: f64,
    pub elevated_rate: f64,
    pub match_probability: f64,
    pub supp_count: u64,
    pub conf_count: u64,
    pub realized_rr: Option<RelativeRisk>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub n: usize,
    pub n_pos: u64,
    pub seed: u64,
    pub base_positive_rate: f64,
    pub design_positive_rate: f64,
    pub patterns: Vec<PlantedTruth>,
    /// Positive records matching at least one planted pattern.
    pub covered_positives: u64,
}

impl GroundTruth {
    pub fn write_json<W: Write>(&self, mut out: W, schema: &AttributeSchema) -> Result<()> {
        let patterns: Vec<_> = self
            .patterns
            .iter()
            .map(|p| {
                serde_json::json!({
                    "items": schema.itemset_names(&p.itemset),
                    "target_rr": p.target_rr,
                    "elevated_rate": p.elevated_rate,
                    "match_probability": p.match_probability,
                    "supp_count": p.supp_count,
                    "conf_count": p.conf_count,
                    "realized_rr": p.realized_rr,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "n": self.n,
            "n_pos": self.n_pos,
            "seed": self.seed,
            "base_positive_rate": self.base_positive_rate,
            "design_positive_rate": self.design_positive_rate,
            "covered_positives": self.covered_positives,
            "patterns": patterns,
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Draws the dataset. Deterministic in `spec.noise_seed`.
pub fn generate(spec: &PlantSpec) -> Result<(TransactionSet, GroundTruth)> {
    let design = spec.design()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.noise_seed);
    let samplers = spec
        .marginals
        .iter()
        .map(|m| WeightedIndex::new(m).map_err(|e| Error::InvalidParams(e.to_string())))
        .collect::<Result<Vec<_>>>()?;

    let k = spec.planted.len();
    let mut supp = vec![0u64; k];
    let mut conf = vec![0u64; k];
    let mut covered_positives = 0;
    let mut records = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let record: Vec<u32> = samplers.iter().map(|s| s.sample(&mut rng) as u32).collect();
        let mask = spec.match_mask(&record);
        let rate = rate_of(mask, &design.elevated_rates, spec.base_positive_rate);
        let label = rng.random::<f64>() < rate;
        for j in (0..k).filter(|j| mask >> j & 1 == 1) {
            supp[j] += 1;
            conf[j] += u64::from(label);
        }
        if label && mask != 0 {
            covered_positives += 1;
        }
        records.push(record);
        labels.push(label);
    }
    let ts = TransactionSet::from_records(spec.schema.clone(), &records, &labels)?;
    let n = spec.n as u64;
    let n_pos = labels.iter().filter(|&&l| l).count() as u64;
    let patterns = spec
        .planted
        .iter()
        .enumerate()
        .map(|(j, p)| PlantedTruth {
            itemset: p.itemset.clone(),
            target_rr: p.target_rr,
            elevated_rate: design.elevated_rates[j],
            match_probability: design.match_probability[j],
            supp_count: supp[j],
            conf_count: conf[j],
            realized_rr: realized_rr(supp[j], conf[j], n_pos, n),
        })
        .collect();
    Ok((
        ts,
        GroundTruth {
            n: spec.n,
            n_pos,
            seed: spec.noise_seed,
            base_positive_rate: spec.base_positive_rate,
            design_positive_rate: design.positive_rate,
            patterns,
            covered_positives,
        },
    ))
}

/// Plug-in relative risk from raw counts; `None` when the pattern matches
/// every record.
fn realized_rr(supp: u64, conf: u64, n_pos: u64, n: u64) -> Option<RelativeRisk> {
    if supp == n {
        return None;
    }
    if conf == n_pos {
        return Some(RelativeRisk::INFINITE);
    }
    let inside = if supp == 0 { 0.0 } else { conf as f64 / supp as f64 };
    let outside = (n_pos - conf) as f64 / (n - supp) as f64;
    Some(RelativeRisk::new(inside / outside))
}

/// On-disk form of a [`PlantSpec`], with names instead of indices and the
/// class encoding for the emitted CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantSpecFile {
    pub attributes: AttributeSchema,
    /// Per-attribute level probabilities; omitted attributes are uniform.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub marginals: IndexMap<String, Vec<f64>>,
    pub n: usize,
    pub base_positive_rate: f64,
    pub planted: Vec<PlantedEntry>,
    #[serde(default)]
    pub noise_seed: u64,
    #[serde(default = "default_class_column")]
    pub class_column: String,
    #[serde(default = "default_positive")]
    pub positive_label: String,
    #[serde(default = "default_negative")]
    pub negative_label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedEntry {
    pub items: Vec<(String, String)>,
    pub target_rr: f64,
}

fn default_class_column() -> String {
    "class".into()
}

fn default_positive() -> String {
    "1".into()
}

fn default_negative() -> String {
    "0".into()
}

impl PlantSpecFile {
    pub fn read<R: Read>(src: R) -> Result<Self> {
        Ok(serde_json::from_reader(src)?)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn to_spec(&self) -> Result<PlantSpec> {
        let schema = self.attributes.clone();
        let planted = self
            .planted
            .iter()
            .map(|e| {
                Ok(PlantedPattern {
                    itemset: schema.itemset_from_names(e.items.iter().map(|(a, l)| (a, l)))?,
                    target_rr: e.target_rr,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(name) = self
            .marginals
            .keys()
            .find(|name| schema.attribute_index(name).is_none())
        {
            return Err(Error::SchemaMismatch(format!(
                "marginal given for unknown attribute `{name}`"
            )));
        }
        let mut spec = PlantSpec::new(
            schema,
            self.n,
            self.base_positive_rate,
            planted,
            self.noise_seed,
        );
        for (a, attr) in spec.schema.attributes().iter().enumerate() {
            if let Some(m) = self.marginals.get(&attr.name) {
                spec.marginals[a] = m.clone();
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn schema_file(&self) -> SchemaFile {
        SchemaFile {
            class_column: self.class_column.clone(),
            positive_label: self.positive_label.clone(),
            missing_level: None,
            attributes: self.attributes.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Item;
    use crate::mining::count_pass;
    use crate::stats::{relative_risk, Smoothing};

    fn schema(m: usize, levels: usize) -> AttributeSchema {
        AttributeSchema::from_pairs((0..m).map(|a| {
            (
                format!("x{a}"),
                (0..levels).map(|l| l.to_string()).collect::<Vec<_>>(),
            )
        }))
        .unwrap()
    }

    fn pattern(items: &[(usize, usize)], rr: f64) -> PlantedPattern {
        PlantedPattern {
            itemset: Itemset::new(items.iter().map(|&(a, l)| Item::new(a, l)).collect()).unwrap(),
            target_rr: rr,
        }
    }

    #[test]
    fn unplanted_rate_concentrates() {
        let spec = PlantSpec::new(schema(3, 2), 20_000, 0.05, vec![], 11);
        let (ts, truth) = generate(&spec).unwrap();
        let sigma = (0.05 * 0.95 / 20_000f64).sqrt();
        let rate = ts.n_pos() as f64 / ts.n() as f64;
        assert!((rate - 0.05).abs() < 3.0 * sigma, "rate {rate}");
        assert_eq!(truth.n_pos, ts.n_pos());
        assert_eq!(truth.covered_positives, 0);
    }

    #[test]
    fn single_pattern_rr_10() {
        let spec = PlantSpec::new(schema(4, 3), 50_000, 0.02, vec![pattern(&[(0, 1)], 10.0)], 5);
        let design = spec.design().unwrap();
        // Single pattern: rate inside is target * base exactly.
        assert!((design.elevated_rates[0] - 0.2).abs() < 1e-12);
        let (_, truth) = generate(&spec).unwrap();
        let rr = truth.patterns[0].realized_rr.unwrap().value();
        assert!((8.0..=12.5).contains(&rr), "realized {rr}");
    }

    #[test]
    fn overlapping_patterns_hit_targets() {
        let spec = PlantSpec::new(
            schema(4, 4),
            1000,
            0.05,
            vec![pattern(&[(0, 1)], 2.5), pattern(&[(0, 1), (1, 1)], 4.0), pattern(&[(2, 1)], 3.0)],
            0,
        );
        let design = spec.design().unwrap();
        let groups = spec.match_groups().unwrap();
        let achieved = population_rr(&groups, &design.elevated_rates, 0.05);
        for (a, p) in achieved.iter().zip(&spec.planted) {
            assert!((a - p.target_rr).abs() < 1e-9, "{a} vs {}", p.target_rr);
        }
        assert!((design.match_probability[1] - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn jointly_unreachable_targets_are_reported() {
        let spec = PlantSpec::new(
            schema(4, 2),
            1000,
            0.05,
            vec![pattern(&[(0, 1)], 3.0), pattern(&[(0, 1), (1, 1)], 6.0), pattern(&[(2, 1)], 4.0)],
            0,
        );
        assert!(matches!(spec.design(), Err(Error::InfeasibleTarget(_))));
    }

    #[test]
    fn infeasible_target_is_reported() {
        let spec = PlantSpec::new(schema(2, 2), 100, 0.2, vec![pattern(&[(0, 1)], 8.0)], 0);
        assert!(matches!(spec.design(), Err(Error::InfeasibleTarget(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = PlantSpec::new(schema(2, 2), 100, 0.6, vec![], 0);
        assert!(spec.validate().is_err());
        spec.base_positive_rate = 0.1;
        spec.planted.push(pattern(&[(0, 1)], 0.5));
        assert!(spec.validate().is_err());
        spec.planted[0].target_rr = 2.0;
        spec.marginals[0] = vec![0.7, 0.7];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = PlantSpec::new(schema(3, 3), 2000, 0.05, vec![pattern(&[(1, 2)], 4.0)], 99);
        let (a, ta) = generate(&spec).unwrap();
        let (b, tb) = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let other = PlantSpec {
            noise_seed: 100,
            ..spec
        };
        assert_ne!(generate(&other).unwrap().0, a);
    }

    #[test]
    fn truth_agrees_with_bitset_counts() {
        let spec = PlantSpec::new(
            schema(4, 3),
            5000,
            0.03,
            vec![pattern(&[(0, 1), (1, 1)], 6.0), pattern(&[(2, 0)], 3.0)],
            3,
        );
        let (ts, truth) = generate(&spec).unwrap();
        let sets: Vec<Itemset> = truth.patterns.iter().map(|p| p.itemset.clone()).collect();
        for (rule, t) in count_pass(&ts, &sets).iter().zip(&truth.patterns) {
            assert_eq!((rule.supp_count, rule.conf_count), (t.supp_count, t.conf_count));
            let rr = relative_risk(rule.supp_count, rule.conf_count, ts.n_pos(), ts.n() as u64, Smoothing::None)
                .unwrap();
            assert_eq!(Some(rr), t.realized_rr);
        }
    }

    #[test]
    fn marginals_follow_spec() {
        let mut spec = PlantSpec::new(schema(1, 3), 30_000, 0.05, vec![], 1);
        spec.marginals[0] = vec![0.6, 0.3, 0.1];
        let (ts, _) = generate(&spec).unwrap();
        let share = ts.item_column(Item::new(0, 2)).count_ones() as f64 / 30_000.0;
        assert!((share - 0.1).abs() < 3.0 * (0.09f64 / 30_000.0).sqrt());
    }

    #[test]
    fn spec_file_round_trip() {
        let text = r#"{
            "attributes": {"a": ["x", "y"], "b": ["u", "v", "w"]},
            "marginals": {"b": [0.5, 0.25, 0.25]},
            "n": 100,
            "base_positive_rate": 0.1,
            "planted": [{"items": [["a", "y"], ["b", "w"]], "target_rr": 3.0}],
            "noise_seed": 4
        }"#;
        let file = PlantSpecFile::read(text.as_bytes()).unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.marginals, vec![vec![0.5, 0.5], vec![0.5, 0.25, 0.25]]);
        assert_eq!(spec.planted[0].itemset.len(), 2);
        assert_eq!(file.class_column, "class");
        let mut buf = Vec::new();
        file.write(&mut buf).unwrap();
        assert_eq!(PlantSpecFile::read(buf.as_slice()).unwrap(), file);
    }
}
