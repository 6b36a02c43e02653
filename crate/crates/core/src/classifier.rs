//! Representative-pattern selection, the disjunctive classifier, evaluation,
//! parameter sweeps and ROC-space selection.

use std::cmp::Ordering;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::dataset::{AttributeSchema, Itemset, TransactionSet};
use crate::error::{Error, Result};
use crate::mining::{count_pass, mine, MiningParams, RuleSet};
use crate::pruning::{stage1, PrunedFamily};
use crate::stats::{relative_risk, RelativeRisk, Smoothing};

/// A retained risk pattern with its counts and relative risk on the
/// validation set.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub itemset: Itemset,
    pub validated_rr: RelativeRisk,
    pub supp_count: u64,
    pub conf_count: u64,
}

/// How positive validation records contribute patterns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    /// Records already matched by a retained pattern add nothing.
    #[default]
    Coverage,
    /// Every record adds its best matching pattern not yet retained.
    PerRecord,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub train_fingerprint: String,
    pub validation_fingerprint: String,
    pub schema_fingerprint: String,
    pub selection: SelectionPolicy,
    /// Order in which positive validation records were visited.
    pub record_order: String,
}

/// Ordered, duplicate-free risk patterns. A record is positive iff at least
/// one pattern matches it.
#[derive(Clone, Debug, PartialEq)]
pub struct Classifier {
    pub schema: AttributeSchema,
    pub patterns: Vec<Pattern>,
    pub params: MiningParams,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct PatternRecord {
    items: Vec<(String, String)>,
    validated_rr: RelativeRisk,
    supp_count: u64,
    conf_count: u64,
}

#[derive(Serialize, Deserialize)]
struct ClassifierFile {
    schema_fingerprint: String,
    schema: AttributeSchema,
    params: MiningParams,
    provenance: Provenance,
    patterns: Vec<PatternRecord>,
}

impl Classifier {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn itemsets(&self) -> impl Iterator<Item = &Itemset> + '_ {
        self.patterns.iter().map(|p| &p.itemset)
    }

    /// Classifies one encoded record (level code per attribute).
    pub fn predict(&self, record: &[u32]) -> Result<bool> {
        if record.len() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "record has {} fields, schema has {} attributes",
                record.len(),
                self.schema.len()
            )));
        }
        for (attr, &code) in self.schema.attributes().iter().zip(record) {
            if code as usize >= attr.level_count() {
                return Err(Error::SchemaMismatch(format!(
                    "attribute `{}` has no level code {code}",
                    attr.name
                )));
            }
        }
        Ok(self.patterns.iter().any(|p| p.itemset.matches(record)))
    }

    /// Predictions for every transaction of `ts`, as a bit row.
    pub fn predict_all(&self, ts: &TransactionSet) -> Result<BitRow> {
        self.check_schema(ts.schema())?;
        let mut out = BitRow::zeros(ts.n());
        for p in &self.patterns {
            out.or_assign(&ts.cover(&p.itemset));
        }
        Ok(out)
    }

    fn check_schema(&self, schema: &AttributeSchema) -> Result<()> {
        if *schema != self.schema {
            return Err(Error::SchemaMismatch(format!(
                "classifier schema {} differs from dataset schema {}",
                self.schema.fingerprint(),
                schema.fingerprint()
            )));
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let file = ClassifierFile {
            schema_fingerprint: self.schema.fingerprint(),
            schema: self.schema.clone(),
            params: self.params,
            provenance: self.provenance.clone(),
            patterns: self
                .patterns
                .iter()
                .map(|p| PatternRecord {
                    items: self.schema.itemset_names(&p.itemset),
                    validated_rr: p.validated_rr,
                    supp_count: p.supp_count,
                    conf_count: p.conf_count,
                })
                .collect(),
        };
        serde_json::to_writer_pretty(&mut out, &file)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_json(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }

    pub fn read_json<R: Read>(src: R) -> Result<Self> {
        let file: ClassifierFile = serde_json::from_reader(src)?;
        if file.schema.fingerprint() != file.schema_fingerprint {
            return Err(Error::SchemaMismatch(format!(
                "embedded schema hashes to {}, file states {}",
                file.schema.fingerprint(),
                file.schema_fingerprint
            )));
        }
        let patterns = file
            .patterns
            .into_iter()
            .map(|p| {
                Ok(Pattern {
                    itemset: file.schema.itemset_from_names(p.items)?,
                    validated_rr: p.validated_rr,
                    supp_count: p.supp_count,
                    conf_count: p.conf_count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema: file.schema,
            patterns,
            params: file.params,
            provenance: file.provenance,
        })
    }
}

/// Ranking used to pick a pattern for a record: higher validated risk first,
/// then shorter, then item order.
fn rank(a: &Pattern, b: &Pattern) -> Ordering {
    b.validated_rr
        .cmp(&a.validated_rr)
        .then_with(|| a.itemset.len().cmp(&b.itemset.len()))
        .then_with(|| a.itemset.cmp(&b.itemset))
}

/// Recomputes every family pattern's relative risk on `validation` and
/// picks, for each positive validation record in dataset order, the best
/// pattern that describes it.
///
/// Patterns whose risk is undefined on the validation set are skipped.
pub fn select_representatives(
    family: &PrunedFamily,
    validation: &TransactionSet,
    policy: SelectionPolicy,
) -> Result<Classifier> {
    if validation.n_pos() == 0 {
        return Err(Error::NoPositives);
    }
    let itemsets: Vec<Itemset> = family.itemsets().cloned().collect();
    let n = validation.n() as u64;
    let mut candidates: Vec<Pattern> = count_pass(validation, &itemsets)
        .into_iter()
        .filter_map(|r| {
            let rr = relative_risk(
                r.supp_count,
                r.conf_count,
                validation.n_pos(),
                n,
                Smoothing::None,
            )
            .ok()?;
            Some(Pattern {
                itemset: r.antecedent,
                validated_rr: rr,
                supp_count: r.supp_count,
                conf_count: r.conf_count,
            })
        })
        .filter(|p| p.conf_count > 0)
        .collect();
    candidates.sort_by(rank);
    let covers: Vec<BitRow> = candidates
        .iter()
        .map(|p| validation.cover(&p.itemset))
        .collect();

    let mut retained = vec![false; candidates.len()];
    let mut order = Vec::new();
    for row in validation.positive_rows() {
        let covered = || order.iter().any(|&i: &usize| covers[i].get(row));
        let pick = match policy {
            SelectionPolicy::Coverage if covered() => None,
            SelectionPolicy::Coverage => (0..candidates.len()).find(|&i| covers[i].get(row)),
            SelectionPolicy::PerRecord => {
                (0..candidates.len()).find(|&i| !retained[i] && covers[i].get(row))
            }
        };
        if let Some(i) = pick {
            retained[i] = true;
            order.push(i);
        }
    }
    if order.is_empty() {
        log::warn!("no family pattern matches a positive validation record; classifier is empty");
    }
    let patterns = order.into_iter().map(|i| candidates[i].clone()).collect();
    Ok(Classifier {
        schema: validation.schema().clone(),
        patterns,
        params: family.params,
        provenance: Provenance {
            train_fingerprint: family.fingerprint.clone(),
            validation_fingerprint: validation.fingerprint(),
            schema_fingerprint: validation.schema().fingerprint(),
            selection: policy,
            record_order: "dataset".into(),
        },
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        Self { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    /// True-positive rate; 0 when there are no positives.
    pub fn sensitivity(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// True-negative rate; 0 when there are no negatives.
    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn global_error(&self) -> f64 {
        ratio(self.fp + self.fn_, self.total())
    }

    pub fn point(&self, label: impl Into<String>, params: Option<PointParams>) -> PerformancePoint {
        PerformancePoint {
            label: label.into(),
            params,
            sensitivity: self.sensitivity(),
            specificity: self.specificity(),
            global_error: self.global_error(),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// The grid coordinates reported next to a performance point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub min_local_support: f64,
    pub min_conf_ratio: f64,
    pub max_length: usize,
}

impl From<&MiningParams> for PointParams {
    fn from(p: &MiningParams) -> Self {
        Self {
            min_local_support: p.min_local_support,
            min_conf_ratio: p.min_conf_ratio,
            max_length: p.max_length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformancePoint {
    pub label: String,
    pub params: Option<PointParams>,
    pub sensitivity: f64,
    pub specificity: f64,
    pub global_error: f64,
}

impl PerformancePoint {
    pub fn new(label: impl Into<String>, sensitivity: f64, specificity: f64, global_error: f64) -> Self {
        Self {
            label: label.into(),
            params: None,
            sensitivity,
            specificity,
            global_error,
        }
    }

    /// Northwest dominance: at least as good on both axes and strictly
    /// better on one.
    pub fn dominates(&self, other: &PerformancePoint) -> bool {
        self.sensitivity >= other.sensitivity
            && self.specificity >= other.specificity
            && (self.sensitivity > other.sensitivity || self.specificity > other.specificity)
    }
}

/// Confusion counts of `c` on `test` and the derived point.
pub fn evaluate(c: &Classifier, test: &TransactionSet) -> Result<(ConfusionMatrix, PerformancePoint)> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predicted = c.predict_all(test)?;
    let tp = predicted.and_count(test.labels());
    let predicted_pos = predicted.count_ones();
    let fp = predicted_pos - tp;
    let fn_ = test.n_pos() - tp;
    let tn = test.n_neg() - fp;
    let cm = ConfusionMatrix::new(tp, fn_, fp, tn);
    Ok((cm, cm.point("", Some(PointParams::from(&c.params)))))
}

/// Everything a training run produces.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub rules: RuleSet,
    pub family: PrunedFamily,
    pub classifier: Classifier,
}

/// Mining, first-stage pruning on `train`, then representative selection on
/// `validation`.
pub fn train(
    train: &TransactionSet,
    validation: &TransactionSet,
    params: &MiningParams,
    policy: SelectionPolicy,
) -> Result<TrainedModel> {
    if train.schema() != validation.schema() {
        return Err(Error::SchemaMismatch(
            "training and validation schemas differ".into(),
        ));
    }
    let rules = mine(train, params)?;
    let family = stage1(&rules, train, params)?;
    let classifier = select_representatives(&family, validation, policy)?;
    Ok(TrainedModel {
        rules,
        family,
        classifier,
    })
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub classifier: Classifier,
    pub confusion: ConfusionMatrix,
    pub point: PerformancePoint,
}

/// One full train/select/evaluate run.
pub fn run_pipeline(
    train_set: &TransactionSet,
    validation: &TransactionSet,
    test: &TransactionSet,
    params: &MiningParams,
    policy: SelectionPolicy,
) -> Result<Evaluation> {
    let model = train(train_set, validation, params, policy)?;
    let (confusion, point) = evaluate(&model.classifier, test)?;
    Ok(Evaluation {
        classifier: model.classifier,
        confusion,
        point,
    })
}

/// Runs the pipeline for each grid entry in parallel. Results keep grid
/// order and points are labelled `1..=len`.
pub fn grid_search(
    train_set: &TransactionSet,
    validation: &TransactionSet,
    test: &TransactionSet,
    grid: &[MiningParams],
    policy: SelectionPolicy,
) -> Vec<Result<Evaluation>> {
    grid.par_iter()
        .enumerate()
        .map(|(i, params)| {
            let mut eval = run_pipeline(train_set, validation, test, params, policy)?;
            eval.point.label = (i + 1).to_string();
            Ok(eval)
        })
        .collect()
}

/// Cartesian product, local support outermost and maximum length innermost.
pub fn param_grid(
    local_supports: &[f64],
    conf_ratios: &[f64],
    max_lengths: &[usize],
    base: &MiningParams,
) -> Vec<MiningParams> {
    let mut grid = Vec::new();
    for &s in local_supports {
        for &c in conf_ratios {
            for &m in max_lengths {
                grid.push(MiningParams {
                    min_local_support: s,
                    min_conf_ratio: c,
                    max_length: m,
                    ..*base
                });
            }
        }
    }
    grid
}

/// The 18-point sweep: local support {9%, 10%, 15%}, confidence ratio
/// {3, 4, 5}, maximum length {3, 4}.
pub fn standard_grid(base: &MiningParams) -> Vec<MiningParams> {
    param_grid(&[0.09, 0.10, 0.15], &[3.0, 4.0, 5.0], &[3, 4], base)
}

/// Scoring among nondominated ROC points. Ties always fall back to lower
/// global error, then lower index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocPolicy {
    /// Maximise `min(sensitivity, specificity)`.
    #[default]
    MaxMin,
    /// Maximise `sensitivity + specificity - 1`.
    Youden,
    /// Minimise the distance to `(1, 1)`.
    NearestCorner,
}

impl RocPolicy {
    fn score(self, p: &PerformancePoint) -> f64 {
        match self {
            RocPolicy::MaxMin => p.sensitivity.min(p.specificity),
            RocPolicy::Youden => p.sensitivity + p.specificity - 1.0,
            RocPolicy::NearestCorner => {
                -(1.0 - p.sensitivity).hypot(1.0 - p.specificity)
            }
        }
    }
}

/// Indices of points no other point dominates.
pub fn nondominated(points: &[PerformancePoint]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| q.dominates(&points[i])))
        .collect()
}

/// Picks a nondominated point; returns its 0-based index. `None` for an
/// empty slice.
pub fn roc_select(points: &[PerformancePoint], policy: RocPolicy) -> Option<(usize, &PerformancePoint)> {
    nondominated(points)
        .into_iter()
        .min_by(|&a, &b| {
            let (pa, pb) = (&points[a], &points[b]);
            policy
                .score(pb)
                .total_cmp(&policy.score(pa))
                .then(pa.global_error.total_cmp(&pb.global_error))
                .then(a.cmp(&b))
        })
        .map(|i| (i, &points[i]))
}
