//! Categorical schema, bit-level transaction encoding, CSV ingestion and
//! train/validation/test partitioning.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitRow;
use crate::error::{Error, Result};

/// A categorical attribute and its ordered levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub levels: Vec<String>,
}

impl Attribute {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, value: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == value)
    }
}

/// Ordered categorical attributes. Item indices are assigned attribute by
/// attribute, level by level, so the order here fixes the item numbering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "IndexMap<String, Vec<String>>",
    into = "IndexMap<String, Vec<String>>"
)]
pub struct AttributeSchema {
    attributes: Vec<Attribute>,
    offsets: Vec<usize>,
}

impl AttributeSchema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::InvalidSchema("no attributes".into()));
        }
        let mut seen = HashMap::new();
        for (i, attr) in attributes.iter().enumerate() {
            if attr.name.is_empty() {
                return Err(Error::InvalidSchema(format!("attribute {i} has an empty name")));
            }
            if seen.insert(attr.name.as_str(), i).is_some() {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if attr.levels.len() < 2 {
                return Err(Error::DegenerateAttribute {
                    name: attr.name.clone(),
                    distinct: attr.levels.len(),
                });
            }
            let mut levels = HashMap::new();
            for level in &attr.levels {
                if levels.insert(level.as_str(), ()).is_some() {
                    return Err(Error::InvalidSchema(format!(
                        "attribute `{}` repeats level `{level}`",
                        attr.name
                    )));
                }
            }
        }
        let mut offsets = Vec::with_capacity(attributes.len() + 1);
        let mut acc = 0;
        for attr in &attributes {
            offsets.push(acc);
            acc += attr.level_count();
        }
        offsets.push(acc);
        Ok(Self {
            attributes,
            offsets,
        })
    }

    /// Convenience constructor from `(name, levels)` pairs.
    pub fn from_pairs<N, L, S>(pairs: impl IntoIterator<Item = (N, L)>) -> Result<Self>
    where
        N: Into<String>,
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(name, levels)| Attribute {
                    name: name.into(),
                    levels: levels.into_iter().map(Into::into).collect(),
                })
                .collect(),
        )
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    /// Number of attributes (m).
    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    /// Total number of items, the sum of all level counts.
    pub fn item_count(&self) -> usize {
        self.offsets[self.attributes.len()]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Dense index of an item in `0..item_count()`.
    pub fn item_index(&self, item: Item) -> usize {
        self.offsets[item.attribute] + item.level
    }

    pub fn item_at(&self, index: usize) -> Item {
        let attribute = self.offsets.partition_point(|&o| o <= index) - 1;
        Item {
            attribute,
            level: index - self.offsets[attribute],
        }
    }

    pub fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.attributes
            .iter()
            .enumerate()
            .flat_map(|(a, attr)| (0..attr.level_count()).map(move |l| Item::new(a, l)))
    }

    pub fn contains_item(&self, item: Item) -> bool {
        self.attributes
            .get(item.attribute)
            .is_some_and(|a| item.level < a.level_count())
    }

    /// Resolves an `(attribute name, level name)` pair.
    pub fn item_by_name(&self, attribute: &str, level: &str) -> Result<Item> {
        let a = self
            .attribute_index(attribute)
            .ok_or_else(|| Error::SchemaMismatch(format!("unknown attribute `{attribute}`")))?;
        let l = self.attributes[a].level_index(level).ok_or_else(|| {
            Error::SchemaMismatch(format!("attribute `{attribute}` has no level `{level}`"))
        })?;
        Ok(Item::new(a, l))
    }

    pub fn item_names(&self, item: Item) -> (&str, &str) {
        let attr = &self.attributes[item.attribute];
        (&attr.name, &attr.levels[item.level])
    }

    pub fn itemset_from_names<A, L>(&self, pairs: impl IntoIterator<Item = (A, L)>) -> Result<Itemset>
    where
        A: AsRef<str>,
        L: AsRef<str>,
    {
        let items = pairs
            .into_iter()
            .map(|(a, l)| self.item_by_name(a.as_ref(), l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Itemset::new(items)
    }

    pub fn itemset_names(&self, itemset: &Itemset) -> Vec<(String, String)> {
        itemset
            .iter()
            .map(|&it| {
                let (a, l) = self.item_names(it);
                (a.to_owned(), l.to_owned())
            })
            .collect()
    }

    /// Human-readable rendering, e.g. `age=2, referral=1`.
    pub fn describe(&self, itemset: &Itemset) -> String {
        itemset
            .iter()
            .map(|&it| {
                let (a, l) = self.item_names(it);
                format!("{a}={l}")
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn validate_itemset(&self, itemset: &Itemset) -> Result<()> {
        match itemset.iter().find(|&&it| !self.contains_item(it)) {
            Some(it) => Err(Error::SchemaMismatch(format!(
                "item (attribute {}, level {}) outside schema",
                it.attribute, it.level
            ))),
            None => Ok(()),
        }
    }

    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        self.hash_into(&mut h);
        hex_prefix(&h.finalize())
    }

    fn hash_into(&self, h: &mut Sha256) {
        for attr in &self.attributes {
            h.update((attr.name.len() as u64).to_le_bytes());
            h.update(attr.name.as_bytes());
            h.update((attr.levels.len() as u64).to_le_bytes());
            for level in &attr.levels {
                h.update((level.len() as u64).to_le_bytes());
                h.update(level.as_bytes());
            }
        }
    }
}

impl TryFrom<IndexMap<String, Vec<String>>> for AttributeSchema {
    type Error = Error;

    fn try_from(map: IndexMap<String, Vec<String>>) -> Result<Self> {
        Self::new(
            map.into_iter()
                .map(|(name, levels)| Attribute { name, levels })
                .collect(),
        )
    }
}

impl From<AttributeSchema> for IndexMap<String, Vec<String>> {
    fn from(schema: AttributeSchema) -> Self {
        schema
            .attributes
            .into_iter()
            .map(|a| (a.name, a.levels))
            .collect()
    }
}

/// Indicator that attribute `attribute` takes level `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Item {
    pub attribute: usize,
    pub level: usize,
}

impl Item {
    pub const fn new(attribute: usize, level: usize) -> Self {
        Self { attribute, level }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}={}", self.attribute, self.level)
    }
}

/// A non-empty conjunction of items over distinct attributes, kept sorted by
/// attribute index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Item>", into = "Vec<Item>")]
pub struct Itemset(Vec<Item>);

impl Itemset {
    pub fn new(mut items: Vec<Item>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidItemset("itemset is empty".into()));
        }
        items.sort_unstable();
        if let Some(w) = items.windows(2).find(|w| w[0].attribute == w[1].attribute) {
            return Err(Error::InvalidItemset(format!(
                "attribute {} appears twice ({} and {})",
                w[0].attribute, w[0], w[1]
            )));
        }
        Ok(Self(items))
    }

    pub fn single(item: Item) -> Self {
        Self(vec![item])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Item> {
        self.0.iter()
    }

    pub fn contains(&self, item: Item) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    /// True when every item of `self` is in `other`.
    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut rest = other.0.iter();
        'outer: for a in &self.0 {
            for b in rest.by_ref() {
                match b.cmp(a) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn is_proper_subset_of(&self, other: &Itemset) -> bool {
        self.len() < other.len() && self.is_subset_of(other)
    }

    /// All subsets with exactly one item removed.
    pub fn drop_one(&self) -> impl Iterator<Item = Itemset> + '_ {
        (0..self.0.len()).filter(|_| self.0.len() > 1).map(move |skip| {
            Itemset(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &it)| it)
                    .collect(),
            )
        })
    }

    /// True when all items are set in a record given as per-attribute level codes.
    pub fn matches(&self, record: &[u32]) -> bool {
        self.0
            .iter()
            .all(|it| record.get(it.attribute).is_some_and(|&l| l as usize == it.level))
    }

    pub(crate) fn from_sorted_unchecked(items: Vec<Item>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0].attribute < w[1].attribute));
        Self(items)
    }
}

impl TryFrom<Vec<Item>> for Itemset {
    type Error = Error;

    fn try_from(items: Vec<Item>) -> Result<Self> {
        Self::new(items)
    }
}

impl From<Itemset> for Vec<Item> {
    fn from(s: Itemset) -> Self {
        s.0
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, it) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{it}")?;
        }
        write!(f, "}}")
    }
}

impl<'a> IntoIterator for &'a Itemset {
    type Item = &'a Item;
    type IntoIter = std::slice::Iter<'a, Item>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Encoded transactions: one bit column per item plus the class label row.
///
/// Level codes are also kept row-major so single records can be tested
/// against a pattern without touching every column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransactionSet {
    schema: AttributeSchema,
    n: usize,
    codes: Vec<u32>,
    item_columns: Vec<BitRow>,
    labels: BitRow,
    n_pos: u64,
}

impl TransactionSet {
    /// Builds a transaction set from per-row level codes and labels.
    pub fn from_records(
        schema: AttributeSchema,
        records: &[Vec<u32>],
        labels: &[bool],
    ) -> Result<Self> {
        if records.len() != labels.len() {
            return Err(Error::Malformed(format!(
                "{} records but {} labels",
                records.len(),
                labels.len()
            )));
        }
        let m = schema.len();
        let mut codes = Vec::with_capacity(records.len() * m);
        for (row, rec) in records.iter().enumerate() {
            if rec.len() != m {
                return Err(Error::RowArity {
                    row: row + 1,
                    expected: m,
                    found: rec.len(),
                });
            }
            for (a, &code) in rec.iter().enumerate() {
                if code as usize >= schema.attributes[a].level_count() {
                    return Err(Error::UnknownLevel {
                        row: row + 1,
                        column: schema.attributes[a].name.clone(),
                        value: code.to_string(),
                    });
                }
            }
            codes.extend_from_slice(rec);
        }
        Ok(Self::from_flat_codes(schema, codes, labels))
    }

    fn from_flat_codes(schema: AttributeSchema, codes: Vec<u32>, labels: &[bool]) -> Self {
        let m = schema.len();
        let n = labels.len();
        debug_assert_eq!(codes.len(), n * m);
        let mut item_columns = vec![BitRow::zeros(n); schema.item_count()];
        for (row, rec) in codes.chunks_exact(m.max(1)).enumerate().take(n) {
            for (a, &code) in rec.iter().enumerate() {
                item_columns[schema.offsets[a] + code as usize].set(row);
            }
        }
        let labels = BitRow::from_bools(labels.iter().copied());
        let n_pos = labels.count_ones();
        Self {
            schema,
            n,
            codes,
            item_columns,
            labels,
            n_pos,
        }
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn n_pos(&self) -> u64 {
        self.n_pos
    }

    pub fn n_neg(&self) -> u64 {
        self.n as u64 - self.n_pos
    }

    pub fn labels(&self) -> &BitRow {
        &self.labels
    }

    pub fn label(&self, row: usize) -> bool {
        self.labels.get(row)
    }

    pub fn item_column(&self, item: Item) -> &BitRow {
        &self.item_columns[self.schema.item_index(item)]
    }

    /// Level codes of one transaction, indexed by attribute.
    pub fn record(&self, row: usize) -> &[u32] {
        let m = self.schema.len();
        &self.codes[row * m..(row + 1) * m]
    }

    pub fn records(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.n).map(move |r| self.record(r))
    }

    /// Rows whose label is positive, in dataset order.
    pub fn positive_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter_ones()
    }

    /// Bit row of transactions containing every item of `itemset`.
    pub fn cover(&self, itemset: &Itemset) -> BitRow {
        let mut items = itemset.iter();
        let mut acc = match items.next() {
            Some(&first) => self.item_column(first).clone(),
            None => BitRow::ones(self.n),
        };
        for &it in items {
            acc.and_assign(self.item_column(it));
        }
        acc
    }

    /// Restriction to the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> TransactionSet {
        let m = self.schema.len();
        let mut codes = Vec::with_capacity(rows.len() * m);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            codes.extend_from_slice(self.record(r));
            labels.push(self.label(r));
        }
        Self::from_flat_codes(self.schema.clone(), codes, &labels)
    }

    /// Reconstructs the categorical rows (attribute values only).
    pub fn decode(&self) -> Vec<Vec<String>> {
        self.records()
            .map(|rec| {
                rec.iter()
                    .zip(&self.schema.attributes)
                    .map(|(&c, attr)| attr.levels[c as usize].clone())
                    .collect()
            })
            .collect()
    }

    /// Content hash over schema, records and labels.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        self.schema.hash_into(&mut h);
        h.update((self.n as u64).to_le_bytes());
        for &c in &self.codes {
            h.update(c.to_le_bytes());
        }
        for w in self.labels.words() {
            h.update(w.to_le_bytes());
        }
        hex_prefix(&h.finalize())
    }

    /// Writes the set as CSV with the class column last.
    pub fn write_csv<W: Write>(
        &self,
        out: W,
        class_column: &str,
        positive_label: &str,
        negative_label: &str,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.schema.attributes.iter().map(|a| a.name.as_str()).collect();
        header.push(class_column);
        w.write_record(&header)?;
        for (row, rec) in self.records().enumerate() {
            let mut fields: Vec<&str> = rec
                .iter()
                .zip(&self.schema.attributes)
                .map(|(&c, attr)| attr.levels[c as usize].as_str())
                .collect();
            fields.push(if self.label(row) {
                positive_label
            } else {
                negative_label
            });
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn hex_prefix(digest: &[u8]) -> String {
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Persisted schema: attribute levels in first-appearance order plus the
/// class definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaFile {
    pub class_column: String,
    pub positive_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_level: Option<String>,
    pub attributes: AttributeSchema,
}

impl SchemaFile {
    pub fn read<R: Read>(src: R) -> Result<Self> {
        Ok(serde_json::from_reader(src)?)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn ingest_options(&self) -> IngestOptions {
        IngestOptions {
            missing_level: self.missing_level.clone(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct IngestOptions {
    /// When set, blank cells become this explicit level instead of an error.
    pub missing_level: Option<String>,
}

impl IngestOptions {
    fn resolve<'a>(&'a self, value: &'a str, row: usize, column: &str) -> Result<&'a str> {
        if !value.is_empty() {
            return Ok(value);
        }
        self.missing_level.as_deref().ok_or_else(|| Error::MissingValue {
            row,
            column: column.to_owned(),
        })
    }
}

/// Raw CSV table: header and string rows, arity-checked.
#[derive(Clone, Debug)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn read<R: Read>(src: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(src);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(Error::EmptyDataset);
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::RowArity {
                    row: i + 1,
                    expected: header.len(),
                    found: rec.len(),
                });
            }
            rows.push(rec.iter().map(str::to_owned).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write<W: Write>(&self, out: W, rows: &[usize]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for &r in rows {
            w.write_record(&self.rows[r])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn infer_schema(&self, class_column: &str, opts: &IngestOptions) -> Result<AttributeSchema> {
        let class_idx = self
            .column(class_column)
            .ok_or_else(|| Error::MissingClassColumn(class_column.to_owned()))?;
        if self.rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut attributes = Vec::with_capacity(self.header.len() - 1);
        for (c, name) in self.header.iter().enumerate() {
            if c == class_idx {
                continue;
            }
            let mut levels: Vec<String> = Vec::new();
            for (r, row) in self.rows.iter().enumerate() {
                let v = opts.resolve(&row[c], r + 1, name)?;
                if !levels.iter().any(|l| l == v) {
                    levels.push(v.to_owned());
                }
            }
            if levels.len() < 2 {
                return Err(Error::DegenerateAttribute {
                    name: name.clone(),
                    distinct: levels.len(),
                });
            }
            attributes.push(Attribute {
                name: name.clone(),
                levels,
            });
        }
        AttributeSchema::new(attributes)
    }

    pub fn encode(
        &self,
        schema: &AttributeSchema,
        class_column: &str,
        positive_label: &str,
        opts: &IngestOptions,
    ) -> Result<TransactionSet> {
        let class_idx = self
            .column(class_column)
            .ok_or_else(|| Error::MissingClassColumn(class_column.to_owned()))?;
        if self.rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let columns = schema
            .attributes
            .iter()
            .map(|a| {
                self.column(&a.name).ok_or_else(|| {
                    Error::SchemaMismatch(format!("attribute `{}` missing from CSV header", a.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut codes = Vec::with_capacity(self.rows.len() * schema.len());
        let mut labels = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for (attr, &c) in schema.attributes.iter().zip(&columns) {
                let v = opts.resolve(&row[c], r + 1, &attr.name)?;
                let level = attr.level_index(v).ok_or_else(|| Error::UnknownLevel {
                    row: r + 1,
                    column: attr.name.clone(),
                    value: v.to_owned(),
                })?;
                codes.push(level as u32);
            }
            let class = opts.resolve(&row[class_idx], r + 1, class_column)?;
            labels.push(class == positive_label);
        }
        Ok(TransactionSet::from_flat_codes(schema.clone(), codes, &labels))
    }
}

/// Schema over all non-class columns, levels in first-appearance order.
pub fn infer_schema<R: Read>(
    src: R,
    class_column: &str,
    opts: &IngestOptions,
) -> Result<AttributeSchema> {
    RawTable::read(src)?.infer_schema(class_column, opts)
}

/// Encodes CSV rows against `schema`; the label bit is set iff the class
/// value equals `positive_label`.
pub fn encode<R: Read>(
    src: R,
    schema: &AttributeSchema,
    class_column: &str,
    positive_label: &str,
    opts: &IngestOptions,
) -> Result<TransactionSet> {
    RawTable::read(src)?.encode(schema, class_column, positive_label, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.5,
            validation_fraction: 0.25,
            test_fraction: 0.25,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn new(fractions: [f64; 3], seed: u64, stratified: bool) -> Result<Self> {
        let spec = Self {
            train_fraction: fractions[0],
            validation_fraction: fractions[1],
            test_fraction: fractions[2],
            seed,
            stratified,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fractions(&self) -> [f64; 3] {
        [
            self.train_fraction,
            self.validation_fraction,
            self.test_fraction,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.fractions();
        if let Some(bad) = f.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidSplit(format!("fraction {bad} not in (0, 1)")));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!("fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Largest-remainder apportionment of `total` among `fractions`.
fn apportion(total: usize, fractions: [f64; 3]) -> [usize; 3] {
    let exact = fractions.map(|f| f * total as f64);
    let mut counts = exact.map(|x| x.floor() as usize);
    let assigned: usize = counts.iter().sum();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Row indices of the train, validation and test partitions, each ascending.
pub fn split_indices(ts: &TransactionSet, spec: &SplitSpec) -> Result<[Vec<usize>; 3]> {
    spec.validate()?;
    if ts.n() < 3 {
        return Err(Error::InvalidSplit(format!(
            "need at least 3 transactions, have {}",
            ts.n()
        )));
    }
    if spec.stratified && ts.n_pos() < 3 {
        return Err(Error::InvalidSplit(format!(
            "stratified split needs at least 3 positives, have {}",
            ts.n_pos()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let strata: Vec<Vec<usize>> = if spec.stratified {
        let (pos, neg): (Vec<usize>, Vec<usize>) = (0..ts.n()).partition(|&r| ts.label(r));
        vec![pos, neg]
    } else {
        vec![(0..ts.n()).collect()]
    };
    let mut parts: [Vec<usize>; 3] = Default::default();
    for mut stratum in strata {
        stratum.shuffle(&mut rng);
        let counts = apportion(stratum.len(), spec.fractions());
        let mut rest = stratum.as_slice();
        for (part, &count) in parts.iter_mut().zip(&counts) {
            let (head, tail) = rest.split_at(count);
            part.extend_from_slice(head);
            rest = tail;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(parts)
}

/// Splits into (train, validation, test). Rows keep their original relative
/// order inside each partition.
pub fn split(
    ts: &TransactionSet,
    spec: &SplitSpec,
) -> Result<(TransactionSet, TransactionSet, TransactionSet)> {
    let [a, b, c] = split_indices(ts, spec)?;
    Ok((ts.subset(&a), ts.subset(&b), ts.subset(&c)))
}
