//! Data tables behind the charts: random tables labelled from the taxonomy and
//! ingested real-world CSV tables.

use std::collections::BTreeSet;
use std::io::Read;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rust_decimal::prelude::FromPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hierarchy::{EntityHierarchy, EntitySample, HierarchyError};

/// Probability that a chart is backed by a freshly generated random table.
pub const RANDOM_TABLE_PROBABILITY: f64 = 0.20;
pub const RANDOM_VALUE_MIN: f64 = 1.0;
pub const RANDOM_VALUE_MAX: f64 = 200.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("not enough entities: need {needed}, have {available}")]
    InsufficientEntities { needed: usize, available: usize },
    #[error("invalid table shape {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
    #[error("cannot parse cell at row {row}, column {col}")]
    ParseError { row: usize, col: usize },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Random,
    RealWorld,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataTable {
    pub table_id: String,
    /// Corner cell of the CSV: the quantity being measured.
    pub measure: String,
    pub entity_names: Vec<String>,
    pub legend_labels: Vec<String>,
    /// Row-major, `legend_labels.len()` rows of `entity_names.len()` cells.
    pub values: Vec<Vec<Decimal>>,
    pub source_kind: SourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<EntitySample>,
}

fn check_distinct(labels: &[String]) -> Result<(), TableError> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(TableError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Rounds half away from zero (half-up for the positive values drawn here) to
/// two decimals.
pub fn round_2dp(x: Decimal) -> Decimal {
    x.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero)
}

pub fn round_f64_2dp(x: f64) -> Decimal {
    round_2dp(Decimal::from_f64(x).expect("finite draw"))
}

impl DataTable {
    pub fn new(
        measure: impl Into<String>,
        entity_names: Vec<String>,
        legend_labels: Vec<String>,
        values: Vec<Vec<Decimal>>,
        source_kind: SourceKind,
        sample: Option<EntitySample>,
    ) -> Result<Self, TableError> {
        let (rows, cols) = (legend_labels.len(), entity_names.len());
        if rows == 0 || cols == 0 || values.len() != rows || values.iter().any(|r| r.len() != cols) {
            return Err(TableError::InvalidShape { rows, cols });
        }
        check_distinct(&entity_names)?;
        check_distinct(&legend_labels)?;
        let mut t = DataTable {
            table_id: String::new(),
            measure: measure.into(),
            entity_names,
            legend_labels,
            values,
            source_kind,
            sample,
        };
        t.table_id = t.content_id();
        Ok(t)
    }

    pub fn rows(&self) -> usize {
        self.legend_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.entity_names.len()
    }

    /// `T_` followed by the first 8 hex digits of the SHA-256 of the CSV form.
    pub fn content_id(&self) -> String {
        let digest = Sha256::digest(self.to_csv().as_bytes());
        format!("T_{}", &hex::encode(digest)[..8])
    }

    pub fn column(&self, entity: usize) -> Vec<Decimal> {
        self.values.iter().map(|r| r[entity]).collect()
    }

    /// Header row (measure, entities) followed by one row per legend.
    pub fn to_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![std::iter::once(&self.measure).chain(&self.entity_names).cloned().collect::<Vec<_>>()];
        for (label, row) in self.legend_labels.iter().zip(&self.values) {
            rows.push(std::iter::once(label.clone()).chain(row.iter().map(Decimal::to_string)).collect());
        }
        rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        for rec in self.to_rows() {
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// Contiguous sub-block; the result gets a fresh content id.
    pub fn sub_block(&self, row0: usize, rows: usize, col0: usize, cols: usize) -> Result<DataTable, TableError> {
        if rows == 0 || cols == 0 || row0 + rows > self.rows() || col0 + cols > self.cols() {
            return Err(TableError::InvalidShape { rows, cols });
        }
        DataTable::new(
            self.measure.clone(),
            self.entity_names[col0..col0 + cols].to_vec(),
            self.legend_labels[row0..row0 + rows].to_vec(),
            self.values[row0..row0 + rows].iter().map(|r| r[col0..col0 + cols].to_vec()).collect(),
            self.source_kind,
            self.sample.clone(),
        )
    }
}

fn parse_cell(cell: &str) -> Option<Decimal> {
    let c = cell.trim();
    Decimal::from_str(c).or_else(|_| Decimal::from_scientific(c)).ok()
}

/// Parses a real-world table. Row and column numbers in errors are 1-based
/// positions in the file (the header is row 1).
pub fn ingest_csv<R: Read>(stream: R) -> Result<DataTable, TableError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(stream);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| TableError::Csv(e.to_string()))?,
        None => return Err(TableError::InvalidShape { rows: 0, cols: 0 }),
    };
    let measure = header.get(0).unwrap_or("").trim().to_string();
    let entity_names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    check_distinct(&entity_names)?;
    let mut legend_labels = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| TableError::Csv(e.to_string()))?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if rec.len() != entity_names.len() + 1 {
            return Err(TableError::ParseError { row, col: rec.len().min(entity_names.len() + 1) + 1 });
        }
        legend_labels.push(rec[0].trim().to_string());
        let cells = rec
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| parse_cell(c).ok_or(TableError::ParseError { row, col: j + 1 }))
            .collect::<Result<Vec<_>, _>>()?;
        values.push(cells);
    }
    DataTable::new(measure, entity_names, legend_labels, values, SourceKind::RealWorld, None)
}

/// A table of uniform random values in `[1, 200]`, labelled from `sample`.
///
/// Entities come from the shuffled sample; with several rows the legend labels
/// are further sample members, with one row the sole series is named after the
/// grandparent class.
pub fn random_table<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    sample: &EntitySample,
    rng: &mut R,
) -> Result<DataTable, TableError> {
    if rows == 0 || cols == 0 {
        return Err(TableError::InvalidShape { rows, cols });
    }
    let needed = cols + if rows > 1 { rows } else { 0 };
    if sample.len() < needed {
        return Err(TableError::InsufficientEntities { needed, available: sample.len() });
    }
    let mut pool = sample.order.clone();
    pool.shuffle(rng);
    let entities = pool[..cols].to_vec();
    let legends = if rows > 1 { pool[cols..cols + rows].to_vec() } else { vec![sample.grandparent.clone()] };
    let values = draw_values(rows, cols, rng);
    DataTable::new("Value", entities, legends, values, SourceKind::Random, Some(sample.clone()))
}

/// A table of `points` random observations per entity, for box plots.
pub fn random_observation_table<R: Rng + ?Sized>(
    points: usize,
    cols: usize,
    sample: &EntitySample,
    rng: &mut R,
) -> Result<DataTable, TableError> {
    if points == 0 || cols == 0 {
        return Err(TableError::InvalidShape { rows: points, cols });
    }
    if sample.len() < cols {
        return Err(TableError::InsufficientEntities { needed: cols, available: sample.len() });
    }
    let mut pool = sample.order.clone();
    pool.shuffle(rng);
    let entities = pool[..cols].to_vec();
    let legends = (1..=points).map(|i| format!("obs_{i}")).collect();
    let values = draw_values(points, cols, rng);
    DataTable::new("Value", entities, legends, values, SourceKind::Random, Some(sample.clone()))
}

fn draw_values<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<Decimal>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| round_f64_2dp(rng.gen_range(RANDOM_VALUE_MIN..=RANDOM_VALUE_MAX))).collect())
        .collect()
}

/// How many series rows a chart subtype needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowRule {
    Exactly(usize),
    AtLeast(usize),
    /// Raw observations per entity (box plots).
    Observations(usize),
}

impl RowRule {
    pub fn accepts(&self, rows: usize) -> bool {
        match *self {
            RowRule::Exactly(n) => rows == n,
            RowRule::AtLeast(n) => rows >= n,
            RowRule::Observations(n) => rows >= n,
        }
    }
}

/// Inclusive ranges used when shaping tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeConfig {
    pub entities: (usize, usize),
    pub legends: (usize, usize),
    pub box_points: usize,
    pub sample_parents: (usize, usize),
    pub sample_children: (usize, usize),
}

impl Default for ShapeConfig {
    fn default() -> Self {
        ShapeConfig { entities: (3, 10), legends: (1, 4), box_points: 20, sample_parents: (2, 4), sample_children: (2, 5) }
    }
}

/// Whether `t` can be trimmed to a block satisfying `rule`.
fn table_fits(t: &DataTable, rule: RowRule, shape: &ShapeConfig) -> bool {
    let min_rows = match rule {
        RowRule::Exactly(n) | RowRule::AtLeast(n) | RowRule::Observations(n) => n,
    };
    t.rows() >= min_rows && t.cols() >= shape.entities.0
}

fn draw_rows<R: Rng + ?Sized>(rule: RowRule, shape: &ShapeConfig, rng: &mut R) -> usize {
    match rule {
        RowRule::Exactly(n) => n,
        RowRule::AtLeast(n) => rng.gen_range(n.max(shape.legends.0)..=shape.legends.1.max(n)),
        RowRule::Observations(n) => shape.box_points.max(n),
    }
}

/// Builds a random table for `rule`, sampling taxonomy entities until a
/// grandparent with enough children is found.
pub fn random_table_for<R: Rng + ?Sized>(
    hierarchy: &EntityHierarchy,
    rule: RowRule,
    shape: &ShapeConfig,
    rng: &mut R,
) -> Result<DataTable, TableError> {
    let cols = rng.gen_range(shape.entities.0..=shape.entities.1);
    let rows = draw_rows(rule, shape, rng);
    let observations = matches!(rule, RowRule::Observations(_));
    let needed = cols + if rows > 1 && !observations { rows } else { 0 };
    let mut pairs: Vec<(usize, usize)> = (shape.sample_parents.0..=shape.sample_parents.1)
        .flat_map(|p| (shape.sample_children.0..=shape.sample_children.1).map(move |c| (p, c)))
        .filter(|(p, c)| p * c >= needed)
        .collect();
    pairs.shuffle(rng);
    for (k_parents, k_children) in pairs {
        match hierarchy.sample_entities(rng, k_parents, k_children, None) {
            Ok(sample) => {
                return if observations {
                    random_observation_table(rows, cols, &sample, rng)
                } else {
                    random_table(rows, cols, &sample, rng)
                };
            }
            Err(HierarchyError::InsufficientEntities { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(TableError::InsufficientEntities { needed, available: 0 })
}

/// Trims a real-world table to a random contiguous block satisfying `rule`.
pub fn trim_real_table<R: Rng + ?Sized>(
    table: &DataTable,
    rule: RowRule,
    shape: &ShapeConfig,
    rng: &mut R,
) -> Result<DataTable, TableError> {
    let cols_hi = shape.entities.1.min(table.cols());
    let cols_lo = shape.entities.0.min(cols_hi);
    let cols = rng.gen_range(cols_lo..=cols_hi);
    let rows = match rule {
        RowRule::Exactly(n) => n,
        RowRule::AtLeast(n) => rng.gen_range(n..=shape.legends.1.max(n).min(table.rows())),
        RowRule::Observations(_) => shape.box_points.min(table.rows()),
    };
    let row0 = rng.gen_range(0..=table.rows() - rows);
    let col0 = rng.gen_range(0..=table.cols() - cols);
    table.sub_block(row0, rows, col0, cols)
}

/// Chooses a table for a chart: random with probability 0.2, otherwise a
/// uniformly chosen compatible real-world table trimmed to shape. Falls back
/// to random when no real table is compatible.
pub fn pick_table<R: Rng + ?Sized>(
    real_pool: &[DataTable],
    hierarchy: &EntityHierarchy,
    rule: RowRule,
    shape: &ShapeConfig,
    rng: &mut R,
) -> Result<DataTable, TableError> {
    let coin: f64 = rng.gen();
    let compatible: Vec<&DataTable> = real_pool.iter().filter(|t| table_fits(t, rule, shape)).collect();
    if coin < RANDOM_TABLE_PROBABILITY || compatible.is_empty() {
        random_table_for(hierarchy, rule, shape, rng)
    } else {
        let t = compatible[rng.gen_range(0..compatible.len())];
        trim_real_table(t, rule, shape, rng)
    }
}

/// Real-world tables shipped with the crate.
pub fn bundled_real_pool() -> Vec<DataTable> {
    crate::bundled::REAL_WORLD_TABLES
        .iter()
        .map(|(_, text)| ingest_csv(text.as_bytes()).expect("bundled table parses"))
        .collect()
}
