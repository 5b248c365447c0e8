//! Chart specifications and the metadata record that questions are answered
//! from.

mod color;
mod id;
mod subtype;

use std::collections::BTreeMap;

use rand::Rng;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use color::{parse_hex, ColorCatalog, ColorError, NamedColor, MIN_CATALOG_SIZE, MIN_LUMINANCE_GAP};
pub use id::{format_chart_id, is_valid_chart_id, make_chart_id, ChartIdMinter};
pub use subtype::{sample_subtype, ChartFamily, ChartSubtype, UnknownSubtype, MIN_BOX_POINTS};

use crate::table::{round_2dp, DataTable, SourceKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("{subtype} cannot be drawn from a {rows}x{cols} table")]
    IncompatibleShape { subtype: ChartSubtype, rows: usize, cols: usize },
    #[error("{subtype} needs {requirement} values")]
    IncompatibleValues { subtype: ChartSubtype, requirement: &'static str },
    #[error(transparent)]
    Color(#[from] ColorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Background {
    Light,
    Dark,
}

impl Background {
    pub fn fill(self) -> &'static str {
        match self {
            Background::Light => "#ffffff",
            Background::Dark => "#1f1f24",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Background::Light => "#333333",
            Background::Dark => "#eeeeee",
        }
    }

    pub fn axis(self) -> &'static str {
        match self {
            Background::Light => "#666666",
            Background::Dark => "#bbbbbb",
        }
    }

    pub fn luminance(self) -> f64 {
        NamedColor { name: String::new(), hex: self.fill().into() }.luminance()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartStyle {
    pub background: Background,
    /// One color per series, in series order.
    pub palette: Vec<NamedColor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: String,
    pub end: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestValue {
    pub series: String,
    pub max_entity: String,
    pub max_value: Decimal,
    pub min_entity: String,
    pub min_value: Decimal,
}

/// Five-number summary of one entity's observations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxStats {
    pub entity: String,
    pub min: Decimal,
    pub q1: Decimal,
    pub median: Decimal,
    pub q3: Decimal,
    pub max: Decimal,
}

impl BoxStats {
    pub fn as_array(&self) -> [Decimal; 5] {
        [self.min, self.q1, self.median, self.q3, self.max]
    }
}

/// Subtype-specific parameters, stored as the `dsc` field of [`ChartInfo`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartExtras {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker_value: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub highlight_intervals: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub best_values: Vec<BestValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub box_stats: Vec<BoxStats>,
    /// Labels printed along the value axis.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub value_ticks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart_id: String,
    pub subtype: ChartSubtype,
    pub style: ChartStyle,
    pub table: DataTable,
    pub title: String,
    pub x_title: String,
    pub y_title: String,
    pub extras: ChartExtras,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesColor {
    pub series: String,
    pub color_name: String,
    pub color_value: String,
}

/// Per-chart metadata; answers are derived from this record alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartInfo {
    pub chart_id: String,
    pub chart_type: ChartSubtype,
    pub title: String,
    pub entity_names: Vec<String>,
    pub legend_labels: Vec<String>,
    pub data: Vec<Vec<Decimal>>,
    pub colors: Vec<SeriesColor>,
    pub entity_parents: Vec<String>,
    pub entity_grandparent: String,
    pub legend_parents: Vec<String>,
    pub legend_grandparent: String,
    pub x_title: String,
    pub y_title: String,
    pub table_id: String,
    pub dsc: ChartExtras,
}

impl ChartInfo {
    pub fn has_taxonomy(&self) -> bool {
        !self.entity_parents.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.legend_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.entity_names.len()
    }

    pub fn entity_index(&self, name: &str) -> Option<usize> {
        self.entity_names.iter().position(|e| e == name)
    }

    pub fn legend_index(&self, name: &str) -> Option<usize> {
        self.legend_labels.iter().position(|e| e == name)
    }

    pub fn all_values(&self) -> impl Iterator<Item = Decimal> + '_ {
        self.data.iter().flatten().copied()
    }
}

/// Knobs for [`build_chart`] that are not drawn at random.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartOptions {
    /// Marker line value for Marker Single Line; drawn inside the data range
    /// when unset.
    #[serde(default)]
    pub marker_value: Option<Decimal>,
}

/// Keys of the colored series: entities for pies and multi-box plots, a single
/// key for single box plots, legend rows otherwise.
pub fn series_keys(subtype: ChartSubtype, table: &DataTable) -> Vec<String> {
    if subtype.colors_by_entity() {
        table.entity_names.clone()
    } else if subtype.family() == ChartFamily::Box {
        vec![table.measure.clone()]
    } else {
        table.legend_labels.clone()
    }
}

pub fn check_compatible(subtype: ChartSubtype, table: &DataTable) -> Result<(), ChartError> {
    let (rows, cols) = (table.rows(), table.cols());
    let shape_ok = subtype.row_rule().accepts(rows) && cols >= 1 && (subtype.family() != ChartFamily::Pie || cols >= 2);
    if !shape_ok {
        return Err(ChartError::IncompatibleShape { subtype, rows, cols });
    }
    let mut values = table.values.iter().flatten();
    if subtype.family() == ChartFamily::Pie && !values.all(|v| *v > Decimal::ZERO) {
        return Err(ChartError::IncompatibleValues { subtype, requirement: "strictly positive" });
    }
    let needs_non_negative = subtype.is_stacked()
        || subtype.is_polar()
        || matches!(subtype, ChartSubtype::BubbleScatter | ChartSubtype::CheckBubbleScatter);
    if needs_non_negative && table.values.iter().flatten().any(|v| v.is_sign_negative()) {
        return Err(ChartError::IncompatibleValues { subtype, requirement: "non-negative" });
    }
    Ok(())
}

/// Quantile by linear interpolation between closest ranks, in exact decimals.
pub fn quantile(sorted: &[Decimal], p: Decimal) -> Decimal {
    assert!(!sorted.is_empty());
    let pos = p * Decimal::from(sorted.len() - 1);
    let lo = pos.floor();
    let frac = pos - lo;
    let i = lo.to_usize().unwrap();
    if i + 1 >= sorted.len() {
        sorted[sorted.len() - 1]
    } else {
        sorted[i] + (sorted[i + 1] - sorted[i]) * frac
    }
}

pub fn box_stats(entity: &str, values: &[Decimal]) -> BoxStats {
    let mut v = values.to_vec();
    v.sort();
    let q = |p: &str| round_2dp(quantile(&v, p.parse().unwrap()));
    BoxStats {
        entity: entity.to_string(),
        min: v[0],
        q1: q("0.25"),
        median: q("0.5"),
        q3: q("0.75"),
        max: v[v.len() - 1],
    }
}

/// Title, category-axis title and value-axis title.
fn titles(table: &DataTable) -> (String, String, String) {
    match (&table.sample, table.source_kind) {
        (Some(s), SourceKind::Random) => {
            (format!("{} of {}", table.measure, s.grandparent), s.grandparent.clone(), table.measure.clone())
        }
        _ => {
            let first = &table.legend_labels[0];
            let last = table.legend_labels.last().unwrap();
            let title = if table.rows() == 1 {
                format!("{} in {first}", table.measure)
            } else {
                format!("{}, {first} to {last}", table.measure)
            };
            (title, "Category".to_string(), table.measure.clone())
        }
    }
}

fn draw_extras<R: Rng + ?Sized>(
    subtype: ChartSubtype,
    table: &DataTable,
    options: &ChartOptions,
    rng: &mut R,
) -> ChartExtras {
    let mut extras = ChartExtras::default();
    match subtype {
        ChartSubtype::MarkerSingleLine => {
            let value = options.marker_value.unwrap_or_else(|| {
                let lo = table.values[0].iter().min().unwrap().to_f64().unwrap();
                let hi = table.values[0].iter().max().unwrap().to_f64().unwrap();
                crate::table::round_f64_2dp(if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            });
            extras.marker_value = Some(value);
        }
        ChartSubtype::IntervalHighlightSingleLine if table.cols() >= 2 => {
            let n = table.cols();
            let span = rng.gen_range(2..=(n / 2).max(2));
            let start = rng.gen_range(0..=n - span);
            extras.highlight_intervals.push(Interval {
                start: table.entity_names[start].clone(),
                end: table.entity_names[start + span - 1].clone(),
            });
        }
        ChartSubtype::BestValueSingleLine | ChartSubtype::BestValueMultiLine => {
            for (label, row) in table.legend_labels.iter().zip(&table.values) {
                let (imax, imin) = arg_extremes(row);
                extras.best_values.push(BestValue {
                    series: label.clone(),
                    max_entity: table.entity_names[imax].clone(),
                    max_value: row[imax],
                    min_entity: table.entity_names[imin].clone(),
                    min_value: row[imin],
                });
            }
        }
        s if s.family() == ChartFamily::Box => {
            for (j, e) in table.entity_names.iter().enumerate() {
                extras.box_stats.push(box_stats(e, &table.column(j)));
            }
        }
        _ => {}
    }
    extras
}

/// Indices of the first maximum and first minimum.
fn arg_extremes(row: &[Decimal]) -> (usize, usize) {
    let mut imax = 0;
    let mut imin = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[imax] {
            imax = i;
        }
        if *v < row[imin] {
            imin = i;
        }
    }
    (imax, imin)
}

/// Parent classes of `labels`, or empty when any label lacks taxonomy ancestry.
fn parents_of(table: &DataTable, labels: &[String]) -> (Vec<String>, String) {
    let Some(sample) = &table.sample else { return (Vec::new(), String::new()) };
    let parents: Option<Vec<String>> =
        labels.iter().map(|l| sample.ancestry(l).map(|a| a.parent.clone())).collect();
    match parents {
        Some(p) if !p.is_empty() => (p, sample.grandparent.clone()),
        _ => (Vec::new(), String::new()),
    }
}

/// Styles a table as `subtype` and records its metadata.
pub fn build_chart<R: Rng + ?Sized>(
    table: DataTable,
    subtype: ChartSubtype,
    chart_id: String,
    options: &ChartOptions,
    catalog: &ColorCatalog,
    rng: &mut R,
) -> Result<(ChartSpec, ChartInfo), ChartError> {
    check_compatible(subtype, &table)?;
    let background = if rng.gen_bool(0.5) { Background::Light } else { Background::Dark };
    let keys = series_keys(subtype, &table);
    let palette = catalog.sample_palette(keys.len(), background.luminance(), rng)?;
    let (title, category_title, value_title) = titles(&table);
    let (x_title, y_title) =
        if subtype.is_horizontal() { (value_title, category_title) } else { (category_title, value_title) };
    let mut extras = draw_extras(subtype, &table, options, rng);
    if let Some(ticks) = crate::render::value_ticks(subtype, &table, &extras) {
        extras.value_ticks = ticks.labels();
    }

    let (entity_parents, entity_grandparent) = parents_of(&table, &table.entity_names);
    let (legend_parents, legend_grandparent) = parents_of(&table, &table.legend_labels);
    let colors = keys
        .iter()
        .zip(&palette)
        .map(|(k, c)| SeriesColor { series: k.clone(), color_name: c.name.clone(), color_value: c.hex.clone() })
        .collect();
    let info = ChartInfo {
        chart_id: chart_id.clone(),
        chart_type: subtype,
        title: title.clone(),
        entity_names: table.entity_names.clone(),
        legend_labels: table.legend_labels.clone(),
        data: table.values.clone(),
        colors,
        entity_parents,
        entity_grandparent,
        legend_parents,
        legend_grandparent,
        x_title: x_title.clone(),
        y_title: y_title.clone(),
        table_id: table.table_id.clone(),
        dsc: extras.clone(),
    };
    let spec = ChartSpec {
        chart_id,
        subtype,
        style: ChartStyle { background, palette },
        table,
        title,
        x_title,
        y_title,
        extras,
    };
    Ok((spec, info))
}

/// Chart metadata sidecar keyed by chart id.
pub type ChartInfoIndex = BTreeMap<String, ChartInfo>;
