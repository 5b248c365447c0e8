use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::chart::ChartFamily;
use crate::debias::DEFAULT_MAX_ATTEMPTS;
use crate::document::LayoutConfig;
use crate::question::Split;
use crate::table::ShapeConfig;

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios { train: 0.8, val: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    pub fn get(&self, split: Split) -> f64 {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err("split ratios must be non-negative".into());
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("split ratios sum to {sum}, not 1"));
        }
        Ok(())
    }
}

/// Inclusive range of questions drawn per chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionTarget {
    pub min: usize,
    pub max: usize,
}

impl Default for QuestionTarget {
    fn default() -> Self {
        QuestionTarget { min: 10, max: 18 }
    }
}

/// Input files; `None` selects the data shipped with the crate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct InputPaths {
    /// Edge list (`child<TAB>parent...`) or a built hierarchy in JSON.
    pub hierarchy: Option<PathBuf>,
    pub color_catalog: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    /// Directory of `.svg` pictures.
    pub image_pool: Option<PathBuf>,
    /// Directory of `.csv` real-world tables.
    pub real_tables: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub doc_count: usize,
    pub master_seed: u64,
    pub splits: SplitRatios,
    pub questions_per_chart: QuestionTarget,
    pub family_weights: BTreeMap<ChartFamily, f64>,
    pub shape: ShapeConfig,
    pub layout: LayoutConfig,
    pub inputs: InputPaths,
    pub debias_max_attempts: usize,
    /// Machine letter used as the first chart id component.
    pub machine: char,
    /// Clock of the first chart id, `YYYY-MM-DD HH:MM:SS`; document `i` uses
    /// this clock plus `i` seconds.
    pub start_clock: String,
    /// Fresh layouts tried per document when a stage rejects its draw.
    pub doc_attempts: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            doc_count: 100,
            master_seed: 0,
            splits: SplitRatios::default(),
            questions_per_chart: QuestionTarget::default(),
            family_weights: ChartFamily::ALL
                .iter()
                .zip(ChartFamily::REFERENCE_COUNTS)
                .map(|(f, c)| (*f, f64::from(c)))
                .collect(),
            shape: ShapeConfig::default(),
            layout: LayoutConfig::default(),
            inputs: InputPaths::default(),
            debias_max_attempts: DEFAULT_MAX_ATTEMPTS,
            machine: 'L',
            start_clock: "2023-01-01 00:00:00".into(),
            doc_attempts: 5,
        }
    }
}

impl GenConfig {
    pub fn from_toml(text: &str) -> Result<GenConfig, PipelineError> {
        let cfg: GenConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn clock(&self) -> Result<chrono::NaiveDateTime, PipelineError> {
        chrono::NaiveDateTime::parse_from_str(&self.start_clock, "%Y-%m-%d %H:%M:%S")
            .map_err(|e| PipelineError::Config(format!("start_clock `{}`: {e}", self.start_clock)))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.doc_count == 0 {
            return bad("doc_count must be at least 1".into());
        }
        self.splits.validate().map_err(PipelineError::Config)?;
        let q = self.questions_per_chart;
        if q.min == 0 || q.min > q.max {
            return bad(format!("questions_per_chart needs 1 <= min <= max, got {}..={}", q.min, q.max));
        }
        if self.family_weights.values().any(|w| !w.is_finite() || *w < 0.0) || self.family_weights.values().sum::<f64>() <= 0.0 {
            return bad("family_weights must be non-negative with a positive sum".into());
        }
        let s = &self.shape;
        for (name, (lo, hi)) in [("entities", s.entities), ("legends", s.legends), ("sample_parents", s.sample_parents), ("sample_children", s.sample_children)] {
            if lo == 0 || lo > hi {
                return bad(format!("shape.{name} needs 1 <= low <= high"));
            }
        }
        if !self.machine.is_ascii_uppercase() {
            return bad(format!("machine must be an uppercase letter, got `{}`", self.machine));
        }
        if self.doc_attempts == 0 {
            return bad("doc_attempts must be at least 1".into());
        }
        self.clock()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_partial_files() {
        let cfg = GenConfig::default();
        assert_eq!(GenConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let partial = GenConfig::from_toml("doc_count = 7\n[splits]\ntrain = 1.0\nval = 0.0\ntest = 0.0\n").unwrap();
        assert_eq!(partial.doc_count, 7);
        assert_eq!(partial.questions_per_chart, QuestionTarget::default());
    }

    #[test]
    fn rejects_bad_values() {
        for text in ["doc_count = 0", "[splits]\ntrain = 0.5\nval = 0.1\ntest = 0.1", "[questions_per_chart]\nmin = 5\nmax = 2"] {
            assert!(matches!(GenConfig::from_toml(text), Err(PipelineError::Config(_))), "{text}");
        }
    }
}
