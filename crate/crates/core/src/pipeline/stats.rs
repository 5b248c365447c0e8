use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::answer::Value;
use crate::chart::{ChartFamily, ChartSubtype};
use crate::document::xml;
use crate::question::{AnswerType, Difficulty, QuestionType, Split};

use super::{annotation_path, read_corpus, read_file, verify_manifest, PipelineError, SPLITS_FILE};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub docs: usize,
    pub questions: usize,
    pub families: BTreeMap<ChartFamily, usize>,
    pub question_types: BTreeMap<QuestionType, usize>,
    pub answer_types: BTreeMap<AnswerType, usize>,
    pub difficulties: BTreeMap<Difficulty, usize>,
    pub yes: usize,
    pub no: usize,
}

impl CountTable {
    fn zeroed() -> Self {
        CountTable {
            families: ChartFamily::ALL.iter().map(|f| (*f, 0)).collect(),
            question_types: QuestionType::ALL.iter().map(|t| (*t, 0)).collect(),
            answer_types: AnswerType::ALL.iter().map(|t| (*t, 0)).collect(),
            difficulties: Difficulty::ALL.iter().map(|d| (*d, 0)).collect(),
            ..Default::default()
        }
    }

    fn add(&mut self, o: &CountTable) {
        self.docs += o.docs;
        self.questions += o.questions;
        self.yes += o.yes;
        self.no += o.no;
        for (k, v) in &o.families {
            *self.families.entry(*k).or_default() += v;
        }
        for (k, v) in &o.question_types {
            *self.question_types.entry(*k).or_default() += v;
        }
        for (k, v) in &o.answer_types {
            *self.answer_types.entry(*k).or_default() += v;
        }
        for (k, v) in &o.difficulties {
            *self.difficulties.entry(*k).or_default() += v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub splits: BTreeMap<Split, CountTable>,
    pub total: CountTable,
    /// Share of documents per chart family.
    pub family_share: BTreeMap<ChartFamily, f64>,
    /// Share of documents per split.
    pub split_share: BTreeMap<Split, f64>,
    pub yes_share: f64,
    pub modal_difficulty: Option<Difficulty>,
}

fn share(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

impl StatsReport {
    fn from_tables(splits: BTreeMap<Split, CountTable>) -> StatsReport {
        let mut total = CountTable::zeroed();
        for t in splits.values() {
            total.add(t);
        }
        let modal_difficulty =
            total.difficulties.iter().filter(|(_, n)| **n > 0).max_by_key(|(d, n)| (**n, std::cmp::Reverse(**d))).map(|(d, _)| *d);
        StatsReport {
            family_share: total.families.iter().map(|(f, n)| (*f, share(*n, total.docs))).collect(),
            split_share: splits.iter().map(|(s, t)| (*s, share(t.docs, total.docs))).collect(),
            yes_share: share(total.yes, total.yes + total.no),
            modal_difficulty,
            splits,
            total,
        }
    }

    /// Plain-text tables for terminal output.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cols: Vec<(String, &CountTable)> =
            self.splits.iter().map(|(s, t)| (s.to_string(), t)).chain([("total".to_string(), &self.total)]).collect();
        let mut row = |label: &str, f: &dyn Fn(&CountTable) -> usize| {
            let _ = write!(out, "{label:<16}");
            for (_, t) in &cols {
                let _ = write!(out, "{:>10}", f(t));
            }
            out.push('\n');
        };
        let header: String = cols.iter().map(|(n, _)| format!("{n:>10}")).collect();
        row("documents", &|t| t.docs);
        row("questions", &|t| t.questions);
        for f in ChartFamily::ALL {
            row(f.name(), &|t| t.families.get(&f).copied().unwrap_or(0));
        }
        for q in QuestionType::ALL {
            row(q.name(), &|t| t.question_types.get(q).copied().unwrap_or(0));
        }
        for a in AnswerType::ALL {
            row(a.name(), &|t| t.answer_types.get(a).copied().unwrap_or(0));
        }
        for d in Difficulty::ALL {
            row(d.name(), &|t| t.difficulties.get(d).copied().unwrap_or(0));
        }
        let mut text = format!("{:<16}{header}\n", "");
        text.push_str(&out);
        text.push_str("\nfamily share\n");
        for (f, s) in &self.family_share {
            let _ = writeln!(text, "  {:<14}{:>8.2}%", f.name(), s * 100.0);
        }
        text.push_str("split share\n");
        for (s, v) in &self.split_share {
            let _ = writeln!(text, "  {:<14}{:>8.2}%", s.name(), v * 100.0);
        }
        let _ = writeln!(text, "yes share       {:>8.2}%", self.yes_share * 100.0);
        if let Some(d) = self.modal_difficulty {
            let _ = writeln!(text, "modal level     {d}");
        }
        text
    }
}

/// The subtype named by the last component of a chart id.
fn subtype_of(chart_id: &str) -> Option<ChartSubtype> {
    chart_id.rsplit('_').next().and_then(ChartSubtype::from_code)
}

/// Counts from the corpus files alone: split lists, annotations and question
/// files.
pub(super) fn compute(root: &Path) -> Result<StatsReport, PipelineError> {
    let splits: BTreeMap<Split, Vec<String>> = serde_json::from_str(&read_file(root, SPLITS_FILE)?)
        .map_err(|e| PipelineError::Input { path: root.join(SPLITS_FILE), message: e.to_string() })?;
    let mut tables: BTreeMap<Split, CountTable> = Split::ALL.iter().map(|s| (*s, CountTable::zeroed())).collect();
    for (split, docs) in &splits {
        let families = docs
            .par_iter()
            .map(|doc| {
                let rel = annotation_path(doc);
                let root_el = xml::parse(&read_file(root, &rel)?)
                    .map_err(|e| PipelineError::Input { path: root.join(&rel), message: e.to_string() })?;
                let chart_id = root_el.child("chart_id").map(|c| c.text.clone()).unwrap_or_default();
                subtype_of(&chart_id)
                    .map(|s| s.family())
                    .ok_or_else(|| PipelineError::Input { path: root.join(&rel), message: format!("bad chart id `{chart_id}`") })
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;
        let t = tables.get_mut(split).unwrap();
        t.docs = docs.len();
        for f in families {
            *t.families.get_mut(&f).unwrap() += 1;
        }
    }
    for q in read_corpus(root)? {
        let t = tables.get_mut(&q.split).unwrap();
        t.questions += 1;
        *t.question_types.get_mut(&q.question_type).unwrap() += 1;
        *t.answer_types.get_mut(&q.answer_type).unwrap() += 1;
        *t.difficulties.get_mut(&q.difficulty).unwrap() += 1;
        match q.answer {
            Some(Value::Bool(true)) => t.yes += 1,
            Some(Value::Bool(false)) => t.no += 1,
            _ => {}
        }
    }
    Ok(StatsReport::from_tables(tables))
}

/// Statistics of a generated dataset; the manifest must verify first.
pub fn stats(root: &Path) -> Result<StatsReport, PipelineError> {
    verify_manifest(root)?;
    compute(root)
}
