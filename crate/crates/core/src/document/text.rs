//! Filler text for document pages.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chart::ChartInfo;
use crate::rng::SeededRng;

/// Source of prose around the chart.
pub trait TextProvider: Sync {
    /// A paragraph of roughly `chars` characters.
    fn paragraph(&self, info: &ChartInfo, chars: usize, rng: &mut SeededRng) -> String;
    /// One short list item.
    fn list_item(&self, info: &ChartInfo, chars: usize, rng: &mut SeededRng) -> String;
    fn header(&self, info: &ChartInfo, rng: &mut SeededRng) -> String;
    fn footer(&self, info: &ChartInfo, rng: &mut SeededRng) -> String;
}

/// Seeded sentences that mention the chart's own labels.
#[derive(Debug, Clone, Copy, Default)]
pub struct FillerText;

const OPENERS: &[&str] = &[
    "The figures for {a} were gathered during the last review",
    "Analysts compared {a} with {b} across the reporting period",
    "Most of the recent change is concentrated in {a}",
    "Readers should note that {a} and {b} use the same scale",
    "Earlier editions listed {a} under a separate heading",
    "The committee asked for a closer look at {a}",
    "Seasonal effects explain part of the gap between {a} and {b}",
    "Only minor revisions were made to the {m} series",
    "Field teams reported stable conditions for {b}",
    "A longer history of {m} is kept in the appendix",
];

const CLAUSES: &[&str] = &[
    "and the summary below keeps the original ordering",
    "while the remaining entries changed very little",
    "so the comparison focuses on relative size",
    "which matches the pattern seen in previous years",
    "although the sample remains small",
    "and no adjustment for inflation was applied",
    "after duplicate records were removed",
    "with values rounded to two decimals",
];

const LIST_STEMS: &[&str] = &[
    "Check the {m} entry for {a}",
    "Compare {a} against {b}",
    "Update the notes on {a}",
    "Confirm the source of {b}",
    "Review totals for {m}",
    "Flag unusual values in {a}",
];

const HEADERS: &[&str] = &["Quarterly Digest", "Statistical Bulletin", "Annual Overview", "Field Report", "Data Brief"];
const FOOTERS: &[&str] = &["Prepared by the data desk", "For internal circulation", "Figures subject to revision", "Compiled from public sources"];

impl FillerText {
    fn labels(info: &ChartInfo) -> Vec<&str> {
        let mut v: Vec<&str> = info.entity_names.iter().map(String::as_str).collect();
        if info.legend_labels.len() > 1 && !info.legend_labels[0].starts_with("obs_") {
            v.extend(info.legend_labels.iter().map(String::as_str));
        }
        v
    }

    fn fill(pattern: &str, info: &ChartInfo, rng: &mut SeededRng) -> String {
        let labels = Self::labels(info);
        let pick = |rng: &mut SeededRng| labels.choose(rng).copied().unwrap_or("the data");
        let a = pick(rng);
        let b = pick(rng);
        let measure = if info.y_title.is_empty() { "reported" } else { info.y_title.as_str() };
        pattern.replace("{a}", a).replace("{b}", b).replace("{m}", &measure.to_lowercase())
    }

    fn sentence(info: &ChartInfo, rng: &mut SeededRng) -> String {
        let mut s = Self::fill(OPENERS.choose(rng).unwrap(), info, rng);
        if rng.gen_bool(0.5) {
            s.push(' ');
            s.push_str(CLAUSES.choose(rng).unwrap());
        }
        s.push('.');
        s
    }
}

impl TextProvider for FillerText {
    fn paragraph(&self, info: &ChartInfo, chars: usize, rng: &mut SeededRng) -> String {
        let mut out = String::new();
        while out.len() < chars {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&Self::sentence(info, rng));
        }
        out
    }

    fn list_item(&self, info: &ChartInfo, chars: usize, rng: &mut SeededRng) -> String {
        let mut s = Self::fill(LIST_STEMS.choose(rng).unwrap(), info, rng);
        if s.len() < chars / 2 && rng.gen_bool(0.5) {
            s.push(' ');
            s.push_str(CLAUSES.choose(rng).unwrap());
        }
        s
    }

    fn header(&self, info: &ChartInfo, rng: &mut SeededRng) -> String {
        let base = HEADERS.choose(rng).unwrap();
        if info.entity_grandparent.is_empty() {
            base.to_string()
        } else {
            format!("{base}: {}", info.entity_grandparent)
        }
    }

    fn footer(&self, _info: &ChartInfo, rng: &mut SeededRng) -> String {
        FOOTERS.choose(rng).unwrap().to_string()
    }
}

/// Greedy word wrap to `width` characters per line. Words longer than a line
/// are split.
pub fn wrap(text: &str, width: usize) -> Vec<String> {
    let width = width.max(1);
    let mut lines = Vec::new();
    let mut cur = String::new();
    for word in text.split_whitespace() {
        let mut word = word.to_string();
        while word.chars().count() > width {
            if !cur.is_empty() {
                lines.push(std::mem::take(&mut cur));
            }
            let head: String = word.chars().take(width).collect();
            word = word.chars().skip(width).collect();
            lines.push(head);
        }
        let needed = cur.chars().count() + usize::from(!cur.is_empty()) + word.chars().count();
        if needed > width && !cur.is_empty() {
            lines.push(std::mem::take(&mut cur));
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(&word);
    }
    if !cur.is_empty() {
        lines.push(cur);
    }
    lines
}
