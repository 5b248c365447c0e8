//! Question templates: registry loading, instantiation against a chart and
//! difficulty classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::answer::{OpName, Operand, ProgramError, SolutionProgram, Ty, Value, BOX_STAT_NAMES};
use crate::chart::{ChartFamily, ChartInfo, ChartSubtype};
use crate::table::round_f64_2dp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("registry line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("template {template_id}: {message}")]
    InvariantViolation { template_id: u32, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuestionError {
    #[error("template {template_id} does not apply to {subtype}")]
    NotApplicable { template_id: u32, subtype: ChartSubtype },
    #[error("template {template_id}: no values available for slot `{kind}`")]
    EmptyFillDomain { template_id: u32, kind: SlotKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Entity,
    EntityPair,
    Legend,
    Value,
    Color,
    EntitySort,
    LegendSort,
    Ordinal,
    Axis,
}

impl SlotKind {
    pub const ALL: [SlotKind; 9] = [
        SlotKind::Entity,
        SlotKind::EntityPair,
        SlotKind::Legend,
        SlotKind::Value,
        SlotKind::Color,
        SlotKind::EntitySort,
        SlotKind::LegendSort,
        SlotKind::Ordinal,
        SlotKind::Axis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SlotKind::Entity => "entity",
            SlotKind::EntityPair => "entity_pair",
            SlotKind::Legend => "legend",
            SlotKind::Value => "value",
            SlotKind::Color => "color",
            SlotKind::EntitySort => "entity_sort",
            SlotKind::LegendSort => "legend_sort",
            SlotKind::Ordinal => "ordinal",
            SlotKind::Axis => "axis",
        }
    }

    /// Placeholders the slot occupies in the question text.
    pub fn arity(self) -> usize {
        if self == SlotKind::EntityPair {
            2
        } else {
            1
        }
    }

    /// Placeholder stem: pair members are written `<entity_1>`, `<entity_2>`.
    fn placeholder_stem(self) -> &'static str {
        if self == SlotKind::EntityPair {
            "entity"
        } else {
            self.name()
        }
    }

    pub fn fill_ty(self) -> Ty {
        match self {
            SlotKind::Value => Ty::Number,
            SlotKind::Ordinal => Ty::Int,
            _ => Ty::Text,
        }
    }

    pub fn is_common_sense(self) -> bool {
        matches!(self, SlotKind::EntitySort | SlotKind::LegendSort)
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SlotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        SlotKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown slot kind `{s}`"))
    }
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)*
                    other => Err(format!("unknown {} `{other}`", stringify!($name))),
                }
            }
        }
    };
}

keyword_enum!(QuestionType { Reasoning => "reasoning", CommonSense => "common_sense" });
keyword_enum!(AnswerType { YesNo => "yes_no", Elements => "elements", OpenVocab => "open_vocab" });
keyword_enum!(Difficulty {
    Beginner => "beginner",
    Elementary => "elementary",
    Intermediate => "intermediate",
    Advanced => "advanced",
    Expert => "expert",
});
keyword_enum!(Split { Train => "train", Val => "val", Test => "test" });

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionTemplate {
    pub template_id: u32,
    pub text: String,
    pub slots: Vec<SlotKind>,
    pub question_type: QuestionType,
    pub answer_type: AnswerType,
    pub difficulty: Difficulty,
    pub applicable_subtypes: BTreeSet<ChartSubtype>,
    pub program: SolutionProgram,
}

impl QuestionTemplate {
    /// Placeholder kinds in text order, one per fill.
    pub fn fill_kinds(&self) -> Vec<SlotKind> {
        self.slots.iter().flat_map(|k| std::iter::repeat(*k).take(k.arity())).collect()
    }

    pub fn applies_to(&self, subtype: ChartSubtype) -> bool {
        self.applicable_subtypes.contains(&subtype)
    }

    pub fn validate(&self) -> Result<(), RegistryError> {
        let fail = |message: String| RegistryError::InvariantViolation { template_id: self.template_id, message };
        let placeholders = placeholders(&self.text);
        let expected: Vec<&str> = self.fill_kinds().iter().map(|k| k.placeholder_stem()).collect();
        let found: Vec<&str> = placeholders.iter().map(|p| p.stem).collect();
        if found.len() != expected.len() {
            return Err(fail(format!("text has {} placeholder(s) but the slots need {}", found.len(), expected.len())));
        }
        if found != expected {
            return Err(fail(format!("placeholders {found:?} do not match slots {expected:?}")));
        }
        let common = self.slots.iter().any(|k| k.is_common_sense());
        if common != (self.question_type == QuestionType::CommonSense) {
            return Err(fail("question type must be common_sense exactly when a parent-class slot is present".into()));
        }
        if (self.difficulty == Difficulty::Expert) != common {
            return Err(fail("expert difficulty is reserved for common-sense templates".into()));
        }
        if self.applicable_subtypes.is_empty() {
            return Err(fail("no applicable subtypes".into()));
        }
        let fill_types: Vec<Ty> = self.fill_kinds().iter().map(|k| k.fill_ty()).collect();
        let answer = self.program.typecheck(&fill_types).map_err(|e: ProgramError| fail(e.to_string()))?;
        let consistent = match self.answer_type {
            AnswerType::YesNo => answer == Ty::Bool,
            AnswerType::Elements => answer == Ty::Text,
            AnswerType::OpenVocab => matches!(answer, Ty::Int | Ty::Number | Ty::Any),
        };
        if !consistent {
            return Err(fail(format!("answer type {} does not fit a program producing {}", self.answer_type, answer.name())));
        }
        Ok(())
    }
}

struct Placeholder<'a> {
    start: usize,
    end: usize,
    stem: &'a str,
}

/// `<kind>` and `<kind_N>` markers in text order.
fn placeholders(text: &str) -> Vec<Placeholder<'_>> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(open) = text[from..].find('<').map(|i| i + from) {
        let Some(close) = text[open..].find('>').map(|i| i + open) else { break };
        let inner = &text[open + 1..close];
        let stem = match inner.rsplit_once('_') {
            Some((stem, n)) if n.chars().all(|c| c.is_ascii_digit()) && !n.is_empty() => stem,
            _ => inner,
        };
        out.push(Placeholder { start: open, end: close + 1, stem });
        from = close + 1;
    }
    out
}

/// Replaces placeholders positionally.
pub fn substitute(text: &str, fills: &[String]) -> String {
    let mut out = String::with_capacity(text.len() + 16);
    let mut last = 0;
    for (p, fill) in placeholders(text).iter().zip(fills) {
        out.push_str(&text[last..p.start]);
        out.push_str(fill);
        last = p.end;
    }
    out.push_str(&text[last..]);
    out
}

/// Inverse of [`substitute`]: recovers the template text from a question and
/// its fills, or `None` when they do not line up.
pub fn unsubstitute(question: &str, template_text: &str, fills: &[String]) -> Option<String> {
    let marks = placeholders(template_text);
    if marks.len() != fills.len() {
        return None;
    }
    let mut out = String::new();
    let (mut t, mut q) = (0, 0);
    for (p, fill) in marks.iter().zip(fills) {
        let literal = &template_text[t..p.start];
        if !question[q..].starts_with(literal) {
            return None;
        }
        q += literal.len();
        if !question[q..].starts_with(fill.as_str()) {
            return None;
        }
        out.push_str(literal);
        out.push_str(&template_text[p.start..p.end]);
        q += fill.len();
        t = p.end;
    }
    (question[q..] == template_text[t..]).then(|| out + &template_text[t..])
}

/// Expands subtype selectors: `all`, family names (`bar`, `pie`, ...),
/// `single` (one series), `multi` (several series), subtype names or codes.
/// A leading `-` removes the selection.
pub fn expand_selectors(list: &str) -> Result<BTreeSet<ChartSubtype>, String> {
    let mut add = BTreeSet::new();
    let mut remove = BTreeSet::new();
    let mut any_positive = false;
    for raw in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (negate, token) = match raw.strip_prefix('-') {
            Some(t) => (true, t.trim()),
            None => (false, raw),
        };
        let picked: Vec<ChartSubtype> = match token.to_ascii_lowercase().as_str() {
            "all" => ChartSubtype::ALL.to_vec(),
            "single" => ChartSubtype::ALL
                .iter()
                .copied()
                .filter(|s| !s.is_multi_series() && s.family() != ChartFamily::Box)
                .collect(),
            "multi" => ChartSubtype::ALL.iter().copied().filter(|s| s.is_multi_series()).collect(),
            other => match ChartFamily::ALL.iter().find(|f| f.name().eq_ignore_ascii_case(other)) {
                Some(f) => f.subtypes().collect(),
                None => vec![token.parse::<ChartSubtype>().map_err(|e| e.to_string())?],
            },
        };
        if negate {
            remove.extend(picked);
        } else {
            any_positive = true;
            add.extend(picked);
        }
    }
    if !any_positive {
        add.extend(ChartSubtype::ALL.iter().copied());
    }
    Ok(add.difference(&remove).copied().collect())
}

/// Reads a registry: blank-line separated blocks of `key: value` lines, with
/// the program as indented lines after `program:`. `#` starts a comment line.
pub fn load_registry(text: &str) -> Result<Vec<QuestionTemplate>, RegistryError> {
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !blocks.last().unwrap().is_empty() {
                blocks.push(Vec::new());
            }
        } else {
            blocks.last_mut().unwrap().push((i + 1, line));
        }
    }
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let first_line = block[0].0;
        let t = parse_block(&block)?;
        if let Some(prev) = seen.insert(t.template_id, first_line) {
            return Err(RegistryError::Parse {
                line: first_line,
                message: format!("duplicate template_id {} (first defined on line {prev})", t.template_id),
            });
        }
        t.validate()?;
        out.push(t);
    }
    Ok(out)
}

fn parse_block(block: &[(usize, &str)]) -> Result<QuestionTemplate, RegistryError> {
    let mut fields: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    let mut program = String::new();
    let mut in_program = false;
    for &(line, raw) in block {
        let err = |message: String| RegistryError::Parse { line, message };
        if in_program && raw.starts_with(char::is_whitespace) {
            program.push_str(raw.trim());
            program.push('\n');
            continue;
        }
        in_program = false;
        let (key, value) = raw.split_once(':').ok_or_else(|| err(format!("expected `key: value`, found `{}`", raw.trim())))?;
        let key = key.trim();
        if key == "program" {
            in_program = true;
            continue;
        }
        if fields.insert(key, (line, value.trim().to_string())).is_some() {
            return Err(err(format!("field `{key}` given twice")));
        }
    }
    let first = block[0].0;
    let take = |key: &str| -> Result<(usize, String), RegistryError> {
        fields.get(key).cloned().ok_or_else(|| RegistryError::Parse { line: first, message: format!("missing field `{key}`") })
    };
    fn parsed<T: FromStr>(line: usize, value: &str) -> Result<T, RegistryError>
    where
        T::Err: fmt::Display,
    {
        value.parse().map_err(|e: T::Err| RegistryError::Parse { line, message: e.to_string() })
    }
    for key in fields.keys() {
        if !["template_id", "text", "slots", "question_type", "answer_type", "difficulty", "applicable_subtypes"].contains(key) {
            return Err(RegistryError::Parse { line: fields[key].0, message: format!("unknown field `{key}`") });
        }
    }
    let (l, id) = take("template_id")?;
    let template_id: u32 = parsed(l, &id)?;
    let (_, text) = take("text")?;
    let (l, slots) = take("slots")?;
    let slots = slots
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty() && *s != "none")
        .map(|s| parsed::<SlotKind>(l, s))
        .collect::<Result<Vec<_>, _>>()?;
    let (l, qt) = take("question_type")?;
    let (l2, at) = take("answer_type")?;
    let (l3, diff) = take("difficulty")?;
    let (l4, subs) = take("applicable_subtypes")?;
    let applicable_subtypes = expand_selectors(&subs).map_err(|message| RegistryError::Parse { line: l4, message })?;
    if program.trim().is_empty() {
        return Err(RegistryError::Parse { line: first, message: "missing program".into() });
    }
    let program = SolutionProgram::parse(&program).map_err(|e| RegistryError::Parse { line: first, message: e.to_string() })?;
    Ok(QuestionTemplate {
        template_id,
        text,
        slots,
        question_type: parsed(l, &qt)?,
        answer_type: parsed(l2, &at)?,
        difficulty: parsed(l3, &diff)?,
        applicable_subtypes,
        program,
    })
}

/// Templates shipped with the crate.
pub fn bundled_registry() -> Vec<QuestionTemplate> {
    load_registry(crate::bundled::TEMPLATE_REGISTRY).expect("bundled registry is valid")
}

const REDUCTIONS: [OpName; 9] = [
    OpName::Max,
    OpName::Min,
    OpName::Median,
    OpName::Avg,
    OpName::Sum,
    OpName::CountGreater,
    OpName::CountLess,
    OpName::Argmax,
    OpName::Argmin,
];
const COMBINATIONS: [OpName; 5] = [OpName::Diff, OpName::Ratio, OpName::GreaterThan, OpName::LessThan, OpName::EqualsText];
const SUBSETS: [OpName; 6] = [
    OpName::FilterGreater,
    OpName::FilterLess,
    OpName::CountGreater,
    OpName::CountLess,
    OpName::GetValueByLegend,
    OpName::GetIntervalValueByEntity,
];

fn is_operation(op: OpName) -> bool {
    REDUCTIONS.contains(&op) || COMBINATIONS.contains(&op)
}

/// Structural features of a template that decide its level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateShape {
    pub common_sense: bool,
    /// An operation consumes the result of another operation.
    pub composite: bool,
    /// A reduction runs over a subset picked by value, legend or range.
    pub predicate: bool,
    pub operations: usize,
}

pub fn template_shape(t: &QuestionTemplate) -> TemplateShape {
    let steps = &t.program.steps;
    let composite = steps.iter().any(|s| {
        is_operation(s.op)
            && s.args.iter().any(|a| matches!(a, Operand::Step(k) if steps.get(k - 1).is_some_and(|p| is_operation(p.op))))
    });
    let ops: Vec<OpName> = t.program.ops().collect();
    TemplateShape {
        common_sense: t.slots.iter().any(|k| k.is_common_sense()),
        composite,
        predicate: ops.iter().any(|o| SUBSETS.contains(o)) && ops.iter().any(|o| REDUCTIONS.contains(o)),
        operations: ops.iter().filter(|o| is_operation(**o)).count(),
    }
}

/// Rule-based level, checked from the hardest rule down.
pub fn classify_difficulty(t: &QuestionTemplate) -> Difficulty {
    let shape = template_shape(t);
    if shape.common_sense {
        Difficulty::Expert
    } else if shape.composite {
        Difficulty::Advanced
    } else if shape.predicate {
        Difficulty::Intermediate
    } else if shape.operations > 0 {
        Difficulty::Elementary
    } else {
        Difficulty::Beginner
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionInfo {
    pub question: String,
    pub answer: Option<Value>,
    pub chart_id: String,
    pub chart_type: ChartSubtype,
    pub question_id: String,
    pub question_type: QuestionType,
    pub answer_type: AnswerType,
    pub template_id: u32,
    pub difficulty: Difficulty,
    pub fills: Vec<String>,
    pub split: Split,
}

pub fn question_id(chart_id: &str, template_id: u32) -> String {
    format!("{chart_id}_{template_id}")
}

pub fn ordinal(n: usize) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

fn parse_ordinal(s: &str) -> Option<i64> {
    s.trim_end_matches(|c: char| c.is_ascii_alphabetic()).parse().ok()
}

/// Typed program inputs for the fills of `t`.
pub fn fill_values(t: &QuestionTemplate, fills: &[String]) -> Vec<Value> {
    t.fill_kinds()
        .iter()
        .zip(fills)
        .map(|(k, f)| match k {
            SlotKind::Value => f.parse::<Decimal>().map(Value::Number).unwrap_or_else(|_| Value::Text(f.clone())),
            SlotKind::Ordinal => parse_ordinal(f).map(Value::Int).unwrap_or_else(|| Value::Text(f.clone())),
            _ => Value::Text(f.clone()),
        })
        .collect()
}

fn distinct(items: &[String]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    items.iter().filter(|s| seen.insert(s.as_str())).cloned().collect()
}

/// Range the `<value>` slot draws from: the printed value axis when there is
/// one, otherwise the span of the queried numbers.
pub fn value_range(info: &ChartInfo) -> (f64, f64) {
    let ticks: Vec<f64> = info.dsc.value_ticks.iter().filter_map(|t| t.parse().ok()).collect();
    if let (Some(lo), Some(hi)) = (ticks.first(), ticks.last()) {
        if lo < hi {
            return (*lo, *hi);
        }
    }
    let values: Vec<f64> = if info.dsc.box_stats.is_empty() {
        info.all_values().map(to_f64).collect()
    } else {
        info.dsc.box_stats.iter().flat_map(|b| b.as_array()).map(to_f64).collect()
    };
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo.min(hi), hi.max(lo))
}

fn to_f64(d: Decimal) -> f64 {
    use rust_decimal::prelude::ToPrimitive;
    d.to_f64().unwrap_or(0.0)
}

/// Candidate fills for one slot; pairs are returned as `"a\u{0}b"`.
fn domain(kind: SlotKind, info: &ChartInfo) -> Vec<String> {
    match kind {
        SlotKind::Entity | SlotKind::EntityPair => info.entity_names.clone(),
        SlotKind::Legend => {
            if info.chart_type.family() == ChartFamily::Box {
                BOX_STAT_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                info.legend_labels.clone()
            }
        }
        SlotKind::Color => distinct(&info.colors.iter().map(|c| c.color_name.clone()).collect::<Vec<_>>()),
        SlotKind::EntitySort => distinct(&info.entity_parents),
        SlotKind::LegendSort => distinct(&info.legend_parents),
        SlotKind::Ordinal => (1..=info.cols()).map(ordinal).collect(),
        SlotKind::Axis => vec!["horizontal".into(), "vertical".into()],
        SlotKind::Value => Vec::new(),
    }
}

/// Draws the fills of one slot, avoiding values already taken by other slots
/// of the same kind.
fn draw_slot<R: Rng + ?Sized>(
    t: &QuestionTemplate,
    kind: SlotKind,
    info: &ChartInfo,
    taken: &[String],
    rng: &mut R,
) -> Result<Vec<String>, QuestionError> {
    let empty = || QuestionError::EmptyFillDomain { template_id: t.template_id, kind };
    if kind == SlotKind::Value {
        let (lo, hi) = value_range(info);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(empty());
        }
        let v = if lo < hi { rng.gen_range(lo..=hi) } else { lo };
        return Ok(vec![round_f64_2dp(v).to_string()]);
    }
    let pool: Vec<String> = domain(kind, info).into_iter().filter(|d| !taken.contains(d)).collect();
    if kind == SlotKind::EntityPair {
        if pool.len() < 2 {
            return Err(empty());
        }
        let mut idx: Vec<usize> = (0..pool.len()).collect();
        idx.shuffle(rng);
        let (a, b) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        return Ok(vec![pool[a].clone(), pool[b].clone()]);
    }
    pool.choose(rng).map(|v| vec![v.clone()]).ok_or_else(empty)
}

/// Draws fills for every slot of `t`. When `keep` is given, slots for which
/// `redraw` returns false keep their previous fills.
pub fn draw_fills<R: Rng + ?Sized>(
    t: &QuestionTemplate,
    info: &ChartInfo,
    keep: Option<&[String]>,
    redraw: impl Fn(SlotKind) -> bool,
    rng: &mut R,
) -> Result<Vec<String>, QuestionError> {
    let mut per_slot: Vec<Vec<String>> = Vec::with_capacity(t.slots.len());
    let mut offset = 0;
    for &kind in &t.slots {
        let previous = keep.map(|k| k[offset..offset + kind.arity()].to_vec());
        offset += kind.arity();
        match previous {
            Some(p) if !redraw(kind) => per_slot.push(p),
            _ => per_slot.push(Vec::new()),
        }
    }
    for (i, &kind) in t.slots.iter().enumerate() {
        if !per_slot[i].is_empty() {
            continue;
        }
        let taken: Vec<String> = t
            .slots
            .iter()
            .zip(&per_slot)
            .filter(|(k, _)| k.placeholder_stem() == kind.placeholder_stem() && kind != SlotKind::Value)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect();
        per_slot[i] = draw_slot(t, kind, info, &taken, rng)?;
    }
    Ok(per_slot.concat())
}

/// Fills `t` against `info`; the answer is left unset.
pub fn instantiate<R: Rng + ?Sized>(t: &QuestionTemplate, info: &ChartInfo, rng: &mut R) -> Result<QuestionInfo, QuestionError> {
    if !t.applies_to(info.chart_type) {
        return Err(QuestionError::NotApplicable { template_id: t.template_id, subtype: info.chart_type });
    }
    let fills = draw_fills(t, info, None, |_| true, rng)?;
    Ok(question_with_fills(t, info, fills))
}

pub fn question_with_fills(t: &QuestionTemplate, info: &ChartInfo, fills: Vec<String>) -> QuestionInfo {
    QuestionInfo {
        question: substitute(&t.text, &fills),
        answer: None,
        chart_id: info.chart_id.clone(),
        chart_type: info.chart_type,
        question_id: question_id(&info.chart_id, t.template_id),
        question_type: t.question_type,
        answer_type: t.answer_type,
        template_id: t.template_id,
        difficulty: t.difficulty,
        fills,
        split: Split::Train,
    }
}
