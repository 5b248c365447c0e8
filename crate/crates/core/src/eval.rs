//! Accuracy scoring of predicted answers against a generated corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::io::BufRead;
use std::str::FromStr;

use rust_decimal::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::answer::Value;
use crate::question::{AnswerType, Difficulty, QuestionInfo, QuestionType};

/// Relative tolerance for non-integer numeric answers, inclusive.
pub const RELATIVE_TOLERANCE: &str = "0.05";
/// Absolute tolerance when the expected value is zero.
pub const ZERO_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line}: expected `question_id<TAB>answer`")]
    Malformed { line: usize },
    #[error("line {line}: duplicate prediction for `{question_id}`")]
    Duplicate { line: usize, question_id: String },
    #[error("reading predictions: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub question_id: String,
    pub answer: String,
}

/// Reads `question_id<TAB>answer` lines. Blank lines are skipped; the answer
/// may be empty.
pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<Prediction>, EvalError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let (id, answer) = line.split_once('\t').ok_or(EvalError::Malformed { line: i + 1 })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(EvalError::Malformed { line: i + 1 });
        }
        if !seen.insert(id.to_string()) {
            return Err(EvalError::Duplicate { line: i + 1, question_id: id.to_string() });
        }
        out.push(Prediction { question_id: id.to_string(), answer: answer.to_string() });
    }
    Ok(out)
}

fn parse_number(s: &str) -> Option<Decimal> {
    let s = s.trim();
    Decimal::from_str(s).ok().or_else(|| Decimal::from_scientific(s).ok())
}

fn numeric_match(pred: &str, truth: Decimal) -> bool {
    let Some(p) = parse_number(pred) else { return false };
    if truth.is_zero() {
        return p.abs().to_f64().is_some_and(|x| x <= ZERO_EPSILON);
    }
    if truth.fract().is_zero() {
        return p == truth;
    }
    (p - truth).abs() <= Decimal::from_str(RELATIVE_TOLERANCE).unwrap() * truth.abs()
}

/// Whether `pred` counts as a correct answer for `truth`.
///
/// Text and yes/no answers match case-insensitively after trimming.
/// Integer-valued numbers need exact numeric equality; other numbers accept a
/// relative error of 5%, inclusive. A zero truth accepts only predictions
/// within [`ZERO_EPSILON`] of zero.
pub fn judge(pred: &str, truth: &Value) -> bool {
    match truth {
        Value::Int(n) => numeric_match(pred, Decimal::from(*n)),
        Value::Number(d) => numeric_match(pred, *d),
        Value::Text(_) | Value::Bool(_) => pred.trim().eq_ignore_ascii_case(truth.to_string().trim()),
        Value::NumList(_) | Value::TextList(_) => pred.trim().eq_ignore_ascii_case(truth.to_string().trim()),
    }
}

/// Answer classes used when reporting scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalAnswerType {
    YesNo,
    Numerical,
    String,
}

impl EvalAnswerType {
    pub const ALL: [EvalAnswerType; 3] = [EvalAnswerType::YesNo, EvalAnswerType::Numerical, EvalAnswerType::String];

    pub fn of(q: &QuestionInfo) -> EvalAnswerType {
        match (&q.answer_type, &q.answer) {
            (AnswerType::YesNo, _) => EvalAnswerType::YesNo,
            (_, Some(Value::Int(_) | Value::Number(_))) => EvalAnswerType::Numerical,
            _ => EvalAnswerType::String,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EvalAnswerType::YesNo => "yes_no",
            EvalAnswerType::Numerical => "numerical",
            EvalAnswerType::String => "string",
        }
    }
}

impl fmt::Display for EvalAnswerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub correct: usize,
    pub total: usize,
}

impl Cell {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    fn record(&mut self, ok: bool) {
        self.total += 1;
        self.correct += usize::from(ok);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: Cell,
    pub accuracy: f64,
    pub by_difficulty: BTreeMap<Difficulty, Cell>,
    pub by_question_type: BTreeMap<QuestionType, Cell>,
    pub by_answer_type: BTreeMap<AnswerType, Cell>,
    pub by_eval_answer_type: BTreeMap<EvalAnswerType, Cell>,
    /// Questions with no prediction; counted as incorrect.
    pub unanswered: usize,
    /// Predictions whose id is not in the corpus; excluded from all cells.
    pub unknown_ids: Vec<String>,
}

/// Scores `preds` against every answered question of `corpus`.
pub fn evaluate(preds: &[Prediction], corpus: &[QuestionInfo]) -> EvalReport {
    let by_id: BTreeMap<&str, &str> = preds.iter().map(|p| (p.question_id.as_str(), p.answer.as_str())).collect();
    let known: BTreeSet<&str> = corpus.iter().map(|q| q.question_id.as_str()).collect();
    let mut r = EvalReport {
        by_difficulty: Difficulty::ALL.iter().map(|d| (*d, Cell::default())).collect(),
        by_question_type: QuestionType::ALL.iter().map(|t| (*t, Cell::default())).collect(),
        by_answer_type: AnswerType::ALL.iter().map(|t| (*t, Cell::default())).collect(),
        by_eval_answer_type: EvalAnswerType::ALL.iter().map(|t| (*t, Cell::default())).collect(),
        ..Default::default()
    };
    for q in corpus {
        let Some(truth) = &q.answer else { continue };
        let ok = match by_id.get(q.question_id.as_str()) {
            Some(p) => judge(p, truth),
            None => {
                r.unanswered += 1;
                false
            }
        };
        r.overall.record(ok);
        r.by_difficulty.get_mut(&q.difficulty).unwrap().record(ok);
        r.by_question_type.get_mut(&q.question_type).unwrap().record(ok);
        r.by_answer_type.get_mut(&q.answer_type).unwrap().record(ok);
        r.by_eval_answer_type.get_mut(&EvalAnswerType::of(q)).unwrap().record(ok);
    }
    r.unknown_ids = preds.iter().filter(|p| !known.contains(p.question_id.as_str())).map(|p| p.question_id.clone()).collect();
    r.accuracy = r.overall.accuracy();
    r
}

impl EvalReport {
    /// Human-readable table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |label: &str, c: &Cell| {
            let _ = writeln!(out, "{label:<22}{:>8.3}{:>10}/{}", c.accuracy(), c.correct, c.total);
        };
        line("overall", &self.overall);
        for (d, c) in &self.by_difficulty {
            line(&format!("level {d}"), c);
        }
        for (t, c) in &self.by_question_type {
            line(&format!("type {t}"), c);
        }
        for (t, c) in &self.by_answer_type {
            line(&format!("answer {t}"), c);
        }
        for (t, c) in &self.by_eval_answer_type {
            line(&format!("scored as {t}"), c);
        }
        let _ = writeln!(out, "unanswered            {:>8}", self.unanswered);
        let _ = writeln!(out, "unknown ids           {:>8}", self.unknown_ids.len());
        out
    }
}
