//! Yes/no balancing. Questions carrying a template's majority answer get
//! their fills redrawn until the answer flips.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::answer::{solve, Value};
use crate::chart::ChartInfo;
use crate::question::{draw_fills, fill_values, substitute, AnswerType, QuestionInfo, QuestionTemplate, SlotKind};
use crate::rng::{derive_seed, rng_from_seed};

pub const DEFAULT_MAX_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct YesNo {
    pub yes: usize,
    pub no: usize,
}

impl YesNo {
    pub fn gap(&self) -> usize {
        self.yes.abs_diff(self.no)
    }

    pub fn total(&self) -> usize {
        self.yes + self.no
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateBias {
    pub template_id: u32,
    pub before: YesNo,
    pub yes_count: usize,
    pub no_count: usize,
    pub balanced: bool,
    pub mutations_applied: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub templates: Vec<TemplateBias>,
    pub yes_share_before: f64,
    pub yes_share_after: f64,
}

impl BiasReport {
    pub fn mutations(&self) -> usize {
        self.templates.iter().map(|t| t.mutations_applied).sum()
    }

    pub fn unbalanced(&self) -> impl Iterator<Item = &TemplateBias> {
        self.templates.iter().filter(|t| !t.balanced)
    }
}

fn as_bool(q: &QuestionInfo) -> Option<bool> {
    match (&q.answer_type, &q.answer) {
        (AnswerType::YesNo, Some(Value::Bool(b))) => Some(*b),
        _ => None,
    }
}

/// Yes/no counts per template, over yes/no questions only.
pub fn tally(corpus: &[QuestionInfo]) -> BTreeMap<u32, YesNo> {
    let mut out: BTreeMap<u32, YesNo> = BTreeMap::new();
    for q in corpus {
        if let Some(b) = as_bool(q) {
            let e = out.entry(q.template_id).or_default();
            if b {
                e.yes += 1;
            } else {
                e.no += 1;
            }
        }
    }
    out
}

fn yes_share(t: &BTreeMap<u32, YesNo>) -> f64 {
    let (yes, total) = t.values().fold((0, 0), |(y, n), c| (y + c.yes, n + c.total()));
    if total == 0 {
        0.0
    } else {
        yes as f64 / total as f64
    }
}

/// A replacement for one question: new fills, text and answer.
struct Mutation {
    index: usize,
    fills: Vec<String>,
    question: String,
    answer: Value,
}

/// Tries to flip the answer of `q` by redrawing its fills; value slots are
/// redrawn alone first, then every slot.
fn flip(
    q: &QuestionInfo,
    t: &QuestionTemplate,
    info: &ChartInfo,
    max_attempts: usize,
    rng: &mut crate::rng::SeededRng,
) -> Option<(Vec<String>, Value)> {
    let current = as_bool(q)?;
    let has_value = t.slots.contains(&SlotKind::Value);
    let value_only = if has_value { max_attempts.div_ceil(2) } else { 0 };
    for attempt in 0..max_attempts {
        let only_values = attempt < value_only;
        let redraw = |k: SlotKind| !only_values || k == SlotKind::Value;
        let Ok(fills) = draw_fills(t, info, Some(&q.fills), redraw, rng) else { continue };
        if let Ok(answer @ Value::Bool(b)) = solve(&t.program, &fill_values(t, &fills), info) {
            if b != current {
                return Some((fills, answer));
            }
        }
    }
    None
}

fn balance_template(
    t: &QuestionTemplate,
    indices: &[usize],
    corpus: &[QuestionInfo],
    charts: &BTreeMap<String, ChartInfo>,
    seed: u64,
    max_attempts: usize,
) -> (TemplateBias, Vec<Mutation>) {
    let mut rng = rng_from_seed(derive_seed(seed, t.template_id as u64, "debias"));
    let mut answers: Vec<bool> = indices.iter().map(|&i| as_bool(&corpus[i]).unwrap()).collect();
    let count = |a: &[bool]| YesNo { yes: a.iter().filter(|b| **b).count(), no: a.iter().filter(|b| !**b).count() };
    let before = count(&answers);
    let mut exhausted = BTreeSet::new();
    let mut mutations = Vec::new();
    let mut flipped = BTreeSet::new();
    loop {
        let now = count(&answers);
        if now.gap() <= 1 {
            break;
        }
        let majority = now.yes > now.no;
        let candidates: Vec<usize> =
            (0..indices.len()).filter(|&k| answers[k] == majority && !exhausted.contains(&k) && !flipped.contains(&k)).collect();
        let Some(&k) = candidates.choose(&mut rng) else { break };
        let q = &corpus[indices[k]];
        let outcome = charts.get(&q.chart_id).and_then(|info| flip(q, t, info, max_attempts, &mut rng));
        match outcome {
            Some((fills, answer)) => {
                answers[k] = !answers[k];
                flipped.insert(k);
                mutations.push(Mutation { index: indices[k], question: substitute(&t.text, &fills), fills, answer });
            }
            None => {
                exhausted.insert(k);
            }
        }
    }
    let after = count(&answers);
    let report = TemplateBias {
        template_id: t.template_id,
        before,
        yes_count: after.yes,
        no_count: after.no,
        balanced: after.gap() <= 1,
        mutations_applied: mutations.len(),
    };
    (report, mutations)
}

/// Balances every yes/no template in ascending id order. Templates that
/// cannot be balanced are reported and left as they are.
pub fn debias(
    mut corpus: Vec<QuestionInfo>,
    charts: &BTreeMap<String, ChartInfo>,
    templates: &[QuestionTemplate],
    seed: u64,
    max_attempts: usize,
) -> (Vec<QuestionInfo>, BiasReport) {
    let before = tally(&corpus);
    let by_id: BTreeMap<u32, &QuestionTemplate> = templates.iter().map(|t| (t.template_id, t)).collect();
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, q) in corpus.iter().enumerate() {
        if as_bool(q).is_some() {
            groups.entry(q.template_id).or_default().push(i);
        }
    }
    let work: Vec<(&QuestionTemplate, &Vec<usize>)> =
        groups.iter().filter_map(|(id, idx)| by_id.get(id).map(|t| (*t, idx))).collect();
    let results: Vec<(TemplateBias, Vec<Mutation>)> =
        work.par_iter().map(|(t, idx)| balance_template(t, idx, &corpus, charts, seed, max_attempts)).collect();

    let mut reports = Vec::with_capacity(results.len());
    for (report, mutations) in results {
        for m in mutations {
            let q = &mut corpus[m.index];
            q.fills = m.fills;
            q.question = m.question;
            q.answer = Some(m.answer);
        }
        reports.push(report);
    }
    for (id, counts) in &before {
        if !by_id.contains_key(id) {
            reports.push(TemplateBias {
                template_id: *id,
                before: *counts,
                yes_count: counts.yes,
                no_count: counts.no,
                balanced: counts.gap() <= 1,
                mutations_applied: 0,
            });
        }
    }
    reports.sort_by_key(|r| r.template_id);
    let after = tally(&corpus);
    let report = BiasReport { templates: reports, yes_share_before: yes_share(&before), yes_share_after: yes_share(&after) };
    (corpus, report)
}
