//! Test-side helpers: chart fixtures and a brute-force answer oracle.
//!
//! The oracle reads the raw table of a `ChartSpec` and the taxonomy, never
//! the `ChartInfo` record or the library interpreter. Box statistics are
//! recomputed from the observations and every operation is evaluated over a
//! flat list of cells.

#![allow(dead_code)]

use std::collections::BTreeMap;

use chartdoc_core::answer::{solve, Operand, Value};
use chartdoc_core::chart::{build_chart, ChartFamily, ChartInfo, ChartOptions, ChartSpec, ChartSubtype, ColorCatalog};
use chartdoc_core::hierarchy::{bundled_hierarchy, EntityHierarchy};
use chartdoc_core::question::{bundled_registry, fill_values, instantiate, QuestionTemplate, SlotKind};
use chartdoc_core::rng::rng_from_seed;
use chartdoc_core::table::{bundled_real_pool, pick_table, DataTable, ShapeConfig};
use rust_decimal::{Decimal, RoundingStrategy};

pub mod probe;

pub struct Fixture {
    pub spec: ChartSpec,
    pub info: ChartInfo,
}

/// A chart of `subtype` drawn from the bundled inputs.
pub fn chart(subtype: ChartSubtype, seed: u64, hierarchy: &EntityHierarchy, pool: &[DataTable]) -> Fixture {
    let mut rng = rng_from_seed(seed);
    let table = pick_table(pool, hierarchy, subtype.row_rule(), &ShapeConfig::default(), &mut rng).unwrap();
    let id = format!("T_2024_02_03_04_05_06_{}_{}", seed % 10, subtype.code());
    let (spec, info) = build_chart(table, subtype, id, &ChartOptions::default(), &ColorCatalog::bundled(), &mut rng).unwrap();
    Fixture { spec, info }
}

pub fn family(f: ChartFamily) -> Vec<ChartSubtype> {
    ChartSubtype::ALL.iter().copied().filter(|s| s.family() == f).collect()
}

pub struct Inputs {
    pub hierarchy: EntityHierarchy,
    pub pool: Vec<DataTable>,
}

pub fn inputs() -> Inputs {
    Inputs { hierarchy: bundled_hierarchy(), pool: bundled_real_pool() }
}

#[derive(Debug, Clone, PartialEq)]
enum V {
    Int(i64),
    Num(Decimal),
    Text(String),
    Bool(bool),
    Nums(Vec<(String, Decimal)>),
    Texts(Vec<String>),
}

#[derive(Debug, Clone)]
struct Cell {
    row: String,
    entity: String,
    col: usize,
    value: Decimal,
}

pub struct Oracle {
    entities: Vec<String>,
    row_labels: Vec<String>,
    cells: Vec<Cell>,
    entity_parent: BTreeMap<String, String>,
    legend_parent: BTreeMap<String, String>,
    colors: BTreeMap<String, String>,
    horizontal: bool,
}

fn cents(d: Decimal) -> Decimal {
    let mut r = d.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero);
    r.rescale(2);
    r
}

/// Type-7 sample quantile (linear between order statistics).
fn q7(sorted: &[Decimal], num: u32, den: u32) -> Decimal {
    let scaled = Decimal::from(num) * Decimal::from(sorted.len() as u32 - 1);
    let k = (scaled / Decimal::from(den)).floor();
    let idx: usize = k.to_string().parse().unwrap();
    let frac = scaled / Decimal::from(den) - k;
    match sorted.get(idx + 1) {
        Some(next) => sorted[idx] + (*next - sorted[idx]) * frac,
        None => sorted[idx],
    }
}

impl Oracle {
    pub fn new(spec: &ChartSpec, hierarchy: &EntityHierarchy) -> Oracle {
        let t = &spec.table;
        let is_box = spec.subtype.family() == ChartFamily::Box;
        let mut cells = Vec::new();
        let row_labels: Vec<String> = if is_box {
            ["min", "q1", "median", "q3", "max"].iter().map(|s| s.to_string()).collect()
        } else {
            t.legend_labels.clone()
        };
        if is_box {
            for (col, e) in t.entity_names.iter().enumerate() {
                let mut obs: Vec<Decimal> = t.values.iter().map(|r| r[col]).collect();
                obs.sort();
                let stats = [obs[0], cents(q7(&obs, 1, 4)), cents(q7(&obs, 1, 2)), cents(q7(&obs, 3, 4)), obs[obs.len() - 1]];
                for (row, v) in row_labels.iter().zip(stats) {
                    cells.push(Cell { row: row.clone(), entity: e.clone(), col, value: v });
                }
            }
            cells.sort_by_key(|c| row_labels.iter().position(|r| *r == c.row).unwrap() * 10_000 + c.col);
        } else {
            for (row, values) in t.legend_labels.iter().zip(&t.values) {
                for (col, (e, v)) in t.entity_names.iter().zip(values).enumerate() {
                    cells.push(Cell { row: row.clone(), entity: e.clone(), col, value: *v });
                }
            }
        }
        let parents = |labels: &[String]| -> BTreeMap<String, String> {
            let Some(sample) = &t.sample else { return BTreeMap::new() };
            if !labels.iter().all(|l| sample.entities.contains_key(l)) {
                return BTreeMap::new();
            }
            labels.iter().map(|l| (l.clone(), hierarchy.ancestors(l).unwrap().0)).collect()
        };
        let keys: Vec<String> = match spec.subtype.family() {
            ChartFamily::Pie => t.entity_names.clone(),
            ChartFamily::Box if spec.subtype == ChartSubtype::MultiBoxplot => t.entity_names.clone(),
            ChartFamily::Box => vec![t.measure.clone()],
            _ => t.legend_labels.clone(),
        };
        let colors = keys.into_iter().zip(spec.style.palette.iter().map(|c| c.name.clone())).collect();
        let horizontal = ["Hbar", "S-Hbar", "GHbar", "P-Hbar", "PS-Hbar", "Hbox"].contains(&spec.subtype.code());
        Oracle {
            entities: t.entity_names.clone(),
            entity_parent: parents(&t.entity_names),
            legend_parent: if is_box { BTreeMap::new() } else { parents(&t.legend_labels) },
            row_labels,
            cells,
            colors,
            horizontal,
        }
    }

    /// Cells whose row is in `rows` (all when `None`) and entity in `ents`,
    /// in row-then-column order.
    fn pick(&self, ents: &[String], rows: Option<&[String]>) -> Option<Vec<&Cell>> {
        if ents.iter().any(|e| !self.entities.contains(e)) {
            return None;
        }
        if let Some(rs) = rows {
            if rs.iter().any(|r| !self.row_labels.contains(r)) {
                return None;
            }
        }
        let order: Vec<&String> = match rows {
            Some(rs) => rs.iter().collect(),
            None => self.row_labels.iter().collect(),
        };
        let mut out = Vec::new();
        for r in order {
            for e in ents {
                out.extend(self.cells.iter().filter(|c| &c.row == r && &c.entity == e));
            }
        }
        Some(out)
    }

    fn row_arg(v: Option<&V>) -> Option<Option<Vec<String>>> {
        match v {
            None => Some(None),
            Some(V::Text(t)) => Some(Some(vec![t.clone()])),
            Some(V::Texts(ts)) => Some(Some(ts.clone())),
            _ => None,
        }
    }

    fn step(&self, op: &str, a: &[V]) -> Option<V> {
        let num = |v: &V| match v {
            V::Int(i) => Some(Decimal::from(*i)),
            V::Num(d) => Some(*d),
            _ => None,
        };
        let nums = |v: &V| match v {
            V::Nums(l) => Some(l.clone()),
            _ => None,
        };
        let nonempty = |v: &V| nums(v).filter(|l| !l.is_empty());
        let txt = |v: &V| match v {
            V::Text(t) => Some(t.clone()),
            _ => None,
        };
        Some(match op {
            "getValueByEntity" => {
                let (ents, single_e) = match a.first()? {
                    V::Text(e) => (vec![e.clone()], true),
                    V::Texts(es) => (es.clone(), false),
                    _ => return None,
                };
                let rows = Self::row_arg(a.get(1))?;
                let single_r = match &rows {
                    Some(r) => r.len() == 1 && matches!(a.get(1), Some(V::Text(_))),
                    None => self.row_labels.len() == 1,
                };
                let cells = self.pick(&ents, rows.as_deref())?;
                if single_e && single_r {
                    V::Num(cells[0].value)
                } else {
                    V::Nums(cells.iter().map(|c| (if single_e { c.row.clone() } else { c.entity.clone() }, c.value)).collect())
                }
            }
            "getValueByLegend" => {
                let rows = Self::row_arg(a.first())??;
                V::Nums(self.pick(&self.entities, Some(&rows))?.iter().map(|c| (c.entity.clone(), c.value)).collect())
            }
            "getIntervalValueByEntity" => {
                let (x, y) = (txt(a.first()?)?, txt(a.get(1)?)?);
                let i = self.entities.iter().position(|e| *e == x)?;
                let j = self.entities.iter().position(|e| *e == y)?;
                let span = self.entities[i.min(j)..=i.max(j)].to_vec();
                let rows = Self::row_arg(a.get(2))?;
                V::Nums(self.pick(&span, rows.as_deref())?.iter().map(|c| (c.entity.clone(), c.value)).collect())
            }
            "getAllValues" => V::Nums(self.cells.iter().map(|c| (c.entity.clone(), c.value)).collect()),
            "getEntitiesByParent" | "getLegendsByParent" => {
                let p = txt(a.first()?)?;
                let (labels, map) = if op == "getEntitiesByParent" {
                    (&self.entities, &self.entity_parent)
                } else {
                    (&self.row_labels, &self.legend_parent)
                };
                let members: Vec<String> = labels.iter().filter(|l| map.get(*l) == Some(&p)).cloned().collect();
                if members.is_empty() {
                    return None;
                }
                V::Texts(members)
            }
            "colorOf" => V::Text(self.colors.get(&txt(a.first()?)?)?.clone()),
            "entityAt" => {
                let n = num(a.first()?)?;
                if n.fract() != Decimal::ZERO || n < Decimal::ONE {
                    return None;
                }
                let i: usize = n.trunc().to_string().parse().ok()?;
                V::Text(self.entities.get(i - 1)?.clone())
            }
            "countEntities" => V::Int(self.entities.len() as i64),
            "max" => V::Num(nonempty(a.first()?)?.iter().map(|x| x.1).fold(None, |m: Option<Decimal>, x| Some(m.map_or(x, |m| m.max(x))))?),
            "min" => V::Num(nonempty(a.first()?)?.iter().map(|x| x.1).fold(None, |m: Option<Decimal>, x| Some(m.map_or(x, |m| m.min(x))))?),
            "sum" => V::Num(nums(a.first()?)?.iter().map(|x| x.1).sum()),
            "avg" => {
                let l = nonempty(a.first()?)?;
                V::Num(l.iter().map(|x| x.1).sum::<Decimal>() / Decimal::from(l.len() as u64))
            }
            "median" => {
                let mut v: Vec<Decimal> = nonempty(a.first()?)?.iter().map(|x| x.1).collect();
                v.sort();
                let n = v.len();
                V::Num(if n % 2 == 0 { (v[n / 2 - 1] + v[n / 2]) / Decimal::from(2) } else { v[n / 2] })
            }
            "diff" => match (a.first()?, a.get(1)?) {
                (V::Int(x), V::Int(y)) => V::Int(x - y),
                (x, y) => V::Num(num(x)? - num(y)?),
            },
            "ratio" => {
                let d = num(a.get(1)?)?;
                if d == Decimal::ZERO {
                    return None;
                }
                V::Num(num(a.first()?)? / d)
            }
            "countGreater" | "countLess" | "filterGreater" | "filterLess" => {
                let l = nums(a.first()?)?;
                let t = num(a.get(1)?)?;
                let keep: Vec<(String, Decimal)> =
                    l.into_iter().filter(|x| if op.ends_with("Greater") { x.1 > t } else { x.1 < t }).collect();
                if op.starts_with("count") {
                    V::Int(keep.len() as i64)
                } else {
                    V::Nums(keep)
                }
            }
            "greaterThan" => V::Bool(num(a.first()?)? > num(a.get(1)?)?),
            "lessThan" => V::Bool(num(a.first()?)? < num(a.get(1)?)?),
            "equalsText" => V::Bool(txt(a.first()?)? == txt(a.get(1)?)?),
            "argmax" | "argmin" => {
                let l = nonempty(a.first()?)?;
                let mut best = &l[0];
                for x in &l[1..] {
                    if (op == "argmax" && x.1 > best.1) || (op == "argmin" && x.1 < best.1) {
                        best = x;
                    }
                }
                V::Text(best.0.clone())
            }
            "orientation" => V::Text(if self.horizontal { "horizontal" } else { "vertical" }.into()),
            _ => return None,
        })
    }

    /// Evaluates `template` on typed `fills`; `None` when the program cannot
    /// produce a scalar answer.
    pub fn answer(&self, template: &QuestionTemplate, fills: &[String]) -> Option<Value> {
        let typed = typed_fills(template, fills);
        let mut steps: Vec<V> = Vec::new();
        for step in &template.program.steps {
            let name = step.op.to_string();
            let v = if name == "getEntityValue" {
                match step.args.first()? {
                    Operand::Int(i) => typed.get(*i as usize - 1)?.clone(),
                    _ => return None,
                }
            } else {
                let args = step
                    .args
                    .iter()
                    .map(|o| match o {
                        Operand::Fill(i) => typed.get(*i - 1).cloned(),
                        Operand::Step(i) => steps.get(*i - 1).cloned(),
                        Operand::Int(i) => Some(V::Int(*i)),
                        Operand::Number(d) => Some(V::Num(*d)),
                        Operand::Text(t) => Some(V::Text(t.clone())),
                    })
                    .collect::<Option<Vec<V>>>()?;
                self.step(&name, &args)?
            };
            steps.push(v);
        }
        Some(match steps.pop()? {
            V::Int(i) => Value::Int(i),
            V::Num(d) => Value::Number(cents(d)),
            V::Text(t) => Value::Text(t),
            V::Bool(b) => Value::Bool(b),
            V::Nums(_) | V::Texts(_) => return None,
        })
    }
}

fn typed_fills(t: &QuestionTemplate, fills: &[String]) -> Vec<V> {
    let mut kinds = Vec::new();
    for k in &t.slots {
        kinds.push(*k);
        if *k == SlotKind::EntityPair {
            kinds.push(*k);
        }
    }
    kinds
        .iter()
        .zip(fills)
        .map(|(k, f)| match k {
            SlotKind::Value => f.parse().map(V::Num).unwrap_or_else(|_| V::Text(f.clone())),
            SlotKind::Ordinal => {
                let digits: String = f.chars().take_while(|c| c.is_ascii_digit()).collect();
                digits.parse().map(V::Int).unwrap_or_else(|_| V::Text(f.clone()))
            }
            _ => V::Text(f.clone()),
        })
        .collect()
}

/// Compares interpreter and oracle answers over `rounds` charts per subtype.
/// Returns (agreeing, compared, answered, mismatches).
pub fn oracle_agreement(rounds: u64) -> (usize, usize, usize, Vec<String>) {
    let inp = inputs();
    let registry = bundled_registry();
    let (mut agree, mut total, mut answered, mut bad) = (0, 0, 0, Vec::new());
    for round in 0..rounds {
        for (k, subtype) in ChartSubtype::ALL.iter().enumerate() {
            let seed = round * 1000 + k as u64;
            let fx = chart(*subtype, seed, &inp.hierarchy, &inp.pool);
            let oracle = Oracle::new(&fx.spec, &inp.hierarchy);
            let mut rng = rng_from_seed(seed ^ 0xA5A5);
            for t in registry.iter().filter(|t| t.applies_to(*subtype)) {
                let Ok(q) = instantiate(t, &fx.info, &mut rng) else { continue };
                let got = solve(&t.program, &fill_values(t, &q.fills), &fx.info).ok();
                let want = oracle.answer(t, &q.fills);
                total += 1;
                answered += usize::from(want.is_some());
                if got == want {
                    agree += 1;
                } else {
                    bad.push(format!("{} t{} {:?}: got {got:?}, oracle {want:?}", subtype.code(), t.template_id, q.fills));
                }
            }
        }
    }
    (agree, total, answered, bad)
}

/// Checks every annotation under `root`: schema validity, page bounds,
/// per-column overlap and the chart/caption pairing. Returns the file count.
pub fn check_annotations(root: &std::path::Path, caption_gap: u32) -> Result<usize, String> {
    use chartdoc_core::document::{parse_annotation, Schema};
    let schema = Schema::annotation();
    let mut names: Vec<_> = std::fs::read_dir(root.join("annotations"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    for path in &names {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        schema.validate_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let a = parse_annotation(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        a.record.validate(caption_gap).map_err(|e| format!("{}: {e}", path.display()))?;
        let chart = a.record.chart().unwrap();
        if !root.join(chart.payload.as_deref().unwrap()).is_file() {
            return Err(format!("{}: chart file missing", path.display()));
        }
    }
    Ok(names.len())
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

/// Random hypernym DAG over `n` nodes named `n000`...; node `i` draws one or
/// two hypernyms among the nodes before it, so the relation is acyclic.
pub fn fixture_dag(n: usize, seed: u64) -> Vec<(String, Vec<String>)> {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let name = |i: usize| format!("n{i:03}");
    (0..n)
        .map(|i| {
            let mut parents = Vec::new();
            if i > 0 {
                let k = if rng.gen_bool(0.25) { 2 } else { 1 };
                for _ in 0..k {
                    let p = name(rng.gen_range(i.saturating_sub(40)..i));
                    if !parents.contains(&p) {
                        parents.push(p);
                    }
                }
            }
            (name(i), parents)
        })
        .collect()
}

/// Checks a built hierarchy against the relation it came from: a forest
/// with no single-child internal node, whose every edge is an ancestor link
/// of the input and which keeps every input leaf.
pub fn check_tree(dag: &[(String, Vec<String>)], h: &EntityHierarchy) -> Result<(), String> {
    use std::collections::BTreeSet;
    let mut up: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut has_child = BTreeSet::new();
    for (c, ps) in dag {
        up.entry(c).or_default().extend(ps.iter().map(String::as_str));
        for p in ps {
            up.entry(p).or_default();
            has_child.insert(p.as_str());
        }
    }
    let ancestors = |c: &str| -> BTreeSet<&str> {
        let mut seen = BTreeSet::new();
        let mut stack = up[c].clone();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(up[x].iter().copied());
            }
        }
        seen
    };
    let mut child_count: BTreeMap<&str, usize> = BTreeMap::new();
    for (name, node) in &h.nodes {
        if !up.contains_key(name.as_str()) {
            return Err(format!("`{name}` is not an input node"));
        }
        if let Some(p) = &node.parent {
            if !ancestors(name).contains(p.as_str()) {
                return Err(format!("{p} -> {name} is not an ancestor link"));
            }
            *child_count.entry(p.as_str()).or_default() += 1;
        }
        let mut cur = name.as_str();
        for _ in 0..=h.nodes.len() {
            match h.nodes.get(cur).and_then(|n| n.parent.as_deref()) {
                Some(p) => cur = p,
                None => break,
            }
        }
        if h.nodes.get(cur).and_then(|n| n.parent.as_ref()).is_some() {
            return Err(format!("cycle above `{name}`"));
        }
    }
    if let Some((p, _)) = child_count.iter().find(|(_, n)| **n == 1) {
        return Err(format!("`{p}` has a single child"));
    }
    for leaf in up.keys().filter(|n| !has_child.contains(*n)) {
        if !h.nodes.get(*leaf).is_some_and(|n| n.children.is_empty()) {
            return Err(format!("input leaf `{leaf}` is missing"));
        }
    }
    Ok(())
}
