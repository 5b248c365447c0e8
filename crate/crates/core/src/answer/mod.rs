//! Answer derivation: runs a template's solution program over a chart's
//! metadata.

mod program;
mod value;

use std::borrow::Cow;

use rust_decimal::Decimal;
use thiserror::Error;

use crate::chart::{ChartFamily, ChartInfo};
pub use program::{AtomicOp, OpName, Operand, ProgramError, SolutionProgram, Ty};
pub use value::{NumList, Value};

/// Row labels that box charts expose in place of legends.
pub const BOX_STAT_NAMES: [&str; 5] = ["min", "q1", "median", "q3", "max"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnswerError {
    #[error("`{op}` expects {expected}, got {found}")]
    TypeMismatch { op: OpName, expected: &'static str, found: &'static str },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("`{0}` over an empty list")]
    EmptyList(OpName),
    #[error("division by zero")]
    DivisionByZero,
    #[error("reference `{0}` cannot be resolved")]
    BadReference(String),
    #[error("the program ended on a {0}, not a scalar")]
    ListAnswer(&'static str),
    #[error("step {index}: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<AnswerError>,
    },
}

/// Execution state for one program run.
pub struct ExecContext<'a> {
    pub fills: &'a [Value],
    pub info: &'a ChartInfo,
    pub steps: Vec<Value>,
    legends: Cow<'a, [String]>,
    data: Cow<'a, [Vec<Decimal>]>,
}

impl<'a> ExecContext<'a> {
    /// Box charts are queried through their five summary statistics, one
    /// row per statistic.
    pub fn new(info: &'a ChartInfo, fills: &'a [Value]) -> Self {
        let (legends, data) = if info.chart_type.family() == ChartFamily::Box {
            let stats = &info.dsc.box_stats;
            let rows = (0..5).map(|k| stats.iter().map(|s| s.as_array()[k]).collect()).collect::<Vec<Vec<Decimal>>>();
            (Cow::Owned(BOX_STAT_NAMES.iter().map(|s| s.to_string()).collect()), Cow::Owned(rows))
        } else {
            (Cow::Borrowed(info.legend_labels.as_slice()), Cow::Borrowed(info.data.as_slice()))
        };
        ExecContext { fills, info, steps: Vec::new(), legends, data }
    }

    fn operand(&self, a: &Operand) -> Result<Value, AnswerError> {
        match a {
            Operand::Fill(i) => self.fills.get(i.wrapping_sub(1)).cloned().ok_or_else(|| AnswerError::BadReference(a.to_string())),
            Operand::Step(i) => self.steps.get(i.wrapping_sub(1)).cloned().ok_or_else(|| AnswerError::BadReference(a.to_string())),
            Operand::Int(i) => Ok(Value::Int(*i)),
            Operand::Number(d) => Ok(Value::Number(*d)),
            Operand::Text(t) => Ok(Value::Text(t.clone())),
        }
    }

    fn entity(&self, name: &str) -> Result<usize, AnswerError> {
        self.info.entity_index(name).ok_or_else(|| AnswerError::UnknownLabel(name.to_string()))
    }

    fn legend(&self, name: &str) -> Result<usize, AnswerError> {
        self.legends.iter().position(|l| l == name).ok_or_else(|| AnswerError::UnknownLabel(name.to_string()))
    }

    /// Rows addressed by an optional legend operand; all rows when absent.
    fn rows(&self, op: OpName, l: Option<&Value>) -> Result<(Vec<usize>, bool), AnswerError> {
        match l {
            None => Ok(((0..self.legends.len()).collect(), self.legends.len() == 1)),
            Some(Value::Text(t)) => Ok((vec![self.legend(t)?], true)),
            Some(Value::TextList(ts)) => Ok((ts.iter().map(|t| self.legend(t)).collect::<Result<_, _>>()?, false)),
            Some(v) => Err(mismatch(op, "text or a text list", v)),
        }
    }

    /// Values at every (row, col) pair, legend-major.
    fn cells(&self, rows: &[usize], cols: &[usize], by_legend: bool) -> NumList {
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        let mut labels = Vec::with_capacity(values.capacity());
        for &r in rows {
            for &c in cols {
                values.push(self.data[r][c]);
                labels.push(if by_legend { self.legends[r].clone() } else { self.info.entity_names[c].clone() });
            }
        }
        NumList::new(values, labels)
    }

    fn members(&self, parents: &[String], labels: &[String], p: &str) -> Result<Value, AnswerError> {
        if !parents.iter().any(|x| x == p) {
            return Err(AnswerError::UnknownLabel(p.to_string()));
        }
        Ok(Value::TextList(labels.iter().zip(parents).filter(|(_, q)| *q == p).map(|(l, _)| l.clone()).collect()))
    }
}

fn mismatch(op: OpName, expected: &'static str, found: &Value) -> AnswerError {
    AnswerError::TypeMismatch { op, expected, found: found.type_name() }
}

fn text(op: OpName, v: &Value) -> Result<&str, AnswerError> {
    match v {
        Value::Text(t) => Ok(t),
        other => Err(mismatch(op, "text", other)),
    }
}

fn scalar(op: OpName, v: &Value) -> Result<Decimal, AnswerError> {
    v.as_decimal().ok_or_else(|| mismatch(op, "a number", v))
}

fn list(op: OpName, v: &Value) -> Result<&NumList, AnswerError> {
    match v {
        Value::NumList(l) => Ok(l),
        other => Err(mismatch(op, "a number list", other)),
    }
}

fn non_empty(op: OpName, v: &Value) -> Result<&NumList, AnswerError> {
    let l = list(op, v)?;
    if l.is_empty() {
        Err(AnswerError::EmptyList(op))
    } else {
        Ok(l)
    }
}

/// Median of an unsorted list; even lengths average the middle pair.
pub fn median(values: &[Decimal]) -> Decimal {
    let mut v = values.to_vec();
    v.sort();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / Decimal::TWO
    }
}

/// Index of the extreme value; the first occurrence wins ties.
fn extreme(values: &[Decimal], better: impl Fn(Decimal, Decimal) -> bool) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if better(*v, values[best]) {
            best = i;
        }
    }
    best
}

/// Evaluates one step against the context.
pub fn run_step(step: &AtomicOp, ctx: &ExecContext) -> Result<Value, AnswerError> {
    use OpName::*;
    let op = step.op;
    let args = step.args.iter().map(|a| ctx.operand(a)).collect::<Result<Vec<_>, _>>()?;
    let arg = |i: usize| args.get(i).ok_or(AnswerError::TypeMismatch { op, expected: "another argument", found: "nothing" });
    let info = ctx.info;
    Ok(match op {
        GetEntityValue => match arg(0)? {
            Value::Int(i) => ctx.operand(&Operand::Fill(*i as usize))?,
            other => return Err(mismatch(op, "an integer literal", other)),
        },
        GetValueByEntity => {
            let (cols, single_entity) = match arg(0)? {
                Value::Text(e) => (vec![ctx.entity(e)?], true),
                Value::TextList(es) => (es.iter().map(|e| ctx.entity(e)).collect::<Result<_, _>>()?, false),
                other => return Err(mismatch(op, "text or a text list", other)),
            };
            let (rows, single_row) = ctx.rows(op, args.get(1))?;
            if single_entity && single_row {
                Value::Number(ctx.data[rows[0]][cols[0]])
            } else {
                Value::NumList(ctx.cells(&rows, &cols, single_entity))
            }
        }
        GetValueByLegend => {
            let (rows, _) = ctx.rows(op, Some(arg(0)?))?;
            let cols: Vec<usize> = (0..info.cols()).collect();
            Value::NumList(ctx.cells(&rows, &cols, false))
        }
        GetIntervalValueByEntity => {
            let a = ctx.entity(text(op, arg(0)?)?)?;
            let b = ctx.entity(text(op, arg(1)?)?)?;
            let cols: Vec<usize> = (a.min(b)..=a.max(b)).collect();
            let (rows, _) = ctx.rows(op, args.get(2))?;
            Value::NumList(ctx.cells(&rows, &cols, false))
        }
        GetAllValues => {
            let rows: Vec<usize> = (0..ctx.legends.len()).collect();
            let cols: Vec<usize> = (0..info.cols()).collect();
            Value::NumList(ctx.cells(&rows, &cols, false))
        }
        GetEntitiesByParent => ctx.members(&info.entity_parents, &info.entity_names, text(op, arg(0)?)?)?,
        GetLegendsByParent => ctx.members(&info.legend_parents, &info.legend_labels, text(op, arg(0)?)?)?,
        ColorOf => {
            let series = text(op, arg(0)?)?;
            let c = info.colors.iter().find(|c| c.series == series).ok_or_else(|| AnswerError::UnknownLabel(series.to_string()))?;
            Value::Text(c.color_name.clone())
        }
        EntityAt => {
            let n = scalar(op, arg(0)?)?;
            let name = usize::try_from(n)
                .ok()
                .filter(|&i| i >= 1 && Decimal::from(i) == n)
                .and_then(|i| info.entity_names.get(i - 1))
                .ok_or_else(|| AnswerError::UnknownLabel(format!("position {n}")))?;
            Value::Text(name.clone())
        }
        CountEntities => Value::Int(info.cols() as i64),
        Max => Value::Number(non_empty(op, arg(0)?)?.values.iter().copied().max().unwrap()),
        Min => Value::Number(non_empty(op, arg(0)?)?.values.iter().copied().min().unwrap()),
        Median => Value::Number(median(&non_empty(op, arg(0)?)?.values)),
        Sum => Value::Number(list(op, arg(0)?)?.values.iter().sum()),
        Avg => {
            let l = non_empty(op, arg(0)?)?;
            Value::Number(l.values.iter().sum::<Decimal>() / Decimal::from(l.len()))
        }
        Diff => match (arg(0)?, arg(1)?) {
            (Value::Int(a), Value::Int(b)) => Value::Int(a - b),
            (a, b) => Value::Number(scalar(op, a)? - scalar(op, b)?),
        },
        Ratio => {
            let (a, b) = (scalar(op, arg(0)?)?, scalar(op, arg(1)?)?);
            if b.is_zero() {
                return Err(AnswerError::DivisionByZero);
            }
            Value::Number(a / b)
        }
        CountGreater | CountLess => {
            let (l, v) = (list(op, arg(0)?)?, scalar(op, arg(1)?)?);
            let n = l.values.iter().filter(|x| if op == CountGreater { **x > v } else { **x < v }).count();
            Value::Int(n as i64)
        }
        GreaterThan => Value::Bool(scalar(op, arg(0)?)? > scalar(op, arg(1)?)?),
        LessThan => Value::Bool(scalar(op, arg(0)?)? < scalar(op, arg(1)?)?),
        EqualsText => Value::Bool(text(op, arg(0)?)? == text(op, arg(1)?)?),
        Argmax | Argmin => {
            let l = non_empty(op, arg(0)?)?;
            let i = if op == Argmax { extreme(&l.values, |a, b| a > b) } else { extreme(&l.values, |a, b| a < b) };
            Value::Text(l.labels[i].clone())
        }
        FilterGreater | FilterLess => {
            let (l, v) = (list(op, arg(0)?)?, scalar(op, arg(1)?)?);
            let (values, labels) = l
                .values
                .iter()
                .zip(&l.labels)
                .filter(|(x, _)| if op == FilterGreater { **x > v } else { **x < v })
                .map(|(x, s)| (*x, s.clone()))
                .unzip();
            Value::NumList(NumList::new(values, labels))
        }
        Orientation => Value::Text(if info.chart_type.is_horizontal() { "horizontal" } else { "vertical" }.to_string()),
    })
}

/// Runs every step in order and normalizes the final value.
pub fn solve(program: &SolutionProgram, fills: &[Value], info: &ChartInfo) -> Result<Value, AnswerError> {
    let mut ctx = ExecContext::new(info, fills);
    for (k, step) in program.steps.iter().enumerate() {
        let v = run_step(step, &ctx).map_err(|e| AnswerError::AtStep { index: k + 1, source: Box::new(e) })?;
        ctx.steps.push(v);
    }
    let last = ctx.steps.pop().ok_or(AnswerError::BadReference("s1".into()))?;
    if last.is_list() {
        return Err(AnswerError::ListAnswer(last.type_name()));
    }
    Ok(last.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{BoxStats, ChartExtras, ChartSubtype, SeriesColor};

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    fn info(subtype: ChartSubtype, entities: &[&str], legends: &[&str], data: &[&[&str]]) -> ChartInfo {
        ChartInfo {
            chart_id: "L_2023_01_01_00_00_00_0_X".into(),
            chart_type: subtype,
            title: String::new(),
            entity_names: entities.iter().map(|s| s.to_string()).collect(),
            legend_labels: legends.iter().map(|s| s.to_string()).collect(),
            data: data.iter().map(|r| r.iter().map(|v| d(v)).collect()).collect(),
            colors: legends
                .iter()
                .map(|l| SeriesColor { series: l.to_string(), color_name: format!("{l}-color"), color_value: "#000000".into() })
                .collect(),
            entity_parents: Vec::new(),
            entity_grandparent: String::new(),
            legend_parents: Vec::new(),
            legend_grandparent: String::new(),
            x_title: String::new(),
            y_title: String::new(),
            table_id: "T_00000000".into(),
            dsc: ChartExtras::default(),
        }
    }

    fn text_fills(names: &[&str]) -> Vec<Value> {
        names.iter().map(|s| Value::Text(s.to_string())).collect()
    }

    fn run(src: &str, fills: &[Value], info: &ChartInfo) -> Result<Value, AnswerError> {
        solve(&SolutionProgram::parse(src).unwrap(), fills, info)
    }

    fn shop() -> ChartInfo {
        info(
            ChartSubtype::VerticalBar,
            &["keyboard", "mouse", "lamp", "sunglass", "kettle"],
            &["sales"],
            &[&["40.2", "85.6", "100.01", "101.1", "12"]],
        )
    }

    #[test]
    fn interval_average() {
        let program = "s1 = getEntityValue(1)\ns2 = getEntityValue(2)\ns3 = getIntervalValueByEntity(s1, s2)\ns4 = avg(s3)";
        let info = shop();
        let fills = text_fills(&["mouse", "sunglass"]);
        let p = SolutionProgram::parse(program).unwrap();
        let mut ctx = ExecContext::new(&info, &fills);
        for step in &p.steps[..2] {
            let v = run_step(step, &ctx).unwrap();
            ctx.steps.push(v);
        }
        let interval = run_step(&p.steps[2], &ctx).unwrap();
        let Value::NumList(l) = &interval else { panic!() };
        assert_eq!(l.values, vec![d("85.6"), d("100.01"), d("101.1")]);
        assert_eq!(run(program, &fills, &info).unwrap(), Value::Number(d("95.57")));
        let reversed = text_fills(&["sunglass", "mouse"]);
        assert_eq!(run(program, &reversed, &info).unwrap(), Value::Number(d("95.57")));
    }

    #[test]
    fn aggregates_over_empty_lists_fail() {
        let step = AtomicOp { op: OpName::Max, args: vec![Operand::Step(1)] };
        let info = shop();
        let mut ctx = ExecContext::new(&info, &[]);
        ctx.steps.push(Value::NumList(NumList::new(vec![], vec![])));
        assert_eq!(run_step(&step, &ctx), Err(AnswerError::EmptyList(OpName::Max)));
        let wrapped = run("s1 = getAllValues()\ns2 = filterGreater(s1, 1000)\ns3 = max(s2)", &[], &info);
        assert_eq!(wrapped, Err(AnswerError::AtStep { index: 3, source: Box::new(AnswerError::EmptyList(OpName::Max)) }));
    }

    #[test]
    fn singleton_and_self_difference() {
        let one = info(ChartSubtype::VerticalBar, &["a"], &["x"], &[&["7.5"]]);
        assert_eq!(run("s1 = getAllValues()\ns2 = max(s1)", &[], &one).unwrap().to_string(), "7.50");
        let fills = text_fills(&["lamp"]);
        let diff = "s1 = getValueByEntity(fill1)\ns2 = getValueByEntity(fill1)\ns3 = diff(s1, s2)";
        assert_eq!(run(diff, &fills, &shop()).unwrap().to_string(), "0.00");
    }

    #[test]
    fn median_and_ties() {
        assert_eq!(median(&[d("3"), d("1"), d("2")]), d("2"));
        assert_eq!(median(&[d("4"), d("1"), d("2"), d("3")]), d("2.5"));
        let tie = info(ChartSubtype::VerticalBar, &["a", "b", "c"], &["x"], &[&["5", "9", "9"]]);
        assert_eq!(run("s1 = getAllValues()\ns2 = argmax(s1)", &[], &tie).unwrap(), Value::Text("b".into()));
        assert_eq!(run("s1 = getAllValues()\ns2 = argmin(s1)", &[], &tie).unwrap(), Value::Text("a".into()));
    }

    #[test]
    fn multi_series_lookups() {
        let g = info(ChartSubtype::GroupVerticalBar, &["a", "b"], &["x", "y"], &[&["1", "2"], &["3", "4"]]);
        let fills = text_fills(&["b", "y"]);
        assert_eq!(run("s1 = getValueByEntity(fill1, fill2)", &fills, &g).unwrap(), Value::Number(d("4.00")));
        assert_eq!(run("s1 = getValueByEntity(fill1)\ns2 = argmax(s1)", &fills, &g).unwrap(), Value::Text("y".into()));
        assert_eq!(run("s1 = getValueByLegend(fill2)\ns2 = sum(s1)", &fills, &g).unwrap().to_string(), "7.00");
        assert_eq!(run("s1 = countEntities()", &[], &g).unwrap(), Value::Int(2));
        assert_eq!(run("s1 = colorOf(fill2)", &fills, &g).unwrap(), Value::Text("y-color".into()));
        assert_eq!(run("s1 = orientation()", &[], &g).unwrap(), Value::Text("vertical".into()));
        let missing = run("s1 = getValueByEntity(\"zzz\")", &[], &g);
        assert_eq!(missing, Err(AnswerError::AtStep { index: 1, source: Box::new(AnswerError::UnknownLabel("zzz".into())) }));
    }

    #[test]
    fn counts_ratios_and_comparisons() {
        let s = shop();
        let v = [Value::Number(d("90"))];
        assert_eq!(run("s1 = getAllValues()\ns2 = countGreater(s1, fill1)", &v, &s).unwrap(), Value::Int(2));
        assert_eq!(run("s1 = getAllValues()\ns2 = countLess(s1, fill1)", &v, &s).unwrap(), Value::Int(3));
        assert_eq!(run("s1 = getAllValues()\ns2 = max(s1)\ns3 = greaterThan(s2, fill1)", &v, &s).unwrap().to_string(), "Yes");
        assert_eq!(run("s1 = ratio(1, 3)", &[], &s).unwrap().to_string(), "0.33");
        assert_eq!(
            run("s1 = ratio(1, 0)", &[], &s),
            Err(AnswerError::AtStep { index: 1, source: Box::new(AnswerError::DivisionByZero) })
        );
        assert_eq!(run("s1 = entityAt(2)", &[], &s).unwrap(), Value::Text("mouse".into()));
        assert!(run("s1 = entityAt(9)", &[], &s).is_err());
    }

    #[test]
    fn box_charts_use_summary_statistics() {
        let mut b = info(ChartSubtype::MultiBoxplot, &["a", "b"], &["obs_1", "obs_2"], &[&["1", "2"], &["3", "4"]]);
        let stats = |e: &str, m: &str| BoxStats { entity: e.into(), min: d("0"), q1: d("1"), median: d(m), q3: d("8"), max: d("9") };
        b.dsc.box_stats = vec![stats("a", "3.5"), stats("b", "6.25")];
        let fills = text_fills(&["b"]);
        assert_eq!(run("s1 = getValueByEntity(fill1, \"median\")", &fills, &b).unwrap().to_string(), "6.25");
        assert_eq!(run("s1 = getValueByLegend(\"median\")\ns2 = argmax(s1)", &[], &b).unwrap(), Value::Text("b".into()));
    }

    #[test]
    fn parent_membership_comes_from_recorded_lists() {
        let mut s = shop();
        s.entity_parents = ["device", "device", "furniture", "accessory", "appliance"].iter().map(|p| p.to_string()).collect();
        let fills = text_fills(&["device"]);
        let p = "s1 = getEntitiesByParent(fill1)\ns2 = getValueByEntity(s1)\ns3 = sum(s2)";
        assert_eq!(run(p, &fills, &s).unwrap().to_string(), "125.80");
        assert!(run(p, &text_fills(&["vehicle"]), &s).is_err());
    }
}
