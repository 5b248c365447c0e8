//! Solution programs: one atomic operation per line, `s<k> = opName(arg, ...)`.

use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("step {step}: `{op}` takes {expected} argument(s), got {got}")]
    Arity { step: usize, op: OpName, expected: String, got: usize },
    #[error("step {step}: reference `{reference}` does not point to an earlier step or a declared fill")]
    BadReference { step: usize, reference: String },
    #[error("step {step}: `{op}` expects {expected} for argument {arg}, got {found}")]
    Type { step: usize, op: OpName, arg: usize, expected: &'static str, found: &'static str },
    #[error("the last step must produce a scalar, `{0}` produces a list")]
    ListAnswer(OpName),
    #[error("program has no steps")]
    Empty,
}

macro_rules! ops {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum OpName { $($variant),* }

        impl OpName {
            pub const ALL: &'static [OpName] = &[$(OpName::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(OpName::$variant => $name),* }
            }
        }

        impl FromStr for OpName {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(OpName::$variant),)*
                    other => Err(format!("unknown operation `{other}`")),
                }
            }
        }
    };
}

ops! {
    GetEntityValue => "getEntityValue",
    GetValueByEntity => "getValueByEntity",
    GetValueByLegend => "getValueByLegend",
    GetIntervalValueByEntity => "getIntervalValueByEntity",
    GetAllValues => "getAllValues",
    GetEntitiesByParent => "getEntitiesByParent",
    GetLegendsByParent => "getLegendsByParent",
    ColorOf => "colorOf",
    EntityAt => "entityAt",
    CountEntities => "countEntities",
    Max => "max",
    Min => "min",
    Median => "median",
    Avg => "avg",
    Sum => "sum",
    Diff => "diff",
    Ratio => "ratio",
    CountGreater => "countGreater",
    CountLess => "countLess",
    GreaterThan => "greaterThan",
    LessThan => "lessThan",
    EqualsText => "equalsText",
    Argmax => "argmax",
    Argmin => "argmin",
    FilterGreater => "filterGreater",
    FilterLess => "filterLess",
    Orientation => "orientation",
}

impl fmt::Display for OpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Static operand types. `Any` stands for values only known at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Number,
    Text,
    Bool,
    NumList,
    TextList,
    Any,
}

impl Ty {
    pub fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Number => "number",
            Ty::Text => "text",
            Ty::Bool => "bool",
            Ty::NumList => "number list",
            Ty::TextList => "text list",
            Ty::Any => "any",
        }
    }
}

/// Accepted operand shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Want {
    Numeric,
    Text,
    TextOrList,
    NumList,
    IntLiteral,
}

impl Want {
    fn name(self) -> &'static str {
        match self {
            Want::Numeric => "a number",
            Want::Text => "text",
            Want::TextOrList => "text or a text list",
            Want::NumList => "a number list",
            Want::IntLiteral => "an integer literal",
        }
    }

    fn accepts(self, t: Ty) -> bool {
        match (self, t) {
            (_, Ty::Any) => self != Want::IntLiteral,
            (Want::Numeric, Ty::Int | Ty::Number) => true,
            (Want::Text, Ty::Text) => true,
            (Want::TextOrList, Ty::Text | Ty::TextList) => true,
            (Want::NumList, Ty::NumList) => true,
            (Want::IntLiteral, Ty::Int) => true,
            _ => false,
        }
    }
}

impl OpName {
    /// Required operands followed by optional ones.
    fn signature(self) -> (&'static [Want], &'static [Want]) {
        use OpName::*;
        use Want::*;
        match self {
            GetEntityValue => (&[IntLiteral], &[]),
            GetValueByEntity => (&[TextOrList], &[TextOrList]),
            GetValueByLegend => (&[TextOrList], &[]),
            GetIntervalValueByEntity => (&[Text, Text], &[Text]),
            GetAllValues | CountEntities | Orientation => (&[], &[]),
            GetEntitiesByParent | GetLegendsByParent | ColorOf => (&[Text], &[]),
            EntityAt => (&[Numeric], &[]),
            Max | Min | Median | Avg | Sum | Argmax | Argmin => (&[NumList], &[]),
            Diff | Ratio | GreaterThan | LessThan => (&[Numeric, Numeric], &[]),
            CountGreater | CountLess | FilterGreater | FilterLess => (&[NumList, Numeric], &[]),
            EqualsText => (&[Text, Text], &[]),
        }
    }

    /// Static result type given the operand types.
    fn result(self, args: &[Ty]) -> Ty {
        use OpName::*;
        match self {
            GetEntityValue | GetValueByEntity => Ty::Any,
            GetValueByLegend | GetIntervalValueByEntity | GetAllValues | FilterGreater | FilterLess => Ty::NumList,
            GetEntitiesByParent | GetLegendsByParent => Ty::TextList,
            ColorOf | EntityAt | Argmax | Argmin | Orientation => Ty::Text,
            CountEntities | CountGreater | CountLess => Ty::Int,
            Max | Min | Median | Avg | Sum | Ratio => Ty::Number,
            Diff => match args {
                [Ty::Int, Ty::Int] => Ty::Int,
                _ if args.contains(&Ty::Any) => Ty::Any,
                _ => Ty::Number,
            },
            GreaterThan | LessThan | EqualsText => Ty::Bool,
        }
    }

    /// Whether the op aggregates a list into a single number.
    pub fn is_aggregate(self) -> bool {
        use OpName::*;
        matches!(self, Max | Min | Median | Avg | Sum | Argmax | Argmin | CountGreater | CountLess)
    }

    /// Whether the op narrows a list by a predicate or a parent class.
    pub fn is_filter(self) -> bool {
        use OpName::*;
        matches!(self, FilterGreater | FilterLess | GetEntitiesByParent | GetLegendsByParent | GetValueByLegend | GetIntervalValueByEntity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    /// 1-based fill index.
    Fill(usize),
    /// 1-based step index.
    Step(usize),
    Int(i64),
    Number(Decimal),
    Text(String),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Fill(i) => write!(f, "fill{i}"),
            Operand::Step(i) => write!(f, "s{i}"),
            Operand::Int(i) => write!(f, "{i}"),
            Operand::Number(d) => write!(f, "{d}"),
            Operand::Text(t) => write!(f, "\"{t}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicOp {
    pub op: OpName,
    pub args: Vec<Operand>,
}

impl fmt::Display for AtomicOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(Operand::to_string).collect();
        write!(f, "{}({})", self.op, args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionProgram {
    pub steps: Vec<AtomicOp>,
}

impl SolutionProgram {
    pub fn parse(text: &str) -> Result<Self, ProgramError> {
        let mut steps = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| ProgramError::Syntax { line: n + 1, message };
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| syntax("expected `s<k> = op(...)`".into()))?;
            let expected = format!("s{}", steps.len() + 1);
            if lhs.trim() != expected {
                return Err(syntax(format!("expected step name `{expected}`, found `{}`", lhs.trim())));
            }
            let rhs = rhs.trim();
            let open = rhs.find('(').ok_or_else(|| syntax("missing `(`".into()))?;
            if !rhs.ends_with(')') {
                return Err(syntax("missing `)`".into()));
            }
            let op: OpName = rhs[..open].trim().parse().map_err(syntax)?;
            let args = split_args(&rhs[open + 1..rhs.len() - 1])
                .map_err(syntax)?
                .into_iter()
                .map(|a| parse_operand(&a).map_err(syntax))
                .collect::<Result<Vec<_>, _>>()?;
            steps.push(AtomicOp { op, args });
        }
        Ok(SolutionProgram { steps })
    }

    /// Checks arity, references and operand types; returns the answer type.
    pub fn typecheck(&self, fills: &[Ty]) -> Result<Ty, ProgramError> {
        let mut types: Vec<Ty> = Vec::with_capacity(self.steps.len());
        for (k, step) in self.steps.iter().enumerate() {
            let number = k + 1;
            let (req, opt) = step.op.signature();
            if step.args.len() < req.len() || step.args.len() > req.len() + opt.len() {
                let expected = if opt.is_empty() {
                    req.len().to_string()
                } else {
                    format!("{}..={}", req.len(), req.len() + opt.len())
                };
                return Err(ProgramError::Arity { step: number, op: step.op, expected, got: step.args.len() });
            }
            let mut arg_types = Vec::with_capacity(step.args.len());
            for (i, (arg, want)) in step.args.iter().zip(req.iter().chain(opt)).enumerate() {
                let t = match arg {
                    Operand::Fill(f) if *f >= 1 && *f <= fills.len() => fills[f - 1],
                    Operand::Step(s) if *s >= 1 && *s < number => types[s - 1],
                    Operand::Fill(_) | Operand::Step(_) => {
                        return Err(ProgramError::BadReference { step: number, reference: arg.to_string() })
                    }
                    Operand::Int(_) => Ty::Int,
                    Operand::Number(_) => Ty::Number,
                    Operand::Text(_) => Ty::Text,
                };
                let literal_ok = *want != Want::IntLiteral || matches!(arg, Operand::Int(_));
                if !want.accepts(t) || !literal_ok {
                    return Err(ProgramError::Type { step: number, op: step.op, arg: i + 1, expected: want.name(), found: t.name() });
                }
                arg_types.push(t);
            }
            let mut result = step.op.result(&arg_types);
            if step.op == OpName::GetEntityValue {
                let Operand::Int(f) = step.args[0] else { unreachable!() };
                if f < 1 || f as usize > fills.len() {
                    return Err(ProgramError::BadReference { step: number, reference: format!("fill{f}") });
                }
                result = fills[f as usize - 1];
            }
            types.push(result);
        }
        let last = self.steps.last().ok_or(ProgramError::Empty)?;
        let answer = *types.last().unwrap();
        if matches!(answer, Ty::NumList | Ty::TextList) {
            return Err(ProgramError::ListAnswer(last.op));
        }
        Ok(answer)
    }

    pub fn ops(&self) -> impl Iterator<Item = OpName> + '_ {
        self.steps.iter().map(|s| s.op)
    }
}

impl FromStr for SolutionProgram {
    type Err = ProgramError;
    fn from_str(s: &str) -> Result<Self, ProgramError> {
        SolutionProgram::parse(s)
    }
}

impl fmt::Display for SolutionProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, step) in self.steps.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "s{} = {step}", k + 1)?;
        }
        Ok(())
    }
}

impl Serialize for SolutionProgram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SolutionProgram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn split_args(inner: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in inner.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated string literal".into());
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur);
    }
    Ok(out.into_iter().map(|a| a.trim().to_string()).collect())
}

fn parse_operand(a: &str) -> Result<Operand, String> {
    let index = |rest: &str| rest.parse::<usize>().ok().filter(|&i| i >= 1);
    if a.len() >= 2 && a.starts_with('"') && a.ends_with('"') {
        return Ok(Operand::Text(a[1..a.len() - 1].to_string()));
    }
    if let Some(i) = a.strip_prefix("fill").and_then(index) {
        return Ok(Operand::Fill(i));
    }
    if let Some(i) = a.strip_prefix('s').and_then(index) {
        return Ok(Operand::Step(i));
    }
    if let Ok(i) = a.parse::<i64>() {
        return Ok(Operand::Int(i));
    }
    if let Ok(d) = a.parse::<Decimal>() {
        return Ok(Operand::Number(d));
    }
    Err(format!("cannot read operand `{a}`"))
}
