//! Per-document XML annotation: page geometry, the backing table, the
//! question-answer pairs and every placed element.

use quick_xml::escape::escape;
use thiserror::Error;

use super::xml::{self, XmlElement, XmlError};
use super::{BBox, DocElement, DocumentRecord, ElementKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaPair {
    pub question_id: String,
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub record: DocumentRecord,
    pub table: Vec<Vec<String>>,
    pub qa: Vec<QaPair>,
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("annotation is missing `{0}`")]
    Missing(String),
    #[error("bad value for `{field}`: {value}")]
    BadValue { field: String, value: String },
}

fn leaf(out: &mut String, depth: usize, tag: &str, value: &str) {
    out.push_str(&"  ".repeat(depth));
    out.push_str(&format!("<{tag}>{}</{tag}>\n", escape(value)));
}

fn open(out: &mut String, depth: usize, tag: &str) {
    out.push_str(&"  ".repeat(depth));
    out.push_str(&format!("<{tag}>\n"));
}

fn close(out: &mut String, depth: usize, tag: &str) {
    out.push_str(&"  ".repeat(depth));
    out.push_str(&format!("</{tag}>\n"));
}

/// Serializes with two-space indentation. Output is byte-stable for equal input.
pub fn write_annotation(a: &Annotation) -> String {
    let r = &a.record;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<annotation>\n");
    leaf(&mut out, 1, "doc_id", &r.doc_id);
    open(&mut out, 1, "size");
    leaf(&mut out, 2, "width", &r.page_width.to_string());
    leaf(&mut out, 2, "height", &r.page_height.to_string());
    close(&mut out, 1, "size");
    leaf(&mut out, 1, "column_count", &r.column_count.to_string());
    leaf(&mut out, 1, "chart_id", &r.chart_id);
    leaf(&mut out, 1, "table_id", &r.table_id);
    open(&mut out, 1, "table");
    for row in &a.table {
        open(&mut out, 2, "row");
        for cell in row {
            leaf(&mut out, 3, "cell", cell);
        }
        close(&mut out, 2, "row");
    }
    close(&mut out, 1, "table");
    if a.qa.is_empty() {
        out.push_str("  <qa_pairs/>\n");
    } else {
        open(&mut out, 1, "qa_pairs");
        for qa in &a.qa {
            out.push_str(&format!("    <qa question_id=\"{}\">\n", escape(qa.question_id.as_str())));
            leaf(&mut out, 3, "question", &qa.question);
            leaf(&mut out, 3, "answer", &qa.answer);
            close(&mut out, 2, "qa");
        }
        close(&mut out, 1, "qa_pairs");
    }
    for e in &r.elements {
        match e.column {
            Some(c) => out.push_str(&format!("  <object column=\"{c}\">\n")),
            None => open(&mut out, 1, "object"),
        }
        leaf(&mut out, 2, "name", e.kind.name());
        open(&mut out, 2, "boundingbox");
        for (tag, v) in [("x1", e.bbox.x1), ("y1", e.bbox.y1), ("x2", e.bbox.x2), ("y2", e.bbox.y2)] {
            leaf(&mut out, 3, tag, &v.to_string());
        }
        close(&mut out, 2, "boundingbox");
        leaf(&mut out, 2, "content", &e.content);
        if let Some(p) = &e.payload {
            leaf(&mut out, 2, "payload", p);
        }
        close(&mut out, 1, "object");
    }
    out.push_str("</annotation>\n");
    out
}

fn child<'a>(el: &'a XmlElement, name: &str) -> Result<&'a XmlElement, AnnotationError> {
    el.child(name).ok_or_else(|| AnnotationError::Missing(name.to_string()))
}

fn number<T: std::str::FromStr>(el: &XmlElement, name: &str) -> Result<T, AnnotationError> {
    let text = &child(el, name)?.text;
    text.trim().parse().map_err(|_| AnnotationError::BadValue { field: name.to_string(), value: text.clone() })
}

pub fn parse_annotation(text: &str) -> Result<Annotation, AnnotationError> {
    let root = xml::parse(text)?;
    let size = child(&root, "size")?;
    let table = child(&root, "table")?
        .children_named("row")
        .map(|row| row.children_named("cell").map(|c| c.text.clone()).collect())
        .collect();
    let qa = child(&root, "qa_pairs")?
        .children_named("qa")
        .map(|q| {
            Ok(QaPair {
                question_id: q.attr("question_id").ok_or_else(|| AnnotationError::Missing("question_id".into()))?.to_string(),
                question: child(q, "question")?.text.clone(),
                answer: child(q, "answer")?.text.clone(),
            })
        })
        .collect::<Result<Vec<_>, AnnotationError>>()?;
    let mut elements = Vec::new();
    for o in root.children_named("object") {
        let name = &child(o, "name")?.text;
        let kind: ElementKind = name.parse().map_err(|_| AnnotationError::BadValue { field: "name".into(), value: name.clone() })?;
        let b = child(o, "boundingbox")?;
        let column = match o.attr("column") {
            None => None,
            Some(c) => Some(c.parse().map_err(|_| AnnotationError::BadValue { field: "column".into(), value: c.to_string() })?),
        };
        elements.push(DocElement {
            kind,
            bbox: BBox { x1: number(b, "x1")?, y1: number(b, "y1")?, x2: number(b, "x2")?, y2: number(b, "y2")? },
            content: child(o, "content")?.text.clone(),
            payload: o.child("payload").map(|p| p.text.clone()),
            column,
        });
    }
    let record = DocumentRecord {
        doc_id: child(&root, "doc_id")?.text.clone(),
        page_width: number(size, "width")?,
        page_height: number(size, "height")?,
        column_count: number(&root, "column_count")?,
        elements,
        chart_id: child(&root, "chart_id")?.text.clone(),
        table_id: child(&root, "table_id")?.text.clone(),
        question_ids: qa.iter().map(|q| q.question_id.clone()).collect(),
    };
    Ok(Annotation { record, table, qa })
}
