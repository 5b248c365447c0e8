//! Page composition: places the chart, pictures, prose and lists into one to
//! three columns and records every element's bounding box.

mod annotation;
pub mod schema;
mod text;
pub mod xml;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::ChartInfo;
use crate::render::svg::{self, text_width, Anchor, Node, SvgDoc};
use crate::rng::SeededRng;
pub use annotation::{parse_annotation, write_annotation, Annotation, AnnotationError, QaPair};
pub use schema::{Schema, SchemaError};
pub use text::{wrap, FillerText, TextProvider};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("document {doc_id}: the chart did not fit after {attempts} layouts")]
    DoesNotFit { doc_id: String, attempts: usize },
    #[error("the image pool is empty")]
    EmptyImagePool,
    #[error("image pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    ChartImage,
    Picture,
    Text,
    List,
    Caption,
    PageHeader,
    PageFooter,
    PageNumber,
}

impl ElementKind {
    pub const ALL: [ElementKind; 8] = [
        ElementKind::ChartImage,
        ElementKind::Picture,
        ElementKind::Text,
        ElementKind::List,
        ElementKind::Caption,
        ElementKind::PageHeader,
        ElementKind::PageFooter,
        ElementKind::PageNumber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::ChartImage => "chart_image",
            ElementKind::Picture => "picture",
            ElementKind::Text => "text",
            ElementKind::List => "list",
            ElementKind::Caption => "caption",
            ElementKind::PageHeader => "page_header",
            ElementKind::PageFooter => "page_footer",
            ElementKind::PageNumber => "page_number",
        }
    }

    pub fn is_textual(self) -> bool {
        !matches!(self, ElementKind::ChartImage | ElementKind::Picture)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ElementKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown element kind `{s}`"))
    }
}

/// Integer pixel box, origin at the page's top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

impl BBox {
    pub fn width(&self) -> u32 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> u32 {
        self.y2 - self.y1
    }

    pub fn overlaps(&self, o: &BBox) -> bool {
        self.x1 < o.x2 && o.x1 < self.x2 && self.y1 < o.y2 && o.y1 < self.y2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocElement {
    pub kind: ElementKind,
    pub bbox: BBox,
    /// Text for textual kinds, empty otherwise.
    pub content: String,
    /// Relative path of the chart or picture file for graphical kinds.
    pub payload: Option<String>,
    /// 0-based column; `None` for elements in the page margins.
    pub column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub page_width: u32,
    pub page_height: u32,
    pub column_count: usize,
    pub elements: Vec<DocElement>,
    pub chart_id: String,
    pub table_id: String,
    pub question_ids: Vec<String>,
}

impl DocumentRecord {
    pub fn chart(&self) -> Option<&DocElement> {
        self.elements.iter().find(|e| e.kind == ElementKind::ChartImage)
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    /// Checks the structural invariants of a composed page.
    pub fn validate(&self, max_caption_gap: u32) -> Result<(), String> {
        for e in &self.elements {
            let b = e.bbox;
            if b.x1 >= b.x2 || b.y1 >= b.y2 {
                return Err(format!("{} has an empty box {b:?}", e.kind));
            }
            if b.x2 > self.page_width || b.y2 > self.page_height {
                return Err(format!("{} box {b:?} leaves the page", e.kind));
            }
            if e.kind.is_textual() != e.payload.is_none() {
                return Err(format!("{} payload does not match its kind", e.kind));
            }
            if !e.kind.is_textual() && !e.content.is_empty() {
                return Err(format!("{} must have empty content", e.kind));
            }
        }
        if self.count(ElementKind::ChartImage) != 1 || self.count(ElementKind::Caption) != 1 {
            return Err("a page needs exactly one chart and one caption".into());
        }
        for k in [ElementKind::PageHeader, ElementKind::PageFooter, ElementKind::PageNumber] {
            if self.count(k) > 1 {
                return Err(format!("more than one {k}"));
            }
        }
        let chart = self.chart().unwrap();
        let caption = self.elements.iter().find(|e| e.kind == ElementKind::Caption).unwrap();
        if caption.column != chart.column || caption.bbox.y1 < chart.bbox.y2 || caption.bbox.y1 - chart.bbox.y2 > max_caption_gap {
            return Err("the caption must sit directly below the chart".into());
        }
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                if a.column.is_some() && a.column == b.column && a.bbox.overlaps(&b.bbox) {
                    return Err(format!("{} and {} overlap in column {:?}", a.kind, b.kind, a.column));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutConfig {
    pub page_width: u32,
    pub page_height: u32,
    pub margin_x: u32,
    pub margin_top: u32,
    pub margin_bottom: u32,
    pub column_gap: u32,
    /// Vertical space between stacked elements.
    pub padding: u32,
    pub caption_gap: u32,
    pub min_element_height: u32,
    pub text_weight: f64,
    pub picture_weight: f64,
    pub list_weight: f64,
    pub chart_weight: f64,
    pub body_size: f64,
    pub line_height: u32,
    pub max_layout_attempts: usize,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            page_width: 794,
            page_height: 1123,
            margin_x: 48,
            margin_top: 72,
            margin_bottom: 72,
            column_gap: 24,
            padding: 12,
            caption_gap: 4,
            min_element_height: 40,
            text_weight: 0.45,
            picture_weight: 0.15,
            list_weight: 0.15,
            chart_weight: 0.25,
            body_size: 11.0,
            line_height: 15,
            max_layout_attempts: 8,
        }
    }
}

impl LayoutConfig {
    fn chars_per_line(&self, width: u32) -> usize {
        (width as f64 / text_width("x", self.body_size)).floor().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolImage {
    pub name: String,
    pub width: f64,
    pub height: f64,
}

impl PoolImage {
    fn aspect(&self) -> f64 {
        self.width / self.height
    }
}

/// Unrelated pictures placed around the chart, referenced by relative path.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePool {
    /// Directory name used in payloads and page links.
    pub dir: String,
    pub images: Vec<PoolImage>,
}

fn svg_size(svg_text: &str) -> Option<(f64, f64)> {
    let root = xml::parse(svg_text).ok()?;
    let num = |k: &str| root.attr(k).and_then(|v| v.trim_end_matches("px").parse::<f64>().ok());
    let from_box = root.attr("viewBox").and_then(|vb| {
        let p: Vec<f64> = vb.split_whitespace().filter_map(|x| x.parse().ok()).collect();
        (p.len() == 4).then(|| (p[2], p[3]))
    });
    let (w, h) = match (num("width"), num("height")) {
        (Some(w), Some(h)) => (w, h),
        _ => from_box?,
    };
    (w > 0.0 && h > 0.0).then_some((w, h))
}

impl ImagePool {
    pub fn bundled() -> ImagePool {
        let images = crate::bundled::IMAGE_POOL
            .iter()
            .map(|(name, text)| {
                let (width, height) = svg_size(text).expect("bundled pool image has a size");
                PoolImage { name: name.to_string(), width, height }
            })
            .collect();
        ImagePool { dir: "images".into(), images }
    }

    /// Loads every `.svg` file in `dir`, sorted by name.
    pub fn from_dir(dir: &Path) -> Result<ImagePool, DocumentError> {
        let mut images = Vec::new();
        let entries = std::fs::read_dir(dir).map_err(|e| DocumentError::Pool(format!("{}: {e}", dir.display())))?;
        for entry in entries {
            let path = entry.map_err(|e| DocumentError::Pool(e.to_string()))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("svg") {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| DocumentError::Pool(format!("{}: {e}", path.display())))?;
            let (width, height) = svg_size(&text).ok_or_else(|| DocumentError::Pool(format!("{}: no usable size", path.display())))?;
            images.push(PoolImage { name: path.file_name().unwrap().to_string_lossy().into_owned(), width, height });
        }
        images.sort_by(|a, b| a.name.cmp(&b.name));
        if images.is_empty() {
            return Err(DocumentError::EmptyImagePool);
        }
        Ok(ImagePool { dir: "images".into(), images })
    }
}

/// Everything composition needs besides the random source.
pub struct PageInputs<'a> {
    pub doc_id: &'a str,
    pub chart: &'a SvgDoc,
    /// Path of the chart file relative to the dataset root.
    pub chart_path: &'a str,
    pub info: &'a ChartInfo,
    pub pool: &'a ImagePool,
    pub text: &'a dyn TextProvider,
    /// Prefix that turns dataset-relative paths into links from the page file.
    pub link_prefix: &'a str,
}

#[derive(Debug, Clone)]
struct Placed {
    element: DocElement,
    node: Node,
}

struct Column {
    index: usize,
    x: u32,
    width: u32,
    top: u32,
    bottom: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pick {
    Text,
    Picture,
    List,
    Chart,
}

fn text_block(lines: &[String], x: f64, y: u32, cfg: &LayoutConfig, class: &str, italic: bool) -> Node {
    let mut g = Node::new("g").attr("class", class.to_string());
    for (k, l) in lines.iter().enumerate() {
        let baseline = y as f64 + cfg.body_size + (k as u32 * cfg.line_height) as f64;
        let mut t = svg::text(x, baseline, l, cfg.body_size, "#222222", Anchor::Start);
        if italic {
            t = t.attr("font-style", "italic");
        }
        g.push(t);
    }
    g
}

fn lines_width(lines: &[String], cfg: &LayoutConfig) -> u32 {
    lines.iter().map(|l| text_width(l, cfg.body_size)).fold(0.0, f64::max).ceil() as u32
}

struct Composer<'a, 'b> {
    inputs: &'b PageInputs<'a>,
    cfg: &'b LayoutConfig,
}

impl Composer<'_, '_> {
    fn caption_lines(&self, width: u32) -> Vec<String> {
        let mut lines = wrap(&format!("Figure 1. {}", self.inputs.info.title), self.cfg.chars_per_line(width));
        lines.truncate(2);
        lines
    }

    fn chart_height(&self, width: u32) -> u32 {
        (width as f64 * self.inputs.chart.height / self.inputs.chart.width).round() as u32
    }

    fn chart_need(&self, col: &Column) -> u32 {
        self.chart_height(col.width) + self.cfg.caption_gap + self.caption_lines(col.width).len() as u32 * self.cfg.line_height
    }

    fn place_chart(&self, col: &Column, y: u32) -> (Vec<Placed>, u32) {
        let cfg = self.cfg;
        let h = self.chart_height(col.width);
        let bbox = BBox { x1: col.x, y1: y, x2: col.x + col.width, y2: y + h };
        let sx = col.width as f64 / self.inputs.chart.width;
        let sy = h as f64 / self.inputs.chart.height;
        let node = Node::new("g")
            .attr("class", "chart-image")
            .attr("transform", format!("translate({} {}) scale({sx} {sy})", col.x, y))
            .child(self.inputs.chart.to_group());
        let chart = Placed {
            element: DocElement {
                kind: ElementKind::ChartImage,
                bbox,
                content: String::new(),
                payload: Some(self.inputs.chart_path.to_string()),
                column: Some(col.index),
            },
            node,
        };
        let lines = self.caption_lines(col.width);
        let cy = bbox.y2 + cfg.caption_gap;
        let caption = Placed {
            element: DocElement {
                kind: ElementKind::Caption,
                bbox: BBox { x1: col.x, y1: cy, x2: col.x + lines_width(&lines, cfg).clamp(1, col.width), y2: cy + lines.len() as u32 * cfg.line_height },
                content: lines.join(" "),
                payload: None,
                column: Some(col.index),
            },
            node: text_block(&lines, col.x as f64, cy, cfg, "caption", true),
        };
        let bottom = caption.element.bbox.y2;
        (vec![chart, caption], bottom)
    }

    fn place_text(&self, col: &Column, y: u32, max_h: u32, rng: &mut SeededRng) -> Option<(Placed, u32)> {
        let cfg = self.cfg;
        let n_lines = (max_h / cfg.line_height) as usize;
        if n_lines == 0 {
            return None;
        }
        let width = cfg.chars_per_line(col.width);
        let body = self.inputs.text.paragraph(self.inputs.info, width * n_lines, rng);
        let mut lines = wrap(&body, width);
        lines.truncate(n_lines);
        if let Some(last) = lines.last_mut() {
            if !last.ends_with('.') {
                last.push('.');
                if last.chars().count() > width {
                    let cut: String = last.chars().take(width - 1).collect();
                    *last = format!("{}.", cut.trim_end());
                }
            }
        }
        let h = lines.len() as u32 * cfg.line_height;
        let element = DocElement {
            kind: ElementKind::Text,
            bbox: BBox { x1: col.x, y1: y, x2: col.x + lines_width(&lines, cfg).clamp(1, col.width), y2: y + h },
            content: lines.join(" "),
            payload: None,
            column: Some(col.index),
        };
        Some((Placed { node: text_block(&lines, col.x as f64, y, cfg, "text", false), element }, y + h))
    }

    fn place_list(&self, col: &Column, y: u32, max_h: u32, rng: &mut SeededRng) -> Option<(Placed, u32)> {
        let cfg = self.cfg;
        let budget = (max_h / cfg.line_height) as usize;
        let width = cfg.chars_per_line(col.width).saturating_sub(2).max(1);
        let mut items = Vec::new();
        let mut lines: Vec<String> = Vec::new();
        while lines.len() < budget {
            let item = self.inputs.text.list_item(self.inputs.info, width, rng);
            let wrapped = wrap(&item, width);
            if lines.len() + wrapped.len() > budget {
                break;
            }
            for (k, l) in wrapped.iter().enumerate() {
                lines.push(if k == 0 { format!("\u{2022} {l}") } else { format!("  {l}") });
            }
            items.push(item);
        }
        if items.is_empty() {
            return None;
        }
        let h = lines.len() as u32 * cfg.line_height;
        let element = DocElement {
            kind: ElementKind::List,
            bbox: BBox { x1: col.x, y1: y, x2: col.x + lines_width(&lines, cfg).clamp(1, col.width), y2: y + h },
            content: items.join("\n"),
            payload: None,
            column: Some(col.index),
        };
        Some((Placed { node: text_block(&lines, col.x as f64, y, cfg, "list", false), element }, y + h))
    }

    fn place_picture(&self, col: &Column, y: u32, max_h: u32, rng: &mut SeededRng) -> Option<(Placed, u32)> {
        let img = self.inputs.pool.images.choose(rng)?;
        let lo = self.cfg.min_element_height;
        let target = rng.gen_range(lo..=max_h.min(320).max(lo));
        let mut w = ((target as f64 * img.aspect()).round() as u32).min(col.width);
        let mut h = (w as f64 / img.aspect()).round() as u32;
        if h > max_h {
            h = max_h;
            w = ((h as f64 * img.aspect()).round() as u32).min(col.width);
        }
        if h < lo || w == 0 {
            return None;
        }
        let x = col.x + (col.width - w) / 2;
        let path = format!("{}/{}", self.inputs.pool.dir, img.name);
        let node = Node::new("image")
            .attr("class", "picture")
            .attr("href", format!("{}{path}", self.inputs.link_prefix))
            .attr("x", x.to_string())
            .attr("y", y.to_string())
            .attr("width", w.to_string())
            .attr("height", h.to_string())
            .attr("preserveAspectRatio", "none");
        let element = DocElement {
            kind: ElementKind::Picture,
            bbox: BBox { x1: x, y1: y, x2: x + w, y2: y + h },
            content: String::new(),
            payload: Some(path),
            column: Some(col.index),
        };
        Some((Placed { element, node }, y + h))
    }

    /// Stacks elements down one column until less than the minimum element
    /// height remains. The chart, when requested, is placed exactly once.
    fn fill_column(&self, col: &Column, with_chart: bool, rng: &mut SeededRng) -> Result<Vec<Placed>, ()> {
        let cfg = self.cfg;
        let mut out = Vec::new();
        let mut y = col.top;
        let mut pending = with_chart;
        let need = if with_chart { self.chart_need(col) } else { 0 };
        if need > col.bottom.saturating_sub(col.top) {
            return Err(());
        }
        loop {
            let remaining = col.bottom.saturating_sub(y);
            if remaining < cfg.min_element_height || (pending && remaining < need) {
                break;
            }
            let reserve = if pending { need + cfg.padding } else { 0 };
            let room = remaining.saturating_sub(reserve);
            let mut choices = Vec::new();
            if room >= cfg.min_element_height {
                choices.extend([(Pick::Text, cfg.text_weight), (Pick::Picture, cfg.picture_weight), (Pick::List, cfg.list_weight)]);
            }
            if pending {
                choices.push((Pick::Chart, if choices.is_empty() { 1.0 } else { cfg.chart_weight }));
            }
            let total: f64 = choices.iter().map(|c| c.1).sum();
            let mut draw = rng.gen_range(0.0..total);
            let mut pick = choices[choices.len() - 1].0;
            for (p, w) in &choices {
                if draw < *w {
                    pick = *p;
                    break;
                }
                draw -= w;
            }
            let bottom = match pick {
                Pick::Chart => {
                    pending = false;
                    let (placed, bottom) = self.place_chart(col, y);
                    out.extend(placed);
                    bottom
                }
                kind => {
                    let cap = match kind {
                        Pick::Text => 260,
                        Pick::List => 180,
                        _ => 320,
                    };
                    let max_h = rng.gen_range(cfg.min_element_height..=room.min(cap).max(cfg.min_element_height));
                    let placed = match kind {
                        Pick::Text => self.place_text(col, y, max_h, rng),
                        Pick::List => self.place_list(col, y, max_h, rng),
                        _ => self.place_picture(col, y, max_h, rng),
                    };
                    match placed {
                        Some((p, bottom)) => {
                            out.push(p);
                            bottom
                        }
                        None => y + cfg.min_element_height,
                    }
                }
            };
            y = bottom + cfg.padding;
        }
        if pending {
            return Err(());
        }
        Ok(out)
    }

    fn margins(&self, rng: &mut SeededRng) -> Vec<Placed> {
        let cfg = self.cfg;
        let size = 10.0;
        let mut out = Vec::new();
        let mut line = |kind: ElementKind, content: String, x_right: bool, baseline: u32| {
            let w = text_width(&content, size).ceil() as u32;
            let x = if x_right { cfg.page_width - cfg.margin_x - w } else { cfg.margin_x };
            let node = svg::text(x as f64, baseline as f64, &content, size, "#555555", Anchor::Start).attr("class", kind.name());
            out.push(Placed {
                element: DocElement {
                    kind,
                    bbox: BBox { x1: x, y1: baseline - 10, x2: x + w.max(1), y2: baseline + 3 },
                    content,
                    payload: None,
                    column: None,
                },
                node,
            });
        };
        let header = self.inputs.text.header(self.inputs.info, rng);
        let footer = self.inputs.text.footer(self.inputs.info, rng);
        let page = rng.gen_range(1..=400u32).to_string();
        let top = cfg.margin_top / 2 + 4;
        let bottom = cfg.page_height - cfg.margin_bottom / 2;
        line(ElementKind::PageHeader, header, false, top);
        line(ElementKind::PageFooter, footer, false, bottom);
        line(ElementKind::PageNumber, page, true, bottom);
        out
    }

    fn compose(&self, rng: &mut SeededRng) -> Option<(usize, Vec<Placed>)> {
        let cfg = self.cfg;
        let n = rng.gen_range(1..=3usize);
        let content_w = cfg.page_width - 2 * cfg.margin_x;
        let col_w = (content_w - cfg.column_gap * (n as u32 - 1)) / n as u32;
        let chart_col = rng.gen_range(0..n);
        let mut placed = self.margins(rng);
        for i in 0..n {
            let col = Column {
                index: i,
                x: cfg.margin_x + i as u32 * (col_w + cfg.column_gap),
                width: col_w,
                top: cfg.margin_top,
                bottom: cfg.page_height - cfg.margin_bottom,
            };
            placed.extend(self.fill_column(&col, i == chart_col, rng).ok()?);
        }
        Some((n, placed))
    }
}

/// Composes one page. Returns the record and the page SVG text.
pub fn compose_page(
    inputs: &PageInputs,
    cfg: &LayoutConfig,
    rng: &mut SeededRng,
) -> Result<(DocumentRecord, String), DocumentError> {
    if inputs.pool.images.is_empty() {
        return Err(DocumentError::EmptyImagePool);
    }
    let composer = Composer { inputs, cfg };
    for _ in 0..cfg.max_layout_attempts.max(1) {
        let Some((column_count, placed)) = composer.compose(rng) else { continue };
        let mut page = SvgDoc::new(cfg.page_width as f64, cfg.page_height as f64, "#ffffff");
        let mut elements = Vec::with_capacity(placed.len());
        for p in placed {
            page.push(p.node);
            elements.push(p.element);
        }
        let record = DocumentRecord {
            doc_id: inputs.doc_id.to_string(),
            page_width: cfg.page_width,
            page_height: cfg.page_height,
            column_count,
            elements,
            chart_id: inputs.info.chart_id.clone(),
            table_id: inputs.info.table_id.clone(),
            question_ids: Vec::new(),
        };
        let mut svg_text = page.to_svg_string();
        if svg_text.contains("<image") {
            svg_text = svg_text.replacen(
                "xmlns=\"http://www.w3.org/2000/svg\"",
                "xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\"",
                1,
            );
        }
        return Ok((record, svg_text));
    }
    Err(DocumentError::DoesNotFit { doc_id: inputs.doc_id.to_string(), attempts: cfg.max_layout_attempts })
}
