//! Native SVG rendering for every chart subtype.
//!
//! Geometry depends only on the chart spec and the config. Text is measured
//! with a fixed-advance approximation; numbers print with two decimals.

mod cartesian;
mod polar;
pub mod scale;
pub mod svg;

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{check_compatible, ChartError, ChartExtras, ChartFamily, ChartSpec, ChartSubtype};
use crate::table::DataTable;
pub use scale::{data_to_pixels, nice_ticks, AxisScale, Orientation, Ticks};
pub use svg::{text_width, Anchor, Node, SvgDoc};

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("labels do not fit a {width}x{height} canvas: {reason}")]
    RenderOverflow { width: f64, height: f64, reason: String },
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Canvas scale factor for the single retry after an overflow.
    pub growth: f64,
    pub title_size: f64,
    pub axis_title_size: f64,
    pub label_size: f64,
    pub value_size: f64,
    pub legend_size: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            width: 800.0,
            height: 600.0,
            margin: 60.0,
            growth: 1.25,
            title_size: 18.0,
            axis_title_size: 13.0,
            label_size: 11.0,
            value_size: 10.0,
            legend_size: 12.0,
        }
    }
}

/// Neutral gridline colors, besides the background's text and axis colors.
pub const GRID_LIGHT: &str = "#e6e6e6";
pub const GRID_DARK: &str = "#3a3a42";

pub fn render(spec: &ChartSpec) -> Result<SvgDoc, RenderError> {
    render_with(spec, &RenderConfig::default())
}

/// Renders at the configured size, growing the canvas once on overflow.
pub fn render_with(spec: &ChartSpec, cfg: &RenderConfig) -> Result<SvgDoc, RenderError> {
    check_compatible(spec.subtype, &spec.table)?;
    match draw(spec, cfg, cfg.width, cfg.height) {
        Err(RenderError::RenderOverflow { .. }) => draw(spec, cfg, cfg.width * cfg.growth, cfg.height * cfg.growth),
        other => other,
    }
}

pub fn render_to_string(spec: &ChartSpec) -> Result<String, RenderError> {
    render(spec).map(|d| d.to_svg_string())
}

fn f(v: Decimal) -> f64 {
    v.to_f64().expect("decimal fits f64")
}

/// Data extent shown on the value axis, or `None` for subtypes without one.
pub fn value_domain(subtype: ChartSubtype, table: &DataTable, extras: &ChartExtras) -> Option<(f64, f64)> {
    let all = || table.values.iter().flatten().map(|v| f(*v));
    let (lo, hi) = match subtype {
        s if s.family() == ChartFamily::Pie => return None,
        ChartSubtype::CheckBubbleScatter => return None,
        s if s.family() == ChartFamily::Box => {
            let lo = all().fold(f64::INFINITY, f64::min);
            let hi = all().fold(f64::NEG_INFINITY, f64::max);
            return Some((lo, hi));
        }
        s if s.is_stacked() => {
            let sums: Vec<f64> = (0..table.cols()).map(|j| table.column(j).iter().map(|v| f(*v)).sum()).collect();
            (sums.iter().copied().fold(0.0, f64::min), sums.iter().copied().fold(0.0, f64::max))
        }
        ChartSubtype::WaterfallBar => {
            let mut cum = 0.0;
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for v in &table.values[0] {
                cum += f(*v);
                lo = lo.min(cum);
                hi = hi.max(cum);
            }
            (lo, hi)
        }
        _ => (all().fold(0.0, f64::min), all().fold(0.0, f64::max)),
    };
    let (lo, hi) = match extras.marker_value {
        Some(m) => (lo.min(f(m)), hi.max(f(m))),
        None => (lo, hi),
    };
    Some((lo, hi))
}

/// Value-axis ticks; their labels are recorded in the chart metadata.
pub fn value_ticks(subtype: ChartSubtype, table: &DataTable, extras: &ChartExtras) -> Option<Ticks> {
    value_domain(subtype, table, extras).map(|(lo, hi)| nice_ticks(lo, hi))
}

pub(crate) struct Ctx<'a> {
    pub spec: &'a ChartSpec,
    pub cfg: &'a RenderConfig,
    pub w: f64,
    pub h: f64,
    pub doc: SvgDoc,
}

/// Plot rectangle in canvas pixels.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Frame {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

impl<'a> Ctx<'a> {
    pub fn overflow(&self, reason: impl Into<String>) -> RenderError {
        RenderError::RenderOverflow { width: self.w, height: self.h, reason: reason.into() }
    }

    pub fn dark(&self) -> bool {
        self.spec.style.background == crate::chart::Background::Dark
    }

    pub fn text_color(&self) -> &'static str {
        self.spec.style.background.text()
    }

    pub fn axis_color(&self) -> &'static str {
        self.spec.style.background.axis()
    }

    pub fn grid_color(&self) -> &'static str {
        if self.dark() { GRID_DARK } else { GRID_LIGHT }
    }

    /// Text neutral readable on top of `fill`.
    pub fn ink_on(&self, fill: &str) -> &'static str {
        let c = crate::chart::NamedColor { name: String::new(), hex: fill.to_string() };
        if c.luminance() > 0.3 { crate::chart::Background::Light.text() } else { crate::chart::Background::Dark.text() }
    }

    pub fn color(&self, series: usize) -> &str {
        &self.spec.style.palette[series].hex
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        f(self.spec.table.values[row][col])
    }

    pub fn value_label(&self, row: usize, col: usize) -> String {
        self.spec.table.values[row][col].to_string()
    }

    pub fn has_legend(&self) -> bool {
        self.spec.subtype.is_multi_series() && self.spec.subtype.family() != ChartFamily::Box
    }

    pub fn legend_width(&self) -> f64 {
        let widest = self
            .spec
            .table
            .legend_labels
            .iter()
            .map(|l| text_width(l, self.cfg.legend_size))
            .fold(0.0, f64::max);
        widest + 18.0
    }

    /// Left edge available to the plot and right edge, after reserving the
    /// legend column (right on light backgrounds, left on dark).
    pub fn horizontal_bounds(&self) -> Result<(f64, f64), RenderError> {
        let m = self.cfg.margin;
        if !self.has_legend() {
            return Ok((0.0, self.w - m * 0.5));
        }
        let lw = self.legend_width();
        if lw > self.w * 0.3 {
            return Err(self.overflow("legend too wide"));
        }
        Ok(if self.dark() { (m * 0.5 + lw + 10.0, self.w - m * 0.5) } else { (0.0, self.w - m * 0.5 - lw - 10.0) })
    }

    pub fn title(&mut self) -> Result<(), RenderError> {
        let size = self.cfg.title_size;
        if text_width(&self.spec.title, size) > self.w - 20.0 {
            return Err(self.overflow("title too wide"));
        }
        let t = svg::text(self.w / 2.0, self.cfg.margin * 0.55, &self.spec.title, size, self.text_color(), Anchor::Middle)
            .attr("class", "title")
            .attr("font-weight", "bold");
        self.doc.push(t);
        Ok(())
    }

    /// Legend entries stacked from the top of the plot area.
    pub fn legend(&mut self, frame: &Frame, swatches: &[Node]) -> Result<(), RenderError> {
        if !self.has_legend() {
            return Ok(());
        }
        let labels = &self.spec.table.legend_labels;
        let step = self.cfg.legend_size + 8.0;
        if labels.len() as f64 * step > self.h - frame.y0 - 10.0 {
            return Err(self.overflow("legend too tall"));
        }
        let x = if self.dark() { self.cfg.margin * 0.5 } else { frame.x1 + 10.0 };
        let mut g = Node::new("g").attr("class", "legend");
        for (i, label) in labels.iter().enumerate() {
            let y = frame.y0 + i as f64 * step;
            let swatch = match swatches.get(i) {
                Some(n) => n.clone(),
                None => svg::rect(x, y, 12.0, 12.0, self.color(i)),
            };
            g.push(swatch.attr("class", "legend-swatch").attr("data-series", label.clone()));
            g.push(
                svg::text(x + 18.0, y + 10.5, label, self.cfg.legend_size, self.text_color(), Anchor::Start)
                    .attr("class", "legend-label"),
            );
        }
        self.doc.push(g);
        Ok(())
    }
}

fn draw(spec: &ChartSpec, cfg: &RenderConfig, w: f64, h: f64) -> Result<SvgDoc, RenderError> {
    let mut ctx = Ctx { spec, cfg, w, h, doc: SvgDoc::new(w, h, spec.style.background.fill()) };
    ctx.title()?;
    match spec.subtype.family() {
        ChartFamily::Pie => polar::draw_pie(&mut ctx)?,
        _ if spec.subtype.is_polar() => polar::draw_polar_bar(&mut ctx)?,
        _ => cartesian::draw(&mut ctx)?,
    }
    Ok(ctx.doc)
}
