//! Pies and polar-coordinate bars. Angles are in degrees, clockwise from
//! twelve o'clock.

use super::svg::{self, num, text_width, Anchor, Node};
use super::{value_ticks, AxisScale, Ctx, Frame, Orientation, RenderError};
use crate::chart::ChartSubtype;

/// Arc sweep of the angular value axis on horizontal polar bars.
pub const POLAR_SWEEP: f64 = 270.0;

fn at(cx: f64, cy: f64, r: f64, deg: f64) -> (f64, f64) {
    let a = deg.to_radians();
    (cx + r * a.sin(), cy - r * a.cos())
}

/// Annular sector (a full wedge when `r0` is zero).
pub fn sector_path(cx: f64, cy: f64, r0: f64, r1: f64, a0: f64, a1: f64) -> String {
    let large = if a1 - a0 > 180.0 { 1 } else { 0 };
    let p = |r, a| {
        let (x, y) = at(cx, cy, r, a);
        format!("{} {}", num(x), num(y))
    };
    if r0 <= 0.0 {
        format!("M{} {} L{} A{} {} 0 {large} 1 {} Z", num(cx), num(cy), p(r1, a0), num(r1), num(r1), p(r1, a1))
    } else {
        format!(
            "M{} L{} A{} {} 0 {large} 1 {} L{} A{} {} 0 {large} 0 {} Z",
            p(r0, a0),
            p(r1, a0),
            num(r1),
            num(r1),
            p(r1, a1),
            p(r0, a1),
            num(r0),
            num(r0),
            p(r0, a0)
        )
    }
}

struct Disc {
    frame: Frame,
    cx: f64,
    cy: f64,
    r: f64,
}

fn disc(ctx: &Ctx) -> Result<Disc, RenderError> {
    let m = ctx.cfg.margin;
    let (left, right) = ctx.horizontal_bounds()?;
    let frame = Frame { x0: left + m * 0.5, y0: m + 10.0, x1: right, y1: ctx.h - m * 0.5 };
    let lw = ctx
        .spec
        .table
        .entity_names
        .iter()
        .map(|e| text_width(e, ctx.cfg.label_size))
        .fold(0.0, f64::max);
    let r = (frame.width() / 2.0 - lw - 14.0).min(frame.height() / 2.0 - 20.0);
    if r < 60.0 {
        return Err(ctx.overflow("no room for the chart disc beside its labels"));
    }
    Ok(Disc { frame, cx: (frame.x0 + frame.x1) / 2.0, cy: (frame.y0 + frame.y1) / 2.0, r })
}

#[allow(clippy::too_many_arguments)]
fn sector(ctx: &Ctx, d: &Disc, r0: f64, r1: f64, a0: f64, a1: f64, color: &str, series: usize, entity: usize, class: &str) -> Node {
    svg::path(sector_path(d.cx, d.cy, r0, r1, a0, a1), color)
        .attr("class", class.to_string())
        .attr("data-series", ctx.spec.table.legend_labels[series].clone())
        .attr("data-entity", ctx.spec.table.entity_names[entity].clone())
        .attr("data-start", a0.to_string())
        .attr("data-end", a1.to_string())
        .attr("data-inner", num(r0))
        .attr("data-outer", num(r1))
}

fn radial_label(ctx: &Ctx, d: &Disc, r: f64, deg: f64, text: &str, size: f64, class: &str) -> Node {
    radial_label_in(d, r, deg, text, size, class, ctx.text_color())
}

#[allow(clippy::too_many_arguments)]
fn radial_label_in(d: &Disc, r: f64, deg: f64, text: &str, size: f64, class: &str, ink: &str) -> Node {
    let (x, y) = at(d.cx, d.cy, r, deg);
    let s = deg.to_radians().sin();
    let anchor = if s > 0.2 {
        Anchor::Start
    } else if s < -0.2 {
        Anchor::End
    } else {
        Anchor::Middle
    };
    let dy = if deg.to_radians().cos() < -0.5 { size } else { size * 0.35 };
    svg::text(x, y + dy, text, size, ink, anchor).attr("class", class.to_string())
}

pub(crate) fn draw_pie(ctx: &mut Ctx) -> Result<(), RenderError> {
    let d = disc(ctx)?;
    let spec = ctx.spec;
    let table = &spec.table;
    let rings: Vec<(usize, f64, f64)> = match spec.subtype {
        ChartSubtype::RingPie => vec![(0, 0.55 * d.r, d.r)],
        ChartSubtype::NestingPie => vec![(0, 0.0, 0.45 * d.r), (1, 0.6 * d.r, d.r)],
        _ => vec![(0, 0.0, d.r)],
    };
    let rose = spec.subtype == ChartSubtype::RosePie;
    let outer_row = rings.last().unwrap().0;
    let vmax = (0..table.cols()).map(|j| ctx.value(outer_row, j)).fold(0.0, f64::max);

    let mut marks = Vec::new();
    let mut labels = Vec::new();
    for &(row, r0, r1) in &rings {
        let total: f64 = (0..table.cols()).map(|j| ctx.value(row, j)).sum();
        let mut cum = 0.0;
        for j in 0..table.cols() {
            let v = ctx.value(row, j);
            let a0 = 360.0 * cum / total;
            cum += v;
            let a1 = 360.0 * cum / total;
            let outer = if rose { d.r * v / vmax } else { r1 };
            marks.push(sector(ctx, &d, r0, outer, a0, a1, ctx.color(j), row, j, "mark wedge"));
            let mid = (a0 + a1) / 2.0;
            let label_r = if r0 > 0.0 { (r0 + outer) / 2.0 } else { outer * 0.65 };
            let ink = ctx.ink_on(ctx.color(j));
            labels.push(radial_label_in(&d, label_r, mid, &ctx.value_label(row, j), ctx.cfg.value_size, "value-label", ink));
            if row == outer_row {
                labels.push(radial_label(ctx, &d, outer + 8.0, mid, &table.entity_names[j], ctx.cfg.label_size, "category-label"));
            }
        }
    }
    ctx.doc.elements.extend(marks);
    ctx.doc.elements.extend(labels);

    if spec.subtype == ChartSubtype::NestingPie {
        let x = if ctx.dark() { ctx.cfg.margin * 0.5 } else { d.frame.x1 + 10.0 };
        let step = ctx.cfg.legend_size + 8.0;
        let axis = ctx.axis_color();
        let swatches = vec![
            svg::circle(x + 6.0, d.frame.y0 + 6.0, 6.0, axis),
            svg::circle(x + 6.0, d.frame.y0 + step + 6.0, 5.0, "none").attr("stroke", axis).attr("stroke-width", "2"),
        ];
        ctx.legend(&d.frame, &swatches)?;
    }
    Ok(())
}

pub(crate) fn draw_polar_bar(ctx: &mut Ctx) -> Result<(), RenderError> {
    let d = disc(ctx)?;
    let spec = ctx.spec;
    let table = &spec.table;
    let ticks = value_ticks(spec.subtype, table, &spec.extras).expect("polar bars have a value axis");
    let labels = ticks.labels();
    let radial = !spec.subtype.is_horizontal();
    let stacked = spec.subtype.is_stacked();
    let n = table.cols();
    let grid = ctx.grid_color();
    let axis = ctx.axis_color();
    let size = ctx.cfg.label_size;

    ctx.legend(&d.frame, &[])?;
    let mut axis_group = Node::new("g").attr("class", "value-axis");
    let mut marks = Vec::new();
    let mut texts = Vec::new();

    if radial {
        let r0 = 0.12 * d.r;
        let scale = AxisScale::new(ticks.domain(), (r0, d.r), Orientation::Vertical);
        for (v, l) in ticks.values.iter().zip(&labels) {
            let r = scale.map(*v);
            axis_group.push(svg::circle(d.cx, d.cy, r, "none").attr("stroke", grid).attr("class", "grid"));
            axis_group.push(svg::line(d.cx - 3.0, d.cy - r, d.cx + 3.0, d.cy - r, axis).attr("class", "tick"));
            axis_group.push(svg::text(d.cx + 5.0, d.cy - r - 3.0, l, size, ctx.text_color(), Anchor::Start).attr("class", "tick-label"));
        }
        let band = 360.0 / n as f64;
        for j in 0..n {
            let (a0, a1) = (band * (j as f64 + 0.1), band * (j as f64 + 0.9));
            let mut cum = 0.0;
            for r in 0..table.rows() {
                let v = ctx.value(r, j);
                let (ri, ro) = (scale.map(cum), scale.map(cum + v));
                marks.push(sector(ctx, &d, ri, ro, a0, a1, ctx.color(r), r, j, "mark bar"));
                let (lr, ink) = if stacked { ((ri + ro) / 2.0, ctx.ink_on(ctx.color(r))) } else { (ro + 10.0, ctx.text_color()) };
                texts.push(radial_label_in(&d, lr, (a0 + a1) / 2.0, &ctx.value_label(r, j), ctx.cfg.value_size, "value-label", ink));
                cum += v;
            }
            texts.push(radial_label(ctx, &d, d.r + 8.0, band * (j as f64 + 0.5), &table.entity_names[j], size, "category-label"));
        }
    } else {
        let r0 = 0.2 * d.r;
        let scale = AxisScale::new(ticks.domain(), (0.0, POLAR_SWEEP), Orientation::Horizontal);
        for (v, l) in ticks.values.iter().zip(&labels) {
            let a = scale.map(*v);
            let (xa, ya) = at(d.cx, d.cy, r0, a);
            let (xb, yb) = at(d.cx, d.cy, d.r, a);
            axis_group.push(svg::line(xa, ya, xb, yb, grid).attr("class", "grid"));
            let (xt, yt) = at(d.cx, d.cy, d.r + 4.0, a);
            axis_group.push(svg::line(xb, yb, xt, yt, axis).attr("class", "tick").attr("data-angle", a.to_string()));
            axis_group.push(radial_label(ctx, &d, d.r + 10.0, a, l, size, "tick-label"));
        }
        let bw = (d.r - r0) / n as f64;
        for j in 0..n {
            let (ri, ro) = (r0 + bw * (j as f64 + 0.15), r0 + bw * (j as f64 + 0.85));
            let mut cum = 0.0;
            for r in 0..table.rows() {
                let v = ctx.value(r, j);
                let (a0, a1) = (scale.map(cum), scale.map(cum + v));
                marks.push(sector(ctx, &d, ri, ro, a0, a1, ctx.color(r), r, j, "mark bar"));
                let (la, ink) = if stacked { ((a0 + a1) / 2.0, ctx.ink_on(ctx.color(r))) } else { (a1 + 3.0, ctx.text_color()) };
                texts.push(radial_label_in(&d, (ri + ro) / 2.0, la, &ctx.value_label(r, j), ctx.cfg.value_size, "value-label", ink));
                cum += v;
            }
            let rm = (ri + ro) / 2.0;
            texts.push(
                svg::text(d.cx - 4.0, d.cy - rm + 4.0, &table.entity_names[j], size, ctx.text_color(), Anchor::End)
                    .attr("class", "category-label"),
            );
        }
    }
    ctx.doc.push(axis_group);
    ctx.doc.elements.extend(marks);
    ctx.doc.elements.extend(texts);
    Ok(())
}
