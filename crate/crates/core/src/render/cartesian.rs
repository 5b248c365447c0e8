//! Bar, line, scatter, box and combination charts on a rectangular grid.

use super::svg::{self, num, text_width, Anchor, Node};
use super::{value_ticks, AxisScale, Ctx, Frame, RenderError};
use crate::chart::{ChartFamily, ChartSubtype};

use ChartSubtype::*;

struct Grid {
    frame: Frame,
    horizontal: bool,
    n: usize,
    scale: Option<AxisScale>,
}

impl Grid {
    fn band(&self) -> f64 {
        let len = if self.horizontal { self.frame.height() } else { self.frame.width() };
        len / self.n as f64
    }

    /// Position along the category axis of fraction `t` through band `i`.
    fn cat(&self, i: usize, t: f64) -> f64 {
        let start = if self.horizontal { self.frame.y0 } else { self.frame.x0 };
        start + (i as f64 + t) * self.band()
    }

    fn val(&self, v: f64) -> f64 {
        self.scale.as_ref().expect("value axis").map(v)
    }

    /// Canvas point for category position `c` and value pixel `p`.
    fn point(&self, c: f64, p: f64) -> (f64, f64) {
        if self.horizontal { (p, c) } else { (c, p) }
    }
}

fn widest(labels: &[String], size: f64) -> f64 {
    labels.iter().map(|l| text_width(l, size)).fold(0.0, f64::max)
}

pub(crate) fn draw(ctx: &mut Ctx) -> Result<(), RenderError> {
    let spec = ctx.spec;
    let cfg = ctx.cfg;
    let st = spec.subtype;
    let table = &spec.table;
    let horizontal = st.is_horizontal();
    let ticks = value_ticks(st, table, &spec.extras);
    let tick_labels = ticks.as_ref().map(|t| t.labels()).unwrap_or_default();
    let n = table.cols();
    let m = cfg.margin;

    let (left_base, right) = ctx.horizontal_bounds()?;
    let left_labels: &[String] = match st {
        CheckBubbleScatter => &table.legend_labels,
        _ if horizontal => &table.entity_names,
        _ => &tick_labels,
    };
    let x0 = left_base + m.max(30.0 + widest(left_labels, cfg.label_size) + 10.0);
    let x1 = right;
    if x1 - x0 < 0.35 * ctx.w {
        return Err(ctx.overflow("plot area too narrow for axis labels"));
    }
    let cat_w = widest(&table.entity_names, cfg.label_size);
    let rotate = !horizontal && cat_w > (x1 - x0) / n as f64 - 4.0;
    let bottom_extent = if rotate { cat_w * std::f64::consts::FRAC_1_SQRT_2 + 14.0 } else { 14.0 };
    let y0 = m + 10.0;
    let y1 = ctx.h - m.max(30.0 + bottom_extent + 8.0);
    if y1 - y0 < 0.35 * ctx.h {
        return Err(ctx.overflow("plot area too short for category labels"));
    }
    let frame = Frame { x0, y0, x1, y1 };
    let scale = ticks.as_ref().map(|t| {
        if horizontal {
            AxisScale::horizontal(t.domain(), x0, x1)
        } else {
            AxisScale::vertical(t.domain(), y1, y0)
        }
    });
    let grid = Grid { frame, horizontal, n, scale };
    if grid.band() < 6.0 {
        return Err(ctx.overflow("too many categories for the plot width"));
    }

    ctx.legend(&frame, &legend_swatches(ctx, &frame))?;
    axis_titles(ctx, &frame, left_base);
    if let Some(t) = &ticks {
        value_axis(ctx, &grid, &t.values, &tick_labels);
    }
    category_axis(ctx, &grid, rotate);
    axis_lines(ctx, &frame);

    match st {
        VerticalBar | HorizontalBar => simple_bars(ctx, &grid, 0, LabelAt::Beyond),
        GroupVerticalBar | GroupHorizontalBar => grouped_bars(ctx, &grid),
        StackVerticalBar | StackHorizontalBar => stacked_bars(ctx, &grid),
        WaterfallBar => waterfall(ctx, &grid),
        SingleLine | SmoothSingleLine | MultiLine | MarkerSingleLine | BestValueSingleLine | BestValueMultiLine
        | IntervalHighlightSingleLine => lines(ctx, &grid),
        SimpleScatter | MultiScatter | BubbleScatter => scatter(ctx, &grid),
        CheckBubbleScatter => check_bubbles(ctx, &grid),
        VerticalBoxplot | HorizontalBoxplot | MultiBoxplot => boxes(ctx, &grid),
        LineBar => {
            simple_bars(ctx, &grid, 0, LabelAt::InsideEnd);
            line_series(ctx, &grid, 1, false);
        }
        _ => unreachable!("polar and pie subtypes are drawn elsewhere"),
    }
    Ok(())
}

/// LineBar shows a line sample for its line series; everything else uses
/// the default square swatch.
fn legend_swatches(ctx: &Ctx, frame: &Frame) -> Vec<Node> {
    if ctx.spec.subtype != LineBar {
        return Vec::new();
    }
    let x = if ctx.dark() { ctx.cfg.margin * 0.5 } else { frame.x1 + 10.0 };
    let y = frame.y0 + ctx.cfg.legend_size + 8.0;
    vec![
        svg::rect(x, frame.y0, 12.0, 12.0, ctx.color(0)),
        svg::line(x, y + 6.0, x + 12.0, y + 6.0, ctx.color(1)).attr("stroke-width", "3"),
    ]
}

fn axis_titles(ctx: &mut Ctx, frame: &Frame, left_base: f64) {
    let size = ctx.cfg.axis_title_size;
    let color = ctx.text_color();
    let cx = (frame.x0 + frame.x1) / 2.0;
    ctx.doc.push(svg::text(cx, ctx.h - 14.0, &ctx.spec.x_title, size, color, Anchor::Middle).attr("class", "axis-title x"));
    let (x, y) = (left_base + 18.0, (frame.y0 + frame.y1) / 2.0);
    ctx.doc.push(
        svg::text(x, y, &ctx.spec.y_title, size, color, Anchor::Middle)
            .attr("class", "axis-title y")
            .attr("transform", format!("rotate(-90 {} {})", num(x), num(y))),
    );
}

fn value_axis(ctx: &mut Ctx, g: &Grid, values: &[f64], labels: &[String]) {
    let f = g.frame;
    let size = ctx.cfg.label_size;
    let mut group = Node::new("g").attr("class", "value-axis");
    for (v, label) in values.iter().zip(labels) {
        let p = g.val(*v);
        if g.horizontal {
            group.push(svg::line(p, f.y0, p, f.y1, ctx.grid_color()).attr("class", "grid"));
            group.push(svg::line(p, f.y1, p, f.y1 + 5.0, ctx.axis_color()).attr("class", "tick"));
            group.push(svg::text(p, f.y1 + 17.0, label, size, ctx.text_color(), Anchor::Middle).attr("class", "tick-label"));
        } else {
            group.push(svg::line(f.x0, p, f.x1, p, ctx.grid_color()).attr("class", "grid"));
            group.push(svg::line(f.x0 - 5.0, p, f.x0, p, ctx.axis_color()).attr("class", "tick"));
            group.push(svg::text(f.x0 - 8.0, p + 4.0, label, size, ctx.text_color(), Anchor::End).attr("class", "tick-label"));
        }
    }
    ctx.doc.push(group);
}

fn category_axis(ctx: &mut Ctx, g: &Grid, rotate: bool) {
    let f = g.frame;
    let size = ctx.cfg.label_size;
    let mut group = Node::new("g").attr("class", "category-axis");
    let entities = &ctx.spec.table.entity_names;
    let along_y = g.horizontal;
    for (i, e) in entities.iter().enumerate() {
        let c = g.cat(i, 0.5);
        if along_y {
            group.push(svg::text(f.x0 - 8.0, c + 4.0, e, size, ctx.text_color(), Anchor::End).attr("class", "category-label"));
        } else if rotate {
            let (x, y) = (c, f.y1 + 12.0);
            group.push(
                svg::text(x, y, e, size, ctx.text_color(), Anchor::End)
                    .attr("class", "category-label")
                    .attr("transform", format!("rotate(-45 {} {})", num(x), num(y))),
            );
        } else {
            group.push(svg::text(c, f.y1 + 17.0, e, size, ctx.text_color(), Anchor::Middle).attr("class", "category-label"));
        }
    }
    if ctx.spec.subtype == CheckBubbleScatter {
        let legends = &ctx.spec.table.legend_labels;
        let bh = f.height() / legends.len() as f64;
        for (r, l) in legends.iter().enumerate() {
            let y = f.y0 + (r as f64 + 0.5) * bh;
            group.push(svg::line(f.x0, y, f.x1, y, ctx.grid_color()).attr("class", "grid"));
            group.push(svg::text(f.x0 - 8.0, y + 4.0, l, size, ctx.text_color(), Anchor::End).attr("class", "category-label"));
        }
    }
    ctx.doc.push(group);
}

fn axis_lines(ctx: &mut Ctx, f: &Frame) {
    let c = ctx.axis_color();
    ctx.doc.push(svg::line(f.x0, f.y1, f.x1, f.y1, c).attr("class", "axis x"));
    ctx.doc.push(svg::line(f.x0, f.y0, f.x0, f.y1, c).attr("class", "axis y"));
}

/// Rect spanning fractions `[a, b]` of band `i` and values `[from, to]`.
fn bar(ctx: &Ctx, g: &Grid, i: usize, a: f64, b: f64, from: f64, to: f64, series: usize) -> Node {
    let (p_lo, p_hi) = (g.val(from.min(to)), g.val(from.max(to)));
    let (c0, c1) = (g.cat(i, a), g.cat(i, b));
    let node = if g.horizontal {
        svg::rect(p_lo, c0, p_hi - p_lo, c1 - c0, ctx.color(series))
    } else {
        svg::rect(c0, p_hi, c1 - c0, p_lo - p_hi, ctx.color(series))
    };
    let table = &ctx.spec.table;
    node.attr("class", "mark bar")
        .attr("data-series", table.legend_labels[series].clone())
        .attr("data-entity", table.entity_names[i].clone())
}

#[derive(Clone, Copy, PartialEq)]
enum LabelAt {
    /// Just beyond the far end of the bar.
    Beyond,
    /// Beyond the far end, rotated to run along a narrow vertical bar.
    BeyondRotated,
    /// Centered inside the bar.
    Center,
    /// Inside the bar, near its far end.
    InsideEnd,
}

fn bar_label(ctx: &Ctx, g: &Grid, i: usize, t: f64, from: f64, to: f64, at: LabelAt, series: usize, text: String) -> Node {
    let c = g.cat(i, t);
    let size = ctx.cfg.value_size;
    let far = g.val(from.max(to));
    let inside = ctx.ink_on(ctx.color(series));
    let node = match at {
        LabelAt::Center => {
            let (x, y) = g.point(c, (g.val(from) + g.val(to)) / 2.0);
            svg::text(x, y + 3.5, &text, size, inside, Anchor::Middle)
        }
        LabelAt::InsideEnd if g.horizontal => svg::text(far - 4.0, c + 3.5, &text, size, inside, Anchor::End),
        LabelAt::InsideEnd => svg::text(c, far + size + 2.0, &text, size, inside, Anchor::Middle),
        _ if g.horizontal => svg::text(far + 4.0, c + 3.5, &text, size, ctx.text_color(), Anchor::Start),
        LabelAt::BeyondRotated => {
            let (x, y) = (c + 3.5, far - 4.0);
            svg::text(x, y, &text, size, ctx.text_color(), Anchor::Start)
                .attr("transform", format!("rotate(-90 {} {})", num(x), num(y)))
        }
        LabelAt::Beyond => svg::text(c, far - 4.0, &text, size, ctx.text_color(), Anchor::Middle),
    };
    node.attr("class", "value-label")
}

fn simple_bars(ctx: &mut Ctx, g: &Grid, row: usize, at: LabelAt) {
    for i in 0..g.n {
        let v = ctx.value(row, i);
        let node = bar(ctx, g, i, 0.2, 0.8, 0.0, v, row);
        let label = bar_label(ctx, g, i, 0.5, 0.0, v, at, row, ctx.value_label(row, i));
        ctx.doc.push(node);
        ctx.doc.push(label);
    }
}

fn grouped_bars(ctx: &mut Ctx, g: &Grid) {
    let k = ctx.spec.table.rows() as f64;
    let slot = g.band() * 0.8 / k;
    let widest = ctx.spec.table.values.iter().flatten().map(|v| text_width(&v.to_string(), ctx.cfg.value_size)).fold(0.0, f64::max);
    let at = if !g.horizontal && widest > slot { LabelAt::BeyondRotated } else { LabelAt::Beyond };
    for r in 0..ctx.spec.table.rows() {
        let (a, b) = (0.1 + 0.8 * r as f64 / k, 0.1 + 0.8 * (r + 1) as f64 / k);
        for i in 0..g.n {
            let v = ctx.value(r, i);
            let node = bar(ctx, g, i, a, b, 0.0, v, r);
            let label = bar_label(ctx, g, i, (a + b) / 2.0, 0.0, v, at, r, ctx.value_label(r, i));
            ctx.doc.push(node);
            ctx.doc.push(label);
        }
    }
}

fn stacked_bars(ctx: &mut Ctx, g: &Grid) {
    for i in 0..g.n {
        let mut cum = 0.0;
        for r in 0..ctx.spec.table.rows() {
            let v = ctx.value(r, i);
            let node = bar(ctx, g, i, 0.2, 0.8, cum, cum + v, r);
            let label = bar_label(ctx, g, i, 0.5, cum, cum + v, LabelAt::Center, r, ctx.value_label(r, i));
            ctx.doc.push(node);
            ctx.doc.push(label);
            cum += v;
        }
    }
}

fn waterfall(ctx: &mut Ctx, g: &Grid) {
    let mut cum = 0.0;
    for i in 0..g.n {
        let v = ctx.value(0, i);
        let node = bar(ctx, g, i, 0.2, 0.8, cum, cum + v, 0);
        let label = bar_label(ctx, g, i, 0.5, cum, cum + v, LabelAt::Beyond, 0, ctx.value_label(0, i));
        ctx.doc.push(node);
        ctx.doc.push(label);
        if i + 1 < g.n {
            let y = g.val(cum + v);
            let (xa, ya) = g.point(g.cat(i, 0.8), y);
            let (xb, yb) = g.point(g.cat(i + 1, 0.2), y);
            ctx.doc.push(svg::line(xa, ya, xb, yb, ctx.axis_color()).attr("class", "connector").attr("stroke-dasharray", "3 2"));
        }
        cum += v;
    }
}

fn polyline(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (k, (x, y)) in points.iter().enumerate() {
        d.push_str(if k == 0 { "M" } else { " L" });
        d.push_str(&format!("{} {}", num(*x), num(*y)));
    }
    d
}

/// Catmull-Rom spline through `points`, as cubic Bezier segments.
fn smooth(points: &[(f64, f64)]) -> String {
    let mut d = format!("M{} {}", num(points[0].0), num(points[0].1));
    let p = |i: isize| points[i.clamp(0, points.len() as isize - 1) as usize];
    for i in 0..points.len() as isize - 1 {
        let (p0, p1, p2, p3) = (p(i - 1), p(i), p(i + 1), p(i + 2));
        let c1 = (p1.0 + (p2.0 - p0.0) / 6.0, p1.1 + (p2.1 - p0.1) / 6.0);
        let c2 = (p2.0 - (p3.0 - p1.0) / 6.0, p2.1 - (p3.1 - p1.1) / 6.0);
        d.push_str(&format!(
            " C{} {} {} {} {} {}",
            num(c1.0),
            num(c1.1),
            num(c2.0),
            num(c2.1),
            num(p2.0),
            num(p2.1)
        ));
    }
    d
}

fn line_series(ctx: &mut Ctx, g: &Grid, row: usize, smoothed: bool) {
    let points: Vec<(f64, f64)> = (0..g.n).map(|i| g.point(g.cat(i, 0.5), g.val(ctx.value(row, i)))).collect();
    let d = if smoothed { smooth(&points) } else { polyline(&points) };
    ctx.doc.push(
        svg::path(d, "none")
            .attr("stroke", ctx.color(row).to_string())
            .attr("stroke-width", "2")
            .attr("class", "mark line")
            .attr("data-series", ctx.spec.table.legend_labels[row].clone()),
    );
    for (i, (x, y)) in points.iter().enumerate() {
        ctx.doc.push(svg::circle(*x, *y, 2.5, ctx.color(row)).attr("class", "vertex"));
        ctx.doc.push(
            svg::text(*x, y - 8.0, &ctx.value_label(row, i), ctx.cfg.value_size, ctx.text_color(), Anchor::Middle)
                .attr("class", "value-label"),
        );
    }
}

fn lines(ctx: &mut Ctx, g: &Grid) {
    let spec = ctx.spec;
    let f = g.frame;
    for iv in &spec.extras.highlight_intervals {
        let (Some(a), Some(b)) = (spec.table.entity_names.iter().position(|e| *e == iv.start), spec.table.entity_names.iter().position(|e| *e == iv.end))
        else {
            continue;
        };
        let (xa, xb) = (g.cat(a.min(b), 0.0), g.cat(a.max(b), 1.0));
        ctx.doc.push(
            svg::rect(xa, f.y0, xb - xa, f.height(), ctx.color(0))
                .attr("fill-opacity", "0.15")
                .attr("class", "highlight-band")
                .attr("data-start", iv.start.clone())
                .attr("data-end", iv.end.clone()),
        );
    }
    for r in 0..spec.table.rows() {
        line_series(ctx, g, r, spec.subtype == SmoothSingleLine);
    }
    if let Some(mv) = spec.extras.marker_value {
        let y = g.val(super::f(mv));
        ctx.doc.push(
            svg::line(f.x0, y, f.x1, y, ctx.axis_color())
                .attr("stroke-dasharray", "6 4")
                .attr("class", "marker-line"),
        );
        ctx.doc.push(
            svg::text(f.x1 - 2.0, y - 4.0, &mv.to_string(), ctx.cfg.value_size, ctx.text_color(), Anchor::End)
                .attr("class", "marker-label"),
        );
    }
    for bv in &spec.extras.best_values {
        let Some(r) = spec.table.legend_labels.iter().position(|l| *l == bv.series) else { continue };
        for (entity, kind) in [(&bv.max_entity, "max"), (&bv.min_entity, "min")] {
            let Some(i) = spec.table.entity_names.iter().position(|e| e == entity) else { continue };
            let (x, y) = g.point(g.cat(i, 0.5), g.val(ctx.value(r, i)));
            ctx.doc.push(
                svg::circle(x, y, 7.0, "none")
                    .attr("stroke", ctx.color(r).to_string())
                    .attr("stroke-width", "2")
                    .attr("class", format!("best-value {kind}")),
            );
        }
    }
}

fn scatter(ctx: &mut Ctx, g: &Grid) {
    let rows = ctx.spec.table.rows();
    let vmax = ctx.spec.table.values.iter().flatten().map(|v| super::f(*v)).fold(0.0, f64::max);
    let spread = (g.band() * 0.6 / rows as f64).min(8.0);
    for r in 0..rows {
        for i in 0..g.n {
            let v = ctx.value(r, i);
            let offset = (r as f64 - (rows as f64 - 1.0) / 2.0) * spread;
            let (x, y) = g.point(g.cat(i, 0.5) + offset, g.val(v));
            let radius = if ctx.spec.subtype == BubbleScatter && vmax > 0.0 {
                4.0 + 16.0 * (v.max(0.0) / vmax).sqrt()
            } else {
                5.0
            };
            let mut node = svg::circle(x, y, radius, ctx.color(r))
                .attr("class", "mark point")
                .attr("data-series", ctx.spec.table.legend_labels[r].clone())
                .attr("data-entity", ctx.spec.table.entity_names[i].clone());
            if ctx.spec.subtype == BubbleScatter {
                node = node.attr("fill-opacity", "0.7");
            }
            ctx.doc.push(node);
        }
    }
}

fn check_bubbles(ctx: &mut Ctx, g: &Grid) {
    let f = g.frame;
    let rows = ctx.spec.table.rows();
    let bh = f.height() / rows as f64;
    let vmax = ctx.spec.table.values.iter().flatten().map(|v| super::f(*v)).fold(0.0, f64::max);
    let rmax = 0.45 * g.band().min(bh);
    for r in 0..rows {
        let y = f.y0 + (r as f64 + 0.5) * bh;
        for i in 0..g.n {
            let v = ctx.value(r, i);
            let radius = if vmax > 0.0 { (rmax * (v.max(0.0) / vmax).sqrt()).max(1.5) } else { 1.5 };
            ctx.doc.push(
                svg::circle(g.cat(i, 0.5), y, radius, ctx.color(r))
                    .attr("class", "mark point")
                    .attr("data-series", ctx.spec.table.legend_labels[r].clone())
                    .attr("data-entity", ctx.spec.table.entity_names[i].clone()),
            );
        }
    }
}

fn boxes(ctx: &mut Ctx, g: &Grid) {
    let spec = ctx.spec;
    for (i, stats) in spec.extras.box_stats.iter().enumerate() {
        let color = if spec.subtype.colors_by_entity() { ctx.color(i) } else { ctx.color(0) }.to_string();
        let [lo, q1, med, q3, hi] = stats.as_array().map(|v| g.val(super::f(v)));
        let (c0, c, c1) = (g.cat(i, 0.25), g.cat(i, 0.5), g.cat(i, 0.75));
        let (cap0, cap1) = (g.cat(i, 0.375), g.cat(i, 0.625));
        let seg = |a: (f64, f64), b: (f64, f64), class: &str| {
            svg::line(a.0, a.1, b.0, b.1, &color).attr("stroke-width", "1.5").attr("class", class.to_string())
        };
        let body = if g.horizontal {
            svg::rect(q1.min(q3), c0, (q3 - q1).abs(), c1 - c0, &color)
        } else {
            svg::rect(c0, q1.min(q3), c1 - c0, (q3 - q1).abs(), &color)
        };
        let mut group = Node::new("g").attr("class", "mark box").attr("data-entity", stats.entity.clone());
        group.push(seg(g.point(c, lo), g.point(c, q1), "whisker"));
        group.push(seg(g.point(c, q3), g.point(c, hi), "whisker"));
        group.push(seg(g.point(cap0, lo), g.point(cap1, lo), "cap"));
        group.push(seg(g.point(cap0, hi), g.point(cap1, hi), "cap"));
        group.push(body.attr("fill-opacity", "0.6").attr("stroke", color.clone()).attr("class", "iqr"));
        group.push(
            svg::line(g.point(c0, med).0, g.point(c0, med).1, g.point(c1, med).0, g.point(c1, med).1, ctx.text_color())
                .attr("stroke-width", "2")
                .attr("class", "median"),
        );
        ctx.doc.push(group);
    }
    debug_assert_eq!(spec.subtype.family(), ChartFamily::Box);
}
