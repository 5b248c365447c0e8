//! Reads marks back out of rendered SVG and compares them with the table.
//!
//! Axis scales are recovered from the tick marks and tick labels in the SVG
//! itself; nothing is taken from the renderer's internals.

use chartdoc_core::chart::{ChartFamily, ChartSpec};
use chartdoc_core::render::render;
use chartdoc_core::document::xml::{self, XmlElement};
use rust_decimal::prelude::ToPrimitive;

use super::{chart, family, inputs};

fn walk<'a>(e: &'a XmlElement, out: &mut Vec<&'a XmlElement>) {
    out.push(e);
    for c in &e.children {
        walk(c, out);
    }
}

fn has_class(e: &XmlElement, class: &str) -> bool {
    e.attr("class").is_some_and(|c| c.split_whitespace().any(|w| w == class))
}

fn f(e: &XmlElement, key: &str) -> f64 {
    e.attr(key).unwrap_or_else(|| panic!("<{}> lacks {key}", e.name)).parse().unwrap()
}

/// Least-squares line through `(value, pixel)` pairs: `pixel = a + b * value`.
fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Expected value span `[lo, hi]` of every bar, keyed by (series, entity).
fn expected_spans(spec: &ChartSpec) -> Vec<((String, String), (f64, f64))> {
    let t = &spec.table;
    let code = spec.subtype.code();
    let cumulative_rows = code.starts_with("S-") || code.starts_with("PS-");
    let mut out = Vec::new();
    if code == "Wbar" {
        let mut cum = 0.0f64;
        for (j, e) in t.entity_names.iter().enumerate() {
            let v = t.values[0][j].to_f64().unwrap();
            out.push(((t.legend_labels[0].clone(), e.clone()), (cum.min(cum + v), cum.max(cum + v))));
            cum += v;
        }
        return out;
    }
    for (j, e) in t.entity_names.iter().enumerate() {
        let mut cum = 0.0f64;
        for (r, l) in t.legend_labels.iter().enumerate() {
            let v = t.values[r][j].to_f64().unwrap();
            let base = if cumulative_rows { cum } else { 0.0 };
            out.push(((l.clone(), e.clone()), (base.min(base + v), base.max(base + v))));
            cum += v;
        }
    }
    out
}

/// Largest pixel-equivalent gap between a rendered bar and its data span,
/// over all bars of a bar-family chart.
pub fn bar_error_px(spec: &ChartSpec, svg: &str) -> f64 {
    assert_eq!(spec.subtype.family(), ChartFamily::Bar);
    let root = xml::parse(svg).unwrap();
    let mut all = Vec::new();
    walk(&root, &mut all);
    let axis = all.iter().find(|e| has_class(e, "value-axis")).expect("value axis");
    let mut axis_nodes = Vec::new();
    walk(axis, &mut axis_nodes);
    let labels: Vec<f64> = axis_nodes.iter().filter(|e| has_class(e, "tick-label")).map(|e| e.text.trim().parse().unwrap()).collect();
    let code = spec.subtype.code();
    let polar = code.starts_with("P");
    let horizontal = spec.subtype.is_horizontal();
    let bars: Vec<&&XmlElement> = all.iter().filter(|e| has_class(e, "mark") && has_class(e, "bar")).collect();
    let spans = expected_spans(spec);
    assert_eq!(bars.len(), spans.len(), "{code}: bar count");
    let mut worst: f64 = 0.0;
    if polar && !horizontal {
        let radii: Vec<f64> = axis_nodes.iter().filter(|e| e.name == "circle").map(|e| f(e, "r")).collect();
        let (a, b) = fit(&labels.iter().copied().zip(radii).collect::<Vec<_>>());
        for bar in bars {
            let key = (bar.attr("data-series").unwrap().to_string(), bar.attr("data-entity").unwrap().to_string());
            let (lo, hi) = spans.iter().find(|s| s.0 == key).unwrap().1;
            let (ri, ro) = (f(bar, "data-inner"), f(bar, "data-outer"));
            let (pi, po) = (a + b * lo, a + b * hi);
            worst = worst.max((ri.min(ro) - pi.min(po)).abs()).max((ri.max(ro) - pi.max(po)).abs());
        }
    } else if polar {
        let angles: Vec<f64> = axis_nodes.iter().filter(|e| has_class(e, "tick")).map(|e| f(e, "data-angle")).collect();
        let (a, b) = fit(&labels.iter().copied().zip(angles).collect::<Vec<_>>());
        for bar in bars {
            let key = (bar.attr("data-series").unwrap().to_string(), bar.attr("data-entity").unwrap().to_string());
            let (lo, hi) = spans.iter().find(|s| s.0 == key).unwrap().1;
            let (s, e, ro) = (f(bar, "data-start"), f(bar, "data-end"), f(bar, "data-outer"));
            let arc = |deg: f64| deg.to_radians() * ro;
            worst = worst.max(arc((s.min(e) - (a + b * lo)).abs())).max(arc((s.max(e) - (a + b * hi)).abs()));
        }
    } else {
        let ticks: Vec<f64> = axis_nodes
            .iter()
            .filter(|e| has_class(e, "tick"))
            .map(|e| if horizontal { f(e, "x1") } else { f(e, "y1") })
            .collect();
        let (a, b) = fit(&labels.iter().copied().zip(ticks).collect::<Vec<_>>());
        for bar in bars {
            let key = (bar.attr("data-series").unwrap().to_string(), bar.attr("data-entity").unwrap().to_string());
            let (lo, hi) = spans.iter().find(|s| s.0 == key).unwrap().1;
            let (p0, p1) = if horizontal {
                (f(bar, "x"), f(bar, "x") + f(bar, "width"))
            } else {
                (f(bar, "y"), f(bar, "y") + f(bar, "height"))
            };
            let (q0, q1) = (a + b * lo, a + b * hi);
            worst = worst.max((p0.min(p1) - q0.min(q1)).abs()).max((p0.max(p1) - q0.max(q1)).abs());
        }
    }
    worst
}

/// Per-ring total wedge sweep in degrees of a pie chart.
pub fn pie_sweeps(svg: &str) -> Vec<f64> {
    let root = xml::parse(svg).unwrap();
    let mut all = Vec::new();
    walk(&root, &mut all);
    let mut rings: Vec<(String, f64)> = Vec::new();
    for w in all.iter().filter(|e| has_class(e, "wedge")) {
        let ring = w.attr("data-series").unwrap().to_string();
        let sweep = f(w, "data-end") - f(w, "data-start");
        match rings.iter_mut().find(|r| r.0 == ring) {
            Some(r) => r.1 += sweep,
            None => rings.push((ring, sweep)),
        }
    }
    rings.into_iter().map(|r| r.1).collect()
}

/// Worst bar error over `n` rendered bar charts, cycling through subtypes.
pub fn worst_bar_error(n: usize) -> (usize, f64) {
    let inp = inputs();
    let bars = family(ChartFamily::Bar);
    let (mut done, mut worst, mut seed) = (0, 0.0f64, 0u64);
    while done < n {
        let st = bars[seed as usize % bars.len()];
        let fx = chart(st, 5000 + seed, &inp.hierarchy, &inp.pool);
        seed += 1;
        let Ok(doc) = render(&fx.spec) else { continue };
        worst = worst.max(bar_error_px(&fx.spec, &doc.to_svg_string()));
        done += 1;
    }
    (done, worst)
}
