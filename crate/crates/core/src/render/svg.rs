//! Minimal SVG element tree with deterministic serialization.

use std::fmt::Write as _;

use quick_xml::escape::escape;

/// Formats a coordinate with two decimals, never as `-0.00`.
pub fn num(v: f64) -> String {
    debug_assert!(v.is_finite(), "non-finite coordinate");
    let s = format!("{v:.2}");
    if s == "-0.00" { "0.00".into() } else { s }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Element { tag: &'static str, attrs: Vec<(&'static str, String)>, children: Vec<Node> },
    Text(String),
}

impl Node {
    pub fn new(tag: &'static str) -> Self {
        Node::Element { tag, attrs: Vec::new(), children: Vec::new() }
    }

    pub fn attr(mut self, key: &'static str, value: impl Into<String>) -> Self {
        if let Node::Element { attrs, .. } = &mut self {
            attrs.push((key, value.into()));
        }
        self
    }

    pub fn num_attr(self, key: &'static str, v: f64) -> Self {
        self.attr(key, num(v))
    }

    pub fn child(mut self, c: Node) -> Self {
        self.push(c);
        self
    }

    pub fn push(&mut self, c: Node) {
        if let Node::Element { children, .. } = self {
            children.push(c);
        }
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Node>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn text_content(mut self, t: impl Into<String>) -> Self {
        self.push(Node::Text(t.into()));
        self
    }

    pub fn write(&self, out: &mut String) {
        match self {
            Node::Text(t) => out.push_str(&escape(t.as_str())),
            Node::Element { tag, attrs, children } => {
                out.push('<');
                out.push_str(tag);
                for (k, v) in attrs {
                    let _ = write!(out, " {k}=\"{}\"", escape(v.as_str()));
                }
                if children.is_empty() {
                    out.push_str("/>");
                } else {
                    out.push('>');
                    let block = children.iter().any(|c| matches!(c, Node::Element { .. }));
                    for c in children {
                        if block {
                            out.push('\n');
                        }
                        c.write(out);
                    }
                    if block {
                        out.push('\n');
                    }
                    let _ = write!(out, "</{tag}>");
                }
            }
        }
    }
}

pub fn rect(x: f64, y: f64, w: f64, h: f64, fill: &str) -> Node {
    Node::new("rect").num_attr("x", x).num_attr("y", y).num_attr("width", w).num_attr("height", h).attr("fill", fill)
}

pub fn line(x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) -> Node {
    Node::new("line")
        .num_attr("x1", x1)
        .num_attr("y1", y1)
        .num_attr("x2", x2)
        .num_attr("y2", y2)
        .attr("stroke", stroke)
}

pub fn circle(cx: f64, cy: f64, r: f64, fill: &str) -> Node {
    Node::new("circle").num_attr("cx", cx).num_attr("cy", cy).num_attr("r", r).attr("fill", fill)
}

pub fn path(d: String, fill: &str) -> Node {
    Node::new("path").attr("d", d).attr("fill", fill)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

impl Anchor {
    fn as_str(self) -> &'static str {
        match self {
            Anchor::Start => "start",
            Anchor::Middle => "middle",
            Anchor::End => "end",
        }
    }
}

pub fn text(x: f64, y: f64, content: &str, size: f64, fill: &str, anchor: Anchor) -> Node {
    Node::new("text")
        .num_attr("x", x)
        .num_attr("y", y)
        .attr("font-size", num(size))
        .attr("fill", fill)
        .attr("text-anchor", anchor.as_str())
        .text_content(content)
}

/// Layout width of a string under the fixed-advance font approximation.
pub fn text_width(s: &str, size: f64) -> f64 {
    0.6 * size * s.chars().count() as f64
}

pub const FONT_FAMILY: &str = "sans-serif";

/// A rendered chart.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgDoc {
    pub width: f64,
    pub height: f64,
    pub background: String,
    pub elements: Vec<Node>,
}

impl SvgDoc {
    pub fn new(width: f64, height: f64, background: &str) -> Self {
        SvgDoc { width, height, background: background.to_string(), elements: Vec::new() }
    }

    pub fn push(&mut self, n: Node) {
        self.elements.push(n);
    }

    /// Background rect followed by all elements, wrapped in a group.
    pub fn to_group(&self) -> Node {
        let mut g = Node::new("g").attr("font-family", FONT_FAMILY);
        g.push(rect(0.0, 0.0, self.width, self.height, &self.background).attr("class", "background"));
        g.extend(self.elements.iter().cloned());
        g
    }

    pub fn to_svg_string(&self) -> String {
        let root = Node::new("svg")
            .attr("xmlns", "http://www.w3.org/2000/svg")
            .attr("width", num(self.width))
            .attr("height", num(self.height))
            .attr("viewBox", format!("0 0 {} {}", num(self.width), num(self.height)))
            .child(self.to_group());
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        root.write(&mut out);
        out.push('\n');
        out
    }
}
