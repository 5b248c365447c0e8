//! Generic XML element tree, enough for annotation files and schemas.

use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed XML at byte {position}: {message}")]
pub struct XmlError {
    pub position: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct XmlElement {
    /// Qualified name as written, e.g. `xs:element`.
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<XmlElement>,
    /// Concatenated character data directly inside the element.
    pub text: String,
}

impl XmlElement {
    pub fn local_name(&self) -> &str {
        self.name.rsplit(':').next().unwrap_or(&self.name)
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn child(&self, name: &str) -> Option<&XmlElement> {
        self.children.iter().find(|c| c.name == name)
    }

    pub fn children_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a XmlElement> + 'a {
        self.children.iter().filter(move |c| c.name == name)
    }
}

/// Parses a document into its root element.
pub fn parse(text: &str) -> Result<XmlElement, XmlError> {
    let mut reader = Reader::from_str(text);
    let err = |reader: &Reader<&[u8]>, message: String| XmlError { position: reader.buffer_position(), message };
    let mut stack: Vec<XmlElement> = Vec::new();
    let mut root = None;
    loop {
        let event = reader.read_event().map_err(|e| err(&reader, e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let mut el = XmlElement { name: String::from_utf8_lossy(e.name().as_ref()).into_owned(), ..Default::default() };
                for a in e.attributes() {
                    let a = a.map_err(|x| err(&reader, x.to_string()))?;
                    let value = a.unescape_value().map_err(|x| err(&reader, x.to_string()))?.into_owned();
                    el.attrs.push((String::from_utf8_lossy(a.key.as_ref()).into_owned(), value));
                }
                if matches!(event, Event::Empty(_)) {
                    close(&mut stack, &mut root, el).map_err(|m| err(&reader, m))?;
                } else {
                    stack.push(el);
                }
            }
            Event::End(e) => {
                let el = stack.pop().ok_or_else(|| err(&reader, "unexpected closing tag".into()))?;
                if el.name.as_bytes() != e.name().as_ref() {
                    return Err(err(&reader, format!("`{}` closed by `{}`", el.name, String::from_utf8_lossy(e.name().as_ref()))));
                }
                close(&mut stack, &mut root, el).map_err(|m| err(&reader, m))?;
            }
            Event::Text(t) => {
                let s = t.unescape().map_err(|x| err(&reader, x.to_string()))?;
                match stack.last_mut() {
                    Some(top) => top.text.push_str(&s),
                    None if s.trim().is_empty() => {}
                    None => return Err(err(&reader, "text outside the root element".into())),
                }
            }
            Event::CData(c) => {
                let top = stack.last_mut().ok_or_else(|| err(&reader, "CDATA outside the root element".into()))?;
                top.text.push_str(&String::from_utf8_lossy(&c));
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(XmlError { position: reader.buffer_position(), message: format!("`{}` is never closed", stack[0].name) });
    }
    root.ok_or(XmlError { position: 0, message: "no root element".into() })
}

fn close(stack: &mut [XmlElement], root: &mut Option<XmlElement>, mut el: XmlElement) -> Result<(), String> {
    if !el.children.is_empty() && el.text.trim().is_empty() {
        el.text.clear();
    }
    match stack.last_mut() {
        Some(parent) => {
            parent.children.push(el);
            Ok(())
        }
        None if root.is_none() => {
            *root = Some(el);
            Ok(())
        }
        None => Err("more than one root element".into()),
    }
}
