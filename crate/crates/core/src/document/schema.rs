//! Validator for the subset of XML Schema used by the annotation schema:
//! nested sequences of elements with occurrence bounds, required and
//! optional attributes, and simple types restricted by enumeration or
//! inclusive bounds.

use std::collections::BTreeMap;

use thiserror::Error;

use super::xml::{self, XmlElement, XmlError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error(transparent)]
    Xml(#[from] XmlError),
    #[error("unsupported schema construct `{0}`")]
    Unsupported(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Builtin {
    String,
    Integer,
    NonNegativeInteger,
    PositiveInteger,
    Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SimpleType {
    base: Builtin,
    enumeration: Vec<String>,
    min: Option<i64>,
    max: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Content {
    Simple(SimpleType),
    Complex { sequence: Vec<ElementDecl>, attributes: Vec<AttributeDecl> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ElementDecl {
    name: String,
    min: usize,
    max: Option<usize>,
    content: Content,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AttributeDecl {
    name: String,
    required: bool,
    ty: SimpleType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    root: ElementDecl,
}

fn builtin(name: &str) -> Option<Builtin> {
    Some(match name.rsplit(':').next()? {
        "string" => Builtin::String,
        "integer" | "int" | "long" => Builtin::Integer,
        "nonNegativeInteger" => Builtin::NonNegativeInteger,
        "positiveInteger" => Builtin::PositiveInteger,
        "decimal" => Builtin::Decimal,
        _ => return None,
    })
}

struct Loader {
    named: BTreeMap<String, SimpleType>,
}

impl Loader {
    fn type_ref(&self, name: &str) -> Result<SimpleType, SchemaError> {
        if let Some(t) = self.named.get(name) {
            return Ok(t.clone());
        }
        builtin(name)
            .map(|base| SimpleType { base, enumeration: Vec::new(), min: None, max: None })
            .ok_or_else(|| SchemaError::Unsupported(format!("type {name}")))
    }

    fn simple_type(&self, el: &XmlElement) -> Result<SimpleType, SchemaError> {
        let r = el
            .children
            .iter()
            .find(|c| c.local_name() == "restriction")
            .ok_or_else(|| SchemaError::Unsupported("simpleType without restriction".into()))?;
        let mut t = self.type_ref(r.attr("base").unwrap_or("xs:string"))?;
        for facet in &r.children {
            let value = facet.attr("value").unwrap_or_default();
            let bound = || value.parse::<i64>().map_err(|_| SchemaError::Unsupported(format!("bound {value}")));
            match facet.local_name() {
                "enumeration" => t.enumeration.push(value.to_string()),
                "minInclusive" => t.min = Some(bound()?),
                "maxInclusive" => t.max = Some(bound()?),
                other => return Err(SchemaError::Unsupported(other.to_string())),
            }
        }
        Ok(t)
    }

    fn element(&self, el: &XmlElement) -> Result<ElementDecl, SchemaError> {
        let name = el.attr("name").ok_or_else(|| SchemaError::Unsupported("element without name".into()))?.to_string();
        let occurs = |key: &str, default: usize| -> Result<Option<usize>, SchemaError> {
            match el.attr(key) {
                None => Ok(Some(default)),
                Some("unbounded") => Ok(None),
                Some(v) => v.parse().map(Some).map_err(|_| SchemaError::Unsupported(format!("{key}={v}"))),
            }
        };
        let min = occurs("minOccurs", 1)?.unwrap_or(0);
        let max = occurs("maxOccurs", 1)?;
        let content = if let Some(t) = el.attr("type") {
            Content::Simple(self.type_ref(t)?)
        } else if let Some(c) = el.children.iter().find(|c| c.local_name() == "complexType") {
            self.complex(c)?
        } else if let Some(s) = el.children.iter().find(|c| c.local_name() == "simpleType") {
            Content::Simple(self.simple_type(s)?)
        } else {
            Content::Simple(self.type_ref("xs:string")?)
        };
        Ok(ElementDecl { name, min, max, content })
    }

    fn complex(&self, c: &XmlElement) -> Result<Content, SchemaError> {
        let mut sequence = Vec::new();
        let mut attributes = Vec::new();
        for part in &c.children {
            match part.local_name() {
                "sequence" => {
                    for e in &part.children {
                        if e.local_name() != "element" {
                            return Err(SchemaError::Unsupported(e.name.clone()));
                        }
                        sequence.push(self.element(e)?);
                    }
                }
                "attribute" => attributes.push(AttributeDecl {
                    name: part.attr("name").unwrap_or_default().to_string(),
                    required: part.attr("use") == Some("required"),
                    ty: self.type_ref(part.attr("type").unwrap_or("xs:string"))?,
                }),
                other => return Err(SchemaError::Unsupported(other.to_string())),
            }
        }
        Ok(Content::Complex { sequence, attributes })
    }
}

impl Schema {
    pub fn parse(xsd: &str) -> Result<Schema, SchemaError> {
        let doc = xml::parse(xsd)?;
        if doc.local_name() != "schema" {
            return Err(SchemaError::Unsupported(doc.name));
        }
        let mut loader = Loader { named: BTreeMap::new() };
        for st in doc.children.iter().filter(|c| c.local_name() == "simpleType") {
            let name = st.attr("name").unwrap_or_default().to_string();
            let t = loader.simple_type(st)?;
            loader.named.insert(name, t);
        }
        let root = doc
            .children
            .iter()
            .find(|c| c.local_name() == "element")
            .ok_or_else(|| SchemaError::Unsupported("schema without a root element".into()))?;
        Ok(Schema { root: loader.element(root)? })
    }

    /// The annotation schema shipped with the crate.
    pub fn annotation() -> Schema {
        Schema::parse(crate::bundled::ANNOTATION_SCHEMA).expect("bundled schema parses")
    }

    pub fn validate_str(&self, document: &str) -> Result<(), SchemaError> {
        self.validate(&xml::parse(document)?)
    }

    pub fn validate(&self, root: &XmlElement) -> Result<(), SchemaError> {
        if root.name != self.root.name {
            return Err(invalid(&root.name, format!("expected root `{}`", self.root.name)));
        }
        check_element(&self.root, root, &format!("/{}", root.name))
    }
}

fn invalid(path: &str, message: String) -> SchemaError {
    SchemaError::Invalid { path: path.to_string(), message }
}

fn check_value(t: &SimpleType, v: &str, path: &str) -> Result<(), SchemaError> {
    let number = match t.base {
        Builtin::String => None,
        Builtin::Decimal => {
            v.trim().parse::<f64>().map_err(|_| invalid(path, format!("`{v}` is not a decimal")))?;
            None
        }
        _ => Some(v.trim().parse::<i64>().map_err(|_| invalid(path, format!("`{v}` is not an integer")))?),
    };
    if let Some(n) = number {
        let floor = match t.base {
            Builtin::NonNegativeInteger => Some(0),
            Builtin::PositiveInteger => Some(1),
            _ => None,
        };
        if floor.is_some_and(|f| n < f) || t.min.is_some_and(|m| n < m) || t.max.is_some_and(|m| n > m) {
            return Err(invalid(path, format!("{n} is out of range")));
        }
    }
    if !t.enumeration.is_empty() && !t.enumeration.iter().any(|e| e == v) {
        return Err(invalid(path, format!("`{v}` is not one of {:?}", t.enumeration)));
    }
    Ok(())
}

fn check_element(decl: &ElementDecl, el: &XmlElement, path: &str) -> Result<(), SchemaError> {
    match &decl.content {
        Content::Simple(t) => {
            if !el.children.is_empty() || !el.attrs.is_empty() {
                return Err(invalid(path, "simple element with children or attributes".into()));
            }
            check_value(t, &el.text, path)
        }
        Content::Complex { sequence, attributes } => {
            if !el.text.trim().is_empty() {
                return Err(invalid(path, "unexpected character data".into()));
            }
            for (k, v) in &el.attrs {
                let a = attributes.iter().find(|a| &a.name == k).ok_or_else(|| invalid(path, format!("unexpected attribute `{k}`")))?;
                check_value(&a.ty, v, &format!("{path}/@{k}"))?;
            }
            for a in attributes.iter().filter(|a| a.required) {
                if el.attr(&a.name).is_none() {
                    return Err(invalid(path, format!("missing attribute `{}`", a.name)));
                }
            }
            let mut i = 0;
            for d in sequence {
                let mut n = 0;
                while i < el.children.len() && el.children[i].name == d.name && d.max.is_none_or(|m| n < m) {
                    check_element(d, &el.children[i], &format!("{path}/{}[{}]", d.name, n + 1))?;
                    i += 1;
                    n += 1;
                }
                if n < d.min {
                    return Err(invalid(path, format!("expected at least {} `{}`, found {n}", d.min, d.name)));
                }
            }
            if let Some(extra) = el.children.get(i) {
                return Err(invalid(path, format!("unexpected element `{}`", extra.name)));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XSD: &str = r#"<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:simpleType name="kind"><xs:restriction base="xs:string">
    <xs:enumeration value="a"/><xs:enumeration value="b"/></xs:restriction></xs:simpleType>
  <xs:element name="root"><xs:complexType><xs:sequence>
    <xs:element name="k" type="kind"/>
    <xs:element name="n" type="xs:nonNegativeInteger" minOccurs="0" maxOccurs="unbounded"/>
  </xs:sequence><xs:attribute name="id" type="xs:string" use="required"/></xs:complexType></xs:element>
</xs:schema>"#;

    #[test]
    fn accepts_and_rejects() {
        let s = Schema::parse(XSD).unwrap();
        assert!(s.validate_str(r#"<root id="x"><k>a</k><n>1</n><n>2</n></root>"#).is_ok());
        assert!(s.validate_str(r#"<root id="x"><k>a</k></root>"#).is_ok());
        for bad in [
            r#"<root><k>a</k></root>"#,
            r#"<root id="x"><k>c</k></root>"#,
            r#"<root id="x"><k>a</k><n>-1</n></root>"#,
            r#"<root id="x"><n>1</n></root>"#,
            r#"<root id="x"><k>a</k><z/></root>"#,
            r#"<other id="x"><k>a</k></other>"#,
        ] {
            assert!(matches!(s.validate_str(bad), Err(SchemaError::Invalid { .. })), "{bad}");
        }
    }

    #[test]
    fn bundled_schema_loads() {
        let _ = Schema::annotation();
    }
}
