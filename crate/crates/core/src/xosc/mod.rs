//! OpenSCENARIO 1.0 documents: element tree, lowering, XML output and
//! structural validation.

use std::fmt::Write as _;

mod lower;
mod schema;

pub use lower::{lower, LowerError, AUTHOR};
pub use schema::{validate_xosc, XoscViolation};

pub const REV_MAJOR: u16 = 1;
pub const REV_MINOR: u16 = 0;
/// Date carried by freshly lowered documents until emission stamps a real one.
pub const PLACEHOLDER_DATE: &str = "1970-01-01T00:00:00";

/// A generic XML element: name, attributes and child elements (no text).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Element>,
}

impl Element {
    pub fn new(name: impl Into<String>) -> Self {
        Element {
            name: name.into(),
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn attr(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.set_attr(key, value);
        self
    }

    pub fn set_attr(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.attrs.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.attrs.push((key, value)),
        }
    }

    pub fn child(mut self, child: Element) -> Self {
        self.children.push(child);
        self
    }

    pub fn push(&mut self, child: Element) {
        self.children.push(child);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn first(&self, name: &str) -> Option<&Element> {
        self.children.iter().find(|c| c.name == name)
    }

    pub fn first_mut(&mut self, name: &str) -> Option<&mut Element> {
        self.children.iter_mut().find(|c| c.name == name)
    }

    /// All descendants (not including self) named `name`, in document order.
    pub fn descendants<'a>(&'a self, name: &str) -> Vec<&'a Element> {
        let mut out = Vec::new();
        for c in &self.children {
            if c.name == name {
                out.push(c);
            }
            out.extend(c.descendants(name));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XoscDocument {
    pub root: Element,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum XmlParseError {
    #[error("malformed XML: {0}")]
    Malformed(String),
    #[error("unexpected text content in <{0}>")]
    UnexpectedText(String),
}

impl XoscDocument {
    pub fn file_header(&self) -> Option<&Element> {
        self.root.first("FileHeader")
    }

    pub fn count(&self, name: &str) -> usize {
        self.root.descendants(name).len() + usize::from(self.root.name == name)
    }

    /// Parses an XML document into the element tree. Comments, processing
    /// instructions and whitespace-only text are ignored.
    pub fn parse(text: &str) -> Result<Self, XmlParseError> {
        let doc = roxmltree::Document::parse(text).map_err(|e| XmlParseError::Malformed(e.to_string()))?;
        Ok(XoscDocument {
            root: convert(doc.root_element())?,
        })
    }
}

fn convert(node: roxmltree::Node) -> Result<Element, XmlParseError> {
    let mut el = Element::new(node.tag_name().name());
    for a in node.attributes() {
        el.attrs.push((a.name().to_string(), a.value().to_string()));
    }
    for c in node.children() {
        if c.is_element() {
            el.children.push(convert(c)?);
        } else if c.is_text() && !c.text().unwrap_or("").trim().is_empty() {
            return Err(XmlParseError::UnexpectedText(el.name.clone()));
        }
    }
    Ok(el)
}

/// Serializes the document: XML declaration, two-space indentation, LF line
/// endings, attributes sorted by name. The FileHeader date is `fixed_date`
/// when given, otherwise the current UTC time.
pub fn emit_xml(doc: &XoscDocument, fixed_date: Option<&str>) -> Vec<u8> {
    let date = match fixed_date {
        Some(d) => d.to_string(),
        None => chrono::Utc::now().format("%Y-%m-%dT%H:%M:%S").to_string(),
    };
    let mut root = doc.root.clone();
    if let Some(h) = root.first_mut("FileHeader") {
        h.set_attr("date", date);
    }
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    write_element(&mut out, &root, 0);
    out.into_bytes()
}

fn write_element(out: &mut String, el: &Element, depth: usize) {
    let indent = "  ".repeat(depth);
    let _ = write!(out, "{indent}<{}", el.name);
    let mut attrs: Vec<&(String, String)> = el.attrs.iter().collect();
    attrs.sort_by(|a, b| a.0.cmp(&b.0));
    for (k, v) in attrs {
        let _ = write!(out, " {k}=\"{}\"", escape_attr(v));
    }
    if el.children.is_empty() {
        out.push_str("/>\n");
    } else {
        out.push_str(">\n");
        for c in &el.children {
            write_element(out, c, depth + 1);
        }
        let _ = writeln!(out, "{indent}</{}>", el.name);
    }
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}
