//! Canonical `.onto` text format.
//!
//! ```text
//! ONTO/1
//! C <class> [<parent>]
//! P object <name> <domain,...> <range,...>
//! P data <name> <domain,...> <datatype>
//! I <name> <class,...> <constant|default|scenario>
//! A <subject> <property> <individual | "lexical"^^datatype>
//! ```
//!
//! UTF-8, LF line endings, record kinds in the order C, P, I, A and lines
//! sorted lexicographically (bytewise) within each kind. The output is a pure
//! function of the ontology content.

use std::collections::BTreeSet;

use thiserror::Error;

use super::literal::parse_rendered;
use super::{
    Assertion, ClassDecl, Datatype, Individual, Name, Object, Ontology, OntologyError, Origin, PropertyDecl,
    PropertyRange,
};

pub const HEADER: &str = "ONTO/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(#[from] OntologyError),
}

pub fn serialize(onto: &Ontology) -> String {
    let mut classes: Vec<String> = onto
        .classes()
        .map(|c| match &c.parent {
            Some(p) => format!("C {} {}", c.name, p),
            None => format!("C {}", c.name),
        })
        .collect();
    let mut properties: Vec<String> = onto
        .properties()
        .map(|p| {
            let domain = join(&p.domain);
            match &p.range {
                PropertyRange::Classes(r) => format!("P object {} {} {}", p.name, domain, join(r)),
                PropertyRange::Datatype(dt) => format!("P data {} {} {}", p.name, domain, dt),
            }
        })
        .collect();
    let mut individuals: Vec<String> = onto
        .individuals()
        .map(|i| format!("I {} {} {}", i.name, join(&i.classes), i.origin.as_str()))
        .collect();
    let mut assertions: Vec<String> = onto.assertions().map(|a| format!("A {a}")).collect();

    let mut out = String::from(HEADER);
    out.push('\n');
    for group in [&mut classes, &mut properties, &mut individuals, &mut assertions] {
        group.sort_unstable();
        for line in group.iter() {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

pub fn serialize_bytes(onto: &Ontology) -> Vec<u8> {
    serialize(onto).into_bytes()
}

fn join(names: &BTreeSet<Name>) -> String {
    // BTreeSet order is bytewise, which is also the serialized order.
    names.iter().map(Name::as_str).collect::<Vec<_>>().join(",")
}

pub fn parse_bytes(data: &[u8]) -> Result<Ontology, ParseError> {
    let text = std::str::from_utf8(data).map_err(|e| ParseError::Syntax {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    parse(text)
}

/// Parses canonical text. Record order inside the file is not significant;
/// all invariants are re-validated.
pub fn parse(text: &str) -> Result<Ontology, ParseError> {
    if text.contains('\r') {
        return Err(syntax(0, "CR line endings are not allowed"));
    }
    let mut lines = text.split_terminator('\n').enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(syntax(1, format!("expected `{HEADER}` header"))),
    }

    let mut classes = Vec::new();
    let mut properties = Vec::new();
    let mut individuals = Vec::new();
    let mut assertions = Vec::new();

    for (line_no, line) in lines {
        let (tag, rest) = line
            .split_once(' ')
            .ok_or_else(|| syntax(line_no, "record has no fields"))?;
        match tag {
            "C" => classes.push(parse_class(line_no, rest)?),
            "P" => properties.push(parse_property(line_no, rest)?),
            "I" => individuals.push(parse_individual(line_no, rest)?),
            "A" => assertions.push(parse_assertion(line_no, rest)?),
            other => return Err(syntax(line_no, format!("unknown record kind `{other}`"))),
        }
    }

    let mut onto = Ontology::new();
    onto.declare_classes(classes)?;
    for p in properties {
        onto.declare_property(p)?;
    }
    for i in individuals {
        onto.add_individual(i)?;
    }
    for a in assertions {
        onto.assert_property(a)?;
    }
    Ok(onto)
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn name(line: usize, raw: &str) -> Result<Name, ParseError> {
    Name::new(raw).map_err(|_| syntax(line, format!("invalid name `{raw}`")))
}

fn name_list(line: usize, raw: &str) -> Result<BTreeSet<Name>, ParseError> {
    let names = raw
        .split(',')
        .map(|n| name(line, n))
        .collect::<Result<BTreeSet<_>, _>>()?;
    if names.len() != raw.split(',').count() {
        return Err(syntax(line, "repeated name in list"));
    }
    Ok(names)
}

fn fields(line: usize, rest: &str, count: usize) -> Result<Vec<&str>, ParseError> {
    let parts: Vec<&str> = rest.split(' ').collect();
    if parts.len() != count || parts.iter().any(|p| p.is_empty()) {
        return Err(syntax(
            line,
            format!("expected {count} space-separated fields, found `{rest}`"),
        ));
    }
    Ok(parts)
}

fn parse_class(line: usize, rest: &str) -> Result<ClassDecl, ParseError> {
    let parts: Vec<&str> = rest.split(' ').collect();
    match parts.as_slice() {
        [c] => Ok(ClassDecl::root(name(line, c)?)),
        [c, p] => Ok(ClassDecl::child(name(line, c)?, name(line, p)?)),
        _ => Err(syntax(line, "class record takes a name and an optional parent")),
    }
}

fn parse_property(line: usize, rest: &str) -> Result<PropertyDecl, ParseError> {
    let parts = fields(line, rest, 4)?;
    let prop_name = name(line, parts[1])?;
    let domain = name_list(line, parts[2])?;
    let range = match parts[0] {
        "object" => PropertyRange::Classes(name_list(line, parts[3])?),
        "data" => {
            let dt: Datatype = parts[3].parse().map_err(|e| syntax(line, format!("{e}")))?;
            PropertyRange::Datatype(dt)
        }
        other => return Err(syntax(line, format!("unknown property kind `{other}`"))),
    };
    Ok(PropertyDecl {
        name: prop_name,
        domain,
        range,
    })
}

fn parse_individual(line: usize, rest: &str) -> Result<Individual, ParseError> {
    let parts = fields(line, rest, 3)?;
    let origin =
        Origin::parse(parts[2]).ok_or_else(|| syntax(line, format!("unknown origin `{}`", parts[2])))?;
    Ok(Individual {
        name: name(line, parts[0])?,
        classes: name_list(line, parts[1])?,
        origin,
    })
}

fn parse_assertion(line: usize, rest: &str) -> Result<Assertion, ParseError> {
    let mut parts = rest.splitn(3, ' ');
    let subject = name(line, parts.next().unwrap_or(""))?;
    let property = name(line, parts.next().unwrap_or(""))?;
    let raw = parts
        .next()
        .ok_or_else(|| syntax(line, "assertion needs an object"))?;
    let object = if raw.starts_with('"') {
        Object::Literal(parse_rendered(raw).map_err(|m| syntax(line, m))?)
    } else {
        Object::Individual(name(line, raw)?)
    };
    Ok(Assertion {
        subject,
        property,
        object,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::Literal;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn small() -> Ontology {
        let mut o = Ontology::new();
        o.declare_classes([
            ClassDecl::root(n("Weather")),
            ClassDecl::child(n("Fog"), n("Weather")),
            ClassDecl::root(n("Scenario")),
        ])
        .unwrap();
        o.declare_property(PropertyDecl::object(
            n("has_weather"),
            [n("Scenario")],
            [n("Weather")],
        ))
        .unwrap();
        o.declare_property(PropertyDecl::data(
            n("visual_range"),
            [n("Fog")],
            Datatype::Double,
        ))
        .unwrap();
        o.declare_property(PropertyDecl::data(n("note"), [n("Scenario")], Datatype::String))
            .unwrap();
        o.add_individual(Individual::new(n("s"), n("Scenario"), Origin::Scenario))
            .unwrap();
        o.add_individual(Individual::new(n("f"), n("Fog"), Origin::Default))
            .unwrap();
        o.assert_property(Assertion::link(n("s"), n("has_weather"), n("f")))
            .unwrap();
        o.assert_property(Assertion::value(n("f"), n("visual_range"), Literal::Double(10.0)))
            .unwrap();
        o.assert_property(Assertion::value(
            n("s"),
            n("note"),
            Literal::String("dense \"fog\" ahead".into()),
        ))
        .unwrap();
        o
    }

    #[test]
    fn empty_ontology_is_header_only() {
        assert_eq!(serialize(&Ontology::new()), "ONTO/1\n");
    }

    #[test]
    fn layout_is_sorted_by_kind_then_line() {
        let text = serialize(&small());
        let expected = "ONTO/1\n\
C Fog Weather\n\
C Scenario\n\
C Weather\n\
P data note Scenario string\n\
P data visual_range Fog double\n\
P object has_weather Scenario Weather\n\
I f Fog default\n\
I s Scenario scenario\n\
A f visual_range \"10.0\"^^double\n\
A s has_weather f\n\
A s note \"dense \\\"fog\\\" ahead\"^^string\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn round_trip_is_exact() {
        let o = small();
        let text = serialize(&o);
        let back = parse(&text).unwrap();
        assert_eq!(back, o);
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn undeclared_class_is_an_invariant_violation() {
        let err = parse("ONTO/1\nI x Nope scenario\n").unwrap_err();
        assert!(matches!(
            err,
            ParseError::InvariantViolation(OntologyError::UnknownClass(_))
        ));
    }

    #[test]
    fn malformed_literal_is_a_syntax_error() {
        let text = "ONTO/1\nC Fog\nP data visual_range Fog double\nI f Fog scenario\nA f visual_range \"x\"^^double\n";
        let err = parse(text).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn cyclic_hierarchy_is_rejected() {
        let err = parse("ONTO/1\nC A B\nC B A\n").unwrap_err();
        assert!(matches!(
            err,
            ParseError::InvariantViolation(OntologyError::CycleDetected(_))
        ));
    }

    #[test]
    fn header_and_structure_errors() {
        assert!(matches!(parse(""), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse("ONTO/2\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse("ONTO/1\nX y\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse("ONTO/1\nC A B C\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse("ONTO/1\r\n"), Err(ParseError::Syntax { .. })));
    }
}
