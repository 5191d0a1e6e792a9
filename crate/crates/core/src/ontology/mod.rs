//! In-memory ontology store.
//!
//! An [`Ontology`] holds a class hierarchy, object and data properties,
//! individuals and property assertions. Every mutating operation validates
//! referential integrity up front, so a value of this type never contains a
//! dangling name. The canonical text form lives in [`canonical`].

pub mod canonical;
mod literal;
mod name;
mod stats;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use literal::{is_token, Datatype, Literal, LiteralError};
pub use name::{is_valid_name, Name};
pub use stats::OntologyStats;

/// Which namespace a name lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKind {
    Class,
    Property,
    Individual,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Class => "class",
            NameKind::Property => "property",
            NameKind::Individual => "individual",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("{kind} `{name}` is already declared")]
    DuplicateName { kind: NameKind, name: Name },
    #[error("class `{class}` names undeclared parent `{parent}`")]
    UnknownParent { class: Name, parent: Name },
    #[error("class hierarchy cycle through `{0}`")]
    CycleDetected(Name),
    #[error("unknown class `{0}`")]
    UnknownClass(Name),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: NameKind, name: Name },
    #[error("property `{property}` is {expected:?}-valued but was given {given}")]
    KindMismatch {
        property: Name,
        expected: PropertyKind,
        given: String,
    },
    #[error("`{subject}` is not in the domain of `{property}`")]
    DomainViolation { subject: Name, property: Name },
    #[error("`{object}` is not in the range of `{property}`")]
    RangeViolation { property: Name, object: String },
    #[error("duplicate assertion `{0}`")]
    DuplicateAssertion(Assertion),
    #[error("individual `{0}` must belong to at least one class")]
    NoClasses(Name),
    #[error("property `{0}` needs a non-empty domain and range")]
    EmptySignature(Name),
    #[error("individual `{0}` is still referenced by assertions")]
    StillReferenced(Name),
    #[error("assertion `{0}` not present")]
    MissingAssertion(Assertion),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassDecl {
    pub name: Name,
    pub parent: Option<Name>,
}

impl ClassDecl {
    pub fn root(name: Name) -> Self {
        ClassDecl { name, parent: None }
    }

    pub fn child(name: Name, parent: Name) -> Self {
        ClassDecl {
            name,
            parent: Some(parent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyKind {
    Object,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PropertyRange {
    Classes(BTreeSet<Name>),
    Datatype(Datatype),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PropertyDecl {
    pub name: Name,
    pub domain: BTreeSet<Name>,
    pub range: PropertyRange,
}

impl PropertyDecl {
    pub fn object(
        name: Name,
        domain: impl IntoIterator<Item = Name>,
        range: impl IntoIterator<Item = Name>,
    ) -> Self {
        PropertyDecl {
            name,
            domain: domain.into_iter().collect(),
            range: PropertyRange::Classes(range.into_iter().collect()),
        }
    }

    pub fn data(name: Name, domain: impl IntoIterator<Item = Name>, datatype: Datatype) -> Self {
        PropertyDecl {
            name,
            domain: domain.into_iter().collect(),
            range: PropertyRange::Datatype(datatype),
        }
    }

    pub fn kind(&self) -> PropertyKind {
        match self.range {
            PropertyRange::Classes(_) => PropertyKind::Object,
            PropertyRange::Datatype(_) => PropertyKind::Data,
        }
    }
}

/// Where an individual came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// OpenSCENARIO enumeration tokens and simulator assets of the master ontology.
    Constant,
    /// Ready-made individuals of the master ontology (default ego, weather, ...).
    Default,
    /// Created while authoring a concrete scenario.
    Scenario,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Constant => "constant",
            Origin::Default => "default",
            Origin::Scenario => "scenario",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "constant" => Some(Origin::Constant),
            "default" => Some(Origin::Default),
            "scenario" => Some(Origin::Scenario),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Individual {
    pub name: Name,
    pub classes: BTreeSet<Name>,
    pub origin: Origin,
}

impl Individual {
    pub fn new(name: Name, class: Name, origin: Origin) -> Self {
        Individual {
            name,
            classes: BTreeSet::from([class]),
            origin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Object {
    Individual(Name),
    Literal(Literal),
}

impl Object {
    pub fn as_individual(&self) -> Option<&Name> {
        match self {
            Object::Individual(n) => Some(n),
            Object::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Object::Literal(l) => Some(l),
            Object::Individual(_) => None,
        }
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Individual(n) => write!(f, "{n}"),
            Object::Literal(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assertion {
    pub subject: Name,
    pub property: Name,
    pub object: Object,
}

impl Assertion {
    pub fn link(subject: Name, property: Name, object: Name) -> Self {
        Assertion {
            subject,
            property,
            object: Object::Individual(object),
        }
    }

    pub fn value(subject: Name, property: Name, value: Literal) -> Self {
        Assertion {
            subject,
            property,
            object: Object::Literal(value),
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.property, self.object)
    }
}

/// Schema plus instance data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    classes: BTreeMap<Name, ClassDecl>,
    properties: BTreeMap<Name, PropertyDecl>,
    individuals: BTreeMap<Name, Individual>,
    assertions: BTreeSet<Assertion>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    // ---- schema -------------------------------------------------------

    pub fn declare_class(&mut self, decl: ClassDecl) -> Result<(), OntologyError> {
        if self.classes.contains_key(&decl.name) {
            return Err(OntologyError::DuplicateName {
                kind: NameKind::Class,
                name: decl.name,
            });
        }
        if let Some(parent) = &decl.parent {
            if !self.classes.contains_key(parent) {
                return Err(OntologyError::UnknownParent {
                    class: decl.name.clone(),
                    parent: parent.clone(),
                });
            }
            // A fresh class has no children, but a self-parent is still a cycle.
            if *parent == decl.name {
                return Err(OntologyError::CycleDetected(decl.name));
            }
        }
        self.classes.insert(decl.name.clone(), decl);
        Ok(())
    }

    /// Declares a batch of classes whose parents may reference each other in
    /// any order. Nothing is inserted unless the whole batch is consistent.
    pub fn declare_classes(
        &mut self,
        decls: impl IntoIterator<Item = ClassDecl>,
    ) -> Result<(), OntologyError> {
        let mut pending: BTreeMap<Name, ClassDecl> = BTreeMap::new();
        for decl in decls {
            if self.classes.contains_key(&decl.name) || pending.contains_key(&decl.name) {
                return Err(OntologyError::DuplicateName {
                    kind: NameKind::Class,
                    name: decl.name,
                });
            }
            pending.insert(decl.name.clone(), decl);
        }
        for decl in pending.values() {
            if let Some(parent) = &decl.parent {
                if !self.classes.contains_key(parent) && !pending.contains_key(parent) {
                    return Err(OntologyError::UnknownParent {
                        class: decl.name.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        // Walk each pending chain; revisiting a name on the same walk is a cycle.
        for start in pending.keys() {
            let mut seen = BTreeSet::new();
            let mut cursor = Some(start);
            while let Some(name) = cursor {
                if !seen.insert(name) {
                    return Err(OntologyError::CycleDetected(start.clone()));
                }
                cursor = pending.get(name).and_then(|d| d.parent.as_ref());
            }
        }
        self.classes.extend(pending);
        Ok(())
    }

    pub fn declare_property(&mut self, decl: PropertyDecl) -> Result<(), OntologyError> {
        if self.properties.contains_key(&decl.name) {
            return Err(OntologyError::DuplicateName {
                kind: NameKind::Property,
                name: decl.name,
            });
        }
        if decl.domain.is_empty() {
            return Err(OntologyError::EmptySignature(decl.name));
        }
        let range_classes = match &decl.range {
            PropertyRange::Classes(c) if c.is_empty() => {
                return Err(OntologyError::EmptySignature(decl.name))
            }
            PropertyRange::Classes(c) => c.iter().collect::<Vec<_>>(),
            PropertyRange::Datatype(_) => Vec::new(),
        };
        for class in decl.domain.iter().chain(range_classes) {
            if !self.classes.contains_key(class) {
                return Err(OntologyError::UnknownClass(class.clone()));
            }
        }
        self.properties.insert(decl.name.clone(), decl);
        Ok(())
    }

    // ---- instance data ------------------------------------------------

    pub fn add_individual(&mut self, ind: Individual) -> Result<(), OntologyError> {
        if self.individuals.contains_key(&ind.name) {
            return Err(OntologyError::DuplicateName {
                kind: NameKind::Individual,
                name: ind.name,
            });
        }
        if ind.classes.is_empty() {
            return Err(OntologyError::NoClasses(ind.name));
        }
        if let Some(c) = ind.classes.iter().find(|c| !self.classes.contains_key(*c)) {
            return Err(OntologyError::UnknownClass(c.clone()));
        }
        self.individuals.insert(ind.name.clone(), ind);
        Ok(())
    }

    pub fn assert_property(&mut self, a: Assertion) -> Result<(), OntologyError> {
        let subject = self.individual_or_err(&a.subject)?;
        let property = self
            .properties
            .get(&a.property)
            .ok_or_else(|| OntologyError::UnknownName {
                kind: NameKind::Property,
                name: a.property.clone(),
            })?;

        match (&property.range, &a.object) {
            (PropertyRange::Classes(range), Object::Individual(obj)) => {
                let obj = self.individual_or_err(obj)?;
                if !self.member_of_any(obj, range) {
                    return Err(OntologyError::RangeViolation {
                        property: a.property.clone(),
                        object: obj.name.to_string(),
                    });
                }
            }
            (PropertyRange::Datatype(dt), Object::Literal(lit)) => {
                if lit.datatype() != *dt {
                    return Err(OntologyError::RangeViolation {
                        property: a.property.clone(),
                        object: lit.to_string(),
                    });
                }
            }
            (_, object) => {
                return Err(OntologyError::KindMismatch {
                    property: a.property.clone(),
                    expected: property.kind(),
                    given: object.to_string(),
                })
            }
        }
        if !self.member_of_any(subject, &property.domain) {
            return Err(OntologyError::DomainViolation {
                subject: a.subject.clone(),
                property: a.property.clone(),
            });
        }
        if self.assertions.contains(&a) {
            return Err(OntologyError::DuplicateAssertion(a));
        }
        self.assertions.insert(a);
        Ok(())
    }

    /// Removes one assertion. Not part of the monotone authoring surface; used
    /// by fusion and by mutation testing.
    pub fn retract(&mut self, a: &Assertion) -> Result<(), OntologyError> {
        if self.assertions.remove(a) {
            Ok(())
        } else {
            Err(OntologyError::MissingAssertion(a.clone()))
        }
    }

    /// Removes an individual that no assertion mentions any more.
    pub fn remove_individual(&mut self, name: &str) -> Result<Individual, OntologyError> {
        let referenced = self
            .assertions
            .iter()
            .any(|a| a.subject.as_str() == name || a.object.as_individual().is_some_and(|o| o == name));
        if referenced {
            return Err(OntologyError::StillReferenced(
                self.individual_or_err(name)?.name.clone(),
            ));
        }
        self.individuals
            .remove(name)
            .ok_or_else(|| OntologyError::UnknownName {
                kind: NameKind::Individual,
                name: self.name_for_error(name),
            })
    }

    /// Removes an individual together with every assertion that mentions it.
    pub fn purge_individual(&mut self, name: &str) -> Result<Individual, OntologyError> {
        self.individual_or_err(name)?;
        self.assertions
            .retain(|a| a.subject.as_str() != name && a.object.as_individual().is_none_or(|o| o != name));
        self.remove_individual(name)
    }

    // ---- queries -----------------------------------------------------

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.get(name)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyDecl> {
        self.properties.get(name)
    }

    pub fn individual(&self, name: &str) -> Option<&Individual> {
        self.individuals.get(name)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.classes.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDecl> {
        self.properties.values()
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter()
    }

    pub fn contains_assertion(&self, a: &Assertion) -> bool {
        self.assertions.contains(a)
    }

    /// True if `class` equals `ancestor` or descends from it.
    pub fn is_subclass_of(&self, class: &str, ancestor: &str) -> bool {
        let mut cursor = self.classes.get(class);
        while let Some(decl) = cursor {
            if decl.name == ancestor {
                return true;
            }
            cursor = decl.parent.as_ref().and_then(|p| self.classes.get(p));
        }
        false
    }

    /// True if some class of the individual is `class` or one of its subclasses.
    pub fn is_instance_of(&self, individual: &str, class: &str) -> bool {
        self.individuals
            .get(individual)
            .is_some_and(|ind| ind.classes.iter().any(|c| self.is_subclass_of(c, class)))
    }

    pub fn subclasses(&self, class: &str) -> Vec<&Name> {
        self.classes
            .values()
            .filter(|d| d.parent.as_ref().is_some_and(|p| p == class))
            .map(|d| &d.name)
            .collect()
    }

    pub fn individuals_of_class(
        &self,
        class: &str,
        transitive: bool,
    ) -> Result<Vec<&Individual>, OntologyError> {
        if !self.classes.contains_key(class) {
            return Err(OntologyError::UnknownClass(self.name_for_error(class)));
        }
        Ok(self
            .individuals
            .values()
            .filter(|ind| {
                if transitive {
                    ind.classes.iter().any(|c| self.is_subclass_of(c, class))
                } else {
                    ind.classes.iter().any(|c| c == class)
                }
            })
            .collect())
    }

    /// All assertions with the given subject, ordered by (property, object).
    pub fn assertions_of(&self, subject: &str) -> Result<Vec<&Assertion>, OntologyError> {
        self.individual_or_err(subject)?;
        Ok(self.assertions_from(subject))
    }

    fn assertions_from(&self, subject: &str) -> Vec<&Assertion> {
        self.assertions
            .iter()
            .skip_while(|a| a.subject.as_str() < subject)
            .take_while(|a| a.subject.as_str() == subject)
            .collect()
    }

    /// Object individuals linked from `subject` through `property`.
    pub fn objects<'a>(&'a self, subject: &str, property: &str) -> Vec<&'a Name> {
        self.assertions_from(subject)
            .into_iter()
            .filter(|a| a.property.as_str() == property)
            .filter_map(|a| a.object.as_individual())
            .collect()
    }

    /// Literal values of `property` on `subject`.
    pub fn values<'a>(&'a self, subject: &str, property: &str) -> Vec<&'a Literal> {
        self.assertions_from(subject)
            .into_iter()
            .filter(|a| a.property.as_str() == property)
            .filter_map(|a| a.object.as_literal())
            .collect()
    }

    pub fn value<'a>(&'a self, subject: &str, property: &str) -> Option<&'a Literal> {
        self.values(subject, property).into_iter().next()
    }

    /// Subjects that link to `object` through `property`.
    pub fn subjects_linking<'a>(&'a self, property: &str, object: &str) -> Vec<&'a Name> {
        self.assertions
            .iter()
            .filter(|a| {
                a.property.as_str() == property && a.object.as_individual().is_some_and(|o| o == object)
            })
            .map(|a| &a.subject)
            .collect()
    }

    /// Individuals reachable from `start` by following object assertions.
    /// `start` itself is included.
    pub fn reachable_from(&self, start: &str) -> BTreeSet<Name> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        if let Some(ind) = self.individuals.get(start) {
            seen.insert(ind.name.clone());
            queue.push_back(ind.name.clone());
        }
        while let Some(current) = queue.pop_front() {
            for a in self.assertions_from(current.as_str()) {
                if let Some(obj) = a.object.as_individual() {
                    if seen.insert(obj.clone()) {
                        queue.push_back(obj.clone());
                    }
                }
            }
        }
        seen
    }

    pub fn stats(&self) -> OntologyStats {
        OntologyStats::of(self)
    }

    /// Full referential scan. Always `Ok` for values built through this API;
    /// used after parsing and in tests.
    pub fn check_integrity(&self) -> Result<(), OntologyError> {
        let mut rebuilt = Ontology::new();
        rebuilt.declare_classes(self.classes.values().cloned())?;
        for p in self.properties.values() {
            rebuilt.declare_property(p.clone())?;
        }
        for i in self.individuals.values() {
            rebuilt.add_individual(i.clone())?;
        }
        for a in &self.assertions {
            rebuilt.assert_property(a.clone())?;
        }
        Ok(())
    }

    fn member_of_any(&self, ind: &Individual, classes: &BTreeSet<Name>) -> bool {
        ind.classes
            .iter()
            .any(|c| classes.iter().any(|target| self.is_subclass_of(c, target)))
    }

    fn individual_or_err(&self, name: &str) -> Result<&Individual, OntologyError> {
        self.individuals
            .get(name)
            .ok_or_else(|| OntologyError::UnknownName {
                kind: NameKind::Individual,
                name: self.name_for_error(name),
            })
    }

    fn name_for_error(&self, raw: &str) -> Name {
        Name::new(raw).unwrap_or_else(|_| Name::new("invalid").expect("literal name"))
    }
}
