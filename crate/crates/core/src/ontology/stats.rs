use std::fmt;

use serde::Serialize;

use super::{Ontology, Origin, PropertyKind};

/// Element counts of an ontology.
///
/// `assertions` is the size of the assertion multiset; `axioms` adds every
/// declaration record (classes, properties, individuals) on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OntologyStats {
    pub classes: usize,
    pub object_properties: usize,
    pub data_properties: usize,
    pub individuals: usize,
    pub constant_individuals: usize,
    pub default_individuals: usize,
    pub scenario_individuals: usize,
    pub assertions: usize,
    pub axioms: usize,
}

impl OntologyStats {
    pub(super) fn of(onto: &Ontology) -> Self {
        let mut s = OntologyStats {
            classes: onto.classes().count(),
            ..Default::default()
        };
        for p in onto.properties() {
            match p.kind() {
                PropertyKind::Object => s.object_properties += 1,
                PropertyKind::Data => s.data_properties += 1,
            }
        }
        for i in onto.individuals() {
            s.individuals += 1;
            match i.origin {
                Origin::Constant => s.constant_individuals += 1,
                Origin::Default => s.default_individuals += 1,
                Origin::Scenario => s.scenario_individuals += 1,
            }
        }
        s.assertions = onto.assertions().count();
        s.axioms = s.classes + s.object_properties + s.data_properties + s.individuals + s.assertions;
        s
    }
}

impl fmt::Display for OntologyStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classes            {}", self.classes)?;
        writeln!(f, "object properties  {}", self.object_properties)?;
        writeln!(f, "data properties    {}", self.data_properties)?;
        writeln!(
            f,
            "individuals        {} (constant {}, default {}, scenario {})",
            self.individuals, self.constant_individuals, self.default_individuals, self.scenario_individuals
        )?;
        writeln!(f, "assertions         {}", self.assertions)?;
        write!(f, "axioms             {}", self.axioms)
    }
}
