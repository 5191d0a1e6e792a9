//! The master ontology: schema, OpenSCENARIO constants, default individuals
//! and simulator assets, built from bundled manifests.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use crate::ontology::{
    Assertion, ClassDecl, Datatype, Individual, Literal, Name, Ontology, Origin, PropertyDecl, PropertyRange,
};

mod assets;
mod corner;
pub mod vocab;

pub use assets::{AssetCategory, AssetManifest, AssetRef, Dimensions, BUNDLED_ASSETS};
pub use corner::{CornerCaseLevel, InvalidPair, Layer, Level};

pub const BUNDLED_SCHEMA: &str = include_str!("../../data/schema.toml");

pub const CLASS_COUNT: usize = 100;
pub const OBJECT_PROPERTY_COUNT: usize = 53;
pub const DATA_PROPERTY_COUNT: usize = 44;

/// Group ids in manifest order.
pub const GROUPS: [&str; 7] = [
    "scenario_environment",
    "entities",
    "main_elements",
    "actions",
    "conditions",
    "weather_time",
    "corner_case",
];

/// Classes every schema manifest must declare.
pub const MANDATED_CLASSES: &[&str] = &[
    "Scenario",
    "Town",
    "Storyboard",
    "Init",
    "Story",
    "Act",
    "ManeuverGroup",
    "Maneuver",
    "Event",
    "Action",
    "StartTrigger",
    "StopTrigger",
    "Entity",
    "Vehicle",
    "Pedestrian",
    "Bicycle",
    "Misc",
    "BoundingBox",
    "TeleportAction",
    "SpeedAction",
    "RelativeLaneChangeAction",
    "EnvironmentAction",
    "Condition",
    "ByEntityCondition",
    "ByValueCondition",
    "SimulationTimeCondition",
    "RelativeDistanceCondition",
    "TraveledDistanceCondition",
    "StoryboardElementStateCondition",
    "Environment",
    "Weather",
    "Fog",
    "Precipitation",
    "Sun",
    "TimeOfDay",
    "RoadCondition",
    "TransitionDynamics",
    "CornerCase",
    "SensorLayer",
    "ContentLayer",
    "TemporalLayer",
    "HardwareLevel",
    "PhysicalLevel",
    "DomainLevel",
    "ObjectLevel",
    "SceneLevel",
    "ScenarioLevel",
];

/// Names of default individuals referenced by the builder.
pub mod defaults {
    pub const EGO_VEHICLE: &str = "ego_vehicle";
    pub const EGO_BOUNDING_BOX: &str = "ego_bounding_box";
    pub const START_TRIGGER: &str = "simulation_start_trigger";
    pub const START_CONDITION: &str = "simulation_start_condition";
    pub const ENVIRONMENT_ACTION: &str = "default_environment_action";
    pub const ENVIRONMENT: &str = "default_environment";
    pub const WEATHER: &str = "default_weather";
    pub const TIME_OF_DAY: &str = "default_time_of_day";
    pub const ROAD_CONDITION: &str = "default_road_condition";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MasterError {
    #[error("manifest corrupt: {0}")]
    ManifestCorrupt(String),
    #[error("asset `{0}` is already registered")]
    DuplicateAsset(String),
    #[error("invalid asset id {0}")]
    InvalidAssetId(String),
}

fn corrupt(msg: impl Into<String>) -> MasterError {
    MasterError::ManifestCorrupt(msg.into())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    format: u32,
    groups: BTreeMap<String, GroupFile>,
    constants: BTreeMap<String, Vec<String>>,
    defaults: Vec<DefaultFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    title: String,
    classes: Vec<String>,
    #[serde(default)]
    object_properties: Vec<String>,
    #[serde(default)]
    data_properties: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DefaultFile {
    name: String,
    class: String,
    #[serde(default)]
    values: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaGroup {
    pub id: String,
    pub title: String,
    pub classes: Vec<ClassDecl>,
    pub properties: Vec<PropertyDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DefaultValue {
    Text(String),
    Float(f64),
    Int(i64),
    Bool(bool),
    Names(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefaultIndividual {
    pub name: Name,
    pub class: Name,
    pub values: Vec<(Name, DefaultValue)>,
}

/// Parsed schema manifest: classes and properties by group, constants, defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaManifest {
    pub groups: Vec<SchemaGroup>,
    pub constants: BTreeMap<Name, Vec<Name>>,
    pub defaults: Vec<DefaultIndividual>,
}

impl SchemaManifest {
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED_SCHEMA).expect("bundled schema manifest is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, MasterError> {
        let file: SchemaFile = toml::from_str(text).map_err(|e| corrupt(format!("schema: {e}")))?;
        if file.format != 1 {
            return Err(corrupt(format!("schema: unsupported format {}", file.format)));
        }
        let mut groups_in = file.groups;
        let mut groups = Vec::new();
        for id in GROUPS {
            let g = groups_in
                .remove(id)
                .ok_or_else(|| corrupt(format!("missing group `{id}`")))?;
            let mut classes = Vec::new();
            for c in &g.classes {
                classes.push(parse_class(c)?);
            }
            let mut properties = Vec::new();
            for p in &g.object_properties {
                properties.push(parse_property(p, true)?);
            }
            for p in &g.data_properties {
                properties.push(parse_property(p, false)?);
            }
            groups.push(SchemaGroup {
                id: id.to_string(),
                title: g.title,
                classes,
                properties,
            });
        }
        if let Some(extra) = groups_in.keys().next() {
            return Err(corrupt(format!("unknown group `{extra}`")));
        }

        let mut constants = BTreeMap::new();
        for (class, tokens) in file.constants {
            let class = name(&class)?;
            let tokens = tokens.iter().map(|t| name(t)).collect::<Result<Vec<_>, _>>()?;
            constants.insert(class, tokens);
        }

        let mut defaults = Vec::new();
        for d in file.defaults {
            let mut values = Vec::new();
            for (prop, v) in d.values {
                values.push((name(&prop)?, default_value(&d.name, &prop, v)?));
            }
            defaults.push(DefaultIndividual {
                name: name(&d.name)?,
                class: name(&d.class)?,
                values,
            });
        }

        let manifest = SchemaManifest {
            groups,
            constants,
            defaults,
        };
        manifest.check_rosters()?;
        Ok(manifest)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.groups.iter().flat_map(|g| g.classes.iter())
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDecl> {
        self.groups.iter().flat_map(|g| g.properties.iter())
    }

    /// Group id the class is declared in.
    pub fn group_of(&self, class: &str) -> Option<&str> {
        self.groups
            .iter()
            .find(|g| g.classes.iter().any(|c| c.name == class))
            .map(|g| g.id.as_str())
    }

    fn check_rosters(&self) -> Result<(), MasterError> {
        let classes = self.classes().count();
        let objects = self
            .properties()
            .filter(|p| matches!(p.range, PropertyRange::Classes(_)))
            .count();
        let datas = self.properties().count() - objects;
        if (classes, objects, datas) != (CLASS_COUNT, OBJECT_PROPERTY_COUNT, DATA_PROPERTY_COUNT) {
            return Err(corrupt(format!(
                "roster sizes {classes}/{objects}/{datas}, expected \
                 {CLASS_COUNT}/{OBJECT_PROPERTY_COUNT}/{DATA_PROPERTY_COUNT}"
            )));
        }
        let declared: BTreeSet<&str> = self.classes().map(|c| c.name.as_str()).collect();
        if let Some(missing) = MANDATED_CLASSES.iter().find(|c| !declared.contains(*c)) {
            return Err(corrupt(format!("mandated class `{missing}` missing")));
        }
        Ok(())
    }
}

fn name(s: &str) -> Result<Name, MasterError> {
    Name::new(s).map_err(|_| corrupt(format!("invalid name `{s}`")))
}

fn name_list(s: &str) -> Result<Vec<Name>, MasterError> {
    s.split(',').map(|n| name(n.trim())).collect()
}

fn parse_class(s: &str) -> Result<ClassDecl, MasterError> {
    match s.split_once('<') {
        Some((c, p)) => Ok(ClassDecl::child(name(c.trim())?, name(p.trim())?)),
        None => Ok(ClassDecl::root(name(s.trim())?)),
    }
}

fn parse_property(s: &str, object: bool) -> Result<PropertyDecl, MasterError> {
    let bad = || corrupt(format!("malformed property signature `{s}`"));
    let (prop, sig) = s.split_once(':').ok_or_else(bad)?;
    let (domain, range) = sig.split_once("->").ok_or_else(bad)?;
    let prop = name(prop.trim())?;
    let domain = name_list(domain)?;
    if object {
        Ok(PropertyDecl::object(prop, domain, name_list(range)?))
    } else {
        let dt: Datatype = range.trim().parse().map_err(|_| bad())?;
        Ok(PropertyDecl::data(prop, domain, dt))
    }
}

fn default_value(ind: &str, prop: &str, v: toml::Value) -> Result<DefaultValue, MasterError> {
    Ok(match v {
        toml::Value::String(s) => DefaultValue::Text(s),
        toml::Value::Float(f) => DefaultValue::Float(f),
        toml::Value::Integer(i) => DefaultValue::Int(i),
        toml::Value::Boolean(b) => DefaultValue::Bool(b),
        toml::Value::Array(items) => DefaultValue::Names(
            items
                .into_iter()
                .map(|i| match i {
                    toml::Value::String(s) => Ok(s),
                    other => Err(corrupt(format!("{ind}.{prop}: expected names, found {other}"))),
                })
                .collect::<Result<_, _>>()?,
        ),
        other => return Err(corrupt(format!("{ind}.{prop}: unsupported value {other}"))),
    })
}

/// The built master ontology together with the manifests it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Master {
    ontology: Ontology,
    schema: SchemaManifest,
    assets: AssetManifest,
}

impl Master {
    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn schema(&self) -> &SchemaManifest {
        &self.schema
    }

    pub fn assets(&self) -> &AssetManifest {
        &self.assets
    }

    pub fn into_ontology(self) -> Ontology {
        self.ontology
    }
}

/// Builds the master from the bundled manifests.
pub fn build_master() -> Result<Master, MasterError> {
    build_master_with(
        SchemaManifest::from_toml(BUNDLED_SCHEMA)?,
        AssetManifest::from_toml(BUNDLED_ASSETS)?,
    )
}

/// Shared, lazily built master from the bundled manifests.
pub fn bundled() -> &'static Master {
    static MASTER: OnceLock<Master> = OnceLock::new();
    MASTER.get_or_init(|| build_master().expect("bundled manifests build a valid master"))
}

pub fn build_master_with(schema: SchemaManifest, assets: AssetManifest) -> Result<Master, MasterError> {
    schema.check_rosters()?;
    let err = |e: crate::ontology::OntologyError| corrupt(e.to_string());
    let mut onto = Ontology::new();
    onto.declare_classes(schema.classes().cloned()).map_err(err)?;
    for p in schema.properties() {
        onto.declare_property(p.clone()).map_err(err)?;
    }

    for (class, tokens) in &schema.constants {
        for t in tokens {
            onto.add_individual(Individual::new(t.clone(), class.clone(), Origin::Constant))
                .map_err(err)?;
        }
    }
    for a in assets.iter() {
        onto.add_individual(Individual::new(
            a.id.clone(),
            name(a.category.class_name())?,
            Origin::Constant,
        ))
        .map_err(err)?;
        if let Some(d) = a.dimensions {
            for (prop, v) in [
                ("asset_length", d.length),
                ("asset_width", d.width),
                ("asset_height", d.height),
            ] {
                let lit = Literal::double(v).map_err(|e| corrupt(e.to_string()))?;
                onto.assert_property(Assertion::value(a.id.clone(), name(prop)?, lit))
                    .map_err(err)?;
            }
        }
    }
    for d in &schema.defaults {
        onto.add_individual(Individual::new(d.name.clone(), d.class.clone(), Origin::Default))
            .map_err(err)?;
    }
    for d in &schema.defaults {
        for (prop, value) in &d.values {
            for a in default_assertions(&onto, d, prop, value)? {
                onto.assert_property(a).map_err(err)?;
            }
        }
    }
    onto.check_integrity().map_err(err)?;
    Ok(Master {
        ontology: onto,
        schema,
        assets,
    })
}

fn default_assertions(
    onto: &Ontology,
    d: &DefaultIndividual,
    prop: &Name,
    value: &DefaultValue,
) -> Result<Vec<Assertion>, MasterError> {
    let decl = onto
        .property(prop)
        .ok_or_else(|| corrupt(format!("{}: unknown property `{prop}`", d.name)))?;
    let mismatch = || {
        corrupt(format!(
            "{}.{prop}: value does not match the property range",
            d.name
        ))
    };
    let subject = d.name.clone();
    match &decl.range {
        PropertyRange::Classes(_) => {
            let targets = match value {
                DefaultValue::Text(s) => vec![s.clone()],
                DefaultValue::Names(v) => v.clone(),
                _ => return Err(mismatch()),
            };
            targets
                .iter()
                .map(|t| Ok(Assertion::link(subject.clone(), prop.clone(), name(t)?)))
                .collect()
        }
        PropertyRange::Datatype(dt) => {
            let lit = match (dt, value) {
                (Datatype::Double, DefaultValue::Float(f)) => Literal::double(*f).ok(),
                (Datatype::Double, DefaultValue::Int(i)) => Some(Literal::Double(*i as f64)),
                (Datatype::Integer, DefaultValue::Int(i)) => Some(Literal::Integer(*i)),
                (Datatype::Boolean, DefaultValue::Bool(b)) => Some(Literal::Boolean(*b)),
                (Datatype::String, DefaultValue::Text(s)) => Some(Literal::String(s.clone())),
                (Datatype::Token, DefaultValue::Text(s)) => Literal::token(s.clone()).ok(),
                _ => None,
            };
            Ok(vec![Assertion::value(
                subject,
                prop.clone(),
                lit.ok_or_else(mismatch)?,
            )])
        }
    }
}
