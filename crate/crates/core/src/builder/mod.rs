//! Scenario authoring on top of a clone of the master ontology.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::master::vocab::{ConditionEdge, StoryboardElementType, TriggeringEntitiesRule};
use crate::master::{
    self, defaults, AssetCategory, AssetManifest, AssetRef, CornerCaseLevel, InvalidPair, Master,
};
use crate::ontology::{Assertion, Individual, Literal, Name, Ontology, OntologyError, Origin};

mod spec;
mod validate;

pub use spec::*;
pub use validate::{validate, ValidationError, ValidationRule, Violation};

pub const GENERATED_PREFIX: &str = "indiv_";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("town identifier must not be empty")]
    EmptyTown,
    #[error("{kind} cannot be placed under {parent}")]
    BadParentKind { kind: StructuralKind, parent: String },
    #[error("{0} requires a payload")]
    MissingPayload(StructuralKind),
    #[error("payload does not fit {0}")]
    BadPayload(StructuralKind),
    #[error("asset `{asset}` cannot be used for a {kind:?}")]
    AssetKindMismatch { asset: String, kind: EntityKind },
    #[error("unknown asset `{0}`")]
    UnknownAsset(String),
    #[error("no default asset available for {0:?}")]
    NoDefaultAsset(EntityKind),
    #[error("the scenario already has an ego vehicle")]
    DuplicateEgo,
    #[error("the default ego vehicle uses a fixed asset; `{0}` was requested")]
    EgoAssetLocked(String),
    #[error("`{0}` is not an entity of this scenario")]
    UnknownEntity(String),
    #[error("`{0}` is not a TransitionDynamics element")]
    MissingDynamics(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("`{0}` does not refer to a usable element")]
    UnknownElementRef(String),
    #[error("`{0}` is not a private or global action")]
    NotAnAction(String),
    #[error("a trigger needs at least one condition")]
    EmptyConditions,
    #[error("a {kind} cannot be attached to {target}")]
    BadAttachTarget { kind: &'static str, target: String },
    #[error("value out of range: {0}")]
    RangeError(String),
    #[error(transparent)]
    InvalidPair(#[from] InvalidPair),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

/// Working state of one scenario under construction.
#[derive(Debug, Clone)]
pub struct ScenarioHandle {
    onto: Ontology,
    assets: AssetManifest,
    root: Name,
    counters: BTreeMap<String, u32>,
}

fn n(s: &str) -> Name {
    Name::new(s).expect("static names are valid")
}

fn double(what: &str, v: f64) -> Result<Literal, BuildError> {
    Literal::double(v).map_err(|_| BuildError::RangeError(format!("{what} must be finite")))
}

impl ScenarioHandle {
    /// Starts a scenario from the bundled master.
    pub fn new_scenario(town: &str) -> Result<Self, BuildError> {
        Self::from_master(master::bundled(), town)
    }

    pub fn from_master(master: &Master, town: &str) -> Result<Self, BuildError> {
        if town.trim().is_empty() {
            return Err(BuildError::EmptyTown);
        }
        let mut h = ScenarioHandle {
            onto: master.ontology().clone(),
            assets: master.assets().clone(),
            root: n("Scenario"),
            counters: BTreeMap::new(),
        };
        let root = h.create("Scenario", None)?;
        let town_ind = h.create("Town", None)?;
        h.value(&town_ind.name, "town_name", Literal::String(town.to_string()))?;
        h.link(&root.name, "has_town", &town_ind.name)?;
        h.root = root.name;
        Ok(h)
    }

    pub fn root(&self) -> ElementRef {
        ElementRef {
            name: self.root.clone(),
            class: n("Scenario"),
        }
    }

    pub fn ontology(&self) -> &Ontology {
        &self.onto
    }

    pub fn assets(&self) -> &AssetManifest {
        &self.assets
    }

    /// Makes an external asset available to `new_entity`.
    pub fn register_asset(&mut self, asset: AssetRef) -> Result<(), master::MasterError> {
        self.assets.register(asset)
    }

    /// Reference to an existing individual (default or builder-created).
    pub fn element(&self, name: &str) -> Option<ElementRef> {
        let ind = self.onto.individual(name)?;
        Some(ElementRef {
            name: ind.name.clone(),
            class: ind.classes.iter().next()?.clone(),
        })
    }

    /// The master's simulation-start trigger.
    pub fn default_start_trigger(&self) -> ElementRef {
        self.element(defaults::START_TRIGGER)
            .expect("master provides a start trigger")
    }

    /// The master's EnvironmentAction wrapping the default environment.
    pub fn default_environment_action(&self) -> ElementRef {
        self.element(defaults::ENVIRONMENT_ACTION)
            .expect("master provides a default environment action")
    }

    fn next_name(&mut self, label: &str) -> Name {
        loop {
            let counter = self.counters.entry(label.to_string()).or_insert(0);
            *counter += 1;
            let candidate = n(&format!("{GENERATED_PREFIX}{label}{counter}"));
            if self.onto.individual(&candidate).is_none() {
                return candidate;
            }
        }
    }

    fn create(&mut self, class: &str, label: Option<&str>) -> Result<ElementRef, BuildError> {
        let name = match label {
            Some(l) => Name::new(format!("{GENERATED_PREFIX}{l}"))?,
            None => self.next_name(class),
        };
        let class = n(class);
        self.onto
            .add_individual(Individual::new(name.clone(), class.clone(), Origin::Scenario))?;
        Ok(ElementRef { name, class })
    }

    fn link(&mut self, subject: &Name, prop: &str, object: &Name) -> Result<(), BuildError> {
        self.onto
            .assert_property(Assertion::link(subject.clone(), n(prop), object.clone()))?;
        Ok(())
    }

    fn value(&mut self, subject: &Name, prop: &str, value: Literal) -> Result<(), BuildError> {
        self.onto
            .assert_property(Assertion::value(subject.clone(), n(prop), value))?;
        Ok(())
    }

    fn is(&self, r: &ElementRef, class: &str) -> bool {
        self.onto.is_instance_of(&r.name, class)
    }

    fn scenario_entity(&self, r: &ElementRef) -> Result<(), BuildError> {
        let linked = self.onto.objects(&self.root, "has_entity").contains(&&r.name);
        if linked && self.is(r, "Entity") {
            Ok(())
        } else {
            Err(BuildError::UnknownEntity(r.name.to_string()))
        }
    }

    /// Sets a data property on an element, checked against the schema.
    pub fn set_value(&mut self, element: &ElementRef, prop: &str, value: Literal) -> Result<(), BuildError> {
        let prop = Name::new(prop)?;
        self.onto
            .assert_property(Assertion::value(element.name.clone(), prop, value))?;
        Ok(())
    }

    /// Sets a free-text description on the scenario root.
    pub fn set_description(&mut self, text: &str) -> Result<(), BuildError> {
        let root = self.root.clone();
        self.value(&root, "scenario_description", Literal::String(text.to_string()))
    }

    // ---- main scenario elements ----

    pub fn structural_element(
        &mut self,
        kind: StructuralKind,
        parent: &ElementRef,
        payload: Payload,
    ) -> Result<ElementRef, BuildError> {
        let (parent_class, prop) = kind.containment();
        let parent_ok = match kind {
            StructuralKind::Storyboard => parent.name == self.root,
            _ => {
                self.onto.individual(&parent.name).map(|i| i.origin) == Some(Origin::Scenario)
                    && self.is(parent, parent_class)
            }
        };
        if !parent_ok {
            return Err(BuildError::BadParentKind {
                kind,
                parent: parent.to_string(),
            });
        }
        if kind == StructuralKind::Init && !self.onto.objects(&parent.name, "has_init").is_empty() {
            return Err(BuildError::BadParentKind {
                kind,
                parent: format!("{parent} (already has an Init)"),
            });
        }
        // Check the payload fully before creating anything.
        match (kind, &payload) {
            (
                StructuralKind::Event,
                Payload::Event {
                    max_execution_count, ..
                },
            )
            | (
                StructuralKind::ManeuverGroup,
                Payload::ManeuverGroup {
                    max_execution_count, ..
                },
            ) => {
                if *max_execution_count < 1 {
                    return Err(BuildError::RangeError(
                        "maximum execution count must be >= 1".into(),
                    ));
                }
            }
            (StructuralKind::Event, _) | (StructuralKind::Action, Payload::None) => {
                return Err(BuildError::MissingPayload(kind))
            }
            (StructuralKind::Action, Payload::Action(inner)) => {
                if !(self.is(inner, "PrivateAction") || self.is(inner, "GlobalAction")) {
                    return Err(BuildError::NotAnAction(inner.name.to_string()));
                }
            }
            (StructuralKind::Init, Payload::Init(actions)) => {
                if let Some(a) = actions
                    .iter()
                    .find(|a| !(self.is(a, "PrivateAction") || self.is(a, "GlobalAction")))
                {
                    return Err(BuildError::NotAnAction(a.name.to_string()));
                }
            }
            (_, Payload::None) => {}
            _ => return Err(BuildError::BadPayload(kind)),
        }
        if let Payload::ManeuverGroup { actors, .. } = &payload {
            for a in actors {
                self.scenario_entity(a)?;
            }
        }

        let el = self.create(kind.class_name(), None)?;
        self.link(&parent.name, prop, &el.name)?;
        match payload {
            Payload::None => {}
            Payload::Init(actions) => {
                for a in actions {
                    self.link(&el.name, "has_init_action", &a.name)?;
                }
            }
            Payload::ManeuverGroup {
                actors,
                max_execution_count,
            } => {
                self.value(
                    &el.name,
                    "maximum_execution_count",
                    Literal::Integer(max_execution_count),
                )?;
                for a in actors {
                    self.link(&el.name, "has_actor", &a.name)?;
                }
            }
            Payload::Event {
                priority,
                max_execution_count,
            } => {
                self.link(&el.name, "has_priority", &n(priority.as_str()))?;
                self.value(
                    &el.name,
                    "maximum_execution_count",
                    Literal::Integer(max_execution_count),
                )?;
            }
            Payload::Action(inner) => {
                let prop = if self.is(&inner, "PrivateAction") {
                    "has_private_action"
                } else {
                    "has_global_action"
                };
                self.link(&el.name, prop, &inner.name)?;
            }
        }
        Ok(el)
    }

    pub fn new_storyboard(&mut self) -> Result<ElementRef, BuildError> {
        let root = self.root();
        self.structural_element(StructuralKind::Storyboard, &root, Payload::None)
    }

    pub fn new_init(
        &mut self,
        storyboard: &ElementRef,
        actions: &[ElementRef],
    ) -> Result<ElementRef, BuildError> {
        self.structural_element(StructuralKind::Init, storyboard, Payload::Init(actions.to_vec()))
    }

    pub fn add_init_action(&mut self, init: &ElementRef, action: &ElementRef) -> Result<(), BuildError> {
        if !self.is(init, "Init") {
            return Err(BuildError::UnknownElementRef(init.name.to_string()));
        }
        if !(self.is(action, "PrivateAction") || self.is(action, "GlobalAction")) {
            return Err(BuildError::NotAnAction(action.name.to_string()));
        }
        self.link(&init.name, "has_init_action", &action.name)
    }

    pub fn new_story(&mut self, storyboard: &ElementRef) -> Result<ElementRef, BuildError> {
        self.structural_element(StructuralKind::Story, storyboard, Payload::None)
    }

    pub fn new_act(&mut self, story: &ElementRef) -> Result<ElementRef, BuildError> {
        self.structural_element(StructuralKind::Act, story, Payload::None)
    }

    pub fn new_maneuver_group(
        &mut self,
        act: &ElementRef,
        actors: &[ElementRef],
    ) -> Result<ElementRef, BuildError> {
        self.structural_element(
            StructuralKind::ManeuverGroup,
            act,
            Payload::ManeuverGroup {
                actors: actors.to_vec(),
                max_execution_count: 1,
            },
        )
    }

    pub fn new_maneuver(&mut self, group: &ElementRef) -> Result<ElementRef, BuildError> {
        self.structural_element(StructuralKind::Maneuver, group, Payload::None)
    }

    pub fn new_event(
        &mut self,
        maneuver: &ElementRef,
        priority: master::vocab::Priority,
    ) -> Result<ElementRef, BuildError> {
        self.structural_element(
            StructuralKind::Event,
            maneuver,
            Payload::Event {
                priority,
                max_execution_count: 1,
            },
        )
    }

    /// Wraps a concrete action in an Action element of `event`.
    pub fn wrap_action(&mut self, event: &ElementRef, action: &ElementRef) -> Result<ElementRef, BuildError> {
        self.structural_element(StructuralKind::Action, event, Payload::Action(action.clone()))
    }

    // ---- entities ----

    pub fn new_entity(&mut self, kind: EntityKind, asset: Option<&str>) -> Result<ElementRef, BuildError> {
        if kind == EntityKind::EgoVehicle {
            return self.add_ego(asset);
        }
        let category = match kind {
            EntityKind::Car => AssetCategory::Car,
            EntityKind::Pedestrian => AssetCategory::Pedestrian,
            EntityKind::Bicycle => AssetCategory::Bicycle,
            EntityKind::Misc => AssetCategory::Misc,
            EntityKind::EgoVehicle => unreachable!(),
        };
        let asset = match asset {
            Some(id) => self
                .assets
                .get(id)
                .cloned()
                .ok_or_else(|| BuildError::UnknownAsset(id.to_string()))?,
            None => self
                .assets
                .assets(category)
                .first()
                .map(|a| (*a).clone())
                .ok_or(BuildError::NoDefaultAsset(kind))?,
        };
        if asset.category != category {
            return Err(BuildError::AssetKindMismatch {
                asset: asset.id.to_string(),
                kind,
            });
        }
        let asset_name = self.ensure_asset_individual(&asset)?;
        let entity = self.create(kind.class_name(), None)?;
        self.link(&entity.name, "has_asset", &asset_name)?;
        let root = self.root.clone();
        self.link(&root, "has_entity", &entity.name)?;
        Ok(entity)
    }

    fn add_ego(&mut self, asset: Option<&str>) -> Result<ElementRef, BuildError> {
        let ego = self
            .element(defaults::EGO_VEHICLE)
            .expect("master provides an ego vehicle");
        if self.onto.objects(&self.root, "has_entity").contains(&&ego.name) {
            return Err(BuildError::DuplicateEgo);
        }
        if let Some(id) = asset {
            let current = self.onto.objects(&ego.name, "has_asset");
            if !current.iter().any(|a| a.as_str() == id) {
                return match self.assets.get(id) {
                    Some(a) if a.category != AssetCategory::Car => Err(BuildError::AssetKindMismatch {
                        asset: id.to_string(),
                        kind: EntityKind::EgoVehicle,
                    }),
                    Some(_) => Err(BuildError::EgoAssetLocked(id.to_string())),
                    None => Err(BuildError::UnknownAsset(id.to_string())),
                };
            }
        }
        let root = self.root.clone();
        self.link(&root, "has_entity", &ego.name)?;
        Ok(ego)
    }

    /// Asset individual name, creating a scenario-local one for assets
    /// registered after the master was built.
    fn ensure_asset_individual(&mut self, asset: &AssetRef) -> Result<Name, BuildError> {
        if self.onto.individual(&asset.id).is_none() {
            self.onto.add_individual(Individual::new(
                asset.id.clone(),
                n(asset.category.class_name()),
                Origin::Scenario,
            ))?;
            if let Some(d) = asset.dimensions {
                for (prop, v) in [
                    ("asset_length", d.length),
                    ("asset_width", d.width),
                    ("asset_height", d.height),
                ] {
                    self.value(&asset.id, prop, double(prop, v)?)?;
                }
            }
        }
        Ok(asset.id.clone())
    }

    // ---- actions ----

    pub fn new_transition_dynamics(&mut self, spec: TransitionDynamics) -> Result<ElementRef, BuildError> {
        let v = double("dynamics value", spec.value)?;
        if spec.value < 0.0 {
            return Err(BuildError::RangeError("dynamics value must be >= 0".into()));
        }
        let el = self.create("TransitionDynamics", None)?;
        self.link(&el.name, "has_dynamics_shape", &n(spec.shape.as_str()))?;
        self.link(&el.name, "has_dynamics_dimension", &n(spec.dimension.as_str()))?;
        self.value(&el.name, "dynamics_value", v)?;
        Ok(el)
    }

    fn dynamics(&self, r: &ElementRef) -> Result<(), BuildError> {
        if self.is(r, "TransitionDynamics") {
            Ok(())
        } else {
            Err(BuildError::MissingDynamics(r.name.to_string()))
        }
    }

    pub fn new_action(&mut self, spec: ActionSpec) -> Result<ElementRef, BuildError> {
        match spec {
            ActionSpec::TeleportWithPosition {
                entity,
                x,
                y,
                z,
                heading,
            } => {
                self.scenario_entity(&entity)?;
                let vals = [
                    ("position_x", double("x", x)?),
                    ("position_y", double("y", y)?),
                    ("position_z", double("z", z)?),
                    ("position_heading", double("heading", heading)?),
                ];
                let action = self.create("TeleportAction", None)?;
                let pos = self.create("WorldPosition", None)?;
                for (p, v) in vals {
                    self.value(&pos.name, p, v)?;
                }
                self.link(&action.name, "has_entity_ref", &entity.name)?;
                self.link(&action.name, "has_position", &pos.name)?;
                Ok(action)
            }
            ActionSpec::TeleportRelative {
                entity,
                reference,
                dx,
                dy,
                dz,
            } => {
                self.scenario_entity(&entity)?;
                self.scenario_entity(&reference)?;
                let vals = [
                    ("offset_dx", double("dx", dx)?),
                    ("offset_dy", double("dy", dy)?),
                    ("offset_dz", double("dz", dz)?),
                ];
                let action = self.create("TeleportAction", None)?;
                let pos = self.create("RelativeObjectPosition", None)?;
                for (p, v) in vals {
                    self.value(&pos.name, p, v)?;
                }
                self.link(&pos.name, "has_reference_entity", &reference.name)?;
                self.link(&action.name, "has_entity_ref", &entity.name)?;
                self.link(&action.name, "has_position", &pos.name)?;
                Ok(action)
            }
            ActionSpec::Speed {
                entity,
                target,
                dynamics,
            } => {
                self.scenario_entity(&entity)?;
                self.dynamics(&dynamics)?;
                let target = double("target speed", target)?;
                let action = self.create("SpeedAction", None)?;
                self.link(&action.name, "has_entity_ref", &entity.name)?;
                self.value(&action.name, "target_speed", target)?;
                self.link(&action.name, "has_transition_dynamics", &dynamics.name)?;
                Ok(action)
            }
            ActionSpec::RelativeLaneChange {
                entity,
                reference,
                lane_offset,
                dynamics,
            } => {
                self.scenario_entity(&entity)?;
                self.scenario_entity(&reference)?;
                self.dynamics(&dynamics)?;
                let action = self.create("RelativeLaneChangeAction", None)?;
                self.link(&action.name, "has_entity_ref", &entity.name)?;
                self.link(&action.name, "has_reference_entity", &reference.name)?;
                self.value(&action.name, "lane_offset", Literal::Integer(lane_offset))?;
                self.link(&action.name, "has_transition_dynamics", &dynamics.name)?;
                Ok(action)
            }
            ActionSpec::EnvironmentChange { environment } => {
                if !self.is(&environment, "Environment") {
                    return Err(BuildError::UnknownElementRef(environment.name.to_string()));
                }
                let action = self.create("EnvironmentAction", None)?;
                self.link(&action.name, "has_environment", &environment.name)?;
                Ok(action)
            }
        }
    }

    // ---- conditions and triggers ----

    pub fn new_condition(&mut self, spec: ConditionSpec) -> Result<ElementRef, BuildError> {
        let zero = Literal::Double(0.0);
        match spec {
            ConditionSpec::SimulationTime { value, rule } => {
                let v = double("simulation time", value)?;
                let c = self.create("SimulationTimeCondition", None)?;
                self.value(&c.name, "condition_value", v)?;
                self.link(&c.name, "has_rule", &n(rule.as_str()))?;
                self.finish_condition(&c, ConditionEdge::None, zero)?;
                Ok(c)
            }
            ConditionSpec::TraveledDistance { entity, value } => {
                self.scenario_entity(&entity)?;
                let v = double("distance", value)?;
                if value < 0.0 {
                    return Err(BuildError::RangeError("traveled distance must be >= 0".into()));
                }
                let c = self.create("TraveledDistanceCondition", None)?;
                self.triggering(&c, &entity)?;
                self.value(&c.name, "condition_value", v)?;
                self.finish_condition(&c, ConditionEdge::Rising, zero)?;
                Ok(c)
            }
            ConditionSpec::RelativeDistance {
                entity,
                reference,
                value,
                rule,
                distance_type,
                freespace,
            } => {
                self.scenario_entity(&entity)?;
                self.scenario_entity(&reference)?;
                let v = double("distance", value)?;
                let c = self.create("RelativeDistanceCondition", None)?;
                self.triggering(&c, &entity)?;
                self.link(&c.name, "has_reference_entity", &reference.name)?;
                self.value(&c.name, "condition_value", v)?;
                self.link(&c.name, "has_rule", &n(rule.as_str()))?;
                self.link(&c.name, "has_relative_distance_type", &n(distance_type.as_str()))?;
                self.value(&c.name, "freespace", Literal::Boolean(freespace))?;
                self.finish_condition(&c, ConditionEdge::Rising, zero)?;
                Ok(c)
            }
            ConditionSpec::StoryboardElementState { element, state } => {
                let scenario_owned =
                    self.onto.individual(&element.name).map(|i| i.origin) == Some(Origin::Scenario);
                let element_type = element_type_of(&self.onto, &element.name)
                    .filter(|_| scenario_owned)
                    .ok_or_else(|| BuildError::UnknownElementRef(element.name.to_string()))?;
                let c = self.create("StoryboardElementStateCondition", None)?;
                self.link(&c.name, "has_storyboard_element", &element.name)?;
                self.link(&c.name, "has_storyboard_element_type", &n(element_type.as_str()))?;
                self.link(&c.name, "has_storyboard_element_state", &n(state.as_str()))?;
                self.finish_condition(&c, ConditionEdge::None, zero)?;
                Ok(c)
            }
        }
    }

    fn triggering(&mut self, c: &ElementRef, entity: &ElementRef) -> Result<(), BuildError> {
        self.link(&c.name, "has_triggering_entity", &entity.name)?;
        self.link(
            &c.name,
            "has_triggering_rule",
            &n(TriggeringEntitiesRule::Any.as_str()),
        )
    }

    fn finish_condition(
        &mut self,
        c: &ElementRef,
        edge: ConditionEdge,
        delay: Literal,
    ) -> Result<(), BuildError> {
        self.link(&c.name, "has_condition_edge", &n(edge.as_str()))?;
        self.value(&c.name, "condition_delay", delay)
    }

    /// Creates a trigger holding all `conditions` (conjunction) and attaches it
    /// to `attach`. `label` names the individual `indiv_<label>`.
    pub fn new_trigger(
        &mut self,
        kind: TriggerKind,
        conditions: &[ElementRef],
        attach: &ElementRef,
        label: Option<&str>,
    ) -> Result<ElementRef, BuildError> {
        if conditions.is_empty() {
            return Err(BuildError::EmptyConditions);
        }
        if let Some(c) = conditions.iter().find(|c| !self.is(c, "Condition")) {
            return Err(BuildError::UnknownElementRef(c.name.to_string()));
        }
        let prop = self.attach_property(kind, attach)?;
        let trigger = self.create(kind.class_name(), label)?;
        for c in conditions {
            self.link(&trigger.name, "has_condition", &c.name)?;
        }
        self.link(&attach.name, prop, &trigger.name)?;
        Ok(trigger)
    }

    /// Attaches an existing trigger (e.g. the default start trigger) to a host.
    pub fn attach_trigger(&mut self, trigger: &ElementRef, attach: &ElementRef) -> Result<(), BuildError> {
        let kind = if self.is(trigger, "StartTrigger") {
            TriggerKind::Start
        } else if self.is(trigger, "StopTrigger") {
            TriggerKind::Stop
        } else {
            return Err(BuildError::UnknownElementRef(trigger.name.to_string()));
        };
        let prop = self.attach_property(kind, attach)?;
        self.link(&attach.name, prop, &trigger.name)
    }

    fn attach_property(&self, kind: TriggerKind, attach: &ElementRef) -> Result<&'static str, BuildError> {
        let host_ok = self.onto.individual(&attach.name).map(|i| i.origin) == Some(Origin::Scenario);
        let ok = host_ok
            && match kind {
                TriggerKind::Start => self.is(attach, "Act") || self.is(attach, "Event"),
                TriggerKind::Stop => self.is(attach, "Act") || self.is(attach, "Storyboard"),
            };
        if !ok {
            return Err(BuildError::BadAttachTarget {
                kind: kind.class_name(),
                target: attach.to_string(),
            });
        }
        Ok(match kind {
            TriggerKind::Start => "has_start_trigger",
            TriggerKind::Stop => "has_stop_trigger",
        })
    }

    // ---- environment ----

    pub fn new_environment(&mut self, spec: EnvironmentSpec) -> Result<ElementRef, BuildError> {
        check_environment(&spec)?;
        let env = self.create("Environment", None)?;
        let tod = match &spec.time_of_day {
            None => n(defaults::TIME_OF_DAY),
            Some(t) => {
                let tod = self.create("TimeOfDay", None)?;
                self.value(&tod.name, "date_time", Literal::String(t.date_time.clone()))?;
                self.value(&tod.name, "animation", Literal::Boolean(t.animation))?;
                tod.name
            }
        };
        let weather = match &spec.weather {
            None => n(defaults::WEATHER),
            Some(w) => {
                let weather = self.create("Weather", None)?;
                self.link(&weather.name, "has_cloud_state", &n(w.cloud_state.as_str()))?;
                let sun = self.create("Sun", None)?;
                self.value(&sun.name, "sun_azimuth", double("azimuth", w.sun.azimuth)?)?;
                self.value(&sun.name, "sun_elevation", double("elevation", w.sun.elevation)?)?;
                self.value(&sun.name, "sun_intensity", double("intensity", w.sun.intensity)?)?;
                let fog = self.create("Fog", None)?;
                self.value(&fog.name, "visual_range", double("visual range", w.visual_range)?)?;
                let precip = self.create("Precipitation", None)?;
                self.link(
                    &precip.name,
                    "has_precipitation_type",
                    &n(w.precipitation.kind.as_str()),
                )?;
                self.value(
                    &precip.name,
                    "precipitation_intensity",
                    double("precipitation intensity", w.precipitation.intensity)?,
                )?;
                self.link(&weather.name, "has_sun", &sun.name)?;
                self.link(&weather.name, "has_fog", &fog.name)?;
                self.link(&weather.name, "has_precipitation", &precip.name)?;
                weather.name
            }
        };
        let road = match spec.friction_scale_factor {
            None => n(defaults::ROAD_CONDITION),
            Some(f) => {
                let road = self.create("RoadCondition", None)?;
                self.value(&road.name, "friction_scale_factor", double("friction", f)?)?;
                road.name
            }
        };
        self.link(&env.name, "has_time_of_day", &tod)?;
        self.link(&env.name, "has_weather", &weather)?;
        self.link(&env.name, "has_road_condition", &road)?;
        Ok(env)
    }

    /// Environment change realized as an EnvironmentAction on a new Environment.
    pub fn change_weather(&mut self, spec: EnvironmentSpec) -> Result<ElementRef, BuildError> {
        let environment = self.new_environment(spec)?;
        self.new_action(ActionSpec::EnvironmentChange { environment })
    }

    // ---- corner cases ----

    pub fn set_corner_case(&mut self, level: &CornerCaseLevel) -> Result<ElementRef, BuildError> {
        // The schema hierarchy is the authority on valid pairs.
        if !self
            .onto
            .is_subclass_of(level.level().class_name(), level.layer().class_name())
        {
            return Err(InvalidPair {
                layer: level.layer(),
                level: level.level(),
            }
            .into());
        }
        let cc = self.create(level.level().class_name(), None)?;
        if !level.description().is_empty() {
            self.value(
                &cc.name,
                "corner_case_description",
                Literal::String(level.description().to_string()),
            )?;
        }
        let root = self.root.clone();
        self.link(&root, "has_corner_case", &cc.name)?;
        Ok(cc)
    }

    /// Validates the structure and returns the scenario ontology.
    pub fn finalize(self) -> Result<Ontology, ValidationError> {
        let violations = validate(&self.onto);
        if violations.is_empty() {
            Ok(self.onto)
        } else {
            Err(ValidationError { violations })
        }
    }
}

pub(crate) fn element_type_of(onto: &Ontology, name: &str) -> Option<StoryboardElementType> {
    [
        ("Story", StoryboardElementType::Story),
        ("Act", StoryboardElementType::Act),
        ("ManeuverGroup", StoryboardElementType::ManeuverGroup),
        ("Maneuver", StoryboardElementType::Maneuver),
        ("Event", StoryboardElementType::Event),
        ("Action", StoryboardElementType::Action),
    ]
    .into_iter()
    .find(|(c, _)| onto.is_instance_of(name, c))
    .map(|(_, t)| t)
}

fn check_environment(spec: &EnvironmentSpec) -> Result<(), BuildError> {
    let range = |msg: &str| Err(BuildError::RangeError(msg.to_string()));
    if let Some(t) = &spec.time_of_day {
        if !is_date_time(&t.date_time) {
            return range("time of day must be YYYY-MM-DDThh:mm:ss");
        }
    }
    if let Some(w) = &spec.weather {
        if !(w.visual_range.is_finite() && w.visual_range > 0.0) {
            return range("visual range must be > 0");
        }
        let p = w.precipitation.intensity;
        if !(0.0..=1.0).contains(&p) {
            return range("precipitation intensity must be in [0, 1]");
        }
        if !(w.sun.intensity.is_finite() && w.sun.intensity >= 0.0) {
            return range("sun intensity must be >= 0");
        }
        if !(w.sun.azimuth.is_finite() && w.sun.elevation.is_finite()) {
            return range("sun angles must be finite");
        }
    }
    if let Some(f) = spec.friction_scale_factor {
        if !(f.is_finite() && f >= 0.0) {
            return range("friction scale factor must be >= 0");
        }
    }
    Ok(())
}

/// `YYYY-MM-DDThh:mm:ss` with plausible field ranges.
pub(crate) fn is_date_time(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 19 {
        return false;
    }
    let digits = |r: std::ops::Range<usize>| b[r.clone()].iter().all(u8::is_ascii_digit);
    let num = |r: std::ops::Range<usize>| s[r].parse::<u32>().unwrap_or(u32::MAX);
    digits(0..4)
        && b[4] == b'-'
        && digits(5..7)
        && b[7] == b'-'
        && digits(8..10)
        && b[10] == b'T'
        && digits(11..13)
        && b[13] == b':'
        && digits(14..16)
        && b[16] == b':'
        && digits(17..19)
        && (1..=12).contains(&num(5..7))
        && (1..=31).contains(&num(8..10))
        && num(11..13) < 24
        && num(14..16) < 60
        && num(17..19) < 60
}
