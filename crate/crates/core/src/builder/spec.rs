use std::fmt;

use crate::master::vocab::{
    CloudState, DynamicsDimension, DynamicsShape, PrecipitationType, Priority, RelativeDistanceType, Rule,
    StoryboardElementState,
};
use crate::ontology::Name;

/// A builder-created (or default) individual together with its class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementRef {
    pub name: Name,
    pub class: Name,
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name, self.class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructuralKind {
    Storyboard,
    Init,
    Story,
    Act,
    ManeuverGroup,
    Maneuver,
    Event,
    Action,
}

impl StructuralKind {
    pub const ALL: [StructuralKind; 8] = [
        StructuralKind::Storyboard,
        StructuralKind::Init,
        StructuralKind::Story,
        StructuralKind::Act,
        StructuralKind::ManeuverGroup,
        StructuralKind::Maneuver,
        StructuralKind::Event,
        StructuralKind::Action,
    ];

    pub fn class_name(self) -> &'static str {
        match self {
            StructuralKind::Storyboard => "Storyboard",
            StructuralKind::Init => "Init",
            StructuralKind::Story => "Story",
            StructuralKind::Act => "Act",
            StructuralKind::ManeuverGroup => "ManeuverGroup",
            StructuralKind::Maneuver => "Maneuver",
            StructuralKind::Event => "Event",
            StructuralKind::Action => "Action",
        }
    }

    /// Required parent class and the property linking parent to child.
    pub fn containment(self) -> (&'static str, &'static str) {
        match self {
            StructuralKind::Storyboard => ("Scenario", "has_storyboard"),
            StructuralKind::Init => ("Storyboard", "has_init"),
            StructuralKind::Story => ("Storyboard", "has_story"),
            StructuralKind::Act => ("Story", "has_act"),
            StructuralKind::ManeuverGroup => ("Act", "has_maneuver_group"),
            StructuralKind::Maneuver => ("ManeuverGroup", "has_maneuver"),
            StructuralKind::Event => ("Maneuver", "has_event"),
            StructuralKind::Action => ("Event", "has_action"),
        }
    }
}

impl fmt::Display for StructuralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.class_name())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Payload {
    #[default]
    None,
    /// Init actions (may be empty and extended later).
    Init(Vec<ElementRef>),
    ManeuverGroup {
        actors: Vec<ElementRef>,
        max_execution_count: i64,
    },
    Event {
        priority: Priority,
        max_execution_count: i64,
    },
    /// The concrete private or global action wrapped by an Action element.
    Action(ElementRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    EgoVehicle,
    Car,
    Pedestrian,
    Bicycle,
    Misc,
}

impl EntityKind {
    pub fn class_name(self) -> &'static str {
        match self {
            EntityKind::EgoVehicle => "EgoVehicle",
            EntityKind::Car => "Car",
            EntityKind::Pedestrian => "Pedestrian",
            EntityKind::Bicycle => "Bicycle",
            EntityKind::Misc => "Misc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionSpec {
    TeleportWithPosition {
        entity: ElementRef,
        x: f64,
        y: f64,
        z: f64,
        heading: f64,
    },
    /// Teleport relative to another object's position.
    TeleportRelative {
        entity: ElementRef,
        reference: ElementRef,
        dx: f64,
        dy: f64,
        dz: f64,
    },
    Speed {
        entity: ElementRef,
        target: f64,
        dynamics: ElementRef,
    },
    RelativeLaneChange {
        entity: ElementRef,
        reference: ElementRef,
        lane_offset: i64,
        dynamics: ElementRef,
    },
    EnvironmentChange {
        environment: ElementRef,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionSpec {
    SimulationTime {
        value: f64,
        rule: Rule,
    },
    TraveledDistance {
        entity: ElementRef,
        value: f64,
    },
    RelativeDistance {
        entity: ElementRef,
        reference: ElementRef,
        value: f64,
        rule: Rule,
        distance_type: RelativeDistanceType,
        freespace: bool,
    },
    /// The element type is derived from the referenced element's class.
    StoryboardElementState {
        element: ElementRef,
        state: StoryboardElementState,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerKind {
    Start,
    Stop,
}

impl TriggerKind {
    pub fn class_name(self) -> &'static str {
        match self {
            TriggerKind::Start => "StartTrigger",
            TriggerKind::Stop => "StopTrigger",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDynamics {
    pub shape: DynamicsShape,
    pub dimension: DynamicsDimension,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeOfDaySpec {
    /// `YYYY-MM-DDThh:mm:ss`
    pub date_time: String,
    pub animation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SunSpec {
    pub azimuth: f64,
    pub elevation: f64,
    pub intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecipitationSpec {
    pub kind: PrecipitationType,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSpec {
    pub cloud_state: CloudState,
    pub sun: SunSpec,
    pub visual_range: f64,
    pub precipitation: PrecipitationSpec,
}

/// Components left as `None` reuse the master's default individuals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvironmentSpec {
    pub time_of_day: Option<TimeOfDaySpec>,
    pub weather: Option<WeatherSpec>,
    pub friction_scale_factor: Option<f64>,
}
