//! The ten reference corner-case scenarios.
//!
//! All scenarios run on the Town04 highway. Positions are world coordinates in
//! meters, headings in radians, speeds in m/s.

use thiserror::Error;

use crate::builder::{
    ActionSpec, BuildError, ConditionSpec, ElementRef, EntityKind, EnvironmentSpec, PrecipitationSpec,
    ScenarioHandle, SunSpec, TimeOfDaySpec, TransitionDynamics, TriggerKind, ValidationError, WeatherSpec,
};
use crate::fusion::{self, FusionError};
use crate::master::vocab::{
    CloudState, DynamicsDimension, DynamicsShape, PrecipitationType, Priority, RelativeDistanceType, Rule,
    StoryboardElementState,
};
use crate::master::{CornerCaseLevel, Layer, Level};
use crate::ontology::Ontology;

pub const TOWN: &str = "Town04";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub id: &'static str,
    pub title: &'static str,
    pub corner_cases: Vec<CornerCaseLevel>,
    /// Ids of the entries this one fuses, empty for directly built entries.
    pub fused_from: &'static [&'static str],
    /// Whether the entry ships a dead-pixel directive for post-processing.
    pub sensor_effect: bool,
}

fn tag(layer: Layer, level: Level, description: &str) -> CornerCaseLevel {
    CornerCaseLevel::new(layer, level, description).expect("catalog tags are valid pairs")
}

const TITLES: [(&str, &str); 10] = [
    ("a", "Dead Pixel"),
    ("b", "Domain Shift: Sudden weather change"),
    ("c", "Single-Point Anomaly: Unknown object on the road"),
    ("d", "Collective Anomaly: Multiple known objects on the road"),
    ("e", "Contextual Anomaly: Known non-road object on the road"),
    ("f", "Novel Scenario: Unexpected event in another lane"),
    ("g", "Risky Scenario: A risky maneuver"),
    (
        "h",
        "Anomalous Scenario: Unexpected traffic participant behaviour",
    ),
    ("i", "Combined: Collective and Novel Scenario"),
    ("j", "Combined: Novel and Anomalous Scenario"),
];

fn own_tag(id: &str) -> Option<CornerCaseLevel> {
    Some(match id {
        "a" => tag(Layer::Sensor, Level::Hardware, "Dead pixels on the front camera"),
        "b" => tag(Layer::Content, Level::Domain, "Sudden weather change: dense fog"),
        "c" => tag(
            Layer::Content,
            Level::Object,
            "Falling vending machine on the road",
        ),
        "d" => tag(
            Layer::Content,
            Level::Scene,
            "Many running pedestrians in front of the ego vehicle",
        ),
        "e" => tag(
            Layer::Content,
            Level::Scene,
            "Traffic signs falling onto the road",
        ),
        "f" => tag(
            Layer::Temporal,
            Level::Scenario,
            "Cyclist maneuvering in the opposite lane",
        ),
        "g" => tag(
            Layer::Temporal,
            Level::Scenario,
            "Close cut-in in front of the ego vehicle",
        ),
        "h" => tag(
            Layer::Temporal,
            Level::Scenario,
            "Pedestrian suddenly runs in front of the ego vehicle",
        ),
        _ => return None,
    })
}

pub fn entries() -> Vec<Entry> {
    TITLES
        .iter()
        .map(|&(id, title)| {
            let fused_from: &'static [&'static str] = match id {
                "i" => &["d", "f"],
                "j" => &["f", "h"],
                _ => &[],
            };
            let corner_cases = if fused_from.is_empty() {
                own_tag(id).into_iter().collect()
            } else {
                fused_from.iter().filter_map(|s| own_tag(s)).collect()
            };
            Entry {
                id,
                title,
                corner_cases,
                fused_from,
                sensor_effect: id == "a",
            }
        })
        .collect()
}

pub fn entry(id: &str) -> Option<Entry> {
    entries().into_iter().find(|e| e.id == id)
}

/// Builds and finalizes an entry.
pub fn build(id: &str) -> Result<Ontology, CatalogError> {
    let e = entry(id).ok_or_else(|| CatalogError::UnknownEntry(id.to_string()))?;
    if !e.fused_from.is_empty() {
        let inputs = e
            .fused_from
            .iter()
            .map(|s| build(s))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(fusion::fuse(&inputs)?.0);
    }
    let tag = own_tag(id).expect("direct entries carry a tag");
    let h = match id {
        "a" => dead_pixel(tag)?,
        "b" => fog(tag)?,
        "c" => vending_machine(tag)?,
        "d" => running_pedestrians(tag)?,
        "e" => traffic_signs(tag)?,
        "f" => cyclist(tag)?,
        "g" => cut_in(tag)?,
        "h" => pedestrian_runs(tag)?,
        _ => unreachable!("all direct entries handled"),
    };
    Ok(h.finalize()?)
}

/// Dead-pixel directive applied to frames captured from entry (a):
/// a short diagonal streak and a small cluster on an 800x600 camera image.
pub fn dead_pixel_directive() -> String {
    let mut out = String::from("DEADPIXELS/1\nsize 800 600\nfill 0 0 0\n");
    for i in 0..8 {
        out.push_str(&format!("px {} {}\n", 200 + i, 150 + i));
    }
    for (x, y) in [(611, 402), (612, 402), (611, 403), (612, 403)] {
        out.push_str(&format!("px {x} {y}\n"));
    }
    out
}

/// Elements shared by every directly built scenario.
struct Base {
    h: ScenarioHandle,
    ego: ElementRef,
    /// Step dynamics, reused by speed changes that should be instantaneous.
    step: ElementRef,
    storyboard: ElementRef,
    act: ElementRef,
}

// Ego start on the Town04 highway, driving along -y.
const EGO_X: f64 = 13.5;
const EGO_Y: f64 = 190.0;
const EGO_HEADING: f64 = -std::f64::consts::FRAC_PI_2;

/// Scenario root, ego with teleport and speed in Init, default weather,
/// one Story with one Act (simulation start), a storyboard stop after
/// `duration` seconds, and the corner-case tag. 13 new individuals.
fn base(tag: &CornerCaseLevel, ego_speed: f64, duration: f64) -> Result<Base, BuildError> {
    let mut h = ScenarioHandle::new_scenario(TOWN)?;
    h.set_description(tag.description())?;
    let ego = h.new_entity(EntityKind::EgoVehicle, None)?;
    let step = h.new_transition_dynamics(TransitionDynamics {
        shape: DynamicsShape::Step,
        dimension: DynamicsDimension::Time,
        value: 0.0,
    })?;
    let teleport = h.new_action(ActionSpec::TeleportWithPosition {
        entity: ego.clone(),
        x: EGO_X,
        y: EGO_Y,
        z: 0.3,
        heading: EGO_HEADING,
    })?;
    let speed = h.new_action(ActionSpec::Speed {
        entity: ego.clone(),
        target: ego_speed,
        dynamics: step.clone(),
    })?;
    let storyboard = h.new_storyboard()?;
    let env = h.default_environment_action();
    h.new_init(&storyboard, &[teleport, speed, env])?;
    let story = h.new_story(&storyboard)?;
    let act = h.new_act(&story)?;
    let start = h.default_start_trigger();
    h.attach_trigger(&start, &act)?;
    let end = h.new_condition(ConditionSpec::SimulationTime {
        value: duration,
        rule: Rule::GreaterThan,
    })?;
    h.new_trigger(TriggerKind::Stop, &[end], &storyboard, None)?;
    h.set_corner_case(tag)?;
    Ok(Base {
        h,
        ego,
        step,
        storyboard,
        act,
    })
}

impl Base {
    fn group(&mut self, actors: &[ElementRef]) -> Result<ElementRef, BuildError> {
        let act = self.act.clone();
        let mg = self.h.new_maneuver_group(&act, actors)?;
        self.h.new_maneuver(&mg)
    }

    fn event(&mut self, maneuver: &ElementRef, actions: &[ElementRef]) -> Result<ElementRef, BuildError> {
        let ev = self.h.new_event(maneuver, Priority::Overwrite)?;
        for a in actions {
            self.h.wrap_action(&ev, a)?;
        }
        Ok(ev)
    }

    fn start_when(
        &mut self,
        host: &ElementRef,
        conditions: &[ElementRef],
        label: Option<&str>,
    ) -> Result<(), BuildError> {
        self.h.new_trigger(TriggerKind::Start, conditions, host, label)?;
        Ok(())
    }

    fn near(
        &mut self,
        entity: &ElementRef,
        reference: &ElementRef,
        meters: f64,
    ) -> Result<ElementRef, BuildError> {
        self.h.new_condition(ConditionSpec::RelativeDistance {
            entity: entity.clone(),
            reference: reference.clone(),
            value: meters,
            rule: Rule::LessThan,
            distance_type: RelativeDistanceType::Longitudinal,
            freespace: false,
        })
    }

    fn place(&mut self, entity: &ElementRef, dx: f64, dy: f64, dz: f64) -> Result<ElementRef, BuildError> {
        let ego = self.ego.clone();
        self.h.new_action(ActionSpec::TeleportRelative {
            entity: entity.clone(),
            reference: ego,
            dx,
            dy,
            dz,
        })
    }

    fn speed(
        &mut self,
        entity: &ElementRef,
        target: f64,
        dynamics: &ElementRef,
    ) -> Result<ElementRef, BuildError> {
        self.h.new_action(ActionSpec::Speed {
            entity: entity.clone(),
            target,
            dynamics: dynamics.clone(),
        })
    }

    fn init_action(&mut self, action: &ElementRef) -> Result<(), BuildError> {
        let sb = self.storyboard.name.clone();
        let init = self.h.ontology().objects(&sb, "has_init")[0].clone();
        let init = self.h.element(&init).expect("init exists");
        self.h.add_init_action(&init, action)
    }

    fn stop_act_after(&mut self, seconds: f64) -> Result<(), BuildError> {
        let c = self.h.new_condition(ConditionSpec::SimulationTime {
            value: seconds,
            rule: Rule::GreaterThan,
        })?;
        let act = self.act.clone();
        self.h.new_trigger(TriggerKind::Stop, &[c], &act, None)?;
        Ok(())
    }
}

/// (a) A plain drive; the corner case is added to captured frames afterwards.
fn dead_pixel(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 13.9, 20.0)?;
    let ego = b.ego.clone();
    let m = b.group(std::slice::from_ref(&ego))?;
    let step = b.step.clone();
    let faster = b.speed(&ego, 19.4, &step)?;
    let ev = b.event(&m, &[faster])?;
    let c = b.h.new_condition(ConditionSpec::SimulationTime {
        value: 5.0,
        rule: Rule::GreaterThan,
    })?;
    b.start_when(&ev, &[c], None)?;
    Ok(b.h)
}

/// (b) After 50 m the ego drives into dense fog (10 m visual range).
fn fog(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 13.9, 30.0)?;
    let ego = b.ego.clone();
    let m = b.group(std::slice::from_ref(&ego))?;
    let env = b.h.new_environment(EnvironmentSpec {
        time_of_day: Some(TimeOfDaySpec {
            date_time: "2022-06-01T10:00:00".into(),
            animation: false,
        }),
        weather: Some(WeatherSpec {
            cloud_state: CloudState::Overcast,
            sun: SunSpec {
                azimuth: 0.0,
                elevation: 0.5,
                intensity: 20000.0,
            },
            visual_range: 10.0,
            precipitation: PrecipitationSpec {
                kind: PrecipitationType::Dry,
                intensity: 0.0,
            },
        }),
        friction_scale_factor: Some(1.0),
    })?;
    let fog_action =
        b.h.new_action(ActionSpec::EnvironmentChange { environment: env })?;
    let ev = b.event(&m, &[fog_action])?;
    let dist = b.h.new_condition(ConditionSpec::TraveledDistance {
        entity: ego,
        value: 50.0,
    })?;
    b.start_when(&ev, &[dist], Some("DistanceStartTrigger"))?;
    Ok(b.h)
}

/// (c) A vending machine beside the road is dropped onto the ego lane
/// 25 m ahead once the ego is within 40 m.
fn vending_machine(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 13.9, 25.0)?;
    let ego = b.ego.clone();
    let vm =
        b.h.new_entity(EntityKind::Misc, Some("static.prop.vendingmachine"))?;
    let beside = b.place(&vm, 60.0, 8.0, 0.0)?;
    b.init_action(&beside)?;
    let m = b.group(std::slice::from_ref(&vm))?;
    let drop = b.place(&vm, 25.0, 0.0, 3.0)?;
    let ev = b.event(&m, &[drop])?;
    let near = b.near(&ego, &vm, 40.0)?;
    b.start_when(&ev, &[near], None)?;
    b.stop_act_after(20.0)?;
    Ok(b.h)
}

/// (d) Fifteen pedestrians wait at the roadside and start running across
/// the road when the ego approaches.
fn running_pedestrians(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    const COUNT: usize = 15;
    let mut b = base(&tag, 11.1, 30.0)?;
    let ego = b.ego.clone();
    let models = [
        "walker.pedestrian.0001",
        "walker.pedestrian.0002",
        "walker.pedestrian.0003",
    ];
    let mut peds = Vec::new();
    for i in 0..COUNT {
        let p =
            b.h.new_entity(EntityKind::Pedestrian, Some(models[i % models.len()]))?;
        // Three rows of five, 1.5 m apart, on the right-hand sidewalk.
        let (row, col) = ((i / 5) as f64, (i % 5) as f64);
        let spot = b.place(&p, 45.0 + 1.5 * col, 6.0 + 1.2 * row, 0.0)?;
        b.init_action(&spot)?;
        peds.push(p);
    }
    let m = b.group(&peds)?;
    let run = b.h.new_transition_dynamics(TransitionDynamics {
        shape: DynamicsShape::Linear,
        dimension: DynamicsDimension::Time,
        value: 1.0,
    })?;
    let mut runs = Vec::new();
    for p in &peds {
        runs.push(b.speed(p, 3.5, &run)?);
    }
    let ev = b.event(&m, &runs)?;
    let near = b.near(&ego, &peds[0], 35.0)?;
    let settled = b.h.new_condition(ConditionSpec::SimulationTime {
        value: 2.0,
        rule: Rule::GreaterThan,
    })?;
    b.start_when(&ev, &[near, settled], None)?;
    b.stop_act_after(25.0)?;
    Ok(b.h)
}

/// (e) Four traffic signs at the roadside are blown onto the road.
fn traffic_signs(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 13.9, 25.0)?;
    let ego = b.ego.clone();
    let mut signs = Vec::new();
    for i in 0..4 {
        let s = b.h.new_entity(EntityKind::Misc, Some("static.prop.streetsign"))?;
        let spot = b.place(&s, 50.0 + 6.0 * i as f64, 7.5, 0.0)?;
        b.init_action(&spot)?;
        signs.push(s);
    }
    let m = b.group(&signs)?;
    let mut drops = Vec::new();
    for (i, s) in signs.iter().enumerate() {
        // Scattered over both lanes, dropped from 2 m.
        let lateral = [-1.5, 1.0, -3.5, 2.0][i];
        drops.push(b.place(s, 28.0 + 4.0 * i as f64, lateral, 2.0)?);
    }
    let ev = b.event(&m, &drops)?;
    let near = b.near(&ego, &signs[0], 40.0)?;
    b.start_when(&ev, &[near], None)?;
    b.stop_act_after(20.0)?;
    Ok(b.h)
}

/// (f) An oncoming cyclist in the opposite lane swerves towards the ego lane
/// and slows down abruptly.
fn cyclist(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 13.9, 25.0)?;
    let ego = b.ego.clone();
    let bike =
        b.h.new_entity(EntityKind::Bicycle, Some("vehicle.diamondback.century"))?;
    let spot = b.place(&bike, 80.0, -3.5, 0.0)?;
    b.init_action(&spot)?;
    let step = b.step.clone();
    let cruise = b.speed(&bike, 5.0, &step)?;
    b.init_action(&cruise)?;
    let m = b.group(std::slice::from_ref(&bike))?;
    let swerve = b.h.new_transition_dynamics(TransitionDynamics {
        shape: DynamicsShape::Sinusoidal,
        dimension: DynamicsDimension::Time,
        value: 1.5,
    })?;
    let lane = b.h.new_action(ActionSpec::RelativeLaneChange {
        entity: bike.clone(),
        reference: ego.clone(),
        lane_offset: 0,
        dynamics: swerve.clone(),
    })?;
    let brake = b.speed(&bike, 1.0, &swerve)?;
    let ev = b.event(&m, &[lane, brake])?;
    let near = b.near(&ego, &bike, 30.0)?;
    b.start_when(&ev, &[near], None)?;
    Ok(b.h)
}

/// (g) A faster car overtakes on the left and cuts in 5 m ahead of the ego,
/// then brakes; the ego brakes in response.
fn cut_in(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 13.9, 25.0)?;
    let ego = b.ego.clone();
    let car = b.h.new_entity(EntityKind::Car, Some("vehicle.audi.a2"))?;
    let spot = b.place(&car, -12.0, 3.5, 0.0)?;
    b.init_action(&spot)?;
    let step = b.step.clone();
    let fast = b.speed(&car, 19.4, &step)?;
    b.init_action(&fast)?;

    let m = b.group(std::slice::from_ref(&car))?;
    let change = b.h.new_transition_dynamics(TransitionDynamics {
        shape: DynamicsShape::Sinusoidal,
        dimension: DynamicsDimension::Time,
        value: 1.0,
    })?;
    let cut = b.h.new_action(ActionSpec::RelativeLaneChange {
        entity: car.clone(),
        reference: ego.clone(),
        lane_offset: 0,
        dynamics: change.clone(),
    })?;
    let cut_event = b.event(&m, &[cut])?;
    // 5.5 m/s faster from 12 m behind: about 5 m ahead after 60 m.
    let ahead = b.h.new_condition(ConditionSpec::TraveledDistance {
        entity: car.clone(),
        value: 60.0,
    })?;
    b.start_when(&cut_event, &[ahead], None)?;

    let slow = b.speed(&car, 8.0, &change)?;
    let brake_event = b.event(&m, &[slow])?;
    let done = b.h.new_condition(ConditionSpec::StoryboardElementState {
        element: cut_event,
        state: StoryboardElementState::EndTransition,
    })?;
    b.start_when(&brake_event, &[done], None)?;

    let em = b.group(std::slice::from_ref(&ego))?;
    let react = b.speed(&ego, 6.0, &step)?;
    let react_event = b.event(&em, &[react])?;
    let close = b.near(&ego, &car, 8.0)?;
    b.start_when(&react_event, &[close], None)?;
    Ok(b.h)
}

/// (h) A pedestrian waiting at the roadside runs onto the ego lane and stops
/// there.
fn pedestrian_runs(tag: CornerCaseLevel) -> Result<ScenarioHandle, BuildError> {
    let mut b = base(&tag, 11.1, 20.0)?;
    let ego = b.ego.clone();
    let ped =
        b.h.new_entity(EntityKind::Pedestrian, Some("walker.pedestrian.0002"))?;
    let spot = b.place(&ped, 40.0, 5.5, 0.0)?;
    b.init_action(&spot)?;
    let m = b.group(std::slice::from_ref(&ped))?;
    let step = b.step.clone();
    let run = b.speed(&ped, 4.0, &step)?;
    let run_event = b.event(&m, &[run])?;
    let near = b.near(&ego, &ped, 25.0)?;
    b.start_when(&run_event, &[near], None)?;

    let stop = b.speed(&ped, 0.0, &step)?;
    let stop_event = b.event(&m, &[stop])?;
    let walked = b.h.new_condition(ConditionSpec::TraveledDistance {
        entity: ped.clone(),
        value: 5.0,
    })?;
    b.start_when(&stop_event, &[walked], None)?;
    Ok(b.h)
}
