//! Content models for the supported OpenSCENARIO 1.0 subset, mirroring the
//! XSD: element order, occurrence bounds, required attributes and simple
//! types (each of which also admits a `$parameter` reference).

use std::fmt;

use super::{Element, XoscDocument};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XoscViolation {
    /// Slash-separated element path, e.g. `OpenSCENARIO/Storyboard/Init`.
    pub path: String,
    pub detail: String,
}

impl fmt::Display for XoscViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.detail)
    }
}

#[derive(Clone, Copy)]
enum Simple {
    Str,
    Double,
    Boolean,
    DateTime,
    Int,
    UnsignedInt,
    UnsignedShort,
    Enum(&'static [&'static str]),
}

struct Term {
    names: &'static [&'static str],
    min: u32,
    max: u32,
}

const N: u32 = u32::MAX;

macro_rules! t {
    ($names:expr, $min:expr, $max:expr) => {
        Term {
            names: $names,
            min: $min,
            max: $max,
        }
    };
}

enum Content {
    Empty,
    Seq(&'static [Term]),
    All(&'static [Term]),
}

struct Model {
    attrs: &'static [(&'static str, Simple, bool)],
    content: Content,
}

use Content::{All, Empty, Seq};
use Simple::*;

const VEHICLE_CATEGORY: &[&str] = &[
    "bicycle",
    "bus",
    "car",
    "motorbike",
    "semitrailer",
    "trailer",
    "train",
    "tram",
    "truck",
    "van",
];
const PEDESTRIAN_CATEGORY: &[&str] = &["animal", "pedestrian", "wheelchair"];
pub const MISC_OBJECT_CATEGORY: &[&str] = &[
    "barrier",
    "building",
    "crosswalk",
    "gantry",
    "none",
    "obstacle",
    "parkingSpace",
    "patch",
    "pole",
    "railing",
    "roadMark",
    "soundBarrier",
    "streetLamp",
    "trafficIsland",
    "tree",
    "vegetation",
    "wind",
];
const PARAMETER_TYPE: &[&str] = &[
    "boolean",
    "dateTime",
    "double",
    "integer",
    "string",
    "unsignedInt",
    "unsignedShort",
];
const PRIORITY: &[&str] = &["overwrite", "parallel", "skip"];
const RULE: &[&str] = &["equalTo", "greaterThan", "lessThan"];
const CONDITION_EDGE: &[&str] = &["falling", "none", "rising", "risingOrFalling"];
const CLOUD_STATE: &[&str] = &["cloudy", "free", "overcast", "rainy", "skyOff"];
const PRECIPITATION_TYPE: &[&str] = &["dry", "rain", "snow"];
const DYNAMICS_SHAPE: &[&str] = &["cubic", "linear", "sinusoidal", "step"];
const DYNAMICS_DIMENSION: &[&str] = &["distance", "rate", "time"];
const RELATIVE_DISTANCE_TYPE: &[&str] = &["cartesianDistance", "lateral", "longitudinal"];
const TRIGGERING_RULE: &[&str] = &["all", "any"];
const ELEMENT_STATE: &[&str] = &[
    "completeState",
    "endTransition",
    "runningState",
    "skipTransition",
    "standbyState",
    "startTransition",
    "stopTransition",
];
const ELEMENT_TYPE: &[&str] = &["act", "action", "event", "maneuver", "maneuverGroup", "story"];

/// Maps an element name to the XSD type it has in the supported subset.
/// Element names are unambiguous within the subset; most share their
/// type's name.
fn type_of(element: &str) -> Option<&str> {
    Some(match element {
        "OpenSCENARIO" => "OpenScenario",
        "LogicFile" | "SceneGraphFile" => "File",
        "FrontAxle" | "RearAxle" | "AdditionalAxle" => "Axle",
        "StartTrigger" | "StopTrigger" => "Trigger",
        "Actions" => "InitActions",
        "SpeedActionDynamics" | "LaneChangeActionDynamics" => "TransitionDynamics",
        // type names that never appear as element names
        "OpenScenario" | "Axle" | "Trigger" | "InitActions" | "TransitionDynamics" => return None,
        other => other,
    })
}

fn model(ty: &str) -> Option<Model> {
    let m = |attrs, content| Some(Model { attrs, content });
    match ty {
        "OpenScenario" => m(
            &[],
            Seq(&[
                t!(&["FileHeader"], 1, 1),
                t!(&["ParameterDeclarations"], 0, 1),
                t!(&["CatalogLocations"], 1, 1),
                t!(&["RoadNetwork"], 1, 1),
                t!(&["Entities"], 1, 1),
                t!(&["Storyboard"], 1, 1),
            ]),
        ),
        "FileHeader" => m(
            &[
                ("author", Str, true),
                ("date", DateTime, true),
                ("description", Str, true),
                ("revMajor", UnsignedShort, true),
                ("revMinor", UnsignedShort, true),
            ],
            Empty,
        ),
        "ParameterDeclarations" => m(&[], Seq(&[t!(&["ParameterDeclaration"], 0, N)])),
        "ParameterDeclaration" => m(
            &[
                ("name", Str, true),
                ("parameterType", Enum(PARAMETER_TYPE), true),
                ("value", Str, true),
            ],
            Empty,
        ),
        "CatalogLocations" => m(&[], All(&[])),
        "RoadNetwork" => m(
            &[],
            Seq(&[t!(&["LogicFile"], 0, 1), t!(&["SceneGraphFile"], 0, 1)]),
        ),
        "File" => m(&[("filepath", Str, true)], Empty),
        "Entities" => m(&[], Seq(&[t!(&["ScenarioObject"], 0, N)])),
        "ScenarioObject" => m(
            &[("name", Str, true)],
            Seq(&[t!(&["Vehicle", "Pedestrian", "MiscObject"], 0, 1)]),
        ),
        "Vehicle" => m(
            &[
                ("name", Str, true),
                ("vehicleCategory", Enum(VEHICLE_CATEGORY), true),
            ],
            All(&[
                t!(&["ParameterDeclarations"], 0, 1),
                t!(&["BoundingBox"], 1, 1),
                t!(&["Performance"], 1, 1),
                t!(&["Axles"], 1, 1),
                t!(&["Properties"], 1, 1),
            ]),
        ),
        "Pedestrian" => m(
            &[
                ("mass", Double, true),
                ("model", Str, true),
                ("name", Str, true),
                ("pedestrianCategory", Enum(PEDESTRIAN_CATEGORY), true),
            ],
            All(&[
                t!(&["ParameterDeclarations"], 0, 1),
                t!(&["BoundingBox"], 1, 1),
                t!(&["Properties"], 1, 1),
            ]),
        ),
        "MiscObject" => m(
            &[
                ("mass", Double, true),
                ("miscObjectCategory", Enum(MISC_OBJECT_CATEGORY), true),
                ("name", Str, true),
            ],
            All(&[
                t!(&["ParameterDeclarations"], 0, 1),
                t!(&["BoundingBox"], 1, 1),
                t!(&["Properties"], 1, 1),
            ]),
        ),
        "BoundingBox" => m(&[], All(&[t!(&["Center"], 1, 1), t!(&["Dimensions"], 1, 1)])),
        "Center" => m(
            &[("x", Double, true), ("y", Double, true), ("z", Double, true)],
            Empty,
        ),
        "Dimensions" => m(
            &[
                ("height", Double, true),
                ("length", Double, true),
                ("width", Double, true),
            ],
            Empty,
        ),
        "Performance" => m(
            &[
                ("maxAcceleration", Double, true),
                ("maxDeceleration", Double, true),
                ("maxSpeed", Double, true),
            ],
            Empty,
        ),
        "Axles" => m(
            &[],
            Seq(&[
                t!(&["FrontAxle"], 1, 1),
                t!(&["RearAxle"], 1, 1),
                t!(&["AdditionalAxle"], 0, N),
            ]),
        ),
        "Axle" => m(
            &[
                ("maxSteering", Double, true),
                ("positionX", Double, true),
                ("positionZ", Double, true),
                ("trackWidth", Double, true),
                ("wheelDiameter", Double, true),
            ],
            Empty,
        ),
        "Properties" => m(&[], Seq(&[t!(&["Property"], 0, N), t!(&["File"], 0, N)])),
        "Property" => m(&[("name", Str, true), ("value", Str, true)], Empty),
        "Storyboard" => m(
            &[],
            Seq(&[
                t!(&["Init"], 1, 1),
                t!(&["Story"], 1, N),
                t!(&["StopTrigger"], 1, 1),
            ]),
        ),
        "Init" => m(&[], Seq(&[t!(&["Actions"], 1, 1)])),
        "InitActions" => m(&[], Seq(&[t!(&["GlobalAction"], 0, N), t!(&["Private"], 0, N)])),
        "Private" => m(&[("entityRef", Str, true)], Seq(&[t!(&["PrivateAction"], 1, N)])),
        "PrivateAction" => m(
            &[],
            Seq(&[t!(
                &["LongitudinalAction", "LateralAction", "TeleportAction"],
                0,
                1
            )]),
        ),
        "GlobalAction" => m(&[], Seq(&[t!(&["EnvironmentAction"], 0, 1)])),
        "EnvironmentAction" => m(&[], Seq(&[t!(&["Environment"], 0, 1)])),
        "Environment" => m(
            &[("name", Str, true)],
            All(&[
                t!(&["ParameterDeclarations"], 0, 1),
                t!(&["TimeOfDay"], 1, 1),
                t!(&["Weather"], 1, 1),
                t!(&["RoadCondition"], 1, 1),
            ]),
        ),
        "TimeOfDay" => m(
            &[("animation", Boolean, true), ("dateTime", DateTime, true)],
            Empty,
        ),
        "Weather" => m(
            &[("cloudState", Enum(CLOUD_STATE), true)],
            All(&[
                t!(&["Sun"], 1, 1),
                t!(&["Fog"], 1, 1),
                t!(&["Precipitation"], 1, 1),
            ]),
        ),
        "Sun" => m(
            &[
                ("azimuth", Double, true),
                ("elevation", Double, true),
                ("intensity", Double, true),
            ],
            Empty,
        ),
        "Fog" => m(
            &[("visualRange", Double, true)],
            All(&[t!(&["BoundingBox"], 0, 1)]),
        ),
        "Precipitation" => m(
            &[
                ("intensity", Double, true),
                ("precipitationType", Enum(PRECIPITATION_TYPE), true),
            ],
            Empty,
        ),
        "RoadCondition" => m(
            &[("frictionScaleFactor", Double, true)],
            Seq(&[t!(&["Properties"], 0, 1)]),
        ),
        "TeleportAction" => m(&[], Seq(&[t!(&["Position"], 1, 1)])),
        "Position" => m(
            &[],
            Seq(&[t!(&["WorldPosition", "RelativeObjectPosition"], 0, 1)]),
        ),
        "WorldPosition" => m(
            &[
                ("h", Double, false),
                ("p", Double, false),
                ("r", Double, false),
                ("x", Double, true),
                ("y", Double, true),
                ("z", Double, false),
            ],
            Empty,
        ),
        "RelativeObjectPosition" => m(
            &[
                ("dx", Double, true),
                ("dy", Double, true),
                ("dz", Double, false),
                ("entityRef", Str, true),
            ],
            All(&[]),
        ),
        "LongitudinalAction" => m(&[], Seq(&[t!(&["SpeedAction"], 0, 1)])),
        "SpeedAction" => m(
            &[],
            All(&[
                t!(&["SpeedActionDynamics"], 1, 1),
                t!(&["SpeedActionTarget"], 1, 1),
            ]),
        ),
        "TransitionDynamics" => m(
            &[
                ("dynamicsDimension", Enum(DYNAMICS_DIMENSION), true),
                ("dynamicsShape", Enum(DYNAMICS_SHAPE), true),
                ("value", Double, true),
            ],
            Empty,
        ),
        "SpeedActionTarget" => m(&[], Seq(&[t!(&["AbsoluteTargetSpeed"], 0, 1)])),
        "AbsoluteTargetSpeed" => m(&[("value", Double, true)], Empty),
        "LateralAction" => m(&[], Seq(&[t!(&["LaneChangeAction"], 0, 1)])),
        "LaneChangeAction" => m(
            &[("targetLaneOffset", Double, false)],
            All(&[
                t!(&["LaneChangeActionDynamics"], 1, 1),
                t!(&["LaneChangeTarget"], 1, 1),
            ]),
        ),
        "LaneChangeTarget" => m(&[], Seq(&[t!(&["RelativeTargetLane"], 0, 1)])),
        "RelativeTargetLane" => m(&[("entityRef", Str, true), ("value", Int, true)], Empty),
        "Story" => m(
            &[("name", Str, true)],
            Seq(&[t!(&["ParameterDeclarations"], 0, 1), t!(&["Act"], 1, N)]),
        ),
        "Act" => m(
            &[("name", Str, true)],
            Seq(&[
                t!(&["ManeuverGroup"], 1, N),
                t!(&["StartTrigger"], 1, 1),
                t!(&["StopTrigger"], 0, 1),
            ]),
        ),
        "ManeuverGroup" => m(
            &[("maximumExecutionCount", UnsignedInt, true), ("name", Str, true)],
            Seq(&[t!(&["Actors"], 1, 1), t!(&["Maneuver"], 0, N)]),
        ),
        "Actors" => m(
            &[("selectTriggeringEntities", Boolean, true)],
            Seq(&[t!(&["EntityRef"], 0, N)]),
        ),
        "EntityRef" => m(&[("entityRef", Str, true)], Empty),
        "Maneuver" => m(
            &[("name", Str, true)],
            Seq(&[t!(&["ParameterDeclarations"], 0, 1), t!(&["Event"], 1, N)]),
        ),
        "Event" => m(
            &[
                ("maximumExecutionCount", UnsignedInt, false),
                ("name", Str, true),
                ("priority", Enum(PRIORITY), true),
            ],
            Seq(&[t!(&["Action"], 1, N), t!(&["StartTrigger"], 1, 1)]),
        ),
        "Action" => m(
            &[("name", Str, true)],
            Seq(&[t!(&["GlobalAction", "PrivateAction"], 0, 1)]),
        ),
        "Trigger" => m(&[], Seq(&[t!(&["ConditionGroup"], 0, N)])),
        "ConditionGroup" => m(&[], Seq(&[t!(&["Condition"], 1, N)])),
        "Condition" => m(
            &[
                ("conditionEdge", Enum(CONDITION_EDGE), true),
                ("delay", Double, true),
                ("name", Str, true),
            ],
            Seq(&[t!(&["ByEntityCondition", "ByValueCondition"], 0, 1)]),
        ),
        "ByValueCondition" => m(
            &[],
            Seq(&[t!(
                &["SimulationTimeCondition", "StoryboardElementStateCondition"],
                0,
                1
            )]),
        ),
        "ByEntityCondition" => m(
            &[],
            All(&[t!(&["TriggeringEntities"], 1, 1), t!(&["EntityCondition"], 1, 1)]),
        ),
        "TriggeringEntities" => m(
            &[("triggeringEntitiesRule", Enum(TRIGGERING_RULE), true)],
            Seq(&[t!(&["EntityRef"], 1, N)]),
        ),
        "EntityCondition" => m(
            &[],
            Seq(&[t!(
                &["TraveledDistanceCondition", "RelativeDistanceCondition"],
                0,
                1
            )]),
        ),
        "SimulationTimeCondition" => m(&[("rule", Enum(RULE), true), ("value", Double, true)], Empty),
        "StoryboardElementStateCondition" => m(
            &[
                ("state", Enum(ELEMENT_STATE), true),
                ("storyboardElementRef", Str, true),
                ("storyboardElementType", Enum(ELEMENT_TYPE), true),
            ],
            Empty,
        ),
        "TraveledDistanceCondition" => m(&[("value", Double, true)], Empty),
        "RelativeDistanceCondition" => m(
            &[
                ("entityRef", Str, true),
                ("freespace", Boolean, true),
                ("relativeDistanceType", Enum(RELATIVE_DISTANCE_TYPE), true),
                ("rule", Enum(RULE), true),
                ("value", Double, true),
            ],
            Empty,
        ),
        _ => None,
    }
}

/// Checks the document against the supported subset of the OpenSCENARIO 1.0
/// schema. An empty result means the document is schema-valid.
pub fn validate_xosc(doc: &XoscDocument) -> Vec<XoscViolation> {
    let mut out = Vec::new();
    if doc.root.name != "OpenSCENARIO" {
        out.push(XoscViolation {
            path: doc.root.name.clone(),
            detail: "root element must be OpenSCENARIO".into(),
        });
        return out;
    }
    check(&doc.root, "OpenSCENARIO", &mut out);
    out
}

fn check(el: &Element, path: &str, out: &mut Vec<XoscViolation>) {
    let mut report = |detail: String| {
        out.push(XoscViolation {
            path: path.to_string(),
            detail,
        })
    };
    let Some(model) = type_of(&el.name).and_then(model) else {
        report(format!("unsupported element <{}>", el.name));
        return;
    };
    for (key, value) in &el.attrs {
        match model.attrs.iter().find(|(k, _, _)| k == key) {
            None => report(format!("unexpected attribute {key}")),
            Some((_, ty, _)) => {
                if !simple_ok(*ty, value) {
                    report(format!(
                        "attribute {key}={value:?} is not a valid {}",
                        simple_name(*ty)
                    ));
                }
            }
        }
    }
    for (key, _, required) in model.attrs {
        if *required && el.get(key).is_none() {
            report(format!("missing required attribute {key}"));
        }
    }
    let names: Vec<&str> = el.children.iter().map(|c| c.name.as_str()).collect();
    if let Err(detail) = match_content(&model.content, &names) {
        report(detail);
        return;
    }
    for c in &el.children {
        check(c, &format!("{path}/{}", c.name), out);
    }
}

fn match_content(content: &Content, names: &[&str]) -> Result<(), String> {
    match content {
        Empty => match names.first() {
            None => Ok(()),
            Some(n) => Err(format!("unexpected child <{n}>")),
        },
        Seq(terms) => {
            let mut i = 0;
            for term in terms.iter() {
                let mut seen = 0u32;
                while i < names.len() && seen < term.max && term.names.contains(&names[i]) {
                    i += 1;
                    seen += 1;
                }
                if seen < term.min {
                    return Err(match names.get(i) {
                        Some(n) => format!("expected <{}> but found <{n}>", term.names.join("|")),
                        None => format!("missing child <{}>", term.names.join("|")),
                    });
                }
            }
            match names.get(i) {
                None => Ok(()),
                Some(n) => Err(format!("unexpected child <{n}>")),
            }
        }
        All(terms) => {
            for n in names {
                if !terms.iter().any(|t| t.names.contains(n)) {
                    return Err(format!("unexpected child <{n}>"));
                }
            }
            for term in terms.iter() {
                let seen = names.iter().filter(|n| term.names.contains(n)).count() as u32;
                if seen < term.min {
                    return Err(format!("missing child <{}>", term.names.join("|")));
                }
                if seen > term.max {
                    return Err(format!("too many <{}> children", term.names.join("|")));
                }
            }
            Ok(())
        }
    }
}

fn simple_name(ty: Simple) -> &'static str {
    match ty {
        Str => "string",
        Double => "double",
        Boolean => "boolean",
        DateTime => "dateTime",
        Int => "int",
        UnsignedInt => "unsignedInt",
        UnsignedShort => "unsignedShort",
        Enum(_) => "enumeration value",
    }
}

fn is_parameter_ref(v: &str) -> bool {
    let mut chars = v.chars();
    chars.next() == Some('$')
        && chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn simple_ok(ty: Simple, raw: &str) -> bool {
    if let Str = ty {
        return true;
    }
    if is_parameter_ref(raw) {
        return true;
    }
    // XSD collapses whitespace for every non-string type here.
    let v = raw.trim_matches(|c| c == ' ' || c == '\t' || c == '\n' || c == '\r');
    match ty {
        Str => true,
        Double => is_xsd_double(v),
        Boolean => matches!(v, "true" | "false" | "1" | "0"),
        DateTime => is_xsd_date_time(v),
        Int => integer_in(v, i32::MIN as i128, i32::MAX as i128),
        UnsignedInt => integer_in(v, 0, u32::MAX as i128),
        UnsignedShort => integer_in(v, 0, u16::MAX as i128),
        Enum(values) => values.contains(&raw),
    }
}

fn integer_in(v: &str, lo: i128, hi: i128) -> bool {
    let digits = v.strip_prefix(['+', '-']).unwrap_or(v);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    let trimmed = digits.trim_start_matches('0');
    if trimmed.len() > 20 {
        return false;
    }
    let mag: i128 = if trimmed.is_empty() {
        0
    } else {
        trimmed.parse().unwrap_or(i128::MAX)
    };
    let n = if v.starts_with('-') { -mag } else { mag };
    (lo..=hi).contains(&n)
}

fn is_xsd_double(v: &str) -> bool {
    if matches!(v, "INF" | "+INF" | "-INF" | "NaN") {
        return true;
    }
    let body = v.strip_prefix(['+', '-']).unwrap_or(v);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((a, b)) => {
            (!a.is_empty() || !b.is_empty())
                && a.bytes().all(|c| c.is_ascii_digit())
                && b.bytes().all(|c| c.is_ascii_digit())
        }
        None => !mantissa.is_empty() && mantissa.bytes().all(|c| c.is_ascii_digit()),
    };
    let exponent_ok = match exponent {
        None => true,
        Some(e) => {
            let d = e.strip_prefix(['+', '-']).unwrap_or(e);
            !d.is_empty() && d.bytes().all(|c| c.is_ascii_digit())
        }
    };
    mantissa_ok && exponent_ok
}

fn is_xsd_date_time(v: &str) -> bool {
    let v = v.strip_prefix('-').unwrap_or(v);
    let Some((date, time)) = v.split_once('T') else {
        return false;
    };
    let mut dp = date.split('-');
    let (Some(y), Some(mo), Some(d), None) = (dp.next(), dp.next(), dp.next(), dp.next()) else {
        return false;
    };
    let digits = |s: &str, n: usize| s.len() == n && s.bytes().all(|b| b.is_ascii_digit());
    if !(y.len() >= 4 && y.bytes().all(|b| b.is_ascii_digit()) && digits(mo, 2) && digits(d, 2)) {
        return false;
    }
    if y.len() > 4 && y.starts_with('0') {
        return false;
    }
    let year: i64 = y.parse().unwrap_or(0);
    let month: u32 = mo.parse().unwrap_or(0);
    let day: u32 = d.parse().unwrap_or(0);
    if year == 0 || !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
        return false;
    }
    let (clock, tz) = split_zone(time);
    if let Some(tz) = tz {
        if tz != "Z" {
            let (sign_ok, rest) = (tz.starts_with(['+', '-']), &tz[1..]);
            let Some((hh, mm)) = rest.split_once(':') else {
                return false;
            };
            if !(sign_ok && digits(hh, 2) && digits(mm, 2)) {
                return false;
            }
            let (h, m): (u32, u32) = (hh.parse().unwrap_or(99), mm.parse().unwrap_or(99));
            if m > 59 || h > 14 || (h == 14 && m != 0) {
                return false;
            }
        }
    }
    let (hms, frac) = match clock.split_once('.') {
        Some((a, b)) => (a, Some(b)),
        None => (clock, None),
    };
    if let Some(f) = frac {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    let mut tp = hms.split(':');
    let (Some(h), Some(mi), Some(s), None) = (tp.next(), tp.next(), tp.next(), tp.next()) else {
        return false;
    };
    if !(digits(h, 2) && digits(mi, 2) && digits(s, 2)) {
        return false;
    }
    let (h, mi, s): (u32, u32, u32) = (
        h.parse().unwrap_or(99),
        mi.parse().unwrap_or(99),
        s.parse().unwrap_or(99),
    );
    let frac_zero = frac.is_none_or(|f| f.bytes().all(|b| b == b'0'));
    (h < 24 && mi < 60 && s < 60) || (h == 24 && mi == 0 && s == 0 && frac_zero)
}

fn split_zone(time: &str) -> (&str, Option<&str>) {
    if let Some(c) = time.strip_suffix('Z') {
        return (c, Some("Z"));
    }
    match time.rfind(['+', '-']) {
        Some(i) => (&time[..i], Some(&time[i..])),
        None => (time, None),
    }
}

fn days_in_month(year: i64, month: u32) -> u32 {
    match month {
        4 | 6 | 9 | 11 => 30,
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        2 => 28,
        _ => 31,
    }
}
