//! Line-oriented scenario description files.
//!
//! Each non-blank line is one statement, `keyword [label] key=value ...`,
//! mapping to exactly one builder operation. Labels are file-local handles
//! for the elements a statement creates. `#` starts a comment. Values are
//! bare words, comma-separated lists of bare words, or double-quoted strings
//! with `\"` and `\\` escapes. The grammar is documented in `docs/scenario-format.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::builder::{
    ActionSpec, BuildError, ConditionSpec, ElementRef, EntityKind, EnvironmentSpec, Payload,
    PrecipitationSpec, ScenarioHandle, StructuralKind, SunSpec, TimeOfDaySpec, TransitionDynamics,
    TriggerKind, WeatherSpec,
};
use crate::master::{CornerCaseLevel, Layer, Level, Master};

/// Labels bound before the first statement runs.
pub const PREDEFINED_LABELS: [&str; 2] = ["default_start_trigger", "default_environment_action"];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {message}")]
pub struct DslError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Word(String),
    Quoted(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Word(w) => f.write_str(w),
            Value::Quoted(q) => write!(f, "{q:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub key: String,
    pub value: Value,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub line: usize,
    pub keyword: String,
    pub label: Option<(String, usize)>,
    pub params: Vec<Param>,
}

/// Splits the text into statements without interpreting them.
pub fn parse(text: &str) -> Result<Vec<Statement>, DslError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens = tokenize(raw, line)?;
        let mut tokens = tokens.into_iter();
        let Some((keyword, kw_col)) = tokens.next() else {
            continue;
        };
        let Tok::Bare(keyword) = keyword else {
            return Err(err(line, kw_col, "statement must start with a keyword"));
        };
        if keyword.contains('=') {
            return Err(err(line, kw_col, "statement must start with a keyword"));
        }
        let mut stmt = Statement {
            line,
            keyword,
            label: None,
            params: Vec::new(),
        };
        for (n, (tok, col)) in tokens.enumerate() {
            match tok {
                Tok::Bare(w) if !w.contains('=') => {
                    if n != 0 {
                        return Err(err(line, col, &format!("expected key=value, found `{w}`")));
                    }
                    if !is_label(&w) {
                        return Err(err(line, col, &format!("invalid label `{w}`")));
                    }
                    stmt.label = Some((w, col));
                }
                Tok::Bare(w) => {
                    let (key, value) = w.split_once('=').expect("checked above");
                    if key.is_empty() {
                        return Err(err(line, col, "missing key before `=`"));
                    }
                    if stmt.params.iter().any(|p| p.key == key) {
                        return Err(err(line, col, &format!("duplicate parameter `{key}`")));
                    }
                    stmt.params.push(Param {
                        key: key.to_string(),
                        value: Value::Word(value.to_string()),
                        column: col,
                    });
                }
                Tok::KeyQuoted(key, value) => {
                    if stmt.params.iter().any(|p| p.key == key) {
                        return Err(err(line, col, &format!("duplicate parameter `{key}`")));
                    }
                    stmt.params.push(Param {
                        key,
                        value: Value::Quoted(value),
                        column: col,
                    });
                }
            }
        }
        out.push(stmt);
    }
    Ok(out)
}

fn is_label(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|f| f.is_ascii_alphabetic() || f == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

fn err(line: usize, column: usize, message: &str) -> DslError {
    DslError {
        line,
        column,
        message: message.to_string(),
    }
}

enum Tok {
    Bare(String),
    KeyQuoted(String, String),
}

fn tokenize(raw: &str, line: usize) -> Result<Vec<(Tok, usize)>, DslError> {
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let start = i;
        let mut word = String::new();
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '"' && chars[i] != '#' {
            word.push(chars[i]);
            i += 1;
        }
        if i < chars.len() && chars[i] == '"' {
            let Some(key) = word.strip_suffix('=') else {
                return Err(err(line, i + 1, "quoted value must follow key="));
            };
            let open = i;
            i += 1;
            let mut value = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(line, open + 1, "unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('"' | '\\')) => {
                            value.push(e);
                            i += 2;
                        }
                        _ => return Err(err(line, i + 1, "unknown escape (only \\\" and \\\\)")),
                    },
                    Some(&ch) => {
                        value.push(ch);
                        i += 1;
                    }
                }
            }
            if i < chars.len() && !chars[i].is_whitespace() && chars[i] != '#' {
                return Err(err(line, i + 1, "expected whitespace after string"));
            }
            if key.is_empty() {
                return Err(err(line, start + 1, "missing key before `=`"));
            }
            out.push((Tok::KeyQuoted(key.to_string(), value), start + 1));
        } else {
            out.push((Tok::Bare(word), start + 1));
        }
    }
    Ok(out)
}

/// Parses and runs a description against the bundled master ontology.
pub fn compile(text: &str) -> Result<ScenarioHandle, DslError> {
    compile_with(text, crate::master::bundled())
}

/// Parses and runs a description. The handle is returned unfinalized.
pub fn compile_with(text: &str, master: &Master) -> Result<ScenarioHandle, DslError> {
    let statements = parse(text)?;
    let Some(first) = statements.first() else {
        return Err(err(1, 1, "empty scenario description"));
    };
    if first.keyword != "scenario" {
        return Err(err(first.line, 1, "the first statement must be `scenario`"));
    }
    let mut args = Args::new(first);
    args.no_label()?;
    let town = args.text("town")?;
    let description = args.opt_text("description")?;
    args.finish()?;
    let mut h = ScenarioHandle::from_master(master, &town).map_err(|e| build_err(first, e))?;
    if let Some(d) = description {
        h.set_description(&d).map_err(|e| build_err(first, e))?;
    }
    let mut labels: BTreeMap<String, ElementRef> = BTreeMap::new();
    labels.insert("default_start_trigger".into(), h.default_start_trigger());
    labels.insert(
        "default_environment_action".into(),
        h.default_environment_action(),
    );
    let mut run = Runner { h, labels };
    for s in &statements[1..] {
        run.statement(s)?;
    }
    Ok(run.h)
}

fn build_err(s: &Statement, e: BuildError) -> DslError {
    err(s.line, 1, &format!("{} failed: {e}", s.keyword))
}

/// Parameter access for one statement; unused parameters are an error.
struct Args<'s> {
    stmt: &'s Statement,
    used: BTreeSet<&'s str>,
}

impl<'s> Args<'s> {
    fn new(stmt: &'s Statement) -> Self {
        Args {
            stmt,
            used: BTreeSet::new(),
        }
    }

    fn here(&self, column: usize, message: String) -> DslError {
        err(self.stmt.line, column, &message)
    }

    fn no_label(&self) -> Result<(), DslError> {
        match &self.stmt.label {
            Some((l, col)) => Err(self.here(
                *col,
                format!("`{}` takes no label (found `{l}`)", self.stmt.keyword),
            )),
            None => Ok(()),
        }
    }

    fn get(&mut self, key: &str) -> Option<&'s Param> {
        let p = self.stmt.params.iter().find(|p| p.key == key)?;
        self.used.insert(p.key.as_str());
        Some(p)
    }

    fn req(&mut self, key: &str) -> Result<&'s Param, DslError> {
        self.get(key)
            .ok_or_else(|| self.here(1, format!("`{}` requires `{key}=`", self.stmt.keyword)))
    }

    fn text(&mut self, key: &str) -> Result<String, DslError> {
        Ok(match &self.req(key)?.value {
            Value::Word(w) | Value::Quoted(w) => w.clone(),
        })
    }

    fn opt_text(&mut self, key: &str) -> Result<Option<String>, DslError> {
        if self.get(key).is_none() {
            return Ok(None);
        }
        self.text(key).map(Some)
    }

    fn word(&mut self, key: &str) -> Result<(&'s str, usize), DslError> {
        let p = self.req(key)?;
        match &p.value {
            Value::Word(w) => Ok((w, p.column)),
            Value::Quoted(_) => Err(self.here(p.column, format!("`{key}` takes a bare word, not a string"))),
        }
    }

    fn parsed<T: FromStr>(&mut self, key: &str, what: &str) -> Result<T, DslError> {
        let (w, col) = self.word(key)?;
        w.parse()
            .map_err(|_| self.here(col, format!("`{key}` must be {what}, found `{w}`")))
    }

    fn opt_parsed<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>, DslError> {
        if self.get(key).is_none() {
            return Ok(None);
        }
        self.parsed(key, what).map(Some)
    }

    fn num(&mut self, key: &str) -> Result<f64, DslError> {
        let v: f64 = self.parsed(key, "a number")?;
        if !v.is_finite() {
            let col = self.req(key)?.column;
            return Err(self.here(col, format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    fn num_or(&mut self, key: &str, default: f64) -> Result<f64, DslError> {
        if self.get(key).is_none() {
            return Ok(default);
        }
        self.num(key)
    }

    fn list(&mut self, key: &str) -> Result<Vec<(&'s str, usize)>, DslError> {
        let (w, col) = self.word(key)?;
        if w.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut offset = col + key.len() + 1;
        for part in w.split(',') {
            if part.is_empty() {
                return Err(self.here(offset, format!("empty item in `{key}` list")));
            }
            out.push((part, offset));
            offset += part.len() + 1;
        }
        Ok(out)
    }

    fn finish(self) -> Result<(), DslError> {
        match self
            .stmt
            .params
            .iter()
            .find(|p| !self.used.contains(p.key.as_str()))
        {
            Some(p) => Err(self.here(
                p.column,
                format!("unknown parameter `{}` for `{}`", p.key, self.stmt.keyword),
            )),
            None => Ok(()),
        }
    }
}

struct Runner {
    h: ScenarioHandle,
    labels: BTreeMap<String, ElementRef>,
}

impl Runner {
    fn lookup(&self, s: &Statement, name: &str, column: usize) -> Result<ElementRef, DslError> {
        self.labels
            .get(name)
            .cloned()
            .ok_or_else(|| err(s.line, column, &format!("unknown label `{name}`")))
    }

    fn reference(&self, a: &mut Args, key: &str) -> Result<ElementRef, DslError> {
        let (w, col) = a.word(key)?;
        self.lookup(a.stmt, w, col)
    }

    fn references(&self, a: &mut Args, key: &str) -> Result<Vec<ElementRef>, DslError> {
        a.list(key)?
            .into_iter()
            .map(|(w, col)| self.lookup(a.stmt, w, col))
            .collect()
    }

    fn bind(&mut self, s: &Statement, label: &str, element: ElementRef) -> Result<(), DslError> {
        if self.labels.contains_key(label) {
            let col = s.label.as_ref().map_or(1, |l| l.1);
            return Err(err(s.line, col, &format!("label `{label}` is already bound")));
        }
        self.labels.insert(label.to_string(), element);
        Ok(())
    }

    fn statement(&mut self, s: &Statement) -> Result<(), DslError> {
        let mut a = Args::new(s);
        let created: Option<ElementRef> = match s.keyword.as_str() {
            "scenario" => return Err(err(s.line, 1, "`scenario` may appear only once, first")),
            "corner_case" => {
                a.no_label()?;
                let layer: Layer = a.parsed("layer", "sensor, content or temporal")?;
                let level: Level = a.parsed("level", "a corner-case level")?;
                let description = a.opt_text("description")?.unwrap_or_default();
                let cc = CornerCaseLevel::new(layer, level, &description)
                    .map_err(|e| err(s.line, 1, &e.to_string()))?;
                a.finish()?;
                self.h.set_corner_case(&cc).map_err(|e| build_err(s, e))?;
                None
            }
            "entity" => {
                let kind = match a.word("kind")? {
                    ("ego", _) => EntityKind::EgoVehicle,
                    ("car", _) => EntityKind::Car,
                    ("pedestrian", _) => EntityKind::Pedestrian,
                    ("bicycle", _) => EntityKind::Bicycle,
                    ("misc", _) => EntityKind::Misc,
                    (other, col) => {
                        return Err(err(
                            s.line,
                            col,
                            &format!("unknown entity kind `{other}` (ego, car, pedestrian, bicycle, misc)"),
                        ))
                    }
                };
                let asset = a.opt_text("asset")?;
                a.finish()?;
                Some(
                    self.h
                        .new_entity(kind, asset.as_deref())
                        .map_err(|e| build_err(s, e))?,
                )
            }
            "dynamics" => {
                let spec = TransitionDynamics {
                    shape: a.parsed("shape", "a dynamics shape")?,
                    dimension: a.parsed("dimension", "a dynamics dimension")?,
                    value: a.num("value")?,
                };
                a.finish()?;
                Some(
                    self.h
                        .new_transition_dynamics(spec)
                        .map_err(|e| build_err(s, e))?,
                )
            }
            "action" => {
                let spec = self.action_spec(&mut a)?;
                a.finish()?;
                Some(self.h.new_action(spec).map_err(|e| build_err(s, e))?)
            }
            "environment" => {
                let spec = environment_spec(&mut a)?;
                a.finish()?;
                Some(self.h.new_environment(spec).map_err(|e| build_err(s, e))?)
            }
            "condition" => {
                let spec = self.condition_spec(&mut a)?;
                a.finish()?;
                Some(self.h.new_condition(spec).map_err(|e| build_err(s, e))?)
            }
            "trigger" => {
                let kind = match a.word("kind")? {
                    ("start", _) => TriggerKind::Start,
                    ("stop", _) => TriggerKind::Stop,
                    (other, col) => {
                        return Err(err(
                            s.line,
                            col,
                            &format!("trigger kind must be start or stop, found `{other}`"),
                        ))
                    }
                };
                let conditions = self.references(&mut a, "conditions")?;
                let attach = self.reference(&mut a, "attach")?;
                let name = a.opt_text("name")?;
                a.finish()?;
                Some(
                    self.h
                        .new_trigger(kind, &conditions, &attach, name.as_deref())
                        .map_err(|e| build_err(s, e))?,
                )
            }
            "attach" => {
                a.no_label()?;
                let trigger = self.reference(&mut a, "trigger")?;
                let host = self.reference(&mut a, "host")?;
                a.finish()?;
                self.h
                    .attach_trigger(&trigger, &host)
                    .map_err(|e| build_err(s, e))?;
                None
            }
            "init_action" => {
                a.no_label()?;
                let init = self.reference(&mut a, "init")?;
                let action = self.reference(&mut a, "action")?;
                a.finish()?;
                self.h
                    .add_init_action(&init, &action)
                    .map_err(|e| build_err(s, e))?;
                None
            }
            "storyboard" | "init" | "story" | "act" | "group" | "maneuver" | "event" | "wrap" => {
                let (kind, payload, parent) = self.structural(&mut a)?;
                a.finish()?;
                Some(
                    self.h
                        .structural_element(kind, &parent, payload)
                        .map_err(|e| build_err(s, e))?,
                )
            }
            other => return Err(err(s.line, 1, &format!("unknown statement `{other}`"))),
        };
        if let (Some(el), Some((label, _))) = (created, &s.label) {
            self.bind(s, label, el)?;
        }
        Ok(())
    }

    fn structural(&self, a: &mut Args) -> Result<(StructuralKind, Payload, ElementRef), DslError> {
        let keyword = a.stmt.keyword.as_str();
        if keyword == "storyboard" {
            return Ok((StructuralKind::Storyboard, Payload::None, self.h.root()));
        }
        let parent = self.reference(a, "parent")?;
        Ok(match keyword {
            "init" => {
                let actions = if a.get("actions").is_some() {
                    self.references(a, "actions")?
                } else {
                    Vec::new()
                };
                (StructuralKind::Init, Payload::Init(actions), parent)
            }
            "story" => (StructuralKind::Story, Payload::None, parent),
            "act" => (StructuralKind::Act, Payload::None, parent),
            "group" => {
                let actors = if a.get("actors").is_some() {
                    self.references(a, "actors")?
                } else {
                    Vec::new()
                };
                let max_execution_count = a.opt_parsed("max_executions", "a positive integer")?.unwrap_or(1);
                (
                    StructuralKind::ManeuverGroup,
                    Payload::ManeuverGroup {
                        actors,
                        max_execution_count,
                    },
                    parent,
                )
            }
            "maneuver" => (StructuralKind::Maneuver, Payload::None, parent),
            "event" => {
                let priority = a.parsed("priority", "overwrite, parallel or skip")?;
                let max_execution_count = a.opt_parsed("max_executions", "a positive integer")?.unwrap_or(1);
                (
                    StructuralKind::Event,
                    Payload::Event {
                        priority,
                        max_execution_count,
                    },
                    parent,
                )
            }
            "wrap" => {
                let action = self.reference(a, "action")?;
                (StructuralKind::Action, Payload::Action(action), parent)
            }
            _ => unreachable!("dispatched on structural keywords"),
        })
    }

    fn action_spec(&self, a: &mut Args) -> Result<ActionSpec, DslError> {
        Ok(match a.word("type")? {
            ("teleport", _) => ActionSpec::TeleportWithPosition {
                entity: self.reference(a, "entity")?,
                x: a.num("x")?,
                y: a.num("y")?,
                z: a.num_or("z", 0.0)?,
                heading: a.num_or("heading", 0.0)?,
            },
            ("teleport_relative", _) => ActionSpec::TeleportRelative {
                entity: self.reference(a, "entity")?,
                reference: self.reference(a, "reference")?,
                dx: a.num("dx")?,
                dy: a.num("dy")?,
                dz: a.num_or("dz", 0.0)?,
            },
            ("speed", _) => ActionSpec::Speed {
                entity: self.reference(a, "entity")?,
                target: a.num("target")?,
                dynamics: self.reference(a, "dynamics")?,
            },
            ("lane_change", _) => ActionSpec::RelativeLaneChange {
                entity: self.reference(a, "entity")?,
                reference: self.reference(a, "reference")?,
                lane_offset: a.parsed("offset", "an integer")?,
                dynamics: self.reference(a, "dynamics")?,
            },
            ("environment", _) => ActionSpec::EnvironmentChange {
                environment: self.reference(a, "environment")?,
            },
            (other, col) => {
                return Err(err(
                    a.stmt.line,
                    col,
                    &format!("unknown action type `{other}` (teleport, teleport_relative, speed, lane_change, environment)"),
                ))
            }
        })
    }

    fn condition_spec(&self, a: &mut Args) -> Result<ConditionSpec, DslError> {
        Ok(match a.word("type")? {
            ("simulation_time", _) => ConditionSpec::SimulationTime {
                value: a.num("value")?,
                rule: a.parsed("rule", "greaterThan, lessThan or equalTo")?,
            },
            ("traveled_distance", _) => ConditionSpec::TraveledDistance {
                entity: self.reference(a, "entity")?,
                value: a.num("value")?,
            },
            ("relative_distance", _) => ConditionSpec::RelativeDistance {
                entity: self.reference(a, "entity")?,
                reference: self.reference(a, "reference")?,
                value: a.num("value")?,
                rule: a.parsed("rule", "greaterThan, lessThan or equalTo")?,
                distance_type: a
                    .opt_parsed("distance_type", "cartesianDistance, lateral or longitudinal")?
                    .unwrap_or(crate::master::vocab::RelativeDistanceType::CartesianDistance),
                freespace: a.opt_parsed("freespace", "true or false")?.unwrap_or(false),
            },
            ("element_state", _) => ConditionSpec::StoryboardElementState {
                element: self.reference(a, "element")?,
                state: a.parsed("state", "a storyboard element state")?,
            },
            (other, col) => {
                return Err(err(
                    a.stmt.line,
                    col,
                    &format!("unknown condition type `{other}` (simulation_time, traveled_distance, relative_distance, element_state)"),
                ))
            }
        })
    }
}

fn environment_spec(a: &mut Args) -> Result<EnvironmentSpec, DslError> {
    let time_of_day = match a.opt_text("date_time")? {
        Some(date_time) => Some(TimeOfDaySpec {
            date_time,
            animation: a.opt_parsed("animation", "true or false")?.unwrap_or(false),
        }),
        None => None,
    };
    let weather = if a.get("cloud").is_some() {
        Some(WeatherSpec {
            cloud_state: a.parsed("cloud", "a cloud state")?,
            sun: SunSpec {
                azimuth: a.num("sun_azimuth")?,
                elevation: a.num("sun_elevation")?,
                intensity: a.num("sun_intensity")?,
            },
            visual_range: a.num("visual_range")?,
            precipitation: PrecipitationSpec {
                kind: a
                    .opt_parsed("precipitation", "dry, rain or snow")?
                    .unwrap_or(crate::master::vocab::PrecipitationType::Dry),
                intensity: a.num_or("precipitation_intensity", 0.0)?,
            },
        })
    } else {
        None
    };
    let friction_scale_factor = if a.get("friction").is_some() {
        Some(a.num("friction")?)
    } else {
        None
    };
    Ok(EnvironmentSpec {
        time_of_day,
        weather,
        friction_scale_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let s = parse("  entity ped kind=pedestrian asset=\"walker.pedestrian.0001\" # note\n\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].keyword, "entity");
        assert_eq!(s[0].label, Some(("ped".into(), 10)));
        assert_eq!(s[0].params[1].key, "asset");
        assert_eq!(
            s[0].params[1].value,
            Value::Quoted("walker.pedestrian.0001".into())
        );
        assert_eq!(s[0].params[1].column, 30);
    }

    #[test]
    fn escapes() {
        let s = parse(r#"scenario town=T description="say \"hi\" \\ bye""#).unwrap();
        assert_eq!(s[0].params[1].value, Value::Quoted(r#"say "hi" \ bye"#.into()));
    }

    #[test]
    fn unterminated_string_reports_column() {
        let e = parse("scenario town=\"Town04").unwrap_err();
        assert_eq!((e.line, e.column), (1, 15));
    }

    #[test]
    fn label_only_in_second_position() {
        let e = parse("entity a kind=car b").unwrap_err();
        assert_eq!((e.line, e.column), (1, 19));
    }

    #[test]
    fn first_statement_must_be_scenario() {
        let e = compile("entity ego kind=ego").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn unknown_label_points_at_list_item() {
        let text =
            "scenario town=Town04\nentity ego kind=ego\nstoryboard sb\ninit i parent=sb actions=ego,nope\n";
        let e = compile(text).unwrap_err();
        assert_eq!((e.line, e.column), (4, 30));
        assert!(e.message.contains("nope"));
    }

    #[test]
    fn unknown_parameter_rejected() {
        let e = compile("scenario town=Town04\nentity ego kind=ego colour=red\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 21));
    }

    #[test]
    fn builder_errors_carry_the_line() {
        let e = compile("scenario town=Town04\nentity a kind=ego\nentity b kind=ego\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("ego"), "{}", e.message);
    }
}
