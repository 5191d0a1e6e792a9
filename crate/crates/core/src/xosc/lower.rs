//! Ontology to OpenSCENARIO element tree.

use std::collections::BTreeSet;

use thiserror::Error;

use super::schema::MISC_OBJECT_CATEGORY;
use super::{Element, XoscDocument, PLACEHOLDER_DATE, REV_MAJOR, REV_MINOR};
use crate::builder::{element_type_of, validate, Violation};
use crate::ontology::{Literal, Name, Ontology, Origin};

pub const AUTHOR: &str = "cornercase";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowerError {
    #[error("ontology is not a valid scenario ({} violations, first: {})", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("individual {name} ({class}) has no OpenSCENARIO counterpart")]
    UnloweredIndividual { name: String, class: String },
    #[error("{individual}: {detail}")]
    BadValue { individual: String, detail: String },
}

/// Lowers a validated scenario ontology to an OpenSCENARIO 1.0 document.
/// Every Scenario-origin individual reachable from the root must be consumed
/// by some node, otherwise `UnloweredIndividual` is returned.
pub fn lower(onto: &Ontology) -> Result<XoscDocument, LowerError> {
    let violations = validate(onto);
    if !violations.is_empty() {
        return Err(LowerError::Invalid(violations));
    }
    let root = onto
        .individuals()
        .find(|i| i.origin == Origin::Scenario && i.classes.iter().any(|c| c == "Scenario"))
        .map(|i| i.name.clone())
        .expect("validated scenario has a root");
    let mut l = Lowerer {
        onto,
        consumed: BTreeSet::new(),
    };
    let doc = l.document(&root)?;
    for name in onto.reachable_from(&root) {
        let ind = onto.individual(&name).expect("reachable individuals exist");
        if ind.origin == Origin::Scenario && !l.consumed.contains(name.as_str()) {
            return Err(LowerError::UnloweredIndividual {
                class: ind
                    .classes
                    .iter()
                    .map(|c| c.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
                name: name.to_string(),
            });
        }
    }
    Ok(doc)
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

struct Lowerer<'a> {
    onto: &'a Ontology,
    consumed: BTreeSet<String>,
}

impl<'a> Lowerer<'a> {
    fn take(&mut self, name: &str) {
        self.consumed.insert(name.to_string());
    }

    fn is(&self, name: &str, class: &str) -> bool {
        self.onto.is_instance_of(name, class)
    }

    fn one(&self, s: &str, p: &str) -> Option<&'a Name> {
        self.onto.objects(s, p).into_iter().next()
    }

    fn many(&self, s: &str, p: &str) -> Vec<&'a Name> {
        let mut v = self.onto.objects(s, p);
        v.sort();
        v.dedup();
        v
    }

    fn need(&self, s: &str, p: &str) -> Result<&'a Name, LowerError> {
        self.one(s, p).ok_or_else(|| bad(s, format!("missing {p}")))
    }

    fn lit(&self, s: &str, p: &str) -> Option<&'a Literal> {
        self.onto.value(s, p)
    }

    fn f(&self, s: &str, p: &str) -> Option<f64> {
        self.lit(s, p).and_then(Literal::as_f64)
    }

    fn need_f(&self, s: &str, p: &str) -> Result<String, LowerError> {
        self.f(s, p)
            .map(num)
            .ok_or_else(|| bad(s, format!("missing {p}")))
    }

    fn document(&mut self, root: &str) -> Result<XoscDocument, LowerError> {
        self.take(root);
        let description = match self.lit(root, "scenario_description").and_then(Literal::as_text) {
            Some(d) => d.to_string(),
            None => root.to_string(),
        };
        let header = Element::new("FileHeader")
            .attr("author", AUTHOR)
            .attr("date", PLACEHOLDER_DATE)
            .attr("description", description)
            .attr("revMajor", REV_MAJOR.to_string())
            .attr("revMinor", REV_MINOR.to_string());
        let town = self.need(root, "has_town")?;
        self.take(town);
        let town_name = self
            .lit(town, "town_name")
            .and_then(Literal::as_text)
            .ok_or_else(|| bad(town, "missing town_name".into()))?;
        for cc in self.many(root, "has_corner_case") {
            // corner-case tags are ontology metadata with no document node
            self.take(cc);
        }
        let mut entities = Element::new("Entities");
        for e in self.many(root, "has_entity") {
            entities.push(self.scenario_object(e)?);
        }
        let storyboard = self.storyboard(self.need(root, "has_storyboard")?)?;
        Ok(XoscDocument {
            root: Element::new("OpenSCENARIO")
                .child(header)
                .child(Element::new("ParameterDeclarations"))
                .child(Element::new("CatalogLocations"))
                .child(
                    Element::new("RoadNetwork").child(Element::new("LogicFile").attr("filepath", town_name)),
                )
                .child(entities)
                .child(storyboard),
        })
    }

    fn scenario_object(&mut self, e: &str) -> Result<Element, LowerError> {
        self.take(e);
        let asset = self.need(e, "has_asset")?;
        self.take(asset);
        let (default_dims, default_mass) = if self.is(e, "Vehicle") {
            ([4.5, 2.0, 1.5], 1500.0)
        } else if self.is(e, "Bicycle") {
            ([1.7, 0.6, 1.5], 90.0)
        } else if self.is(e, "Pedestrian") {
            ([0.5, 0.5, 1.8], 80.0)
        } else {
            ([1.0, 1.0, 1.0], 50.0)
        };
        let bbox = match self.one(e, "has_bounding_box") {
            Some(b) => {
                self.take(b);
                let g = |p: &str, d: f64| self.f(b, p).unwrap_or(d);
                bounding_box(
                    [
                        g("bb_center_x", 0.0),
                        g("bb_center_y", 0.0),
                        g("bb_center_z", g("bb_height", default_dims[2]) / 2.0),
                    ],
                    [
                        g("bb_length", default_dims[0]),
                        g("bb_width", default_dims[1]),
                        g("bb_height", default_dims[2]),
                    ],
                )
            }
            None => {
                let g = |p: &str, d: f64| self.f(asset, p).unwrap_or(d);
                let dims = [
                    g("asset_length", default_dims[0]),
                    g("asset_width", default_dims[1]),
                    g("asset_height", default_dims[2]),
                ];
                bounding_box([0.0, 0.0, dims[2] / 2.0], dims)
            }
        };
        for s in self.many(e, "has_sensor") {
            // sensors configure the simulator harness, not the scenario file
            self.take(s);
        }
        let mass = self.f(e, "entity_mass").unwrap_or(default_mass);
        let object = if self.is(e, "Vehicle") || self.is(e, "Bicycle") {
            let bicycle = self.is(e, "Bicycle");
            let (speed, acc, dec) = if bicycle {
                (10.0, 3.0, 5.0)
            } else {
                (69.444, 10.0, 10.0)
            };
            let role = if self.is(e, "EgoVehicle") {
                "ego_vehicle"
            } else {
                "simulation"
            };
            Element::new("Vehicle")
                .attr("name", asset.as_str())
                .attr("vehicleCategory", if bicycle { "bicycle" } else { "car" })
                .child(bbox)
                .child(
                    Element::new("Performance")
                        .attr(
                            "maxAcceleration",
                            num(self.f(e, "max_acceleration").unwrap_or(acc)),
                        )
                        .attr(
                            "maxDeceleration",
                            num(self.f(e, "max_deceleration").unwrap_or(dec)),
                        )
                        .attr("maxSpeed", num(self.f(e, "max_speed").unwrap_or(speed))),
                )
                .child(axles(bicycle))
                .child(
                    Element::new("Properties")
                        .child(Element::new("Property").attr("name", "type").attr("value", role)),
                )
        } else if self.is(e, "Pedestrian") {
            Element::new("Pedestrian")
                .attr("mass", num(mass))
                .attr("model", asset.as_str())
                .attr("name", asset.as_str())
                .attr("pedestrianCategory", "pedestrian")
                .child(bbox)
                .child(Element::new("Properties"))
        } else if self.is(e, "Misc") {
            let category = self
                .lit(e, "misc_category")
                .and_then(Literal::as_text)
                .unwrap_or("obstacle");
            if !MISC_OBJECT_CATEGORY.contains(&category) {
                return Err(bad(
                    e,
                    format!("misc_category {category:?} is not an OpenSCENARIO category"),
                ));
            }
            Element::new("MiscObject")
                .attr("mass", num(mass))
                .attr("miscObjectCategory", category)
                .attr("name", asset.as_str())
                .child(bbox)
                .child(Element::new("Properties"))
        } else {
            return Err(unlowered(self.onto, e));
        };
        Ok(Element::new("ScenarioObject").attr("name", e).child(object))
    }

    fn storyboard(&mut self, sb: &str) -> Result<Element, LowerError> {
        self.take(sb);
        let init = self.need(sb, "has_init")?;
        self.take(init);
        let mut actions = Element::new("Actions");
        let init_actions = self.many(init, "has_init_action");
        let mut by_entity: Vec<(&Name, &Name)> = Vec::new();
        for a in init_actions {
            if self.is(a, "GlobalAction") {
                actions.push(self.global_action(a)?);
            } else if self.is(a, "PrivateAction") {
                by_entity.push((self.need(a, "has_entity_ref")?, a));
            } else {
                return Err(unlowered(self.onto, a));
            }
        }
        by_entity.sort();
        let mut i = 0;
        while i < by_entity.len() {
            let entity = by_entity[i].0;
            let mut private = Element::new("Private").attr("entityRef", entity.as_str());
            while i < by_entity.len() && by_entity[i].0 == entity {
                private.push(self.private_action(by_entity[i].1)?);
                i += 1;
            }
            actions.push(private);
        }
        let mut out = Element::new("Storyboard").child(Element::new("Init").child(actions));
        for story in self.many(sb, "has_story") {
            out.push(self.story(story)?);
        }
        out.push(self.trigger("StopTrigger", sb, "has_stop_trigger")?);
        Ok(out)
    }

    fn story(&mut self, story: &str) -> Result<Element, LowerError> {
        self.take(story);
        let mut out = Element::new("Story").attr("name", story);
        for act in self.many(story, "has_act") {
            self.take(act);
            let mut a = Element::new("Act").attr("name", act.as_str());
            for g in self.many(act, "has_maneuver_group") {
                a.push(self.maneuver_group(g)?);
            }
            a.push(self.trigger("StartTrigger", act, "has_start_trigger")?);
            if self.one(act, "has_stop_trigger").is_some() {
                a.push(self.trigger("StopTrigger", act, "has_stop_trigger")?);
            }
            out.push(a);
        }
        Ok(out)
    }

    fn maneuver_group(&mut self, g: &str) -> Result<Element, LowerError> {
        self.take(g);
        let count = self
            .lit(g, "maximum_execution_count")
            .and_then(Literal::as_i64)
            .unwrap_or(1);
        let mut actors: BTreeSet<&Name> = self.many(g, "has_actor").into_iter().collect();
        let mut maneuvers = Vec::new();
        for m in self.many(g, "has_maneuver") {
            self.take(m);
            let mut man = Element::new("Maneuver").attr("name", m.as_str());
            for ev in self.many(m, "has_event") {
                for w in self.many(ev, "has_action") {
                    for pa in self.many(w, "has_private_action") {
                        actors.extend(self.one(pa, "has_entity_ref"));
                    }
                }
                man.push(self.event(ev)?);
            }
            maneuvers.push(man);
        }
        let mut refs = Element::new("Actors").attr("selectTriggeringEntities", "false");
        for a in actors {
            refs.push(Element::new("EntityRef").attr("entityRef", a.as_str()));
        }
        let mut out = Element::new("ManeuverGroup")
            .attr("maximumExecutionCount", count.to_string())
            .attr("name", g)
            .child(refs);
        out.children.extend(maneuvers);
        Ok(out)
    }

    fn event(&mut self, ev: &str) -> Result<Element, LowerError> {
        self.take(ev);
        let priority = self.need(ev, "has_priority")?;
        let mut out = Element::new("Event")
            .attr("name", ev)
            .attr("priority", priority.as_str());
        if let Some(n) = self.lit(ev, "maximum_execution_count").and_then(Literal::as_i64) {
            out.set_attr("maximumExecutionCount", n.to_string());
        }
        for w in self.many(ev, "has_action") {
            self.take(w);
            let inner = match (
                self.one(w, "has_private_action"),
                self.one(w, "has_global_action"),
            ) {
                (Some(p), _) => self.private_action(p)?,
                (None, Some(g)) => self.global_action(g)?,
                (None, None) => return Err(bad(w, "action wraps nothing".into())),
            };
            out.push(Element::new("Action").attr("name", w.as_str()).child(inner));
        }
        out.push(self.trigger("StartTrigger", ev, "has_start_trigger")?);
        Ok(out)
    }

    fn dynamics(&mut self, tag: &str, action: &str) -> Result<Element, LowerError> {
        let td = self.need(action, "has_transition_dynamics")?;
        self.take(td);
        Ok(Element::new(tag)
            .attr(
                "dynamicsDimension",
                self.need(td, "has_dynamics_dimension")?.as_str(),
            )
            .attr("dynamicsShape", self.need(td, "has_dynamics_shape")?.as_str())
            .attr("value", self.need_f(td, "dynamics_value")?))
    }

    fn private_action(&mut self, a: &str) -> Result<Element, LowerError> {
        self.take(a);
        let inner = if self.is(a, "TeleportAction") {
            let p = self.need(a, "has_position")?;
            self.take(p);
            let pos = if self.is(p, "WorldPosition") {
                let mut w = Element::new("WorldPosition")
                    .attr("x", self.need_f(p, "position_x")?)
                    .attr("y", self.need_f(p, "position_y")?);
                if let Some(z) = self.f(p, "position_z") {
                    w.set_attr("z", num(z));
                }
                if let Some(h) = self.f(p, "position_heading") {
                    w.set_attr("h", num(h));
                }
                w
            } else if self.is(p, "RelativeObjectPosition") {
                let mut r = Element::new("RelativeObjectPosition")
                    .attr("entityRef", self.need(p, "has_reference_entity")?.as_str())
                    .attr("dx", self.need_f(p, "offset_dx")?)
                    .attr("dy", self.need_f(p, "offset_dy")?);
                if let Some(dz) = self.f(p, "offset_dz") {
                    r.set_attr("dz", num(dz));
                }
                r
            } else {
                return Err(unlowered(self.onto, p));
            };
            Element::new("TeleportAction").child(Element::new("Position").child(pos))
        } else if self.is(a, "SpeedAction") {
            Element::new("LongitudinalAction").child(
                Element::new("SpeedAction")
                    .child(self.dynamics("SpeedActionDynamics", a)?)
                    .child(Element::new("SpeedActionTarget").child(
                        Element::new("AbsoluteTargetSpeed").attr("value", self.need_f(a, "target_speed")?),
                    )),
            )
        } else if self.is(a, "RelativeLaneChangeAction") {
            let offset = self
                .lit(a, "lane_offset")
                .and_then(Literal::as_i64)
                .ok_or_else(|| bad(a, "missing lane_offset".into()))?;
            Element::new("LateralAction").child(
                Element::new("LaneChangeAction")
                    .child(self.dynamics("LaneChangeActionDynamics", a)?)
                    .child(
                        Element::new("LaneChangeTarget").child(
                            Element::new("RelativeTargetLane")
                                .attr("entityRef", self.need(a, "has_reference_entity")?.as_str())
                                .attr("value", offset.to_string()),
                        ),
                    ),
            )
        } else {
            return Err(unlowered(self.onto, a));
        };
        Ok(Element::new("PrivateAction").child(inner))
    }

    fn global_action(&mut self, a: &str) -> Result<Element, LowerError> {
        self.take(a);
        if !self.is(a, "EnvironmentAction") {
            return Err(unlowered(self.onto, a));
        }
        let env = self.need(a, "has_environment")?;
        Ok(Element::new("GlobalAction")
            .child(Element::new("EnvironmentAction").child(self.environment(env)?)))
    }

    fn environment(&mut self, env: &str) -> Result<Element, LowerError> {
        self.take(env);
        let tod = self.need(env, "has_time_of_day")?;
        let weather = self.need(env, "has_weather")?;
        let road = self.need(env, "has_road_condition")?;
        let sun = self.need(weather, "has_sun")?;
        let fog = self.need(weather, "has_fog")?;
        let precipitation = self.need(weather, "has_precipitation")?;
        for n in [tod, weather, road, sun, fog, precipitation] {
            self.take(n);
        }
        let animation = self
            .lit(tod, "animation")
            .and_then(Literal::as_bool)
            .ok_or_else(|| bad(tod, "missing animation".into()))?;
        let date_time = self
            .lit(tod, "date_time")
            .and_then(Literal::as_text)
            .ok_or_else(|| bad(tod, "missing date_time".into()))?;
        Ok(Element::new("Environment")
            .attr("name", env)
            .child(
                Element::new("TimeOfDay")
                    .attr("animation", animation.to_string())
                    .attr("dateTime", date_time),
            )
            .child(
                Element::new("Weather")
                    .attr("cloudState", self.need(weather, "has_cloud_state")?.as_str())
                    .child(
                        Element::new("Sun")
                            .attr("azimuth", self.need_f(sun, "sun_azimuth")?)
                            .attr("elevation", self.need_f(sun, "sun_elevation")?)
                            .attr("intensity", self.need_f(sun, "sun_intensity")?),
                    )
                    .child(Element::new("Fog").attr("visualRange", self.need_f(fog, "visual_range")?))
                    .child(
                        Element::new("Precipitation")
                            .attr(
                                "intensity",
                                self.need_f(precipitation, "precipitation_intensity")?,
                            )
                            .attr(
                                "precipitationType",
                                self.need(precipitation, "has_precipitation_type")?.as_str(),
                            ),
                    ),
            )
            .child(
                Element::new("RoadCondition")
                    .attr("frictionScaleFactor", self.need_f(road, "friction_scale_factor")?),
            ))
    }

    /// All triggers linked through `prop` become condition groups of one
    /// trigger element (groups are OR-ed, conditions inside a group AND-ed).
    fn trigger(&mut self, tag: &str, host: &str, prop: &str) -> Result<Element, LowerError> {
        let mut out = Element::new(tag);
        for t in self.many(host, prop) {
            self.take(t);
            let mut group = Element::new("ConditionGroup");
            for c in self.many(t, "has_condition") {
                group.push(self.condition(c)?);
            }
            if !group.children.is_empty() {
                out.push(group);
            }
        }
        Ok(out)
    }

    fn condition(&mut self, c: &str) -> Result<Element, LowerError> {
        self.take(c);
        let edge = self
            .one(c, "has_condition_edge")
            .map(|n| n.as_str())
            .unwrap_or("none");
        let delay = self.f(c, "condition_delay").unwrap_or(0.0);
        let out = Element::new("Condition")
            .attr("conditionEdge", edge)
            .attr("delay", num(delay))
            .attr("name", c);
        let inner = if self.is(c, "SimulationTimeCondition") {
            Element::new("ByValueCondition").child(
                Element::new("SimulationTimeCondition")
                    .attr("rule", self.need(c, "has_rule")?.as_str())
                    .attr("value", self.need_f(c, "condition_value")?),
            )
        } else if self.is(c, "StoryboardElementStateCondition") {
            let target = self.need(c, "has_storyboard_element")?;
            let kind = match self.one(c, "has_storyboard_element_type") {
                Some(k) => k.to_string(),
                None => element_type_of(self.onto, target)
                    .ok_or_else(|| bad(c, format!("{target} is not a storyboard element")))?
                    .to_string(),
            };
            Element::new("ByValueCondition").child(
                Element::new("StoryboardElementStateCondition")
                    .attr("state", self.need(c, "has_storyboard_element_state")?.as_str())
                    .attr("storyboardElementRef", target.as_str())
                    .attr("storyboardElementType", kind),
            )
        } else if self.is(c, "TraveledDistanceCondition") || self.is(c, "RelativeDistanceCondition") {
            let rule = self
                .one(c, "has_triggering_rule")
                .map(|n| n.as_str())
                .unwrap_or("any");
            let mut entities = Element::new("TriggeringEntities").attr("triggeringEntitiesRule", rule);
            for e in self.many(c, "has_triggering_entity") {
                entities.push(Element::new("EntityRef").attr("entityRef", e.as_str()));
            }
            let cond = if self.is(c, "TraveledDistanceCondition") {
                Element::new("TraveledDistanceCondition").attr("value", self.need_f(c, "condition_value")?)
            } else {
                let freespace = self
                    .lit(c, "freespace")
                    .and_then(Literal::as_bool)
                    .unwrap_or(false);
                let kind = self
                    .one(c, "has_relative_distance_type")
                    .map(|n| n.as_str())
                    .unwrap_or("cartesianDistance");
                Element::new("RelativeDistanceCondition")
                    .attr("entityRef", self.need(c, "has_reference_entity")?.as_str())
                    .attr("freespace", freespace.to_string())
                    .attr("relativeDistanceType", kind)
                    .attr("rule", self.need(c, "has_rule")?.as_str())
                    .attr("value", self.need_f(c, "condition_value")?)
            };
            Element::new("ByEntityCondition")
                .child(entities)
                .child(Element::new("EntityCondition").child(cond))
        } else {
            return Err(unlowered(self.onto, c));
        };
        Ok(out.child(inner))
    }
}

fn bad(individual: &str, detail: String) -> LowerError {
    LowerError::BadValue {
        individual: individual.to_string(),
        detail,
    }
}

fn unlowered(onto: &Ontology, name: &str) -> LowerError {
    let class = onto
        .individual(name)
        .map(|i| i.classes.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(","))
        .unwrap_or_default();
    LowerError::UnloweredIndividual {
        name: name.to_string(),
        class,
    }
}

fn bounding_box(center: [f64; 3], dims: [f64; 3]) -> Element {
    Element::new("BoundingBox")
        .child(
            Element::new("Center")
                .attr("x", num(center[0]))
                .attr("y", num(center[1]))
                .attr("z", num(center[2])),
        )
        .child(
            Element::new("Dimensions")
                .attr("height", num(dims[2]))
                .attr("length", num(dims[0]))
                .attr("width", num(dims[1])),
        )
}

fn axles(bicycle: bool) -> Element {
    let (track, wheel, wheelbase) = if bicycle {
        (0.1, 0.65, 1.1)
    } else {
        (1.68, 0.8, 2.98)
    };
    let axle = |tag: &str, steering: f64, x: f64| {
        Element::new(tag)
            .attr("maxSteering", num(steering))
            .attr("positionX", num(x))
            .attr("positionZ", num(wheel / 2.0))
            .attr("trackWidth", num(track))
            .attr("wheelDiameter", num(wheel))
    };
    Element::new("Axles")
        .child(axle("FrontAxle", 0.5, wheelbase))
        .child(axle("RearAxle", 0.0, 0.0))
}
