use std::collections::BTreeSet;

use cornercase::builder::{
    validate, ActionSpec, BuildError, ConditionSpec, EntityKind, EnvironmentSpec, Payload, PrecipitationSpec,
    ScenarioHandle, StructuralKind, SunSpec, TransitionDynamics, TriggerKind, ValidationRule, WeatherSpec,
    GENERATED_PREFIX,
};
use cornercase::catalog;
use cornercase::master::vocab::{
    CloudState, DynamicsDimension, DynamicsShape, PrecipitationType, Priority, Rule, StoryboardElementState,
};
use cornercase::master::{self, CornerCaseLevel, Layer, Level};
use cornercase::ontology::{Assertion, Name, Ontology, Origin};
use proptest::prelude::*;

fn n(s: &str) -> Name {
    Name::new(s).unwrap()
}

fn scenario_count(o: &Ontology) -> usize {
    o.individuals().filter(|i| i.origin == Origin::Scenario).count()
}

/// Minimal valid scenario: ego, one event changing the speed at t=0.
fn minimal() -> ScenarioHandle {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    let sb = h.new_storyboard().unwrap();
    h.new_init(&sb, &[]).unwrap();
    let story = h.new_story(&sb).unwrap();
    let act = h.new_act(&story).unwrap();
    let start = h.default_start_trigger();
    h.attach_trigger(&start, &act).unwrap();
    let g = h.new_maneuver_group(&act, std::slice::from_ref(&ego)).unwrap();
    let m = h.new_maneuver(&g).unwrap();
    let ev = h.new_event(&m, Priority::Overwrite).unwrap();
    let dyn_ = h
        .new_transition_dynamics(TransitionDynamics {
            shape: DynamicsShape::Linear,
            dimension: DynamicsDimension::Time,
            value: 1.0,
        })
        .unwrap();
    let sp = h
        .new_action(ActionSpec::Speed {
            entity: ego,
            target: 5.0,
            dynamics: dyn_,
        })
        .unwrap();
    h.wrap_action(&ev, &sp).unwrap();
    h.attach_trigger(&start, &ev).unwrap();
    h
}

#[test]
fn new_scenario_links_root_to_town() {
    let h = ScenarioHandle::new_scenario("Town04").unwrap();
    let o = h.ontology();
    let root = h.root();
    assert!(o.is_instance_of(&root.name, "Scenario"));
    let towns = o.objects(&root.name, "has_town");
    assert_eq!(towns.len(), 1);
    assert_eq!(o.value(towns[0], "town_name").unwrap().as_text(), Some("Town04"));
    assert_eq!(scenario_count(o), 2);
}

#[test]
fn empty_town_is_rejected() {
    assert_eq!(
        ScenarioHandle::new_scenario("  ").unwrap_err(),
        BuildError::EmptyTown
    );
}

#[test]
fn handles_are_independent() {
    let mut a = ScenarioHandle::new_scenario("Town04").unwrap();
    let b = ScenarioHandle::new_scenario("Town04").unwrap();
    a.new_storyboard().unwrap();
    assert_eq!(scenario_count(a.ontology()), 3);
    assert_eq!(scenario_count(b.ontology()), 2);
}

#[test]
fn event_is_linked_with_priority() {
    let h = minimal();
    let o = h.ontology();
    let ev = o.objects("indiv_Maneuver1", "has_event");
    assert_eq!(ev.len(), 1);
    assert_eq!(o.objects(ev[0], "has_priority")[0].as_str(), "overwrite");
}

#[test]
fn act_under_maneuver_is_bad_parent() {
    let mut h = minimal();
    let m = h.element("indiv_Maneuver1").unwrap();
    let err = h
        .structural_element(StructuralKind::Act, &m, Payload::None)
        .unwrap_err();
    assert!(matches!(
        err,
        BuildError::BadParentKind {
            kind: StructuralKind::Act,
            ..
        }
    ));
}

#[test]
fn event_and_action_need_payloads() {
    let mut h = minimal();
    let m = h.element("indiv_Maneuver1").unwrap();
    let err = h
        .structural_element(StructuralKind::Event, &m, Payload::None)
        .unwrap_err();
    assert_eq!(err, BuildError::MissingPayload(StructuralKind::Event));
    let ev = h.element("indiv_Event1").unwrap();
    let err = h
        .structural_element(StructuralKind::Action, &ev, Payload::None)
        .unwrap_err();
    assert_eq!(err, BuildError::MissingPayload(StructuralKind::Action));
}

#[test]
fn pedestrian_gets_its_asset() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let p = h
        .new_entity(EntityKind::Pedestrian, Some("walker.pedestrian.0002"))
        .unwrap();
    let o = h.ontology();
    assert!(o.is_instance_of(&p.name, "Pedestrian"));
    let assets = o.objects(&p.name, "has_asset");
    assert_eq!(assets.len(), 1);
    assert_eq!(assets[0].as_str(), "walker.pedestrian.0002");
    assert!(o.is_instance_of(assets[0], "PedestrianAsset"));
}

#[test]
fn asset_kind_must_match() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let err = h
        .new_entity(EntityKind::Pedestrian, Some("vehicle.audi.a2"))
        .unwrap_err();
    assert!(matches!(err, BuildError::AssetKindMismatch { .. }));
    let err = h.new_entity(EntityKind::Car, Some("vehicle.nope")).unwrap_err();
    assert_eq!(err, BuildError::UnknownAsset("vehicle.nope".into()));
}

#[test]
fn second_ego_is_rejected() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    assert_eq!(ego.name.as_str(), master::defaults::EGO_VEHICLE);
    assert_eq!(
        h.new_entity(EntityKind::EgoVehicle, None).unwrap_err(),
        BuildError::DuplicateEgo
    );
}

#[test]
fn vending_machine_is_a_misc_object() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let vm = h
        .new_entity(EntityKind::Misc, Some("static.prop.vendingmachine"))
        .unwrap();
    assert!(h.ontology().is_instance_of(&vm.name, "Misc"));
}

#[test]
fn speed_action_carries_dynamics() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    let d = h
        .new_transition_dynamics(TransitionDynamics {
            shape: DynamicsShape::Linear,
            dimension: DynamicsDimension::Time,
            value: 1.0,
        })
        .unwrap();
    let sp = h
        .new_action(ActionSpec::Speed {
            entity: ego,
            target: 0.0,
            dynamics: d.clone(),
        })
        .unwrap();
    let o = h.ontology();
    assert!(o.is_instance_of(&sp.name, "SpeedAction"));
    assert_eq!(o.objects(&sp.name, "has_transition_dynamics")[0], &d.name);
    assert_eq!(o.objects(&d.name, "has_dynamics_shape")[0].as_str(), "linear");
    assert_eq!(o.objects(&d.name, "has_dynamics_dimension")[0].as_str(), "time");
    assert_eq!(o.value(&d.name, "dynamics_value").unwrap().as_f64(), Some(1.0));
}

#[test]
fn lane_change_with_unknown_reference_fails() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    let d = h
        .new_transition_dynamics(TransitionDynamics {
            shape: DynamicsShape::Sinusoidal,
            dimension: DynamicsDimension::Time,
            value: 2.0,
        })
        .unwrap();
    // A real individual of the master that is not an entity of this scenario.
    let stranger = cornercase::builder::ElementRef {
        name: n("free"),
        class: n("CloudState"),
    };
    let err = h
        .new_action(ActionSpec::RelativeLaneChange {
            entity: ego,
            reference: stranger,
            lane_offset: 1,
            dynamics: d,
        })
        .unwrap_err();
    assert_eq!(err, BuildError::UnknownEntity("free".into()));
}

#[test]
fn speed_without_dynamics_fails() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    let err = h
        .new_action(ActionSpec::Speed {
            entity: ego.clone(),
            target: 3.0,
            dynamics: ego,
        })
        .unwrap_err();
    assert!(matches!(err, BuildError::MissingDynamics(_)));
}

#[test]
fn traveled_distance_is_by_entity() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    let c = h
        .new_condition(ConditionSpec::TraveledDistance {
            entity: ego,
            value: 50.0,
        })
        .unwrap();
    assert!(h.ontology().is_instance_of(&c.name, "ByEntityCondition"));
    assert!(h.ontology().is_instance_of(&c.name, "TraveledDistanceCondition"));
}

#[test]
fn simulation_time_zero_matches_default_start_condition() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let c = h
        .new_condition(ConditionSpec::SimulationTime {
            value: 0.0,
            rule: Rule::GreaterThan,
        })
        .unwrap();
    let o = h.ontology();
    let d = o.objects(master::defaults::START_TRIGGER, "has_condition")[0].clone();
    assert!(o.is_instance_of(&c.name, "SimulationTimeCondition"));
    assert!(o.is_instance_of(&d, "SimulationTimeCondition"));
    assert_eq!(
        o.value(&c.name, "condition_value"),
        o.value(&d, "condition_value")
    );
    assert_eq!(o.objects(&c.name, "has_rule"), o.objects(&d, "has_rule"));
}

#[test]
fn element_state_with_dangling_ref_fails() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ghost = cornercase::builder::ElementRef {
        name: n("indiv_Event99"),
        class: n("Event"),
    };
    let err = h
        .new_condition(ConditionSpec::StoryboardElementState {
            element: ghost,
            state: StoryboardElementState::EndTransition,
        })
        .unwrap_err();
    assert_eq!(err, BuildError::UnknownElementRef("indiv_Event99".into()));
}

#[test]
fn named_trigger_and_trigger_errors() {
    let mut h = minimal();
    let ego = h.element(master::defaults::EGO_VEHICLE).unwrap();
    let ev = h.element("indiv_Event1").unwrap();
    let c = h
        .new_condition(ConditionSpec::TraveledDistance {
            entity: ego,
            value: 50.0,
        })
        .unwrap();
    let t = h
        .new_trigger(
            TriggerKind::Start,
            std::slice::from_ref(&c),
            &ev,
            Some("DistanceStartTrigger"),
        )
        .unwrap();
    assert_eq!(t.name.as_str(), "indiv_DistanceStartTrigger");
    assert_eq!(
        h.new_trigger(TriggerKind::Start, &[], &ev, None).unwrap_err(),
        BuildError::EmptyConditions
    );
    let init = h.element("indiv_Init1").unwrap();
    let err = h.new_trigger(TriggerKind::Stop, &[c], &init, None).unwrap_err();
    assert!(matches!(err, BuildError::BadAttachTarget { .. }));
}

fn weather(visual_range: f64, intensity: f64) -> EnvironmentSpec {
    EnvironmentSpec {
        time_of_day: None,
        weather: Some(WeatherSpec {
            cloud_state: CloudState::Overcast,
            sun: SunSpec {
                azimuth: 0.0,
                elevation: 0.5,
                intensity: 20000.0,
            },
            visual_range,
            precipitation: PrecipitationSpec {
                kind: PrecipitationType::Rain,
                intensity,
            },
        }),
        friction_scale_factor: None,
    }
}

#[test]
fn environment_ranges_are_checked() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    assert!(matches!(
        h.new_environment(weather(10.0, 1.5)),
        Err(BuildError::RangeError(_))
    ));
    assert!(matches!(
        h.new_environment(weather(0.0, 0.5)),
        Err(BuildError::RangeError(_))
    ));
    assert_eq!(scenario_count(h.ontology()), 2);
    let env = h.new_environment(weather(10.0, 1.0)).unwrap();
    assert!(h.ontology().is_instance_of(&env.name, "Environment"));
}

#[test]
fn default_environment_reuses_master_individuals() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let before = scenario_count(h.ontology());
    let env = h.default_environment_action();
    assert_eq!(scenario_count(h.ontology()), before);
    assert_ne!(
        h.ontology().individual(&env.name).unwrap().origin,
        Origin::Scenario
    );
    // Environment components left unset point at the master defaults.
    let e = h.new_environment(EnvironmentSpec::default()).unwrap();
    let o = h.ontology();
    let w = o.objects(&e.name, "has_weather");
    assert_eq!(w, vec![&n(master::defaults::WEATHER)]);
}

#[test]
fn change_weather_is_an_environment_action() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let a = h.change_weather(weather(10.0, 0.2)).unwrap();
    let o = h.ontology();
    assert!(o.is_instance_of(&a.name, "EnvironmentAction"));
    let envs = o.objects(&a.name, "has_environment");
    assert_eq!(envs.len(), 1);
    assert!(o.is_instance_of(envs[0], "Environment"));
}

#[test]
fn corner_case_tags() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let t = CornerCaseLevel::new(Layer::Content, Level::Domain, "sudden weather change").unwrap();
    let a = h.set_corner_case(&t).unwrap();
    let u = CornerCaseLevel::new(Layer::Temporal, Level::Scenario, "second").unwrap();
    let b = h.set_corner_case(&u).unwrap();
    let tags: BTreeSet<_> = h
        .ontology()
        .objects(&h.root().name, "has_corner_case")
        .into_iter()
        .cloned()
        .collect();
    assert_eq!(tags, BTreeSet::from([a.name, b.name]));
    assert!(CornerCaseLevel::new(Layer::Sensor, Level::Scene, "x").is_err());
}

#[test]
fn minimal_scenario_finalizes() {
    let h = minimal();
    let created = scenario_count(h.ontology());
    let o = h.finalize().unwrap();
    assert_eq!(o.stats().individuals, 67 + created);
}

#[test]
fn event_without_action_names_the_event() {
    let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
    let ego = h.new_entity(EntityKind::EgoVehicle, None).unwrap();
    let sb = h.new_storyboard().unwrap();
    h.new_init(&sb, &[]).unwrap();
    let story = h.new_story(&sb).unwrap();
    let act = h.new_act(&story).unwrap();
    let start = h.default_start_trigger();
    h.attach_trigger(&start, &act).unwrap();
    let g = h.new_maneuver_group(&act, &[ego]).unwrap();
    let m = h.new_maneuver(&g).unwrap();
    let ev = h.new_event(&m, Priority::Overwrite).unwrap();
    h.attach_trigger(&start, &ev).unwrap();
    let err = h.finalize().unwrap_err();
    assert_eq!(
        err.rules(),
        BTreeSet::from([ValidationRule::EventTriggerAndAction])
    );
    assert_eq!(err.violations[0].individual, ev.name.as_str());
}

#[test]
fn orphan_is_reported() {
    let mut h = minimal();
    h.new_transition_dynamics(TransitionDynamics {
        shape: DynamicsShape::Step,
        dimension: DynamicsDimension::Time,
        value: 0.0,
    })
    .unwrap();
    let err = h.finalize().unwrap_err();
    assert_eq!(err.rules(), BTreeSet::from([ValidationRule::Reachability]));
    assert_eq!(err.violations[0].individual, "indiv_TransitionDynamics2");
}

/// The assertion of (b) that satisfies each cardinality rule.
fn satisfying_assertion(rule: ValidationRule) -> Assertion {
    let (s, p, o) = match rule {
        ValidationRule::StoryboardInitAndStory => ("indiv_Storyboard1", "has_story", "indiv_Story1"),
        ValidationRule::StoryHasAct => ("indiv_Story1", "has_act", "indiv_Act1"),
        ValidationRule::ActTriggerAndGroup => ("indiv_Act1", "has_maneuver_group", "indiv_ManeuverGroup1"),
        ValidationRule::GroupHasManeuver => ("indiv_ManeuverGroup1", "has_maneuver", "indiv_Maneuver1"),
        ValidationRule::ManeuverHasEvent => ("indiv_Maneuver1", "has_event", "indiv_Event1"),
        ValidationRule::EventTriggerAndAction => ("indiv_Event1", "has_action", "indiv_Action1"),
        ValidationRule::ConditionEntity => (
            "indiv_TraveledDistanceCondition1",
            "has_triggering_entity",
            master::defaults::EGO_VEHICLE,
        ),
        ValidationRule::Reachability => ("indiv_Scenario1", "has_corner_case", "indiv_DomainLevel1"),
        other => panic!("{other} is not a cardinality rule"),
    };
    Assertion::link(n(s), n(p), n(o))
}

#[test]
fn mutation_suite_names_exactly_the_broken_rule() {
    let fog = catalog::build("b").unwrap();
    assert!(validate(&fog).is_empty());
    for rule in ValidationRule::CARDINALITY {
        let mut o = fog.clone();
        let a = satisfying_assertion(rule);
        o.retract(&a).unwrap_or_else(|e| panic!("{rule}: {e}"));
        let rules: BTreeSet<_> = validate(&o).into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, BTreeSet::from([rule]), "deleting {a:?}");
    }
}

#[test]
fn the_other_half_of_the_paired_rules() {
    let fog = catalog::build("b").unwrap();
    let cases = [
        (
            ("indiv_Storyboard1", "has_init", "indiv_Init1"),
            ValidationRule::StoryboardInitAndStory,
        ),
        (
            ("indiv_Act1", "has_start_trigger", master::defaults::START_TRIGGER),
            ValidationRule::ActTriggerAndGroup,
        ),
        (
            ("indiv_Event1", "has_start_trigger", "indiv_DistanceStartTrigger"),
            ValidationRule::EventTriggerAndAction,
        ),
    ];
    for ((s, p, ob), rule) in cases {
        let mut o = fog.clone();
        o.retract(&Assertion::link(n(s), n(p), n(ob))).unwrap();
        let rules: BTreeSet<_> = validate(&o).into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, BTreeSet::from([rule]), "deleting {s} {p}");
    }
}

#[test]
fn generated_names_are_prefixed_and_unique() {
    for e in catalog::entries().iter().filter(|e| e.fused_from.is_empty()) {
        let o = catalog::build(e.id).unwrap();
        let names: Vec<_> = o
            .individuals()
            .filter(|i| i.origin == Origin::Scenario)
            .map(|i| i.name.as_str().to_string())
            .collect();
        assert!(names.iter().all(|s| s.starts_with(GENERATED_PREFIX)), "{}", e.id);
        let set: BTreeSet<_> = names.iter().collect();
        assert_eq!(set.len(), names.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Conservation: finalize keeps the 67 master individuals plus every
    /// creation, for any number of extra events and entities.
    #[test]
    fn finalize_conserves_individuals(extra_events in 0usize..6, walkers in 0usize..4) {
        let mut h = minimal();
        let m = h.element("indiv_Maneuver1").unwrap();
        let start = h.default_start_trigger();
        let d = h.element("indiv_TransitionDynamics1").unwrap();
        for i in 0..walkers {
            let p = h.new_entity(EntityKind::Pedestrian, Some("walker.pedestrian.0001")).unwrap();
            let ev = h.new_event(&m, Priority::Parallel).unwrap();
            let sp = h.new_action(ActionSpec::Speed { entity: p, target: i as f64, dynamics: d.clone() }).unwrap();
            h.wrap_action(&ev, &sp).unwrap();
            h.attach_trigger(&start, &ev).unwrap();
        }
        for i in 0..extra_events {
            let ego = h.element(master::defaults::EGO_VEHICLE).unwrap();
            let ev = h.new_event(&m, Priority::Overwrite).unwrap();
            let sp = h.new_action(ActionSpec::Speed { entity: ego, target: i as f64, dynamics: d.clone() }).unwrap();
            h.wrap_action(&ev, &sp).unwrap();
            h.attach_trigger(&start, &ev).unwrap();
        }
        let created = scenario_count(h.ontology());
        let o = h.finalize().unwrap();
        prop_assert_eq!(o.stats().individuals, 67 + created);
        prop_assert_eq!(o.stats().scenario_individuals, created);
    }

    /// Builds are deterministic given the same call sequence.
    #[test]
    fn same_calls_same_ontology(speed in 0.0f64..40.0) {
        let run = || {
            let mut h = minimal();
            let ego = h.element(master::defaults::EGO_VEHICLE).unwrap();
            let d = h.element("indiv_TransitionDynamics1").unwrap();
            let sp = h.new_action(ActionSpec::Speed { entity: ego, target: speed, dynamics: d }).unwrap();
            let init = h.element("indiv_Init1").unwrap();
            h.add_init_action(&init, &sp).unwrap();
            h.finalize().unwrap()
        };
        prop_assert_eq!(run(), run());
    }

    /// Every returned ElementRef names an individual of its class.
    #[test]
    fn element_refs_stay_valid(count in 1usize..8) {
        let mut h = ScenarioHandle::new_scenario("Town04").unwrap();
        let mut refs = Vec::new();
        for _ in 0..count {
            refs.push(h.new_entity(EntityKind::Car, None).unwrap());
            refs.push(h.new_condition(ConditionSpec::SimulationTime { value: 1.0, rule: Rule::LessThan }).unwrap());
        }
        let o = h.ontology();
        for r in &refs {
            prop_assert!(o.is_instance_of(&r.name, &r.class));
        }
    }
}
