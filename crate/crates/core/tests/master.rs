use std::collections::BTreeSet;

use cornercase::master::{
    self, build_master, build_master_with, vocab, AssetCategory, AssetManifest, AssetRef, MasterError,
    SchemaManifest, BUNDLED_SCHEMA,
};
use cornercase::ontology::{Origin, PropertyKind};

#[test]
fn master_counts_match_published_statistics() {
    let m = build_master().unwrap();
    let s = m.ontology().stats();
    assert_eq!(s.classes, 100);
    assert_eq!(s.object_properties, 53);
    assert_eq!(s.data_properties, 44);
    assert_eq!(s.individuals, 67);
    assert_eq!(s.scenario_individuals, 0);
}

#[test]
fn individuals_are_constants_or_defaults() {
    let m = build_master().unwrap();
    assert!(m
        .ontology()
        .individuals()
        .all(|i| matches!(i.origin, Origin::Constant | Origin::Default)));
}

#[test]
fn build_is_deterministic() {
    assert_eq!(build_master().unwrap(), build_master().unwrap());
    assert_eq!(build_master().unwrap().ontology(), master::bundled().ontology());
}

#[test]
fn default_ego_reaches_a_bounding_box_and_a_camera() {
    let o = master::bundled().ontology();
    let ego = master::defaults::EGO_VEHICLE;
    assert!(o.is_instance_of(ego, "EgoVehicle"));
    let bbs = o.objects(ego, "has_bounding_box");
    assert_eq!(bbs.len(), 1);
    assert!(o.is_instance_of(bbs[0], "BoundingBox"));
    let cams = o.objects(ego, "has_sensor");
    assert_eq!(cams.len(), 1);
    assert!(o.is_instance_of(cams[0], "Camera"));
}

#[test]
fn default_weather_and_start_trigger_exist() {
    let o = master::bundled().ontology();
    assert!(o.is_instance_of(master::defaults::WEATHER, "Weather"));
    let trig = master::defaults::START_TRIGGER;
    assert!(o.is_instance_of(trig, "StartTrigger"));
    let conds = o.objects(trig, "has_condition");
    assert_eq!(conds.len(), 1);
    assert!(o.is_instance_of(conds[0], "SimulationTimeCondition"));
    assert_eq!(o.value(conds[0], "condition_value").unwrap().as_f64(), Some(0.0));
    assert_eq!(o.objects(conds[0], "has_rule")[0].as_str(), "greaterThan");
}

#[test]
fn mandated_classes_sit_in_their_subtrees() {
    let o = master::bundled().ontology();
    for (c, ancestor) in [
        ("Fog", "Weather"),
        ("Precipitation", "Weather"),
        ("Sun", "Weather"),
        ("SimulationTimeCondition", "ByValueCondition"),
        ("StoryboardElementStateCondition", "ByValueCondition"),
        ("TraveledDistanceCondition", "ByEntityCondition"),
        ("RelativeDistanceCondition", "ByEntityCondition"),
        ("ByEntityCondition", "Condition"),
        ("ByValueCondition", "Condition"),
        ("EgoVehicle", "Vehicle"),
        ("Vehicle", "Entity"),
        ("Pedestrian", "Entity"),
        ("Bicycle", "Entity"),
        ("Misc", "Entity"),
        ("SpeedAction", "PrivateAction"),
        ("TeleportAction", "PrivateAction"),
        ("RelativeLaneChangeAction", "PrivateAction"),
        ("EnvironmentAction", "GlobalAction"),
        ("HardwareLevel", "SensorLayer"),
        ("PhysicalLevel", "SensorLayer"),
        ("DomainLevel", "ContentLayer"),
        ("ObjectLevel", "ContentLayer"),
        ("SceneLevel", "ContentLayer"),
        ("ScenarioLevel", "TemporalLayer"),
    ] {
        assert!(o.is_subclass_of(c, ancestor), "{c} not under {ancestor}");
    }
    let weather: BTreeSet<&str> = o.subclasses("Weather").into_iter().map(|n| n.as_str()).collect();
    assert_eq!(weather, BTreeSet::from(["Fog", "Precipitation", "Sun"]));
    assert_eq!(
        o.property("has_time_of_day").unwrap().kind(),
        PropertyKind::Object
    );
}

#[test]
fn mandated_classes_are_in_the_expected_groups() {
    let schema = master::bundled().schema();
    for (c, g) in [
        ("Scenario", "scenario_environment"),
        ("Town", "scenario_environment"),
        ("Environment", "scenario_environment"),
        ("Vehicle", "entities"),
        ("BoundingBox", "entities"),
        ("Event", "main_elements"),
        ("StartTrigger", "main_elements"),
        ("TeleportAction", "actions"),
        ("TransitionDynamics", "actions"),
        ("TraveledDistanceCondition", "conditions"),
        ("Fog", "weather_time"),
        ("TimeOfDay", "weather_time"),
        ("DomainLevel", "corner_case"),
    ] {
        assert_eq!(schema.group_of(c), Some(g), "{c}");
    }
}

#[test]
fn constants_cover_every_enumeration_token() {
    let o = master::bundled().ontology();
    for (class, tokens) in vocab::all_enumerations() {
        let installed: BTreeSet<&str> = o
            .individuals_of_class(class, false)
            .unwrap()
            .into_iter()
            .map(|i| i.name.as_str())
            .collect();
        let expected: BTreeSet<&str> = tokens.into_iter().collect();
        assert_eq!(installed, expected, "{class}");
        for t in &expected {
            assert_eq!(o.individual(t).unwrap().origin, Origin::Constant);
        }
    }
}

#[test]
fn roster_size_mismatch_is_manifest_corrupt() {
    let broken = BUNDLED_SCHEMA.replace("    \"MiscAsset < Asset\",\n", "");
    assert!(matches!(
        SchemaManifest::from_toml(&broken),
        Err(MasterError::ManifestCorrupt(_))
    ));
}

#[test]
fn missing_mandated_class_is_manifest_corrupt() {
    // Renaming keeps the count at 100 but drops a mandated class.
    let broken = BUNDLED_SCHEMA.replace("\"Fog < Weather\"", "\"Mist < Weather\"");
    let err = SchemaManifest::from_toml(&broken).unwrap_err();
    assert!(err.to_string().contains("Fog"), "{err}");
}

#[test]
fn car_assets_carry_the_manifest_prefix() {
    let text = master::BUNDLED_ASSETS;
    // Read the prefix straight from the data file.
    let table: toml::Table = text.parse().unwrap();
    let prefix = table["categories"]["car"]["prefix"].as_str().unwrap();
    let cars = master::bundled().assets().assets(AssetCategory::Car);
    assert!(!cars.is_empty());
    assert!(cars.iter().all(|a| a.id.starts_with(prefix)));
    let ids: Vec<&str> = cars.iter().map(|a| a.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn misc_assets_include_a_vending_machine() {
    let misc = master::bundled().assets().misc_assets();
    assert!(misc.iter().any(|a| a.id.contains("vendingmachine")));
}

#[test]
fn registered_asset_appears_in_a_rebuilt_master() {
    let mut assets = AssetManifest::bundled();
    assets
        .register(AssetRef::new("static.prop.trafficcone01", AssetCategory::Misc).unwrap())
        .unwrap();
    let m = build_master_with(SchemaManifest::bundled(), assets).unwrap();
    assert!(m
        .ontology()
        .is_instance_of("static.prop.trafficcone01", "MiscAsset"));
    assert_eq!(m.ontology().stats().individuals, 68);
}
