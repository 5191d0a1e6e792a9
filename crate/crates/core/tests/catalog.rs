use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use cornercase::builder::validate;
use cornercase::catalog;
use cornercase::master::{self, Layer, Level};
use cornercase::ontology::{canonical, Ontology, Origin};
use cornercase::xosc;

const GOLDEN_DATE: &str = "2020-01-01T00:00:00";

/// Individual counts published for the catalog (row, total).
const PUBLISHED: [(&str, usize); 7] = [
    ("b", 94),
    ("c", 93),
    ("d", 164),
    ("e", 111),
    ("f", 94),
    ("g", 104),
    ("h", 95),
];

fn scenario_count(o: &Ontology) -> usize {
    o.individuals().filter(|i| i.origin == Origin::Scenario).count()
}

fn only<'a>(o: &'a Ontology, s: &str, p: &str) -> &'a str {
    let v = o.objects(s, p);
    assert_eq!(v.len(), 1, "{s} {p}: {v:?}");
    v[0].as_str()
}

#[test]
fn direct_entries_match_published_counts() {
    for (id, total) in PUBLISHED {
        let o = catalog::build(id).unwrap();
        assert_eq!(o.stats().individuals, total, "entry ({id})");
        assert_eq!(scenario_count(&o), total - 67, "entry ({id})");
    }
}

#[test]
fn fog_has_94_individuals_27_new() {
    let o = catalog::build("b").unwrap();
    assert_eq!(o.stats().individuals, 94);
    assert_eq!(scenario_count(&o), 27);
}

#[test]
fn fog_contains_the_storyboard_chain() {
    let o = catalog::build("b").unwrap();
    let root = o
        .individuals()
        .find(|i| i.origin == Origin::Scenario && o.is_instance_of(&i.name, "Scenario"))
        .unwrap()
        .name
        .clone();
    let sb = only(&o, &root, "has_storyboard");
    assert!(o.is_instance_of(sb, "Storyboard"));
    assert!(o.is_instance_of(only(&o, sb, "has_init"), "Init"));
    let story = only(&o, sb, "has_story");
    let act = only(&o, story, "has_act");
    let group = only(&o, act, "has_maneuver_group");
    let maneuver = only(&o, group, "has_maneuver");
    let event = only(&o, maneuver, "has_event");
    let action = only(&o, event, "has_action");
    let env_action = only(&o, action, "has_global_action");
    assert!(o.is_instance_of(env_action, "EnvironmentAction"));
    let env = only(&o, env_action, "has_environment");
    let weather = only(&o, env, "has_weather");
    let fog = only(&o, weather, "has_fog");
    assert_eq!(o.value(fog, "visual_range").unwrap().as_f64(), Some(10.0));

    let trigger = only(&o, event, "has_start_trigger");
    assert_eq!(trigger, "indiv_DistanceStartTrigger");
    let cond = only(&o, trigger, "has_condition");
    assert!(o.is_instance_of(cond, "TraveledDistanceCondition"));
    assert_eq!(
        only(&o, cond, "has_triggering_entity"),
        master::defaults::EGO_VEHICLE
    );
}

#[test]
fn fog_init_uses_default_weather() {
    let o = catalog::build("b").unwrap();
    let init = only(&o, "indiv_Storyboard1", "has_init");
    let actions: BTreeSet<_> = o
        .objects(init, "has_init_action")
        .into_iter()
        .map(|n| n.as_str())
        .collect();
    assert!(actions.contains("default_environment_action"));
    assert!(actions.iter().any(|a| o.is_instance_of(a, "TeleportAction")));
    assert!(actions.iter().any(|a| o.is_instance_of(a, "SpeedAction")));
}

#[test]
fn every_entry_builds_and_validates() {
    for e in catalog::entries() {
        let o = catalog::build(e.id).unwrap_or_else(|err| panic!("({}) {err}", e.id));
        assert!(validate(&o).is_empty(), "({})", e.id);
        o.check_integrity().unwrap();
    }
    assert!(matches!(
        catalog::build("z"),
        Err(catalog::CatalogError::UnknownEntry(_))
    ));
}

#[test]
fn tags_follow_the_table() {
    let expect = [
        ("a", Layer::Sensor, Level::Hardware),
        ("b", Layer::Content, Level::Domain),
        ("c", Layer::Content, Level::Object),
        ("d", Layer::Content, Level::Scene),
        ("e", Layer::Content, Level::Scene),
        ("f", Layer::Temporal, Level::Scenario),
        ("g", Layer::Temporal, Level::Scenario),
        ("h", Layer::Temporal, Level::Scenario),
    ];
    for (id, layer, level) in expect {
        let e = catalog::entry(id).unwrap();
        assert_eq!(e.corner_cases.len(), 1);
        assert_eq!(
            (e.corner_cases[0].layer(), e.corner_cases[0].level()),
            (layer, level),
            "({id})"
        );
        let o = catalog::build(id).unwrap();
        let root = o
            .individuals()
            .find(|i| o.is_instance_of(&i.name, "Scenario"))
            .unwrap();
        let tags = o.objects(&root.name, "has_corner_case");
        assert_eq!(tags.len(), 1);
        assert!(o.is_instance_of(tags[0], level.class_name()), "({id})");
    }
    for (id, parts) in [("i", ["d", "f"]), ("j", ["f", "h"])] {
        let e = catalog::entry(id).unwrap();
        assert_eq!(e.fused_from, parts);
        assert_eq!(e.corner_cases.len(), 2);
        let o = catalog::build(id).unwrap();
        let root = o
            .individuals()
            .find(|i| i.origin == Origin::Scenario && o.is_instance_of(&i.name, "Scenario"))
            .unwrap();
        assert_eq!(o.objects(&root.name, "has_corner_case").len(), 2, "({id})");
    }
}

#[test]
fn only_the_dead_pixel_entry_has_a_sensor_effect() {
    let with: Vec<_> = catalog::entries()
        .into_iter()
        .filter(|e| e.sensor_effect)
        .map(|e| e.id)
        .collect();
    assert_eq!(with, ["a"]);
    let o = catalog::build("a").unwrap();
    assert!(o.individuals().any(|i| o.is_instance_of(&i.name, "Camera")));
}

#[test]
fn builds_are_deterministic() {
    for e in catalog::entries() {
        let a = canonical::serialize(&catalog::build(e.id).unwrap());
        let b = canonical::serialize(&catalog::build(e.id).unwrap());
        assert_eq!(a, b, "({})", e.id);
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected =
        fs::read(&path).unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
    assert!(expected == actual, "{name} differs from its golden file");
}

#[test]
fn outputs_match_goldens() {
    let mut table = String::new();
    for e in catalog::entries() {
        let o = catalog::build(e.id).unwrap();
        let s = o.stats();
        writeln!(
            table,
            "{}\tindividuals={}\tscenario={}\tassertions={}\taxioms={}",
            e.id, s.individuals, s.scenario_individuals, s.assertions, s.axioms
        )
        .unwrap();
        check_golden(&format!("{}.onto", e.id), &canonical::serialize_bytes(&o));
        let doc = xosc::lower(&o).unwrap();
        check_golden(
            &format!("{}.xosc", e.id),
            &xosc::emit_xml(&doc, Some(GOLDEN_DATE)),
        );
    }
    check_golden("stats.tsv", table.as_bytes());
    check_golden("a.deadpixels", catalog::dead_pixel_directive().as_bytes());
}
