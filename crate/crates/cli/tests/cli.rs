use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cornercase::effects::{read_ppm, write_ppm, Rgb, RgbImage};
use cornercase::master::BUNDLED_ASSETS;
use cornercase::ontology::{canonical, Assertion, Name};

const DATE: &str = "2020-01-01T00:00:00";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cornercase"));
    c.env_remove("CORNERCASE_ASSETS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn catalog_entry(dir: &Path, id: &str) -> PathBuf {
    let o = run(&["catalog", "build", id, "-o", s(dir), "--date", DATE]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.join(format!("{id}.onto"))
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_64() {
    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 64);
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(code(&run(&["stats", "x.onto", "--bogus"])), 64);
    assert_eq!(code(&run(&["merge", "only-one.onto", "-o", "out.onto"])), 64);
    assert_eq!(code(&run(&["catalog", "build", "z", "-o", "/tmp/never"])), 64);
}

#[test]
fn catalog_list_has_ten_entries() {
    let o = run(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let ids: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(ids, ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]);
    assert!(out.lines().nth(1).unwrap().contains("content/domain"));
}

#[test]
fn fog_entry_reports_94_individuals() {
    let dir = tempfile::tempdir().unwrap();
    let onto = catalog_entry(dir.path(), "b");
    let text = run(&["stats", s(&onto)]);
    assert_eq!(code(&text), 0);
    let line = stdout(&text)
        .lines()
        .find(|l| l.starts_with("individuals"))
        .unwrap()
        .to_string();
    assert_eq!(line.split_whitespace().nth(1), Some("94"));
    assert!(line.contains("scenario 27"));
    let machine = run(&["stats", s(&onto), "--format", "machine-readable"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&machine)).unwrap();
    assert_eq!(json["individuals"], 94);
    assert_eq!(json["scenario_individuals"], 27);
    assert_eq!(json["classes"], 100);
}

#[test]
fn scenario_file_builds_the_same_ontology_as_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let from_catalog = catalog_entry(dir.path(), "b");
    let from_file = dir.path().join("fog.onto");
    let o = run(&["build", s(&repo().join("scenarios/fog.scn")), "-o", s(&from_file)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(from_file).unwrap(), fs::read(from_catalog).unwrap());
}

#[test]
fn merge_then_convert_gives_a_valid_document() {
    let dir = tempfile::tempdir().unwrap();
    let f = catalog_entry(dir.path(), "f");
    let h = catalog_entry(dir.path(), "h");
    let fused = dir.path().join("fh.onto");
    let report = dir.path().join("fh.json");
    let o = run(&["merge", s(&f), s(&h), "-o", s(&fused), "--report", s(&report)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(rep["union_count"], 122);
    assert_eq!(rep["stories_merged"], 2);

    let xosc = dir.path().join("fh.xosc");
    let o = run(&["convert", s(&fused), "-o", s(&xosc), "--date", DATE]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&run(&["validate", s(&xosc)])), 0);
    assert_eq!(code(&run(&["validate", s(&fused)])), 0);
    // Same bytes as the catalog's fused entry (j).
    let j = dir.path().join("j.xosc");
    catalog_entry(dir.path(), "j");
    assert_eq!(fs::read(xosc).unwrap(), fs::read(j).unwrap());
}

#[test]
fn missing_event_action_fails_validation_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = catalog_entry(dir.path(), "b");
    let mut onto = canonical::parse_bytes(&fs::read(&path).unwrap()).unwrap();
    let n = |s: &str| Name::new(s).unwrap();
    onto.retract(&Assertion::link(
        n("indiv_Event1"),
        n("has_action"),
        n("indiv_Action1"),
    ))
    .unwrap();
    let broken = dir.path().join("broken.onto");
    fs::write(&broken, canonical::serialize_bytes(&onto)).unwrap();
    for args in [
        vec!["validate", s(&broken)],
        vec!["convert", s(&broken), "-o", "/dev/null"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(stderr(&o).contains("event-trigger-action"), "{}", stderr(&o));
        assert!(stderr(&o).contains("indiv_Event1"));
    }
}

#[test]
fn io_and_parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["stats", s(&dir.path().join("absent.onto"))])), 1);
    let junk = dir.path().join("junk.onto");
    fs::write(&junk, "not an ontology\n").unwrap();
    assert_eq!(code(&run(&["stats", s(&junk)])), 1);
    let scn = dir.path().join("bad.scn");
    fs::write(&scn, "scenario town=Town04\nentity ego kind=spaceship\n").unwrap();
    let o = run(&["build", s(&scn), "-o", s(&dir.path().join("x.onto"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("bad.scn:2:"), "{}", stderr(&o));
}

#[test]
fn bad_date_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let onto = catalog_entry(dir.path(), "b");
    let o = run(&[
        "convert",
        s(&onto),
        "-o",
        s(&dir.path().join("b2.xosc")),
        "--date",
        "yesterday",
    ]);
    assert_eq!(code(&o), 64);
}

#[test]
fn inputs_are_never_modified() {
    let dir = tempfile::tempdir().unwrap();
    let f = catalog_entry(dir.path(), "f");
    let h = catalog_entry(dir.path(), "h");
    let before = (fs::read(&f).unwrap(), fs::read(&h).unwrap());
    run(&["merge", s(&f), s(&h), "-o", s(&dir.path().join("m.onto"))]);
    run(&["convert", s(&f), "-o", s(&dir.path().join("f2.xosc"))]);
    run(&["validate", s(&h)]);
    run(&["stats", s(&f)]);
    assert_eq!((fs::read(&f).unwrap(), fs::read(&h).unwrap()), before);
}

#[test]
fn catalog_entry_a_ships_a_mask_that_the_effects_command_applies() {
    let dir = tempfile::tempdir().unwrap();
    catalog_entry(dir.path(), "a");
    let mask = dir.path().join("a.deadpixels");
    assert!(mask.exists());
    let frame = RgbImage::from_pixel(800, 600, Rgb([120, 130, 140]));
    let input = dir.path().join("frame.ppm");
    fs::write(&input, write_ppm(&frame).unwrap()).unwrap();
    let out = dir.path().join("dead.ppm");
    let o = run(&[
        "effects",
        "deadpixels",
        s(&input),
        "-o",
        s(&out),
        "--mask",
        s(&mask),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let result = read_ppm(&fs::read(&out).unwrap()).unwrap();
    let changed = frame
        .pixels()
        .zip(result.pixels())
        .filter(|(a, b)| a != b)
        .count();
    assert_eq!(changed, 12);

    let bright = dir.path().join("bright.ppm");
    let o = run(&[
        "effects",
        "overexposure",
        s(&input),
        "-o",
        s(&bright),
        "--gain",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let result = read_ppm(&fs::read(&bright).unwrap()).unwrap();
    assert!(result.pixels().all(|p| p.0 == [240, 255, 255]));
    assert_eq!(
        code(&run(&[
            "effects",
            "overexposure",
            s(&input),
            "-o",
            s(&bright),
            "--gain",
            "1"
        ])),
        64
    );
    let small = RgbImage::new(4, 4);
    fs::write(&input, write_ppm(&small).unwrap()).unwrap();
    let o = run(&[
        "effects",
        "deadpixels",
        s(&input),
        "-o",
        s(&out),
        "--mask",
        s(&mask),
    ]);
    assert_eq!(code(&o), 64);
}

#[test]
fn asset_manifest_can_be_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("assets.toml");
    let extra = "\n[[asset]]\nid = \"vehicle.custom.van\"\ncategory = \"car\"\n\
                 dimensions = { length = 5.2, width = 2.0, height = 2.1 }\n";
    fs::write(&manifest, format!("{BUNDLED_ASSETS}{extra}")).unwrap();
    let scn = dir.path().join("van.scn");
    let fog = fs::read_to_string(repo().join("scenarios/fog.scn")).unwrap();
    let with_van = fog.replace(
        "entity ego kind=ego\n",
        "entity ego kind=ego\nentity van kind=car asset=vehicle.custom.van\n\
         action van_place type=teleport entity=van x=13.5 y=150.0 z=0.3 heading=0.0\n",
    );
    let with_van = with_van.replace("actions=ego_place,", "actions=van_place,ego_place,");
    fs::write(&scn, with_van).unwrap();
    let out = dir.path().join("van.onto");

    let o = run(&["build", s(&scn), "-o", s(&out)]);
    assert_eq!(code(&o), 1, "bundled manifest lacks the van");
    assert!(stderr(&o).contains("vehicle.custom.van"));

    let o = bin()
        .env("CORNERCASE_ASSETS", &manifest)
        .args(["build", s(&scn), "-o", s(&out)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("has_asset vehicle.custom.van"));
    let xosc = dir.path().join("van.xosc");
    assert_eq!(
        code(&run(&["convert", s(&out), "-o", s(&xosc), "--date", DATE])),
        0
    );
}
