//! Merging several finalized scenarios over the same town into one.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::builder::{validate, Violation};
use crate::master::defaults;
use crate::ontology::{Assertion, Individual, Literal, Name, Object, Ontology, OntologyError, Origin};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error("fusion needs at least two scenarios, got {0}")]
    TooFewInputs(usize),
    #[error("input {index} is not a valid scenario: {}", first(.violations))]
    InputInvalid {
        index: usize,
        violations: Vec<Violation>,
    },
    #[error("input {index} uses town `{found}`, expected `{expected}`")]
    TownMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("input {index} configures the ego vehicle differently from input 0")]
    EgoConflict { index: usize },
    #[error("input {index} was derived from a different master ontology")]
    MasterMismatch { index: usize },
    #[error("fused scenario failed validation: {}", first(.0))]
    OutputInvalid(Vec<Violation>),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

fn first(v: &[Violation]) -> String {
    v.first().map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct FusionReport {
    /// Root individual of every input, in input order.
    pub inputs: Vec<String>,
    pub output_root: String,
    /// Scenario individuals copied from the inputs into the output.
    pub individuals_merged: usize,
    pub stories_merged: usize,
    pub entities_merged: usize,
    pub init_actions_merged: usize,
    /// Master individuals shared by all inputs and kept once.
    pub defaults_deduplicated: usize,
    /// `(input, old name, new name)` for collision renames.
    pub renamed: Vec<(usize, String, String)>,
    /// `(input, action)` Init actions dropped in favour of an earlier input's.
    pub dropped_init_actions: Vec<(usize, String)>,
    /// `(input, individual)` removed because only dropped elements used them.
    pub pruned: Vec<(usize, String)>,
    /// Master individuals plus all inputs' scenario individuals.
    pub union_count: usize,
}

struct Input<'a> {
    onto: &'a Ontology,
    root: Name,
    storyboard: Name,
    init: Name,
    town: Name,
    stop_triggers: Vec<Name>,
}

fn single<'a>(onto: &'a Ontology, subject: &str, prop: &str) -> Option<&'a Name> {
    match onto.objects(subject, prop).as_slice() {
        [one] => Some(one),
        _ => None,
    }
}

fn inspect(index: usize, onto: &Ontology) -> Result<Input<'_>, FusionError> {
    let violations = validate(onto);
    if !violations.is_empty() {
        return Err(FusionError::InputInvalid { index, violations });
    }
    // Validation guarantees a single root with one storyboard, init and town.
    let root = onto
        .individuals()
        .find(|i| i.origin == Origin::Scenario && onto.is_instance_of(&i.name, "Scenario"))
        .map(|i| i.name.clone())
        .expect("validated scenario has a root");
    let storyboard = single(onto, &root, "has_storyboard").expect("validated").clone();
    let init = single(onto, &storyboard, "has_init").expect("validated").clone();
    let town = single(onto, &root, "has_town").expect("validated").clone();
    let stop_triggers = onto
        .objects(&storyboard, "has_stop_trigger")
        .into_iter()
        .cloned()
        .collect();
    Ok(Input {
        onto,
        root,
        storyboard,
        init,
        town,
        stop_triggers,
    })
}

fn town_name(input: &Input) -> String {
    input
        .onto
        .value(&input.town, "town_name")
        .and_then(|l| l.as_text())
        .unwrap_or_default()
        .to_string()
}

fn is_master(onto: &Ontology, name: &str) -> bool {
    onto.individual(name)
        .is_some_and(|i| matches!(i.origin, Origin::Constant | Origin::Default))
}

/// Master part of a scenario: schema, master individuals and assertions about them.
fn master_part(onto: &Ontology) -> (Vec<String>, BTreeSet<&Assertion>) {
    let schema = onto
        .classes()
        .map(|c| format!("{c:?}"))
        .chain(onto.properties().map(|p| format!("{p:?}")))
        .chain(
            onto.individuals()
                .filter(|i| i.origin != Origin::Scenario)
                .map(|i| format!("{i:?}")),
        )
        .collect();
    let assertions = onto
        .assertions()
        .filter(|a| is_master(onto, &a.subject))
        .collect();
    (schema, assertions)
}

fn ego_related(onto: &Ontology, a: &Assertion) -> bool {
    let ego = onto.reachable_from(defaults::EGO_VEHICLE);
    ego.contains(&a.subject)
}

/// Key under which two Init actions of different inputs conflict.
fn init_conflict_key(onto: &Ontology, action: &Name) -> Option<(String, &'static str)> {
    let kind = [
        "TeleportAction",
        "LongitudinalAction",
        "LateralAction",
        "EnvironmentAction",
    ]
    .into_iter()
    .find(|c| onto.is_instance_of(action, c))?;
    if kind == "EnvironmentAction" {
        return Some(("<global>".into(), kind));
    }
    let entity = onto.objects(action, "has_entity_ref").first()?.to_string();
    Some((entity, kind))
}

fn fresh(used: &BTreeSet<Name>, base: &str) -> Name {
    let mut candidate = Name::new(base).expect("valid base name");
    let mut i = 2;
    while used.contains(&candidate) {
        candidate = Name::new(format!("{base}{i}")).expect("valid name");
        i += 1;
    }
    candidate
}

/// Fuses `scenarios` (n >= 2) into one scenario with a new root, Storyboard
/// and Init. Stories, entities, Init actions and corner-case tags of all
/// inputs are linked into the new root; master individuals appear once.
pub fn fuse(scenarios: &[Ontology]) -> Result<(Ontology, FusionReport), FusionError> {
    if scenarios.len() < 2 {
        return Err(FusionError::TooFewInputs(scenarios.len()));
    }
    let inputs = scenarios
        .iter()
        .enumerate()
        .map(|(i, o)| inspect(i, o))
        .collect::<Result<Vec<_>, _>>()?;

    let town = town_name(&inputs[0]);
    let (schema0, master0) = master_part(inputs[0].onto);
    for (index, input) in inputs.iter().enumerate().skip(1) {
        let found = town_name(input);
        if found != town {
            return Err(FusionError::TownMismatch {
                index,
                expected: town.clone(),
                found,
            });
        }
        let (schema, master) = master_part(input.onto);
        if schema != schema0 {
            return Err(FusionError::MasterMismatch { index });
        }
        if master != master0 {
            let differing = master.symmetric_difference(&master0).copied().collect::<Vec<_>>();
            return Err(if differing.iter().any(|a| ego_related(input.onto, a)) {
                FusionError::EgoConflict { index }
            } else {
                FusionError::MasterMismatch { index }
            });
        }
    }

    // Start from the master part of the first input.
    let mut out = Ontology::new();
    let base = inputs[0].onto;
    out.declare_classes(base.classes().cloned())?;
    for p in base.properties() {
        out.declare_property(p.clone())?;
    }
    for i in base.individuals().filter(|i| i.origin != Origin::Scenario) {
        out.add_individual(i.clone())?;
    }
    for a in &master0 {
        out.assert_property((*a).clone())?;
    }

    let mut report = FusionReport {
        inputs: inputs.iter().map(|i| i.root.to_string()).collect(),
        defaults_deduplicated: out.stats().individuals * (inputs.len() - 1),
        union_count: out.stats().individuals
            + inputs
                .iter()
                .map(|i| i.onto.stats().scenario_individuals)
                .sum::<usize>(),
        ..FusionReport::default()
    };

    let mut used: BTreeSet<Name> = out.individuals().map(|i| i.name.clone()).collect();
    let mut renames: Vec<BTreeMap<Name, Name>> = Vec::new();
    let mut skipped: Vec<BTreeSet<Name>> = Vec::new();
    for (k, input) in inputs.iter().enumerate() {
        let mut skip: BTreeSet<Name> =
            [input.root.clone(), input.storyboard.clone(), input.init.clone()].into();
        skip.extend(input.stop_triggers.iter().cloned());
        if k > 0 {
            skip.insert(input.town.clone());
        }
        let mut map = BTreeMap::new();
        for ind in input.onto.individuals().filter(|i| i.origin == Origin::Scenario) {
            if skip.contains(&ind.name) {
                continue;
            }
            let target = if !used.contains(&ind.name) {
                ind.name.clone()
            } else if same_asset(&out, input.onto, &ind.name) {
                // Identical scenario-local asset already copied.
                map.insert(ind.name.clone(), ind.name.clone());
                continue;
            } else {
                let renamed = fresh(&used, &format!("{}__{k}", ind.name));
                report
                    .renamed
                    .push((k, ind.name.to_string(), renamed.to_string()));
                renamed
            };
            used.insert(target.clone());
            out.add_individual(Individual {
                name: target.clone(),
                classes: ind.classes.clone(),
                origin: Origin::Scenario,
            })?;
            report.individuals_merged += 1;
            map.insert(ind.name.clone(), target);
        }
        renames.push(map);
        skipped.push(skip);
    }

    let root = fresh(&used, "indiv_FusedScenario");
    used.insert(root.clone());
    let storyboard = fresh(&used, "indiv_FusedStoryboard");
    used.insert(storyboard.clone());
    let init = fresh(&used, "indiv_FusedInit");
    used.insert(init.clone());
    for (name, class) in [(&root, "Scenario"), (&storyboard, "Storyboard"), (&init, "Init")] {
        out.add_individual(Individual::new(name.clone(), cls(class), Origin::Scenario))?;
    }
    report.output_root = root.to_string();
    let town0 = renames[0][&inputs[0].town].clone();
    link(&mut out, &root, "has_town", &town0)?;
    link(&mut out, &root, "has_storyboard", &storyboard)?;
    link(&mut out, &storyboard, "has_init", &init)?;

    let mut descriptions = Vec::new();
    let mut init_keys = BTreeSet::new();
    let mut dropped: Vec<BTreeSet<Name>> = Vec::new();
    for (k, input) in inputs.iter().enumerate() {
        let map = &renames[k];
        let skip = &skipped[k];
        let resolve = |n: &Name| map.get(n).cloned().unwrap_or_else(|| n.clone());
        let mut drop = BTreeSet::new();
        for action in input.onto.objects(&input.init, "has_init_action") {
            let key = init_conflict_key(input.onto, action);
            let shared = is_master(input.onto, action)
                || key
                    .as_ref()
                    .is_some_and(|(e, _)| is_master(input.onto, e) || e == "<global>");
            if let Some(key) = key.filter(|_| shared) {
                if !init_keys.insert(key) {
                    if !is_master(input.onto, action) {
                        report.dropped_init_actions.push((k, action.to_string()));
                    }
                    drop.insert(action.clone());
                    continue;
                }
            }
            link(&mut out, &init, "has_init_action", &resolve(action))?;
            report.init_actions_merged += 1;
        }
        for story in input.onto.objects(&input.storyboard, "has_story") {
            link(&mut out, &storyboard, "has_story", &resolve(story))?;
            report.stories_merged += 1;
        }
        for entity in input.onto.objects(&input.root, "has_entity") {
            let e = resolve(entity);
            if !out.objects(&root, "has_entity").contains(&&e) {
                link(&mut out, &root, "has_entity", &e)?;
                report.entities_merged += 1;
            }
        }
        for cc in input.onto.objects(&input.root, "has_corner_case") {
            link(&mut out, &root, "has_corner_case", &resolve(cc))?;
        }
        if let Some(d) = input
            .onto
            .value(&input.root, "scenario_description")
            .and_then(|l| l.as_text())
        {
            descriptions.push(d.to_string());
        }
        // Remaining assertions between copied individuals.
        for a in input.onto.assertions() {
            if skip.contains(&a.subject) || is_master(input.onto, &a.subject) {
                continue;
            }
            let object = match &a.object {
                Object::Individual(o) if skip.contains(o) => continue,
                Object::Individual(o) => Object::Individual(resolve(o)),
                lit => lit.clone(),
            };
            let mapped = Assertion {
                subject: resolve(&a.subject),
                property: a.property.clone(),
                object,
            };
            if !out.contains_assertion(&mapped) {
                out.assert_property(mapped)?;
            }
        }
        dropped.push(drop);
    }
    if !descriptions.is_empty() {
        out.assert_property(Assertion::value(
            root.clone(),
            cls("scenario_description"),
            Literal::String(descriptions.join(" + ")),
        ))?;
    }

    // Stop when every input would have stopped: the conjunction of one stop
    // trigger per input, distributed over inputs with several triggers.
    if inputs.iter().all(|i| !i.stop_triggers.is_empty()) {
        let mut combos: Vec<Vec<Name>> = vec![Vec::new()];
        for (k, input) in inputs.iter().enumerate() {
            let mut next = Vec::new();
            for combo in &combos {
                for t in &input.stop_triggers {
                    let mut c = combo.clone();
                    for cond in input.onto.objects(t, "has_condition") {
                        c.push(renames[k].get(cond).cloned().unwrap_or_else(|| cond.clone()));
                    }
                    next.push(c);
                }
            }
            combos = next;
        }
        for conditions in combos {
            let trigger = fresh(&used, "indiv_FusedStopTrigger");
            used.insert(trigger.clone());
            out.add_individual(Individual::new(
                trigger.clone(),
                cls("StopTrigger"),
                Origin::Scenario,
            ))?;
            for c in conditions {
                if !out.contains_assertion(&Assertion::link(trigger.clone(), cls("has_condition"), c.clone()))
                {
                    link(&mut out, &trigger, "has_condition", &c)?;
                }
            }
            link(&mut out, &storyboard, "has_stop_trigger", &trigger)?;
        }
    }

    // Drop scenario individuals that only dropped Init actions used.
    let reachable = out.reachable_from(&root);
    let orphans: Vec<Name> = out
        .individuals()
        .filter(|i| i.origin == Origin::Scenario && !reachable.contains(&i.name))
        .map(|i| i.name.clone())
        .collect();
    for o in orphans {
        let k = renames
            .iter()
            .position(|m| m.values().any(|v| *v == o))
            .unwrap_or(0);
        out.purge_individual(&o)?;
        report.individuals_merged -= 1;
        report.pruned.push((k, o.to_string()));
    }

    let violations = validate(&out);
    if !violations.is_empty() {
        return Err(FusionError::OutputInvalid(violations));
    }
    Ok((out, report))
}

fn cls(s: &str) -> Name {
    Name::new(s).expect("static names are valid")
}

fn link(out: &mut Ontology, s: &Name, p: &str, o: &Name) -> Result<(), OntologyError> {
    out.assert_property(Assertion::link(s.clone(), cls(p), o.clone()))
}

fn same_asset(out: &Ontology, src: &Ontology, name: &Name) -> bool {
    let (Some(a), Some(b)) = (out.individual(name), src.individual(name)) else {
        return false;
    };
    a.classes == b.classes
        && src.is_instance_of(name, "Asset")
        && out.assertions_of(name).ok() == src.assertions_of(name).ok()
}
