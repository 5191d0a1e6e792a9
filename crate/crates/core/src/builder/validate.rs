use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ontology::{Name, Ontology, Origin};

/// Structural rules checked before a scenario can be lowered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValidationRule {
    /// A Storyboard has exactly one Init and at least one Story.
    StoryboardInitAndStory,
    StoryHasAct,
    /// An Act has a StartTrigger and at least one ManeuverGroup.
    ActTriggerAndGroup,
    GroupHasManeuver,
    ManeuverHasEvent,
    /// An Event has a StartTrigger and at least one Action.
    EventTriggerAndAction,
    /// Entity-based conditions reference entities of the scenario.
    ConditionEntity,
    /// Every scenario individual is reachable from the root.
    Reachability,
    /// Exactly one Scenario root with one Storyboard and one Town.
    ScenarioRoot,
    /// An Action wraps exactly one private or global action.
    ActionContent,
    /// Ontology-level consistency (declarations, domains, ranges).
    Integrity,
}

impl ValidationRule {
    /// The cardinality rules, in containment order.
    pub const CARDINALITY: [ValidationRule; 8] = [
        ValidationRule::StoryboardInitAndStory,
        ValidationRule::StoryHasAct,
        ValidationRule::ActTriggerAndGroup,
        ValidationRule::GroupHasManeuver,
        ValidationRule::ManeuverHasEvent,
        ValidationRule::EventTriggerAndAction,
        ValidationRule::ConditionEntity,
        ValidationRule::Reachability,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ValidationRule::StoryboardInitAndStory => "storyboard-init-story",
            ValidationRule::StoryHasAct => "story-act",
            ValidationRule::ActTriggerAndGroup => "act-trigger-group",
            ValidationRule::GroupHasManeuver => "group-maneuver",
            ValidationRule::ManeuverHasEvent => "maneuver-event",
            ValidationRule::EventTriggerAndAction => "event-trigger-action",
            ValidationRule::ConditionEntity => "condition-entity",
            ValidationRule::Reachability => "reachability",
            ValidationRule::ScenarioRoot => "scenario-root",
            ValidationRule::ActionContent => "action-content",
            ValidationRule::Integrity => "integrity",
        }
    }
}

impl fmt::Display for ValidationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub rule: ValidationRule,
    /// Offending individual (`-` when the violation is not tied to one).
    pub individual: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule, self.individual, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scenario is structurally invalid ({} violation(s)): {}", violations.len(), summary(violations))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

fn summary(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl ValidationError {
    pub fn rules(&self) -> BTreeSet<ValidationRule> {
        self.violations.iter().map(|v| v.rule).collect()
    }
}

/// All rule violations of a scenario ontology, sorted. Empty means valid.
pub fn validate(onto: &Ontology) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule, individual: &str, detail: String| {
        out.push(Violation {
            rule,
            individual: individual.to_string(),
            detail,
        })
    };

    if let Err(e) = onto.check_integrity() {
        push(ValidationRule::Integrity, "-", e.to_string());
    }

    let scenario: Vec<&Name> = onto
        .individuals()
        .filter(|i| i.origin == Origin::Scenario)
        .map(|i| &i.name)
        .collect();
    let of = |class: &str| -> Vec<&Name> {
        scenario
            .iter()
            .copied()
            .filter(|i| onto.is_instance_of(i, class))
            .collect()
    };
    let count = |s: &str, p: &str| onto.objects(s, p).len();

    let roots = of("Scenario");
    if roots.len() != 1 {
        push(
            ValidationRule::ScenarioRoot,
            roots.first().map_or("-", |r| r.as_str()),
            format!("expected exactly one Scenario root, found {}", roots.len()),
        );
    }
    for r in &roots {
        let (sb, town) = (count(r, "has_storyboard"), count(r, "has_town"));
        if sb != 1 || town != 1 {
            push(
                ValidationRule::ScenarioRoot,
                r,
                format!("root needs one Storyboard and one Town, has {sb} and {town}"),
            );
        }
    }

    // (rule, individual, child class) for every missing child, so that a
    // detached child fragment is reported with its former parent.
    let mut missing: Vec<(ValidationRule, &Name, &str)> = Vec::new();
    let mut want = |rule, ind, n: usize, class| {
        if n == 0 {
            missing.push((rule, ind, class));
        }
    };

    for s in of("Storyboard") {
        let (inits, stories) = (count(s, "has_init"), count(s, "has_story"));
        want(ValidationRule::StoryboardInitAndStory, s, inits, "Init");
        want(ValidationRule::StoryboardInitAndStory, s, stories, "Story");
        if inits != 1 || stories == 0 {
            push(
                ValidationRule::StoryboardInitAndStory,
                s,
                format!("has {inits} Init(s) and {stories} Story(ies); needs exactly 1 and at least 1"),
            );
        }
    }
    for s in of("Story") {
        want(ValidationRule::StoryHasAct, s, count(s, "has_act"), "Act");
        if count(s, "has_act") == 0 {
            push(ValidationRule::StoryHasAct, s, "Story has no Act".into());
        }
    }
    for a in of("Act") {
        let (st, mg) = (count(a, "has_start_trigger"), count(a, "has_maneuver_group"));
        want(ValidationRule::ActTriggerAndGroup, a, st, "StartTrigger");
        want(ValidationRule::ActTriggerAndGroup, a, mg, "ManeuverGroup");
        if st == 0 || mg == 0 {
            push(
                ValidationRule::ActTriggerAndGroup,
                a,
                format!("has {st} StartTrigger(s) and {mg} ManeuverGroup(s); needs at least 1 of each"),
            );
        }
    }
    for g in of("ManeuverGroup") {
        want(
            ValidationRule::GroupHasManeuver,
            g,
            count(g, "has_maneuver"),
            "Maneuver",
        );
        if count(g, "has_maneuver") == 0 {
            push(
                ValidationRule::GroupHasManeuver,
                g,
                "ManeuverGroup has no Maneuver".into(),
            );
        }
    }
    for m in of("Maneuver") {
        want(
            ValidationRule::ManeuverHasEvent,
            m,
            count(m, "has_event"),
            "Event",
        );
        if count(m, "has_event") == 0 {
            push(
                ValidationRule::ManeuverHasEvent,
                m,
                "Maneuver has no Event".into(),
            );
        }
    }
    for e in of("Event") {
        let (st, ac) = (count(e, "has_start_trigger"), count(e, "has_action"));
        want(ValidationRule::EventTriggerAndAction, e, st, "StartTrigger");
        want(ValidationRule::EventTriggerAndAction, e, ac, "Action");
        if st == 0 || ac == 0 {
            push(
                ValidationRule::EventTriggerAndAction,
                e,
                format!("has {st} StartTrigger(s) and {ac} Action(s); needs at least 1 of each"),
            );
        }
    }
    for a in of("Action") {
        let inner = count(a, "has_private_action") + count(a, "has_global_action");
        if inner != 1 {
            push(
                ValidationRule::ActionContent,
                a,
                format!("wraps {inner} concrete actions; needs exactly 1"),
            );
        }
    }

    let entities: BTreeSet<&Name> = roots.iter().flat_map(|r| onto.objects(r, "has_entity")).collect();
    for c in of("ByEntityCondition") {
        let triggering = onto.objects(c, "has_triggering_entity");
        if triggering.is_empty() {
            push(ValidationRule::ConditionEntity, c, "no triggering entity".into());
        }
        for e in triggering
            .iter()
            .chain(onto.objects(c, "has_reference_entity").iter())
        {
            if !entities.contains(e) {
                push(
                    ValidationRule::ConditionEntity,
                    c,
                    format!("references `{e}`, which is not an entity of the scenario"),
                );
            }
        }
    }

    let mut reachable = BTreeSet::new();
    for r in &roots {
        reachable.extend(onto.reachable_from(r));
    }
    let orphans: BTreeSet<&Name> = scenario
        .iter()
        .copied()
        .filter(|i| !reachable.contains(*i))
        .collect();
    for top in fragment_tops(onto, &orphans) {
        // A fragment that fills a reported gap is the same defect seen from
        // the other side; report it once, on the parent.
        let parent = missing
            .iter()
            .position(|(_, _, class)| onto.is_instance_of(top, class));
        match parent {
            Some(i) => {
                let (rule, ind, _) = missing.remove(i);
                if let Some(v) = out
                    .iter_mut()
                    .find(|v| v.rule == rule && v.individual == ind.as_str())
                {
                    v.detail.push_str(&format!(" (detached: {top})"));
                }
            }
            None => out.push(Violation {
                rule: ValidationRule::Reachability,
                individual: top.to_string(),
                detail: "not reachable from the scenario root".into(),
            }),
        }
    }

    out.sort();
    out
}

/// One representative per disconnected fragment: orphans with no orphan
/// pointing at them, plus the smallest member of any remaining cycle.
fn fragment_tops<'a>(onto: &Ontology, orphans: &BTreeSet<&'a Name>) -> Vec<&'a Name> {
    let has_orphan_parent = |o: &Name| orphans.iter().any(|p| *p != o && links(onto, p, o));
    let mut tops: Vec<&Name> = orphans
        .iter()
        .copied()
        .filter(|o| !has_orphan_parent(o))
        .collect();
    let mut covered = BTreeSet::new();
    for t in &tops {
        covered.extend(onto.reachable_from(t));
    }
    for o in orphans {
        if !covered.contains(*o) {
            tops.push(o);
            covered.extend(onto.reachable_from(o));
        }
    }
    tops
}

fn links(onto: &Ontology, from: &Name, to: &Name) -> bool {
    onto.assertions_of(from)
        .map(|v| v.iter().any(|a| a.object.as_individual() == Some(to)))
        .unwrap_or(false)
}
