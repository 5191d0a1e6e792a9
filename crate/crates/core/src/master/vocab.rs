//! OpenSCENARIO enumeration tokens installed as constant individuals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident, $class:literal { $($variant:ident = $token:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $token)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            /// Class the constant individuals belong to.
            pub const CLASS: &'static str = $class;

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownToken;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($token => Ok($name::$variant),)+
                    _ => Err(UnknownToken { class: $class, token: s.to_string() }),
                }
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{token}` is not a {class} token")]
pub struct UnknownToken {
    pub class: &'static str,
    pub token: String,
}

token_enum!(
    /// Arithmetic comparison rule.
    Rule, "Rule" {
        GreaterThan = "greaterThan",
        LessThan = "lessThan",
        EqualTo = "equalTo",
    }
);

token_enum!(Priority, "Priority" {
    Overwrite = "overwrite",
    Skip = "skip",
    Parallel = "parallel",
});

token_enum!(StoryboardElementState, "StoryboardElementState" {
    StartTransition = "startTransition",
    EndTransition = "endTransition",
    StopTransition = "stopTransition",
    SkipTransition = "skipTransition",
    CompleteState = "completeState",
    RunningState = "runningState",
    StandbyState = "standbyState",
});

token_enum!(StoryboardElementType, "StoryboardElementType" {
    Story = "story",
    Act = "act",
    ManeuverGroup = "maneuverGroup",
    Maneuver = "maneuver",
    Event = "event",
    Action = "action",
});

token_enum!(DynamicsShape, "DynamicsShape" {
    Linear = "linear",
    Cubic = "cubic",
    Sinusoidal = "sinusoidal",
    Step = "step",
});

token_enum!(DynamicsDimension, "DynamicsDimension" {
    Time = "time",
    Distance = "distance",
    Rate = "rate",
});

token_enum!(RelativeDistanceType, "RelativeDistanceType" {
    Longitudinal = "longitudinal",
    Lateral = "lateral",
    CartesianDistance = "cartesianDistance",
});

token_enum!(ConditionEdge, "ConditionEdge" {
    Rising = "rising",
    Falling = "falling",
    RisingOrFalling = "risingOrFalling",
    None = "none",
});

token_enum!(PrecipitationType, "PrecipitationType" {
    Dry = "dry",
    Rain = "rain",
    Snow = "snow",
});

token_enum!(CloudState, "CloudState" {
    SkyOff = "skyOff",
    Free = "free",
    Cloudy = "cloudy",
    Overcast = "overcast",
    Rainy = "rainy",
});

token_enum!(TriggeringEntitiesRule, "TriggeringEntitiesRule" {
    Any = "any",
    All = "all",
});

/// `(class, tokens)` for every enumeration, used to cross-check the manifest.
pub fn all_enumerations() -> Vec<(&'static str, Vec<&'static str>)> {
    fn tokens<T: Copy>(all: &[T], f: fn(T) -> &'static str) -> Vec<&'static str> {
        all.iter().map(|t| f(*t)).collect()
    }
    vec![
        (Rule::CLASS, tokens(Rule::ALL, Rule::as_str)),
        (Priority::CLASS, tokens(Priority::ALL, Priority::as_str)),
        (
            StoryboardElementState::CLASS,
            tokens(StoryboardElementState::ALL, StoryboardElementState::as_str),
        ),
        (
            StoryboardElementType::CLASS,
            tokens(StoryboardElementType::ALL, StoryboardElementType::as_str),
        ),
        (
            DynamicsShape::CLASS,
            tokens(DynamicsShape::ALL, DynamicsShape::as_str),
        ),
        (
            DynamicsDimension::CLASS,
            tokens(DynamicsDimension::ALL, DynamicsDimension::as_str),
        ),
        (
            RelativeDistanceType::CLASS,
            tokens(RelativeDistanceType::ALL, RelativeDistanceType::as_str),
        ),
        (
            ConditionEdge::CLASS,
            tokens(ConditionEdge::ALL, ConditionEdge::as_str),
        ),
        (
            PrecipitationType::CLASS,
            tokens(PrecipitationType::ALL, PrecipitationType::as_str),
        ),
        (CloudState::CLASS, tokens(CloudState::ALL, CloudState::as_str)),
        (
            TriggeringEntitiesRule::CLASS,
            tokens(TriggeringEntitiesRule::ALL, TriggeringEntitiesRule::as_str),
        ),
    ]
}
