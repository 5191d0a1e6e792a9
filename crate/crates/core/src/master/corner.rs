//! Corner-case taxonomy: three layers, six levels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Sensor,
    Content,
    Temporal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Hardware,
    Physical,
    Domain,
    Object,
    Scene,
    Scenario,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Sensor, Layer::Content, Layer::Temporal];

    pub fn class_name(self) -> &'static str {
        match self {
            Layer::Sensor => "SensorLayer",
            Layer::Content => "ContentLayer",
            Layer::Temporal => "TemporalLayer",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Sensor => "sensor",
            Layer::Content => "content",
            Layer::Temporal => "temporal",
        }
    }
}

impl Level {
    pub const ALL: [Level; 6] = [
        Level::Hardware,
        Level::Physical,
        Level::Domain,
        Level::Object,
        Level::Scene,
        Level::Scenario,
    ];

    pub fn class_name(self) -> &'static str {
        match self {
            Level::Hardware => "HardwareLevel",
            Level::Physical => "PhysicalLevel",
            Level::Domain => "DomainLevel",
            Level::Object => "ObjectLevel",
            Level::Scene => "SceneLevel",
            Level::Scenario => "ScenarioLevel",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Hardware => "hardware",
            Level::Physical => "physical",
            Level::Domain => "domain",
            Level::Object => "object",
            Level::Scene => "scene",
            Level::Scenario => "scenario",
        }
    }

    /// The only layer this level may be paired with.
    pub fn layer(self) -> Layer {
        match self {
            Level::Hardware | Level::Physical => Layer::Sensor,
            Level::Domain | Level::Object | Level::Scene => Layer::Content,
            Level::Scenario => Layer::Temporal,
        }
    }

    pub fn from_class_name(class: &str) -> Option<Level> {
        Level::ALL.into_iter().find(|l| l.class_name() == class)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Layer::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown corner-case layer `{s}`"))
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Level::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown corner-case level `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("level `{level}` does not belong to the {layer} layer")]
pub struct InvalidPair {
    pub layer: Layer,
    pub level: Level,
}

/// A corner-case tag attached to a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerCaseLevel {
    layer: Layer,
    level: Level,
    description: String,
}

impl CornerCaseLevel {
    pub fn new(layer: Layer, level: Level, description: impl Into<String>) -> Result<Self, InvalidPair> {
        if level.layer() != layer {
            return Err(InvalidPair { layer, level });
        }
        Ok(CornerCaseLevel {
            layer,
            level,
            description: description.into(),
        })
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}
