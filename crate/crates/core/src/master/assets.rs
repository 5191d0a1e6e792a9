use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MasterError;
use crate::ontology::Name;

pub const BUNDLED_ASSETS: &str = include_str!("../../data/assets.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetCategory {
    Car,
    Pedestrian,
    Bicycle,
    Misc,
}

impl AssetCategory {
    pub const ALL: [AssetCategory; 4] = [
        AssetCategory::Car,
        AssetCategory::Pedestrian,
        AssetCategory::Bicycle,
        AssetCategory::Misc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AssetCategory::Car => "car",
            AssetCategory::Pedestrian => "pedestrian",
            AssetCategory::Bicycle => "bicycle",
            AssetCategory::Misc => "misc",
        }
    }

    /// Ontology class of asset individuals in this category.
    pub fn class_name(self) -> &'static str {
        match self {
            AssetCategory::Car => "CarAsset",
            AssetCategory::Pedestrian => "PedestrianAsset",
            AssetCategory::Bicycle => "BicycleAsset",
            AssetCategory::Misc => "MiscAsset",
        }
    }
}

impl fmt::Display for AssetCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssetCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        AssetCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown asset category `{s}`"))
    }
}

/// Bounding-box extents in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dimensions {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssetRef {
    pub id: Name,
    pub category: AssetCategory,
    pub dimensions: Option<Dimensions>,
}

impl AssetRef {
    pub fn new(id: &str, category: AssetCategory) -> Result<Self, MasterError> {
        let id = Name::new(id).map_err(|_| MasterError::InvalidAssetId(id.to_string()))?;
        Ok(AssetRef {
            id,
            category,
            dimensions: None,
        })
    }

    pub fn with_dimensions(mut self, dimensions: Dimensions) -> Self {
        self.dimensions = Some(dimensions);
        self
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssetFile {
    format: u32,
    categories: BTreeMap<AssetCategory, CategoryFile>,
    #[serde(default)]
    asset: Vec<AssetEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    prefix: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssetEntry {
    id: String,
    category: AssetCategory,
    dimensions: Option<Dimensions>,
}

/// Blueprint ids available as entity models, keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetManifest {
    prefixes: BTreeMap<AssetCategory, String>,
    assets: BTreeMap<Name, AssetRef>,
}

impl AssetManifest {
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED_ASSETS).expect("bundled asset manifest is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, MasterError> {
        let file: AssetFile =
            toml::from_str(text).map_err(|e| MasterError::ManifestCorrupt(format!("assets: {e}")))?;
        if file.format != 1 {
            return Err(MasterError::ManifestCorrupt(format!(
                "assets: unsupported format {}",
                file.format
            )));
        }
        let mut manifest = AssetManifest {
            prefixes: file.categories.into_iter().map(|(c, f)| (c, f.prefix)).collect(),
            assets: BTreeMap::new(),
        };
        for entry in file.asset {
            let mut asset = AssetRef::new(&entry.id, entry.category)
                .map_err(|e| MasterError::ManifestCorrupt(format!("assets: {e}")))?;
            asset.dimensions = entry.dimensions;
            manifest
                .register(asset)
                .map_err(|e| MasterError::ManifestCorrupt(format!("assets: {e}")))?;
        }
        Ok(manifest)
    }

    pub fn prefix(&self, category: AssetCategory) -> Option<&str> {
        self.prefixes.get(&category).map(String::as_str)
    }

    /// All assets of `category`, ordered by id.
    pub fn assets(&self, category: AssetCategory) -> Vec<&AssetRef> {
        self.assets.values().filter(|a| a.category == category).collect()
    }

    pub fn car_assets(&self) -> Vec<&AssetRef> {
        self.assets(AssetCategory::Car)
    }

    pub fn pedestrian_assets(&self) -> Vec<&AssetRef> {
        self.assets(AssetCategory::Pedestrian)
    }

    pub fn bicycle_assets(&self) -> Vec<&AssetRef> {
        self.assets(AssetCategory::Bicycle)
    }

    pub fn misc_assets(&self) -> Vec<&AssetRef> {
        self.assets(AssetCategory::Misc)
    }

    pub fn get(&self, id: &str) -> Option<&AssetRef> {
        self.assets.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AssetRef> {
        self.assets.values()
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }

    /// Adds an asset. The id must be unused and carry its category prefix when
    /// the manifest declares one.
    pub fn register(&mut self, asset: AssetRef) -> Result<(), MasterError> {
        if self.assets.contains_key(asset.id.as_str()) {
            return Err(MasterError::DuplicateAsset(asset.id.to_string()));
        }
        if let Some(prefix) = self.prefixes.get(&asset.category) {
            if !asset.id.starts_with(prefix.as_str()) {
                return Err(MasterError::InvalidAssetId(format!(
                    "{} (expected prefix `{prefix}` for {})",
                    asset.id, asset.category
                )));
            }
        }
        if let Some(d) = asset.dimensions {
            if ![d.length, d.width, d.height]
                .iter()
                .all(|v| v.is_finite() && *v > 0.0)
            {
                return Err(MasterError::InvalidAssetId(format!(
                    "{}: dimensions must be positive",
                    asset.id
                )));
            }
        }
        self.assets.insert(asset.id.clone(), asset);
        Ok(())
    }
}
