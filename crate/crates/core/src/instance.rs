//! Serde shapes of the JSON instance file.
//!
//! ```json
//! {
//!   "name": "toy",
//!   "scales": {"k": 3, "l": 3},
//!   "system": {"id": "S", "children": [{"part": "X"}, {"part": "Y"}]},
//!   "criteria": {"X": [{"id": "c1", "weight": "1", "direction": "maximize"}]},
//!   "alternatives": {"X": [{"id": "X1", "estimates": {"c1": "2.5"}, "priority": 1}]},
//!   "compatibility": {"S": [{"a": "X1", "b": "Y1", "level": 3}]}
//! }
//! ```

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::rational::Dec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub scales: Scales,
    pub system: NodeDoc,
    #[serde(default)]
    pub criteria: IndexMap<String, Vec<CriterionDoc>>,
    pub alternatives: IndexMap<String, Vec<AlternativeDoc>>,
    #[serde(default)]
    pub compatibility: IndexMap<String, Vec<CompatDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcp: Option<McpConfigDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scales {
    /// Number of priority levels; 1 is best.
    pub k: u8,
    /// Top compatibility level; 0 means incompatible.
    pub l: u8,
}

impl Default for Scales {
    fn default() -> Self {
        Scales { k: 3, l: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeDoc {
    Leaf {
        part: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        label: String,
    },
    Internal {
        id: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        label: String,
        children: Vec<NodeDoc>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionDoc {
    pub id: String,
    pub weight: Dec,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub scale: String,
    /// Closed range of the scale, `[worst-or-low, high]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[Dec; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub estimates: IndexMap<String, Dec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<u8>,
    /// Memberships of priority levels 1..k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzzy_priority: Option<Vec<Dec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatDoc {
    pub a: String,
    pub b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
    /// Memberships of levels l, l-1, .., 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzzy: Option<Vec<Dec>>,
}

/// How knapsack items are derived from the morphology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpConfigDoc {
    /// Profit is `profit_base - priority`; defaults to k + 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profit_base: Option<Dec>,
    /// Resource is `resource_base - estimate` of the part's resource criterion.
    pub resource_base: Dec,
    pub parts: IndexMap<String, ResourceRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource_override: Option<ResourceOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResourceOverride {
    Uniform(Dec),
    PerAlternative(IndexMap<String, Dec>),
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }
}
