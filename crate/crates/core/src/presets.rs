//! Scenario files shipped with the crate.

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

const PRESETS: &[(&str, &str)] = &[
    ("fig3-perfect", include_str!("../presets/fig3-perfect.json")),
    ("fig3-duration-error", include_str!("../presets/fig3-duration-error.json")),
    ("fig3-all-errors", include_str!("../presets/fig3-all-errors.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// Raw JSON text of a preset.
pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn load(name: &str) -> Result<ScenarioConfig> {
    let text = source(name).ok_or_else(|| Error::config("preset", format!("unknown preset `{name}`")))?;
    ScenarioConfig::from_json(text)
}
