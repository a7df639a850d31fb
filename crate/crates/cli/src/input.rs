//! Reading descriptors and targets from paths or inline JSON.

use std::fs;

use orbitspace::maps::{Map, MapDescriptor};
use orbitspace::realizer::{Realization, TargetSet};
use orbitspace::Point;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::{CliError, Report, RunConfig};

/// What `--map` can hold: a bare descriptor, or the output of `realize`
/// (which also carries the plan used by `verify`).
#[derive(Debug, Clone, PartialEq)]
pub enum MapInput {
    Descriptor(MapDescriptor),
    Realization(Realization),
}

impl MapInput {
    pub fn into_map(self) -> Result<Map, CliError> {
        let descriptor = match self {
            MapInput::Descriptor(d) => d,
            MapInput::Realization(r) => r.map,
        };
        Ok(Map::new(descriptor)?)
    }
}

/// Reads `arg` as inline JSON if it starts with `{` or `[`, else as a path.
/// Returns the text and a name for error messages.
pub fn read_source(arg: &str) -> Result<(String, String), CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok((arg.to_string(), "inline JSON".to_string()));
    }
    let text = fs::read_to_string(arg).map_err(|source| CliError::Io { path: arg.to_string(), source })?;
    Ok((text, arg.to_string()))
}

/// Deserializes `text`, keeping the line and column of the first error.
pub fn parse<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        // serde_json appends the position, which the error reports itself.
        let message = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m).to_string();
        CliError::Parse { source_name: source_name.to_string(), line: e.line(), column: e.column(), message }
    })
}

fn has_keys(v: &Value, keys: &[&str]) -> bool {
    keys.iter().all(|k| v.get(k).is_some())
}

pub fn parse_map(text: &str, source_name: &str) -> Result<MapInput, CliError> {
    // The shape is decided on a generic parse; the typed parse that follows
    // reports errors with their position.
    let value: Value = parse(text, source_name)?;
    if value.get("result").is_some_and(|r| has_keys(r, &["map", "plan"])) {
        let report: Report<Realization> = parse(text, source_name)?;
        Ok(MapInput::Realization(report.result))
    } else if has_keys(&value, &["map", "plan"]) {
        Ok(MapInput::Realization(parse(text, source_name)?))
    } else {
        Ok(MapInput::Descriptor(parse(text, source_name)?))
    }
}

pub fn load_map(config: &RunConfig) -> Result<MapInput, CliError> {
    let arg = config.map.as_deref().ok_or_else(|| CliError::Usage("--map is required".into()))?;
    let (text, name) = read_source(arg)?;
    parse_map(&text, &name)
}

/// A target is either `{"polyline": [[re, im], …], "bound": C}` or a bare
/// array of points. `--bound` overrides the stored ring constant; without
/// either, the smallest fitting `C` is used.
pub fn parse_target(text: &str, source_name: &str, bound: Option<f64>) -> Result<TargetSet, CliError> {
    let value: Value = parse(text, source_name)?;
    let target = if value.is_array() {
        let polyline: Vec<Point> = parse(text, source_name)?;
        match bound {
            Some(c) => TargetSet::new(polyline, c)?,
            None => TargetSet::fitted(polyline)?,
        }
    } else {
        let mut target: TargetSet = parse(text, source_name)?;
        if let Some(c) = bound {
            target.bound = c;
        }
        target.validate()?;
        target
    };
    Ok(target)
}

pub fn load_target(config: &RunConfig) -> Result<TargetSet, CliError> {
    let arg = config.target.as_deref().ok_or_else(|| CliError::Usage("--target is required".into()))?;
    let (text, name) = read_source(arg)?;
    parse_target(&text, &name, config.bound)
}
