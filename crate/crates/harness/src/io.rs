//! JSON files for profiles, assignments and reports.
//!
//! ```text
//! profile:    {"objects": [..], "quota": c, "preferences": {"agent": [..]}}
//!             ("relaxed": true drops the m = n*c requirement)
//! assignment: {"matrix": {"agent": {"object": "p/q"}}}   omitted entries are 0
//!             {"bundles": {"agent": [..]}}
//! ```

use std::fs;
use std::path::Path;

use mudra::{DiscreteAssignment, Instance, PreferenceProfile, RandomAssignment, Rational};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::HarnessError;

/// A schema violation at a JSON path such as `preferences.2[3]`.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    value.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(map: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, SchemaError> {
    map.get(key)
        .ok_or_else(|| schema(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn string_list(value: &Value, path: &str) -> Result<Vec<String>, SchemaError> {
    let items = value
        .as_array()
        .ok_or_else(|| schema(path, "expected an array of strings"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema(format!("{path}[{k}]"), "expected a string"))
        })
        .collect()
}

fn reject_unknown(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), SchemaError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(join(path, k), "unknown field")),
        None => Ok(()),
    }
}

pub fn profile_from_value(value: &Value) -> Result<PreferenceProfile, SchemaError> {
    let root = object(value, "$")?;
    reject_unknown(root, "", &["objects", "quota", "relaxed", "preferences"])?;
    let objects = string_list(field(root, "", "objects")?, "objects")?;
    for (k, o) in objects.iter().enumerate() {
        if objects[..k].contains(o) {
            return Err(schema(format!("objects[{k}]"), format!("duplicate object {o:?}")));
        }
    }
    let relaxed = match root.get("relaxed") {
        None => false,
        Some(v) => v.as_bool().ok_or_else(|| schema("relaxed", "expected a boolean"))?,
    };
    let prefs = object(field(root, "", "preferences")?, "preferences")?;
    let agents: Vec<String> = prefs.keys().cloned().collect();
    if agents.is_empty() {
        return Err(schema("preferences", "at least one agent is required"));
    }
    let instance = if relaxed {
        if root.contains_key("quota") {
            return Err(schema("quota", "relaxed profiles derive the quota"));
        }
        Instance::relaxed(agents, objects.clone())
    } else {
        let quota = field(root, "", "quota")?
            .as_u64()
            .ok_or_else(|| schema("quota", "expected a positive integer"))?;
        Instance::new(agents, objects.clone(), quota as usize)
    }
    .map_err(|e| schema("$", e.to_string()))?;

    let mut orders = Vec::with_capacity(instance.n());
    for (agent, list) in prefs {
        let path = format!("preferences.{agent}");
        let names = string_list(list, &path)?;
        let mut order = Vec::with_capacity(names.len());
        for (k, name) in names.iter().enumerate() {
            let o = instance
                .object_index(name)
                .ok_or_else(|| schema(format!("{path}[{k}]"), format!("unknown object {name:?}")))?;
            if order.contains(&o) {
                return Err(schema(format!("{path}[{k}]"), format!("duplicate object {name:?}")));
            }
            order.push(o);
        }
        if order.len() != instance.m() {
            return Err(schema(
                path,
                format!("ranks {} of {} objects; a strict order over all objects is required", order.len(), instance.m()),
            ));
        }
        orders.push(order);
    }
    PreferenceProfile::new(instance, orders).map_err(|e| schema("preferences", e.to_string()))
}

fn rational(value: &Value, path: &str) -> Result<Rational, SchemaError> {
    match value {
        Value::String(s) => s.parse().map_err(|e| schema(path, format!("{e}: {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(Rational::from)
            .ok_or_else(|| schema(path, "numbers must be integers; write fractions as \"p/q\" strings")),
        _ => Err(schema(path, "expected a fraction string such as \"3/8\"")),
    }
}

/// Parses an assignment over `instance`. Matrices are validated for
/// feasibility; discrete bundles must be balanced.
pub fn assignment_from_value(value: &Value, instance: &Instance) -> Result<RandomAssignment, SchemaError> {
    let root = object(value, "$")?;
    reject_unknown(root, "", &["matrix", "bundles"])?;
    match (root.get("matrix"), root.get("bundles")) {
        (Some(matrix), None) => {
            let matrix = object(matrix, "matrix")?;
            let mut rows = vec![vec![Rational::zero(); instance.m()]; instance.n()];
            check_agent_keys(matrix, instance, "matrix")?;
            for (agent, row) in matrix {
                let i = instance.agent_index(agent).expect("checked above");
                let path = format!("matrix.{agent}");
                for (obj, x) in object(row, &path)? {
                    let entry_path = format!("{path}.{obj}");
                    let o = instance
                        .object_index(obj)
                        .ok_or_else(|| schema(&entry_path, "unknown object"))?;
                    rows[i][o] = rational(x, &entry_path)?;
                }
            }
            RandomAssignment::new(instance.clone(), rows).map_err(|e| schema("matrix", e.to_string()))
        }
        (None, Some(bundles)) => {
            let bundles_map = object(bundles, "bundles")?;
            check_agent_keys(bundles_map, instance, "bundles")?;
            let mut lists = vec![Vec::new(); instance.n()];
            for (agent, list) in bundles_map {
                let i = instance.agent_index(agent).expect("checked above");
                let path = format!("bundles.{agent}");
                for (k, name) in string_list(list, &path)?.iter().enumerate() {
                    let o = instance
                        .object_index(name)
                        .ok_or_else(|| schema(format!("{path}[{k}]"), format!("unknown object {name:?}")))?;
                    lists[i].push(o);
                }
            }
            DiscreteAssignment::from_bundles(instance.clone(), &lists)
                .and_then(|d| d.to_random())
                .map_err(|e| schema("bundles", e.to_string()))
        }
        (Some(_), Some(_)) => Err(schema("$", "give either \"matrix\" or \"bundles\", not both")),
        (None, None) => Err(schema("$", "missing \"matrix\" or \"bundles\"")),
    }
}

fn check_agent_keys(map: &Map<String, Value>, instance: &Instance, path: &str) -> Result<(), SchemaError> {
    if let Some(k) = map.keys().find(|k| instance.agent_index(k).is_none()) {
        return Err(schema(join(path, k), "unknown agent"));
    }
    if let Some(a) = instance.agents().iter().find(|a| !map.contains_key(*a)) {
        return Err(schema(join(path, a), "missing agent"));
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<Value, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Schema {
        file: path.display().to_string(),
        error: schema("$", e.to_string()),
    })
}

pub fn load_profile(path: &Path) -> Result<PreferenceProfile, HarnessError> {
    profile_from_value(&read_json(path)?).map_err(|error| HarnessError::Schema {
        file: path.display().to_string(),
        error,
    })
}

pub fn load_assignment(path: &Path, instance: &Instance) -> Result<RandomAssignment, HarnessError> {
    assignment_from_value(&read_json(path)?, instance).map_err(|error| HarnessError::Schema {
        file: path.display().to_string(),
        error,
    })
}

/// Canonical form: pretty-printed, two-space indent, trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory serialization cannot fail");
    text.push('\n');
    text
}

pub fn save<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), HarnessError> {
    fs::write(path, to_canonical_json(value)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
