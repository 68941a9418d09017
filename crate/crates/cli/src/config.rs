//! Layering of the TOML config file and command-line flags.
//!
//! Both sides are plain TOML tables. Flags are written into the table at
//! their config key (`solver.layers`, `experiment.shots`, ...), replacing
//! whatever the file had, and the merged table is then deserialized into
//! the typed config. Every flag therefore has a file equivalent.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

/// How a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or invalid config. Nothing was computed.
    Usage(String),
    /// The computation or writing results failed.
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

pub fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn runtime(e: impl fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

pub fn read_file(path: Option<&Path>) -> Result<Table, Failure> {
    let Some(path) = path else {
        return Ok(Table::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Flag values keyed by dotted config path.
#[derive(Default)]
pub struct Overrides(Vec<(String, Value)>);

impl Overrides {
    pub fn set<T: Serialize>(&mut self, key: &str, value: Option<T>) -> Result<(), Failure> {
        if let Some(v) = value {
            let v = Value::try_from(v)
                .map_err(|e| usage(format!("--{}: {e}", key.rsplit('.').next().unwrap_or(key))))?;
            self.0.push((key.to_string(), v));
        }
        Ok(())
    }

    pub fn apply(self, table: &mut Table) -> Result<(), Failure> {
        for (key, value) in self.0 {
            insert(table, &key, value)?;
        }
        Ok(())
    }
}

fn insert(table: &mut Table, key: &str, value: Value) -> Result<(), Failure> {
    match key.split_once('.') {
        None => {
            table.insert(key.to_string(), value);
            Ok(())
        }
        Some((head, rest)) => {
            let slot = table
                .entry(head.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            match slot {
                Value::Table(inner) => insert(inner, rest, value),
                _ => Err(usage(format!("config key `{head}` must be a table"))),
            }
        }
    }
}

/// Fills keys missing from `table` with those of `defaults`, recursing into
/// sub-tables. Tagged enums (tables with a `kind`) are replaced whole when
/// the user gave a different kind.
pub fn fill_defaults(table: &mut Table, defaults: Table) {
    for (k, dv) in defaults {
        match (table.get_mut(&k), dv) {
            (None, dv) => {
                table.insert(k, dv);
            }
            (Some(Value::Table(user)), Value::Table(d)) => {
                if user.contains_key("kind") && user.get("kind") != d.get("kind") {
                    continue;
                }
                fill_defaults(user, d);
            }
            _ => {}
        }
    }
}

pub fn to_table<T: Serialize>(v: &T) -> Table {
    match Value::try_from(v) {
        Ok(Value::Table(t)) => t,
        _ => Table::new(),
    }
}

pub fn take<T: DeserializeOwned>(table: &mut Table, key: &str) -> Result<Option<T>, Failure> {
    match table.remove(key) {
        None => Ok(None),
        Some(v) => v
            .try_into()
            .map(Some)
            .map_err(|e| usage(format!("config key `{key}`: {e}"))),
    }
}

pub fn typed<T: DeserializeOwned>(table: Table) -> Result<T, Failure> {
    Value::Table(table)
        .try_into()
        .map_err(|e| usage(format!("invalid config: {e}")))
}
