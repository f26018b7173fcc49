//! Quantile table persistence: a flat, self-describing JSON document with a
//! schema version field. Reals are written at full round-trip precision.

use crate::error::{CliError, Result};
use madtest::{QuantileTable, RngSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const TABLE_SCHEMA_VERSION: u32 = 1;
pub const TABLE_KIND: &str = "pivot-quantile-table";

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    schema_version: u32,
    kind: String,
    n: usize,
    reps: usize,
    seed: u64,
    stream: u64,
    probs: Vec<f64>,
    quantiles: Vec<f64>,
    created_at: String,
}

/// Write a table to `path` as versioned JSON.
pub fn save_table(table: &QuantileTable, path: &Path) -> Result<()> {
    let file = TableFile {
        schema_version: TABLE_SCHEMA_VERSION,
        kind: TABLE_KIND.to_string(),
        n: table.n,
        reps: table.reps,
        seed: table.rng.seed,
        stream: table.rng.stream,
        probs: table.probs.clone(),
        quantiles: table.quantiles.clone(),
        created_at: table.created_at.clone(),
    };
    let mut body = serde_json::to_string_pretty(&file).expect("table serializes");
    body.push('\n');
    std::fs::write(path, body).map_err(|source| CliError::Io {
        action: "write",
        path: path.display().to_string(),
        source,
    })
}

/// Load a table saved by [`save_table`], checking the schema version before
/// the payload and the payload invariants after it.
pub fn load_table(path: &Path) -> Result<QuantileTable> {
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: display.clone(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&content).map_err(|e| CliError::CorruptTable {
            path: display.clone(),
            reason: format!("not valid JSON: {e}"),
        })?;

    match value.get("schema_version").and_then(|v| v.as_u64()) {
        None => {
            return Err(CliError::IncompatibleTable {
                path: display,
                reason: "missing schema_version field".to_string(),
            });
        }
        Some(v) if v != u64::from(TABLE_SCHEMA_VERSION) => {
            return Err(CliError::IncompatibleTable {
                path: display,
                reason: format!("schema_version {v}, this tool reads {TABLE_SCHEMA_VERSION}"),
            });
        }
        Some(_) => {}
    }
    match value.get("kind").and_then(|v| v.as_str()) {
        Some(TABLE_KIND) => {}
        other => {
            return Err(CliError::IncompatibleTable {
                path: display,
                reason: format!("kind {other:?}, expected {TABLE_KIND:?}"),
            });
        }
    }

    // A missing or mistyped field is a schema problem, not corruption.
    let file: TableFile =
        serde_json::from_value(value).map_err(|e| CliError::IncompatibleTable {
            path: display.clone(),
            reason: e.to_string(),
        })?;

    let table = QuantileTable {
        n: file.n,
        probs: file.probs,
        quantiles: file.quantiles,
        reps: file.reps,
        rng: RngSpec::new(file.seed, file.stream),
        created_at: file.created_at,
    };
    table.validate().map_err(|e| CliError::CorruptTable {
        path: display,
        reason: e.to_string(),
    })?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use madtest::{DEFAULT_TABLE_PROBS, build_quantile_table};

    fn built_table() -> QuantileTable {
        build_quantile_table(10, &DEFAULT_TABLE_PROBS, 2_000, RngSpec::new(4, 0)).unwrap()
    }

    #[test]
    fn roundtrip_preserves_every_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let table = built_table();
        save_table(&table, &path).unwrap();
        let loaded = load_table(&path).unwrap();
        assert_eq!(table, loaded);
    }

    #[test]
    fn out_of_order_quantiles_are_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let table = built_table();
        save_table(&table, &path).unwrap();

        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let quantiles = value["quantiles"].as_array_mut().unwrap();
        quantiles.reverse();
        std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();

        assert!(matches!(
            load_table(&path),
            Err(CliError::CorruptTable { .. })
        ));
    }

    #[test]
    fn missing_reps_field_is_incompatible() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let table = built_table();
        save_table(&table, &path).unwrap();

        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        value.as_object_mut().unwrap().remove("reps");
        std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();

        let err = load_table(&path).unwrap_err();
        assert!(matches!(err, CliError::IncompatibleTable { .. }), "{err}");
        assert!(err.to_string().contains("reps"), "{err}");
    }

    #[test]
    fn wrong_schema_version_is_incompatible() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let table = built_table();
        save_table(&table, &path).unwrap();

        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        value["schema_version"] = serde_json::json!(99);
        std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();

        assert!(matches!(
            load_table(&path),
            Err(CliError::IncompatibleTable { .. })
        ));
    }

    #[test]
    fn garbage_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        std::fs::write(&path, "not json at all").unwrap();
        assert!(matches!(
            load_table(&path),
            Err(CliError::CorruptTable { .. })
        ));
    }
}
