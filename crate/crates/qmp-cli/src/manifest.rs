//! Reproducibility metadata attached to every result.

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub version: &'static str,
    /// Milliseconds, only when timing was requested.
    pub wall_clock_ms: Option<u128>,
    /// Per-module counters, e.g. `{"stabilizer": {"submodules": 1234}}`.
    pub cache: BTreeMap<String, BTreeMap<String, u64>>,
}

impl RunManifest {
    pub fn new(subcommand: &str, argv: &[String], seed: u64) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            argv: argv.to_vec(),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_clock_ms: None,
            cache: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, module: &str, key: &str, value: u64) {
        self.cache.entry(module.to_string()).or_default().insert(key.to_string(), value);
    }

    pub fn finish(&mut self, started: Instant, timing: bool) {
        if timing {
            self.wall_clock_ms = Some(started.elapsed().as_millis());
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema_version": SCHEMA_VERSION,
            "subcommand": self.subcommand,
            "argv": self.argv,
            "seed": self.seed.to_string(),
            "version": self.version,
            "cache": self.cache,
        });
        if let Some(ms) = self.wall_clock_ms {
            v["wall_clock_ms"] = json!(ms.to_string());
        }
        v
    }

    /// CSV comment lines referencing the manifest.
    pub fn csv_header(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(&self.to_json()).expect("manifest serializes"))
    }
}
