//! Self-describing output: every report carries its run configuration, a
//! fingerprint of it and a content hash of its inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::tolerance::{MAX_BOUNDARY, MAX_GRAY_FREE_SPINS, MAX_RUNG_LEN, MAX_TRANSFER_FRONTIER};

pub const SCHEMA_VERSION: u32 = 1;

/// Resource caps in force for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub free_spins: usize,
    pub transfer_frontier: usize,
    pub boundary: usize,
    pub rung_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            free_spins: MAX_GRAY_FREE_SPINS,
            transfer_frontier: MAX_TRANSFER_FRONTIER,
            boundary: MAX_BOUNDARY,
            rung_len: MAX_RUNG_LEN,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub lattice: Option<String>,
    pub window: Option<String>,
    pub outer: Option<String>,
    pub dist: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub caps: Caps,
    /// Command-specific settings, keyed by flag name.
    pub params: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig { command: command.into(), ..RunConfig::default() }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_bytes()))
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("run config serializes")
    }
}

/// Git-style blob hash (`"blob <len>\0" + bytes`), SHA-256 object format.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    /// Payload type, naming the schema of `data`.
    pub kind: String,
    pub run_config: RunConfig,
    pub fingerprint: String,
    /// Blob hash of the input files, or of the run configuration when the
    /// run reads no files.
    pub input_hash: String,
    pub data: T,
}

impl<T: Serialize> Envelope<T> {
    /// `inputs` are the raw bytes of every file the run read, in flag order.
    pub fn new(kind: &str, run_config: RunConfig, inputs: &[Vec<u8>], data: T) -> Self {
        let input_hash = if inputs.is_empty() {
            blob_hash(&run_config.canonical_bytes())
        } else {
            blob_hash(&inputs.concat())
        };
        Envelope { schema_version: SCHEMA_VERSION, kind: kind.into(), fingerprint: run_config.fingerprint(), run_config, input_hash, data }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// CSV body prefixed by `#` lines carrying the same provenance.
    pub fn csv(&self, body: &str) -> String {
        format!(
            "# schema_version={} kind={} fingerprint={} input_hash={}\n{body}",
            self.schema_version, self.kind, self.fingerprint, self.input_hash
        )
    }
}

/// Accepts either a bare payload or an envelope around one.
pub fn unwrap_payload(v: Value) -> Value {
    match v {
        Value::Object(mut m) if m.contains_key("schema_version") && m.contains_key("data") => {
            m.remove("data").unwrap_or(Value::Null)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_hash_matches_git_sha256_format() {
        // sha256 of "blob 6\0hello\n"
        assert_eq!(blob_hash(b"hello\n"), "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4");
    }

    #[test]
    fn fingerprint_tracks_config() {
        let mut a = RunConfig::new("verify");
        let b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        a.param("suite", "parity");
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn envelope_round_trip() {
        let env = Envelope::new("numbers", RunConfig::new("x"), &[], vec![1.5, -0.25]);
        let back: Envelope<Vec<f64>> = serde_json::from_str(&env.to_json().unwrap()).unwrap();
        assert_eq!(back, env);
        assert_eq!(unwrap_payload(serde_json::to_value(&env).unwrap()), serde_json::json!([1.5, -0.25]));
    }
}
