//! Machine-readable command reports. Every rational in a payload is a
//! `p/q` string; floats never appear. Timing is included only on request
//! so that reports stay byte-stable across reruns of the same input.

use mcenter_core::io::emit_space_json;
use mcenter_core::rat::{format_rational, Rat};
use mcenter_core::FiniteMetricSpace;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub payload: Value,
    pub assertions_passed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 of the canonical JSON form of the input space.
pub fn space_digest(space: &FiniteMetricSpace) -> String {
    digest_str(&emit_space_json(space))
}

pub fn digest_str(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn rational(r: &Rat) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_vec(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rational).collect())
}

pub fn rational_matrix(m: &[Vec<Rat>]) -> Value {
    Value::Array(m.iter().map(|row| rational_vec(row)).collect())
}

pub fn error_payload(command: &str, kind: &str, message: &str) -> String {
    serde_json::to_string_pretty(&json!({
        "command": command,
        "error": { "kind": kind, "message": message },
    }))
    .expect("error payload serializes")
}
