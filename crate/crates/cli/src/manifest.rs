use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputRecord {
    /// File path, or `bundled:<name>` for compiled-in data.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    pub config_versions: BTreeMap<String, String>,
    pub tool_version: String,
    /// RFC 3339; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0)
        });
    OffsetDateTime::from_unix_timestamp(secs)
        .ok()
        .and_then(|t| t.format(&Rfc3339).ok())
        .unwrap_or_else(|| "1970-01-01T00:00:00Z".into())
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            inputs: Vec::new(),
            seed: None,
            config_versions: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: timestamp(),
        }
    }

    pub fn input(&mut self, path: impl Into<String>, contents: &str) {
        self.inputs.push(InputRecord {
            path: path.into(),
            sha256: sha256_hex(contents.as_bytes()),
        });
    }

    pub fn version(&mut self, key: &str, version: &str) {
        self.config_versions.insert(key.into(), version.into());
    }
}
