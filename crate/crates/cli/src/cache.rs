//! On-disk result cache keyed by command, parameters and code version.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::Outcome;

pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    exit: u8,
    result: Value,
    raw: Option<String>,
    artifact: Option<Value>,
}

impl Cache {
    /// Opens (creating if needed) `dir`, or the user cache directory when absent.
    pub fn open(dir: Option<PathBuf>) -> Option<Self> {
        let dir = dir.or_else(|| {
            let base = std::env::var_os("XDG_CACHE_HOME")
                .map(PathBuf::from)
                .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
            Some(base.join("rf"))
        })?;
        std::fs::create_dir_all(&dir).ok()?;
        Some(Self { dir })
    }

    pub fn key(command: &str, params: &Map<String, Value>, version: &str) -> String {
        let canonical = serde_json::json!({ "command": command, "params": params, "code_version": version });
        format!("{:x}", Sha256::digest(canonical.to_string().as_bytes()))
    }

    pub fn get(&self, key: &str) -> Option<Outcome> {
        let text = std::fs::read_to_string(self.dir.join(format!("{key}.json"))).ok()?;
        let e: Entry = serde_json::from_str(&text).ok()?;
        Some(Outcome { result: e.result, exit: e.exit, raw: e.raw, artifact: e.artifact })
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put(&self, key: &str, o: &Outcome) {
        let e = Entry { exit: o.exit, result: o.result.clone(), raw: o.raw.clone(), artifact: o.artifact.clone() };
        let path = self.dir.join(format!("{key}.json"));
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        if std::fs::write(&tmp, serde_json::to_string(&e).expect("entries serialize")).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
}
