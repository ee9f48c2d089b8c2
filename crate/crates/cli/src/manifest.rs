//! Run manifests: the one artifact that carries a timestamp. Data outputs
//! reference the config digest only, so reruns with identical config are
//! byte-identical.

use patternfront_core::error::Result;
use patternfront_core::output::fnv1a64;
use patternfront_core::params::ModelParams;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub config_digest: String,
    pub params: ModelParams,
    pub outputs: Vec<String>,
    pub timestamp_unix: u64,
}

pub struct Run {
    pub out_dir: PathBuf,
    pub params: ModelParams,
    pub digest: String,
    outputs: Vec<String>,
    subcommand: String,
}

impl Run {
    pub fn new(
        subcommand: &str,
        out_dir: PathBuf,
        params: ModelParams,
        config_text: &str,
    ) -> Result<Self> {
        std::fs::create_dir_all(&out_dir)?;
        Ok(Self {
            out_dir,
            params,
            digest: fnv1a64(config_text.as_bytes()),
            outputs: Vec::new(),
            subcommand: subcommand.to_string(),
        })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out_dir.join(name)
    }

    /// Writes a JSON artifact (pretty-printed, with the digest injected at
    /// the top level when the value is an object).
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        let mut v = serde_json::to_value(value).expect("serializable");
        if let Some(map) = v.as_object_mut() {
            map.insert(
                "config_digest".to_string(),
                serde_json::Value::String(self.digest.clone()),
            );
        }
        std::fs::write(&path, serde_json::to_string_pretty(&v).expect("json") + "\n")?;
        Ok(path)
    }

    pub fn finish(self) -> Result<PathBuf> {
        let manifest = RunManifest {
            subcommand: self.subcommand.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: self.digest.clone(),
            params: self.params,
            outputs: self.outputs,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let path = self.out_dir.join(format!("manifest-{}.json", self.subcommand));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&manifest).expect("json") + "\n",
        )?;
        Ok(path)
    }
}

/// Resolves the output directory: PATTERNFRONT_OUT overrides the flag.
pub fn resolve_out_dir(flag: &Path) -> PathBuf {
    match std::env::var_os("PATTERNFRONT_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => flag.to_path_buf(),
    }
}
