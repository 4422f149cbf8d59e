use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use interact_auth::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(io(path))
}

/// Hashes of every regular file directly inside `dir`, keyed by name.
pub fn hash_dir(dir: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(io(dir))? {
        let entry = entry.map_err(io(dir))?;
        let path = entry.path();
        if path.is_file() {
            let name = entry.file_name().to_string_lossy().into_owned();
            out.insert(name, sha256_hex(&read(&path)?));
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

/// Collects a command's output files and finishes with its manifest.
pub struct Outputs {
    pub dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(io(&dir))?;
        Ok(Outputs { dir, files: Vec::new() })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io(parent))?;
        }
        std::fs::write(&path, bytes).map_err(io(&path))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        self.write(rel, text.as_bytes())
    }

    /// Records a file written by someone else.
    pub fn track(&mut self, rel: &str) {
        self.files.push(rel.to_string());
    }

    pub fn finish<C: Serialize>(
        mut self,
        command: &str,
        config: &C,
        seed: Option<u64>,
        inputs: BTreeMap<String, String>,
    ) -> Result<()> {
        let config = serde_json::to_value(config)?;
        let config_hash = sha256_hex(serde_json::to_string(&config)?.as_bytes());
        let mut versions = BTreeMap::new();
        versions.insert("interact-auth".to_string(), interact_auth::VERSION.to_string());
        versions.insert("interact-auth-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
        self.files.sort();
        let manifest = Manifest {
            command: command.to_string(),
            config,
            config_hash,
            seed,
            versions,
            inputs,
            outputs: std::mem::take(&mut self.files),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        let path = self.dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(io(&path))
    }
}
