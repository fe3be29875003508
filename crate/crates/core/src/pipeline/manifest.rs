use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let mut reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Content hashes of everything the stage read, config section included.
    pub inputs: BTreeMap<String, String>,
    /// Content hashes of every file the stage wrote, keyed by file name.
    pub outputs: BTreeMap<String, String>,
    pub seed: u64,
    /// Unix seconds at completion.
    pub finished_at: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software_version: String,
    pub master_seed: u64,
    pub stages: BTreeMap<String, StageRecord>,
    /// Stages that ran during the most recent invocation, in order.
    pub executed: Vec<String>,
    /// Stages skipped during the most recent invocation, in order.
    pub skipped: Vec<String>,
}

impl RunManifest {
    pub fn new(master_seed: u64) -> Self {
        Self {
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            ..Default::default()
        }
    }

    /// Load `path`, or start fresh when it does not exist.
    pub fn load_or_new(path: &Path, master_seed: u64) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::new(master_seed));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("{}: unreadable manifest: {e}", path.display())))?;
        m.executed.clear();
        m.skipped.clear();
        m.master_seed = master_seed;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Input(format!("cannot serialize manifest: {e}")))?;
        crate::io::write_text(path, &(text + "\n"))
    }

    /// A stage may be skipped when its recorded inputs equal `inputs` and every
    /// recorded output is still on disk with the recorded hash.
    pub fn is_fresh(&self, stage: &str, inputs: &BTreeMap<String, String>, out_dir: &Path) -> bool {
        let Some(rec) = self.stages.get(stage) else {
            return false;
        };
        if &rec.inputs != inputs || rec.outputs.is_empty() {
            return false;
        }
        rec.outputs
            .iter()
            .all(|(name, hash)| hash_file(&out_dir.join(name)).is_ok_and(|h| &h == hash))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            hash_bytes(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn freshness_rules() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("out.csv"), "a\n").unwrap();
        let mut m = RunManifest::new(1);
        let inputs: BTreeMap<String, String> = [("config".to_string(), "h".to_string())].into();
        assert!(!m.is_fresh("btm", &inputs, dir.path()));
        m.stages.insert(
            "btm".into(),
            StageRecord {
                inputs: inputs.clone(),
                outputs: [("out.csv".to_string(), hash_bytes(b"a\n"))].into(),
                seed: 0,
                finished_at: 0,
            },
        );
        assert!(m.is_fresh("btm", &inputs, dir.path()));
        let changed: BTreeMap<String, String> = [("config".to_string(), "g".to_string())].into();
        assert!(!m.is_fresh("btm", &changed, dir.path()));
        std::fs::write(dir.path().join("out.csv"), "b\n").unwrap();
        assert!(!m.is_fresh("btm", &inputs, dir.path()));
        std::fs::remove_file(dir.path().join("out.csv")).unwrap();
        assert!(!m.is_fresh("btm", &inputs, dir.path()));
    }

    #[test]
    fn save_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let mut m = RunManifest::new(3);
        m.executed.push("ingest".into());
        m.stages.insert("ingest".into(), StageRecord::default());
        m.save(&path).unwrap();
        let back = RunManifest::load_or_new(&path, 3).unwrap();
        assert!(back.executed.is_empty());
        assert_eq!(back.stages, m.stages);
        assert!(matches!(hash_file(&dir.path().join("nope")), Err(Error::MissingArtifact(_))));
    }
}
