use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::Result;

/// Identifies the inputs of a run: the effective config (output directory and
/// thread count excluded) and the bytes of every referenced file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub kind: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn of(cfg: &RunConfig) -> Result<Self> {
        let mut canonical = cfg.clone();
        canonical.out = Default::default();
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&canonical)?);
        for f in cfg.referenced_files() {
            h.update(f.to_string_lossy().as_bytes());
            h.update([0]);
            h.update(std::fs::read(cfg.resolve(&f))?);
        }
        Ok(Self {
            kind: cfg.kind.name(),
            config_sha256: hex::encode(h.finalize()),
            seed: cfg.seed,
        })
    }

    /// `# key=value` comment lines for CSV headers.
    pub fn comments(&self) -> Vec<String> {
        vec![
            format!("kind={}", self.kind),
            format!("config_sha256={}", self.config_sha256),
            format!("seed={}", self.seed),
        ]
    }

    /// Serializes `record` as one JSON object with the provenance fields
    /// prepended.
    pub fn json_line<T: Serialize>(&self, record: &T) -> Result<String> {
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), self.kind.into());
        obj.insert("config_sha256".into(), self.config_sha256.clone().into());
        obj.insert("seed".into(), self.seed.into());
        match serde_json::to_value(record)? {
            serde_json::Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("record".into(), other);
            }
        }
        Ok(serde_json::to_string(&obj)?)
    }

    pub fn write_jsonl<T: Serialize>(&self, path: &Path, records: &[T]) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for r in records {
            writeln!(f, "{}", self.json_line(r)?)?;
        }
        f.flush()?;
        Ok(())
    }
}
