//! Output directory helper: every file written gets a `.meta.json` sidecar
//! carrying the stage name and a hash of the resolved config, so artifacts
//! are traceable to the exact invocation that produced them.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub struct OutputDir {
    root: PathBuf,
    stage: &'static str,
    config_hash: String,
}

impl OutputDir {
    pub fn new(root: &Path, stage: &'static str, config: serde_json::Value) -> Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("creating output dir {}", root.display()))?;
        let canonical = serde_json::to_string(&config)?;
        let config_hash = hex(&Sha256::digest(canonical.as_bytes()));
        Ok(Self {
            root: root.to_path_buf(),
            stage,
            config_hash,
        })
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<()> {
        self.write_bytes_with_extra(name, bytes, serde_json::json!({}))
    }

    /// Writes the file plus its sidecar; `extra` fields are merged into the
    /// sidecar object.
    pub fn write_bytes_with_extra(
        &self,
        name: &str,
        bytes: &[u8],
        extra: serde_json::Value,
    ) -> Result<()> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)
            .with_context(|| format!("writing {}", path.display()))?;

        let mut sidecar = serde_json::json!({
            "stage": self.stage,
            "config_hash": self.config_hash,
        });
        if let (Some(target), Some(source)) = (sidecar.as_object_mut(), extra.as_object()) {
            for (k, v) in source {
                target.insert(k.clone(), v.clone());
            }
        }
        let meta_path = self.root.join(format!("{name}.meta.json"));
        std::fs::write(&meta_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.write_bytes(name, serde_json::to_string_pretty(value)?.as_bytes())
    }

    pub fn write_loss_csv(&self, name: &str, losses: &[f64]) -> Result<()> {
        let mut text = String::from("epoch,loss\n");
        for (epoch, loss) in losses.iter().enumerate() {
            text.push_str(&format!("{},{loss}\n", epoch + 1));
        }
        self.write_bytes(name, text.as_bytes())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
