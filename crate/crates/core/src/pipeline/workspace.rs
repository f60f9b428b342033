use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::ModelKind;
use crate::{io_util, Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Paths inside the work directory.
#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn speaker_dir(&self, speaker: &str) -> PathBuf {
        self.root.join(speaker)
    }

    pub fn split(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("split.tsv")
    }

    pub fn codec(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("codec.upca")
    }

    pub fn target_norm(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("target_norm.json")
    }

    pub fn prepare_info(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("prepare.json")
    }

    pub fn inventory(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("inventory.txt")
    }

    pub fn lexicon(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("lexicon.txt")
    }

    pub fn utterances(&self, speaker: &str) -> PathBuf {
        self.speaker_dir(speaker).join("utterances.tsv")
    }

    pub fn labels(&self, speaker: &str, id: &str) -> PathBuf {
        self.speaker_dir(speaker).join("features").join(format!("{id}.lab"))
    }

    pub fn linguistic(&self, speaker: &str, id: &str) -> PathBuf {
        self.speaker_dir(speaker).join("features").join(format!("{id}.ling.fmtx"))
    }

    pub fn target(&self, speaker: &str, id: &str) -> PathBuf {
        self.speaker_dir(speaker).join("features").join(format!("{id}.cmp.fmtx"))
    }

    pub fn acoustic_model(&self, speaker: &str, kind: ModelKind) -> PathBuf {
        self.speaker_dir(speaker).join("models").join(format!("acoustic_{kind}.nnet"))
    }

    pub fn duration_model(&self, speaker: &str, kind: ModelKind) -> PathBuf {
        self.speaker_dir(speaker).join("models").join(format!("duration_{kind}.nnet"))
    }

    pub fn train_report(&self, speaker: &str, kind: ModelKind, role: &str) -> PathBuf {
        self.speaker_dir(speaker)
            .join("models")
            .join(format!("{role}_{kind}.report.json"))
    }

    pub fn eval_dir(&self) -> PathBuf {
        self.root.join("eval")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join(MANIFEST_FILE)
    }

    /// Speakers with a prepared directory, sorted.
    pub fn prepared_speakers(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        if self.root.is_dir() {
            for entry in std::fs::read_dir(&self.root)? {
                let entry = entry?;
                if entry.path().join("prepare.json").is_file() {
                    if let Some(name) = entry.file_name().to_str() {
                        out.push(name.to_string());
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Record of what each stage produced: file hashes relative to the work
/// directory, the configuration used and when each stage last ran.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: String,
    pub artifacts: BTreeMap<String, String>,
    /// Unix seconds of each stage's last completion.
    pub stages: BTreeMap<String, u64>,
}

impl RunManifest {
    pub fn load_or_default(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::corrupt(path.display().to_string(), e.to_string()))
    }

    /// Hash `files` and stamp `stage`, then rewrite the manifest.
    pub fn record(ws: &Workspace, stage: &str, config: &str, files: &[PathBuf]) -> Result<Self> {
        let path = ws.manifest();
        let mut m = Self::load_or_default(&path)?;
        m.tool_version = env!("CARGO_PKG_VERSION").to_string();
        m.config = config.to_string();
        for f in files {
            let rel = f
                .strip_prefix(ws.root())
                .unwrap_or(f)
                .to_string_lossy()
                .replace('\\', "/");
            m.artifacts.insert(rel, io_util::sha256_file(f)?);
        }
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        m.stages.insert(stage.to_string(), now);
        let text = serde_json::to_string_pretty(&m).map_err(|e| Error::Io(e.into()))?;
        std::fs::create_dir_all(ws.root())?;
        std::fs::write(&path, text + "\n")?;
        Ok(m)
    }
}
