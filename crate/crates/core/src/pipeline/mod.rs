//! The end-to-end pipeline behind the `ultratts` tool: generate or read a
//! corpus, prepare features, train duration and acoustic networks,
//! synthesize, evaluate and export.
//!
//! Stages communicate only through files under the work directory, so any
//! stage can be rerun alone; with fixed seeds its outputs are byte-identical.

mod config;
mod evaluate;
mod export;
mod prepare;
mod synthesize;
mod train;
mod workspace;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub use config::{apply_override, CodecConfig, Heads, ModelConfig, ModelKind, PathsConfig, PipelineConfig, SynthesisConfig};
pub use evaluate::{cmd_evaluate, eval_utterances};
pub use export::{cmd_export_video, cmd_gen_corpus, cmd_plot_coeffs};
pub use prepare::{articulatory_stream, cmd_prepare, linguistic_inputs, reduce_frames, PrepareInfo};
pub use synthesize::{cmd_synthesize, reconstruct_frames, synthesize, SynthesisResult, Timing};
pub use train::{cmd_train, TrainSummary};
pub use workspace::{RunManifest, Workspace, MANIFEST_FILE};

use crate::eval::Split;
use crate::features::{FeatureMatrix, NormStats, StreamLayout, ULTPCA};
use crate::frontend::{Inventory, Lexicon};
use crate::{io_util, Error, Result};

fn corpus_speakers(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let root = &cfg.paths.corpus;
    if !root.is_dir() {
        return Err(Error::Config(format!("corpus directory {} does not exist", root.display())));
    }
    if !cfg.paths.speakers.is_empty() {
        return Ok(cfg.paths.speakers.clone());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(root)? {
        let entry = entry?;
        if entry.path().join("utterances.tsv").is_file() {
            if let Some(name) = entry.file_name().to_str() {
                out.push(name.to_string());
            }
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(Error::Config(format!("no speaker directories under {}", root.display())));
    }
    Ok(out)
}

fn prepared_speakers(cfg: &PipelineConfig, ws: &Workspace) -> Result<Vec<String>> {
    let speakers = if cfg.paths.speakers.is_empty() {
        ws.prepared_speakers()?
    } else {
        cfg.paths.speakers.clone()
    };
    if speakers.is_empty() {
        return Err(Error::Config(format!(
            "nothing prepared under {}; run prepare first",
            ws.root().display()
        )));
    }
    for s in &speakers {
        if !ws.prepare_info(s).is_file() {
            return Err(Error::Config(format!("speaker {s} is not prepared; run prepare first")));
        }
    }
    Ok(speakers)
}

fn write_split(path: &Path, split: &Split) -> Result<()> {
    let mut w = io_util::create(path)?;
    for (set, ids) in [("train", &split.train), ("dev", &split.dev), ("test", &split.test)] {
        for id in ids {
            writeln!(w, "{id}\t{set}")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_split(path: &Path) -> Result<Split> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut split = Split {
        train: Vec::new(),
        dev: Vec::new(),
        test: Vec::new(),
    };
    for (n, line) in text.lines().enumerate() {
        let bad = || Error::corrupt(path.display().to_string(), format!("line {}: {line:?}", n + 1));
        let (id, set) = line.split_once('\t').ok_or_else(bad)?;
        match set {
            "train" => split.train.push(id.to_string()),
            "dev" => split.dev.push(id.to_string()),
            "test" => split.test.push(id.to_string()),
            _ => return Err(bad()),
        }
    }
    if split.train.is_empty() || split.dev.is_empty() || split.test.is_empty() {
        return Err(Error::corrupt(path.display().to_string(), "a split set is empty"));
    }
    Ok(split)
}

fn load_target_norm(ws: &Workspace, speaker: &str) -> Result<NormStats> {
    let path = ws.target_norm(speaker);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::corrupt(path.display().to_string(), e.to_string()))
}

/// Frontend resources copied into a prepared speaker directory.
struct Resources {
    inventory: Inventory,
    lexicon: Lexicon,
    texts: BTreeMap<String, String>,
}

impl Resources {
    fn load(ws: &Workspace, speaker: &str) -> Result<Self> {
        let index = std::fs::read_to_string(ws.utterances(speaker))?;
        let texts = index
            .lines()
            .filter_map(|l| l.split_once('\t'))
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Ok(Self {
            inventory: Inventory::load(&ws.inventory(speaker))?,
            lexicon: Lexicon::load(&ws.lexicon(speaker))?,
            texts,
        })
    }

    fn text(&self, id: &str) -> Result<&str> {
        self.texts
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| Error::data(id, "utterance is not in the prepared corpus"))
    }
}

/// Segment names predicted under `heads`.
fn head_segments(layout: &StreamLayout, heads: Heads) -> Vec<String> {
    layout
        .segments()
        .iter()
        .filter(|s| match heads {
            Heads::Joint => true,
            Heads::Acoustic => s.name != ULTPCA,
            Heads::Articulatory => s.name == ULTPCA,
        })
        .map(|s| s.name.clone())
        .collect()
}

fn head_layout(target: &FeatureMatrix, heads: Heads) -> Result<StreamLayout> {
    Ok(select_streams(target, heads)?.layout().clone())
}

/// Keep the target streams predicted under `heads`.
fn select_streams(target: &FeatureMatrix, heads: Heads) -> Result<FeatureMatrix> {
    let layout = target.layout();
    let names = head_segments(layout, heads);
    if names.is_empty() {
        return Err(Error::invalid(format!("target has no streams for {heads:?} heads")));
    }
    let segs = names
        .iter()
        .map(|n| layout.segment(n).expect("listed").clone())
        .collect();
    let cols: Vec<usize> = names
        .iter()
        .flat_map(|n| layout.range(n).expect("listed"))
        .collect();
    FeatureMatrix::new(
        StreamLayout::new(segs)?,
        target.frame_shift(),
        target.frames().select(ndarray::Axis(1), &cols),
    )
}
