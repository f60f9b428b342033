#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use ultratts::pipeline::PipelineConfig;

/// A pipeline config sized for tests: 16x32 frames, 12 MGC, small networks.
pub fn small_config(root: &Path, n_utterances: usize) -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.paths.corpus = root.join("corpus");
    cfg.paths.work = root.join("work");
    cfg.corpus.n_utterances = n_utterances;
    cfg.corpus.scanlines = 16;
    cfg.corpus.samples = 32;
    cfg.corpus.mgc_order = 12;
    cfg.corpus.bap_order = 3;
    cfg.codec.reduced_scanlines = 16;
    cfg.codec.reduced_samples = 32;
    cfg.mlp.hidden_layers = 2;
    cfg.mlp.hidden_width = 32;
    cfg.mlp.batch_size = 64;
    cfg.mlp.base_lr = 0.01;
    cfg.mlp.max_epochs = 8;
    cfg.mlp.warmup_epochs = 3;
    cfg.mlp.patience = 3;
    cfg.duration = cfg.mlp.clone();
    cfg.duration.hidden_layers = 1;
    cfg.duration.hidden_width = 16;
    cfg.duration.batch_size = 16;
    cfg.lstm.ff_layers = 1;
    cfg.lstm.ff_width = 16;
    cfg.lstm.lstm_width = 16;
    cfg.lstm.base_lr = 0.005;
    cfg.lstm.max_epochs = 4;
    cfg.lstm.warmup_epochs = 2;
    cfg.lstm.patience = 2;
    cfg.synthesis.video_stride = 5;
    cfg.validate().unwrap();
    cfg
}

/// SHA-256 of every file under `dir`, keyed by relative path.
pub fn tree_hashes(dir: &Path) -> BTreeMap<String, String> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, String>) {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                let rel = p.strip_prefix(base).unwrap().to_string_lossy().into_owned();
                let bytes = std::fs::read(&p).unwrap();
                out.insert(rel, hex::encode(Sha256::digest(&bytes)));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
