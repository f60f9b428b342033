use std::path::PathBuf;

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::workspace::{RunManifest, Workspace};
use super::{corpus_speakers, write_split};
use crate::corpus::{read_corpus, UtteranceRecord};
use crate::eval::split_corpus;
use crate::features::{
    add_dynamic_features, compose_target, fit_length, resample_stream, FeatureMatrix, NormMode,
    NormStats, Segment, StreamLayout, ULTPCA,
};
use crate::frontend::{phone_level_vectors, text_to_phones, upsample_to_frames, write_labels, Inventory, Lexicon};
use crate::ultra::{fit_pca, resize_bicubic, PcaCodec, ReducedFrame};
use crate::{Error, Result};

/// Facts about a prepared speaker that later stages need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareInfo {
    pub speaker: String,
    pub raw_scanlines: usize,
    pub raw_samples: usize,
    pub ult_fps: f64,
    pub frame_shift: f64,
    pub n_train: usize,
    pub n_dev: usize,
    pub n_test: usize,
    pub variance_target: f64,
    pub n_components: usize,
    pub retained_variance: f64,
}

impl PrepareInfo {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("{} is missing; run prepare first ({e})", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| Error::corrupt(path.display().to_string(), e.to_string()))
    }
}

/// Resize every frame to the codec's input shape, one flattened frame per row.
pub fn reduce_frames(record: &UtteranceRecord, height: usize, width: usize) -> Result<Array2<f64>> {
    let mut rows = Array2::zeros((record.ultrasound.len(), height * width));
    for (k, f) in record.ultrasound.iter().enumerate() {
        let small = resize_bicubic(&f.to_grid(), height, width)?;
        rows.row_mut(k)
            .assign(&ndarray::Array1::from_iter(small.iter().copied()));
    }
    Ok(rows)
}

/// ULT-PCA statics at the acoustic frame rate, trimmed or padded to the
/// acoustic frame count.
pub fn articulatory_stream(record: &UtteranceRecord, codec: &PcaCodec) -> Result<FeatureMatrix> {
    let (h, w) = codec.frame_shape();
    let coeffs = codec.encode_rows(&reduce_frames(record, h, w)?)?;
    let rate = 1.0 / record.acoustic.frame_shift();
    let resampled = resample_stream(&coeffs, record.ult_fps, rate)?;
    let slack = (rate / record.ult_fps).ceil() as usize + 1;
    let fitted = fit_length(&resampled, record.acoustic.n_frames(), slack)?;
    FeatureMatrix::new(
        StreamLayout::new(vec![Segment::new(ULTPCA, codec.n_components(), false)])?,
        record.acoustic.frame_shift(),
        fitted,
    )
}

/// Frame-level linguistic inputs for a record's reference timing.
pub fn linguistic_inputs(
    record: &UtteranceRecord,
    lexicon: &Lexicon,
    inventory: &Inventory,
) -> Result<FeatureMatrix> {
    let seq = text_to_phones(&record.text, lexicon, inventory)?;
    let durations = seq.durations_from_labels(inventory, &record.labels)?;
    upsample_to_frames(&phone_level_vectors(&seq, inventory), &durations)
}

pub(super) fn to_f32(m: FeatureMatrix) -> Result<FeatureMatrix> {
    let layout = m.layout().clone();
    let shift = m.frame_shift();
    FeatureMatrix::new(layout, shift, m.into_frames().mapv(|v| v as f32 as f64))
}

/// Prepare every configured speaker. Returns one summary per speaker.
pub fn cmd_prepare(cfg: &PipelineConfig) -> Result<Vec<PrepareInfo>> {
    let ws = Workspace::new(&cfg.paths.work);
    let config_text = cfg.to_toml()?;
    let mut infos = Vec::new();
    for speaker in corpus_speakers(cfg)? {
        let (info, files) = prepare_speaker(cfg, &ws, &speaker)?;
        RunManifest::record(&ws, &format!("prepare:{speaker}"), &config_text, &files)?;
        infos.push(info);
    }
    Ok(infos)
}

fn prepare_speaker(cfg: &PipelineConfig, ws: &Workspace, speaker: &str) -> Result<(PrepareInfo, Vec<PathBuf>)> {
    let corpus = read_corpus(&cfg.paths.corpus.join(speaker))?;
    let split = split_corpus(&corpus.ids(), &cfg.split)?;
    log::info!(
        "{speaker}: {} utterances, split {}/{}/{}",
        corpus.records.len(),
        split.train.len(),
        split.dev.len(),
        split.test.len()
    );
    let mut files = Vec::new();
    let dir = ws.speaker_dir(speaker);
    std::fs::create_dir_all(dir.join("features"))?;

    let split_path = ws.split(speaker);
    write_split(&split_path, &split)?;
    files.push(split_path);
    std::fs::write(ws.inventory(speaker), corpus.inventory.to_text())?;
    std::fs::write(ws.lexicon(speaker), corpus.lexicon.to_text())?;
    let index: String = corpus
        .records
        .iter()
        .map(|r| format!("{}\t{}\n", r.id, r.text))
        .collect();
    std::fs::write(ws.utterances(speaker), index)?;
    files.extend([ws.inventory(speaker), ws.lexicon(speaker), ws.utterances(speaker)]);

    // codec from training frames only
    let (rh, rw) = (cfg.codec.reduced_scanlines, cfg.codec.reduced_samples);
    let mut train_frames = Vec::new();
    for id in &split.train {
        let r = corpus.record(id).expect("split ids come from the corpus");
        let rows = reduce_frames(r, rh, rw).map_err(|e| e.in_utterance(id))?;
        for row in rows.rows() {
            train_frames.push(ReducedFrame::new(rh, rw, row.to_vec())?);
        }
    }
    let codec = fit_pca(&train_frames, cfg.codec.variance_target, Some(cfg.codec.max_components))?;
    drop(train_frames);
    codec.save(&ws.codec(speaker))?;
    files.push(ws.codec(speaker));
    let retained: f64 = codec.explained_variance_ratio().iter().sum();
    log::info!(
        "{speaker}: {} PCA components keep {:.1}% of the variance",
        codec.n_components(),
        100.0 * retained
    );

    let mut train_targets = Vec::new();
    for r in &corpus.records {
        let id = r.id.as_str();
        let build = || -> Result<(FeatureMatrix, FeatureMatrix)> {
            let artic = add_dynamic_features(&articulatory_stream(r, &codec)?)?;
            let acoustic = add_dynamic_features(&r.acoustic)?;
            let target = to_f32(compose_target(&acoustic, &artic)?)?;
            let ling = to_f32(linguistic_inputs(r, &corpus.lexicon, &corpus.inventory)?)?;
            if ling.n_frames() != target.n_frames() {
                return Err(Error::Alignment {
                    what: "linguistic inputs".into(),
                    left: ling.n_frames(),
                    right: target.n_frames(),
                });
            }
            Ok((ling, target))
        };
        let (ling, target) = build().map_err(|e| e.in_utterance(id))?;
        ling.save(&ws.linguistic(speaker, id))?;
        target.save(&ws.target(speaker, id))?;
        write_labels(&ws.labels(speaker, id), &r.labels)?;
        files.extend([ws.linguistic(speaker, id), ws.target(speaker, id), ws.labels(speaker, id)]);
        if split.train.iter().any(|t| t == id) {
            train_targets.push(target.into_frames());
        }
    }
    let views: Vec<_> = train_targets.iter().map(|m| m.view()).collect();
    let stacked = concatenate(Axis(0), &views).map_err(|e| Error::invalid(e.to_string()))?;
    let norm = NormStats::fit(&stacked, NormMode::MeanVariance)?;
    std::fs::write(
        ws.target_norm(speaker),
        serde_json::to_string(&norm).map_err(|e| Error::Io(e.into()))? + "\n",
    )?;
    files.push(ws.target_norm(speaker));

    let first = &corpus.records[0];
    let info = PrepareInfo {
        speaker: speaker.to_string(),
        raw_scanlines: first.ultrasound[0].scanlines(),
        raw_samples: first.ultrasound[0].samples_per_line(),
        ult_fps: first.ult_fps,
        frame_shift: first.acoustic.frame_shift(),
        n_train: split.train.len(),
        n_dev: split.dev.len(),
        n_test: split.test.len(),
        variance_target: cfg.codec.variance_target,
        n_components: codec.n_components(),
        retained_variance: retained,
    };
    std::fs::write(
        ws.prepare_info(speaker),
        serde_json::to_string_pretty(&info).map_err(|e| Error::Io(e.into()))? + "\n",
    )?;
    files.push(ws.prepare_info(speaker));
    Ok((info, files))
}
