use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::config::{Heads, ModelKind, PipelineConfig};
use super::workspace::{RunManifest, Workspace};
use super::{head_layout, prepared_speakers, read_split, select_streams, Resources};
use crate::features::FeatureMatrix;
use crate::frontend::{phone_level_vectors, read_labels, text_to_phones};
use crate::nn::{train_duration_model, train_lstm, train_mlp, Sequence, TrainReport};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub speaker: String,
    pub kind: ModelKind,
    pub heads: Heads,
    pub acoustic: TrainReport,
    pub duration: TrainReport,
}

fn frame_sequences(ws: &Workspace, speaker: &str, ids: &[String], heads: Heads) -> Result<Vec<Sequence>> {
    ids.iter()
        .map(|id| {
            let load = || -> Result<Sequence> {
                let x = FeatureMatrix::load(&ws.linguistic(speaker, id))?;
                let y = select_streams(&FeatureMatrix::load(&ws.target(speaker, id))?, heads)?;
                Sequence::new(x.into_frames(), y.into_frames())
            };
            load().map_err(|e| e.in_utterance(id))
        })
        .collect()
}

fn phone_data(
    ws: &Workspace,
    res: &Resources,
    speaker: &str,
    ids: &[String],
) -> Result<Vec<(ndarray::Array2<f64>, Vec<usize>)>> {
    ids.iter()
        .map(|id| {
            let load = || -> Result<(ndarray::Array2<f64>, Vec<usize>)> {
                let text = res.text(id)?;
                let seq = text_to_phones(text, &res.lexicon, &res.inventory)?;
                let labels = read_labels(&ws.labels(speaker, id))?;
                let durations = seq.durations_from_labels(&res.inventory, &labels)?;
                Ok((phone_level_vectors(&seq, &res.inventory), durations))
            };
            load().map_err(|e| e.in_utterance(id))
        })
        .collect()
}

fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Train the duration and acoustic networks of `kind` for every prepared
/// speaker, each speaker independently.
pub fn cmd_train(cfg: &PipelineConfig, kind: ModelKind) -> Result<Vec<TrainSummary>> {
    let ws = Workspace::new(&cfg.paths.work);
    let config_text = cfg.to_toml()?;
    let mut out = Vec::new();
    for speaker in prepared_speakers(cfg, &ws)? {
        let (summary, files) = train_speaker(cfg, &ws, &speaker, kind)?;
        RunManifest::record(&ws, &format!("train:{kind}:{speaker}"), &config_text, &files)?;
        out.push(summary);
    }
    Ok(out)
}

fn train_speaker(
    cfg: &PipelineConfig,
    ws: &Workspace,
    speaker: &str,
    kind: ModelKind,
) -> Result<(TrainSummary, Vec<PathBuf>)> {
    let split = read_split(&ws.split(speaker))?;
    let res = Resources::load(ws, speaker)?;
    let heads = cfg.model.heads;
    let train = frame_sequences(ws, speaker, &split.train, heads)?;
    let dev = frame_sequences(ws, speaker, &split.dev, heads)?;
    let layout = head_layout(&FeatureMatrix::load(&ws.target(speaker, &split.train[0]))?, heads)?;
    log::info!("{speaker}: training {kind} acoustic model on {} utterances", train.len());
    let (mut model, acoustic_report) = match kind {
        ModelKind::Fcdnn => train_mlp(&train, &dev, &cfg.mlp)?,
        ModelKind::Lstm => train_lstm(&train, &dev, &cfg.lstm)?,
    };
    model.set_output_layout(layout)?;
    drop((train, dev));

    log::info!("{speaker}: training duration model");
    let dtrain = phone_data(ws, &res, speaker, &split.train)?;
    let ddev = phone_data(ws, &res, speaker, &split.dev)?;
    let (duration, duration_report) = train_duration_model(&dtrain, &ddev, &cfg.duration)?;

    std::fs::create_dir_all(ws.speaker_dir(speaker).join("models"))?;
    let files = vec![
        ws.acoustic_model(speaker, kind),
        ws.train_report(speaker, kind, "acoustic"),
        ws.duration_model(speaker, kind),
        ws.train_report(speaker, kind, "duration"),
    ];
    model.save(&files[0])?;
    write_json(&files[1], &acoustic_report)?;
    duration.save(&files[2])?;
    write_json(&files[3], &duration_report)?;
    Ok((
        TrainSummary {
            speaker: speaker.to_string(),
            kind,
            heads,
            acoustic: acoustic_report,
            duration: duration_report,
        },
        files,
    ))
}
