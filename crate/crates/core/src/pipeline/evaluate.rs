use std::path::PathBuf;

use super::config::{ModelKind, PipelineConfig};
use super::workspace::{RunManifest, Workspace};
use super::{load_target_norm, prepared_speakers, read_split};
use crate::eval::{evaluate_system, write_json, write_tables, EvalReport, EvalUtterance, MeanPredictor};
use crate::features::FeatureMatrix;
use crate::nn::NetworkModel;
use crate::{Error, Result};

/// Prepared inputs and reference targets of `ids`.
pub fn eval_utterances(ws: &Workspace, speaker: &str, ids: &[String]) -> Result<Vec<EvalUtterance>> {
    ids.iter()
        .map(|id| {
            let inputs = FeatureMatrix::load(&ws.linguistic(speaker, id)).map_err(|e| e.in_utterance(id))?;
            let reference = FeatureMatrix::load(&ws.target(speaker, id)).map_err(|e| e.in_utterance(id))?;
            Ok(EvalUtterance {
                id: id.clone(),
                inputs,
                reference,
            })
        })
        .collect()
}

/// Score every trained model in `kinds` and the mean baseline on the dev
/// and test sets of each prepared speaker. Writes `results.tsv` and
/// `results.json` to the eval directory.
pub fn cmd_evaluate(cfg: &PipelineConfig, kinds: &[ModelKind]) -> Result<Vec<EvalReport>> {
    let ws = Workspace::new(&cfg.paths.work);
    let mut reports = Vec::new();
    for speaker in prepared_speakers(cfg, &ws)? {
        let split = read_split(&ws.split(&speaker))?;
        let norm = load_target_norm(&ws, &speaker)?;
        let dev = eval_utterances(&ws, &speaker, &split.dev)?;
        let test = eval_utterances(&ws, &speaker, &split.test)?;
        let layout = dev[0].reference.layout().clone();
        let mean = MeanPredictor::from_norm(layout, &norm)?;
        reports.push(EvalReport {
            speaker: speaker.clone(),
            system: "mean".into(),
            dev: evaluate_system(&mean, &dev, &norm, &cfg.eval)?,
            test: evaluate_system(&mean, &test, &norm, &cfg.eval)?,
        });
        let mut trained = 0;
        for &kind in kinds {
            let path = ws.acoustic_model(&speaker, kind);
            if !path.is_file() {
                log::warn!("{speaker}: no {} model at {}", kind.label(), path.display());
                continue;
            }
            let model = NetworkModel::load(&path)?;
            reports.push(EvalReport {
                speaker: speaker.clone(),
                system: kind.label().into(),
                dev: evaluate_system(&model, &dev, &norm, &cfg.eval)?,
                test: evaluate_system(&model, &test, &norm, &cfg.eval)?,
            });
            trained += 1;
        }
        if trained == 0 {
            return Err(Error::Config(format!("speaker {speaker} has no trained models; run train first")));
        }
    }
    let dir = ws.eval_dir();
    std::fs::create_dir_all(&dir)?;
    let files: Vec<PathBuf> = vec![dir.join("results.tsv"), dir.join("results.json")];
    write_tables(&reports, &files[0])?;
    write_json(&reports, &files[1])?;
    RunManifest::record(&ws, "evaluate", &cfg.to_toml()?, &files)?;
    Ok(reports)
}
