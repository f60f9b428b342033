mod common;

use std::path::Path;

use ultratts::corpus::{generate_synthetic_corpus, read_corpus, write_corpus, SynthCorpusConfig};
use ultratts::eval::{evaluate_system, EvalOptions, MeanPredictor, OraclePredictor};
use ultratts::features::{FeatureMatrix, NormStats, ULTPCA, VUV};
use ultratts::nn::ParamGeneration;
use ultratts::pipeline::{
    cmd_evaluate, cmd_gen_corpus, cmd_prepare, cmd_synthesize, cmd_train, eval_utterances, reconstruct_frames,
    synthesize, ModelKind, PipelineConfig, PrepareInfo, RunManifest, Timing, Workspace,
};
use ultratts::ultra::PcaCodec;
use ultratts::Error;

fn prepared(root: &Path, n: usize) -> PipelineConfig {
    let cfg = common::small_config(root, n);
    cmd_gen_corpus(&cfg).unwrap();
    cmd_prepare(&cfg).unwrap();
    cfg
}

fn split_ids(ws: &Workspace, speaker: &str, set: &str) -> Vec<String> {
    std::fs::read_to_string(ws.split(speaker))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .filter(|(_, s)| *s == set)
        .map(|(id, _)| id.to_string())
        .collect()
}

fn target_norm(ws: &Workspace, speaker: &str) -> NormStats {
    serde_json::from_str(&std::fs::read_to_string(ws.target_norm(speaker)).unwrap()).unwrap()
}

#[test]
fn prepare_writes_one_feature_file_per_utterance_and_a_complete_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    let ws = Workspace::new(&cfg.paths.work);
    assert!(ws.codec("synth").is_file());
    let corpus = read_corpus(&cfg.paths.corpus.join("synth")).unwrap();
    for id in corpus.ids() {
        assert!(ws.target("synth", &id).is_file());
        assert!(ws.linguistic("synth", &id).is_file());
        assert!(ws.labels("synth", &id).is_file());
    }
    let manifest = RunManifest::load_or_default(&ws.manifest()).unwrap();
    let on_disk = common::tree_hashes(ws.root());
    for (rel, hash) in &on_disk {
        if rel == "manifest.json" {
            continue;
        }
        assert_eq!(manifest.artifacts.get(rel), Some(hash), "{rel}");
    }
    assert!(manifest.stages.contains_key("prepare:synth"));
}

#[test]
fn rerunning_a_stage_after_deleting_its_outputs_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    let ws = Workspace::new(&cfg.paths.work);
    let before = common::tree_hashes(ws.root());

    std::fs::remove_dir_all(ws.speaker_dir("synth").join("models")).unwrap();
    cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    std::fs::remove_dir_all(ws.speaker_dir("synth").join("features")).unwrap();
    std::fs::remove_file(ws.codec("synth")).unwrap();
    cmd_prepare(&cfg).unwrap();

    let mut after = common::tree_hashes(ws.root());
    let mut before = before;
    before.remove("manifest.json");
    after.remove("manifest.json");
    assert_eq!(before, after);
}

#[test]
fn codec_and_normalization_ignore_dev_and_test_frames() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    let ws = Workspace::new(&cfg.paths.work);

    // same corpus with every held-out recording overwritten
    let mut other = cfg.clone();
    other.paths.work = dir.path().join("work2");
    let held_out: Vec<String> = ["dev", "test"].iter().flat_map(|s| split_ids(&ws, "synth", s)).collect();
    for id in &held_out {
        let ult = cfg.paths.corpus.join("synth").join(format!("{id}.ult"));
        let bytes: Vec<u8> = std::fs::read(&ult).unwrap().iter().map(|b| b.wrapping_add(97)).collect();
        std::fs::write(&ult, bytes).unwrap();
    }
    cmd_prepare(&other).unwrap();
    let ws2 = Workspace::new(&other.paths.work);
    assert_eq!(std::fs::read(ws.codec("synth")).unwrap(), std::fs::read(ws2.codec("synth")).unwrap());
    assert_eq!(
        std::fs::read(ws.target_norm("synth")).unwrap(),
        std::fs::read(ws2.target_norm("synth")).unwrap()
    );
    // held-out features did change
    let id = &held_out[0];
    assert_ne!(
        std::fs::read(ws.target("synth", id)).unwrap(),
        std::fs::read(ws2.target("synth", id)).unwrap()
    );
}

#[test]
fn oracle_scores_zero_and_mean_baseline_scores_one_on_training_frames() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    let ws = Workspace::new(&cfg.paths.work);
    let norm = target_norm(&ws, "synth");

    let all: Vec<String> = ["train", "dev", "test"].iter().flat_map(|s| split_ids(&ws, "synth", s)).collect();
    let utts = eval_utterances(&ws, "synth", &all).unwrap();
    let mut oracle = OraclePredictor::new();
    for u in &utts {
        oracle.insert(&u.id, u.reference.clone());
    }
    for mode in [ParamGeneration::Slice, ParamGeneration::Mlpg] {
        let opts = EvalOptions {
            param_generation: mode,
            ..EvalOptions::default()
        };
        let s = evaluate_system(&oracle, &utts, &norm, &opts).unwrap();
        assert!(s.mcd.unwrap() < 1e-3, "{mode}: {:?}", s.mcd);
        assert!(s.rmse.unwrap() < 1e-4, "{mode}: {:?}", s.rmse);
        if mode == ParamGeneration::Slice {
            assert_eq!(s.mcd, Some(0.0));
            assert_eq!(s.rmse, Some(0.0));
        }
    }

    // on the frames the statistics were fitted on, predicting the mean
    // leaves exactly unit variance per normalized coefficient
    let train = eval_utterances(&ws, "synth", &split_ids(&ws, "synth", "train")).unwrap();
    let mean = MeanPredictor::from_norm(train[0].reference.layout().clone(), &norm).unwrap();
    let opts = EvalOptions {
        rmse_statics_only: false,
        ..EvalOptions::default()
    };
    let s = evaluate_system(&mean, &train, &norm, &opts).unwrap();
    assert!((s.rmse.unwrap() - 1.0).abs() < 1e-9, "{:?}", s.rmse);
}

#[test]
fn evaluate_reports_both_models_and_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    cmd_train(&cfg, ModelKind::Lstm).unwrap();
    let reports = cmd_evaluate(&cfg, &ModelKind::ALL).unwrap();
    let systems: Vec<&str> = reports.iter().map(|r| r.system.as_str()).collect();
    assert_eq!(systems, ["mean", "FC-DNN", "LSTM"]);
    for r in &reports {
        for set in [&r.dev, &r.test] {
            assert!(set.mcd.unwrap().is_finite() && set.rmse.unwrap().is_finite());
            assert!(set.frames > 0);
        }
    }
    let table = std::fs::read_to_string(cfg.paths.work.join("eval/results.tsv")).unwrap();
    assert!(table.contains("FC-DNN dev\tFC-DNN test\tLSTM dev\tLSTM test"));
    assert!(table.lines().any(|l| l.starts_with("ULTPCA_RMSE\tsynth\t")));
}

#[test]
fn training_reports_learning_for_both_models() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    let fc = cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    assert!(fc[0].acoustic.best_dev_loss < fc[0].acoustic.initial_dev_loss);
    let lstm = cmd_train(&cfg, ModelKind::Lstm).unwrap();
    let r = &lstm[0].acoustic;
    assert!(r.epochs_run <= cfg.lstm.max_epochs);
    assert_eq!(r.dev_losses.len(), r.epochs_run);
    assert_eq!(r.learning_rates.len(), r.epochs_run);
}

#[test]
fn speakers_are_trained_independently() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = common::small_config(dir.path(), 12);
    for (name, seed) in [("spk_a", 1), ("spk_b", 2)] {
        let synth = generate_synthetic_corpus(&SynthCorpusConfig {
            speaker: name.into(),
            seed,
            ..cfg.corpus.clone()
        })
        .unwrap();
        write_corpus(&cfg.paths.corpus, &synth.corpus).unwrap();
    }
    cmd_prepare(&cfg).unwrap();
    let summaries = cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    assert_eq!(summaries.len(), 2);
    let ws = Workspace::new(&cfg.paths.work);
    let a = std::fs::read(ws.acoustic_model("spk_a", ModelKind::Fcdnn)).unwrap();
    let b = std::fs::read(ws.acoustic_model("spk_b", ModelKind::Fcdnn)).unwrap();
    assert_ne!(a, b);

    // speaker a alone gives the same model
    cfg.paths.speakers = vec!["spk_a".into()];
    cfg.paths.work = dir.path().join("work_a");
    cmd_prepare(&cfg).unwrap();
    cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    let alone = std::fs::read(Workspace::new(&cfg.paths.work).acoustic_model("spk_a", ModelKind::Fcdnn)).unwrap();
    assert_eq!(a, alone);
}

#[test]
fn oracle_synthesis_reproduces_codec_reconstructions() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = prepared(dir.path(), 16);
    let ws = Workspace::new(&cfg.paths.work);
    let id = split_ids(&ws, "synth", "test")[0].clone();
    let corpus = read_corpus(&cfg.paths.corpus.join("synth")).unwrap();
    let text = corpus.record(&id).unwrap().text.clone();
    let target = FeatureMatrix::load(&ws.target("synth", &id)).unwrap();
    let mut oracle = OraclePredictor::new();
    oracle.insert(&id, target.clone());

    let codec = PcaCodec::load(&ws.codec("synth")).unwrap();
    let info = PrepareInfo::load(&ws.prepare_info("synth")).unwrap();
    let statics = target.statics(ULTPCA).unwrap();
    let expected = reconstruct_frames(&codec, &statics, info.raw_scanlines, info.raw_samples).unwrap();

    for (mode, tol) in [(ParamGeneration::Slice, 1e-6), (ParamGeneration::Mlpg, 1e-2)] {
        cfg.synthesis.param_generation = mode;
        let out = dir.path().join(format!("out_{mode}"));
        let r = synthesize(&cfg, "synth", &oracle, None, &text, &Timing::Reference(id.clone()), &out, "o").unwrap();
        assert_eq!(r.images.len(), expected.len());
        let worst = r
            .images
            .iter()
            .zip(&expected)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        assert!(worst <= tol, "{mode}: {worst}");
        let coeffs = r.articulatory.as_ref().unwrap().frames();
        let scale = statics.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = (coeffs - &statics).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(diff <= tol * scale.max(1.0), "{mode}: {diff}");
    }
}

#[test]
fn synthesis_outputs_are_synchronous_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 16);
    cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    let corpus = read_corpus(&cfg.paths.corpus.join("synth")).unwrap();
    let text = format!("{}, {}", corpus.records[1].text, corpus.records[0].text);
    let out = dir.path().join("out");
    let r = cmd_synthesize(&cfg, ModelKind::Fcdnn, None, Some(&text), &Timing::Predicted, &out, "x").unwrap();
    let t = r.n_frames();
    let acoustic = FeatureMatrix::load(&out.join("x.acoustic.fmtx")).unwrap();
    let coeffs = FeatureMatrix::load(&out.join("x.ultpca.fmtx")).unwrap();
    assert_eq!(acoustic.n_frames(), t);
    assert_eq!(coeffs.n_frames(), t);
    assert_eq!(r.images.len(), t);
    acoustic.check_vuv().unwrap();
    assert!(!acoustic.layout().has_deltas());
    assert!(acoustic.layout().range(VUV).is_some());

    let raw = ultratts::corpus::import_raw_ultrasound(&out.join("x.ult"), &out.join("x.param")).unwrap();
    assert_eq!(raw.frames.len(), t);
    assert_eq!(raw.params.fps, 200.0);
    assert_eq!((raw.params.scanlines, raw.params.samples), (16, 32));
    let pgms = std::fs::read_dir(out.join("x_video"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "pgm"))
        .count();
    assert_eq!(pgms, t.div_ceil(cfg.synthesis.video_stride));
    let plot = std::fs::read_to_string(out.join("x.coeffs.tsv")).unwrap();
    assert_eq!(plot.lines().count(), t + 1);
    assert!(plot.starts_with("time\tpredicted_1\tpredicted_2\tpredicted_4"));
}

#[test]
fn missing_models_or_codec_are_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 12);
    let out = dir.path().join("out");
    let err = cmd_synthesize(&cfg, ModelKind::Lstm, None, Some("x"), &Timing::Predicted, &out, "x").unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
    assert_eq!(err.exit_code(), 1);

    cmd_train(&cfg, ModelKind::Fcdnn).unwrap();
    std::fs::remove_file(Workspace::new(&cfg.paths.work).codec("synth")).unwrap();
    let corpus = read_corpus(&cfg.paths.corpus.join("synth")).unwrap();
    let err = cmd_synthesize(&cfg, ModelKind::Fcdnn, None, Some(&corpus.records[0].text), &Timing::Predicted, &out, "x")
        .unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");

    let mut empty = cfg.clone();
    empty.paths.work = dir.path().join("nothing");
    assert!(matches!(cmd_train(&empty, ModelKind::Fcdnn), Err(Error::Config(_))));
}

#[test]
fn prepare_names_the_failing_utterance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::small_config(dir.path(), 12);
    let synth = cmd_gen_corpus(&cfg).unwrap();
    let id = &synth.corpus.records[4].id;
    let ult = cfg.paths.corpus.join("synth").join(format!("{id}.ult"));
    let mut bytes = std::fs::read(&ult).unwrap();
    bytes.truncate(bytes.len() - 7);
    std::fs::write(&ult, bytes).unwrap();
    let err = cmd_prepare(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains(id.as_str()), "{err}");
}
