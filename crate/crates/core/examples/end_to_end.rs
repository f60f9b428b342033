//! The whole pipeline on a small synthetic corpus: prepare, train both
//! model kinds, evaluate against the mean baseline, then synthesize.
//!
//!     cargo run --release --example end_to_end [work_dir]

use std::path::PathBuf;

use ultratts::pipeline::{
    cmd_evaluate, cmd_gen_corpus, cmd_prepare, cmd_synthesize, cmd_train, ModelKind, PipelineConfig, Timing,
};

fn main() -> ultratts::Result<()> {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("ultratts-e2e"), PathBuf::from);
    let mut cfg = PipelineConfig::default();
    cfg.paths.corpus = root.join("corpus");
    cfg.paths.work = root.join("work");
    cfg.corpus.n_utterances = 60;
    cfg.corpus.scanlines = 32;
    cfg.corpus.samples = 64;
    cfg.codec.reduced_scanlines = 32;
    cfg.codec.reduced_samples = 64;
    cfg.mlp.hidden_layers = 3;
    cfg.mlp.hidden_width = 128;
    cfg.duration.hidden_layers = 2;
    cfg.duration.hidden_width = 64;
    cfg.lstm.ff_layers = 2;
    cfg.lstm.ff_width = 64;
    cfg.lstm.lstm_width = 32;
    cfg.lstm.max_epochs = 12;
    cfg.lstm.warmup_epochs = 6;
    cfg.validate()?;

    let synth = cmd_gen_corpus(&cfg)?;
    for info in cmd_prepare(&cfg)? {
        println!(
            "{}: {}/{}/{} utterances, {} components at {:.2} variance",
            info.speaker, info.n_train, info.n_dev, info.n_test, info.n_components, info.variance_target
        );
    }
    for kind in ModelKind::ALL {
        for s in cmd_train(&cfg, kind)? {
            println!(
                "{}: acoustic dev loss {:.3} -> {:.3}, duration {:.3} -> {:.3}",
                kind.label(),
                s.acoustic.initial_dev_loss,
                s.acoustic.best_dev_loss,
                s.duration.initial_dev_loss,
                s.duration.best_dev_loss
            );
        }
    }
    println!("{:<8} {:>9} {:>9} {:>9} {:>9}", "system", "MCD dev", "MCD test", "RMSE dev", "RMSE test");
    for r in cmd_evaluate(&cfg, &ModelKind::ALL)? {
        println!(
            "{:<8} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            r.system,
            r.dev.mcd.unwrap_or(f64::NAN),
            r.test.mcd.unwrap_or(f64::NAN),
            r.dev.rmse.unwrap_or(f64::NAN),
            r.test.rmse.unwrap_or(f64::NAN)
        );
    }

    let text = synth.corpus.records[0].text.clone();
    let out = root.join("synth");
    let r = cmd_synthesize(&cfg, ModelKind::Fcdnn, None, Some(&text), &Timing::Predicted, &out, "demo")?;
    println!(
        "{text:?}: {} frames, acoustic {} x {}, {} files in {}",
        r.n_frames(),
        r.acoustic.as_ref().map_or(0, |a| a.n_frames()),
        r.acoustic.as_ref().map_or(0, |a| a.width()),
        r.files.len(),
        out.display()
    );
    Ok(())
}
