use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ultratts::pipeline::{
    cmd_evaluate, cmd_export_video, cmd_gen_corpus, cmd_plot_coeffs, cmd_prepare, cmd_synthesize, cmd_train,
    ModelKind, PipelineConfig, Timing,
};
use ultratts::{Error, Result};

/// Text-to-speech-and-articulation pipeline.
///
/// Every config field can be set after the subcommand with `--<field> <value>`
/// (dotted path or unique field name), e.g. `--variance_target 0.8` or
/// `--corpus.seed 7`.
#[derive(Parser)]
#[command(name = "ultratts", version)]
struct Cli {
    /// TOML config file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic corpus.
    GenCorpus {
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, hide = true)]
        settings: Vec<String>,
    },
    /// Split, fit the codec and write features for every speaker.
    Prepare {
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, hide = true)]
        settings: Vec<String>,
    },
    /// Train the duration and acoustic models of `model.kind`.
    Train {
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, hide = true)]
        settings: Vec<String>,
    },
    /// Synthesize features, ultrasound frames and video from text.
    Synthesize {
        #[arg(long)]
        text: Option<String>,
        /// Use the durations (and, without --text, the text) of a prepared utterance.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        speaker: Option<String>,
        #[arg(long, default_value = "synth_out")]
        out: PathBuf,
        #[arg(long, default_value = "utt")]
        name: String,
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, hide = true)]
        settings: Vec<String>,
    },
    /// Score trained models and the mean baseline on dev and test.
    Evaluate {
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, hide = true)]
        settings: Vec<String>,
    },
    /// Render a raw recording as wedge-shaped PGM frames.
    ExportVideo {
        #[arg(long)]
        input: PathBuf,
        /// Parameter file; defaults to the input with a .param extension.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(allow_hyphen_values = true, trailing_var_arg = true, hide = true)]
        settings: Vec<String>,
    },
    /// Tabulate coefficient trajectories for plotting.
    PlotCoeffs {
        #[arg(long)]
        original: PathBuf,
        /// `name=path` of a predicted feature file; repeatable.
        #[arg(long = "prediction")]
        predictions: Vec<String>,
        /// Comma-separated 1-based dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_settings(tokens: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = tokens.iter().peekable();
    while let Some(tok) = it.next() {
        let Some(flag) = tok.strip_prefix("--") else {
            return Err(Error::Config(format!("unexpected argument {tok:?}")));
        };
        if let Some((k, v)) = flag.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            continue;
        }
        match it.peek() {
            Some(v) if !v.starts_with("--") => out.push((flag.to_string(), it.next().expect("peeked").clone())),
            _ => out.push((flag.to_string(), "true".to_string())),
        }
    }
    Ok(out)
}

fn config(file: Option<&Path>, settings: &[String]) -> Result<PipelineConfig> {
    PipelineConfig::resolve(file, &parse_settings(settings)?)
}

fn run(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::GenCorpus { settings } => {
            let cfg = config(file, &settings)?;
            let synth = cmd_gen_corpus(&cfg)?;
            println!(
                "wrote {} utterances for speaker {} to {}",
                synth.corpus.records.len(),
                synth.corpus.speaker,
                cfg.paths.corpus.display()
            );
        }
        Command::Prepare { settings } => {
            let cfg = config(file, &settings)?;
            for info in cmd_prepare(&cfg)? {
                println!(
                    "{}: {}/{}/{} train/dev/test, {} components at {:.2} variance (paper: 128), retained {:.4}",
                    info.speaker,
                    info.n_train,
                    info.n_dev,
                    info.n_test,
                    info.n_components,
                    info.variance_target,
                    info.retained_variance
                );
            }
        }
        Command::Train { settings } => {
            let cfg = config(file, &settings)?;
            for s in cmd_train(&cfg, cfg.model.kind)? {
                println!(
                    "{} {}: acoustic dev loss {:.4} -> {:.4} (best epoch {} of {}), duration dev loss {:.4} -> {:.4}",
                    s.speaker,
                    s.kind.label(),
                    s.acoustic.initial_dev_loss,
                    s.acoustic.best_dev_loss,
                    s.acoustic.best_epoch,
                    s.acoustic.epochs_run,
                    s.duration.initial_dev_loss,
                    s.duration.best_dev_loss
                );
            }
        }
        Command::Synthesize {
            text,
            reference,
            speaker,
            out,
            name,
            settings,
        } => {
            let cfg = config(file, &settings)?;
            let timing = match reference {
                Some(id) => Timing::Reference(id),
                None => Timing::Predicted,
            };
            let res = cmd_synthesize(&cfg, cfg.model.kind, speaker.as_deref(), text.as_deref(), &timing, &out, &name)?;
            println!("{} frames, {} files in {}", res.n_frames(), res.files.len(), out.display());
        }
        Command::Evaluate { settings } => {
            let cfg = config(file, &settings)?;
            for r in cmd_evaluate(&cfg, &ModelKind::ALL)? {
                let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
                println!(
                    "{} {}: dev MCD {} RMSE {}, test MCD {} RMSE {}",
                    r.speaker,
                    r.system,
                    f(r.dev.mcd),
                    f(r.dev.rmse),
                    f(r.test.mcd),
                    f(r.test.rmse)
                );
            }
        }
        Command::ExportVideo {
            input,
            params,
            out,
            settings,
        } => {
            let cfg = config(file, &settings)?;
            let params = params.unwrap_or_else(|| input.with_extension("param"));
            let files = cmd_export_video(&input, &params, &cfg.geometry, &out, cfg.synthesis.video_stride)?;
            println!("wrote {} frames to {}", files.len(), out.display());
        }
        Command::PlotCoeffs {
            original,
            predictions,
            dims,
            out,
        } => {
            let preds = predictions
                .iter()
                .map(|p| {
                    p.split_once('=')
                        .map(|(n, f)| (n.to_string(), PathBuf::from(f)))
                        .ok_or_else(|| Error::Config(format!("--prediction expects name=path, got {p:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let dims = (!dims.is_empty()).then_some(dims.as_slice());
            let used = cmd_plot_coeffs(&original, &preds, dims, &out)?;
            println!("wrote dims {used:?} to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
