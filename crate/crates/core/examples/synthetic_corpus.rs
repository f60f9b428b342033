//! Generate the synthetic two-stream corpus, write it in the on-disk layout
//! and import one raw ultrasound recording back.
//!
//!     cargo run --release --example synthetic_corpus [out_dir]

use std::path::PathBuf;

use ultratts::corpus::{generate_synthetic_corpus, import_raw_ultrasound, read_corpus, write_corpus, SynthCorpusConfig};

fn main() -> ultratts::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("ultratts-corpus"), PathBuf::from);
    let cfg = SynthCorpusConfig {
        n_utterances: 20,
        ..SynthCorpusConfig::default()
    };
    let synth = generate_synthetic_corpus(&cfg)?;
    write_corpus(&out, &synth.corpus)?;
    println!(
        "{} utterances, {} lexicon words, {} phone archetypes -> {}",
        synth.corpus.records.len(),
        synth.corpus.lexicon.len(),
        synth.articulatory.len(),
        out.display()
    );

    let corpus = read_corpus(&out.join(&cfg.speaker))?;
    let rec = &corpus.records[0];
    println!(
        "{}: {:?}, {} phones, {} acoustic frames, {} ultrasound frames ({:.3} s vs {:.3} s)",
        rec.id,
        rec.text,
        rec.labels.len(),
        rec.acoustic.n_frames(),
        rec.ultrasound.len(),
        rec.acoustic_seconds(),
        rec.ultrasound_seconds()
    );

    let dir = out.join(&cfg.speaker);
    let raw = import_raw_ultrasound(&dir.join(format!("{}.ult", rec.id)), &dir.join(format!("{}.param", rec.id)))?;
    println!(
        "raw import: {} frames of {}x{} at {} fps",
        raw.frames.len(),
        raw.params.scanlines,
        raw.params.samples,
        raw.params.fps
    );
    Ok(())
}
