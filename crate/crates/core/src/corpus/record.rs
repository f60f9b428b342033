use std::io::Write;
use std::path::Path;

use crate::features::FeatureMatrix;
use crate::frontend::{read_labels, write_labels, DurationLabel, Inventory, Lexicon};
use crate::ultra::UltrasoundFrame;
use crate::{io_util, Error, Result};

use super::raw::{import_raw_ultrasound, write_raw_ultrasound, UltParams};

pub const UTTERANCES_FILE: &str = "utterances.tsv";
pub const INVENTORY_FILE: &str = "inventory.txt";
pub const LEXICON_FILE: &str = "lexicon.txt";

/// One recorded utterance. `acoustic` holds static MGC, BAP, continuous
/// LF0 and VUV at the acoustic frame shift; `labels` give phone durations in
/// acoustic frames.
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceRecord {
    pub id: String,
    pub speaker: String,
    pub text: String,
    pub labels: Vec<DurationLabel>,
    pub ultrasound: Vec<UltrasoundFrame>,
    pub ult_fps: f64,
    pub acoustic: FeatureMatrix,
}

impl UtteranceRecord {
    pub fn durations(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.frames).collect()
    }

    pub fn ultrasound_seconds(&self) -> f64 {
        self.ultrasound.len() as f64 / self.ult_fps
    }

    pub fn acoustic_seconds(&self) -> f64 {
        self.acoustic.n_frames() as f64 * self.acoustic.frame_shift()
    }

    pub fn validate(&self) -> Result<()> {
        let id = self.id.as_str();
        let total: usize = self.labels.iter().map(|l| l.frames).sum();
        if total != self.acoustic.n_frames() {
            return Err(Error::data(
                id,
                format!(
                    "labels cover {total} frames, acoustic features have {}",
                    self.acoustic.n_frames()
                ),
            ));
        }
        if let Some(first) = self.ultrasound.first() {
            let shape = (first.scanlines(), first.samples_per_line());
            if self
                .ultrasound
                .iter()
                .any(|f| (f.scanlines(), f.samples_per_line()) != shape)
            {
                return Err(Error::data(id, "ultrasound frames differ in size"));
            }
        }
        let gap = (self.ultrasound_seconds() - self.acoustic_seconds()).abs();
        if gap > 1.0 / self.ult_fps + 1e-9 {
            return Err(Error::data(
                id,
                format!(
                    "ultrasound lasts {:.4} s but acoustics {:.4} s",
                    self.ultrasound_seconds(),
                    self.acoustic_seconds()
                ),
            ));
        }
        Ok(())
    }
}

/// One speaker's recordings plus the frontend resources they use.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub speaker: String,
    pub inventory: Inventory,
    pub lexicon: Lexicon,
    pub records: Vec<UtteranceRecord>,
}

impl Corpus {
    pub fn ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.id.clone()).collect()
    }

    pub fn record(&self, id: &str) -> Option<&UtteranceRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains(['/', '\\', '\t', '\n']) || id.starts_with('.') {
        return Err(Error::invalid(format!("unusable utterance id {id:?}")));
    }
    Ok(())
}

/// Write `corpus` into `root/<speaker>/`.
pub fn write_corpus(root: &Path, corpus: &Corpus) -> Result<()> {
    check_id(&corpus.speaker)?;
    let dir = root.join(&corpus.speaker);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join(INVENTORY_FILE), corpus.inventory.to_text())?;
    std::fs::write(dir.join(LEXICON_FILE), corpus.lexicon.to_text())?;
    let mut index = io_util::create(&dir.join(UTTERANCES_FILE))?;
    for r in &corpus.records {
        check_id(&r.id)?;
        if r.text.contains(['\t', '\n']) {
            return Err(Error::data(&r.id, "text contains a tab or newline"));
        }
        if r.ultrasound.is_empty() {
            return Err(Error::data(&r.id, "no ultrasound frames"));
        }
        writeln!(index, "{}\t{}", r.id, r.text)?;
        let params = UltParams {
            scanlines: r.ultrasound[0].scanlines(),
            samples: r.ultrasound[0].samples_per_line(),
            fps: r.ult_fps,
        };
        write_raw_ultrasound(
            &r.ultrasound,
            &params,
            &dir.join(format!("{}.ult", r.id)),
            &dir.join(format!("{}.param", r.id)),
        )?;
        write_labels(&dir.join(format!("{}.lab", r.id)), &r.labels)?;
        r.acoustic.save(&dir.join(format!("{}.acoustic.fmtx", r.id)))?;
    }
    index.flush()?;
    Ok(())
}

/// Read a speaker directory written by [`write_corpus`] (or laid out the
/// same way by hand). The speaker name is the directory name.
pub fn read_corpus(dir: &Path) -> Result<Corpus> {
    let speaker = dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Config(format!("bad corpus directory {}", dir.display())))?
        .to_string();
    let index_path = dir.join(UTTERANCES_FILE);
    let index = std::fs::read_to_string(&index_path).map_err(|e| {
        Error::Config(format!("cannot read {}: {e}", index_path.display()))
    })?;
    let inventory = Inventory::load(&dir.join(INVENTORY_FILE))?;
    let lexicon = Lexicon::load(&dir.join(LEXICON_FILE))?;
    let mut records = Vec::new();
    for (n, line) in index.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line.split_once('\t').ok_or_else(|| {
            Error::corrupt(
                index_path.display().to_string(),
                format!("line {}: expected id TAB text", n + 1),
            )
        })?;
        check_id(id)?;
        let load = || -> Result<UtteranceRecord> {
            let raw = import_raw_ultrasound(
                &dir.join(format!("{id}.ult")),
                &dir.join(format!("{id}.param")),
            )?;
            let record = UtteranceRecord {
                id: id.to_string(),
                speaker: speaker.clone(),
                text: text.to_string(),
                labels: read_labels(&dir.join(format!("{id}.lab")))?,
                ultrasound: raw.frames,
                ult_fps: raw.params.fps,
                acoustic: FeatureMatrix::load(&dir.join(format!("{id}.acoustic.fmtx")))?,
            };
            record.validate()?;
            Ok(record)
        };
        records.push(load().map_err(|e| match e {
            e @ (Error::Config(_) | Error::Data { .. }) => e,
            other => Error::data(id, other.to_string()),
        })?);
    }
    if records.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} lists no utterances",
            index_path.display()
        )));
    }
    Ok(Corpus {
        speaker,
        inventory,
        lexicon,
        records,
    })
}
