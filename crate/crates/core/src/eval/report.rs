use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::MCD_CONSTANT;
use crate::{io_util, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceScore {
    pub id: String,
    pub frames: usize,
    /// dB; absent when the system predicts no MGC stream.
    pub mcd: Option<f64>,
    /// On mean-variance normalized coefficients; absent without ULTPCA.
    pub rmse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetScores {
    pub utterances: Vec<UtteranceScore>,
    pub frames: usize,
    pub mcd: Option<f64>,
    pub rmse: Option<f64>,
}

impl SetScores {
    /// Pools the utterances over frames: MCD is the frame-weighted mean of
    /// the per-utterance values, RMSE the root of the frame-weighted mean
    /// squared error.
    pub fn from_utterances(utterances: Vec<UtteranceScore>) -> Self {
        let frames: usize = utterances.iter().map(|u| u.frames).sum();
        let avg = |f: &dyn Fn(&UtteranceScore) -> Option<f64>| -> Option<f64> {
            let mut num = 0.0;
            let mut den = 0usize;
            for u in &utterances {
                num += f(u)? * u.frames as f64;
                den += u.frames;
            }
            (den > 0).then(|| num / den as f64)
        };
        let mcd = avg(&|u| u.mcd);
        let rmse = avg(&|u| u.rmse.map(|r| r * r)).map(f64::sqrt);
        Self {
            utterances,
            frames,
            mcd,
            rmse,
        }
    }
}

/// Dev and test scores of one system on one speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub speaker: String,
    pub system: String,
    pub dev: SetScores,
    pub test: SetScores,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

/// Two tab-separated tables, MCD then ULT-PCA RMSE: one row per speaker,
/// a dev and a test column per system in order of first appearance.
pub fn write_tables(reports: &[EvalReport], path: &Path) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::invalid("no evaluation reports to write"));
    }
    let mut systems: Vec<&str> = Vec::new();
    let mut speakers: Vec<&str> = Vec::new();
    for r in reports {
        if !systems.contains(&r.system.as_str()) {
            systems.push(&r.system);
        }
        if !speakers.contains(&r.speaker.as_str()) {
            speakers.push(&r.speaker);
        }
    }
    let mut w = io_util::create(path)?;
    writeln!(
        w,
        "# MCD (dB) = {MCD_CONSTANT:.6} * sqrt(2 * sum_(d>=1) (c_d - c'_d)^2), frame-averaged, c_0 excluded"
    )?;
    writeln!(w, "# ULT-PCA RMSE on coefficients normalized with training mean/variance")?;
    let tables: [(&str, fn(&SetScores) -> Option<f64>); 2] =
        [("MCD", |s| s.mcd), ("ULTPCA_RMSE", |s| s.rmse)];
    for (i, (name, metric)) in tables.into_iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        write!(w, "{name}\tspeaker")?;
        for sys in &systems {
            write!(w, "\t{sys} dev\t{sys} test")?;
        }
        writeln!(w)?;
        for spk in &speakers {
            write!(w, "{name}\t{spk}")?;
            for sys in &systems {
                match reports.iter().find(|r| r.speaker == *spk && r.system == *sys) {
                    Some(r) => write!(w, "\t{}\t{}", cell(metric(&r.dev)), cell(metric(&r.test)))?,
                    None => write!(w, "\t-\t-")?,
                }
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(reports: &[EvalReport], path: &Path) -> Result<()> {
    let mut w = io_util::create(path)?;
    serde_json::to_writer_pretty(&mut w, reports).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(id: &str, frames: usize, mcd: f64, rmse: f64) -> UtteranceScore {
        UtteranceScore {
            id: id.into(),
            frames,
            mcd: Some(mcd),
            rmse: Some(rmse),
        }
    }

    #[test]
    fn frame_pooled_scores() {
        let s = SetScores::from_utterances(vec![u("a", 10, 1.0, 2.0), u("b", 30, 3.0, 0.0)]);
        assert_eq!(s.frames, 40);
        assert!((s.mcd.unwrap() - 2.5).abs() < 1e-12);
        assert!((s.rmse.unwrap() - 1.0).abs() < 1e-12);
        let missing = SetScores::from_utterances(vec![UtteranceScore { mcd: None, ..u("a", 5, 0.0, 1.0) }]);
        assert_eq!(missing.mcd, None);
        assert_eq!(missing.rmse, Some(1.0));
    }

    #[test]
    fn tables_have_dev_and_test_columns() {
        let set = SetScores::from_utterances(vec![u("a", 10, 6.0, 1.0)]);
        let reports = vec![
            EvalReport { speaker: "s1".into(), system: "fcdnn".into(), dev: set.clone(), test: set.clone() },
            EvalReport { speaker: "s1".into(), system: "lstm".into(), dev: set.clone(), test: set },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.tsv");
        write_tables(&reports, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("MCD\tspeaker\tfcdnn dev\tfcdnn test\tlstm dev\tlstm test"));
        assert!(text.contains("MCD\ts1\t6.000\t6.000\t6.000\t6.000"));
        assert!(text.contains("ULTPCA_RMSE\ts1\t1.000"));
        let jp = dir.path().join("r.json");
        write_json(&reports, &jp).unwrap();
        let back: Vec<EvalReport> = serde_json::from_str(&std::fs::read_to_string(&jp).unwrap()).unwrap();
        assert_eq!(back, reports);
    }
}
