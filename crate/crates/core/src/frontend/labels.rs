use std::path::Path;

use crate::{Error, Result};

/// One `phone<TAB>frames` line of a duration label file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurationLabel {
    pub phone: String,
    pub frames: usize,
}

pub fn parse_labels(text: &str, origin: &str) -> Result<Vec<DurationLabel>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::corrupt(origin, format!("line {}: expected phone<TAB>frames", lineno + 1));
        let (phone, frames) = line.split_once('\t').ok_or_else(bad)?;
        let frames: usize = frames.trim().parse().map_err(|_| bad())?;
        if frames == 0 {
            return Err(Error::corrupt(origin, format!("line {}: zero duration", lineno + 1)));
        }
        out.push(DurationLabel {
            phone: phone.trim().to_string(),
            frames,
        });
    }
    Ok(out)
}

pub fn read_labels(path: &Path) -> Result<Vec<DurationLabel>> {
    parse_labels(&std::fs::read_to_string(path)?, &path.display().to_string())
}

pub fn write_labels(path: &Path, labels: &[DurationLabel]) -> Result<()> {
    let text: String = labels
        .iter()
        .map(|l| format!("{}\t{}\n", l.phone, l.frames))
        .collect();
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.lab");
        let labels = vec![
            DurationLabel { phone: "sil".into(), frames: 12 },
            DurationLabel { phone: "AX".into(), frames: 7 },
        ];
        write_labels(&p, &labels).unwrap();
        assert_eq!(read_labels(&p).unwrap(), labels);
        assert!(parse_labels("sil\t0\n", "x").is_err());
        assert!(parse_labels("sil 3\n", "x").is_err());
    }
}
