use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::ultra::UltrasoundFrame;
use crate::{io_util, Error, Result};

pub const DEFAULT_ULT_FPS: f64 = 81.5;

/// Contents of a `.param` file: `key=value` lines with `scanlines`,
/// `samples` and `fps`. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltParams {
    pub scanlines: usize,
    pub samples: usize,
    pub fps: f64,
}

impl UltParams {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("{origin}:{}: expected key=value, got {line:?}", n + 1))
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn field<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str, origin: &str) -> Result<T> {
            let v = kv
                .get(key)
                .ok_or_else(|| Error::Config(format!("{origin}: missing '{key}'")))?;
            v.parse()
                .map_err(|_| Error::Config(format!("{origin}: invalid {key} {v:?}")))
        }
        let scanlines: usize = field(&kv, "scanlines", origin)?;
        let samples: usize = field(&kv, "samples", origin)?;
        let fps: f64 = field(&kv, "fps", origin)?;
        if scanlines == 0 || samples == 0 || !(fps > 0.0) || !fps.is_finite() {
            return Err(Error::Config(format!(
                "{origin}: scanlines, samples and fps must be positive"
            )));
        }
        Ok(Self {
            scanlines,
            samples,
            fps,
        })
    }

    pub fn to_text(&self) -> String {
        format!(
            "scanlines={}\nsamples={}\nfps={}\n",
            self.scanlines, self.samples, self.fps
        )
    }

    pub fn frame_bytes(&self) -> usize {
        self.scanlines * self.samples
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawUltrasound {
    pub params: UltParams,
    pub frames: Vec<UltrasoundFrame>,
}

/// Read consecutive 8-bit scanline frames from `data` as described by the
/// parameter file.
pub fn import_raw_ultrasound(data: &Path, params: &Path) -> Result<RawUltrasound> {
    let ptext = std::fs::read_to_string(params).map_err(|e| {
        Error::Config(format!("cannot read parameter file {}: {e}", params.display()))
    })?;
    let p = UltParams::parse(&ptext, &params.display().to_string())?;
    let bytes = std::fs::read(data)?;
    let fb = p.frame_bytes();
    if bytes.len() % fb != 0 {
        return Err(Error::corrupt(
            data.display().to_string(),
            format!(
                "{} bytes is not a whole number of {}x{} frames ({} bytes each)",
                bytes.len(),
                p.scanlines,
                p.samples,
                fb
            ),
        ));
    }
    if bytes.is_empty() {
        log::warn!("{} holds no frames", data.display());
    }
    let frames = bytes
        .chunks_exact(fb)
        .map(|c| UltrasoundFrame::new(p.scanlines, p.samples, c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RawUltrasound { params: p, frames })
}

pub fn write_raw_ultrasound(
    frames: &[UltrasoundFrame],
    params: &UltParams,
    data: &Path,
    params_path: &Path,
) -> Result<()> {
    let mut w = io_util::create(data)?;
    for f in frames {
        if f.scanlines() != params.scanlines || f.samples_per_line() != params.samples {
            return Err(Error::invalid(format!(
                "frame is {}x{}, parameters declare {}x{}",
                f.scanlines(),
                f.samples_per_line(),
                params.scanlines,
                params.samples
            )));
        }
        w.write_all(f.intensities())?;
    }
    w.flush()?;
    let mut pw = io_util::create(params_path)?;
    pw.write_all(params.to_text().as_bytes())?;
    pw.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(bytes: usize) -> (tempfile::TempDir, std::path::PathBuf, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("u.ult");
        let params = dir.path().join("u.param");
        std::fs::write(&data, vec![7u8; bytes]).unwrap();
        std::fs::write(&params, "scanlines=64\nsamples=842\nfps=81.5\n").unwrap();
        (dir, data, params)
    }

    #[test]
    fn two_full_frames() {
        let (_d, data, params) = setup(2 * 53_888);
        let raw = import_raw_ultrasound(&data, &params).unwrap();
        assert_eq!(raw.frames.len(), 2);
        assert_eq!(raw.params.fps, 81.5);
        assert_eq!(raw.frames[1].get(63, 841), 7);
    }

    #[test]
    fn empty_file() {
        let (_d, data, params) = setup(0);
        assert!(import_raw_ultrasound(&data, &params).unwrap().frames.is_empty());
    }

    #[test]
    fn partial_frame() {
        let (_d, data, params) = setup(53_889);
        let err = import_raw_ultrasound(&data, &params).unwrap_err();
        assert!(matches!(err, Error::CorruptFile { .. }));
        assert!(err.to_string().contains("53889"));
    }

    #[test]
    fn param_errors() {
        let (_d, data, params) = setup(10);
        std::fs::write(&params, "scanlines=64\nfps=81.5\n").unwrap();
        assert!(matches!(import_raw_ultrasound(&data, &params), Err(Error::Config(_))));
        std::fs::remove_file(&params).unwrap();
        assert!(matches!(import_raw_ultrasound(&data, &params), Err(Error::Config(_))));
        assert!(UltParams::parse("scanlines=x\nsamples=1\nfps=1", "p").is_err());
    }

    #[test]
    fn write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = UltParams { scanlines: 2, samples: 3, fps: 81.5 };
        let frames: Vec<_> = (0..4u8)
            .map(|k| UltrasoundFrame::new(2, 3, (0..6).map(|i| i * 10 + k).collect()).unwrap())
            .collect();
        let (d, pp) = (dir.path().join("a.ult"), dir.path().join("a.param"));
        write_raw_ultrasound(&frames, &p, &d, &pp).unwrap();
        let back = import_raw_ultrasound(&d, &pp).unwrap();
        assert_eq!(back.frames, frames);
        assert_eq!(back.params, p);
    }
}
