use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{concatenate, s, Array2, Axis};

use super::{Segment, StreamLayout, VUV};
use crate::io_util;
use crate::{Error, Result};

/// 5 ms, i.e. 200 frames per second.
pub const DEFAULT_FRAME_SHIFT: f64 = 0.005;

const MAGIC: &[u8; 4] = b"FMTX";
const VERSION: u16 = 1;

/// A time-major sequence of frame vectors with a named column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    layout: StreamLayout,
    frame_shift: f64,
    frames: Array2<f64>,
}

impl FeatureMatrix {
    pub fn new(layout: StreamLayout, frame_shift: f64, frames: Array2<f64>) -> Result<Self> {
        if frames.ncols() != layout.total() {
            return Err(Error::invalid(format!(
                "frames are {} wide but the layout needs {}",
                frames.ncols(),
                layout.total()
            )));
        }
        if !(frame_shift > 0.0) {
            return Err(Error::invalid("frame shift must be positive"));
        }
        Ok(Self {
            layout,
            frame_shift,
            frames,
        })
    }

    pub fn layout(&self) -> &StreamLayout {
        &self.layout
    }

    pub fn frame_shift(&self) -> f64 {
        self.frame_shift
    }

    pub fn frames(&self) -> &Array2<f64> {
        &self.frames
    }

    pub fn into_frames(self) -> Array2<f64> {
        self.frames
    }

    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }

    pub fn width(&self) -> usize {
        self.frames.ncols()
    }

    /// Columns of one segment (including its delta blocks).
    pub fn segment(&self, name: &str) -> Result<Array2<f64>> {
        let r = self
            .layout
            .range(name)
            .ok_or_else(|| Error::invalid(format!("layout has no segment {name}")))?;
        Ok(self.frames.slice(s![.., r]).to_owned())
    }

    /// Static columns of one segment.
    pub fn statics(&self, name: &str) -> Result<Array2<f64>> {
        let r = self
            .layout
            .static_range(name)
            .ok_or_else(|| Error::invalid(format!("layout has no segment {name}")))?;
        Ok(self.frames.slice(s![.., r]).to_owned())
    }

    /// Check that the VUV column, if any, holds only 0 and 1.
    pub fn check_vuv(&self) -> Result<()> {
        if let Some(r) = self.layout.range(VUV) {
            if let Some(v) = self
                .frames
                .slice(s![.., r])
                .iter()
                .find(|&&v| v != 0.0 && v != 1.0)
            {
                return Err(Error::invalid(format!("VUV value {v} is not 0 or 1")));
            }
        }
        Ok(())
    }

    /// Write as FMTX. Frames are stored as little-endian f32.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = io_util::create(path)?;
        w.write_all(MAGIC)?;
        w.write_u16::<LittleEndian>(VERSION)?;
        w.write_f64::<LittleEndian>(self.frame_shift)?;
        let segs = self.layout.segments();
        w.write_u16::<LittleEndian>(segs.len() as u16)?;
        for seg in segs {
            io_util::write_str(&mut w, &seg.name)?;
            w.write_u32::<LittleEndian>(seg.width as u32)?;
            w.write_u8(u8::from(seg.deltas))?;
        }
        w.write_u32::<LittleEndian>(self.n_frames() as u32)?;
        for &v in self.frames.iter() {
            w.write_f32::<LittleEndian>(v as f32)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let p = path.display().to_string();
        let mut r = io_util::open(path)?;
        io_util::expect_magic(&mut r, MAGIC, &p)?;
        let trunc = |_| Error::corrupt(&p, "truncated feature file");
        let version = r.read_u16::<LittleEndian>().map_err(trunc)?;
        if version != VERSION {
            return Err(Error::corrupt(&p, format!("unsupported version {version}")));
        }
        let frame_shift = r.read_f64::<LittleEndian>().map_err(trunc)?;
        let n_segs = r.read_u16::<LittleEndian>().map_err(trunc)?;
        let mut segs = Vec::with_capacity(n_segs as usize);
        for _ in 0..n_segs {
            let name = io_util::read_str(&mut r).map_err(trunc)?;
            let width = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
            let deltas = r.read_u8().map_err(trunc)? != 0;
            segs.push(Segment {
                name,
                width,
                deltas,
            });
        }
        let layout = StreamLayout::new(segs).map_err(|e| Error::corrupt(&p, e.to_string()))?;
        let t = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let mut data = vec![0f32; t * layout.total()];
        r.read_f32_into::<LittleEndian>(&mut data).map_err(trunc)?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::corrupt(&p, "trailing bytes after frames"));
        }
        let frames = Array2::from_shape_vec(
            (t, layout.total()),
            data.into_iter().map(f64::from).collect(),
        )
        .map_err(|e| Error::corrupt(&p, e.to_string()))?;
        Self::new(layout, frame_shift, frames).map_err(|e| Error::corrupt(&p, e.to_string()))
    }
}

/// Column-concatenate acoustic and articulatory streams.
pub fn compose_target(acoustic: &FeatureMatrix, articulatory: &FeatureMatrix) -> Result<FeatureMatrix> {
    if acoustic.n_frames() != articulatory.n_frames() {
        return Err(Error::Alignment {
            what: "articulatory stream".into(),
            left: articulatory.n_frames(),
            right: acoustic.n_frames(),
        });
    }
    if (acoustic.frame_shift - articulatory.frame_shift).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "frame shifts differ: {} vs {}",
            acoustic.frame_shift, articulatory.frame_shift
        )));
    }
    let layout = acoustic.layout.concat(&articulatory.layout)?;
    let frames = concatenate(Axis(1), &[acoustic.frames.view(), articulatory.frames.view()])
        .expect("row counts checked");
    FeatureMatrix::new(layout, acoustic.frame_shift, frames)
}

/// Split a composed matrix after its first `n_acoustic_segments` segments.
pub fn split_target(
    composed: &FeatureMatrix,
    n_acoustic_segments: usize,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let segs = composed.layout.segments();
    if n_acoustic_segments > segs.len() {
        return Err(Error::invalid("split point beyond the last segment"));
    }
    let left = StreamLayout::new(segs[..n_acoustic_segments].to_vec())?;
    let right = StreamLayout::new(segs[n_acoustic_segments..].to_vec())?;
    let cut = left.total();
    let a = FeatureMatrix::new(
        left,
        composed.frame_shift,
        composed.frames.slice(s![.., ..cut]).to_owned(),
    )?;
    let b = FeatureMatrix::new(
        right,
        composed.frame_shift,
        composed.frames.slice(s![.., cut..]).to_owned(),
    )?;
    Ok((a, b))
}

/// Trim or pad (by repeating the last frame) a stream to `target` frames.
/// Differences above `max_slack` frames are reported as misalignment.
pub fn fit_length(stream: &Array2<f64>, target: usize, max_slack: usize) -> Result<Array2<f64>> {
    let t = stream.nrows();
    if t.abs_diff(target) > max_slack || t == 0 {
        return Err(Error::Alignment {
            what: "resampled stream".into(),
            left: t,
            right: target,
        });
    }
    if t >= target {
        return Ok(stream.slice(s![..target, ..]).to_owned());
    }
    let mut out = Array2::zeros((target, stream.ncols()));
    out.slice_mut(s![..t, ..]).assign(stream);
    let last = stream.row(t - 1);
    for i in t..target {
        out.row_mut(i).assign(&last);
    }
    Ok(out)
}
