use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::io_util;
use crate::{Error, Result};

pub const MINMAX_LO: f64 = 0.01;
pub const MINMAX_HI: f64 = 0.99;

const CONSTANT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMode {
    MinMax,
    MeanVariance,
}

/// Per-column normalization statistics.
///
/// For `MinMax`, `a`/`b` hold the column min/max and values map onto
/// `[lo, hi]`. For `MeanVariance`, `a`/`b` hold mean and population standard
/// deviation. Constant columns map to the interval midpoint (min-max) or 0
/// and invert back to their constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mode: NormMode,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl NormStats {
    pub fn fit(stream: &Array2<f64>, mode: NormMode) -> Result<Self> {
        if stream.nrows() == 0 {
            return Err(Error::InsufficientData(
                "normalization needs at least one frame".into(),
            ));
        }
        let (a, b) = match mode {
            NormMode::MinMax => {
                let min = stream.fold_axis(Axis(0), f64::INFINITY, |m, &v| m.min(v));
                let max = stream.fold_axis(Axis(0), f64::NEG_INFINITY, |m, &v| m.max(v));
                (min.to_vec(), max.to_vec())
            }
            NormMode::MeanVariance => {
                let mean = stream.mean_axis(Axis(0)).expect("non-empty");
                let std = stream.std_axis(Axis(0), 0.0);
                (mean.to_vec(), std.to_vec())
            }
        };
        Ok(Self {
            mode,
            a,
            b,
            lo: MINMAX_LO,
            hi: MINMAX_HI,
        })
    }

    pub fn width(&self) -> usize {
        self.a.len()
    }

    pub fn is_constant(&self, col: usize) -> bool {
        match self.mode {
            NormMode::MinMax => self.b[col] - self.a[col] < CONSTANT_EPS,
            NormMode::MeanVariance => self.b[col] < CONSTANT_EPS,
        }
    }

    /// Per-column `(scale, offset)` with `normalized = raw * scale + offset`.
    fn affine(&self, col: usize) -> (f64, f64) {
        let constant = self.is_constant(col);
        match self.mode {
            NormMode::MinMax => {
                if constant {
                    (0.0, 0.5 * (self.lo + self.hi))
                } else {
                    let s = (self.hi - self.lo) / (self.b[col] - self.a[col]);
                    (s, self.lo - self.a[col] * s)
                }
            }
            NormMode::MeanVariance => {
                if constant {
                    (0.0, 0.0)
                } else {
                    let s = 1.0 / self.b[col];
                    (s, -self.a[col] * s)
                }
            }
        }
    }

    fn check_width(&self, stream: &Array2<f64>) -> Result<()> {
        if stream.ncols() != self.width() {
            return Err(Error::invalid(format!(
                "stream is {} wide, normalization stats cover {}",
                stream.ncols(),
                self.width()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, stream: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_width(stream)?;
        let mut out = stream.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (s, o) = self.affine(j);
            col.mapv_inplace(|v| v * s + o);
        }
        Ok(out)
    }

    pub fn invert(&self, stream: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_width(stream)?;
        let mut out = stream.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            if self.is_constant(j) {
                col.fill(self.a[j]);
                continue;
            }
            match self.mode {
                NormMode::MinMax => {
                    let (lo, span) = (self.a[j], self.b[j] - self.a[j]);
                    let unit = self.hi - self.lo;
                    col.mapv_inplace(|v| lo + (v - self.lo) / unit * span);
                }
                NormMode::MeanVariance => {
                    let (m, sd) = (self.a[j], self.b[j]);
                    col.mapv_inplace(|v| v * sd + m);
                }
            }
        }
        Ok(out)
    }

    /// Per-column variance in raw units (mean-variance stats only).
    pub fn variances(&self) -> Option<Array1<f64>> {
        match self.mode {
            NormMode::MeanVariance => Some(self.b.iter().map(|s| s * s).collect()),
            NormMode::MinMax => None,
        }
    }

    /// Restrict to a contiguous range of columns.
    pub fn select(&self, cols: std::ops::Range<usize>) -> Self {
        Self {
            mode: self.mode,
            a: self.a[cols.clone()].to_vec(),
            b: self.b[cols].to_vec(),
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub(crate) fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_u8(match self.mode {
            NormMode::MinMax => 0,
            NormMode::MeanVariance => 1,
        })?;
        w.write_u32::<LittleEndian>(self.width() as u32)?;
        w.write_f64::<LittleEndian>(self.lo)?;
        w.write_f64::<LittleEndian>(self.hi)?;
        io_util::write_f64s(w, self.a.iter().copied())?;
        io_util::write_f64s(w, self.b.iter().copied())?;
        Ok(())
    }

    pub(crate) fn read_from<R: Read>(r: &mut R) -> std::io::Result<Self> {
        let mode = match r.read_u8()? {
            0 => NormMode::MinMax,
            1 => NormMode::MeanVariance,
            m => {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("unknown normalization mode {m}"),
                ))
            }
        };
        let width = r.read_u32::<LittleEndian>()? as usize;
        let lo = r.read_f64::<LittleEndian>()?;
        let hi = r.read_f64::<LittleEndian>()?;
        let a = io_util::read_f64s(r, width)?;
        let b = io_util::read_f64s(r, width)?;
        Ok(Self { mode, a, b, lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use proptest::prelude::*;

    #[test]
    fn minmax_endpoints() {
        let x = arr2(&[[0.0], [1.0]]);
        let st = NormStats::fit(&x, NormMode::MinMax).unwrap();
        let y = st.apply(&x).unwrap();
        assert!((y[[0, 0]] - 0.01).abs() < 1e-15);
        assert!((y[[1, 0]] - 0.99).abs() < 1e-15);
    }

    #[test]
    fn mean_variance_uses_population_std() {
        let x = arr2(&[[1.0], [3.0]]);
        let st = NormStats::fit(&x, NormMode::MeanVariance).unwrap();
        assert_eq!(st.apply(&x).unwrap(), arr2(&[[-1.0], [1.0]]));
    }

    #[test]
    fn constant_columns() {
        let x = arr2(&[[4.0, 1.0], [4.0, 2.0]]);
        let mm = NormStats::fit(&x, NormMode::MinMax).unwrap();
        assert!(mm.is_constant(0));
        let y = mm.apply(&x).unwrap();
        assert_eq!(y.column(0).to_vec(), vec![0.5, 0.5]);
        assert_eq!(mm.invert(&y).unwrap().column(0).to_vec(), vec![4.0, 4.0]);
        let mv = NormStats::fit(&x, NormMode::MeanVariance).unwrap();
        let y = mv.apply(&x).unwrap();
        assert_eq!(y.column(0).to_vec(), vec![0.0, 0.0]);
        assert_eq!(mv.invert(&y).unwrap().column(0).to_vec(), vec![4.0, 4.0]);
    }

    #[test]
    fn width_mismatch() {
        let st = NormStats::fit(&arr2(&[[1.0, 2.0]]), NormMode::MinMax).unwrap();
        assert!(st.apply(&arr2(&[[1.0]])).is_err());
        assert!(st.invert(&arr2(&[[1.0, 2.0, 3.0]])).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let x = arr2(&[[1.0, -2.0], [3.5, 8.0], [0.25, 1.0]]);
        for mode in [NormMode::MinMax, NormMode::MeanVariance] {
            let st = NormStats::fit(&x, mode).unwrap();
            let mut buf = Vec::new();
            st.write_to(&mut buf).unwrap();
            let back = NormStats::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back, st);
        }
    }

    proptest! {
        #[test]
        fn invert_apply_is_identity(v in proptest::collection::vec(-1e3f64..1e3, 6..60)) {
            let t = v.len() / 3;
            let x = Array2::from_shape_vec((t, 3), v[..t * 3].to_vec()).unwrap();
            for mode in [NormMode::MinMax, NormMode::MeanVariance] {
                let st = NormStats::fit(&x, mode).unwrap();
                let back = st.invert(&st.apply(&x).unwrap()).unwrap();
                for (a, b) in back.iter().zip(x.iter()) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn normalized_moments(v in proptest::collection::vec(-1e3f64..1e3, 6..60)) {
            let t = v.len() / 3;
            let x = Array2::from_shape_vec((t, 3), v[..t * 3].to_vec()).unwrap();
            let mm = NormStats::fit(&x, NormMode::MinMax).unwrap();
            let y = mm.apply(&x).unwrap();
            for j in 0..3 {
                if mm.is_constant(j) { continue; }
                let c = y.column(j);
                let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!((lo - 0.01).abs() < 1e-12 && (hi - 0.99).abs() < 1e-12);
            }
            let mv = NormStats::fit(&x, NormMode::MeanVariance).unwrap();
            let y = mv.apply(&x).unwrap();
            for j in 0..3 {
                if mv.is_constant(j) { continue; }
                let c = y.column(j);
                let mean = c.mean().unwrap();
                let var = c.mapv(|v| (v - mean) * (v - mean)).mean().unwrap();
                prop_assert!(mean.abs() < 1e-9 && (var - 1.0).abs() < 1e-9);
            }
        }
    }
}
