use ndarray::Array2;

use crate::{Error, Result};

pub const DEFAULT_SCANLINES: usize = 64;
pub const DEFAULT_SAMPLES: usize = 842;

/// One raw ultrasound image: `scanlines` rows of `samples_per_line` 8-bit
/// echo intensities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrasoundFrame {
    scanlines: usize,
    samples_per_line: usize,
    intensities: Vec<u8>,
}

impl UltrasoundFrame {
    pub fn new(scanlines: usize, samples_per_line: usize, intensities: Vec<u8>) -> Result<Self> {
        if intensities.len() != scanlines * samples_per_line {
            return Err(Error::invalid(format!(
                "frame buffer has {} bytes, expected {} x {}",
                intensities.len(),
                scanlines,
                samples_per_line
            )));
        }
        Ok(Self {
            scanlines,
            samples_per_line,
            intensities,
        })
    }

    pub fn zeros(scanlines: usize, samples_per_line: usize) -> Self {
        Self {
            scanlines,
            samples_per_line,
            intensities: vec![0; scanlines * samples_per_line],
        }
    }

    pub fn scanlines(&self) -> usize {
        self.scanlines
    }

    pub fn samples_per_line(&self) -> usize {
        self.samples_per_line
    }

    pub fn intensities(&self) -> &[u8] {
        &self.intensities
    }

    pub fn get(&self, line: usize, sample: usize) -> u8 {
        self.intensities[line * self.samples_per_line + sample]
    }

    /// Intensities as a real grid (scanlines x samples).
    pub fn to_grid(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.scanlines, self.samples_per_line), |(r, c)| {
            f64::from(self.get(r, c))
        })
    }

    /// Quantize a real grid, rounding and clipping to [0, 255].
    pub fn from_grid(grid: &Array2<f64>) -> Self {
        let (h, w) = grid.dim();
        let intensities = grid.iter().map(|&v| quantize(v)).collect();
        Self {
            scanlines: h,
            samples_per_line: w,
            intensities,
        }
    }
}

pub(crate) fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        0
    } else {
        v.round().clamp(0.0, 255.0) as u8
    }
}

/// A resized frame holding real intensities, row-major `height x width`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFrame {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl ReducedFrame {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::invalid(format!(
                "reduced frame has {} values, expected {} x {}",
                values.len(),
                height,
                width
            )));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn from_grid(grid: &Array2<f64>) -> Self {
        let (height, width) = grid.dim();
        Self {
            height,
            width,
            values: grid.iter().copied().collect(),
        }
    }

    pub fn to_grid(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.height, self.width), self.values.clone())
            .expect("shape checked at construction")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_buffer_length() {
        assert!(UltrasoundFrame::new(2, 3, vec![0; 5]).is_err());
        assert!(ReducedFrame::new(2, 3, vec![0.0; 7]).is_err());
    }

    #[test]
    fn quantization_rounds_and_clips() {
        let grid = ndarray::arr2(&[[-3.0, 0.49, 0.5], [254.6, 300.0, f64::NAN]]);
        let f = UltrasoundFrame::from_grid(&grid);
        assert_eq!(f.intensities(), &[0, 0, 1, 255, 255, 0]);
    }
}
