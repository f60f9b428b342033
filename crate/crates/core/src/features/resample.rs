use ndarray::Array2;

use crate::{Error, Result};

/// Linear interpolation along time from `from_rate` to `to_rate` Hz.
///
/// Output length is `floor((T - 1) * to_rate / from_rate) + 1`; output frame
/// `k` reads source time `k * from_rate / to_rate`.
pub fn resample_stream(stream: &Array2<f64>, from_rate: f64, to_rate: f64) -> Result<Array2<f64>> {
    if !(from_rate > 0.0 && to_rate > 0.0) {
        return Err(Error::invalid("sampling rates must be positive"));
    }
    let (t, d) = stream.dim();
    if t < 2 {
        return Err(Error::invalid(format!(
            "resampling needs at least 2 frames, got {t}"
        )));
    }
    if from_rate == to_rate {
        return Ok(stream.clone());
    }
    let ratio = to_rate / from_rate;
    // tolerate rounding just below an integer boundary
    let out_len = (((t - 1) as f64 * ratio) + 1e-9).floor() as usize + 1;
    let step = from_rate / to_rate;
    let last = (t - 1) as f64;
    let mut out = Array2::zeros((out_len, d));
    for k in 0..out_len {
        let pos = (k as f64 * step).clamp(0.0, last);
        let i0 = (pos.floor() as usize).min(t - 2);
        let frac = pos - i0 as f64;
        let (a, b) = (stream.row(i0), stream.row(i0 + 1));
        let mut row = out.row_mut(k);
        for j in 0..d {
            row[j] = a[j] + (b[j] - a[j]) * frac;
        }
    }
    Ok(out)
}
