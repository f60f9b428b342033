use ndarray::Array2;

use crate::{Error, Result};

const A: f64 = -0.5;

/// Catmull-Rom cubic convolution kernel (a = -0.5).
pub fn catmull_rom(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Per-output-sample taps: four clamped source indices and their weights.
struct Taps {
    index: Vec<[usize; 4]>,
    weight: Vec<[f64; 4]>,
}

fn taps(src_len: usize, dst_len: usize) -> Taps {
    let scale = src_len as f64 / dst_len as f64;
    let last = (src_len - 1) as isize;
    let mut index = Vec::with_capacity(dst_len);
    let mut weight = Vec::with_capacity(dst_len);
    for i in 0..dst_len {
        // pixel-center alignment
        let pos = (i as f64 + 0.5) * scale - 0.5;
        let base = pos.floor();
        let t = pos - base;
        let base = base as isize;
        let mut idx = [0usize; 4];
        let mut w = [0.0; 4];
        for k in 0..4 {
            let offset = k as isize - 1;
            idx[k] = (base + offset).clamp(0, last) as usize;
            w[k] = catmull_rom(t - offset as f64);
        }
        index.push(idx);
        weight.push(w);
    }
    Taps { index, weight }
}

/// Separable bicubic resize with edge clamping. Output values are clipped to
/// the input's value range.
pub fn resize_bicubic(grid: &Array2<f64>, target_h: usize, target_w: usize) -> Result<Array2<f64>> {
    let (h, w) = grid.dim();
    if h < 2 || w < 2 || target_h < 2 || target_w < 2 {
        return Err(Error::invalid(format!(
            "bicubic resize needs every dimension >= 2 (got {h}x{w} -> {target_h}x{target_w})"
        )));
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let cols = taps(w, target_w);
    let mut horizontal = Array2::<f64>::zeros((h, target_w));
    for r in 0..h {
        let row = grid.row(r);
        for c in 0..target_w {
            let (idx, wt) = (&cols.index[c], &cols.weight[c]);
            horizontal[[r, c]] = (0..4).map(|k| wt[k] * row[idx[k]]).sum();
        }
    }

    let rows = taps(h, target_h);
    let mut out = Array2::<f64>::zeros((target_h, target_w));
    for r in 0..target_h {
        let (idx, wt) = (&rows.index[r], &rows.weight[r]);
        for c in 0..target_w {
            let v: f64 = (0..4).map(|k| wt[k] * horizontal[[idx[k], c]]).sum();
            out[[r, c]] = v.clamp(lo, hi);
        }
    }
    Ok(out)
}
