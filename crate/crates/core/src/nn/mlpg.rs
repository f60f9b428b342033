use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use crate::features::{FeatureMatrix, DELTA2_WINDOW, DELTA_WINDOW};
use crate::{Error, Result};

/// How static trajectories are recovered from predicted
/// `[static | delta | delta-delta]` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamGeneration {
    /// Keep the static block as predicted.
    Slice,
    /// Maximum-likelihood parameter generation using the dynamic blocks.
    #[default]
    Mlpg,
}

impl FromStr for ParamGeneration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slice" => Ok(Self::Slice),
            "mlpg" => Ok(Self::Mlpg),
            other => Err(Error::Config(format!(
                "unknown parameter generation '{other}' (expected slice or mlpg)"
            ))),
        }
    }
}

impl fmt::Display for ParamGeneration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Slice => "slice",
            Self::Mlpg => "mlpg",
        })
    }
}

/// Taps of a window row at time `t` after edge replication, as
/// `(column, weight)` pairs with repeated columns merged.
fn window_row(window: &[f64; 3], t: usize, len: usize) -> Vec<(usize, f64)> {
    let cols = [t.saturating_sub(1), t, (t + 1).min(len - 1)];
    let mut taps: Vec<(usize, f64)> = Vec::with_capacity(3);
    for (c, w) in cols.into_iter().zip(window.iter().copied()) {
        match taps.iter_mut().find(|(k, _)| *k == c) {
            Some(tap) => tap.1 += w,
            None => taps.push((c, w)),
        }
    }
    taps
}

/// Solve for one static trajectory given per-frame means and variances of
/// the static, delta and delta-delta values. A non-finite variance gives
/// that observation zero weight.
pub fn mlpg_column(means: [&[f64]; 3], variances: [&[f64]; 3]) -> Result<Vec<f64>> {
    let len = means[0].len();
    if means.iter().chain(variances.iter()).any(|v| v.len() != len) {
        return Err(Error::invalid("mlpg inputs must share one length"));
    }
    if len == 0 {
        return Ok(Vec::new());
    }
    // band[t][k] holds A(t, t + k) for k = 0..=2
    let mut band = vec![[0.0f64; 3]; len];
    let mut rhs = vec![0.0f64; len];
    let windows = [[0.0, 1.0, 0.0], DELTA_WINDOW, DELTA2_WINDOW];
    for (w, window) in windows.iter().enumerate() {
        for t in 0..len {
            let var = variances[w][t];
            let precision = if var.is_finite() && var > 0.0 { 1.0 / var } else { 0.0 };
            if precision == 0.0 {
                continue;
            }
            let taps = window_row(window, t, len);
            for &(i, wi) in &taps {
                rhs[i] += precision * wi * means[w][t];
                for &(j, wj) in &taps {
                    if j >= i {
                        band[i][j - i] += precision * wi * wj;
                    }
                }
            }
        }
    }
    // banded Cholesky, A = L L^T with L stored in the same band layout
    // (lower[t][k] = L(t, t - k))
    let mut lower = vec![[0.0f64; 3]; len];
    for t in 0..len {
        for k in (1..=2).rev() {
            if t < k {
                continue;
            }
            let j = t - k;
            let mut v = band[j][k];
            for m in 1..=2 {
                if k + m <= 2 && j >= m {
                    v -= lower[t][k + m] * lower[j][m];
                }
            }
            lower[t][k] = v / lower[j][0];
        }
        let mut d = band[t][0];
        for k in 1..=2 {
            if t >= k {
                d -= lower[t][k] * lower[t][k];
            }
        }
        if !(d > 1e-300) {
            return Err(Error::Numerical("mlpg system is not positive definite".into()));
        }
        lower[t][0] = d.sqrt();
    }
    let mut y = vec![0.0; len];
    for t in 0..len {
        let mut v = rhs[t];
        for k in 1..=2 {
            if t >= k {
                v -= lower[t][k] * y[t - k];
            }
        }
        y[t] = v / lower[t][0];
    }
    let mut c = vec![0.0; len];
    for t in (0..len).rev() {
        let mut v = y[t];
        for k in 1..=2 {
            if t + k < len {
                v -= lower[t + k][k] * c[t + k];
            }
        }
        c[t] = v / lower[t][0];
    }
    Ok(c)
}

/// Recover the static layout of `pred`. `variances` holds one variance per
/// column of `pred` (typically the training target variances); it is only
/// read in [`ParamGeneration::Mlpg`] mode.
pub fn generate_static(
    pred: &FeatureMatrix,
    variances: &[f64],
    mode: ParamGeneration,
) -> Result<FeatureMatrix> {
    let layout = pred.layout();
    let statics = layout.statics();
    let t = pred.n_frames();
    if mode == ParamGeneration::Mlpg && variances.len() != pred.width() {
        return Err(Error::invalid(format!(
            "expected {} variances, got {}",
            pred.width(),
            variances.len()
        )));
    }
    let frames = pred.frames();
    let mut out = Array2::zeros((t, statics.total()));
    let mut offset = 0;
    for seg in layout.segments() {
        let src = layout.static_range(&seg.name).expect("segment exists");
        let dst = offset..offset + seg.width;
        if mode == ParamGeneration::Slice || !seg.deltas || t == 0 {
            out.slice_mut(s![.., dst.clone()])
                .assign(&frames.slice(s![.., src.clone()]));
        } else {
            for d in 0..seg.width {
                let sc = src.start + d;
                if !(variances[sc] > 0.0) {
                    // a constant static column is already exact
                    out.column_mut(dst.start + d).assign(&frames.column(sc));
                    continue;
                }
                let cols = [src.start + d, src.start + seg.width + d, src.start + 2 * seg.width + d];
                let m: Vec<Vec<f64>> = cols.iter().map(|&c| frames.column(c).to_vec()).collect();
                let v: Vec<Vec<f64>> = cols.iter().map(|&c| vec![variances[c]; t]).collect();
                let c = mlpg_column(
                    [&m[0], &m[1], &m[2]],
                    [&v[0], &v[1], &v[2]],
                )?;
                for (i, val) in c.into_iter().enumerate() {
                    out[[i, dst.start + d]] = val;
                }
            }
        }
        offset = dst.end;
    }
    FeatureMatrix::new(statics, pred.frame_shift(), out)
}
