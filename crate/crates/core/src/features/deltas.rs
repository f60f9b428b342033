use ndarray::{concatenate, s, Array2, Axis};

use super::FeatureMatrix;
use crate::{Error, Result};

/// First-order regression window over (t-1, t, t+1).
pub const DELTA_WINDOW: [f64; 3] = [-0.5, 0.0, 0.5];
/// Second-order window over (t-1, t, t+1).
pub const DELTA2_WINDOW: [f64; 3] = [1.0, -2.0, 1.0];

/// Apply a 3-tap window along time with first/last-frame replication.
pub(crate) fn apply_window(stream: &Array2<f64>, window: &[f64; 3]) -> Array2<f64> {
    let t = stream.nrows();
    let mut out = Array2::zeros(stream.dim());
    for i in 0..t {
        let prev = stream.row(i.saturating_sub(1));
        let cur = stream.row(i);
        let next = stream.row((i + 1).min(t - 1));
        let mut row = out.row_mut(i);
        for j in 0..stream.ncols() {
            row[j] = window[0] * prev[j] + window[1] * cur[j] + window[2] * next[j];
        }
    }
    out
}

/// `T x D` -> `T x 3D` ordered `[static | delta | delta-delta]`.
pub fn append_deltas(stream: &Array2<f64>) -> Result<Array2<f64>> {
    let (t, d) = stream.dim();
    if t == 0 {
        return Err(Error::invalid("cannot compute deltas of an empty stream"));
    }
    let mut out = Array2::zeros((t, 3 * d));
    out.slice_mut(s![.., ..d]).assign(stream);
    out.slice_mut(s![.., d..2 * d])
        .assign(&apply_window(stream, &DELTA_WINDOW));
    out.slice_mut(s![.., 2 * d..])
        .assign(&apply_window(stream, &DELTA2_WINDOW));
    Ok(out)
}

/// Append delta blocks to every static segment that takes them (all but
/// VUV and LING), turning a statics-only matrix into its training layout.
pub fn add_dynamic_features(stream: &FeatureMatrix) -> Result<FeatureMatrix> {
    let layout = stream.layout();
    if layout.has_deltas() {
        return Err(Error::invalid("stream already carries delta blocks"));
    }
    let target = layout.with_deltas();
    let mut blocks = Vec::with_capacity(target.segments().len());
    for seg in target.segments() {
        let r = layout.range(&seg.name).expect("same segments");
        let block = stream.frames().slice(s![.., r]).to_owned();
        blocks.push(if seg.deltas { append_deltas(&block)? } else { block });
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let frames = concatenate(Axis(1), &views).expect("row counts agree");
    FeatureMatrix::new(target, stream.frame_shift(), frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_stream_has_zero_dynamics() {
        let x = Array2::from_elem((6, 2), 3.5);
        let d = append_deltas(&x).unwrap();
        assert!(d.slice(s![.., 2..]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_matches_hand_convolution() {
        let x = Array2::from_shape_fn((5, 1), |(t, _)| t as f64);
        let d = append_deltas(&x).unwrap();
        let delta: Vec<f64> = d.column(1).to_vec();
        let delta2: Vec<f64> = d.column(2).to_vec();
        assert_eq!(delta, vec![0.5, 1.0, 1.0, 1.0, 0.5]);
        assert_eq!(delta2, vec![1.0, 0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn single_frame() {
        let x = Array2::from_elem((1, 3), 7.0);
        let d = append_deltas(&x).unwrap();
        assert_eq!(d.row(0).to_vec(), vec![7.0, 7.0, 7.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_is_error() {
        assert!(append_deltas(&Array2::zeros((0, 3))).is_err());
    }

    proptest! {
        #[test]
        fn linear_in_the_input(
            xs in proptest::collection::vec(-10.0f64..10.0, 12),
            ys in proptest::collection::vec(-10.0f64..10.0, 12),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
        ) {
            let x = Array2::from_shape_vec((6, 2), xs).unwrap();
            let y = Array2::from_shape_vec((6, 2), ys).unwrap();
            let lhs = append_deltas(&(&x * a + &y * b)).unwrap();
            let rhs = append_deltas(&x).unwrap() * a + append_deltas(&y).unwrap() * b;
            for (l, r) in lhs.iter().zip(rhs.iter()) {
                prop_assert!((l - r).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dynamic_features_follow_the_layout() {
        use crate::features::StreamLayout;
        let layout = StreamLayout::acoustic_with(2, 1).statics();
        let x = Array2::from_shape_fn((4, 5), |(t, j)| (t * t + j) as f64);
        let m = FeatureMatrix::new(layout, 0.005, x.clone()).unwrap();
        let d = add_dynamic_features(&m).unwrap();
        assert_eq!(d.width(), 3 * 2 + 3 + 3 + 1);
        assert_eq!(d.statics("MGC").unwrap(), x.slice(s![.., 0..2]).to_owned());
        let vuv = d.layout().range("VUV").unwrap();
        assert_eq!(d.frames().column(vuv.start), x.column(4));
        assert!(add_dynamic_features(&d).is_err());
    }
}
