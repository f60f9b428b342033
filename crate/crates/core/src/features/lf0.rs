/// Marker for unvoiced frames in a raw log-F0 track.
pub const UNVOICED: f64 = -1.0e10;

/// Fill unvoiced gaps of a log-F0 track by linear interpolation between
/// neighbouring voiced frames; leading/trailing gaps hold the nearest voiced
/// value. Returns the continuous track and VUV flags (1 = voiced).
///
/// A frame is unvoiced when it is non-finite or at/below `UNVOICED / 2`.
pub fn interpolate_lf0(lf0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let voiced: Vec<bool> = lf0
        .iter()
        .map(|&v| v.is_finite() && v > UNVOICED / 2.0)
        .collect();
    let vuv = voiced.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect();
    let anchors: Vec<usize> = (0..lf0.len()).filter(|&i| voiced[i]).collect();
    let Some((&first, &last)) = anchors.first().zip(anchors.last()) else {
        return (vec![0.0; lf0.len()], vuv);
    };

    let mut out = lf0.to_vec();
    out[..first].fill(lf0[first]);
    out[last + 1..].fill(lf0[last]);
    for pair in anchors.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let span = (b - a) as f64;
        for i in a + 1..b {
            let frac = (i - a) as f64 / span;
            out[i] = lf0[a] + (lf0[b] - lf0[a]) * frac;
        }
    }
    (out, vuv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voiced_track_is_unchanged() {
        let (c, v) = interpolate_lf0(&[4.0, 4.5, 5.0]);
        assert_eq!(c, vec![4.0, 4.5, 5.0]);
        assert_eq!(v, vec![1.0; 3]);
    }

    #[test]
    fn gap_is_filled_linearly() {
        let u = UNVOICED;
        let (c, v) = interpolate_lf0(&[4.0, u, u, u, 6.0]);
        assert_eq!(c, vec![4.0, 4.5, 5.0, 5.5, 6.0]);
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn edges_hold_nearest_voiced_value() {
        let u = UNVOICED;
        let (c, v) = interpolate_lf0(&[u, u, 5.0, u, f64::NAN]);
        assert_eq!(c, vec![5.0; 5]);
        assert_eq!(v, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn all_unvoiced() {
        let (c, v) = interpolate_lf0(&[UNVOICED; 4]);
        assert_eq!(c, vec![0.0; 4]);
        assert_eq!(v, vec![0.0; 4]);
    }
}
