//! Build frame-synchronous acoustic and articulatory streams: resample the
//! ultrasound coefficients from the video rate to 200 Hz, interpolate LF0,
//! append deltas, normalize and store as FMTX.

use ndarray::{concatenate, Array2, Axis};
use ultratts::features::{
    add_dynamic_features, compose_target, fit_length, interpolate_lf0, resample_stream, FeatureMatrix, NormMode,
    NormStats, StreamLayout, DEFAULT_FRAME_SHIFT, UNVOICED,
};

fn main() -> ultratts::Result<()> {
    let rate = 1.0 / DEFAULT_FRAME_SHIFT;
    let t = 120;

    // acoustic statics: 4 MGC, 1 BAP, LF0 with an unvoiced gap, VUV
    let raw_lf0: Vec<f64> = (0..t)
        .map(|i| if (40..70).contains(&i) { UNVOICED } else { 5.0 + 0.1 * (i as f64 / 10.0).sin() })
        .collect();
    let (lf0, vuv) = interpolate_lf0(&raw_lf0);
    let mgc = Array2::from_shape_fn((t, 4), |(i, d)| (i as f64 * 0.05 * (d + 1) as f64).cos() / (d + 1) as f64);
    let bap = Array2::from_elem((t, 1), -2.0);
    let lf0 = Array2::from_shape_vec((t, 1), lf0).expect("t rows");
    let vuv = Array2::from_shape_vec((t, 1), vuv).expect("t rows");
    let statics = concatenate(Axis(1), &[mgc.view(), bap.view(), lf0.view(), vuv.view()]).expect("same rows");
    let acoustic = FeatureMatrix::new(StreamLayout::acoustic_with(4, 1).statics(), DEFAULT_FRAME_SHIFT, statics)?;
    let acoustic = add_dynamic_features(&acoustic)?;

    // 3 ULT-PCA coefficients at 81.5 fps
    let fps = 81.5;
    let n_video = (t as f64 / rate * fps).ceil() as usize;
    let coeffs = Array2::from_shape_fn((n_video, 3), |(i, k)| ((i + 3 * k) as f64 * 0.2).sin());
    let up = resample_stream(&coeffs, fps, rate)?;
    let up = fit_length(&up, t, 4)?;
    let articulatory = add_dynamic_features(&FeatureMatrix::new(StreamLayout::plain("ULTPCA", 3), DEFAULT_FRAME_SHIFT, up)?)?;

    let target = compose_target(&acoustic, &articulatory)?;
    println!("{} video frames -> {} frames at {rate} Hz", n_video, target.n_frames());
    for seg in target.layout().segments() {
        println!("  {:<7} {:>2} columns{}", seg.name, seg.total(), if seg.deltas { " (with deltas)" } else { "" });
    }

    let norm = NormStats::fit(target.frames(), NormMode::MeanVariance)?;
    let z = norm.apply(target.frames())?;
    println!("normalized column 0: mean {:.2e}, var {:.3}", z.column(0).mean().unwrap(), z.column(0).var(0.0));

    let path = std::env::temp_dir().join("example.cmp.fmtx");
    target.save(&path)?;
    let back = FeatureMatrix::load(&path)?;
    println!("FMTX round trip at f32: {} x {} -> {}", back.n_frames(), back.width(), path.display());
    Ok(())
}
