//! Slice versus MLPG parameter generation on a noisy predicted trajectory.

use ndarray::{concatenate, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use ultratts::features::{append_deltas, FeatureMatrix, StreamLayout, DEFAULT_FRAME_SHIFT};
use ultratts::nn::{generate_static, ParamGeneration};

fn rmse(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    ((a - b).mapv(|v| v * v).mean().unwrap()).sqrt()
}

fn main() -> ultratts::Result<()> {
    let t = 200;
    let clean = Array2::from_shape_fn((t, 1), |(i, _)| (i as f64 * 0.05).sin());
    let full = append_deltas(&clean)?;

    // noise on statics only; the deltas carry the smooth shape
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 0.2).expect("valid");
    let noisy_statics = clean.mapv(|v| v + noise.sample(&mut rng));
    let pred = concatenate(Axis(1), &[noisy_statics.view(), full.slice(ndarray::s![.., 1..]).view()]).expect("rows");
    let layout = StreamLayout::plain("X", 1).with_deltas();
    let pred = FeatureMatrix::new(layout, DEFAULT_FRAME_SHIFT, pred)?;

    let sliced = generate_static(&pred, &[], ParamGeneration::Slice)?;
    println!("slice: rmse to the clean trajectory {:.4}", rmse(sliced.frames(), &clean));
    for (label, v) in [("equal variances", [1.0, 1.0, 1.0]), ("trusted deltas", [0.04, 1e-4, 1e-4])] {
        let smooth = generate_static(&pred, &v, ParamGeneration::Mlpg)?;
        println!("mlpg ({label}): rmse {:.4}", rmse(smooth.frames(), &clean));
    }
    Ok(())
}
