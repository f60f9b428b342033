use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::network::{LayerSpec, Network};
use crate::Result;

const STEP: f64 = 1e-5;

/// Largest relative error between analytic and central-difference
/// gradients over every parameter of `net`, for the loss on `(x, y)`.
/// Relative error is `|a - n| / max(|a|, |n|, 1e-5)`.
pub fn gradient_check_with(net: &Network, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
    let (_, analytic) = net.loss_and_gradients(x, y);
    let frames = x.nrows().max(1) as f64;
    let loss = |n: &Network| n.sum_squared_error(x, y) / frames;
    let mut probe = net.clone();
    let mut worst = 0.0f64;
    let n_params = analytic.len();
    for p in 0..n_params {
        let shape = analytic[p].dim();
        for i in 0..shape.0 {
            for j in 0..shape.1 {
                let orig = probe.params()[p][[i, j]];
                probe.params_mut()[p][[i, j]] = orig + STEP;
                let up = loss(&probe);
                probe.params_mut()[p][[i, j]] = orig - STEP;
                let down = loss(&probe);
                probe.params_mut()[p][[i, j]] = orig;
                let numeric = (up - down) / (2.0 * STEP);
                let a = analytic[p][[i, j]];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-5);
                worst = worst.max(rel);
            }
        }
    }
    worst
}

/// Build a network from `specs` with seeded weights and run
/// [`gradient_check_with`] on a random `frames`-long sequence.
pub fn gradient_check(specs: &[LayerSpec], frames: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = Network::init(specs, &mut rng)?;
    let x = Array2::from_shape_simple_fn((frames, net.input_width()), || rng.random_range(-1.0..1.0));
    let y = Array2::from_shape_simple_fn((frames, net.output_width()), || rng.random_range(-1.0..1.0));
    Ok(gradient_check_with(&net, &x, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::LayerKind;

    #[test]
    fn dense_stack() {
        let specs = [
            LayerSpec::new(LayerKind::Tanh, 4, 5),
            LayerSpec::new(LayerKind::Tanh, 5, 3),
            LayerSpec::new(LayerKind::Linear, 3, 2),
        ];
        assert!(gradient_check(&specs, 6, 1).unwrap() < 1e-4);
    }

    #[test]
    fn recurrent_stack() {
        let specs = [
            LayerSpec::new(LayerKind::Tanh, 3, 4),
            LayerSpec::new(LayerKind::Lstm, 4, 3),
            LayerSpec::new(LayerKind::Linear, 3, 2),
        ];
        assert!(gradient_check(&specs, 7, 2).unwrap() < 1e-4);
    }

    #[test]
    fn linear_layer_is_exact() {
        let specs = [LayerSpec::new(LayerKind::Linear, 2, 1)];
        assert!(gradient_check(&specs, 3, 0).unwrap() < 1e-7);
    }
}
