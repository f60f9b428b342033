//! Small sequence tasks for exercising the trainers.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nn::Sequence;

fn uniform(rng: &mut ChaCha8Rng, frames: usize, width: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((frames, width), || rng.random_range(-1.0..1.0))
}

/// `y_t = x_(t-1)` with `y_0 = 0`: solvable only with memory.
pub fn memory_task(n_sequences: usize, frames: usize, width: usize, seed: u64) -> Vec<Sequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sequences)
        .map(|_| {
            let x = uniform(&mut rng, frames, width);
            let mut y = Array2::zeros((frames, width));
            for t in 1..frames {
                y.row_mut(t).assign(&x.row(t - 1));
            }
            Sequence::new(x, y).expect("same length")
        })
        .collect()
}

/// Targets independent of inputs: nothing beyond the mean is learnable.
pub fn plateau_task(n_sequences: usize, frames: usize, width: usize, seed: u64) -> Vec<Sequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sequences)
        .map(|_| {
            let x = uniform(&mut rng, frames, width);
            let y = uniform(&mut rng, frames, 1);
            Sequence::new(x, y).expect("same length")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_targets_lag_inputs() {
        let s = &memory_task(1, 5, 2, 0)[0];
        assert_eq!(s.targets.row(0).to_vec(), vec![0.0, 0.0]);
        assert_eq!(s.targets.row(3), s.inputs.row(2));
        assert_eq!(memory_task(2, 5, 2, 0), memory_task(2, 5, 2, 0));
    }
}
