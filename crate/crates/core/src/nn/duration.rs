use ndarray::Array2;

use super::config::MlpConfig;
use super::model::NetworkModel;
use super::train::{train_mlp, Sequence, TrainReport};
use crate::{Error, Result};

/// Per-phone regression targets: natural log of the duration in frames.
pub fn duration_targets(durations: &[usize]) -> Result<Array2<f64>> {
    if let Some(i) = durations.iter().position(|&d| d == 0) {
        return Err(Error::invalid(format!("phone {i} has zero duration")));
    }
    Ok(Array2::from_shape_fn((durations.len(), 1), |(i, _)| {
        (durations[i] as f64).ln()
    }))
}

fn to_sequences(data: &[(Array2<f64>, Vec<usize>)]) -> Result<Vec<Sequence>> {
    data.iter()
        .map(|(x, d)| Sequence::new(x.clone(), duration_targets(d)?))
        .collect()
}

/// Train the phone-duration regressor on phone-level linguistic vectors
/// paired with durations in frames.
pub fn train_duration_model(
    train: &[(Array2<f64>, Vec<usize>)],
    dev: &[(Array2<f64>, Vec<usize>)],
    config: &MlpConfig,
) -> Result<(NetworkModel, TrainReport)> {
    train_mlp(&to_sequences(train)?, &to_sequences(dev)?, config)
}

/// Predicted durations in frames, at least one per phone.
pub fn predict_durations(model: &NetworkModel, phones: &Array2<f64>) -> Result<Vec<usize>> {
    let y = model.predict_array(phones)?;
    Ok(y.column(0)
        .iter()
        .map(|&v| v.exp().round().clamp(1.0, 1e6) as usize)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn targets_are_log_frames() {
        let t = duration_targets(&[1, 10]).unwrap();
        assert_eq!(t[[0, 0]], 0.0);
        assert!((t[[1, 0]] - 10f64.ln()).abs() < 1e-15);
        assert!(duration_targets(&[3, 0]).is_err());
    }

    #[test]
    fn learns_a_duration_per_class() {
        // one-hot phone class -> fixed duration
        let durs = [4usize, 9, 20];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut mk = || {
            let classes: Vec<usize> = (0..12).map(|_| rng.random_range(0..3)).collect();
            let x = Array2::from_shape_fn((12, 3), |(i, j)| f64::from(classes[i] == j));
            (x, classes.iter().map(|&c| durs[c]).collect::<Vec<_>>())
        };
        let train: Vec<_> = (0..10).map(|_| mk()).collect();
        let dev: Vec<_> = (0..3).map(|_| mk()).collect();
        let cfg = MlpConfig {
            hidden_layers: 1,
            hidden_width: 8,
            batch_size: 16,
            base_lr: 0.05,
            max_epochs: 30,
            ..MlpConfig::default()
        };
        let (model, _) = train_duration_model(&train, &dev, &cfg).unwrap();
        let pred = predict_durations(&model, &dev[0].0).unwrap();
        assert_eq!(pred, dev[0].1);
    }
}
