use ndarray::{concatenate, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{LstmConfig, MlpConfig, Schedule};
use super::model::NetworkModel;
use super::network::{LayerKind, LayerSpec, Network};
use super::optim::{Adam, Optimizer, Sgd};
use crate::features::{NormMode, NormStats, StreamLayout};
use crate::{Error, Result};

/// One utterance of paired input and target frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub inputs: Array2<f64>,
    pub targets: Array2<f64>,
}

impl Sequence {
    pub fn new(inputs: Array2<f64>, targets: Array2<f64>) -> Result<Self> {
        if inputs.nrows() != targets.nrows() {
            return Err(Error::Alignment {
                what: "targets".into(),
                left: targets.nrows(),
                right: inputs.nrows(),
            });
        }
        Ok(Self { inputs, targets })
    }

    pub fn frames(&self) -> usize {
        self.inputs.nrows()
    }
}

/// Per-epoch losses are on normalized targets: squared error summed over
/// output dimensions and averaged over frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_dev_loss: f64,
    pub initial_dev_loss: f64,
    pub train_losses: Vec<f64>,
    pub dev_losses: Vec<f64>,
    pub learning_rates: Vec<f64>,
    pub final_lr: f64,
}

fn check_data(train: &[Sequence], dev: &[Sequence]) -> Result<(usize, usize)> {
    if train.is_empty() || train.iter().all(|s| s.frames() == 0) {
        return Err(Error::invalid("training set is empty"));
    }
    if dev.is_empty() || dev.iter().all(|s| s.frames() == 0) {
        return Err(Error::invalid("dev set is empty"));
    }
    let (wi, wo) = (train[0].inputs.ncols(), train[0].targets.ncols());
    for s in train.iter().chain(dev) {
        if s.inputs.ncols() != wi || s.targets.ncols() != wo {
            return Err(Error::invalid(format!(
                "inconsistent widths: expected {wi} -> {wo}, found {} -> {}",
                s.inputs.ncols(),
                s.targets.ncols()
            )));
        }
        if s.inputs.nrows() != s.targets.nrows() {
            return Err(Error::Alignment {
                what: "targets".into(),
                left: s.targets.nrows(),
                right: s.inputs.nrows(),
            });
        }
    }
    Ok((wi, wo))
}

fn stack(seqs: &[Sequence], inputs: bool) -> Array2<f64> {
    let views: Vec<_> = seqs
        .iter()
        .map(|s| if inputs { s.inputs.view() } else { s.targets.view() })
        .collect();
    concatenate(Axis(0), &views).expect("widths checked")
}

fn normalize(seqs: &[Sequence], input: &NormStats, output: &NormStats) -> Result<Vec<Sequence>> {
    seqs.iter()
        .map(|s| {
            Ok(Sequence {
                inputs: input.apply(&s.inputs)?,
                targets: output.apply(&s.targets)?,
            })
        })
        .collect()
}

/// Dev loss over whole sequences, summed in a fixed order.
fn sequence_loss(net: &Network, seqs: &[Sequence]) -> f64 {
    let frames: usize = seqs.iter().map(Sequence::frames).sum();
    let total: f64 = seqs
        .iter()
        .filter(|s| s.frames() > 0)
        .map(|s| net.sum_squared_error(&s.inputs, &s.targets))
        .sum();
    total / frames as f64
}

/// Runs the epoch loop. `epoch` trains one pass at the given learning rate
/// and returns the train loss; `dev_loss` scores a network.
fn run_schedule(
    mut net: Network,
    schedule: &Schedule,
    mut epoch: impl FnMut(&mut Network, f64) -> f64,
    dev_loss: impl Fn(&Network) -> f64,
) -> Result<(Network, TrainReport)> {
    let initial = dev_loss(&net);
    if !initial.is_finite() {
        return Err(Error::Diverged { epoch: 0 });
    }
    let mut best = net.clone();
    let mut report = TrainReport {
        epochs_run: 0,
        best_epoch: 0,
        best_dev_loss: initial,
        initial_dev_loss: initial,
        train_losses: Vec::new(),
        dev_losses: Vec::new(),
        learning_rates: Vec::new(),
        final_lr: schedule.base_lr,
    };
    let mut lr = schedule.base_lr;
    for e in 1..=schedule.max_epochs {
        let train_loss = epoch(&mut net, lr);
        let dev = dev_loss(&net);
        if !train_loss.is_finite() || !dev.is_finite() {
            return Err(Error::Diverged { epoch: e });
        }
        report.epochs_run = e;
        report.train_losses.push(train_loss);
        report.dev_losses.push(dev);
        report.learning_rates.push(lr);
        log::debug!("epoch {e}: lr {lr:.6} train {train_loss:.6} dev {dev:.6}");

        let improved = dev < report.best_dev_loss;
        if improved {
            report.best_dev_loss = dev;
            report.best_epoch = e;
            best = net.clone();
        } else if e >= schedule.warmup_epochs {
            lr *= schedule.decay_factor;
        }
        if e >= schedule.warmup_epochs && e - report.best_epoch >= schedule.patience {
            break;
        }
    }
    report.final_lr = lr;
    Ok((best, report))
}

fn fit_norms(train: &[Sequence]) -> Result<(NormStats, NormStats)> {
    Ok((
        NormStats::fit(&stack(train, true), NormMode::MinMax)?,
        NormStats::fit(&stack(train, false), NormMode::MeanVariance)?,
    ))
}

/// Train the feed-forward recipe. Frames of all training utterances are
/// pooled and shuffled into mini-batches each epoch.
pub fn train_mlp(
    train: &[Sequence],
    dev: &[Sequence],
    config: &MlpConfig,
) -> Result<(NetworkModel, TrainReport)> {
    config.validate()?;
    let (wi, wo) = check_data(train, dev)?;
    let (input_norm, output_norm) = fit_norms(train)?;
    let train_n = normalize(train, &input_norm, &output_norm)?;
    let dev_n = normalize(dev, &input_norm, &output_norm)?;
    let x = stack(&train_n, true);
    let y = stack(&train_n, false);
    drop(train_n);

    let mut specs = Vec::with_capacity(config.hidden_layers + 1);
    let mut width = wi;
    for _ in 0..config.hidden_layers {
        specs.push(LayerSpec::new(LayerKind::Tanh, width, config.hidden_width));
        width = config.hidden_width;
    }
    specs.push(LayerSpec::new(LayerKind::Linear, width, wo));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let net = Network::init(&specs, &mut rng)?;
    let mut optimizer = Sgd::new(config.momentum);
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let batch = config.batch_size;

    let epoch = |net: &mut Network, lr: f64| {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(batch) {
            let bx = x.select(Axis(0), chunk);
            let by = y.select(Axis(0), chunk);
            let (loss, grads) = net.loss_and_gradients(&bx, &by);
            total += loss * chunk.len() as f64;
            optimizer.step(net.params_mut(), &grads, lr);
        }
        total / order.len() as f64
    };
    let (best, report) = run_schedule(net, &config.schedule(), epoch, |n| sequence_loss(n, &dev_n))?;
    let model = NetworkModel::new(
        best,
        input_norm,
        output_norm,
        StreamLayout::plain("OUT", wo),
        report.clone(),
    )?;
    Ok((model, report))
}

/// Train the recurrent recipe with backpropagation through time over whole
/// utterances, one utterance per update, in a seeded order each epoch.
pub fn train_lstm(
    train: &[Sequence],
    dev: &[Sequence],
    config: &LstmConfig,
) -> Result<(NetworkModel, TrainReport)> {
    config.validate()?;
    let (wi, wo) = check_data(train, dev)?;
    let (input_norm, output_norm) = fit_norms(train)?;
    let train_n: Vec<Sequence> = normalize(train, &input_norm, &output_norm)?
        .into_iter()
        .filter(|s| s.frames() > 0)
        .collect();
    let dev_n = normalize(dev, &input_norm, &output_norm)?;

    let mut specs = Vec::with_capacity(config.ff_layers + 2);
    let mut width = wi;
    for _ in 0..config.ff_layers {
        specs.push(LayerSpec::new(LayerKind::Tanh, width, config.ff_width));
        width = config.ff_width;
    }
    specs.push(LayerSpec::new(LayerKind::Lstm, width, config.lstm_width));
    specs.push(LayerSpec::new(LayerKind::Linear, config.lstm_width, wo));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let net = Network::init(&specs, &mut rng)?;
    let mut optimizer = Adam::new(config.beta1, config.beta2, config.epsilon);
    let mut order: Vec<usize> = (0..train_n.len()).collect();
    let total_frames: usize = train_n.iter().map(Sequence::frames).sum();

    let epoch = |net: &mut Network, lr: f64| {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let s = &train_n[i];
            let (loss, grads) = net.loss_and_gradients(&s.inputs, &s.targets);
            total += loss * s.frames() as f64;
            optimizer.step(net.params_mut(), &grads, lr);
        }
        total / total_frames as f64
    };
    let (best, report) = run_schedule(net, &config.schedule(), epoch, |n| sequence_loss(n, &dev_n))?;
    let model = NetworkModel::new(
        best,
        input_norm,
        output_norm,
        StreamLayout::plain("OUT", wo),
        report.clone(),
    )?;
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn identity_data(n: usize, seed: u64) -> Vec<Sequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x = Array2::from_shape_simple_fn((20, 1), || rng.random_range(-1.0..1.0));
                Sequence::new(x.clone(), x).unwrap()
            })
            .collect()
    }

    fn tiny_mlp() -> MlpConfig {
        MlpConfig {
            hidden_layers: 1,
            hidden_width: 8,
            batch_size: 16,
            base_lr: 0.05,
            max_epochs: 25,
            warmup_epochs: 10,
            ..MlpConfig::default()
        }
    }

    #[test]
    fn learns_identity() {
        let (train, dev) = (identity_data(40, 1), identity_data(5, 2));
        let cfg = MlpConfig {
            hidden_width: 16,
            max_epochs: 120,
            warmup_epochs: 60,
            ..tiny_mlp()
        };
        let (model, report) = train_mlp(&train, &dev, &cfg).unwrap();
        assert!(report.best_dev_loss < 1e-3, "dev loss {}", report.best_dev_loss);
        let pred = model.predict_array(&dev[0].inputs).unwrap();
        let err = (&pred - &dev[0].targets).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        assert!(err < 1e-2, "max abs error {err}");
    }

    #[test]
    fn seeded_runs_are_bit_identical() {
        let (train, dev) = (identity_data(6, 3), identity_data(2, 4));
        let cfg = MlpConfig { max_epochs: 12, ..tiny_mlp() };
        let (m1, r1) = train_mlp(&train, &dev, &cfg).unwrap();
        let (m2, r2) = train_mlp(&train, &dev, &cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(m1.network(), m2.network());
    }

    #[test]
    fn schedule_invariants() {
        let (train, dev) = (identity_data(6, 5), identity_data(2, 6));
        let cfg = MlpConfig { max_epochs: 20, warmup_epochs: 4, patience: 3, ..tiny_mlp() };
        let (model, r) = train_mlp(&train, &dev, &cfg).unwrap();
        assert!(r.epochs_run <= cfg.max_epochs);
        assert!(r.epochs_run <= (r.best_epoch + cfg.patience).max(cfg.warmup_epochs));
        assert!(r.epochs_run >= cfg.warmup_epochs);
        assert!(r.learning_rates[..cfg.warmup_epochs].iter().all(|&lr| lr == cfg.base_lr));
        assert!(r.learning_rates.windows(2).all(|w| w[1] <= w[0]));
        let best = r.dev_losses.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(best.min(r.initial_dev_loss), r.best_dev_loss);
        // the returned snapshot scores exactly the best dev loss
        let dev_n = normalize(&dev, model.input_norm(), model.output_norm()).unwrap();
        assert_eq!(sequence_loss(model.network(), &dev_n), r.best_dev_loss);
    }

    #[test]
    fn data_errors() {
        let train = identity_data(2, 7);
        assert!(train_mlp(&train, &[], &tiny_mlp()).is_err());
        assert!(train_lstm(&train, &[], &LstmConfig::default()).is_err());
        let bad = vec![Sequence::new(Array2::zeros((3, 2)), Array2::zeros((3, 1))).unwrap()];
        assert!(matches!(train_mlp(&train, &bad, &tiny_mlp()), Err(Error::InvalidArgument(_))));
        assert!(Sequence::new(Array2::zeros((3, 1)), Array2::zeros((4, 1))).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let (train, dev) = (identity_data(4, 8), identity_data(2, 9));
        let cfg = MlpConfig { base_lr: 1e6, momentum: 0.0, ..tiny_mlp() };
        match train_mlp(&train, &dev, &cfg) {
            Err(Error::Diverged { epoch }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {:?}", other.map(|r| r.1)),
        }
    }

    #[test]
    fn lstm_learns_running_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut mk = || {
            let x = Array2::from_shape_simple_fn((15, 1), || rng.random_range(-1.0..1.0));
            let mut y = x.clone();
            for t in 1..15 {
                y[[t, 0]] += y[[t - 1, 0]];
            }
            Sequence::new(x, y).unwrap()
        };
        let train: Vec<_> = (0..12).map(|_| mk()).collect();
        let dev: Vec<_> = (0..3).map(|_| mk()).collect();
        let cfg = LstmConfig {
            ff_layers: 1,
            ff_width: 8,
            lstm_width: 8,
            base_lr: 0.01,
            max_epochs: 30,
            warmup_epochs: 30,
            ..LstmConfig::default()
        };
        let (_, report) = train_lstm(&train, &dev, &cfg).unwrap();
        assert!(
            report.best_dev_loss < 0.5 * report.initial_dev_loss,
            "{} vs {}",
            report.best_dev_loss,
            report.initial_dev_loss
        );
    }

    #[test]
    fn lstm_converges_to_a_constant_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut mk = || {
            let x = Array2::from_shape_simple_fn((10, 2), || rng.random_range(-1.0..1.0));
            Sequence::new(x, Array2::from_elem((10, 1), 0.75)).unwrap()
        };
        let train: Vec<_> = (0..6).map(|_| mk()).collect();
        let dev: Vec<_> = (0..2).map(|_| mk()).collect();
        let cfg = LstmConfig {
            ff_layers: 1,
            ff_width: 4,
            lstm_width: 4,
            base_lr: 0.01,
            max_epochs: 60,
            warmup_epochs: 60,
            ..LstmConfig::default()
        };
        let (model, report) = train_lstm(&train, &dev, &cfg).unwrap();
        let pred = model.predict_array(&dev[0].inputs).unwrap();
        let loss = pred.mapv(|p| (p - 0.75).powi(2)).mean().unwrap();
        assert!(loss < 1e-6, "loss {loss}, report {}", report.best_dev_loss);
    }

    #[test]
    fn empty_dev_set_is_rejected() {
        let train = identity_data(2, 1);
        assert!(matches!(train_lstm(&train, &[], &LstmConfig::default()), Err(Error::InvalidArgument(_))));
        assert!(matches!(train_mlp(&train, &[], &tiny_mlp()), Err(Error::InvalidArgument(_))));
    }
}
