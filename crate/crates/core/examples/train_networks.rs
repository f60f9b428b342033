//! Train the feed-forward and recurrent recipes on a one-step memory task,
//! where only the LSTM can see the previous input.

use ultratts::corpus::memory_task;
use ultratts::nn::{gradient_check, train_lstm, train_mlp, LayerKind, LayerSpec, LstmConfig, MlpConfig};

fn main() -> ultratts::Result<()> {
    let specs = [
        LayerSpec::new(LayerKind::Tanh, 3, 8),
        LayerSpec::new(LayerKind::Lstm, 8, 6),
        LayerSpec::new(LayerKind::Linear, 6, 2),
    ];
    println!("gradient check (max relative error): {:.2e}", gradient_check(&specs, 8, 1)?);

    let (train, dev) = (memory_task(40, 30, 3, 1), memory_task(10, 30, 3, 2));
    let mlp = MlpConfig {
        hidden_layers: 2,
        hidden_width: 64,
        batch_size: 64,
        base_lr: 0.01,
        ..MlpConfig::default()
    };
    let (_, r) = train_mlp(&train, &dev, &mlp)?;
    println!(
        "FC-DNN: dev loss {:.4} -> {:.4} in {} epochs, lr trace {:?}",
        r.initial_dev_loss, r.best_dev_loss, r.epochs_run, r.learning_rates
    );

    let lstm = LstmConfig {
        ff_layers: 1,
        ff_width: 32,
        lstm_width: 32,
        base_lr: 0.01,
        max_epochs: 30,
        warmup_epochs: 10,
        ..LstmConfig::default()
    };
    let (model, r) = train_lstm(&train, &dev, &lstm)?;
    println!(
        "LSTM:   dev loss {:.4} -> {:.4} in {} epochs",
        r.initial_dev_loss, r.best_dev_loss, r.epochs_run
    );

    let pred = model.predict_array(&dev[0].inputs)?;
    println!("first dev sequence, t = 1..4 (target | prediction):");
    for t in 1..5 {
        println!("  {:+.3} | {:+.3}", dev[0].targets[[t, 0]], pred[[t, 0]]);
    }
    Ok(())
}
