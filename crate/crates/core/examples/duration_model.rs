//! Phone durations: train the duration network on the synthetic corpus and
//! compare predicted with reference durations for a held-out utterance.

use ultratts::corpus::{generate_synthetic_corpus, SynthCorpusConfig};
use ultratts::frontend::{phone_level_vectors, text_to_phones};
use ultratts::nn::{predict_durations, train_duration_model, MlpConfig};

fn main() -> ultratts::Result<()> {
    let synth = generate_synthetic_corpus(&SynthCorpusConfig {
        n_utterances: 120,
        scanlines: 8,
        samples: 8,
        ..SynthCorpusConfig::default()
    })?;
    let c = &synth.corpus;
    let data = c
        .records
        .iter()
        .map(|r| {
            let seq = text_to_phones(&r.text, &c.lexicon, &c.inventory)?;
            Ok((phone_level_vectors(&seq, &c.inventory), r.durations()))
        })
        .collect::<ultratts::Result<Vec<_>>>()?;
    let (train, rest) = data.split_at(100);
    let (dev, test) = rest.split_at(10);
    let cfg = MlpConfig {
        hidden_layers: 2,
        hidden_width: 64,
        batch_size: 32,
        base_lr: 0.01,
        ..MlpConfig::default()
    };
    let (model, report) = train_duration_model(train, dev, &cfg)?;
    println!(
        "log-duration dev loss {:.3} -> {:.3}",
        report.initial_dev_loss, report.best_dev_loss
    );
    let (phones, reference) = &test[0];
    let predicted = predict_durations(&model, phones)?;
    println!("reference {reference:?}\npredicted {predicted:?}");
    Ok(())
}
