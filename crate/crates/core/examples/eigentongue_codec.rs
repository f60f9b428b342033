//! Fit a PCA codec on tongue frames from the synthetic corpus and check how
//! much of each frame survives the round trip.
//!
//!     cargo run --release --example eigentongue_codec [variance_target]

use ultratts::corpus::{generate_synthetic_corpus, SynthCorpusConfig};
use ultratts::ultra::{fit_pca, resize_bicubic, ReducedFrame};

fn main() -> ultratts::Result<()> {
    let target: f64 = std::env::args().nth(1).map_or(0.7, |a| a.parse().expect("variance target"));
    let synth = generate_synthetic_corpus(&SynthCorpusConfig {
        n_utterances: 40,
        ..SynthCorpusConfig::default()
    })?;

    // raw 64x128 scanline frames reduced to 32x64
    let mut frames = Vec::new();
    for rec in &synth.corpus.records {
        for f in &rec.ultrasound {
            let small = resize_bicubic(&f.to_grid(), 32, 64)?;
            frames.push(ReducedFrame::from_grid(&small));
        }
    }
    let codec = fit_pca(&frames, target, None)?;
    println!(
        "{} frames of {} pixels -> {} components keep {:.1}% of the variance",
        frames.len(),
        codec.dim(),
        codec.n_components(),
        100.0 * (1.0 - codec.discarded_variance() / codec.total_variance())
    );
    let ratios = codec.explained_variance_ratio();
    for (k, r) in ratios.iter().take(8).enumerate() {
        println!("  component {:>2}: {:5.1}%", k + 1, 100.0 * r);
    }

    let mut residual = 0.0;
    for f in &frames {
        let back = codec.decode(&codec.encode(f)?)?;
        residual += f.values().iter().zip(back.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    residual /= frames.len() as f64;
    println!(
        "mean squared residual {residual:.2}, discarded eigenvalues {:.2}",
        codec.discarded_variance()
    );

    let path = std::env::temp_dir().join("eigentongue.upca");
    codec.save(&path)?;
    println!("codec written to {}", path.display());
    Ok(())
}
