//! Objective measures and the corpus split.

use ndarray::Array2;
use ultratts::eval::{mcd, split_corpus, ultpca_rmse, SplitSpec, MCD_CONSTANT};

fn main() -> ultratts::Result<()> {
    let reference = Array2::from_shape_fn((50, 25), |(t, d)| ((t + d) as f64 * 0.1).sin() / (d + 1) as f64);
    let mut predicted = reference.clone();
    predicted.column_mut(0).mapv_inplace(|v| v + 3.0);
    println!("MCD with only c0 changed: {:.3} dB", mcd(&reference, &predicted)?);
    predicted.column_mut(1).mapv_inplace(|v| v + 0.1);
    println!("MCD with c1 shifted by 0.1: {:.4} dB (= {MCD_CONSTANT:.4} * sqrt(2) * 0.1)", mcd(&reference, &predicted)?);
    println!("RMSE: {:.4}", ultpca_rmse(&reference, &predicted)?);

    let ids: Vec<String> = (1..=200).map(|i| format!("utt_{i:04}")).collect();
    let split = split_corpus(&ids, &SplitSpec::default())?;
    println!(
        "85-10-5 split of 200: {} / {} / {}; first test ids {:?}",
        split.train.len(),
        split.dev.len(),
        split.test.len(),
        &split.test[..3]
    );
    Ok(())
}
