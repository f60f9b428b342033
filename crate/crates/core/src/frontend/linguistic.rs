use ndarray::{s, Array2};

use super::{Inventory, PhoneSeq};
use crate::features::{FeatureMatrix, StreamLayout, DEFAULT_FRAME_SHIFT, LING};
use crate::{Error, Result};

/// Position in word, word position, within-phone position, duration.
pub const POSITIONAL_SLOTS: usize = 4;
const BOUNDARY_FLAGS: usize = 2;

/// `3 * (|inventory| + 1) + attribute bits + 4`, where attribute bits are
/// the inventory flags plus word-start and word-end.
pub fn vector_width(inventory: &Inventory) -> usize {
    3 * (inventory.len() + 1) + inventory.flag_names().len() + BOUNDARY_FLAGS + POSITIONAL_SLOTS
}

fn unit_position(index: usize, count: usize) -> f64 {
    if count <= 1 {
        0.0
    } else {
        index as f64 / (count - 1) as f64
    }
}

/// One vector per phone with the two frame-level slots left at zero.
pub fn phone_level_vectors(seq: &PhoneSeq, inventory: &Inventory) -> Array2<f64> {
    let block = inventory.len() + 1;
    let n_flags = inventory.flag_names().len();
    let width = vector_width(inventory);
    let n = seq.len();
    let mut out = Array2::zeros((n, width));
    for (i, tok) in seq.tokens.iter().enumerate() {
        let mut row = out.row_mut(i);
        let prev = if i == 0 { inventory.boundary() } else { seq.tokens[i - 1].id };
        let next = if i + 1 == n { inventory.boundary() } else { seq.tokens[i + 1].id };
        row[prev] = 1.0;
        row[block + tok.id] = 1.0;
        row[2 * block + next] = 1.0;

        let attr = 3 * block;
        for (k, &on) in inventory.flags(tok.id).iter().enumerate() {
            if on {
                row[attr + k] = 1.0;
            }
        }
        let pos = attr + n_flags + BOUNDARY_FLAGS;
        if let Some((word, in_word, word_len)) = tok.word {
            if in_word == 0 {
                row[attr + n_flags] = 1.0;
            }
            if in_word + 1 == word_len {
                row[attr + n_flags + 1] = 1.0;
            }
            row[pos] = unit_position(in_word, word_len);
            row[pos + 1] = unit_position(word, seq.n_words);
        }
    }
    out
}

/// Repeat each phone vector for its duration, filling the within-phone
/// position `(i + 0.5) / duration` and the duration in frames.
pub fn upsample_to_frames(phone_vectors: &Array2<f64>, durations: &[usize]) -> Result<FeatureMatrix> {
    if durations.len() != phone_vectors.nrows() {
        return Err(Error::invalid(format!(
            "{} durations for {} phones",
            durations.len(),
            phone_vectors.nrows()
        )));
    }
    if let Some(i) = durations.iter().position(|&d| d == 0) {
        return Err(Error::invalid(format!("phone {i} has zero duration")));
    }
    let width = phone_vectors.ncols();
    if width < 2 {
        return Err(Error::invalid("linguistic vectors too narrow"));
    }
    let total: usize = durations.iter().sum();
    let mut frames = Array2::zeros((total, width));
    let mut t = 0;
    for (p, &d) in durations.iter().enumerate() {
        for i in 0..d {
            let mut row = frames.row_mut(t);
            row.assign(&phone_vectors.row(p));
            row[width - 2] = (i as f64 + 0.5) / d as f64;
            row[width - 1] = d as f64;
            t += 1;
        }
    }
    FeatureMatrix::new(StreamLayout::plain(LING, width), DEFAULT_FRAME_SHIFT, frames)
}

/// Frame-level slots of a phone vector matrix (for inspection).
pub fn frame_slots(frames: &FeatureMatrix) -> Array2<f64> {
    let w = frames.width();
    frames.frames().slice(s![.., w - 2..]).to_owned()
}
