//! Text to phones, phone-level linguistic vectors and frame-level inputs.
//!
//!     cargo run --example text_frontend -- "the cat, sat"

use ultratts::frontend::{
    frame_slots, phone_level_vectors, text_to_phones, upsample_to_frames, vector_width, Inventory, Lexicon,
};

fn main() -> ultratts::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "the cat, sat".to_string());
    let inventory = Inventory::toy();
    let lexicon = Lexicon::parse("the\tD AX\ncat\tK AA T\nsat\tS AA T\n")?;

    let seq = text_to_phones(&text, &lexicon, &inventory)?;
    println!("{text:?} -> {}", seq.symbols(&inventory).join(" "));

    let phones = phone_level_vectors(&seq, &inventory);
    println!("{} phones x {} features (vector width {})", phones.nrows(), phones.ncols(), vector_width(&inventory));

    let durations: Vec<usize> = (0..seq.len()).map(|i| 3 + i % 4).collect();
    let frames = upsample_to_frames(&phones, &durations)?;
    println!(
        "durations {durations:?} -> {} frames at {} s",
        frames.n_frames(),
        frames.frame_shift()
    );
    let slots = frame_slots(&frames);
    for t in 0..durations[0] + 1 {
        println!("  frame {t}: position {:.3}, duration {}", slots[[t, 0]], slots[[t, 1]]);
    }
    Ok(())
}
