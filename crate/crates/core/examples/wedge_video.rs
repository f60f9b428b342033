//! Render scanline frames as fan-shaped images (PGM), as in the tongue
//! video strips.
//!
//!     cargo run --release --example wedge_video [out_dir]

use std::path::PathBuf;

use ultratts::corpus::{export_video_frames, generate_synthetic_corpus, SynthCorpusConfig};
use ultratts::ultra::{render_wedge, resize_bicubic, UltrasoundFrame, WedgeGeometry};

fn main() -> ultratts::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("ultratts-wedge"), PathBuf::from);
    let synth = generate_synthetic_corpus(&SynthCorpusConfig {
        n_utterances: 1,
        ..SynthCorpusConfig::default()
    })?;
    let rec = &synth.corpus.records[0];
    let geometry = WedgeGeometry::default();

    // upscale to the 842-sample scanline length before rendering
    let frames: Vec<UltrasoundFrame> = rec
        .ultrasound
        .iter()
        .map(|f| Ok(UltrasoundFrame::from_grid(&resize_bicubic(&f.to_grid(), 64, 842)?)))
        .collect::<ultratts::Result<_>>()?;
    let raster = render_wedge(&frames[0].to_grid(), &geometry)?;
    let lit = raster.pixels.iter().filter(|&&p| p > 0).count();
    println!("{}x{} raster, {lit} pixels inside the fan", raster.width, raster.height);

    let written = export_video_frames(&frames, rec.ult_fps, &geometry, &out, 3)?;
    println!("{} of {} frames written to {}", written.len(), frames.len(), out.display());
    Ok(())
}
