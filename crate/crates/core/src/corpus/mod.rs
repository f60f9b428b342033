//! Corpus ingestion and on-disk layout, the synthetic articulatory-acoustic
//! corpus generator, and file exports for offline inspection.

mod export;
mod raw;
mod record;
mod synth;
mod tasks;

pub use export::{default_plot_dims, export_video_frames, plot_coefficient_trajectories, plot_series, MANIFEST_NAME};
pub use raw::{import_raw_ultrasound, write_raw_ultrasound, RawUltrasound, UltParams, DEFAULT_ULT_FPS};
pub use record::{read_corpus, write_corpus, Corpus, UtteranceRecord};
pub use synth::{generate_synthetic_corpus, moving_average, SynthCorpus, SynthCorpusConfig};
pub use tasks::{memory_task, plateau_task};
