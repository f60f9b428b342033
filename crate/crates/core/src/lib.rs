//! Text-to-speech-and-articulation at desk scale.
//!
//! The crate turns text into two frame-synchronous streams: vocoder
//! parameters (MGC, BAP, LF0, VUV) and ultrasound tongue images. Tongue
//! images are compressed with a PCA codec ([`ultra`]), paired with the
//! acoustic features at a 5 ms frame step ([`features`]), and predicted from
//! linguistic features ([`frontend`]) by feed-forward or recurrent networks
//! trained from scratch ([`nn`]). [`eval`] computes mel-cepstral distortion
//! and RMSE on normalized PCA coefficients, [`corpus`] reads raw scanline
//! recordings and generates a synthetic corpus, and [`pipeline`] wires the
//! stages into the `ultratts` command-line tool.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod frontend;
pub mod io_util;
pub mod nn;
pub mod pipeline;
pub mod ultra;

pub use error::{Error, Result};
