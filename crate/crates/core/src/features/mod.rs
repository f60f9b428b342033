//! Frame-synchronous feature streams: layouts, dynamic features,
//! resampling, normalization and the FMTX file format.

mod deltas;
mod layout;
mod lf0;
mod matrix;
mod norm;
mod resample;

pub use deltas::{add_dynamic_features, append_deltas, DELTA_WINDOW, DELTA2_WINDOW};
pub use layout::{Segment, StreamLayout, BAP, LF0, LING, MGC, ULTPCA, VUV};
pub use lf0::{interpolate_lf0, UNVOICED};
pub use matrix::{compose_target, fit_length, split_target, FeatureMatrix, DEFAULT_FRAME_SHIFT};
pub use norm::{NormMode, NormStats, MINMAX_HI, MINMAX_LO};
pub use resample::resample_stream;
