//! Ultrasound tongue frames and the PCA ("eigentongue") codec.
//!
//! Raw frames are scanline images (one row per beam). They are shrunk with
//! separable bicubic interpolation, projected onto a PCA basis fitted on the
//! training frames, and rebuilt and fan-rendered for display.

mod frame;
mod pca;
mod resize;
mod wedge;

pub use frame::{ReducedFrame, UltrasoundFrame, DEFAULT_SAMPLES, DEFAULT_SCANLINES};
pub(crate) use frame::quantize;
pub use pca::{fit_pca, PcaCodec, UltCoeffVector};
pub use resize::{catmull_rom, resize_bicubic};
pub use wedge::{render_wedge, Raster, WedgeGeometry};
