use std::path::{Path, PathBuf};

use ndarray::s;

use super::config::PipelineConfig;
use crate::corpus::{
    export_video_frames, generate_synthetic_corpus, import_raw_ultrasound, plot_series, write_corpus, SynthCorpus,
};
use crate::features::{FeatureMatrix, StreamLayout, ULTPCA};
use crate::ultra::WedgeGeometry;
use crate::{Error, Result};

/// Generate the configured synthetic corpus under the corpus directory.
pub fn cmd_gen_corpus(cfg: &PipelineConfig) -> Result<SynthCorpus> {
    let synth = generate_synthetic_corpus(&cfg.corpus)?;
    write_corpus(&cfg.paths.corpus, &synth.corpus)?;
    Ok(synth)
}

/// Render every `stride`-th frame of a raw recording as a wedge image.
pub fn cmd_export_video(
    data: &Path,
    params: &Path,
    geometry: &WedgeGeometry,
    out_dir: &Path,
    stride: usize,
) -> Result<Vec<PathBuf>> {
    let raw = import_raw_ultrasound(data, params)?;
    if raw.frames.is_empty() {
        return Err(Error::data(data.display().to_string(), "recording has no frames"));
    }
    export_video_frames(&raw.frames, raw.params.fps, geometry, out_dir, stride)
}

fn coefficient_view(m: FeatureMatrix) -> Result<FeatureMatrix> {
    match m.layout().static_range(ULTPCA) {
        Some(r) => {
            let frames = m.frames().slice(s![.., r]).to_owned();
            FeatureMatrix::new(StreamLayout::plain(ULTPCA, frames.ncols()), m.frame_shift(), frames)
        }
        None => Ok(m),
    }
}

/// Tabulate coefficient trajectories of an original feature file and named
/// predictions. Files carrying an ULT-PCA stream contribute its static
/// block; others contribute every column.
pub fn cmd_plot_coeffs(
    original: &Path,
    predictions: &[(String, PathBuf)],
    dims: Option<&[usize]>,
    out: &Path,
) -> Result<Vec<usize>> {
    let orig = coefficient_view(FeatureMatrix::load(original)?)?;
    let preds = predictions
        .iter()
        .map(|(n, p)| Ok((n.as_str(), coefficient_view(FeatureMatrix::load(p)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut series = vec![("original", &orig)];
    series.extend(preds.iter().map(|(n, m)| (*n, m)));
    plot_series(&series, dims, out)
}
