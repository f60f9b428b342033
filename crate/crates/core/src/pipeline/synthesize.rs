use std::path::{Path, PathBuf};

use ndarray::{s, Array2};

use super::config::{ModelKind, PipelineConfig};
use super::prepare::{to_f32, PrepareInfo};
use super::workspace::Workspace;
use super::{load_target_norm, prepared_speakers, read_split, Resources};
use crate::corpus::{export_video_frames, plot_series, write_raw_ultrasound, UltParams};
use crate::eval::{column_variances, Predictor};
use crate::features::{FeatureMatrix, StreamLayout, ULTPCA, VUV};
use crate::frontend::{
    phone_level_vectors, read_labels, text_to_phones, upsample_to_frames, write_labels, DurationLabel,
};
use crate::nn::{generate_static, predict_durations, NetworkModel, ParamGeneration};
use crate::ultra::{resize_bicubic, PcaCodec, UltrasoundFrame};
use crate::{Error, Result};

/// Where phone durations come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Timing {
    /// From the duration model.
    Predicted,
    /// From the labels of a prepared utterance.
    Reference(String),
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub labels: Vec<DurationLabel>,
    /// Static MGC, BAP, LF0 and VUV, when the model predicts them.
    pub acoustic: Option<FeatureMatrix>,
    /// Static ULT-PCA coefficients, when the model predicts them.
    pub articulatory: Option<FeatureMatrix>,
    /// Reconstructed raw-size scanline images before quantization.
    pub images: Vec<Array2<f64>>,
    pub files: Vec<PathBuf>,
}

impl SynthesisResult {
    pub fn n_frames(&self) -> usize {
        self.labels.iter().map(|l| l.frames).sum()
    }
}

/// Decode coefficient rows to the codec's frame shape and resize each to
/// `raw_h x raw_w` scanline images.
pub fn reconstruct_frames(
    codec: &PcaCodec,
    coeffs: &Array2<f64>,
    raw_h: usize,
    raw_w: usize,
) -> Result<Vec<Array2<f64>>> {
    let (h, w) = codec.frame_shape();
    let flat = codec.decode_rows(coeffs)?;
    flat.rows()
        .into_iter()
        .map(|row| {
            let small = Array2::from_shape_vec((h, w), row.to_vec()).expect("codec shape");
            resize_bicubic(&small, raw_h, raw_w)
        })
        .collect()
}

/// Synthesize one utterance for a prepared speaker with any predictor and
/// write its outputs to `out_dir` under `name`.
#[allow(clippy::too_many_arguments)]
pub fn synthesize(
    cfg: &PipelineConfig,
    speaker: &str,
    predictor: &dyn Predictor,
    duration_model: Option<&NetworkModel>,
    text: &str,
    timing: &Timing,
    out_dir: &Path,
    name: &str,
) -> Result<SynthesisResult> {
    let ws = Workspace::new(&cfg.paths.work);
    let info = PrepareInfo::load(&ws.prepare_info(speaker))?;
    let res = Resources::load(&ws, speaker)?;
    let codec = PcaCodec::load(&ws.codec(speaker))
        .map_err(|e| Error::Config(format!("codec for {speaker}: {e}")))?;
    let norm = load_target_norm(&ws, speaker)?;
    let split = read_split(&ws.split(speaker))?;
    let reference_layout = FeatureMatrix::load(&ws.target(speaker, &split.train[0]))?
        .layout()
        .clone();

    let seq = text_to_phones(text, &res.lexicon, &res.inventory)?;
    let phones = phone_level_vectors(&seq, &res.inventory);
    let (id, durations) = match timing {
        Timing::Predicted => {
            let model = duration_model
                .ok_or_else(|| Error::Config("predicted timing needs a duration model".into()))?;
            (String::new(), predict_durations(model, &phones)?)
        }
        Timing::Reference(id) => {
            let labels = read_labels(&ws.labels(speaker, id))
                .map_err(|e| Error::data(id, format!("no reference labels: {e}")))?;
            (id.clone(), seq.durations_from_labels(&res.inventory, &labels).map_err(|e| e.in_utterance(id))?)
        }
    };
    let labels: Vec<DurationLabel> = seq
        .symbols(&res.inventory)
        .into_iter()
        .zip(&durations)
        .map(|(p, &frames)| DurationLabel {
            phone: p.to_string(),
            frames,
        })
        .collect();
    let inputs = to_f32(upsample_to_frames(&phones, &durations)?)?;

    let pred = predictor.predict(&id, &inputs)?;
    if pred.n_frames() != inputs.n_frames() {
        return Err(Error::Numerical("prediction length differs from the input".into()));
    }
    let mode = cfg.synthesis.param_generation;
    let variances = match mode {
        ParamGeneration::Slice => Vec::new(),
        ParamGeneration::Mlpg => column_variances(pred.layout(), &reference_layout, &norm)?,
    };
    let statics = generate_static(&pred, &variances, mode)?;
    let layout = statics.layout();
    let mut files = Vec::new();
    std::fs::create_dir_all(out_dir)?;
    let lab_path = out_dir.join(format!("{name}.lab"));
    write_labels(&lab_path, &labels)?;
    files.push(lab_path);

    let acoustic_names: Vec<String> = layout
        .segments()
        .iter()
        .filter(|s| s.name != ULTPCA)
        .map(|s| s.name.clone())
        .collect();
    let acoustic = if acoustic_names.is_empty() {
        None
    } else {
        let segs = acoustic_names.iter().map(|n| layout.segment(n).expect("listed").clone()).collect();
        let cols: Vec<usize> = acoustic_names.iter().flat_map(|n| layout.range(n).expect("listed")).collect();
        let mut frames = statics.frames().select(ndarray::Axis(1), &cols);
        let sub = StreamLayout::new(segs)?;
        if let Some(r) = sub.range(VUV) {
            frames
                .slice_mut(s![.., r])
                .mapv_inplace(|v| if v >= 0.5 { 1.0 } else { 0.0 });
        }
        let m = FeatureMatrix::new(sub, statics.frame_shift(), frames)?;
        let path = out_dir.join(format!("{name}.acoustic.fmtx"));
        m.save(&path)?;
        files.push(path);
        Some(m)
    };

    let mut images = Vec::new();
    let articulatory = match layout.range(ULTPCA) {
        None => None,
        Some(r) => {
            let coeffs = statics.frames().slice(s![.., r]).to_owned();
            let m = FeatureMatrix::new(StreamLayout::plain(ULTPCA, coeffs.ncols()), statics.frame_shift(), coeffs)?;
            let path = out_dir.join(format!("{name}.ultpca.fmtx"));
            m.save(&path)?;
            files.push(path);

            images = reconstruct_frames(&codec, m.frames(), info.raw_scanlines, info.raw_samples)?;
            let frames: Vec<UltrasoundFrame> = images.iter().map(UltrasoundFrame::from_grid).collect();
            let rate = 1.0 / statics.frame_shift();
            let params = UltParams {
                scanlines: info.raw_scanlines,
                samples: info.raw_samples,
                fps: rate,
            };
            let (ult, par) = (out_dir.join(format!("{name}.ult")), out_dir.join(format!("{name}.param")));
            write_raw_ultrasound(&frames, &params, &ult, &par)?;
            files.extend([ult, par]);
            if !frames.is_empty() {
                let video_dir = out_dir.join(format!("{name}_video"));
                files.extend(export_video_frames(
                    &frames,
                    rate,
                    &cfg.geometry,
                    &video_dir,
                    cfg.synthesis.video_stride,
                )?);
                files.push(video_dir.join(crate::corpus::MANIFEST_NAME));
            }

            let dims: Vec<usize> = if cfg.synthesis.plot_dims.is_empty() {
                crate::corpus::default_plot_dims(m.width())
            } else {
                cfg.synthesis.plot_dims.clone()
            };
            let plot_path = out_dir.join(format!("{name}.coeffs.tsv"));
            let reference = match timing {
                Timing::Reference(id) => {
                    let target = FeatureMatrix::load(&ws.target(speaker, id))?;
                    let r = target.layout().static_range(ULTPCA).expect("prepared targets carry ULTPCA");
                    let frames = target.frames().slice(s![.., r]).to_owned();
                    Some(FeatureMatrix::new(m.layout().clone(), m.frame_shift(), frames)?)
                }
                Timing::Predicted => None,
            };
            let mut series = Vec::new();
            if let Some(r) = &reference {
                series.push(("original", r));
            }
            series.push(("predicted", &m));
            plot_series(&series, Some(&dims), &plot_path)?;
            files.push(plot_path);
            Some(m)
        }
    };
    Ok(SynthesisResult {
        labels,
        acoustic,
        articulatory,
        images,
        files,
    })
}

/// Load the trained `kind` models of `speaker` (the only prepared speaker
/// when `None`) and synthesize `text`, or the reference utterance's own
/// text when `text` is `None`.
pub fn cmd_synthesize(
    cfg: &PipelineConfig,
    kind: ModelKind,
    speaker: Option<&str>,
    text: Option<&str>,
    timing: &Timing,
    out_dir: &Path,
    name: &str,
) -> Result<SynthesisResult> {
    let ws = Workspace::new(&cfg.paths.work);
    let speaker = match speaker {
        Some(s) => s.to_string(),
        None => {
            let all = prepared_speakers(cfg, &ws)?;
            match all.as_slice() {
                [one] => one.clone(),
                _ => {
                    return Err(Error::Config(format!(
                        "several speakers are prepared ({}); choose one with --speaker",
                        all.join(", ")
                    )))
                }
            }
        }
    };
    let load = |p: PathBuf| {
        NetworkModel::load(&p).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("cannot load {}: {io}; run train first", p.display())),
            other => other,
        })
    };
    let acoustic = load(ws.acoustic_model(&speaker, kind))?;
    let duration = match timing {
        Timing::Predicted => Some(load(ws.duration_model(&speaker, kind))?),
        Timing::Reference(_) => None,
    };
    let text = match (text, timing) {
        (Some(t), _) => t.to_string(),
        (None, Timing::Reference(id)) => Resources::load(&ws, &speaker)?.text(id)?.to_string(),
        (None, Timing::Predicted) => return Err(Error::Config("no text to synthesize".into())),
    };
    synthesize(cfg, &speaker, &acoustic, duration.as_ref(), &text, timing, out_dir, name)
}
