use std::collections::HashMap;

use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use super::metrics::{mcd, ultpca_rmse};
use super::report::{SetScores, UtteranceScore};
use crate::features::{FeatureMatrix, NormMode, NormStats, StreamLayout, MGC, ULTPCA};
use crate::nn::{generate_static, NetworkModel, ParamGeneration};
use crate::{Error, Result};

/// Anything that maps an utterance's frame-level inputs to target frames.
pub trait Predictor {
    fn predict(&self, id: &str, inputs: &FeatureMatrix) -> Result<FeatureMatrix>;
}

impl Predictor for NetworkModel {
    fn predict(&self, _id: &str, inputs: &FeatureMatrix) -> Result<FeatureMatrix> {
        NetworkModel::predict(self, inputs)
    }
}

/// Returns stored reference targets by utterance id.
#[derive(Debug, Clone, Default)]
pub struct OraclePredictor {
    targets: HashMap<String, FeatureMatrix>,
}

impl OraclePredictor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: &str, target: FeatureMatrix) {
        self.targets.insert(id.to_string(), target);
    }
}

impl Predictor for OraclePredictor {
    fn predict(&self, id: &str, inputs: &FeatureMatrix) -> Result<FeatureMatrix> {
        let t = self
            .targets
            .get(id)
            .ok_or_else(|| Error::data(id, "oracle has no target for this utterance"))?;
        if t.n_frames() != inputs.n_frames() {
            return Err(Error::data(
                id,
                format!("oracle target has {} frames, inputs {}", t.n_frames(), inputs.n_frames()),
            ));
        }
        Ok(t.clone())
    }
}

/// Predicts the training-set mean of every target column.
#[derive(Debug, Clone)]
pub struct MeanPredictor {
    layout: StreamLayout,
    mean: Vec<f64>,
}

impl MeanPredictor {
    pub fn new(layout: StreamLayout, mean: Vec<f64>) -> Result<Self> {
        if layout.total() != mean.len() {
            return Err(Error::invalid("mean width does not match layout"));
        }
        Ok(Self { layout, mean })
    }

    /// Means taken from mean-variance target statistics.
    pub fn from_norm(layout: StreamLayout, norm: &NormStats) -> Result<Self> {
        if norm.mode != NormMode::MeanVariance {
            return Err(Error::invalid("mean predictor needs mean-variance statistics"));
        }
        Self::new(layout, norm.a.clone())
    }
}

impl Predictor for MeanPredictor {
    fn predict(&self, _id: &str, inputs: &FeatureMatrix) -> Result<FeatureMatrix> {
        let t = inputs.n_frames();
        let frames = Array2::from_shape_fn((t, self.mean.len()), |(_, j)| self.mean[j]);
        FeatureMatrix::new(self.layout.clone(), inputs.frame_shift(), frames)
    }
}

/// A held-out utterance: frame-level linguistic inputs built from its
/// reference durations, and its reference targets in raw units.
#[derive(Debug, Clone)]
pub struct EvalUtterance {
    pub id: String,
    pub inputs: FeatureMatrix,
    pub reference: FeatureMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub param_generation: ParamGeneration,
    /// Score only the static ULT-PCA block; otherwise static and dynamic blocks.
    pub rmse_statics_only: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            param_generation: ParamGeneration::Slice,
            rmse_statics_only: true,
        }
    }
}

/// Variances, in `layout` column order, of the same-named segments of the
/// mean-variance statistics `norm` fitted on `norm_layout`.
pub fn column_variances(layout: &StreamLayout, norm_layout: &StreamLayout, norm: &NormStats) -> Result<Vec<f64>> {
    let all = norm
        .variances()
        .ok_or_else(|| Error::invalid("mlpg needs mean-variance target statistics"))?;
    if all.len() != norm_layout.total() {
        return Err(Error::invalid("statistics do not cover the reference layout"));
    }
    let mut v = Vec::with_capacity(layout.total());
    for seg in layout.segments() {
        let r = norm_layout
            .range(&seg.name)
            .ok_or_else(|| Error::invalid(format!("no statistics for the {} stream", seg.name)))?;
        if r.len() != seg.total() {
            return Err(Error::invalid(format!("{} stream widths differ", seg.name)));
        }
        v.extend(all.slice(s![r]).iter().copied());
    }
    Ok(v)
}

fn score(
    predictor: &dyn Predictor,
    utt: &EvalUtterance,
    target_norm: &NormStats,
    options: &EvalOptions,
) -> Result<UtteranceScore> {
    let id = utt.id.as_str();
    let reference = &utt.reference;
    if target_norm.width() != reference.width() {
        return Err(Error::data(
            id,
            format!(
                "reference is {} wide, target statistics cover {}",
                reference.width(),
                target_norm.width()
            ),
        ));
    }
    if reference.n_frames() != utt.inputs.n_frames() {
        return Err(Error::data(
            id,
            format!(
                "reference has {} frames, inputs {}",
                reference.n_frames(),
                utt.inputs.n_frames()
            ),
        ));
    }
    let pred = predictor.predict(id, &utt.inputs)?;
    if pred.n_frames() != reference.n_frames() {
        return Err(Error::data(id, "prediction and reference frame counts differ"));
    }
    let rl = reference.layout();
    let pl = pred.layout();
    let variances = match options.param_generation {
        ParamGeneration::Slice => Vec::new(),
        ParamGeneration::Mlpg => column_variances(pl, rl, target_norm).map_err(|e| e.in_utterance(id))?,
    };
    let generated = generate_static(&pred, &variances, options.param_generation)?;

    let mcd_value = match pl.segment(MGC) {
        Some(_) => {
            let r = rl
                .static_range(MGC)
                .ok_or_else(|| Error::data(id, "reference lacks the MGC stream"))?;
            let p = generated.layout().static_range(MGC).expect("generated from pred");
            let reference_mgc = reference.frames().slice(s![.., r]).to_owned();
            let predicted_mgc = generated.frames().slice(s![.., p]).to_owned();
            Some(mcd(&reference_mgc, &predicted_mgc)?)
        }
        None => None,
    };
    let rmse_value = match pl.segment(ULTPCA) {
        Some(_) => {
            let missing = || Error::data(id, "reference lacks the ULTPCA stream");
            let (r, p_cols, source) = if options.rmse_statics_only {
                let r = rl.static_range(ULTPCA).ok_or_else(missing)?;
                let p = generated.layout().static_range(ULTPCA).expect("generated from pred");
                (r, p, &generated)
            } else {
                let r = rl.range(ULTPCA).ok_or_else(missing)?;
                let p = pl.range(ULTPCA).expect("segment present");
                (r, p, &pred)
            };
            if r.len() != p_cols.len() {
                return Err(Error::data(id, "ULTPCA widths of prediction and reference differ"));
            }
            let norm = target_norm.select(r.clone());
            let reference_n = norm.apply(&reference.frames().slice(s![.., r]).to_owned())?;
            let predicted_n = norm.apply(&source.frames().slice(s![.., p_cols]).to_owned())?;
            Some(ultpca_rmse(&reference_n, &predicted_n)?)
        }
        None => None,
    };
    Ok(UtteranceScore {
        id: id.to_string(),
        frames: reference.n_frames(),
        mcd: mcd_value,
        rmse: rmse_value,
    })
}

/// Score every utterance with its original timing and aggregate with
/// frame-weighted averages. `target_norm` is the training-set mean-variance
/// statistics of the reference layout.
pub fn evaluate_system(
    predictor: &dyn Predictor,
    utterances: &[EvalUtterance],
    target_norm: &NormStats,
    options: &EvalOptions,
) -> Result<SetScores> {
    let scores = utterances
        .iter()
        .map(|u| score(predictor, u, target_norm, options).map_err(|e| e.in_utterance(&u.id)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SetScores::from_utterances(scores))
}
