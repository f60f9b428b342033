use std::path::PathBuf;

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::record::{Corpus, UtteranceRecord};
use crate::features::{interpolate_lf0, resample_stream, FeatureMatrix, StreamLayout, UNVOICED};
use crate::frontend::{DurationLabel, Inventory, Lexicon};
use crate::ultra::UltrasoundFrame;
use crate::{Error, Result};

const BACKGROUND: f64 = 40.0;
const RIDGE: f64 = 170.0;
const MEAN_LF0: f64 = 4.85;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthCorpusConfig {
    pub seed: u64,
    pub speaker: String,
    pub n_utterances: usize,
    /// Inventory file; the bundled toy inventory when absent.
    pub inventory: Option<PathBuf>,
    pub scanlines: usize,
    pub samples: usize,
    pub ult_fps: f64,
    pub frame_shift: f64,
    /// Phones per utterance including the edge silences.
    pub min_phones: usize,
    pub max_phones: usize,
    /// Phone durations in acoustic frames. Each phone has its own mean in
    /// this range; tokens vary around it by a sixth of the range.
    pub min_duration: usize,
    pub max_duration: usize,
    /// Moving-average width, in acoustic frames, applied to phone targets.
    pub smoothing_width: usize,
    /// Noise standard deviation relative to each stream's scale (255 for
    /// ultrasound intensities).
    pub noise: f64,
    pub mgc_order: usize,
    pub bap_order: usize,
}

impl Default for SynthCorpusConfig {
    fn default() -> Self {
        Self {
            seed: 1234,
            speaker: "synth".into(),
            n_utterances: 200,
            inventory: None,
            scanlines: 64,
            samples: 128,
            ult_fps: 81.5,
            frame_shift: 0.005,
            min_phones: 3,
            max_phones: 12,
            min_duration: 5,
            max_duration: 30,
            smoothing_width: 5,
            noise: 0.05,
            mgc_order: 60,
            bap_order: 5,
        }
    }
}

impl SynthCorpusConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(format!("synthetic corpus: {m}")));
        if self.n_utterances == 0 {
            return fail("n_utterances must be at least 1");
        }
        if self.scanlines == 0 || self.samples < 4 {
            return fail("frames need at least 1 scanline and 4 samples");
        }
        if !(self.ult_fps > 0.0 && self.frame_shift > 0.0) {
            return fail("rates must be positive");
        }
        if self.min_phones < 3 || self.max_phones < self.min_phones {
            return fail("need 3 <= min_phones <= max_phones");
        }
        if self.min_duration < 1 || self.max_duration < self.min_duration {
            return fail("need 1 <= min_duration <= max_duration");
        }
        if self.smoothing_width == 0 {
            return fail("smoothing_width must be at least 1");
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return fail("noise must be finite and >= 0");
        }
        if self.mgc_order < 2 || self.bap_order == 0 {
            return fail("need mgc_order >= 2 and bap_order >= 1");
        }
        Ok(())
    }
}

/// A generated corpus and the per-phone archetypes it was built from,
/// indexed by inventory id.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    /// `scanlines x samples` intensity images.
    pub articulatory: Vec<Array2<f64>>,
    /// Rows of static MGC, BAP, LF0 (log Hz; unvoiced phones hold
    /// [`UNVOICED`]) and VUV.
    pub acoustic: Array2<f64>,
}

/// Centered moving average along time with edge replication.
pub fn moving_average(x: &Array2<f64>, width: usize) -> Array2<f64> {
    let t = x.nrows();
    if width <= 1 || t == 0 {
        return x.clone();
    }
    let before = (width - 1) / 2;
    let mut out = Array2::zeros(x.dim());
    for i in 0..t {
        let mut row = out.row_mut(i);
        for k in 0..width {
            let src = (i + k).saturating_sub(before).min(t - 1);
            row.scaled_add(1.0, &x.row(src));
        }
        row /= width as f64;
    }
    out
}

fn tongue_image<R: Rng>(rng: &mut R, h: usize, w: usize, silence: bool) -> Array2<f64> {
    let wf = w as f64;
    let (base, amp, center, spread) = if silence {
        (0.6 * wf, 0.08 * wf, 0.5, 0.3)
    } else {
        (
            rng.random_range(0.3..0.75) * wf,
            rng.random_range(-0.2..0.2) * wf,
            rng.random_range(0.2..0.8),
            rng.random_range(0.12..0.35),
        )
    };
    let thickness = (0.04 * wf).max(1.0);
    Array2::from_shape_fn((h, w), |(i, j)| {
        let u = if h > 1 { i as f64 / (h - 1) as f64 } else { 0.5 };
        let depth = base + amp * (-(u - center).powi(2) / (2.0 * spread * spread)).exp();
        let d = (j as f64 - depth) / thickness;
        (BACKGROUND + RIDGE * (-0.5 * d * d).exp()).round()
    })
}

fn acoustic_row<R: Rng>(rng: &mut R, cfg: &SynthCorpusConfig, silence: bool, voiced: bool) -> Vec<f64> {
    let mut row = Vec::with_capacity(cfg.mgc_order + cfg.bap_order + 2);
    row.push(if silence { -4.0 } else { rng.random_range(-1.0..2.0) });
    for d in 1..cfg.mgc_order {
        let scale = if silence { 0.1 } else { 1.0 };
        row.push(scale * rng.random_range(-1.0..1.0) / d as f64);
    }
    for _ in 0..cfg.bap_order {
        row.push(if voiced { rng.random_range(-15.0..-5.0) } else { rng.random_range(-5.0..0.0) });
    }
    row.push(if voiced { rng.random_range(4.5..5.2) } else { UNVOICED });
    row.push(if voiced { 1.0 } else { 0.0 });
    row
}

fn word_name(mut n: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s.reverse();
    format!("w{}", String::from_utf8(s).expect("ascii"))
}

/// Generate a seeded corpus in which each phone has a fixed articulatory
/// and acoustic target, transitions are smoothed with a moving average, and
/// Gaussian noise is added to every stream.
pub fn generate_synthetic_corpus(config: &SynthCorpusConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let inventory = match &config.inventory {
        Some(p) => Inventory::load(p)?,
        None => Inventory::toy(),
    };
    let sil = inventory.silence();
    let speech: Vec<usize> = (0..inventory.len()).filter(|&i| i != sil).collect();
    if speech.is_empty() {
        return Err(Error::Config("inventory has no non-silence phones".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_sym = inventory.len();
    let voiced: Vec<bool> = (0..n_sym)
        .map(|i| i != sil && inventory.has_flag(i, "voiced"))
        .collect();
    let articulatory: Vec<Array2<f64>> = (0..n_sym)
        .map(|i| tongue_image(&mut rng, config.scanlines, config.samples, i == sil))
        .collect();
    let acoustic_width = config.mgc_order + config.bap_order + 2;
    let mut acoustic = Array2::zeros((n_sym, acoustic_width));
    for i in 0..n_sym {
        let row = acoustic_row(&mut rng, config, i == sil, voiced[i]);
        acoustic.row_mut(i).assign(&ndarray::Array1::from(row));
    }
    let (lo, hi) = (config.min_duration, config.max_duration);
    let mean_duration: Vec<usize> = (0..n_sym).map(|_| rng.random_range(lo..=hi)).collect();
    let jitter = (hi - lo) / 6;
    let images = Array2::from_shape_fn((n_sym, config.scanlines * config.samples), |(p, k)| {
        articulatory[p].as_slice().expect("standard layout")[k]
    });
    let layout = StreamLayout::acoustic_with(config.mgc_order, config.bap_order).statics();
    let lf0_col = config.mgc_order + config.bap_order;
    let noise = |scale: f64| Normal::new(0.0, (config.noise * scale).max(0.0)).expect("finite");
    let pixel_noise = noise(255.0);

    let mut lexicon = Lexicon::default();
    let mut words: Vec<(String, Vec<usize>)> = Vec::new();
    let mut records = Vec::with_capacity(config.n_utterances);
    let width = config.smoothing_width;
    for u in 0..config.n_utterances {
        let n_inner = rng.random_range(config.min_phones..=config.max_phones) - 2;
        let mut phones = vec![sil];
        let mut text_words = Vec::new();
        let mut remaining = n_inner;
        while remaining > 0 {
            let len = rng.random_range(1..=remaining.min(4));
            let candidates: Vec<usize> = (0..words.len()).filter(|&k| words[k].1.len() == len).collect();
            let k = if !candidates.is_empty() && rng.random_bool(0.6) {
                candidates[rng.random_range(0..candidates.len())]
            } else {
                let ph: Vec<usize> = (0..len).map(|_| speech[rng.random_range(0..speech.len())]).collect();
                let name = word_name(words.len());
                lexicon.insert(&name, ph.iter().map(|&p| inventory.symbol(p).to_string()).collect());
                words.push((name, ph));
                words.len() - 1
            };
            phones.extend_from_slice(&words[k].1);
            text_words.push(words[k].0.clone());
            remaining -= len;
        }
        phones.push(sil);
        let durations: Vec<usize> = phones
            .iter()
            .map(|&p| {
                let m = mean_duration[p];
                rng.random_range(m.saturating_sub(jitter).max(lo)..=(m + jitter).min(hi))
            })
            .collect();
        let t_len: usize = durations.iter().sum();
        let mut onehot = Array2::zeros((t_len, n_sym));
        let mut frame_phone = Vec::with_capacity(t_len);
        for (&p, &d) in phones.iter().zip(&durations) {
            for _ in 0..d {
                onehot[[frame_phone.len(), p]] = 1.0;
                frame_phone.push(p);
            }
        }
        let weights = moving_average(&onehot, width);

        // acoustic stream at the frame shift
        let mut frames = weights.dot(&acoustic);
        let raw_lf0: Vec<f64> = frame_phone.iter().map(|&p| acoustic[[p, lf0_col]]).collect();
        let (mut lf0, vuv) = interpolate_lf0(&raw_lf0);
        if vuv.iter().all(|&v| v == 0.0) {
            lf0.fill(MEAN_LF0);
        }
        let lf0 = moving_average(&Array2::from_shape_vec((t_len, 1), lf0).expect("sized"), width);
        frames.column_mut(lf0_col).assign(&lf0.column(0));
        frames.column_mut(lf0_col + 1).assign(&ndarray::Array1::from(vuv));
        let mgc_noise = noise(1.0);
        let bap_noise = noise(5.0);
        let lf0_noise = noise(0.2);
        for mut row in frames.axis_iter_mut(Axis(0)) {
            for d in 0..config.mgc_order {
                row[d] += mgc_noise.sample(&mut rng) / (d.max(1)) as f64;
            }
            for d in config.mgc_order..lf0_col {
                row[d] += bap_noise.sample(&mut rng);
            }
            row[lf0_col] += lf0_noise.sample(&mut rng);
        }
        frames.mapv_inplace(|v| v as f32 as f64);
        let acoustic_fm = FeatureMatrix::new(layout.clone(), config.frame_shift, frames)?;

        // ultrasound at its native rate
        let native = resample_stream(&weights, 1.0 / config.frame_shift, config.ult_fps)?;
        let ultrasound = native
            .axis_iter(Axis(0))
            .map(|w| {
                let img = w.dot(&images);
                let px: Vec<u8> = img
                    .iter()
                    .map(|&v| crate::ultra::quantize(v + pixel_noise.sample(&mut rng)))
                    .collect();
                UltrasoundFrame::new(config.scanlines, config.samples, px)
            })
            .collect::<Result<Vec<_>>>()?;

        let labels = phones
            .iter()
            .zip(&durations)
            .map(|(&p, &d)| DurationLabel {
                phone: inventory.symbol(p).to_string(),
                frames: d,
            })
            .collect();
        let record = UtteranceRecord {
            id: format!("{}_{:04}", config.speaker, u + 1),
            speaker: config.speaker.clone(),
            text: text_words.join(" "),
            labels,
            ultrasound,
            ult_fps: config.ult_fps,
            acoustic: acoustic_fm,
        };
        record.validate()?;
        records.push(record);
    }
    Ok(SynthCorpus {
        corpus: Corpus {
            speaker: config.speaker.clone(),
            inventory,
            lexicon,
            records,
        },
        articulatory,
        acoustic,
    })
}
