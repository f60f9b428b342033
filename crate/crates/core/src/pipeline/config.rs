use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::SynthCorpusConfig;
use crate::eval::{EvalOptions, SplitSpec};
use crate::nn::{LstmConfig, MlpConfig, ParamGeneration};
use crate::ultra::WedgeGeometry;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fcdnn,
    Lstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Fcdnn, ModelKind::Lstm];

    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Fcdnn => "FC-DNN",
            ModelKind::Lstm => "LSTM",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Fcdnn => "fcdnn",
            ModelKind::Lstm => "lstm",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fcdnn" => Ok(ModelKind::Fcdnn),
            "lstm" => Ok(ModelKind::Lstm),
            other => Err(Error::Config(format!(
                "unknown model kind '{other}' (expected fcdnn or lstm)"
            ))),
        }
    }
}

/// Which target streams the acoustic network predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heads {
    #[default]
    Joint,
    Acoustic,
    Articulatory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Root holding one directory per speaker.
    pub corpus: PathBuf,
    /// Root for prepared data, models and reports.
    pub work: PathBuf,
    /// Speakers to process; every speaker directory when empty.
    pub speakers: Vec<String>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            corpus: PathBuf::from("corpus"),
            work: PathBuf::from("work"),
            speakers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecConfig {
    pub variance_target: f64,
    pub max_components: usize,
    /// Frames are resized to this shape before PCA.
    pub reduced_scanlines: usize,
    pub reduced_samples: usize,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            variance_target: 0.70,
            max_components: 128,
            reduced_scanlines: 64,
            reduced_samples: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub heads: Heads,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Fcdnn,
            heads: Heads::Joint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisConfig {
    pub param_generation: ParamGeneration,
    /// Every n-th frame is rendered as a wedge image.
    pub video_stride: usize,
    /// 1-based ULT-PCA dimensions to plot; `{1, 2, 4, ...}` when empty.
    pub plot_dims: Vec<usize>,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            param_generation: ParamGeneration::Mlpg,
            video_stride: 3,
            plot_dims: Vec::new(),
        }
    }
}

/// Everything the command-line stages read. Every field has a default, so
/// a config file only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub codec: CodecConfig,
    pub geometry: WedgeGeometry,
    pub split: SplitSpec,
    pub model: ModelConfig,
    pub mlp: MlpConfig,
    pub lstm: LstmConfig,
    /// Phone-duration network.
    pub duration: MlpConfig,
    pub synthesis: SynthesisConfig,
    pub eval: EvalOptions,
    /// Settings for `gen-corpus`.
    pub corpus: SynthCorpusConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.codec;
        if !(c.variance_target > 0.0 && c.variance_target <= 1.0) {
            return Err(Error::Config(format!(
                "codec.variance_target must be in (0, 1], got {}",
                c.variance_target
            )));
        }
        if c.max_components == 0 || c.reduced_scanlines == 0 || c.reduced_samples == 0 {
            return Err(Error::Config(
                "codec.max_components and the reduced frame size must be positive".into(),
            ));
        }
        if self.synthesis.video_stride == 0 {
            return Err(Error::Config("synthesis.video_stride must be at least 1".into()));
        }
        self.geometry
            .validate()
            .map_err(|e| Error::Config(format!("geometry: {e}")))?;
        self.split.validate()?;
        self.mlp.validate()?;
        self.lstm.validate()?;
        self.duration.validate()?;
        self.corpus.validate()?;
        Ok(())
    }

    /// Defaults, then the file (if any), then `overrides`.
    pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut tree = toml::Value::try_from(Self::default())
            .map_err(|e| Error::Config(format!("cannot serialize defaults: {e}")))?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let user: toml::Table = text
                .parse()
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            merge(&mut tree, toml::Value::Table(user));
        }
        for (key, value) in overrides {
            apply_override(&mut tree, key, value)?;
        }
        let cfg: Self = tree
            .try_into()
            .map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

fn merge(base: &mut toml::Value, top: toml::Value) {
    match (base, top) {
        (toml::Value::Table(b), toml::Value::Table(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn leaf_paths(value: &toml::Value, prefix: &str, out: &mut Vec<String>) {
    if let toml::Value::Table(t) = value {
        for (k, v) in t {
            let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            if v.is_table() {
                leaf_paths(v, &p, out);
            } else {
                out.push(p);
            }
        }
    }
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Set one field by dotted path (`codec.variance_target`) or by a leaf name
/// that is unique across the whole config (`variance_target`). Hyphens are
/// read as underscores.
pub fn apply_override(tree: &mut toml::Value, key: &str, raw: &str) -> Result<()> {
    let key = key.replace('-', "_");
    let path = if key.contains('.') {
        key.clone()
    } else {
        let mut leaves = Vec::new();
        leaf_paths(tree, "", &mut leaves);
        let hits: Vec<&String> = leaves
            .iter()
            .filter(|p| p.rsplit('.').next() == Some(key.as_str()))
            .collect();
        match hits.as_slice() {
            [one] => (*one).clone(),
            [] => return Err(Error::Config(format!("unknown setting --{key}"))),
            many => {
                return Err(Error::Config(format!(
                    "--{key} is ambiguous; use one of {}",
                    many.iter().map(|p| format!("--{p}")).collect::<Vec<_>>().join(", ")
                )))
            }
        }
    };
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().expect("non-empty");
    let mut node = tree;
    for part in parts {
        node = node
            .as_table_mut()
            .and_then(|t| t.get_mut(part))
            .filter(|v| v.is_table())
            .ok_or_else(|| Error::Config(format!("unknown setting --{path}")))?;
    }
    let table = node.as_table_mut().expect("checked above");
    let mut value = parse_value(raw);
    if let Some(old) = table.get(last) {
        // keep strings as strings ("1" for a speaker name, say)
        if old.is_str() && !value.is_str() {
            value = toml::Value::String(raw.to_string());
        }
        if old.is_array() && !value.is_array() {
            let items = raw.split(',').map(str::trim).filter(|x| !x.is_empty());
            value = toml::Value::Array(items.map(parse_value).collect());
        }
        if old.is_float() {
            if let Some(i) = value.as_integer() {
                value = toml::Value::Float(i as f64);
            }
        }
    }
    table.insert(last.to_string(), value);
    Ok(())
}
