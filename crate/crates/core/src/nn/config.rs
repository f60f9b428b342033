use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Learning-rate schedule and stopping rule shared by both recipes.
///
/// The rate stays at `base_lr` for the first `warmup_epochs` epochs. After
/// each later epoch whose dev loss does not improve, it is multiplied by
/// `decay_factor`. Training stops after `max_epochs`, or, once warm-up is
/// over, when `patience` epochs have passed since the best dev loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub base_lr: f64,
    pub max_epochs: usize,
    pub warmup_epochs: usize,
    pub decay_factor: f64,
    pub patience: usize,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 || self.warmup_epochs == 0 || self.patience == 0 {
            return Err(Error::Config(
                "max_epochs, warmup_epochs and patience must be at least 1".into(),
            ));
        }
        if self.warmup_epochs > self.max_epochs {
            return Err(Error::Config(format!(
                "warmup_epochs ({}) exceeds max_epochs ({})",
                self.warmup_epochs, self.max_epochs
            )));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor < 1.0) {
            return Err(Error::Config("decay_factor must be in (0, 1)".into()));
        }
        if !(self.base_lr > 0.0 && self.base_lr.is_finite()) {
            return Err(Error::Config("base_lr must be positive".into()));
        }
        Ok(())
    }
}

/// Feed-forward recipe: tanh hidden layers, SGD, shuffled frame batches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub batch_size: usize,
    pub base_lr: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    pub warmup_epochs: usize,
    pub decay_factor: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_layers: 6,
            hidden_width: 1024,
            batch_size: 256,
            base_lr: 0.002,
            momentum: 0.9,
            max_epochs: 25,
            warmup_epochs: 10,
            decay_factor: 0.5,
            patience: 5,
            seed: 1234,
        }
    }
}

impl MlpConfig {
    pub fn schedule(&self) -> Schedule {
        Schedule {
            base_lr: self.base_lr,
            max_epochs: self.max_epochs,
            warmup_epochs: self.warmup_epochs,
            decay_factor: self.decay_factor,
            patience: self.patience,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule().validate()?;
        if self.hidden_layers == 0 || self.hidden_width == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "hidden_layers, hidden_width and batch_size must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config("momentum must be in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Recurrent recipe: tanh feed-forward layers, one LSTM layer, linear
/// output, Adam, one utterance per update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LstmConfig {
    pub ff_layers: usize,
    pub ff_width: usize,
    pub lstm_width: usize,
    pub base_lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    pub warmup_epochs: usize,
    pub decay_factor: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            ff_layers: 4,
            ff_width: 1024,
            lstm_width: 512,
            base_lr: 0.002,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_epochs: 35,
            warmup_epochs: 30,
            decay_factor: 0.5,
            patience: 5,
            seed: 1234,
        }
    }
}

impl LstmConfig {
    pub fn schedule(&self) -> Schedule {
        Schedule {
            base_lr: self.base_lr,
            max_epochs: self.max_epochs,
            warmup_epochs: self.warmup_epochs,
            decay_factor: self.decay_factor,
            patience: self.patience,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule().validate()?;
        if self.ff_width == 0 || self.lstm_width == 0 {
            return Err(Error::Config("layer widths must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.epsilon > 0.0) {
            return Err(Error::Config("invalid Adam parameters".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        MlpConfig::default().validate().unwrap();
        LstmConfig::default().validate().unwrap();
        assert!(LstmConfig::default().warmup_epochs <= LstmConfig::default().max_epochs);
    }

    #[test]
    fn zero_epochs_rejected() {
        let cfg = MlpConfig {
            max_epochs: 0,
            ..MlpConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = MlpConfig {
            warmup_epochs: 30,
            ..MlpConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
