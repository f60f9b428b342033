//! From-scratch regressors: a tanh feed-forward network trained with SGD
//! and a feed-forward + LSTM network trained with Adam, both with a fixed
//! warm-up learning rate, decay on non-improving epochs, and early stopping.

mod config;
mod duration;
mod gradcheck;
mod mlpg;
mod model;
mod network;
mod optim;
mod train;

pub use config::{LstmConfig, MlpConfig, Schedule};
pub use duration::{duration_targets, predict_durations, train_duration_model};
pub use gradcheck::{gradient_check, gradient_check_with};
pub use mlpg::{generate_static, mlpg_column, ParamGeneration};
pub use model::NetworkModel;
pub use network::{Layer, LayerKind, LayerSpec, Network};
pub use optim::{Adam, Optimizer, Sgd};
pub use train::{train_lstm, train_mlp, Sequence, TrainReport};
