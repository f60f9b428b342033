//! Objective evaluation: corpus splitting, mel-cepstral distortion and
//! RMSE on normalized ultrasound PCA coefficients.

mod metrics;
mod report;
mod split;
mod system;

pub use metrics::{mcd, ultpca_rmse, MCD_CONSTANT};
pub use report::{write_json, write_tables, EvalReport, SetScores, UtteranceScore};
pub use split::{split_corpus, Split, SplitSpec};
pub use system::{column_variances, evaluate_system, EvalOptions, EvalUtterance, MeanPredictor, OraclePredictor, Predictor};
