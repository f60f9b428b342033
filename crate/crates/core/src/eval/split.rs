use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.85,
            dev: 0.10,
            test: 0.05,
            seed: 1234,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let ratios = [self.train, self.dev, self.test];
        if ratios.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Config("split ratios must be positive".into()));
        }
        if (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split ratios must sum to 1, got {}",
                ratios.iter().sum::<f64>()
            )));
        }
        Ok(())
    }

    /// `(train, dev, test)` sizes for `n` utterances.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize, usize)> {
        self.validate()?;
        if n < 3 {
            return Err(Error::InsufficientData(format!(
                "need at least 3 utterances to split, got {n}"
            )));
        }
        let nf = n as f64;
        let train = ((self.train * nf).round() as usize).clamp(1, n - 2);
        let dev = ((self.dev * nf).round() as usize).clamp(1, n - train - 1);
        Ok((train, dev, n - train - dev))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

/// Seeded shuffle, then contiguous train/dev/test blocks.
pub fn split_corpus(ids: &[String], spec: &SplitSpec) -> Result<Split> {
    let (n_train, n_dev, _) = spec.sizes(ids.len())?;
    let mut order = ids.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let test = order.split_off(n_train + n_dev);
    let dev = order.split_off(n_train);
    Ok(Split {
        train: order,
        dev,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("u{i:04}")).collect()
    }

    #[test]
    fn standard_sizes() {
        let s = split_corpus(&ids(200), &SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (170, 20, 10));
        let s = split_corpus(&ids(3), &SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (1, 1, 1));
    }

    #[test]
    fn too_few() {
        assert!(matches!(
            split_corpus(&ids(2), &SplitSpec::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn bad_ratios() {
        let spec = SplitSpec { train: 0.8, ..SplitSpec::default() };
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
        let spec = SplitSpec { test: 0.0, train: 0.9, ..SplitSpec::default() };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn seeded() {
        let a = split_corpus(&ids(50), &SplitSpec::default()).unwrap();
        let b = split_corpus(&ids(50), &SplitSpec::default()).unwrap();
        assert_eq!(a, b);
        let c = split_corpus(&ids(50), &SplitSpec { seed: 7, ..SplitSpec::default() }).unwrap();
        assert_ne!(a, c);
    }

    proptest! {
        #[test]
        fn always_a_partition(n in 3usize..1000, seed in any::<u64>()) {
            let all = ids(n);
            let s = split_corpus(&all, &SplitSpec { seed, ..SplitSpec::default() }).unwrap();
            prop_assert!(!s.train.is_empty() && !s.dev.is_empty() && !s.test.is_empty());
            let mut seen = BTreeSet::new();
            for id in s.train.iter().chain(&s.dev).chain(&s.test) {
                prop_assert!(seen.insert(id.clone()));
            }
            prop_assert_eq!(seen, all.into_iter().collect::<BTreeSet<_>>());
        }
    }
}
