use ndarray::Array2;

use crate::{Error, Result};

/// `10 / ln 10`, the dB factor of mel-cepstral distortion.
pub const MCD_CONSTANT: f64 = 10.0 / std::f64::consts::LN_10;

fn same_shape(a: &Array2<f64>, b: &Array2<f64>, what: &str) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "{what}: shapes {:?} and {:?} differ",
            a.dim(),
            b.dim()
        )));
    }
    if a.nrows() == 0 {
        return Err(Error::invalid(format!("{what}: no frames")));
    }
    Ok(())
}

/// Mel-cepstral distortion in dB, averaged over frames. Column 0 (energy)
/// is excluded.
pub fn mcd(reference: &Array2<f64>, predicted: &Array2<f64>) -> Result<f64> {
    same_shape(reference, predicted, "mcd")?;
    let total: f64 = reference
        .rows()
        .into_iter()
        .zip(predicted.rows())
        .map(|(r, p)| {
            let sq: f64 = r.iter().zip(p.iter()).skip(1).map(|(a, b)| (a - b) * (a - b)).sum();
            MCD_CONSTANT * (2.0 * sq).sqrt()
        })
        .sum();
    Ok(total / reference.nrows() as f64)
}

/// Root mean squared difference over every entry.
pub fn ultpca_rmse(reference: &Array2<f64>, predicted: &Array2<f64>) -> Result<f64> {
    same_shape(reference, predicted, "rmse")?;
    if reference.ncols() == 0 {
        return Err(Error::invalid("rmse: no columns"));
    }
    let sq: f64 = reference
        .iter()
        .zip(predicted.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sq / reference.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mcd_examples() {
        let a = Array2::from_shape_fn((4, 60), |(i, j)| (i * 60 + j) as f64 * 0.01);
        assert_eq!(mcd(&a, &a).unwrap(), 0.0);
        let mut b = Array2::zeros((1, 60));
        b[[0, 1]] = 1.0;
        let got = mcd(&Array2::zeros((1, 60)), &b).unwrap();
        assert!((got - 10.0 / 10f64.ln() * 2f64.sqrt()).abs() < 1e-9, "{got}");
        assert!((got - 6.1419).abs() < 1e-4);
        let mut c = a.clone();
        c.column_mut(0).fill(100.0);
        assert_eq!(mcd(&a, &c).unwrap(), 0.0);
        assert!(mcd(&a, &Array2::zeros((3, 60))).is_err());
    }

    #[test]
    fn rmse_examples() {
        let a = Array2::from_shape_fn((5, 3), |(i, j)| (i as f64) - j as f64);
        assert_eq!(ultpca_rmse(&a, &a).unwrap(), 0.0);
        assert!((ultpca_rmse(&a, &(&a + 1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(ultpca_rmse(&a, &Array2::zeros((5, 2))).is_err());
    }

    fn pair() -> impl Strategy<Value = (Array2<f64>, Array2<f64>, Array2<f64>)> {
        (1usize..6, 2usize..8).prop_flat_map(|(t, d)| {
            let m = || prop::collection::vec(-10.0f64..10.0, t * d)
                .prop_map(move |v| Array2::from_shape_vec((t, d), v).unwrap());
            (m(), m(), m())
        })
    }

    proptest! {
        #[test]
        fn metric_properties((a, b, c) in pair(), alpha in -5.0f64..5.0) {
            for f in [mcd, ultpca_rmse] {
                let ab = f(&a, &b).unwrap();
                prop_assert!((ab - f(&b, &a).unwrap()).abs() < 1e-12);
                prop_assert!(f(&a, &c).unwrap() <= ab + f(&b, &c).unwrap() + 1e-9);
            }
            let scaled = ultpca_rmse(&(&a * alpha), &(&b * alpha)).unwrap();
            prop_assert!((scaled - alpha.abs() * ultpca_rmse(&a, &b).unwrap()).abs() < 1e-9);
            let mut a0 = a.clone();
            a0.column_mut(0).mapv_inplace(|v| v + alpha);
            prop_assert!((mcd(&a0, &b).unwrap() - mcd(&a, &b).unwrap()).abs() < 1e-12);
        }
    }
}
