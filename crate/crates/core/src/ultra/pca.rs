use std::io::Write;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ndarray::{Array1, Array2, Axis};

use super::ReducedFrame;
use crate::io_util;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"UPCA";
const VERSION: u16 = 1;

/// PCA coefficients of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct UltCoeffVector(pub Vec<f64>);

impl UltCoeffVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mean frame plus an orthonormal basis ordered by explained variance.
///
/// Immutable after fitting. Variances use the 1/n (maximum-likelihood)
/// normalization, so the mean squared reconstruction error over the
/// training frames equals the sum of the discarded eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaCodec {
    height: usize,
    width: usize,
    mean: Array1<f64>,
    /// One component per row.
    components: Array2<f64>,
    explained_variance: Vec<f64>,
    total_variance: f64,
}

/// Fit a codec keeping the fewest components whose cumulative variance share
/// reaches `variance_target`, optionally capped at `max_components`.
pub fn fit_pca(
    frames: &[ReducedFrame],
    variance_target: f64,
    max_components: Option<usize>,
) -> Result<PcaCodec> {
    if frames.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "PCA needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    if !(variance_target > 0.0 && variance_target <= 1.0) {
        return Err(Error::invalid(format!(
            "variance target must be in (0, 1], got {variance_target}"
        )));
    }
    if max_components == Some(0) {
        return Err(Error::invalid("max_components must be at least 1"));
    }
    let (height, width) = (frames[0].height(), frames[0].width());
    if let Some(bad) = frames
        .iter()
        .find(|f| f.height() != height || f.width() != width)
    {
        return Err(Error::invalid(format!(
            "mismatched frame shapes: {}x{} vs {}x{}",
            height,
            width,
            bad.height(),
            bad.width()
        )));
    }

    let n = frames.len();
    let dim = height * width;
    let mut data = Array2::<f64>::zeros((n, dim));
    for (mut row, f) in data.axis_iter_mut(Axis(0)).zip(frames) {
        row.assign(&ndarray::ArrayView1::from(f.values()));
    }
    let mean = data.mean_axis(Axis(0)).expect("n >= 2");
    data -= &mean;

    let total_variance = data.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(total_variance > 0.0) {
        return Err(Error::InsufficientData(
            "training frames have zero variance".into(),
        ));
    }

    let (eigenvalues, basis) = if dim.min(n) <= DENSE_LIMIT {
        if dim <= n {
            covariance_eigen(&data)
        } else {
            gram_eigen(&data)
        }
    } else {
        let want = variance_target * total_variance;
        let cap = max_components.unwrap_or(usize::MAX).min(n - 1);
        truncated_eigen(&data, want, cap)
    };

    // tiny eigenvalues are rounding noise of a rank-deficient covariance
    let floor = eigenvalues.first().copied().unwrap_or(0.0) * 1e-12;
    let rank = eigenvalues.iter().take_while(|&&l| l > floor).count();
    let rank = rank.min(n - 1);

    let mut keep = rank;
    let mut cumulative = 0.0;
    for (i, &l) in eigenvalues.iter().take(rank).enumerate() {
        cumulative += l;
        if cumulative / total_variance >= variance_target - 1e-12 {
            keep = i + 1;
            break;
        }
    }
    if let Some(cap) = max_components {
        keep = keep.min(cap);
    }

    let mut components = basis.slice(ndarray::s![..keep, ..]).to_owned();
    for mut row in components.axis_iter_mut(Axis(0)) {
        let pivot = row
            .iter()
            .copied()
            .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
        if pivot < 0.0 {
            row.mapv_inplace(|v| -v);
        }
    }

    Ok(PcaCodec {
        height,
        width,
        mean,
        components,
        explained_variance: eigenvalues[..keep].to_vec(),
        total_variance,
    })
}

/// Eigenpairs of the d x d covariance, sorted descending. Basis rows are
/// eigenvectors.
fn covariance_eigen(centered: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = centered.nrows() as f64;
    let dim = centered.ncols();
    let cov = centered.t().dot(centered) / n;
    let eig = SymmetricEigen::new(DMatrix::from_fn(dim, dim, |i, j| cov[[i, j]]));
    let order = descending(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let basis = Array2::from_shape_fn((dim, dim), |(k, j)| eig.eigenvectors[(j, order[k])]);
    (values, basis)
}

/// Eigenpairs through the n x n Gram matrix when frames are fewer than
/// pixels. Components are mapped back to pixel space and re-orthonormalized.
fn gram_eigen(centered: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = centered.nrows();
    let gram = centered.dot(&centered.t()) / n as f64;
    let eig = SymmetricEigen::new(DMatrix::from_fn(n, n, |i, j| gram[[i, j]]));
    let order = descending(eig.eigenvalues.as_slice());
    let top = eig.eigenvalues[order[0]].max(0.0);
    let mut values = Vec::new();
    let mut rows: Vec<Array1<f64>> = Vec::new();
    for &i in &order {
        let l = eig.eigenvalues[i];
        if !(l > top * 1e-12) {
            break;
        }
        let u = Array1::from_shape_fn(n, |k| eig.eigenvectors[(k, i)]);
        let mut v = centered.t().dot(&u);
        for prev in &rows {
            let p = prev.dot(&v);
            v.scaled_add(-p, prev);
        }
        let norm = v.dot(&v).sqrt();
        if norm == 0.0 {
            break;
        }
        v /= norm;
        values.push(l);
        rows.push(v);
    }
    let dim = centered.ncols();
    let mut basis = Array2::zeros((rows.len(), dim));
    for (mut dst, src) in basis.axis_iter_mut(Axis(0)).zip(&rows) {
        dst.assign(src);
    }
    (values, basis)
}

/// Above this many frames and pixels the full eigendecomposition gives way
/// to [`truncated_eigen`].
const DENSE_LIMIT: usize = 1024;
const OVERSAMPLE: usize = 12;
const MAX_SWEEPS: usize = 1000;
const GROW_AFTER: usize = 4;

/// Leading eigenpairs of the covariance by block subspace iteration with
/// Rayleigh-Ritz, never forming the covariance. The block grows until the
/// leading values reach `want` variance or `cap` components; iteration stops
/// once every needed Ritz pair has residual below 1e-9 of the top value.
fn truncated_eigen(centered: &Array2<f64>, want: f64, cap: usize) -> (Vec<f64>, Array2<f64>) {
    let n = centered.nrows();
    let dim = centered.ncols();
    let limit = (n - 1).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut block = (16 + OVERSAMPLE).min(limit);
    let mut q = orthonormal_columns(&random_columns(&mut rng, dim, block));
    let mut sweeps = 0;
    loop {
        let y = centered.dot(&q);
        let z = centered.t().dot(&y) / n as f64;
        let t = q.t().dot(&z);
        let eig = SymmetricEigen::new(DMatrix::from_fn(block, block, |i, j| 0.5 * (t[[i, j]] + t[[j, i]])));
        let order = descending(eig.eigenvalues.as_slice());
        let w = Array2::from_shape_fn((block, block), |(i, k)| eig.eigenvectors[(i, order[k])]);
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let v = q.dot(&w);
        let cv = z.dot(&w);

        let mut needed = block;
        let mut reached = block == limit;
        let mut cum = 0.0;
        for (i, &l) in values.iter().enumerate() {
            cum += l;
            if cum >= want * (1.0 - 1e-12) || i + 1 >= cap {
                needed = i + 1;
                reached = true;
                break;
            }
        }
        if needed + OVERSAMPLE > block && block < limit && sweeps >= GROW_AFTER {
            let grown = (2 * block).max(needed + OVERSAMPLE).min(limit);
            if grown > limit / 2 {
                return if dim <= n { covariance_eigen(centered) } else { gram_eigen(centered) };
            }
            let extra = random_columns(&mut rng, dim, grown - block);
            q = orthonormal_columns(&ndarray::concatenate![Axis(1), cv, extra]);
            block = grown;
            sweeps = 0;
            continue;
        }
        let needed = needed.min(block);
        let tol = 1e-9 * values[0].max(f64::MIN_POSITIVE);
        let converged = reached && (0..needed).all(|k| {
            let r = &cv.column(k) - &(&v.column(k) * values[k]);
            r.dot(&r).sqrt() <= tol
        });
        sweeps += 1;
        if converged || sweeps >= MAX_SWEEPS {
            if !converged {
                log::warn!("PCA subspace iteration stopped after {MAX_SWEEPS} sweeps without converging");
            }
            let basis = Array2::from_shape_fn((needed, dim), |(k, j)| v[[j, k]]);
            return (values[..needed].to_vec(), basis);
        }
        q = orthonormal_columns(&cv);
    }
}

fn random_columns(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-1.0..1.0))
}

fn orthonormal_columns(a: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = a.dim();
    let q = DMatrix::from_fn(rows, cols, |i, j| a[[i, j]]).qr().q();
    Array2::from_shape_fn((rows, cols), |(i, j)| q[(i, j)])
}

fn descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

impl PcaCodec {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn frame_shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    /// Components as rows (`n_components x dim`).
    pub fn components(&self) -> &Array2<f64> {
        &self.components
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Fraction of training variance captured by each kept component.
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|l| l / self.total_variance)
            .collect()
    }

    /// Variance of the training frames left out by the kept components.
    pub fn discarded_variance(&self) -> f64 {
        (self.total_variance - self.explained_variance.iter().sum::<f64>()).max(0.0)
    }

    pub fn encode(&self, frame: &ReducedFrame) -> Result<UltCoeffVector> {
        if frame.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "frame has {} values, codec expects {}",
                frame.dim(),
                self.dim()
            )));
        }
        let centered = ndarray::ArrayView1::from(frame.values()).to_owned() - &self.mean;
        Ok(UltCoeffVector(self.components.dot(&centered).to_vec()))
    }

    pub fn decode(&self, coeffs: &UltCoeffVector) -> Result<ReducedFrame> {
        if coeffs.len() != self.n_components() {
            return Err(Error::invalid(format!(
                "got {} coefficients, codec has {} components",
                coeffs.len(),
                self.n_components()
            )));
        }
        let c = ndarray::ArrayView1::from(&coeffs.0[..]);
        let flat = self.components.t().dot(&c) + &self.mean;
        ReducedFrame::new(self.height, self.width, flat.to_vec())
    }

    /// Encode many flattened frames at once (one per row).
    pub fn encode_rows(&self, rows: &Array2<f64>) -> Result<Array2<f64>> {
        if rows.ncols() != self.dim() {
            return Err(Error::invalid(format!(
                "rows have width {}, codec expects {}",
                rows.ncols(),
                self.dim()
            )));
        }
        Ok((rows - &self.mean).dot(&self.components.t()))
    }

    /// Decode many coefficient rows into flattened frames.
    pub fn decode_rows(&self, coeffs: &Array2<f64>) -> Result<Array2<f64>> {
        if coeffs.ncols() != self.n_components() {
            return Err(Error::invalid(format!(
                "coefficient rows have width {}, codec has {} components",
                coeffs.ncols(),
                self.n_components()
            )));
        }
        Ok(coeffs.dot(&self.components) + &self.mean)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = io_util::create(path)?;
        w.write_all(MAGIC)?;
        w.write_u16::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(self.dim() as u32)?;
        w.write_u32::<LittleEndian>(self.n_components() as u32)?;
        io_util::write_f64s(&mut w, self.mean.iter().copied())?;
        io_util::write_f64s(&mut w, self.components.iter().copied())?;
        io_util::write_f64s(&mut w, self.explained_variance.iter().copied())?;
        // trailer: total variance and frame shape
        w.write_f64::<LittleEndian>(self.total_variance)?;
        w.write_u32::<LittleEndian>(self.height as u32)?;
        w.write_u32::<LittleEndian>(self.width as u32)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let p = path.display().to_string();
        let mut r = io_util::open(path)?;
        io_util::expect_magic(&mut r, MAGIC, &p)?;
        let trunc = |_| Error::corrupt(&p, "truncated codec file");
        let version = r.read_u16::<LittleEndian>().map_err(trunc)?;
        if version != VERSION {
            return Err(Error::corrupt(&p, format!("unsupported version {version}")));
        }
        let dim = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let n = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let mean = io_util::read_f64s(&mut r, dim).map_err(trunc)?;
        let comps = io_util::read_f64s(&mut r, n * dim).map_err(trunc)?;
        let ev = io_util::read_f64s(&mut r, n).map_err(trunc)?;
        let total_variance = r.read_f64::<LittleEndian>().map_err(trunc)?;
        let height = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let width = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        if height * width != dim {
            return Err(Error::corrupt(&p, "frame shape does not match dim"));
        }
        Ok(Self {
            height,
            width,
            mean: Array1::from(mean),
            components: Array2::from_shape_vec((n, dim), comps)
                .map_err(|e| Error::corrupt(&p, e.to_string()))?,
            explained_variance: ev,
            total_variance,
        })
    }
}
