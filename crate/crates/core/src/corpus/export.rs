use std::io::Write;
use std::path::{Path, PathBuf};

use crate::features::FeatureMatrix;
use crate::ultra::{render_wedge, UltrasoundFrame, WedgeGeometry};
use crate::{io_util, Error, Result};

pub const MANIFEST_NAME: &str = "manifest.tsv";

/// Wedge-render every `stride`-th frame to `dir/NNNNNN.pgm` (the number is
/// the frame index) and list `frame_index TAB seconds` in the manifest.
/// Frames are taken to be `1 / rate` seconds apart.
pub fn export_video_frames(
    frames: &[UltrasoundFrame],
    rate: f64,
    geometry: &WedgeGeometry,
    dir: &Path,
    stride: usize,
) -> Result<Vec<PathBuf>> {
    if frames.is_empty() {
        return Err(Error::invalid("no frames to export"));
    }
    if stride == 0 {
        return Err(Error::invalid("stride must be at least 1"));
    }
    if !(rate > 0.0) {
        return Err(Error::invalid("frame rate must be positive"));
    }
    geometry.validate()?;
    std::fs::create_dir_all(dir)?;
    let mut manifest = io_util::create(&dir.join(MANIFEST_NAME))?;
    let mut written = Vec::new();
    for k in (0..frames.len()).step_by(stride) {
        let raster = render_wedge(&frames[k].to_grid(), geometry)?;
        let path = dir.join(format!("{k:06}.pgm"));
        io_util::write_pgm(&path, raster.width, raster.height, &raster.pixels)?;
        writeln!(manifest, "{k}\t{:.6}", k as f64 / rate)?;
        written.push(path);
    }
    manifest.flush()?;
    Ok(written)
}

/// `{1, 2, 4, ...}` (1-based) up to `width`.
pub fn default_plot_dims(width: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |d| d.checked_mul(2))
        .take_while(|&d| d <= width)
        .collect()
}

/// Write a tab-separated table for external plotting: a `time` column,
/// then for each selected dimension (1-based) the original and each named
/// prediction. Returns the dimensions used.
pub fn plot_coefficient_trajectories(
    original: &FeatureMatrix,
    predictions: &[(&str, &FeatureMatrix)],
    dims: Option<&[usize]>,
    path: &Path,
) -> Result<Vec<usize>> {
    let mut series = vec![("original", original)];
    series.extend_from_slice(predictions);
    plot_series(&series, dims, path)
}

/// Like [`plot_coefficient_trajectories`] with every series named by the
/// caller. All series must share frame count and width.
pub fn plot_series(
    series: &[(&str, &FeatureMatrix)],
    dims: Option<&[usize]>,
    path: &Path,
) -> Result<Vec<usize>> {
    let Some(&(first_name, first)) = series.first() else {
        return Err(Error::invalid("no series to plot"));
    };
    let width = first.width();
    let dims = match dims {
        Some(d) => d.to_vec(),
        None => default_plot_dims(width),
    };
    if dims.is_empty() {
        return Err(Error::invalid("no dimensions selected"));
    }
    if let Some(&bad) = dims.iter().find(|&&d| d == 0 || d > width) {
        return Err(Error::invalid(format!(
            "dimension {bad} is outside 1..={width}"
        )));
    }
    for (name, m) in &series[1..] {
        if m.width() != width || m.n_frames() != first.n_frames() {
            return Err(Error::invalid(format!(
                "series {name} is {}x{}, {first_name} is {}x{}",
                m.n_frames(),
                m.width(),
                first.n_frames(),
                width
            )));
        }
    }
    let mut w = io_util::create(path)?;
    write!(w, "time")?;
    for d in &dims {
        for (name, _) in series {
            write!(w, "\t{name}_{d}")?;
        }
    }
    writeln!(w)?;
    let shift = first.frame_shift();
    for t in 0..first.n_frames() {
        write!(w, "{:.6}", t as f64 * shift)?;
        for &d in &dims {
            for (_, m) in series {
                write!(w, "\t{}", m.frames()[[t, d - 1]])?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::StreamLayout;
    use ndarray::Array2;

    fn frames(n: usize) -> Vec<UltrasoundFrame> {
        (0..n)
            .map(|k| UltrasoundFrame::new(4, 8, vec![(k * 10) as u8; 32]).unwrap())
            .collect()
    }

    fn geometry() -> WedgeGeometry {
        WedgeGeometry {
            raster_width: 40,
            raster_height: 30,
            zero_offset: 4.0,
            ..WedgeGeometry::default()
        }
    }

    #[test]
    fn stride_three() {
        let dir = tempfile::tempdir().unwrap();
        let files = export_video_frames(&frames(12), 200.0, &geometry(), dir.path(), 3).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_stem().unwrap().to_str().unwrap().to_string())
            .collect();
        assert_eq!(names, ["000000", "000003", "000006", "000009"]);
        let manifest = std::fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap();
        let times: Vec<f64> = manifest
            .lines()
            .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
            .collect();
        for (t, k) in times.iter().zip([0, 3, 6, 9]) {
            assert!((t - k as f64 * 0.005).abs() < 1e-9);
        }
        let (w, h, _) = io_util::read_pgm(&files[1]).unwrap();
        assert_eq!((w, h), (40, 30));
    }

    #[test]
    fn stride_one_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(export_video_frames(&frames(5), 81.5, &geometry(), dir.path(), 1).unwrap().len(), 5);
        assert!(export_video_frames(&[], 81.5, &geometry(), dir.path(), 1).is_err());
        assert!(export_video_frames(&frames(2), 81.5, &geometry(), dir.path(), 0).is_err());
    }

    #[test]
    fn plot_dims() {
        assert_eq!(default_plot_dims(128), [1, 2, 4, 8, 16, 32, 64, 128]);
        assert_eq!(default_plot_dims(20), [1, 2, 4, 8, 16]);
        let m = FeatureMatrix::new(
            StreamLayout::plain("ULTPCA", 128),
            0.005,
            Array2::from_shape_fn((6, 128), |(t, j)| (t * 128 + j) as f64),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        let used = plot_coefficient_trajectories(&m, &[("fcdnn", &m)], None, &path).unwrap();
        assert_eq!(used.len(), 8);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap().split('\t').count(), 1 + 16);
        plot_coefficient_trajectories(&m, &[("p", &m)], Some(&[1]), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split('\t').collect();
            assert_eq!(cols[1], cols[2]);
        }
        assert!(matches!(
            plot_coefficient_trajectories(&m, &[], Some(&[200]), &path),
            Err(Error::InvalidArgument(_))
        ));
    }
}
