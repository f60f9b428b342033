use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;

use super::network::{Layer, LayerKind, Network};
use super::train::TrainReport;
use crate::features::{FeatureMatrix, NormStats, Segment, StreamLayout};
use crate::{io_util, Error, Result};

const MAGIC: &[u8; 4] = b"NNET";
const VERSION: u16 = 1;

/// A trained network together with the normalization it was trained under.
/// Predictions are returned in the original (denormalized) target space.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    network: Network,
    input_norm: NormStats,
    output_norm: NormStats,
    output_layout: StreamLayout,
    report: TrainReport,
}

impl NetworkModel {
    pub fn new(
        network: Network,
        input_norm: NormStats,
        output_norm: NormStats,
        output_layout: StreamLayout,
        report: TrainReport,
    ) -> Result<Self> {
        if input_norm.width() != network.input_width() {
            return Err(Error::invalid(format!(
                "input normalization width {} does not match network input {}",
                input_norm.width(),
                network.input_width()
            )));
        }
        let out = network.output_width();
        if output_norm.width() != out || output_layout.total() != out {
            return Err(Error::invalid(format!(
                "output normalization/layout width ({}, {}) does not match network output {out}",
                output_norm.width(),
                output_layout.total()
            )));
        }
        Ok(Self {
            network,
            input_norm,
            output_norm,
            output_layout,
            report,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn input_norm(&self) -> &NormStats {
        &self.input_norm
    }

    pub fn output_norm(&self) -> &NormStats {
        &self.output_norm
    }

    pub fn output_layout(&self) -> &StreamLayout {
        &self.output_layout
    }

    pub fn report(&self) -> &TrainReport {
        &self.report
    }

    pub fn set_output_layout(&mut self, layout: StreamLayout) -> Result<()> {
        if layout.total() != self.network.output_width() {
            return Err(Error::invalid(format!(
                "layout width {} does not match network output {}",
                layout.total(),
                self.network.output_width()
            )));
        }
        self.output_layout = layout;
        Ok(())
    }

    pub fn input_width(&self) -> usize {
        self.network.input_width()
    }

    pub fn output_width(&self) -> usize {
        self.network.output_width()
    }

    pub fn predict_array(&self, inputs: &Array2<f64>) -> Result<Array2<f64>> {
        if inputs.ncols() != self.input_width() {
            return Err(Error::invalid(format!(
                "input width {} does not match model input {}",
                inputs.ncols(),
                self.input_width()
            )));
        }
        if inputs.nrows() == 0 {
            return Ok(Array2::zeros((0, self.output_width())));
        }
        let y = self.network.forward(&self.input_norm.apply(inputs)?);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("network produced non-finite output".into()));
        }
        self.output_norm.invert(&y)
    }

    pub fn predict(&self, inputs: &FeatureMatrix) -> Result<FeatureMatrix> {
        let y = self.predict_array(inputs.frames())?;
        FeatureMatrix::new(self.output_layout.clone(), inputs.frame_shift(), y)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = io_util::create(path)?;
        w.write_all(MAGIC)?;
        w.write_u16::<LittleEndian>(VERSION)?;
        let layers = self.network.layers();
        w.write_u16::<LittleEndian>(layers.len() as u16)?;
        for layer in layers {
            let spec = layer.spec();
            w.write_u8(match spec.kind {
                LayerKind::Tanh => 0,
                LayerKind::Linear => 1,
                LayerKind::Lstm => 2,
            })?;
            w.write_u32::<LittleEndian>(spec.input as u32)?;
            w.write_u32::<LittleEndian>(spec.output as u32)?;
            for p in layer.params() {
                io_util::write_f64s(&mut w, p.iter().copied())?;
            }
        }
        self.input_norm.write_to(&mut w)?;
        self.output_norm.write_to(&mut w)?;
        let segs = self.output_layout.segments();
        w.write_u16::<LittleEndian>(segs.len() as u16)?;
        for seg in segs {
            io_util::write_str(&mut w, &seg.name)?;
            w.write_u32::<LittleEndian>(seg.width as u32)?;
            w.write_u8(u8::from(seg.deltas))?;
        }
        let report = serde_json::to_vec(&self.report).map_err(|e| Error::Numerical(e.to_string()))?;
        w.write_u32::<LittleEndian>(report.len() as u32)?;
        w.write_all(&report)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let p = path.display().to_string();
        let mut r = io_util::open(path)?;
        io_util::expect_magic(&mut r, MAGIC, &p)?;
        let trunc = |_| Error::corrupt(&p, "truncated model file");
        let version = r.read_u16::<LittleEndian>().map_err(trunc)?;
        if version != VERSION {
            return Err(Error::corrupt(&p, format!("unsupported version {version}")));
        }
        let n_layers = r.read_u16::<LittleEndian>().map_err(trunc)?;
        let mut layers = Vec::with_capacity(n_layers as usize);
        for _ in 0..n_layers {
            let kind = r.read_u8().map_err(trunc)?;
            let i = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
            let o = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
            let mut mat = |rows: usize, cols: usize| -> Result<Array2<f64>> {
                let v = io_util::read_f64s(&mut r, rows * cols).map_err(trunc)?;
                Ok(Array2::from_shape_vec((rows, cols), v).expect("sized"))
            };
            layers.push(match kind {
                0 | 1 => Layer::Dense {
                    weight: mat(i, o)?,
                    bias: mat(1, o)?,
                    tanh: kind == 0,
                },
                2 => Layer::Lstm {
                    input_weight: mat(i, 4 * o)?,
                    recurrent_weight: mat(o, 4 * o)?,
                    bias: mat(1, 4 * o)?,
                },
                k => return Err(Error::corrupt(&p, format!("unknown layer kind {k}"))),
            });
        }
        let network = Network::new(layers).map_err(|e| Error::corrupt(&p, e.to_string()))?;
        let input_norm = NormStats::read_from(&mut r).map_err(trunc)?;
        let output_norm = NormStats::read_from(&mut r).map_err(trunc)?;
        let n_segs = r.read_u16::<LittleEndian>().map_err(trunc)?;
        let mut segs = Vec::with_capacity(n_segs as usize);
        for _ in 0..n_segs {
            let name = io_util::read_str(&mut r).map_err(trunc)?;
            let width = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
            let deltas = r.read_u8().map_err(trunc)? != 0;
            segs.push(Segment { name, width, deltas });
        }
        let layout = StreamLayout::new(segs).map_err(|e| Error::corrupt(&p, e.to_string()))?;
        let len = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(trunc)?;
        let report = serde_json::from_slice(&buf).map_err(|e| Error::corrupt(&p, e.to_string()))?;
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::corrupt(&p, "trailing bytes after model"));
        }
        Self::new(network, input_norm, output_norm, layout, report)
            .map_err(|e| Error::corrupt(&p, e.to_string()))
    }
}
