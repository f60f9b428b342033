use ndarray::{s, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    Tanh,
    Linear,
    Lstm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub input: usize,
    pub output: usize,
}

impl LayerSpec {
    pub fn new(kind: LayerKind, input: usize, output: usize) -> Self {
        Self {
            kind,
            input,
            output,
        }
    }
}

/// A layer's parameters. Biases are stored as `1 x n` rows so every
/// parameter is a matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Dense {
        weight: Array2<f64>,
        bias: Array2<f64>,
        tanh: bool,
    },
    /// Gate blocks are ordered input, forget, cell, output.
    Lstm {
        input_weight: Array2<f64>,
        recurrent_weight: Array2<f64>,
        bias: Array2<f64>,
    },
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn glorot<R: Rng>(rng: &mut R, rows: usize, cols: usize, fan_in: usize, fan_out: usize) -> Array2<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-limit..limit))
}

enum Cache {
    Dense {
        input: Array2<f64>,
        output: Array2<f64>,
    },
    Lstm {
        input: Array2<f64>,
        /// Post-activation gates, `T x 4h`.
        gates: Array2<f64>,
        cell: Array2<f64>,
        cell_tanh: Array2<f64>,
        hidden: Array2<f64>,
    },
}

impl Layer {
    pub fn init<R: Rng>(spec: &LayerSpec, rng: &mut R) -> Self {
        let (i, o) = (spec.input, spec.output);
        match spec.kind {
            LayerKind::Tanh | LayerKind::Linear => Layer::Dense {
                weight: glorot(rng, i, o, i, o),
                bias: Array2::zeros((1, o)),
                tanh: spec.kind == LayerKind::Tanh,
            },
            LayerKind::Lstm => {
                let mut bias = Array2::zeros((1, 4 * o));
                bias.slice_mut(s![.., o..2 * o]).fill(1.0);
                Layer::Lstm {
                    input_weight: glorot(rng, i, 4 * o, i, o),
                    recurrent_weight: glorot(rng, o, 4 * o, o, o),
                    bias,
                }
            }
        }
    }

    pub fn spec(&self) -> LayerSpec {
        match self {
            Layer::Dense { weight, tanh, .. } => LayerSpec {
                kind: if *tanh { LayerKind::Tanh } else { LayerKind::Linear },
                input: weight.nrows(),
                output: weight.ncols(),
            },
            Layer::Lstm { input_weight, recurrent_weight, .. } => LayerSpec {
                kind: LayerKind::Lstm,
                input: input_weight.nrows(),
                output: recurrent_weight.nrows(),
            },
        }
    }

    pub fn params(&self) -> Vec<&Array2<f64>> {
        match self {
            Layer::Dense { weight, bias, .. } => vec![weight, bias],
            Layer::Lstm {
                input_weight,
                recurrent_weight,
                bias,
            } => vec![input_weight, recurrent_weight, bias],
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Array2<f64>> {
        match self {
            Layer::Dense { weight, bias, .. } => vec![weight, bias],
            Layer::Lstm {
                input_weight,
                recurrent_weight,
                bias,
            } => vec![input_weight, recurrent_weight, bias],
        }
    }

    fn forward(&self, x: Array2<f64>, keep: bool) -> (Array2<f64>, Option<Cache>) {
        match self {
            Layer::Dense { weight, bias, tanh } => {
                let mut y = x.dot(weight) + bias;
                if *tanh {
                    y.mapv_inplace(f64::tanh);
                }
                let cache = keep.then(|| Cache::Dense {
                    input: x,
                    output: y.clone(),
                });
                (y, cache)
            }
            Layer::Lstm {
                input_weight,
                recurrent_weight,
                bias,
            } => {
                let t_len = x.nrows();
                let h = recurrent_weight.nrows();
                let mut gates = x.dot(input_weight) + bias;
                let mut cell = Array2::zeros((t_len, h));
                let mut cell_tanh = Array2::zeros((t_len, h));
                let mut hidden = Array2::<f64>::zeros((t_len, h));
                for t in 0..t_len {
                    if t > 0 {
                        let rec = hidden.row(t - 1).dot(recurrent_weight);
                        gates.row_mut(t).scaled_add(1.0, &rec);
                    }
                    let mut g = gates.row_mut(t);
                    for k in 0..h {
                        g[k] = sigmoid(g[k]);
                        g[h + k] = sigmoid(g[h + k]);
                        g[2 * h + k] = g[2 * h + k].tanh();
                        g[3 * h + k] = sigmoid(g[3 * h + k]);
                    }
                    for k in 0..h {
                        let prev = if t > 0 { cell[[t - 1, k]] } else { 0.0 };
                        let c = g[h + k] * prev + g[k] * g[2 * h + k];
                        let tc = c.tanh();
                        cell[[t, k]] = c;
                        cell_tanh[[t, k]] = tc;
                        hidden[[t, k]] = g[3 * h + k] * tc;
                    }
                }
                let out = hidden.clone();
                let cache = keep.then(|| Cache::Lstm {
                    input: x,
                    gates,
                    cell,
                    cell_tanh,
                    hidden,
                });
                (out, cache)
            }
        }
    }

    /// Returns the gradient w.r.t. the layer input and parameter gradients
    /// in [`Layer::params`] order.
    fn backward(&self, cache: Cache, dout: Array2<f64>) -> (Array2<f64>, Vec<Array2<f64>>) {
        match (self, cache) {
            (Layer::Dense { weight, tanh, .. }, Cache::Dense { input, output }) => {
                let mut dz = dout;
                if *tanh {
                    dz.zip_mut_with(&output, |d, &y| *d *= 1.0 - y * y);
                }
                let dw = input.t().dot(&dz);
                let db = dz.sum_axis(Axis(0)).insert_axis(Axis(0));
                let dx = dz.dot(&weight.t());
                (dx, vec![dw, db])
            }
            (
                Layer::Lstm {
                    input_weight,
                    recurrent_weight,
                    ..
                },
                Cache::Lstm {
                    input,
                    gates,
                    cell,
                    cell_tanh,
                    hidden,
                },
            ) => {
                let t_len = input.nrows();
                let h = recurrent_weight.nrows();
                let mut dz = Array2::<f64>::zeros((t_len, 4 * h));
                let mut dh_next = ndarray::Array1::<f64>::zeros(h);
                let mut dc_next = ndarray::Array1::<f64>::zeros(h);
                for t in (0..t_len).rev() {
                    let g = gates.row(t);
                    let mut row = dz.row_mut(t);
                    for k in 0..h {
                        let (i, f, c_in, o) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
                        let tc = cell_tanh[[t, k]];
                        let dh = dout[[t, k]] + dh_next[k];
                        let dc = dh * o * (1.0 - tc * tc) + dc_next[k];
                        let prev = if t > 0 { cell[[t - 1, k]] } else { 0.0 };
                        row[k] = dc * c_in * i * (1.0 - i);
                        row[h + k] = dc * prev * f * (1.0 - f);
                        row[2 * h + k] = dc * i * (1.0 - c_in * c_in);
                        row[3 * h + k] = dh * tc * o * (1.0 - o);
                        dc_next[k] = dc * f;
                    }
                    dh_next = dz.row(t).dot(&recurrent_weight.t());
                }
                let dwx = input.t().dot(&dz);
                let mut prev_hidden = Array2::zeros((t_len, h));
                if t_len > 1 {
                    prev_hidden
                        .slice_mut(s![1.., ..])
                        .assign(&hidden.slice(s![..t_len - 1, ..]));
                }
                let dwh = prev_hidden.t().dot(&dz);
                let db = dz.sum_axis(Axis(0)).insert_axis(Axis(0));
                let dx = dz.dot(&input_weight.t());
                (dx, vec![dwx, dwh, db])
            }
            _ => unreachable!("cache kind always matches its layer"),
        }
    }
}

/// A stack of layers applied to a `T x input` matrix. Dense layers act on
/// rows independently; an LSTM layer treats rows as consecutive time steps
/// starting from zero state.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for pair in layers.windows(2) {
            let (a, b) = (pair[0].spec(), pair[1].spec());
            if a.output != b.input {
                return Err(Error::invalid(format!(
                    "layer output {} does not feed next layer input {}",
                    a.output, b.input
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn init<R: Rng>(specs: &[LayerSpec], rng: &mut R) -> Result<Self> {
        Self::new(specs.iter().map(|s| Layer::init(s, rng)).collect())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(Layer::spec).collect()
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].spec().input
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].spec().output
    }

    pub fn is_recurrent(&self) -> bool {
        self.layers.iter().any(|l| matches!(l, Layer::Lstm { .. }))
    }

    pub fn params(&self) -> Vec<&Array2<f64>> {
        self.layers.iter().flat_map(Layer::params).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Array2<f64>> {
        self.layers.iter_mut().flat_map(Layer::params_mut).collect()
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = layer.forward(cur, false).0;
        }
        cur
    }

    /// Sum over frames of the squared error summed over output dimensions.
    pub fn sum_squared_error(&self, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
        let pred = self.forward(x);
        pred.iter().zip(y.iter()).map(|(p, t)| (p - t) * (p - t)).sum()
    }

    /// Loss (squared error summed over dimensions, averaged over frames) and
    /// its gradient for every parameter, in [`Network::params`] order.
    pub fn loss_and_gradients(&self, x: &Array2<f64>, y: &Array2<f64>) -> (f64, Vec<Array2<f64>>) {
        let frames = x.nrows().max(1) as f64;
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for layer in &self.layers {
            let (out, cache) = layer.forward(cur, true);
            caches.push(cache.expect("requested"));
            cur = out;
        }
        let diff = cur - y;
        let loss = diff.iter().map(|d| d * d).sum::<f64>() / frames;
        let mut grad = diff * (2.0 / frames);
        let mut grads: Vec<Vec<Array2<f64>>> = Vec::with_capacity(self.layers.len());
        for (layer, cache) in self.layers.iter().zip(caches).rev() {
            let (dx, g) = layer.backward(cache, grad);
            grads.push(g);
            grad = dx;
        }
        grads.reverse();
        (loss, grads.into_iter().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_set_two_layer_forward() {
        let l1 = Layer::Dense {
            weight: arr2(&[[0.5, -1.0], [0.25, 2.0]]),
            bias: arr2(&[[0.1, -0.2]]),
            tanh: true,
        };
        let l2 = Layer::Dense {
            weight: arr2(&[[1.5], [-0.5]]),
            bias: arr2(&[[0.3]]),
            tanh: false,
        };
        let net = Network::new(vec![l1, l2]).unwrap();
        let x = arr2(&[[1.0, 2.0], [-0.5, 0.0]]);
        let out = net.forward(&x);
        for (r, (a, b)) in [(1.0, 2.0), (-0.5, 0.0)].into_iter().enumerate() {
            let h1 = (0.5 * a + 0.25 * b + 0.1f64).tanh();
            let h2 = (-1.0 * a + 2.0 * b - 0.2f64).tanh();
            let expect = 1.5 * h1 - 0.5 * h2 + 0.3;
            assert!((out[[r, 0]] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_layers_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let specs = [
            LayerSpec::new(LayerKind::Tanh, 3, 4),
            LayerSpec::new(LayerKind::Linear, 5, 1),
        ];
        assert!(Network::init(&specs, &mut rng).is_err());
    }

    #[test]
    fn lstm_forget_bias_starts_at_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let l = Layer::init(&LayerSpec::new(LayerKind::Lstm, 2, 3), &mut rng);
        let Layer::Lstm { bias, .. } = &l else { panic!() };
        assert_eq!(bias.row(0).to_vec(), vec![0., 0., 0., 1., 1., 1., 0., 0., 0., 0., 0., 0.]);
        assert_eq!(l.spec(), LayerSpec::new(LayerKind::Lstm, 2, 3));
    }

    #[test]
    fn lstm_output_depends_on_history() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Network::init(
            &[
                LayerSpec::new(LayerKind::Lstm, 1, 4),
                LayerSpec::new(LayerKind::Linear, 4, 1),
            ],
            &mut rng,
        )
        .unwrap();
        let a = net.forward(&arr2(&[[1.0], [0.0]]));
        let b = net.forward(&arr2(&[[-1.0], [0.0]]));
        assert!((a[[1, 0]] - b[[1, 0]]).abs() > 1e-6);
    }
}
