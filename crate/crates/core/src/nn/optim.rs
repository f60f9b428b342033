use ndarray::Array2;

pub trait Optimizer {
    fn step(&mut self, params: Vec<&mut Array2<f64>>, grads: &[Array2<f64>], lr: f64);
}

/// Stochastic gradient descent with classical momentum.
#[derive(Debug, Clone, Default)]
pub struct Sgd {
    momentum: f64,
    velocity: Vec<Array2<f64>>,
}

impl Sgd {
    pub fn new(momentum: f64) -> Self {
        Self {
            momentum,
            velocity: Vec::new(),
        }
    }
}

impl Optimizer for Sgd {
    fn step(&mut self, params: Vec<&mut Array2<f64>>, grads: &[Array2<f64>], lr: f64) {
        if self.velocity.is_empty() {
            self.velocity = grads.iter().map(|g| Array2::zeros(g.dim())).collect();
        }
        for ((p, g), v) in params.into_iter().zip(grads).zip(&mut self.velocity) {
            v.zip_mut_with(g, |v, &g| *v = self.momentum * *v - lr * g);
            *p += &*v;
        }
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    step: i32,
    first: Vec<Array2<f64>>,
    second: Vec<Array2<f64>>,
}

impl Adam {
    pub fn new(beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            beta1,
            beta2,
            epsilon,
            step: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }
}

impl Optimizer for Adam {
    fn step(&mut self, params: Vec<&mut Array2<f64>>, grads: &[Array2<f64>], lr: f64) {
        if self.first.is_empty() {
            self.first = grads.iter().map(|g| Array2::zeros(g.dim())).collect();
            self.second = self.first.clone();
        }
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        for (((p, g), m), v) in params
            .into_iter()
            .zip(grads)
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            m.zip_mut_with(g, |m, &g| *m = b1 * *m + (1.0 - b1) * g);
            v.zip_mut_with(g, |v, &g| *v = b2 * *v + (1.0 - b2) * g * g);
            ndarray::Zip::from(p).and(&*m).and(&*v).for_each(|p, &m, &v| {
                *p -= lr * (m / c1) / ((v / c2).sqrt() + eps);
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn plain_sgd_step() {
        let mut p = arr2(&[[1.0, 2.0]]);
        let g = arr2(&[[0.5, -1.0]]);
        Sgd::new(0.0).step(vec![&mut p], &[g], 0.1);
        assert_eq!(p, arr2(&[[0.95, 2.1]]));
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let mut p = arr2(&[[0.0, 0.0]]);
        let g = arr2(&[[3.0, -0.001]]);
        Adam::new(0.9, 0.999, 1e-8).step(vec![&mut p], &[g], 0.01);
        assert!((p[[0, 0]] + 0.01).abs() < 1e-9);
        assert!((p[[0, 1]] - 0.01).abs() < 1e-6);
    }

    #[test]
    fn momentum_accumulates() {
        let mut p = arr2(&[[0.0]]);
        let g = arr2(&[[1.0]]);
        let mut opt = Sgd::new(0.5);
        opt.step(vec![&mut p], &[g.clone()], 1.0);
        opt.step(vec![&mut p], &[g], 1.0);
        assert_eq!(p[[0, 0]], -1.0 - 1.5);
    }
}
