use rand_distr::{Distribution, Normal};

use crate::data::ClassifDataset;
use crate::error::{DdlError, Result};
use crate::rng::Seed;

/// Coding probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]`.
pub const PROB_CLAMP: f64 = 1e-7;

/// Weights of a `dim -> hidden -> 1` network with rectifier hidden units and
/// a logistic output.
///
/// Parameters are stored flat: `w1` (hidden x dim, row-major), `b1`, `w2`, `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    dim: usize,
    hidden: usize,
    theta: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(dim: usize, hidden: usize) -> Self {
        Self { dim, hidden, theta: vec![0.0; hidden * dim + 2 * hidden + 1] }
    }

    /// He-style initialization, biases zero.
    pub fn random(dim: usize, hidden: usize, seed: Seed) -> Self {
        let mut p = Self::zeros(dim, hidden);
        let mut rng = seed.rng();
        let first = Normal::new(0.0, (2.0 / dim as f64).sqrt()).unwrap();
        let second = Normal::new(0.0, (1.0 / hidden as f64).sqrt()).unwrap();
        let (w1, w2) = (p.w1_range(), p.w2_range());
        for v in &mut p.theta[w1] {
            *v = first.sample(&mut rng);
        }
        for v in &mut p.theta[w2] {
            *v = second.sample(&mut rng);
        }
        p
    }

    pub fn from_flat(dim: usize, hidden: usize, theta: Vec<f64>) -> Result<Self> {
        let p = Self::zeros(dim, hidden);
        if theta.len() != p.theta.len() {
            return Err(DdlError::config(format!(
                "{} parameters for a {dim}-{hidden}-1 network, expected {}",
                theta.len(),
                p.theta.len()
            )));
        }
        Ok(Self { theta, ..p })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn flat(&self) -> &[f64] {
        &self.theta
    }

    pub fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn w1_range(&self) -> std::ops::Range<usize> {
        0..self.hidden * self.dim
    }

    fn b1_range(&self) -> std::ops::Range<usize> {
        let s = self.hidden * self.dim;
        s..s + self.hidden
    }

    fn w2_range(&self) -> std::ops::Range<usize> {
        let s = self.hidden * self.dim + self.hidden;
        s..s + self.hidden
    }

    fn b2_index(&self) -> usize {
        self.theta.len() - 1
    }

    /// Whether flat index `i` is a weight (penalized) rather than a bias.
    pub fn is_weight(&self, i: usize) -> bool {
        self.w1_range().contains(&i) || self.w2_range().contains(&i)
    }

    /// Squared norm of the weights (biases excluded).
    pub fn weight_norm_sq(&self) -> f64 {
        let w1: f64 = self.theta[self.w1_range()].iter().map(|v| v * v).sum();
        let w2: f64 = self.theta[self.w2_range()].iter().map(|v| v * v).sum();
        w1 + w2
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|v| v.is_finite())
    }

    /// Pre-activation of the output unit; `hidden_out` receives the hidden
    /// pre-activations.
    pub(crate) fn logit_with(&self, x: &[f64], hidden_out: &mut [f64]) -> f64 {
        let (d, h) = (self.dim, self.hidden);
        let w1 = &self.theta[..h * d];
        let b1 = &self.theta[self.b1_range()];
        let w2 = &self.theta[self.w2_range()];
        let mut z = self.theta[self.b2_index()];
        for j in 0..h {
            let row = &w1[j * d..(j + 1) * d];
            let a = b1[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            hidden_out[j] = a;
            if a > 0.0 {
                z += w2[j] * a;
            }
        }
        z
    }

    pub(crate) fn logit(&self, x: &[f64]) -> f64 {
        let mut buf = vec![0.0; self.hidden];
        self.logit_with(x, &mut buf)
    }

    /// Clamped `P(y = 1 | x)`; no shape check.
    pub(crate) fn prob(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x)).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
    }

    /// Bits to code label `y` at input `x`.
    pub(crate) fn label_bits(&self, x: &[f64], y: u8) -> f64 {
        let p = self.prob(x);
        -(if y == 1 { p } else { 1.0 - p }).log2()
    }

    /// Mean bits per sample over `data`.
    pub fn mean_bits(&self, data: &ClassifDataset) -> f64 {
        let total: f64 = data.inputs().iter().zip(data.labels()).map(|(x, &y)| self.label_bits(x, y)).sum();
        total / data.len() as f64
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Predicted `P(y = 1 | x)`, clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]`.
pub fn mlp_forward(params: &MlpParams, x: &[f64]) -> Result<f64> {
    if x.len() != params.dim {
        return Err(DdlError::config(format!(
            "input of dimension {} for a network of dimension {}",
            x.len(),
            params.dim
        )));
    }
    Ok(params.prob(x))
}

fn check_batch(params: &MlpParams, batch: &ClassifDataset) -> Result<()> {
    if batch.is_empty() {
        return Err(DdlError::config("empty batch"));
    }
    if batch.dim() != params.dim {
        return Err(DdlError::config(format!(
            "batch of dimension {} for a network of dimension {}",
            batch.dim(),
            params.dim
        )));
    }
    Ok(())
}

/// Mean cross-entropy in nats plus `l2_lambda |w|²` (biases unpenalized).
pub fn mlp_loss(params: &MlpParams, batch: &ClassifDataset, l2_lambda: f64) -> Result<f64> {
    check_batch(params, batch)?;
    let ce: f64 = batch
        .inputs()
        .iter()
        .zip(batch.labels())
        .map(|(x, &y)| {
            let z = params.logit(x);
            softplus(z) - y as f64 * z
        })
        .sum();
    Ok(ce / batch.len() as f64 + l2_lambda * params.weight_norm_sq())
}

/// Exact gradient of [`mlp_loss`], in the flat parameter layout.
pub fn mlp_grad(params: &MlpParams, batch: &ClassifDataset, l2_lambda: f64) -> Result<Vec<f64>> {
    check_batch(params, batch)?;
    let idx: Vec<usize> = (0..batch.len()).collect();
    let mut grad = vec![0.0; params.theta.len()];
    accumulate_grad(params, batch, &idx, l2_lambda, &mut grad);
    Ok(grad)
}

/// Gradient over the samples `idx` of `data`, written into `grad`.
pub(crate) fn accumulate_grad(
    params: &MlpParams,
    data: &ClassifDataset,
    idx: &[usize],
    l2_lambda: f64,
    grad: &mut [f64],
) {
    let (d, h) = (params.dim, params.hidden);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let w2_start = params.w2_range().start;
    let b1_start = params.b1_range().start;
    let b2 = params.b2_index();
    let mut pre = vec![0.0; h];
    for &i in idx {
        let x = &data.inputs()[i];
        let z = params.logit_with(x, &mut pre);
        let dz = sigmoid(z) - data.labels()[i] as f64;
        grad[b2] += dz;
        for j in 0..h {
            if pre[j] <= 0.0 {
                continue;
            }
            grad[w2_start + j] += dz * pre[j];
            let dh = dz * params.theta[w2_start + j];
            grad[b1_start + j] += dh;
            let row = &mut grad[j * d..(j + 1) * d];
            for (g, v) in row.iter_mut().zip(x) {
                *g += dh * v;
            }
        }
    }
    let inv = 1.0 / idx.len() as f64;
    for (i, g) in grad.iter_mut().enumerate() {
        *g *= inv;
        if params.is_weight(i) {
            *g += 2.0 * l2_lambda * params.theta[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_gaussian_classes;

    #[test]
    fn zero_network_is_uninformative() {
        let p = MlpParams::zeros(3, 4);
        assert_eq!(mlp_forward(&p, &[1.0, -2.0, 0.5]).unwrap(), 0.5);
        assert!(mlp_forward(&p, &[1.0]).is_err());
    }

    #[test]
    fn saturation_hits_the_clamp() {
        let mut p = MlpParams::zeros(1, 1);
        let b2 = p.b2_index();
        p.theta[b2] = 1e6;
        assert_eq!(mlp_forward(&p, &[0.0]).unwrap(), 1.0 - PROB_CLAMP);
        p.theta[b2] = -1e6;
        assert_eq!(mlp_forward(&p, &[0.0]).unwrap(), PROB_CLAMP);
        assert!(p.label_bits(&[0.0], 1).is_finite());
    }

    fn finite_difference_check(seed: u64, lambda: f64) {
        let data = gen_gaussian_classes(12, 4, 1.5, Seed(seed)).unwrap();
        let params = MlpParams::random(4, 5, Seed(seed + 100));
        let g = mlp_grad(&params, &data, lambda).unwrap();
        let h = 1e-5;
        for i in 0..params.theta.len() {
            let mut up = params.clone();
            up.theta[i] += h;
            let mut down = params.clone();
            down.theta[i] -= h;
            let fd = (mlp_loss(&up, &data, lambda).unwrap() - mlp_loss(&down, &data, lambda).unwrap()) / (2.0 * h);
            let rel = (fd - g[i]).abs() / g[i].abs().max(fd.abs()).max(1e-6);
            assert!(rel <= 1e-4, "param {i}: analytic {} numeric {fd}", g[i]);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for s in 0..5 {
            finite_difference_check(s, 0.0);
            finite_difference_check(s, 0.05);
        }
    }

    #[test]
    fn zero_inputs_give_zero_first_layer_gradient() {
        let data = ClassifDataset::new(vec![vec![0.0; 3]; 4], vec![0, 1, 1, 0]).unwrap();
        let params = MlpParams::random(3, 4, Seed(1));
        let g = mlp_grad(&params, &data, 0.0).unwrap();
        assert!(g[params.w1_range()].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn penalty_gradient_is_linear_in_lambda() {
        let data = gen_gaussian_classes(8, 3, 1.0, Seed(2)).unwrap();
        let params = MlpParams::random(3, 4, Seed(3));
        let g0 = mlp_grad(&params, &data, 0.0).unwrap();
        let g1 = mlp_grad(&params, &data, 0.1).unwrap();
        let g2 = mlp_grad(&params, &data, 0.2).unwrap();
        for i in 0..g0.len() {
            assert!(((g2[i] - g0[i]) - 2.0 * (g1[i] - g0[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_batch_is_rejected() {
        let p = MlpParams::zeros(2, 2);
        let empty = ClassifDataset::new(vec![], vec![]).unwrap();
        assert!(mlp_grad(&p, &empty, 0.0).is_err());
        assert!(MlpParams::from_flat(2, 2, vec![0.0; 3]).is_err());
    }
}
