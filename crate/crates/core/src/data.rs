//! Datasets for the three task families and their seeded generators.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{DdlError, Result};
use crate::rng::Seed;

/// Features from a K-symbol alphabet with binary labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteDataset {
    features: Vec<usize>,
    labels: Vec<u8>,
    alphabet_size: usize,
}

impl DiscreteDataset {
    pub fn new(features: Vec<usize>, labels: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(DdlError::config("alphabet size must be positive"));
        }
        if features.len() != labels.len() {
            return Err(DdlError::config(format!("{} features but {} labels", features.len(), labels.len())));
        }
        if let Some(i) = features.iter().position(|&x| x >= alphabet_size) {
            return Err(DdlError::config(format!(
                "feature {} at index {i} outside alphabet of size {alphabet_size}",
                features[i]
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(DdlError::config(format!("label at index {i} is not a bit")));
        }
        Ok(Self { features, labels, alphabet_size })
    }

    /// Labels only, every feature mapped to symbol 0.
    pub fn from_labels(labels: Vec<u8>) -> Result<Self> {
        let features = vec![0; labels.len()];
        Self::new(features, labels, 1)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.features.iter().copied().zip(self.labels.iter().copied())
    }

    /// First `m` samples.
    pub fn prefix(&self, m: usize) -> DiscreteDataset {
        let m = m.min(self.len());
        DiscreteDataset {
            features: self.features[..m].to_vec(),
            labels: self.labels[..m].to_vec(),
            alphabet_size: self.alphabet_size,
        }
    }

    /// The same labels with the features discarded (the "y independent of x" view).
    pub fn marginal(&self) -> DiscreteDataset {
        DiscreteDataset { features: vec![0; self.len()], labels: self.labels.clone(), alphabet_size: 1 }
    }

    /// Per-symbol `(ones, totals)` counts.
    pub fn counts(&self) -> (Vec<u64>, Vec<u64>) {
        let mut ones = vec![0u64; self.alphabet_size];
        let mut totals = vec![0u64; self.alphabet_size];
        for (x, y) in self.iter() {
            ones[x] += y as u64;
            totals[x] += 1;
        }
        (ones, totals)
    }
}

fn check_distribution(px: &[f64]) -> Result<()> {
    if px.is_empty() {
        return Err(DdlError::config("feature distribution is empty"));
    }
    if px.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(DdlError::config("feature distribution has a negative or non-finite entry"));
    }
    let total: f64 = px.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(DdlError::config(format!("feature distribution sums to {total}, not 1")));
    }
    Ok(())
}

/// Draws `n` iid pairs `x ~ px`, `y ~ Bernoulli(p1_given_x[x])`.
pub fn gen_bernoulli_k(px: &[f64], p1_given_x: &[f64], n: usize, seed: Seed) -> Result<DiscreteDataset> {
    check_distribution(px)?;
    if p1_given_x.len() != px.len() {
        return Err(DdlError::config(format!(
            "{} conditional probabilities for {} symbols",
            p1_given_x.len(),
            px.len()
        )));
    }
    if p1_given_x.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(DdlError::config("conditional probability outside [0, 1]"));
    }
    let k = px.len();
    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 0.0;
    for p in px {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = seed.rng();
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let x = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
        let v: f64 = rng.random();
        features.push(x);
        labels.push(u8::from(v < p1_given_x[x]));
    }
    Ok(DiscreteDataset { features, labels, alphabet_size: k })
}

/// Scalar regression pairs from the `sin(3x)` curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDataset {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    noise_variance: f64,
}

impl RegressionDataset {
    pub fn new(inputs: Vec<f64>, targets: Vec<f64>, noise_variance: f64) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(DdlError::config(format!("{} inputs but {} targets", inputs.len(), targets.len())));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(DdlError::config(format!("noise variance {noise_variance} must be positive")));
        }
        Ok(Self { inputs, targets, noise_variance })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Samples at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> RegressionDataset {
        RegressionDataset {
            inputs: indices.iter().map(|&i| self.inputs[i]).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            noise_variance: self.noise_variance,
        }
    }
}

/// The regression target curve.
pub fn sine_target(x: f64) -> f64 {
    (3.0 * x).sin()
}

/// `x ~ U[-2, 2]`, `y = sin(3x) + w`, `w ~ N(0, noise_variance)`.
pub fn gen_sine(n: usize, noise_variance: f64, seed: Seed) -> Result<RegressionDataset> {
    if !(noise_variance.is_finite() && noise_variance > 0.0) {
        return Err(DdlError::config(format!("noise variance {noise_variance} must be positive")));
    }
    let noise =
        Normal::new(0.0, noise_variance.sqrt()).map_err(|e| DdlError::config(format!("noise distribution: {e}")))?;
    let mut rng = seed.rng();
    let mut inputs = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.random_range(-2.0..=2.0);
        let w = noise.sample(&mut rng);
        inputs.push(x);
        targets.push(sine_target(x) + w);
    }
    Ok(RegressionDataset { inputs, targets, noise_variance })
}

/// Real-vector inputs with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifDataset {
    inputs: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl ClassifDataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if inputs.len() != labels.len() {
            return Err(DdlError::config(format!("{} inputs but {} labels", inputs.len(), labels.len())));
        }
        if let Some(first) = inputs.first() {
            let d = first.len();
            if let Some(i) = inputs.iter().position(|v| v.len() != d) {
                return Err(DdlError::config(format!(
                    "input {i} has dimension {} but input 0 has {d}",
                    inputs[i].len()
                )));
            }
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(DdlError::config("labels must be bits"));
        }
        Ok(Self { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Input dimension (0 for an empty set).
    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn range(&self, range: std::ops::Range<usize>) -> ClassifDataset {
        ClassifDataset { inputs: self.inputs[range.clone()].to_vec(), labels: self.labels[range].to_vec() }
    }

    pub fn select(&self, indices: &[usize]) -> ClassifDataset {
        ClassifDataset {
            inputs: indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn with_labels(&self, labels: Vec<u8>) -> Result<ClassifDataset> {
        ClassifDataset::new(self.inputs.clone(), labels)
    }
}

/// Two equiprobable Gaussian classes in `dim` dimensions with identity
/// covariance, means at `-separation/2` and `+separation/2` along the
/// diagonal direction. Smaller `separation` means more overlap.
pub fn gen_gaussian_classes(n: usize, dim: usize, separation: f64, seed: Seed) -> Result<ClassifDataset> {
    if dim == 0 {
        return Err(DdlError::config("input dimension must be positive"));
    }
    if !separation.is_finite() || separation < 0.0 {
        return Err(DdlError::config(format!("class separation {separation} must be nonnegative")));
    }
    let shift = 0.5 * separation / (dim as f64).sqrt();
    let mut rng = seed.rng();
    let mut inputs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = u8::from(rng.random::<bool>());
        let sign = if y == 1 { 1.0 } else { -1.0 };
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z + sign * shift
            })
            .collect();
        inputs.push(x);
        labels.push(y);
    }
    Ok(ClassifDataset { inputs, labels })
}

/// iid fair-coin labels, independent of `inputs`.
pub fn random_labels(n: usize, seed: Seed) -> Vec<u8> {
    let mut rng = seed.rng();
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}
