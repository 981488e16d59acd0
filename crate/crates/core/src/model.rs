//! Observation model for unlabeled one-bit measurements.
//!
//! A scalar amplitude `theta` is observed through K binary quantizers: sample
//! j of quantizer i is `Q_i(h_i * theta + w_ij)`, thresholded at `tau_i`, and
//! the bit then passes a memoryless flipping channel with crossover
//! probabilities `(q0, q1)`. Per-quantizer fractions of ones are collected in
//! an [`EtaVector`]; an unknown [`Permutation`] scrambles which fraction came
//! from which quantizer.

use crate::error::{Error, Result};
use statrs::function::erf;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standardized (zero-mean, unit-variance) noise families.
///
/// The estimators only touch noise through `pdf`, `cdf`, `cdf_comp`, and
/// `quantile`, so adding a family is a matter of extending this enum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseDistribution {
    #[default]
    Gaussian,
    Laplace,
}

impl NoiseDistribution {
    /// Density at `x`.
    pub fn pdf(self, x: f64) -> f64 {
        match self {
            Self::Gaussian => INV_SQRT_2PI * (-0.5 * x * x).exp(),
            // Unit-variance Laplace has scale 1/sqrt(2).
            Self::Laplace => 0.5 * SQRT_2 * (-SQRT_2 * x.abs()).exp(),
        }
    }

    /// Distribution function `F(x)`.
    ///
    /// The Gaussian branch goes through libm's erfc, which is accurate to a
    /// couple of ulps; rational approximations that are only good to ~1e-11
    /// would put a visible noise floor under every likelihood value.
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Self::Gaussian => 0.5 * libm::erfc(-x / SQRT_2),
            Self::Laplace => {
                if x < 0.0 {
                    0.5 * (SQRT_2 * x).exp()
                } else {
                    1.0 - 0.5 * (-SQRT_2 * x).exp()
                }
            }
        }
    }

    /// Survival function `1 - F(x)`, computed without cancellation so the
    /// upper tail keeps full relative precision.
    pub fn cdf_comp(self, x: f64) -> f64 {
        match self {
            Self::Gaussian => 0.5 * libm::erfc(x / SQRT_2),
            Self::Laplace => NoiseDistribution::Laplace.cdf(-x),
        }
    }

    /// Quantile `F^{-1}(u)` for `u` in (0, 1).
    pub fn quantile(self, u: f64) -> f64 {
        match self {
            Self::Gaussian => {
                let mut x = -SQRT_2 * erf::erfc_inv(2.0 * u);
                // Two Newton corrections push the round trip F(F^{-1}(u)) = u
                // to within 1e-12; skipped in the far tails where the density
                // underflows and the seed is already adequate.
                for _ in 0..2 {
                    let f = self.pdf(x);
                    if f < 1e-280 {
                        break;
                    }
                    let err = if u <= 0.5 {
                        self.cdf(x) - u
                    } else {
                        (1.0 - u) - self.cdf_comp(x)
                    };
                    x -= err / f;
                }
                x
            }
            Self::Laplace => {
                if u < 0.5 {
                    (2.0 * u).ln() / SQRT_2
                } else {
                    -(2.0 * (1.0 - u)).ln() / SQRT_2
                }
            }
        }
    }

    /// Whether the density is log-concave. Both shipped families are, which
    /// makes the labeled likelihood concave in theta when q0 = q1 = 0.
    pub fn log_concave(self) -> bool {
        true
    }
}

/// Full parameterization of the observation model.
///
/// `h` and `tau` pair up elementwise: quantizer i applies gain `h[i]` and
/// threshold `tau[i]`. `sigma_w` scales the standardized noise, and the
/// amplitude is constrained to `[-delta, delta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub h: Vec<f64>,
    pub tau: Vec<f64>,
    pub sigma_w: f64,
    pub q0: f64,
    pub q1: f64,
    pub delta: f64,
    pub noise: NoiseDistribution,
}

impl ModelConfig {
    pub fn new(
        h: Vec<f64>,
        tau: Vec<f64>,
        sigma_w: f64,
        q0: f64,
        q1: f64,
        delta: f64,
        noise: NoiseDistribution,
    ) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidConfig("h must be non-empty".into()));
        }
        if h.len() != tau.len() {
            return Err(Error::LengthMismatch {
                expected: h.len(),
                got: tau.len(),
            });
        }
        if !h.iter().chain(tau.iter()).all(|x| x.is_finite()) {
            return Err(Error::InvalidConfig("h and tau must be finite".into()));
        }
        if !(sigma_w.is_finite() && sigma_w > 0.0) {
            return Err(Error::InvalidConfig(format!("sigma_w = {sigma_w} must be positive")));
        }
        if !((0.0..=1.0).contains(&q0) && (0.0..=1.0).contains(&q1)) {
            return Err(Error::InvalidConfig(format!("(q0, q1) = ({q0}, {q1}) outside [0, 1]")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidConfig(format!("delta = {delta} must be positive")));
        }
        Ok(Self { h, tau, sigma_w, q0, q1, delta, noise })
    }

    /// Number of quantizers K.
    pub fn k(&self) -> usize {
        self.h.len()
    }

    /// A flipped channel carries information about its input unless
    /// q0 + q1 = 1, where output and input are independent.
    pub fn informative(&self) -> bool {
        self.q0 + self.q1 != 1.0
    }

    /// 1 - q0 - q1: the channel factor multiplying every noise-CDF term.
    pub fn channel_gain(&self) -> f64 {
        1.0 - self.q0 - self.q1
    }
}

/// Row scrambling of the observation matrix, stored as an index map:
/// row i of the original lands at row `pi[i]` of the scrambled output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pi: Vec<usize>,
}

impl Permutation {
    /// Validates that `pi` is a bijection on `0..pi.len()`.
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let k = pi.len();
        let mut seen = vec![false; k];
        for &j in &pi {
            if j >= k || seen[j] {
                return Err(Error::NotABijection(pi.clone(), k));
            }
            seen[j] = true;
        }
        Ok(Self { pi })
    }

    pub fn identity(k: usize) -> Self {
        Self { pi: (0..k).collect() }
    }

    /// The stable descending argsort of `keys`: entry r of the returned map
    /// is the original index holding the r-th largest key, ties broken by
    /// ascending original index.
    pub fn sorting_desc(keys: &[f64]) -> Result<Self> {
        Ok(Self { pi: argsort_desc(keys)? })
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// The underlying index map.
    pub fn map(&self) -> &[usize] {
        &self.pi
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Scrambles `v`: output position `pi[i]` receives `v[i]`.
    pub fn apply<T: Clone>(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.pi.len() {
            return Err(Error::LengthMismatch { expected: self.pi.len(), got: v.len() });
        }
        let mut out: Vec<T> = v.to_vec();
        for (i, &j) in self.pi.iter().enumerate() {
            out[j] = v[i].clone();
        }
        Ok(out)
    }

    /// The map with `self.apply(other.apply(v)) == self.compose(other).apply(v)`,
    /// matching the matrix product of the two scrambling matrices.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if other.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(Permutation { pi: other.pi.iter().map(|&j| self.pi[j]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.pi.len()];
        for (i, &j) in self.pi.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { pi: inv }
    }
}

/// Stable descending argsort; rejects NaN keys since they admit no order.
pub(crate) fn argsort_desc(keys: &[f64]) -> Result<Vec<usize>> {
    if let Some(i) = keys.iter().position(|x| x.is_nan()) {
        return Err(Error::InvalidKey(i));
    }
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap());
    Ok(idx)
}

/// Per-quantizer fractions of ones out of `n` samples each.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaVector {
    eta: Vec<f64>,
    n: u64,
}

impl EtaVector {
    pub fn new(eta: Vec<f64>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("sample count n must be positive".into()));
        }
        if !eta.iter().all(|x| (0.0..=1.0).contains(x)) {
            return Err(Error::InvalidConfig("fractions must lie in [0, 1]".into()));
        }
        Ok(Self { eta, n })
    }

    pub fn values(&self) -> &[f64] {
        &self.eta
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// Same fractions presented in a different row order.
    pub fn permuted(&self, p: &Permutation) -> Result<EtaVector> {
        Ok(EtaVector { eta: p.apply(&self.eta)?, n: self.n })
    }
}
