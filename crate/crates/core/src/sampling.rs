//! Seeded Monte Carlo generation of observation fractions.
//!
//! Every stochastic routine in the crate draws from a ChaCha stream addressed
//! by an [`ExperimentSeed`]: a master seed plus a stream id. Parallel trials
//! get disjoint substreams, so results are reproducible regardless of thread
//! scheduling.

use crate::error::{Error, Result};
use crate::likelihood::raw_success_probs;
use crate::model::{EtaVector, ModelConfig, NoiseDistribution, Permutation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

/// Address of one random stream: `(seed, stream_id)`.
///
/// Identical addresses always replay identical draws. Derived addresses from
/// [`ExperimentSeed::substream`] are deterministic, so a trial keeps its
/// stream no matter which worker thread runs it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentSeed {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl ExperimentSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Child address for e.g. a trial index or a pipeline phase. Mixing both
    /// fields through splitmix keeps sibling substreams well separated.
    pub fn substream(&self, salt: u64) -> ExperimentSeed {
        ExperimentSeed {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(salt)),
        }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Uniform draw from the open interval (0, 1).
fn unit_open<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// One standardized noise sample.
fn noise_draw<R: Rng>(noise: NoiseDistribution, rng: &mut R) -> f64 {
    match noise {
        NoiseDistribution::Gaussian => StandardNormal.sample(rng),
        _ => noise.quantile(unit_open(rng)),
    }
}

/// Uniformly random permutation by Fisher-Yates.
pub fn random_permutation<R: Rng>(k: usize, rng: &mut R) -> Permutation {
    let mut pi: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        pi.swap(i, j);
    }
    Permutation::new(pi).expect("shuffle of identity is a bijection")
}

pub(crate) fn eta_binomial<R: Rng>(cfg: &ModelConfig, theta: f64, n: u64, rng: &mut R) -> Vec<f64> {
    let (p, _) = raw_success_probs(cfg, theta);
    p.iter()
        .map(|&pi| {
            let count = Binomial::new(n, pi.clamp(0.0, 1.0))
                .expect("probability in [0, 1]")
                .sample(rng);
            count as f64 / n as f64
        })
        .collect()
}

pub(crate) fn eta_per_sample<R: Rng>(cfg: &ModelConfig, theta: f64, n: u64, rng: &mut R) -> Vec<f64> {
    let mut eta = Vec::with_capacity(cfg.k());
    for i in 0..cfg.k() {
        let mut count = 0u64;
        for _ in 0..n {
            let w = cfg.sigma_w * noise_draw(cfg.noise, rng);
            let bit = cfg.h[i] * theta + w > cfg.tau[i];
            let flipped = if bit {
                rng.random::<f64>() >= cfg.q1
            } else {
                rng.random::<f64>() < cfg.q0
            };
            count += u64::from(flipped);
        }
        eta.push(count as f64 / n as f64);
    }
    eta
}

/// Scrambled fractions of ones for `n` samples per quantizer, drawing each
/// count directly from Binomial(n, p_i).
///
/// This is the default path; [`generate_eta_per_sample`] simulates the full
/// chain and agrees with it in distribution, not draw for draw.
pub fn generate_eta(
    cfg: &ModelConfig,
    theta: f64,
    n: u64,
    perm: &Permutation,
    seed: ExperimentSeed,
) -> Result<EtaVector> {
    if perm.len() != cfg.k() {
        return Err(Error::LengthMismatch { expected: cfg.k(), got: perm.len() });
    }
    let mut rng = seed.rng();
    let eta = eta_binomial(cfg, theta, n, &mut rng);
    EtaVector::new(perm.apply(&eta)?, n)
}

/// Scrambled fractions simulated sample by sample: noise draw, threshold,
/// channel flip, then averaging. Slower than [`generate_eta`] but exercises
/// the channel itself.
pub fn generate_eta_per_sample(
    cfg: &ModelConfig,
    theta: f64,
    n: u64,
    perm: &Permutation,
    seed: ExperimentSeed,
) -> Result<EtaVector> {
    if perm.len() != cfg.k() {
        return Err(Error::LengthMismatch { expected: cfg.k(), got: perm.len() });
    }
    let mut rng = seed.rng();
    let eta = eta_per_sample(cfg, theta, n, &mut rng);
    EtaVector::new(perm.apply(&eta)?, n)
}

/// Which hypothesis a detection trial simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Amplitude absent: theta = 0.
    Null,
    /// Amplitude present at the configured value.
    Alternative,
}

/// One detection trial: fractions at theta = 0 (null) or `theta1`
/// (alternative), scrambled by a fresh uniformly random permutation.
pub fn hypothesis_sample(
    cfg: &ModelConfig,
    theta1: f64,
    n: u64,
    hypothesis: Hypothesis,
    seed: ExperimentSeed,
) -> Result<EtaVector> {
    let theta = match hypothesis {
        Hypothesis::Null => 0.0,
        Hypothesis::Alternative => theta1,
    };
    let mut rng = seed.rng();
    let eta = eta_binomial(cfg, theta, n, &mut rng);
    let perm = random_permutation(cfg.k(), &mut rng);
    EtaVector::new(perm.apply(&eta)?, n)
}
