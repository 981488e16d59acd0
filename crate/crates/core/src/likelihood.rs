//! Likelihood of observation fractions under the one-bit model.
//!
//! Each quantizer's sample count is Binomial(N, p_i) with success probability
//! `p_i = q0 + (1 - q0 - q1) F_w((h_i theta - tau_i) / sigma_w)`. The labeled
//! log-likelihood sums the binomial terms; the unlabeled variant reads the
//! fractions through a candidate permutation. Fisher information and its
//! inverse quantify the best attainable estimator variance.

use crate::error::{Error, Result};
use crate::model::{EtaVector, ModelConfig, Permutation};

/// Probabilities are clamped into `[EPS_P, 1 - EPS_P]` before any logarithm,
/// keeping likelihoods finite even when a tail underflows.
pub const EPS_P: f64 = 1e-12;

/// Per-quantizer success probabilities at a fixed amplitude.
///
/// The complement of each probability is carried separately: it is computed
/// from the survival function of the noise, not as `1 - p`, so both tails
/// keep full precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    p: Vec<f64>,
    comp: Vec<f64>,
}

impl ProbVector {
    /// Clamped success probabilities.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Clamped failure probabilities `1 - p_i`.
    pub fn comp(&self) -> &[f64] {
        &self.comp
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Success and failure probabilities before clamping. Exact endpoints (0, 1)
/// only occur through degenerate channels such as q0 = 1; the sampler wants
/// those exact, while likelihoods go through the clamped [`ProbVector`].
pub(crate) fn raw_success_probs(cfg: &ModelConfig, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let gain = cfg.channel_gain();
    let k = cfg.k();
    let mut p = Vec::with_capacity(k);
    let mut comp = Vec::with_capacity(k);
    for i in 0..k {
        let x = (cfg.h[i] * theta - cfg.tau[i]) / cfg.sigma_w;
        p.push(cfg.q0 + gain * cfg.noise.cdf(x));
        comp.push(cfg.q1 + gain * cfg.noise.cdf_comp(x));
    }
    (p, comp)
}

/// Success probabilities `p_i = q0 + (1 - q0 - q1) F_w((h_i theta - tau_i) / sigma_w)`.
pub fn success_probs(cfg: &ModelConfig, theta: f64) -> ProbVector {
    let (mut p, mut comp) = raw_success_probs(cfg, theta);
    for x in p.iter_mut().chain(comp.iter_mut()) {
        *x = x.clamp(EPS_P, 1.0 - EPS_P);
    }
    ProbVector { p, comp }
}

/// Log-likelihood of labeled fractions: `N * sum_i [eta_i ln p_i + (1 - eta_i) ln(1 - p_i)]`.
///
/// Panics if `eta` and the model disagree on K.
pub fn loglik_labeled(cfg: &ModelConfig, theta: f64, eta: &EtaVector) -> f64 {
    let probs = success_probs(cfg, theta);
    loglik_from_probs(&probs, eta.values(), eta.n())
}

pub(crate) fn loglik_from_probs(probs: &ProbVector, eta: &[f64], n: u64) -> f64 {
    assert_eq!(probs.len(), eta.len(), "eta length must match K");
    let mut acc = 0.0;
    for (i, &e) in eta.iter().enumerate() {
        acc += e * probs.p[i].ln() + (1.0 - e) * probs.comp[i].ln();
    }
    n as f64 * acc
}

/// Log-likelihood of scrambled fractions under a candidate permutation:
/// quantizer i reads the fraction at scrambled position `perm.map()[i]`.
pub fn loglik_unlabeled(
    cfg: &ModelConfig,
    theta: f64,
    perm: &Permutation,
    eta_tilde: &EtaVector,
) -> Result<f64> {
    if perm.len() != cfg.k() || eta_tilde.len() != cfg.k() {
        return Err(Error::LengthMismatch {
            expected: cfg.k(),
            got: if perm.len() != cfg.k() { perm.len() } else { eta_tilde.len() },
        });
    }
    let probs = success_probs(cfg, theta);
    let vals = eta_tilde.values();
    let mut acc = 0.0;
    for (i, &j) in perm.map().iter().enumerate() {
        acc += vals[j] * probs.p[i].ln() + (1.0 - vals[j]) * probs.comp[i].ln();
    }
    Ok(eta_tilde.n() as f64 * acc)
}

/// Per-quantizer log-odds `s_i = ln(p_i / (1 - p_i))`.
///
/// The unlabeled log-likelihood decomposes as
/// `N * sum_i eta_tilde[pi(i)] s_i + N * sum_i ln(1 - p_i)`, so only the
/// pairing of fractions with these weights depends on the permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct SWeights {
    pub s: Vec<f64>,
}

pub fn s_weights(cfg: &ModelConfig, theta: f64) -> SWeights {
    let probs = success_probs(cfg, theta);
    let s = probs
        .p
        .iter()
        .zip(&probs.comp)
        .map(|(&p, &c)| p.ln() - c.ln())
        .collect();
    SWeights { s }
}

/// Fisher information about the amplitude carried by `n` samples per
/// quantizer:
/// `I = n (1-q0-q1)^2 / sigma_w^2 * sum_i h_i^2 f_w(x_i)^2 / (p_i (1 - p_i))`.
pub fn fisher_information(cfg: &ModelConfig, theta: f64, n: u64) -> Result<f64> {
    if !cfg.informative() {
        return Err(Error::DegenerateChannel);
    }
    let gain = cfg.channel_gain();
    let probs = success_probs(cfg, theta);
    let mut acc = 0.0;
    for i in 0..cfg.k() {
        let x = (cfg.h[i] * theta - cfg.tau[i]) / cfg.sigma_w;
        let f = cfg.noise.pdf(x);
        acc += cfg.h[i] * cfg.h[i] * f * f / (probs.p[i] * probs.comp[i]);
    }
    Ok(n as f64 * gain * gain / (cfg.sigma_w * cfg.sigma_w) * acc)
}

/// Cramer-Rao lower bound `1 / I(theta)` on unbiased estimator variance.
pub fn crlb(cfg: &ModelConfig, theta: f64, n: u64) -> Result<f64> {
    let info = fisher_information(cfg, theta, n)?;
    if info <= 1e-300 {
        return Err(Error::ZeroInformation);
    }
    Ok(1.0 / info)
}
