//! Presence tests for the common amplitude, with Monte Carlo threshold
//! calibration.
//!
//! Three generalized likelihood ratios share one decision rule (alarm when
//! the statistic exceeds a calibrated threshold): the labeled benchmark
//! maximizes over the amplitude alone, the known-amplitude test maximizes
//! over pairings at two fixed amplitudes, and the joint test estimates both.
//! Thresholds come from simulated null batches because the data-dependent
//! pairing maximum has no standard null distribution.

use crate::error::{Error, Result};
use crate::estimation::{estimate, mle_theta_given_perm, recover_perm_known_theta, EstimateStrategy};
use crate::likelihood::{loglik_labeled, loglik_unlabeled};
use crate::model::{EtaVector, ModelConfig, Permutation};
use crate::sampling::{generate_eta, hypothesis_sample, ExperimentSeed, Hypothesis};
use rayon::prelude::*;

/// Which likelihood ratio a detector computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    /// Samples arrive in quantizer order; only the amplitude is profiled out.
    Labeled,
    /// Scrambled samples, amplitude known a priori.
    KnownTheta,
    /// Scrambled samples, amplitude estimated jointly with the pairing.
    UnknownTheta,
}

/// A detector plus its calibration state.
#[derive(Debug, Clone)]
pub struct DetectorSpec {
    pub kind: DetectorKind,
    /// Amplitude the known-amplitude test assumes; ignored otherwise.
    pub theta_known: Option<f64>,
    /// Target false-alarm probability in (0, 1].
    pub p_fa_target: f64,
    /// Alarm threshold once calibrated.
    pub gamma: Option<f64>,
    /// Initialization for the joint test; ignored otherwise.
    pub strategy: EstimateStrategy,
}

impl DetectorSpec {
    pub fn new(kind: DetectorKind, theta_known: Option<f64>, p_fa_target: f64) -> Result<Self> {
        if kind == DetectorKind::KnownTheta && theta_known.is_none() {
            return Err(Error::InvalidConfig(
                "known-amplitude detector needs theta_known".into(),
            ));
        }
        if !(p_fa_target > 0.0 && p_fa_target <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "false-alarm target {p_fa_target} outside (0, 1]"
            )));
        }
        Ok(DetectorSpec {
            kind,
            theta_known,
            p_fa_target,
            gamma: None,
            strategy: EstimateStrategy::Auto,
        })
    }

    pub fn with_strategy(mut self, strategy: EstimateStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// The detector's statistic on one batch of fractions.
    pub fn statistic(&self, cfg: &ModelConfig, eta: &EtaVector) -> Result<f64> {
        match self.kind {
            DetectorKind::Labeled => statistic_labeled(cfg, eta),
            DetectorKind::KnownTheta => {
                statistic_known_theta(cfg, self.theta_known.expect("validated"), eta)
            }
            DetectorKind::UnknownTheta => statistic_unknown_theta(cfg, eta, self.strategy),
        }
    }

    /// One simulated batch under the given hypothesis. The labeled detector
    /// sees samples in quantizer order; the others see scrambled batches.
    fn simulate(
        &self,
        cfg: &ModelConfig,
        theta1: f64,
        n: u64,
        hypothesis: Hypothesis,
        seed: ExperimentSeed,
    ) -> Result<EtaVector> {
        match self.kind {
            DetectorKind::Labeled => {
                let theta = match hypothesis {
                    Hypothesis::Null => 0.0,
                    Hypothesis::Alternative => theta1,
                };
                generate_eta(cfg, theta, n, &Permutation::identity(cfg.k()), seed)
            }
            _ => hypothesis_sample(cfg, theta1, n, hypothesis, seed),
        }
    }
}

/// Labeled ratio: amplitude profiled over the interval against the null
/// amplitude. Never negative; zero is feasible in the maximization.
pub fn statistic_labeled(cfg: &ModelConfig, eta: &EtaVector) -> Result<f64> {
    if eta.len() != cfg.k() {
        return Err(Error::LengthMismatch { expected: cfg.k(), got: eta.len() });
    }
    if !cfg.informative() {
        // The likelihood does not depend on the amplitude at all.
        return Ok(0.0);
    }
    let id = Permutation::identity(cfg.k());
    let theta_hat = mle_theta_given_perm(cfg, &id, eta)?;
    let ratio = loglik_labeled(cfg, theta_hat, eta) - loglik_labeled(cfg, 0.0, eta);
    Ok(ratio.max(0.0))
}

/// Known-amplitude ratio on scrambled fractions: each term re-pairs the
/// fractions optimally for its own amplitude.
pub fn statistic_known_theta(cfg: &ModelConfig, theta: f64, eta_tilde: &EtaVector) -> Result<f64> {
    let perm1 = recover_perm_known_theta(cfg, theta, eta_tilde)?;
    let perm0 = recover_perm_known_theta(cfg, 0.0, eta_tilde)?;
    let l1 = loglik_unlabeled(cfg, theta, &perm1, eta_tilde)?;
    let l0 = loglik_unlabeled(cfg, 0.0, &perm0, eta_tilde)?;
    Ok(l1 - l0)
}

/// Joint ratio on scrambled fractions: amplitude and pairing estimated
/// together, against the optimally re-paired null.
///
/// Can dip below zero when the joint solver lands in a local optimum; the
/// value is reported as computed so such failures stay visible.
pub fn statistic_unknown_theta(
    cfg: &ModelConfig,
    eta_tilde: &EtaVector,
    strategy: EstimateStrategy,
) -> Result<f64> {
    let fit = estimate(cfg, eta_tilde, strategy)?;
    let perm0 = recover_perm_known_theta(cfg, 0.0, eta_tilde)?;
    let l0 = loglik_unlabeled(cfg, 0.0, &perm0, eta_tilde)?;
    Ok(fit.loglik - l0)
}

/// Alarm threshold from a simulated null batch: the empirical upper
/// `(1 - p_fa)` quantile, taken as the order statistic with one-based rank
/// `ceil((1 - p_fa) * trials)`.
///
/// A target of 1 returns the smallest simulated statistic (always alarm);
/// targets near 0 return the largest.
pub fn calibrate_gamma(
    cfg: &ModelConfig,
    spec: &DetectorSpec,
    n: u64,
    trials: usize,
    seed: ExperimentSeed,
) -> Result<f64> {
    assert!(trials >= 1, "calibration needs at least one trial");
    let theta1 = spec.theta_known.unwrap_or(0.0);
    let mut stats = (0..trials)
        .into_par_iter()
        .map(|t| {
            let batch =
                spec.simulate(cfg, theta1, n, Hypothesis::Null, seed.substream(t as u64))?;
            spec.statistic(cfg, &batch)
        })
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_by(|a, b| a.partial_cmp(b).expect("statistics are finite"));
    // Nudge before ceil so an exact-integer product is not pushed one rank
    // up by the rounding of (1 - p_fa).
    let rank = ((1.0 - spec.p_fa_target) * trials as f64 - 1e-9).ceil() as i64;
    let rank = rank.clamp(1, trials as i64) as usize;
    Ok(stats[rank - 1])
}

/// Detection probability for one batch size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub n: u64,
    pub gamma: f64,
    pub pd: f64,
}

/// Calibrates the threshold and measures detection power at each batch
/// size. Calibration and power batches use disjoint seed substreams.
pub fn power_curve(
    cfg: &ModelConfig,
    spec: &DetectorSpec,
    theta_true: f64,
    n_grid: &[u64],
    trials: usize,
    seed: ExperimentSeed,
) -> Result<Vec<PowerPoint>> {
    assert!(trials >= 1, "power estimation needs at least one trial");
    let mut out = Vec::with_capacity(n_grid.len());
    for (grid_idx, &n) in n_grid.iter().enumerate() {
        let cal_seed = seed.substream(2 * grid_idx as u64);
        let power_seed = seed.substream(2 * grid_idx as u64 + 1);
        let gamma = calibrate_gamma(cfg, spec, n, trials, cal_seed)?;
        let alarms = (0..trials)
            .into_par_iter()
            .map(|t| {
                let batch = spec.simulate(
                    cfg,
                    theta_true,
                    n,
                    Hypothesis::Alternative,
                    power_seed.substream(t as u64),
                )?;
                Ok(usize::from(spec.statistic(cfg, &batch)? > gamma))
            })
            .sum::<Result<usize>>()?;
        out.push(PowerPoint { n, gamma, pd: alarms as f64 / trials as f64 });
    }
    Ok(out)
}
