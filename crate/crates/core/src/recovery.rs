//! When can the pairing be recovered exactly, and how many samples does it
//! take.
//!
//! Recovery of the pairing at a known amplitude fails only when sampling
//! noise flips the order of two adjacent success probabilities, so
//! everything here is built on the minimum gap between the sorted
//! probabilities: raw (`t_tilde`) or normalized by the binomial standard
//! deviations (`t`). The analytic curves are union bounds with Gaussian
//! tail approximations; the empirical counterpart plants a random pairing
//! and counts exact recoveries.

use crate::error::{Error, Result};
use crate::estimation::recover_perm_known_theta;
use crate::likelihood::{loglik_unlabeled, raw_success_probs};
use crate::model::{argsort_desc, ModelConfig, INV_SQRT_2PI};
use crate::sampling::{generate_eta, random_permutation, ExperimentSeed};
use rayon::prelude::*;

/// 1 / (2 sqrt(pi))
const INV_2SQRT_PI: f64 = 0.282_094_791_773_878_14;

/// Minimum-gap statistics of the sorted success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct GapStats {
    /// Smallest gap normalized by the adjacent binomial standard
    /// deviations; infinite when a gap has two exactly deterministic ends.
    pub t: f64,
    /// Smallest raw gap; zero when two probabilities tie.
    pub t_tilde: f64,
    /// Success probabilities in descending order.
    pub sorted_p: Vec<f64>,
}

/// Gap statistics at a fixed amplitude.
///
/// Probabilities are used unclamped, and the variance terms come from the
/// survival form so deep-tail gaps keep full precision.
pub fn gap_stats(cfg: &ModelConfig, theta: f64) -> GapStats {
    let k = cfg.k();
    assert!(k >= 2, "gap statistics need at least two quantizers");
    let (p, comp) = raw_success_probs(cfg, theta);
    let order = argsort_desc(&p).expect("success probabilities are finite");
    let sorted_p: Vec<f64> = order.iter().map(|&i| p[i]).collect();
    let sorted_var: Vec<f64> = order.iter().map(|&i| p[i] * comp[i]).collect();

    let mut t = f64::INFINITY;
    let mut t_tilde = f64::INFINITY;
    for i in 0..k - 1 {
        let v = sorted_p[i] - sorted_p[i + 1];
        t_tilde = t_tilde.min(v);
        let normalized = if v == 0.0 {
            0.0
        } else {
            v / (sorted_var[i] + sorted_var[i + 1]).sqrt()
        };
        t = t.min(normalized);
    }
    GapStats { t, t_tilde, sorted_p }
}

fn union_bound_raw(coeff: f64, gap: f64, exponent: f64, k: usize, n: u64) -> Result<f64> {
    assert!(k >= 2, "bound needs at least two quantizers");
    assert!(n >= 1, "bound needs at least one sample");
    // NaN gaps must land here too, so compare on the rejecting side.
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::ZeroGap);
    }
    let log_penalty =
        ((k - 1) as f64).ln() - gap.ln() - 0.5 * (n as f64).ln() - exponent;
    Ok(1.0 - coeff * log_penalty.exp())
}

/// Union-bound recovery probability from the normalized gap, before the
/// [0, 1] clamp. Negative values mean the bound is vacuous at this `n`.
pub fn recovery_prob_approx_raw(gaps: &GapStats, k: usize, n: u64) -> Result<f64> {
    union_bound_raw(INV_SQRT_2PI, gaps.t, gaps.t * gaps.t * n as f64 / 2.0, k, n)
}

/// Union-bound recovery probability from the normalized gap, clamped to
/// [0, 1] for reporting.
pub fn recovery_prob_approx(gaps: &GapStats, k: usize, n: u64) -> Result<f64> {
    Ok(recovery_prob_approx_raw(gaps, k, n)?.clamp(0.0, 1.0))
}

/// Looser bound using only the raw gap, before the clamp. Replaces the
/// per-pair variances by their worst case 1/2, which costs a constant in
/// the coefficient and halves the exponent's scale.
pub fn recovery_prob_relaxed_raw(t_tilde: f64, k: usize, n: u64) -> Result<f64> {
    union_bound_raw(INV_2SQRT_PI, t_tilde, t_tilde * t_tilde * n as f64, k, n)
}

/// Looser raw-gap bound, clamped to [0, 1].
pub fn recovery_prob_relaxed(t_tilde: f64, k: usize, n: u64) -> Result<f64> {
    Ok(recovery_prob_relaxed_raw(t_tilde, k, n)?.clamp(0.0, 1.0))
}

/// Normalized-gap constant for a linear gain profile from `l` up to `u`
/// with slope-to-noise ratio `a`: `a (1 - q0 - q1) (u - l) f_w(a u)`.
///
/// The density is evaluated at the top end, which holds the minimum gap
/// when `u > |l|`; outside that regime the value is still the top-end gap
/// constant, just not the minimizer.
pub fn ramp_ct(u: f64, l: f64, a: f64, cfg: &ModelConfig) -> f64 {
    assert!(u > l, "ramp must rise: u > l");
    assert!(a > 0.0, "slope-to-noise ratio must be positive");
    a * cfg.channel_gain() * (u - l) * cfg.noise.pdf(a * u)
}

/// Samples per quantizer that push the union bound's failure term to
/// `K^-alpha` when the normalized gap scales as `c_t / K^alpha`:
/// `ceil((1 + alpha) / c_t^2 * K^(2 alpha) * ln K)`.
pub fn required_n(c_t: f64, alpha: f64, k: usize) -> u64 {
    assert!(c_t > 0.0, "gap constant must be positive");
    assert!(k >= 2, "need at least two quantizers");
    let kf = k as f64;
    ((1.0 + alpha) / (c_t * c_t) * kf.powf(2.0 * alpha) * kf.ln()).ceil() as u64
}

/// Expected raw minimum gap when the success probabilities are i.i.d.
/// uniform order statistics: `(1 - q0 - q1) / (K^2 - 1)`.
pub fn expected_t_tilde_uniform(k: usize, q0: f64, q1: f64) -> f64 {
    assert!(k >= 2, "need at least two quantizers");
    (1.0 - q0 - q1) / ((k * k - 1) as f64)
}

/// Probability that the raw minimum gap of uniform-parent probabilities
/// lands in `[c1/K^2, c2/K^2]`, exact in `K`. Inner bases are clamped at
/// zero so large `c` values degrade to the tail value instead of
/// oscillating.
pub fn prob_t_tilde_interval(c1: f64, c2: f64, k: usize, q0: f64, q1: f64) -> f64 {
    assert!(c1 > 0.0 && c2 >= c1, "need 0 < c1 <= c2");
    assert!(k >= 2, "need at least two quantizers");
    assert!(q0 + q1 < 1.0, "interval law assumes a non-inverting channel");
    let gain = 1.0 - q0 - q1;
    let kf = k as f64;
    let base = |c: f64| (1.0 - c * (kf - 1.0) / (gain * kf * kf)).max(0.0);
    base(c1).powi(k as i32) - base(c2).powi(k as i32)
}

/// Large-K limit of [`prob_t_tilde_interval`].
pub fn prob_t_tilde_interval_large_k(c1: f64, c2: f64, q0: f64, q1: f64) -> f64 {
    assert!(c1 > 0.0 && c2 >= c1, "need 0 < c1 <= c2");
    assert!(q0 + q1 < 1.0, "interval law assumes a non-inverting channel");
    let gain = 1.0 - q0 - q1;
    (-c1 / gain).exp() - (-c2 / gain).exp()
}

fn fit_points(k_grid: &[usize], values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if k_grid.len() != values.len() {
        return Err(Error::LengthMismatch { expected: k_grid.len(), got: values.len() });
    }
    if k_grid.len() < 3 {
        return Err(Error::DegenerateFit("need at least three grid points"));
    }
    // Rejecting-side comparison so NaN values fail the fit as well.
    if values.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::DegenerateFit("gap values must be positive"));
    }
    Ok(k_grid.iter().zip(values).map(|(&k, &v)| ((k as f64).ln(), v.ln())).collect())
}

/// Least-squares fit of `ln t = ln c - alpha ln K`; returns `(alpha, c)`.
pub fn fit_alpha(k_grid: &[usize], t_values: &[f64]) -> Result<(f64, f64)> {
    let pts = fit_points(k_grid, t_values)?;
    let n = pts.len() as f64;
    let x_bar = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let y_bar = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - x_bar) * (p.0 - x_bar)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("grid holds a single distinct K"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - x_bar) * (p.1 - y_bar)).sum();
    let slope = sxy / sxx;
    Ok((-slope, (y_bar - slope * x_bar).exp()))
}

/// Constrained fit with the exponent pinned: returns the `c` minimizing
/// squared log error of `ln t = ln c - alpha ln K`.
pub fn fit_alpha_fixed(k_grid: &[usize], t_values: &[f64], alpha: f64) -> Result<f64> {
    let pts = fit_points(k_grid, t_values)?;
    let n = pts.len() as f64;
    let mean = pts.iter().map(|p| p.1 + alpha * p.0).sum::<f64>() / n;
    Ok(mean.exp())
}

/// Sample requirement rescaled for a flipping channel: the gap constant
/// shrinks by the channel gain, so the requirement grows by its square.
pub fn n_req_channel_scaling(n_req_clean: u64, q0: f64, q1: f64) -> Result<u64> {
    let gain = 1.0 - q0 - q1;
    if gain <= 0.0 {
        return Err(Error::DegenerateChannel);
    }
    Ok((n_req_clean as f64 / (gain * gain)).ceil() as u64)
}

/// Monte Carlo probability that the pairing recovered at the true
/// amplitude equals the planted one.
///
/// Success requires the full index map to match; only when two true
/// success probabilities tie exactly does likelihood equivalence count
/// instead, since the planted map is then not unique.
pub fn empirical_recovery_prob(
    cfg: &ModelConfig,
    theta: f64,
    n: u64,
    trials: usize,
    seed: ExperimentSeed,
) -> Result<f64> {
    assert!(trials >= 1, "need at least one trial");
    let (p, _) = raw_success_probs(cfg, theta);
    let mut sorted = p.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("probabilities are finite"));
    let has_ties = sorted.windows(2).any(|w| w[0] == w[1]);

    let successes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = seed.substream(trial as u64);
            let mut rng = s.rng();
            let plant = random_permutation(cfg.k(), &mut rng);
            let eta = generate_eta(cfg, theta, n, &plant, s.substream(1))?;
            let recovered = recover_perm_known_theta(cfg, theta, &eta)?;
            let hit = if recovered == plant {
                true
            } else if has_ties {
                let l_rec = loglik_unlabeled(cfg, theta, &recovered, &eta)?;
                let l_plant = loglik_unlabeled(cfg, theta, &plant, &eta)?;
                (l_rec - l_plant).abs() <= 1e-12 * l_plant.abs().max(1.0)
            } else {
                false
            };
            Ok(usize::from(hit))
        })
        .sum::<Result<usize>>()?;
    Ok(successes as f64 / trials as f64)
}
