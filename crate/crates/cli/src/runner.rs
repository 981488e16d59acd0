//! Experiment drivers: each consumes a validated config and produces one CSV
//! table. Trials inside a grid point run in parallel; grid points and the
//! final reduction are sequential, so the bytes never depend on scheduling.

use crate::config::{ExperimentConfig, ExperimentKind, StrategyName};
use onebit_amp::detection::{power_curve, DetectorKind, DetectorSpec};
use onebit_amp::estimation::{estimate, mle_theta_given_perm};
use onebit_amp::likelihood::crlb;
use onebit_amp::model::Permutation;
use onebit_amp::recovery::{
    empirical_recovery_prob, fit_alpha, fit_alpha_fixed, gap_stats, recovery_prob_approx,
    recovery_prob_relaxed,
};
use onebit_amp::sampling::{generate_eta, random_permutation};
use rayon::prelude::*;
use std::fmt;

#[derive(Debug, Clone)]
pub enum RunError {
    /// Problems a user fixes by editing the config (exit code 2).
    Config(String),
    /// Numerical or runtime failures inside a run (exit code 3).
    Numeric(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Numeric(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<onebit_amp::Error> for RunError {
    fn from(e: onebit_amp::Error) -> Self {
        RunError::Numeric(e.to_string())
    }
}

pub struct RunOutput {
    pub csv: String,
    pub rows: usize,
    /// Fitted `(alpha, c)` from the gap-fit experiment, `None` elsewhere.
    pub fit: Option<(f64, f64)>,
}

/// 17 significant digits round-trip any f64 exactly, which is what makes
/// repeated runs byte-comparable.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    match cfg.experiment {
        ExperimentKind::Mse => run_mse(cfg),
        ExperimentKind::Detection => run_detection(cfg),
        ExperimentKind::Recovery => run_recovery(cfg),
        ExperimentKind::Gapfit => run_gap_fit(cfg),
    }
}

/// Per batch size: Monte Carlo MSE of the labeled estimator, of each
/// configured unlabeled strategy, and the information bound.
///
/// Seed layout: grid point `g`, trial `t` draw from
/// `master.substream(g).substream(t)`; within a trial the permutation comes
/// from the trial stream itself and the observations from its substream 1.
pub fn run_mse(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let k = cfg.fixed_k().map_err(RunError::Config)?;
    let model = cfg.model.resolve_fixed(k).map_err(RunError::Config)?;
    let strategies = cfg
        .strategies
        .clone()
        .unwrap_or_else(|| vec![StrategyName::Auto, StrategyName::Altmax, StrategyName::Goodinit]);
    let theta = cfg.theta_true;
    let trials = cfg.trials;
    let master = cfg.master_seed();

    let mut csv = String::from("n,mse_labeled");
    for s in &strategies {
        csv.push_str(",mse_");
        csv.push_str(s.label());
    }
    csv.push_str(",crlb\n");

    for (gi, &n) in cfg.n_grid.iter().enumerate() {
        let grid_seed = master.substream(gi as u64);
        let per_trial = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<(f64, Vec<f64>), RunError> {
                let s = grid_seed.substream(t as u64);
                let mut rng = s.rng();
                let plant = random_permutation(k, &mut rng);
                let identity = Permutation::identity(k);
                let eta = generate_eta(&model, theta, n, &identity, s.substream(1))?;
                let eta_tilde = eta.permuted(&plant)?;

                let labeled = mle_theta_given_perm(&model, &identity, &eta)?;
                let labeled_sq = (labeled - theta) * (labeled - theta);
                let mut strat_sq = Vec::with_capacity(strategies.len());
                for s in &strategies {
                    let fit = estimate(&model, &eta_tilde, s.to_strategy())?;
                    let err = fit.theta_hat - theta;
                    strat_sq.push(err * err);
                }
                Ok((labeled_sq, strat_sq))
            })
            .collect::<Result<Vec<_>, RunError>>()?;

        // Sequential reduction in trial order keeps the sums bit-stable.
        let mut mse_labeled = 0.0;
        let mut mse_strat = vec![0.0; strategies.len()];
        for (lab, strat) in &per_trial {
            mse_labeled += lab;
            for (acc, sq) in mse_strat.iter_mut().zip(strat) {
                *acc += sq;
            }
        }
        mse_labeled /= trials as f64;
        for acc in &mut mse_strat {
            *acc /= trials as f64;
        }
        let bound = crlb(&model, theta, n)?;

        csv.push_str(&n.to_string());
        csv.push(',');
        csv.push_str(&fmt_float(mse_labeled));
        for v in &mse_strat {
            csv.push(',');
            csv.push_str(&fmt_float(*v));
        }
        csv.push(',');
        csv.push_str(&fmt_float(bound));
        csv.push('\n');
    }
    Ok(RunOutput { csv, rows: cfg.n_grid.len(), fit: None })
}

/// Per batch size and detector: calibrated alarm threshold and detection
/// power. The joint detector appears once per configured strategy; the
/// labeled and known-amplitude detectors carry "-" in the strategy column.
pub fn run_detection(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let k = cfg.fixed_k().map_err(RunError::Config)?;
    let model = cfg.model.resolve_fixed(k).map_err(RunError::Config)?;
    let p_fa = cfg.p_fa.unwrap_or(0.05);
    let theta = cfg.theta_true;
    let master = cfg.master_seed();

    let strategies = cfg.strategies.clone().unwrap_or_else(|| vec![StrategyName::Auto]);
    let mut detectors: Vec<(&'static str, String, DetectorSpec)> = vec![
        ("labeled", "-".into(), DetectorSpec::new(DetectorKind::Labeled, None, p_fa)?),
        (
            "known-theta",
            "-".into(),
            DetectorSpec::new(DetectorKind::KnownTheta, Some(theta), p_fa)?,
        ),
    ];
    for s in &strategies {
        detectors.push((
            "unknown-theta",
            s.label().into(),
            DetectorSpec::new(DetectorKind::UnknownTheta, None, p_fa)?
                .with_strategy(s.to_strategy()),
        ));
    }

    let mut csv = String::from("n,detector,strategy,gamma,pd\n");
    let mut rows = 0;
    for (di, (name, strat, spec)) in detectors.iter().enumerate() {
        // Detectors get disjoint seed streams; the offset keeps them clear
        // of any grid-indexed substreams.
        let points = power_curve(
            &model,
            spec,
            theta,
            &cfg.n_grid,
            cfg.trials,
            master.substream(1000 + di as u64),
        )?;
        for pt in points {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                pt.n,
                name,
                strat,
                fmt_float(pt.gamma),
                fmt_float(pt.pd)
            ));
            rows += 1;
        }
    }
    Ok(RunOutput { csv, rows, fit: None })
}

/// Empirical recovery probability next to both analytic curves, sweeping
/// the quantizer count when `k_grid` has several entries (at the first
/// batch size), otherwise sweeping batch sizes at a fixed count.
pub fn run_recovery(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let theta = cfg.theta_true;
    let master = cfg.master_seed();
    let sweep: Vec<(usize, u64)> = if cfg.k_grid.len() > 1 {
        let n = cfg.n_grid[0];
        cfg.k_grid.iter().map(|&k| (k, n)).collect()
    } else {
        let k = match cfg.k_grid.first() {
            Some(&k) => k,
            None => cfg.fixed_k().map_err(RunError::Config)?,
        };
        cfg.n_grid.iter().map(|&n| (k, n)).collect()
    };

    let mut csv = String::from("k,n,empirical,pr_kn,pr_kn_relaxed\n");
    for (i, &(k, n)) in sweep.iter().enumerate() {
        let model = cfg.model.resolve_fixed(k).map_err(RunError::Config)?;
        let gaps = gap_stats(&model, theta);
        let pr = recovery_prob_approx(&gaps, k, n)?;
        let pr_relaxed = recovery_prob_relaxed(gaps.t_tilde, k, n)?;
        let empirical =
            empirical_recovery_prob(&model, theta, n, cfg.trials, master.substream(i as u64))?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            k,
            n,
            fmt_float(empirical),
            fmt_float(pr),
            fmt_float(pr_relaxed)
        ));
    }
    Ok(RunOutput { csv, rows: sweep.len(), fit: None })
}

/// Monte Carlo gap-statistic means per quantizer count plus a power-law fit
/// `t/sqrt(2) ~ c / K^alpha`.
///
/// The regression runs on the raw-gap scale `t/sqrt(2)` because that is the
/// scale the sample-size requirement consumes; fitting `t` directly would
/// report a constant sqrt(2) larger. Randomized shapes are redrawn every
/// trial from the master seed, so their embedded seeds are ignored here.
pub fn run_gap_fit(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let theta = cfg.theta_true;
    let trials = cfg.trials;
    let master = cfg.master_seed();

    let mut t_means = Vec::with_capacity(cfg.k_grid.len());
    let mut t_tilde_means = Vec::with_capacity(cfg.k_grid.len());
    for (ki, &k) in cfg.k_grid.iter().enumerate() {
        let grid_seed = master.substream(ki as u64);
        let draws = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<(f64, f64), RunError> {
                let s = grid_seed.substream(t as u64);
                let mut rng = s.rng();
                let model = cfg.model.resolve_random(k, &mut rng).map_err(RunError::Config)?;
                let g = gap_stats(&model, theta);
                Ok((g.t, g.t_tilde))
            })
            .collect::<Result<Vec<_>, RunError>>()?;
        let mut t_sum = 0.0;
        let mut tt_sum = 0.0;
        for &(t, tt) in &draws {
            t_sum += t;
            tt_sum += tt;
        }
        t_means.push(t_sum / trials as f64);
        t_tilde_means.push(tt_sum / trials as f64);
    }

    let scaled: Vec<f64> = t_means.iter().map(|&t| t / std::f64::consts::SQRT_2).collect();
    let (alpha, c) = match cfg.fixed_alpha {
        Some(alpha) => (alpha, fit_alpha_fixed(&cfg.k_grid, &scaled, alpha)?),
        None => fit_alpha(&cfg.k_grid, &scaled)?,
    };

    let mut csv = String::from("k,t_mean,t_tilde_mean,alpha_fit,c_fit\n");
    for (i, &k) in cfg.k_grid.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            k,
            fmt_float(t_means[i]),
            fmt_float(t_tilde_means[i]),
            fmt_float(alpha),
            fmt_float(c)
        ));
    }
    Ok(RunOutput { csv, rows: cfg.k_grid.len(), fit: Some((alpha, c)) })
}
