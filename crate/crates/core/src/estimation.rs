//! Joint maximum-likelihood recovery of the amplitude and the scrambling
//! permutation from unlabeled fractions.
//!
//! The pairing of fractions with quantizers enters the likelihood only
//! through the sum `sum_i eta_tilde[pi(i)] * s_i`, so for a fixed amplitude
//! the best permutation pairs sorted fractions with sorted log-odds, and for
//! a fixed permutation the amplitude reduces to a bounded scalar
//! maximization. Alternating those two exact steps climbs monotonically; for
//! thresholds affine in the gains a single reordering pass suffices.

use crate::error::{Error, Result};
use crate::likelihood::{loglik_from_probs, loglik_unlabeled, success_probs, EPS_P};
use crate::model::{argsort_desc, EtaVector, ModelConfig, Permutation};
use crate::solver::{bisect_gradient, maximize_bounded};
use nalgebra::DMatrix;

/// Iteration cap for the alternating solver.
pub const DEFAULT_MAX_ITER: usize = 100;
/// Amplitude-change threshold that stops the alternating solver.
pub const DEFAULT_EPS: f64 = 1e-7;

/// Interior solutions drive the likelihood gradient at least this low.
const GRAD_TOL: f64 = 1e-8;

/// How [`estimate`] attacks the joint maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimateStrategy {
    /// One-shot reordering when the threshold/gain geometry admits it,
    /// otherwise alternating maximization from the moment-matched roots
    /// (plus the interval endpoints when the roots coincide).
    #[default]
    Auto,
    /// One-shot reordering; fails on configurations outside its scope.
    Reorder,
    /// Alternating maximization started from both interval endpoints.
    AltMax,
    /// Alternating maximization started from the moment-matched roots.
    AltMaxGoodInit,
}

/// Which starting point produced a returned solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initializer {
    /// Solution came from the one-shot reordering solver.
    Reordering,
    /// Alternating maximization started at this amplitude.
    Start(f64),
}

/// Output of the joint solvers.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub theta_hat: f64,
    pub perm_hat: Permutation,
    /// Unlabeled log-likelihood at `(theta_hat, perm_hat)`.
    pub loglik: f64,
    pub iterations: usize,
    /// `(theta, loglik)` after each update; the likelihood column never
    /// decreases beyond rounding.
    pub trace: Vec<(f64, f64)>,
    pub initializer: Initializer,
    /// Both reordering branches scored equally, so the returned solution is
    /// one of two likelihood-equivalent answers.
    pub ambiguous: bool,
}

fn check_informative(cfg: &ModelConfig) -> Result<()> {
    if cfg.informative() {
        Ok(())
    } else {
        Err(Error::DegenerateChannel)
    }
}

fn check_len(cfg: &ModelConfig, len: usize) -> Result<()> {
    if len == cfg.k() {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: cfg.k(), got: len })
    }
}

/// Pairs the r-th largest key with the r-th largest fraction; by the
/// rearrangement inequality this maximizes the likelihood over permutations
/// whenever the log-odds are monotone in the keys. Stable in both sorts.
fn pairing_permutation(keys: &[f64], eta_tilde: &EtaVector) -> Result<Permutation> {
    let order_keys = argsort_desc(keys)?;
    let order_eta = argsort_desc(eta_tilde.values())?;
    let mut pi = vec![0usize; keys.len()];
    for (rank, &i) in order_keys.iter().enumerate() {
        pi[i] = order_eta[rank];
    }
    Permutation::new(pi)
}

/// Maximum-likelihood permutation at a known amplitude: fractions sorted
/// against the keys `(1 - q0 - q1)(h_i theta - tau_i)`, whose order matches
/// the order of the log-odds weights.
pub fn recover_perm_known_theta(
    cfg: &ModelConfig,
    theta: f64,
    eta_tilde: &EtaVector,
) -> Result<Permutation> {
    check_informative(cfg)?;
    check_len(cfg, eta_tilde.len())?;
    let gain = cfg.channel_gain();
    let keys: Vec<f64> =
        cfg.h.iter().zip(&cfg.tau).map(|(&h, &t)| gain * (h * theta - t)).collect();
    pairing_permutation(&keys, eta_tilde)
}

fn loglik_gradient(cfg: &ModelConfig, theta: f64, w: &[f64], n: u64) -> f64 {
    let probs = success_probs(cfg, theta);
    let gain = cfg.channel_gain();
    let mut acc = 0.0;
    for (i, &wi) in w.iter().enumerate().take(cfg.k()) {
        let x = (cfg.h[i] * theta - cfg.tau[i]) / cfg.sigma_w;
        let dp = gain * cfg.noise.pdf(x) * cfg.h[i] / cfg.sigma_w;
        acc += (wi - probs.p()[i]) / (probs.p()[i] * probs.comp()[i]) * dp;
    }
    n as f64 * acc
}

/// Amplitude maximum likelihood with the pairing held fixed.
///
/// Grid-seeded golden-section search, then a gradient-sign bisection that
/// pushes interior solutions to `|dl/dtheta| <= 1e-8`; boundary solutions are
/// returned as the exact interval endpoint.
pub fn mle_theta_given_perm(
    cfg: &ModelConfig,
    perm: &Permutation,
    eta_tilde: &EtaVector,
) -> Result<f64> {
    check_informative(cfg)?;
    check_len(cfg, perm.len())?;
    check_len(cfg, eta_tilde.len())?;

    let vals = eta_tilde.values();
    let w: Vec<f64> = perm.map().iter().map(|&j| vals[j]).collect();
    let n = eta_tilde.n();
    let g = |theta: f64| loglik_from_probs(&success_probs(cfg, theta), &w, n);

    let found = maximize_bounded(g, -cfg.delta, cfg.delta);
    if found.at_boundary {
        return Ok(found.x);
    }

    let grad = |theta: f64| loglik_gradient(cfg, theta, &w, n);
    if grad(found.x).abs() <= GRAD_TOL {
        return Ok(found.x);
    }
    let range = 2.0 * cfg.delta;
    let mut half_width = range * 1e-12;
    while half_width < range {
        let a = (found.x - half_width).max(-cfg.delta);
        let b = (found.x + half_width).min(cfg.delta);
        if let Some(x) = bisect_gradient(grad, a, b) {
            return Ok(x);
        }
        if a == -cfg.delta && b == cfg.delta {
            break;
        }
        half_width *= 8.0;
    }
    Ok(found.x)
}

/// Which special threshold/gain geometry applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCaseKind {
    /// All gains equal: fraction ordering is fixed by the thresholds alone.
    ConstantH,
    /// Gains vary but `c tau + d h = e 1` with `c != 0`: ordering follows
    /// the gains up to an overall sign.
    General,
    /// No affine relation; the one-shot solver does not apply.
    None,
}

/// Classification plus, when one exists, constants of the affine relation
/// `c * tau + d * h = e * 1` scaled to unit max-magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialCaseClass {
    pub kind: SpecialCaseKind,
    pub constants: Option<(f64, f64, f64)>,
}

/// Detects an affine relation between thresholds and gains by a rank test on
/// the K x 3 matrix `[tau h 1]`, with singular values below
/// `1e-9 * sigma_max` treated as zero.
pub fn classify_special_case(cfg: &ModelConfig) -> SpecialCaseClass {
    let k = cfg.k();
    assert!(k >= 2, "classification needs at least two quantizers");
    // Padding with zero rows (for K = 2) leaves singular values unchanged
    // while keeping the full 3-column V factor.
    let rows = k.max(3);
    let mut a = DMatrix::zeros(rows, 3);
    for i in 0..k {
        a[(i, 0)] = cfg.tau[i];
        a[(i, 1)] = cfg.h[i];
        a[(i, 2)] = 1.0;
    }
    let svd = a.svd(false, true);
    let sigma = &svd.singular_values;
    let (mut hi, mut lo) = (0, 0);
    for i in 1..3 {
        if sigma[i] > sigma[hi] {
            hi = i;
        }
        if sigma[i] < sigma[lo] {
            lo = i;
        }
    }
    if sigma[lo] > 1e-9 * sigma[hi] {
        return SpecialCaseClass { kind: SpecialCaseKind::None, constants: None };
    }
    let v_t = svd.v_t.as_ref().expect("V requested");
    let w = v_t.row(lo);
    let (mut c, mut d, mut e) = (w[0], w[1], -w[2]);

    let h_mean = cfg.h.iter().sum::<f64>() / k as f64;
    let h_scale = cfg.h.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
    let h_constant = cfg.h.iter().all(|&x| (x - h_mean).abs() <= 1e-9 * h_scale);
    if h_constant {
        // Report the relation in its canonical constant-gain form.
        (c, d, e) = (0.0, 1.0, h_mean);
    }
    let scale = c.abs().max(d.abs()).max(e.abs());
    if scale > 0.0 {
        c /= scale;
        d /= scale;
        e /= scale;
    }
    if c < 0.0 || (c == 0.0 && d < 0.0) {
        (c, d, e) = (-c, -d, -e);
    }
    let kind = if h_constant { SpecialCaseKind::ConstantH } else { SpecialCaseKind::General };
    SpecialCaseClass { kind, constants: Some((c, d, e)) }
}

/// One-shot estimator for the special threshold/gain geometries: reorder the
/// fractions by the known candidate orderings, solve the amplitude once per
/// branch, and keep the better branch.
///
/// With constant gains there is a single candidate ordering, by
/// `(q0 + q1 - 1) * tau`. Otherwise the ordering follows `h` up to sign;
/// both signs are solved and exact ties are reported via `ambiguous` with
/// the `+h` branch returned.
pub fn reordering_algorithm(cfg: &ModelConfig, eta_tilde: &EtaVector) -> Result<EstimationResult> {
    let class = classify_special_case(cfg);
    if class.kind == SpecialCaseKind::None {
        return Err(Error::NotSpecialCase);
    }
    check_informative(cfg)?;
    check_len(cfg, eta_tilde.len())?;

    let solve = |keys: &[f64]| -> Result<(f64, Permutation, f64)> {
        let perm = pairing_permutation(keys, eta_tilde)?;
        let theta = mle_theta_given_perm(cfg, &perm, eta_tilde)?;
        let ll = loglik_unlabeled(cfg, theta, &perm, eta_tilde)?;
        Ok((theta, perm, ll))
    };

    match class.kind {
        SpecialCaseKind::ConstantH => {
            let keys: Vec<f64> = cfg.tau.iter().map(|&t| (cfg.q0 + cfg.q1 - 1.0) * t).collect();
            let (theta, perm, ll) = solve(&keys)?;
            Ok(EstimationResult {
                theta_hat: theta,
                perm_hat: perm,
                loglik: ll,
                iterations: 1,
                trace: vec![(theta, ll)],
                initializer: Initializer::Reordering,
                ambiguous: false,
            })
        }
        SpecialCaseKind::General => {
            let up = solve(&cfg.h)?;
            let neg: Vec<f64> = cfg.h.iter().map(|&x| -x).collect();
            let down = solve(&neg)?;
            let ambiguous = (up.2 - down.2).abs() <= 1e-9 * up.2.abs().max(1.0);
            let (winner, runner_up) = if up.2 >= down.2 { (up, down) } else { (down, up) };
            Ok(EstimationResult {
                theta_hat: winner.0,
                perm_hat: winner.1,
                loglik: winner.2,
                iterations: 1,
                trace: vec![(runner_up.0, runner_up.2), (winner.0, winner.2)],
                initializer: Initializer::Reordering,
                ambiguous,
            })
        }
        SpecialCaseKind::None => unreachable!(),
    }
}

/// Moment-matched starting amplitudes.
///
/// Projects the fractions onto the range they can attain over the amplitude
/// interval, inverts the per-quantizer success-probability map, and solves
/// the resulting quadratic in theta. Both roots are clamped to the interval;
/// a negative discriminant collapses them onto the common center.
pub fn good_initial_points(cfg: &ModelConfig, eta_tilde: &EtaVector) -> Result<(f64, f64)> {
    check_informative(cfg)?;
    check_len(cfg, eta_tilde.len())?;
    let hth: f64 = cfg.h.iter().map(|&x| x * x).sum();
    if hth == 0.0 {
        return Err(Error::DegenerateShape);
    }
    let gain = cfg.channel_gain();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..cfg.k() {
        let reach = cfg.h[i].abs() * cfg.delta;
        for endpoint in [-reach, reach] {
            let p = cfg.q0 + gain * cfg.noise.cdf((endpoint - cfg.tau[i]) / cfg.sigma_w);
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }

    let mut mtm = 0.0;
    for &f in eta_tilde.values() {
        let z = ((f.clamp(lo, hi) - cfg.q0) / gain).clamp(EPS_P, 1.0 - EPS_P);
        let m = cfg.sigma_w * cfg.noise.quantile(z);
        mtm += m * m;
    }
    let ttt: f64 = cfg.tau.iter().map(|&t| t * t).sum();
    let tth: f64 = cfg.tau.iter().zip(&cfg.h).map(|(&t, &h)| t * h).sum();
    let center = tth / hth;
    let disc = (mtm - ttt) / hth + center * center;
    let root = disc.max(0.0).sqrt();
    Ok((
        (center + root).clamp(-cfg.delta, cfg.delta),
        (center - root).clamp(-cfg.delta, cfg.delta),
    ))
}

/// Alternating maximization: reorder at the current amplitude, re-solve the
/// amplitude under that pairing, and repeat until the amplitude moves by at
/// most `eps` or `max_iter` rounds have run.
///
/// Each trace entry is `(theta_t, loglik)` evaluated under the pairing that
/// produced it; both half-steps are exact maximizations, so the likelihood
/// column is nondecreasing up to rounding.
pub fn alternating_maximization(
    cfg: &ModelConfig,
    eta_tilde: &EtaVector,
    theta_init: f64,
    max_iter: usize,
    eps: f64,
) -> Result<EstimationResult> {
    check_informative(cfg)?;
    check_len(cfg, eta_tilde.len())?;
    if !(-cfg.delta..=cfg.delta).contains(&theta_init) {
        return Err(Error::ThetaOutOfBounds { theta: theta_init, delta: cfg.delta });
    }
    assert!(max_iter >= 1, "need at least one iteration");
    assert!(eps >= 0.0, "eps must be nonnegative");

    let mut theta = theta_init;
    let mut perm = recover_perm_known_theta(cfg, theta, eta_tilde)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let candidate = mle_theta_given_perm(cfg, &perm, eta_tilde)?;
        let l_candidate = loglik_unlabeled(cfg, candidate, &perm, eta_tilde)?;
        let l_incumbent = loglik_unlabeled(cfg, theta, &perm, eta_tilde)?;
        // The incumbent competes with the solver output so rounding in the
        // scalar search can never walk the likelihood downhill.
        let (next, l_next) = if l_candidate >= l_incumbent {
            (candidate, l_candidate)
        } else {
            (theta, l_incumbent)
        };
        trace.push((next, l_next));
        let converged = (next - theta).abs() <= eps;
        theta = next;
        if converged || iterations == max_iter {
            break;
        }
        perm = recover_perm_known_theta(cfg, theta, eta_tilde)?;
    }
    let perm_hat = recover_perm_known_theta(cfg, theta, eta_tilde)?;
    let loglik = loglik_unlabeled(cfg, theta, &perm_hat, eta_tilde)?;
    trace.push((theta, loglik));
    Ok(EstimationResult {
        theta_hat: theta,
        perm_hat,
        loglik,
        iterations,
        trace,
        initializer: Initializer::Start(theta_init),
        ambiguous: false,
    })
}

/// Joint estimate under the chosen strategy, with multi-start runs reduced
/// by likelihood and exact ties broken toward the smaller amplitude.
pub fn estimate(
    cfg: &ModelConfig,
    eta_tilde: &EtaVector,
    strategy: EstimateStrategy,
) -> Result<EstimationResult> {
    let run_starts = |starts: &[f64]| -> Result<EstimationResult> {
        let mut best: Option<EstimationResult> = None;
        for &start in starts {
            let run =
                alternating_maximization(cfg, eta_tilde, start, DEFAULT_MAX_ITER, DEFAULT_EPS)?;
            best = Some(match best {
                None => run,
                Some(cur) => {
                    let tie = (run.loglik - cur.loglik).abs() <= 1e-12 * cur.loglik.abs().max(1.0);
                    if (tie && run.theta_hat < cur.theta_hat)
                        || (!tie && run.loglik > cur.loglik)
                    {
                        run
                    } else {
                        cur
                    }
                }
            });
        }
        Ok(best.expect("at least one start"))
    };

    match strategy {
        EstimateStrategy::Reorder => reordering_algorithm(cfg, eta_tilde),
        EstimateStrategy::AltMax => run_starts(&[-cfg.delta, cfg.delta]),
        EstimateStrategy::AltMaxGoodInit => {
            let (a, b) = good_initial_points(cfg, eta_tilde)?;
            if a == b {
                run_starts(&[a])
            } else {
                run_starts(&[a, b])
            }
        }
        EstimateStrategy::Auto => {
            if classify_special_case(cfg).kind != SpecialCaseKind::None {
                reordering_algorithm(cfg, eta_tilde)
            } else {
                let (a, b) = good_initial_points(cfg, eta_tilde)?;
                if (a - b).abs() <= 1e-12 {
                    run_starts(&[a, -cfg.delta, cfg.delta])
                } else {
                    run_starts(&[a, b])
                }
            }
        }
    }
}

/// Detects the mirror ambiguity: when `tau = c0 h` with `|c0| < delta` and
/// the sorted gains are their own negation in reverse, every solution
/// `(theta, P)` has a likelihood-equal twin at `2 c0 - theta` with the
/// returned permutation composed on the right.
pub fn unidentifiability_check(cfg: &ModelConfig) -> Option<(f64, Permutation)> {
    let k = cfg.k();
    let scale = cfg
        .h
        .iter()
        .chain(cfg.tau.iter())
        .fold(1.0f64, |m, &x| m.max(x.abs()));
    let tol = 1e-9 * scale;

    let hth: f64 = cfg.h.iter().map(|&x| x * x).sum();
    let c0 = if hth == 0.0 {
        0.0
    } else {
        cfg.h.iter().zip(&cfg.tau).map(|(&h, &t)| h * t).sum::<f64>() / hth
    };
    if cfg.h.iter().zip(&cfg.tau).any(|(&h, &t)| (t - c0 * h).abs() > tol) {
        return None;
    }
    if c0.abs() >= cfg.delta {
        return None;
    }

    let mut asc: Vec<f64> = cfg.h.clone();
    asc.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if (0..k).any(|r| (asc[r] + asc[k - 1 - r]).abs() > tol) {
        return None;
    }

    // Ascending and descending sorting maps: original row i lands at its
    // rank, so applying the map sorts the gains.
    let desc_order = argsort_desc(&cfg.h).ok()?;
    let mut p_desc = vec![0usize; k];
    for (rank, &i) in desc_order.iter().enumerate() {
        p_desc[i] = rank;
    }
    let mut p_asc = vec![0usize; k];
    for (rank, &i) in desc_order.iter().rev().enumerate() {
        p_asc[i] = rank;
    }
    let pa = Permutation::new(p_asc).ok()?;
    let pd = Permutation::new(p_desc).ok()?;
    let map = pa.inverse().compose(&pd).ok()?;
    Some((c0, map))
}
