//! Bounded scalar maximization used by the amplitude solvers.
//!
//! The likelihood in theta is smooth but can be multimodal once channel flips
//! break concavity, so refinement starts from every local maximum of a coarse
//! grid rather than from a single bracket.

/// Result of a bounded scalar maximization.
#[derive(Debug, Clone, Copy)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    /// Whether the maximum sits on an interval endpoint.
    pub at_boundary: bool,
}

const GRID_POINTS: usize = 33;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]`: a 33-point grid pass followed by
/// golden-section refinement around every grid-local maximum.
pub fn maximize_bounded(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> ScalarMax {
    assert!(lo.is_finite() && hi.is_finite() && lo < hi, "invalid interval [{lo}, {hi}]");
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..GRID_POINTS)
        .map(|i| if i == GRID_POINTS - 1 { hi } else { lo + i as f64 * step })
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut best_x = xs[0];
    let mut best_v = vs[0];
    for i in 1..GRID_POINTS {
        if vs[i] > best_v {
            best_v = vs[i];
            best_x = xs[i];
        }
    }

    for i in 0..GRID_POINTS {
        let left_ok = i == 0 || vs[i] >= vs[i - 1];
        let right_ok = i == GRID_POINTS - 1 || vs[i] >= vs[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let a = if i == 0 { xs[0] } else { xs[i - 1] };
        let b = if i == GRID_POINTS - 1 { xs[GRID_POINTS - 1] } else { xs[i + 1] };
        let (x, v) = golden_max(&f, a, b);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }

    let at_boundary = best_x == lo || best_x == hi;
    ScalarMax { x: best_x, value: best_v, at_boundary }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let tol = (b - a) * 1e-13;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisects a sign change of `grad` inside `[a, b]` down to floating-point
/// resolution. Returns `None` unless `grad(a) > 0 > grad(b)`.
pub fn bisect_gradient(grad: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Option<f64> {
    let (ga, gb) = (grad(a), grad(b));
    if !(ga > 0.0 && gb < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if grad(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}
