//! Small numeric building blocks shared by the placement solvers.

/// Euclidean projection onto the probability simplex
/// { w : w_i >= 0, sum w_i = 1 } by the sort-and-threshold rule.
pub fn project_to_simplex(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n > 0);
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    for w in v.iter_mut() {
        *w = (*w - theta).max(0.0);
    }
}

/// Golden-section minimization of a unimodal `f` on [a, b].
///
/// Returns the midpoint of the final bracket and its value. On functions
/// that are not strictly unimodal the result is one local minimizer, which
/// is all the placement baselines need.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_iters: usize,
) -> (f64, f64) {
    debug_assert!(b >= a);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iters {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    // Keep the best point actually evaluated.
    if f1 <= fm && f1 <= f2 {
        (x1, f1)
    } else if f2 <= fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}
