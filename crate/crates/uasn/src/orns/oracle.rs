//! Exhaustive barycentric-grid search for relay placement.
//!
//! Enumerates every lattice point of the simplex with denominator `1/step`,
//! applies the exact feasibility predicate shared with the descent solver,
//! and keeps the best objective. Exponential in the number of anchors, so
//! it exists to certify the solver on small hulls, not to replace it.

use crate::error::{Error, NodeId, Result};
use crate::model::{Deployment, EnergyModel, RateArray};
use crate::orns::solver::{Instance, Placement, PlacementSettings, SolveStatus};

/// Most grid points an oracle call may enumerate.
pub const GRID_POINT_CAP: u128 = 20_000_000;

/// Number of compositions of `k` into `n` parts: C(k + n - 1, n - 1).
pub fn grid_point_count(n: usize, k: usize) -> u128 {
    let mut num: u128 = 1;
    for i in 0..(n - 1) {
        num = num.saturating_mul((k + n - 1 - i) as u128);
        num /= (i + 1) as u128;
        if num > GRID_POINT_CAP.saturating_mul(1000) {
            return u128::MAX;
        }
    }
    num
}

/// Visits every barycentric grid point with denominator `k` in a fixed
/// enumeration order. The buffer passed to `f` is reused between calls.
pub(crate) fn for_each_grid_point<F: FnMut(&[f64])>(n: usize, k: usize, mut f: F) {
    debug_assert!(n > 0 && k > 0);
    let mut counts = vec![0usize; n];
    counts[0] = k;
    let mut w = vec![0.0; n];
    let kf = k as f64;
    loop {
        for (wi, &ci) in w.iter_mut().zip(counts.iter()) {
            *wi = ci as f64 / kf;
        }
        f(&w);
        if counts[n - 1] == k {
            break;
        }
        let i = (0..n - 1).position(|i| counts[i] > 0).expect("non-final state");
        let carry = counts[i] - 1;
        counts[i] = 0;
        counts[i + 1] += 1;
        counts[0] = carry;
    }
}

/// Best feasible placement on the grid, or an infeasibility error when no
/// lattice point passes.
pub fn grid_oracle(
    c: NodeId,
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
    settings: &PlacementSettings,
    step: f64,
) -> Result<Placement> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain(format!(
            "grid step must lie in (0, 1], got {step}"
        )));
    }
    let inst = Instance::new(c, rate, deployment, model, settings)?;
    let n = inst.dims();
    let k = (1.0 / step).round().max(1.0) as usize;
    let points = grid_point_count(n, k);
    if points > GRID_POINT_CAP {
        return Err(Error::GridTooLarge {
            points,
            cap: GRID_POINT_CAP,
        });
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for_each_grid_point(n, k, |w| {
        let e = inst.eval(w);
        if e.feasible {
            let d_c = e.dists[e.dists.len() - 1];
            if best.as_ref().map_or(true, |(_, b)| d_c < *b) {
                best = Some((w.to_vec(), d_c));
            }
        }
    });
    let Some((w, _)) = best else {
        return Err(Error::Infeasible(format!(
            "no grid point admits a relay that outlives node {c}"
        )));
    };
    Ok(inst.realize(w, SolveStatus::Converged))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_match_combinatorics() {
        assert_eq!(grid_point_count(2, 4), 5);
        assert_eq!(grid_point_count(3, 2), 6);
        assert_eq!(grid_point_count(4, 50), 23_426);
    }

    #[test]
    fn enumeration_visits_each_point_once() {
        let mut seen = std::collections::HashSet::new();
        let mut count = 0usize;
        for_each_grid_point(3, 4, |w| {
            count += 1;
            let key: Vec<u64> = w.iter().map(|&x| (x * 4.0).round() as u64).collect();
            assert_eq!(key.iter().sum::<u64>(), 4);
            assert!(seen.insert(key), "duplicate grid point {w:?}");
        });
        assert_eq!(count as u128, grid_point_count(3, 4));
    }

    #[test]
    fn singleton_grid_is_the_whole_mass() {
        let mut pts = Vec::new();
        for_each_grid_point(1, 7, |w| pts.push(w.to_vec()));
        assert_eq!(pts, vec![vec![1.0]]);
    }
}
