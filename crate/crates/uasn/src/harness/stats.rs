//! Small sample statistics for experiment aggregation.

/// `None` on an empty sample.
pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation (n - 1 denominator); needs two points.
pub fn sample_stddev(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

pub fn standard_error(xs: &[f64]) -> Option<f64> {
    Some(sample_stddev(xs)? / (xs.len() as f64).sqrt())
}

/// Paired comparison bookkeeping for a sign test: wins for `a`, wins for
/// `b`, and ties. A pair within `tie_rel_tol` of each other (relative to
/// the larger magnitude) counts as a tie and drops out of the test.
pub fn paired_sign_counts(a: &[f64], b: &[f64], tie_rel_tol: f64) -> (usize, usize, usize) {
    debug_assert_eq!(a.len(), b.len());
    let mut wins_a = 0;
    let mut wins_b = 0;
    let mut ties = 0;
    for (&x, &y) in a.iter().zip(b) {
        let scale = x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
        if (x - y).abs() <= tie_rel_tol * scale {
            ties += 1;
        } else if x > y {
            wins_a += 1;
        } else {
            wins_b += 1;
        }
    }
    (wins_a, wins_b, ties)
}

/// One-sided sign test: the probability of seeing at least `wins` successes
/// in `trials` fair coin flips. Small values reject "no difference" in
/// favor of the winner. Exact binomial tail, fine for trials up to ~1000.
pub fn sign_test_p_greater(wins: usize, trials: usize) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    if wins > trials {
        return 0.0;
    }
    // Sum C(trials, j) for j in wins..=trials via the ratio recurrence,
    // then scale by 2^-trials once.
    let n = trials as f64;
    let mut coeff = 1.0f64;
    let mut tail = 0.0f64;
    for j in 0..=trials {
        if j >= wins {
            tail += coeff;
        }
        coeff *= (n - j as f64) / (j as f64 + 1.0);
    }
    (tail * 0.5f64.powi(trials as i32)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stddev_hand_checked() {
        assert_eq!(mean(&[]), None);
        assert_eq!(mean(&[2.0, 4.0]), Some(3.0));
        assert_eq!(sample_stddev(&[5.0]), None);
        // Sample variance of {1, 3} is 2.
        let s = sample_stddev(&[1.0, 3.0]).unwrap();
        assert!((s - 2.0f64.sqrt()).abs() < 1e-15);
        let se = standard_error(&[1.0, 3.0]).unwrap();
        assert!((se - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sign_counts_respect_tie_band() {
        let a = [10.0, 5.0, 1.0, 2.0];
        let b = [9.0, 5.0 + 1e-12, 3.0, 2.0 - 1e-12];
        let (wa, wb, t) = paired_sign_counts(&a, &b, 1e-9);
        assert_eq!((wa, wb, t), (1, 1, 2));
    }

    #[test]
    fn binomial_tail_exact_values() {
        // All five wins out of five: 1/32.
        assert!((sign_test_p_greater(5, 5) - 1.0 / 32.0).abs() < 1e-15);
        // At least three of four: (4 + 1)/16.
        assert!((sign_test_p_greater(3, 4) - 5.0 / 16.0).abs() < 1e-15);
        assert_eq!(sign_test_p_greater(0, 7), 1.0);
        assert_eq!(sign_test_p_greater(8, 7), 0.0);
        assert_eq!(sign_test_p_greater(3, 0), 1.0);
        // Symmetry: P(X >= k) + P(X >= n-k+1) = 1 for a fair coin.
        let n = 33;
        for k in 0..=n {
            let p = sign_test_p_greater(k, n) + sign_test_p_greater(n - k + 1, n);
            assert!((p - 1.0).abs() < 1e-12, "k = {k}");
        }
    }
}
