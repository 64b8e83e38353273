//! Centralized tolerances and small numeric helpers.
//!
//! Probabilities and rewards are stored as `f64` built from rational inputs.
//! Three comparison scales are used throughout the crate:
//!
//! - [`TOL_MODEL`] for model tables (kernel rows, strategy rows, forward
//!   distributions): these are short exact products and sums, so anything
//!   beyond accumulated rounding is a real defect.
//! - [`TOL_WITNESS`] for witness tables, Bellman residuals, and dynamic
//!   programming comparisons.
//! - [`TOL_SOLVER`] for solver outputs (equilibrium gaps, payoff matching).

/// Comparison tolerance for model tables built directly from rational input.
pub const TOL_MODEL: f64 = 1e-12;

/// Comparison tolerance for witness tables and DP/Bellman identities.
pub const TOL_WITNESS: f64 = 1e-9;

/// Comparison tolerance for solver outputs.
pub const TOL_SOLVER: f64 = 1e-6;

/// `true` when `a` and `b` agree within `tol` (absolute).
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Neumaier-compensated sum; keeps normalization checks meaningful at 1e-12
/// even for tables with many entries.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `true` when `row` is a probability distribution within `tol`:
/// entries in `[-tol, 1+tol]` and total within `tol` of one.
pub fn is_distribution(row: &[f64], tol: f64) -> bool {
    if row.is_empty() {
        return false;
    }
    if row.iter().any(|&p| !(-tol..=1.0 + tol).contains(&p)) {
        return false;
    }
    close(compensated_sum(row.iter().copied()), 1.0, tol)
}

/// Largest absolute difference between two equal-length slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// FNV-1a over the raw bits of a table of floats; used to fingerprint the
/// strategy profile a distribution was computed under.
pub fn fingerprint_f64<'a>(tables: impl IntoIterator<Item = &'a f64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for v in tables {
        for byte in v.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Deterministic index of a maximal entry (first index attaining the max).
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// All indices whose value is within `tol` of the maximum.
pub fn argmax_set(values: &[f64], tol: f64) -> Vec<usize> {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= m - tol)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_is_stable_on_many_thirds() {
        let third = 1.0 / 3.0;
        let sum = compensated_sum(std::iter::repeat(third).take(3 * 1000));
        assert!(close(sum, 1000.0, 1e-12), "sum = {sum}");
    }

    #[test]
    fn distribution_check_accepts_exact_rows() {
        assert!(is_distribution(&[0.5, 0.25, 0.25], TOL_MODEL));
        assert!(is_distribution(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], TOL_MODEL));
        assert!(!is_distribution(&[0.5, 0.6], TOL_MODEL));
        assert!(!is_distribution(&[1.1, -0.1], TOL_MODEL));
        assert!(!is_distribution(&[], TOL_MODEL));
    }

    #[test]
    fn argmax_set_honors_tolerance() {
        assert_eq!(argmax_set(&[1.0, 1.0 - 1e-12, 0.5], 1e-9), vec![0, 1]);
        assert_eq!(argmax_first(&[0.1, 0.9, 0.9]), 1);
    }

    #[test]
    fn fingerprints_differ_on_different_tables() {
        let a = [0.5, 0.5];
        let b = [0.25, 0.75];
        assert_ne!(
            fingerprint_f64(a.iter()),
            fingerprint_f64(b.iter())
        );
    }
}
