//! Closed-form sample-complexity lower bounds for conventional
//! strategies, used to overlay theory curves on measured budgets.
//!
//! All logarithms are natural: the derivations behind these expressions
//! use `log(1-x) >= -2.1x` and `exp` identities, which fixes ln.

use crate::{Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidSpec(format!(
            "failure probability must lie in (0, 1/2), got {delta}"
        )));
    }
    Ok(())
}

/// Experiments needed to predict |tr(O rho)| conventionally:
/// `(2^n + 1)/0.8505 * ln(1/(2 delta))`.
pub fn lb_predict_abs(n: u32, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((2f64.powi(n as i32) + 1.0) / 0.8505 * (1.0 / (2.0 * delta)).ln())
}

/// Experiments needed for the two-observable comparison task:
/// `(2^n + 1)/0.8505 * ln(2/(1 + 2 delta))`. This is the "(C, LB)" curve
/// plotted against measured conventional budgets.
pub fn lb_compare_abs(n: u32, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((2f64.powi(n as i32) + 1.0) / 0.8505 * (2.0 / (1.0 + 2.0 * delta)).ln())
}

/// Copies needed to distinguish the principal-component hypotheses
/// conventionally: `1 + sqrt(ln(10/7)/2) * 2^(n/2)`.
pub fn lb_qpca(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("qPCA bound needs n >= 2, got {n}")));
    }
    Ok(1.0 + ((10.0f64 / 7.0).ln() / 2.0).sqrt() * 2f64.powf(f64::from(n) / 2.0))
}

/// Copies needed with k qubits of quantum memory at success probability
/// p: `(2p - 1) / (2^(-(n-k)/3) (1 + sqrt(4^n/(4^n - 1))))`.
pub fn lb_bounded_memory(n: u32, k: u32, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidSpec(format!("memory size k = {k} exceeds n = {n}")));
    }
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "success probability must lie in (1/2, 1), got {p}"
        )));
    }
    let four_n = 4f64.powi(n as i32);
    let damp = 2f64.powf(-(f64::from(n) - f64::from(k)) / 3.0);
    Ok((2.0 * p - 1.0) / (damp * (1.0 + (four_n / (four_n - 1.0)).sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independently typed-out forms of the same expressions (log2-based
    // where possible) for the machine-precision identity checks.
    fn predict_oracle(n: u32, delta: f64) -> f64 {
        let copies = ((1u128 << n) + 1) as f64;
        -copies * (2.0 * delta).ln() / 0.8505
    }

    fn compare_oracle(n: u32, delta: f64) -> f64 {
        let copies = ((1u128 << n) + 1) as f64;
        copies * (2f64.ln() - (1.0 + 2.0 * delta).ln()) / 0.8505
    }

    fn qpca_oracle(n: u32) -> f64 {
        1.0 + (0.5 * (10.0f64.ln() - 7.0f64.ln())).sqrt() * (f64::from(n) * 0.5).exp2()
    }

    fn memory_oracle(n: u32, k: u32, p: f64) -> f64 {
        let four_n = (f64::from(n) * 2.0).exp2();
        (2.0 * p - 1.0) * ((f64::from(n) - f64::from(k)) / 3.0).exp2()
            / (1.0 + (four_n / (four_n - 1.0)).sqrt())
    }

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn formulas_match_independent_expressions() {
        for n in [1u32, 2, 4, 8, 12, 20, 30] {
            for delta in [0.05, 0.2, 0.3, 0.49] {
                assert_close(lb_predict_abs(n, delta).unwrap(), predict_oracle(n, delta));
                assert_close(lb_compare_abs(n, delta).unwrap(), compare_oracle(n, delta));
            }
            if n >= 2 {
                assert_close(lb_qpca(n).unwrap(), qpca_oracle(n));
                for k in [0u32, n / 2, n] {
                    for p in [0.55, 2.0 / 3.0, 0.9] {
                        assert_close(lb_bounded_memory(n, k, p).unwrap(), memory_oracle(n, k, p));
                    }
                }
            }
        }
    }

    #[test]
    fn known_values() {
        assert!((lb_predict_abs(4, 0.2).unwrap() - 18.315041083904333).abs() < 1e-9);
        assert!((lb_predict_abs(20, 0.2).unwrap() - 1.1296900490963033e6).abs() < 1e-3);
        assert!((lb_compare_abs(4, 0.3).unwrap() - 4.460247351371623).abs() < 1e-9);
        assert!((lb_qpca(2).unwrap() - 1.8446004309005914).abs() < 1e-12);
        assert!((lb_qpca(20).unwrap() - 433.4354206211028).abs() < 1e-9);
        assert!((lb_bounded_memory(20, 0, 2.0 / 3.0).unwrap() - 16.932277887656944).abs() < 1e-9);
        // k = n trivializes toward (2p-1)/2
        assert!((lb_bounded_memory(20, 20, 2.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn limits_and_monotonicity() {
        // delta -> 1/2 sends both state bounds to 0
        assert!(lb_predict_abs(6, 0.4999999).unwrap() < 1e-4);
        assert!(lb_compare_abs(6, 0.4999999).unwrap() < 1e-4);
        // monotone in n, antitone in delta
        for n in 2..12 {
            assert!(lb_compare_abs(n + 1, 0.3).unwrap() > lb_compare_abs(n, 0.3).unwrap());
            assert!(lb_qpca(n + 1).unwrap() > lb_qpca(n).unwrap());
            assert!(lb_bounded_memory(n + 1, 0, 2.0 / 3.0).unwrap() > lb_bounded_memory(n, 0, 2.0 / 3.0).unwrap());
        }
        assert!(lb_compare_abs(6, 0.2).unwrap() > lb_compare_abs(6, 0.3).unwrap());
        // memory bound grows with n - k
        assert!(lb_bounded_memory(12, 2, 2.0 / 3.0).unwrap() > lb_bounded_memory(12, 6, 2.0 / 3.0).unwrap());
    }

    #[test]
    fn domain_errors() {
        assert!(lb_predict_abs(4, 0.0).is_err());
        assert!(lb_predict_abs(4, 0.5).is_err());
        assert!(lb_compare_abs(4, -0.1).is_err());
        assert!(lb_qpca(1).is_err());
        assert!(lb_bounded_memory(4, 5, 0.6).is_err());
        assert!(lb_bounded_memory(4, 2, 0.5).is_err());
        assert!(lb_bounded_memory(4, 2, 1.0).is_err());
    }
}
