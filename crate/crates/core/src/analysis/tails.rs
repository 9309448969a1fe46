//! Tail bounds used as reference values for empirical frequencies.

use crate::error::{CmabError, Result};

/// Hoeffding: `P(|Y - n mu| >= delta) <= 2 exp(-2 delta^2 / n)` for `n`
/// i.i.d. draws supported on `[0, 1]`.
pub fn hoeffding_tail(n: u64, delta: f64) -> Result<f64> {
    if n == 0 || !(delta >= 0.0) {
        return Err(CmabError::InvalidParameter(format!(
            "hoeffding needs n >= 1 and delta >= 0 (n = {n}, delta = {delta})"
        )));
    }
    Ok(2.0 * (-2.0 * delta * delta / n as f64).exp())
}

/// Multiplicative Chernoff: `P(Y <= (1 - delta) n mu) <= exp(-delta^2 n mu / 2)`.
pub fn chernoff_tail(n: u64, mu: f64, delta: f64) -> Result<f64> {
    if n == 0 || !(0.0..=1.0).contains(&mu) || !(0.0..1.0).contains(&delta) {
        return Err(CmabError::InvalidParameter(format!(
            "chernoff needs n >= 1, mu in [0, 1], delta in [0, 1) (n = {n}, mu = {mu}, delta = {delta})"
        )));
    }
    Ok((-delta * delta * n as f64 * mu / 2.0).exp())
}

/// Bernstein: for independent zero-mean `|X_i| <= M`,
/// `P(|sum X_i| > t) <= exp(-(t^2 / 2) / (sum E[X_i^2] + M t / 3))`.
pub fn bernstein_tail(n: u64, bound: f64, variance_sum: f64, t: f64) -> Result<f64> {
    if n == 0 || !(bound > 0.0) || !(variance_sum >= 0.0) || !(t > 0.0) {
        return Err(CmabError::InvalidParameter(format!(
            "bernstein needs n >= 1, M > 0, variance sum >= 0, t > 0 (n = {n}, M = {bound}, v = {variance_sum}, t = {t})"
        )));
    }
    Ok((-(t * t / 2.0) / (variance_sum + bound * t / 3.0)).exp())
}
