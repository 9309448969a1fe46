//! Regret-bound evaluators. Every evaluator returns a [`BoundReport`] whose
//! value is the sum of its itemized terms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::gap::{ClusterProfile, GapProfile};
use super::quadrature::integrate;
use super::zeta::zeta;
use crate::environments::Smoothness;
use crate::error::{CmabError, Result};

/// Relative tolerance used when an integral has no closed form.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerm {
    pub label: String,
    pub index: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub horizon: f64,
    pub value: f64,
    pub terms: Vec<BoundTerm>,
    pub smoothness: Option<String>,
    pub parameters: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(name: &str, n: f64) -> Self {
        Self {
            name: name.to_string(),
            horizon: n,
            value: 0.0,
            terms: Vec::new(),
            smoothness: None,
            parameters: BTreeMap::new(),
        }
    }

    fn push(&mut self, label: &str, index: Option<usize>, value: f64) {
        self.terms.push(BoundTerm {
            label: label.to_string(),
            index,
            value,
        });
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    fn finish(mut self) -> Result<Self> {
        self.value = self.terms.iter().map(|t| t.value).sum();
        if !self.value.is_finite() || self.value < 0.0 {
            return Err(CmabError::InvalidParameter(format!(
                "{} evaluated to {}",
                self.name, self.value
            )));
        }
        Ok(self)
    }

    /// Sum of the terms carrying `label`.
    pub fn term(&self, label: &str) -> f64 {
        self.terms.iter().filter(|t| t.label == label).map(|t| t.value).sum()
    }
}

/// How `integral ell_n(x, p) dx` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integration {
    /// Closed form for power-law `f`, quadrature otherwise.
    Auto,
    Quadrature,
}

fn check_horizon(n: f64) -> Result<f64> {
    if n >= 2.0 && n.is_finite() {
        Ok(n.ln())
    } else {
        Err(CmabError::InvalidParameter(format!(
            "horizon must be at least 2, got {n}"
        )))
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 1.0 {
        Ok(())
    } else {
        Err(CmabError::InvalidParameter(format!("c must exceed 1, got {c}")))
    }
}

/// `ell_n(delta, 1) = 6 ln n / f^-1(delta)^2`;
/// `ell_n(delta, p) = max(12 ln n / (f^-1(delta)^2 p), 24 ln n / p)` for `p < 1`.
pub fn sampling_threshold(delta: f64, p: f64, n: f64, f: &Smoothness) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(CmabError::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(CmabError::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    let ln_n = check_horizon(n)?;
    Ok(threshold(delta, p, ln_n, f))
}

fn threshold(delta: f64, p: f64, ln_n: f64, f: &Smoothness) -> f64 {
    let inv = f.inverse(delta);
    if p >= 1.0 {
        6.0 * ln_n / (inv * inv)
    } else {
        (12.0 * ln_n / (inv * inv * p)).max(24.0 * ln_n / p)
    }
}

/// Point where the two branches of `ell_n(., p < 1)` meet: `f^-1(x)^2 = 1/2`.
fn kink(f: &Smoothness) -> f64 {
    f.eval(std::f64::consts::FRAC_1_SQRT_2)
}

/// `integral_a^b ell_n(x, p) dx`.
fn threshold_integral(a: f64, b: f64, p: f64, ln_n: f64, f: &Smoothness, route: Integration) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let pieces: Vec<(f64, f64)> = if p < 1.0 {
        let x = kink(f);
        if a < x && x < b {
            vec![(a, x), (x, b)]
        } else {
            vec![(a, b)]
        }
    } else {
        vec![(a, b)]
    };
    let mut total = 0.0;
    for (lo, hi) in pieces {
        total += match (route, f.power_form()) {
            (Integration::Auto, Some((gamma, omega))) => closed_piece(lo, hi, p, ln_n, gamma, omega, kink(f)),
            _ => integrate(|x| threshold(x, p, ln_n, f), lo, hi, QUADRATURE_TOLERANCE)?,
        };
    }
    Ok(total)
}

/// One side of the kink for `f(x) = gamma x^omega`, where
/// `1 / f^-1(x)^2 = gamma^(2/omega) x^(-2/omega)`.
fn closed_piece(a: f64, b: f64, p: f64, ln_n: f64, gamma: f64, omega: f64, kink: f64) -> f64 {
    let q = 1.0 - 2.0 / omega;
    let power = gamma.powf(2.0 / omega) * (b.powf(q) - a.powf(q)) / q;
    if p >= 1.0 {
        6.0 * ln_n * power
    } else if b <= kink {
        12.0 * ln_n / p * power
    } else {
        24.0 * ln_n / p * (b - a)
    }
}

/// Distribution-dependent bound for CUCB with an `(alpha, beta)` oracle:
/// `sum_{K_i > 0} (ell(dmin_i, p_i) dmin_i + integral_{dmin_i}^{dmax_i} ell(x, p_i) dx)
///  + ((2 + [p* < 1]) pi^2 / 6 + 1) m dmax`.
pub fn theorem1_bound(profile: &GapProfile, f: &Smoothness, n: f64) -> Result<BoundReport> {
    theorem1_bound_with(profile, f, n, Integration::Auto)
}

pub fn theorem1_bound_with(profile: &GapProfile, f: &Smoothness, n: f64, route: Integration) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let mut report = BoundReport::new("theorem1", n);
    for (i, arm) in profile.contributing_arms() {
        let p = arm.trigger_min.ok_or(CmabError::UntriggerableArm(i))?;
        let head = threshold(arm.delta_min, p, ln_n, f) * arm.delta_min;
        let tail = threshold_integral(arm.delta_min, arm.delta_max, p, ln_n, f, route)?;
        report.push("arm", Some(i), head + tail);
    }
    let extra = if profile.p_star < 1.0 { 1.0 } else { 0.0 };
    let m = profile.num_arms() as f64;
    report.push(
        "constant",
        None,
        ((2.0 + extra) * PI * PI / 6.0 + 1.0) * m * profile.delta_max,
    );
    report.smoothness = Some(f.to_string());
    report
        .with_param("alpha", profile.alpha)
        .with_param("p_star", profile.p_star)
        .with_param("delta_max", profile.delta_max)
        .finish()
}

/// Distribution-independent bound for `f(x) = gamma x^omega`.
pub fn theorem2_bound(
    m: usize,
    n: f64,
    gamma: f64,
    omega: f64,
    p_star: f64,
    p: &[f64],
    delta_max: f64,
) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    if !(gamma > 0.0) || !(omega > 0.0 && omega <= 1.0) {
        return Err(CmabError::InvalidParameter(format!(
            "need gamma > 0 and omega in (0, 1], got gamma = {gamma}, omega = {omega}"
        )));
    }
    if !(p_star > 0.0 && p_star <= 1.0) {
        return Err(CmabError::InvalidParameter(format!(
            "p* must lie in (0, 1], got {p_star}"
        )));
    }
    let m_f = m as f64;
    let scale = 2.0 * gamma / (2.0 - omega) * n.powf(1.0 - omega / 2.0);
    let mut report = BoundReport::new("theorem2", n);
    if p_star >= 1.0 {
        report.push("leading", None, scale * (6.0 * m_f * ln_n).powf(omega / 2.0));
        report.push("constant", None, (PI * PI / 3.0 + 1.0) * m_f * delta_max);
    } else {
        report.push("leading", None, scale * (12.0 * m_f * ln_n / p_star).powf(omega / 2.0));
        report.push("constant", None, (PI * PI / 2.0 + 1.0) * m_f * delta_max);
        for (i, &pi) in p.iter().enumerate() {
            if !(pi > 0.0 && pi <= 1.0) {
                return Err(CmabError::InvalidParameter(format!(
                    "p_{i} must lie in (0, 1], got {pi}"
                )));
            }
            report.push("arm", Some(i), 24.0 * ln_n / pi * delta_max);
        }
    }
    report
        .with_param("gamma", gamma)
        .with_param("omega", omega)
        .with_param("p_star", p_star)
        .with_param("delta_max", delta_max)
        .finish()
}

/// [`theorem2_bound`] with `m`, `p_i`, `p*` and `dmax` read off a gap profile.
pub fn theorem2_from_profile(profile: &GapProfile, f: &Smoothness, n: f64) -> Result<BoundReport> {
    let (gamma, omega) = f.power_form().ok_or_else(|| {
        CmabError::InvalidParameter(format!("distribution-independent bound needs a power-law f, got {f}"))
    })?;
    let p: Vec<f64> = profile.arms.iter().filter_map(|a| a.trigger_min).collect();
    theorem2_bound(
        profile.num_arms(),
        n,
        gamma,
        omega,
        profile.p_star,
        &p,
        profile.delta_max,
    )
}

/// Cluster bound: `sum_{C: dmin_C > 0} (6 ln n / f^-1(dmin_C)^2 dmin_C
/// + integral 6 ln n / f^-1(x)^2 dx) + (pi^2/3 + 1) m dmax`.
pub fn clustered_bound(profile: &ClusterProfile, f: &Smoothness, n: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let mut report = BoundReport::new("clustered", n);
    for (c, cluster) in profile.clusters.iter().enumerate() {
        if cluster.k == 0 || cluster.delta_min <= 0.0 {
            continue;
        }
        let head = threshold(cluster.delta_min, 1.0, ln_n, f) * cluster.delta_min;
        let tail = threshold_integral(cluster.delta_min, cluster.delta_max, 1.0, ln_n, f, Integration::Auto)?;
        report.push("cluster", Some(c), head + tail);
    }
    report.push(
        "constant",
        None,
        (PI * PI / 3.0 + 1.0) * profile.num_arms as f64 * profile.delta_max,
    );
    report.smoothness = Some(f.to_string());
    report
        .with_param("clusters", profile.clusters.len() as f64)
        .with_param("delta_max", profile.delta_max)
        .finish()
}

/// Epsilon-greedy: `(gamma ln n + 3 zeta(c) m + gamma^3) dmax`.
pub fn epsgreedy_bound(gamma: f64, c: f64, m: usize, n: f64, delta_max: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    check_c(c)?;
    let mut report = BoundReport::new("epsgreedy", n);
    report.push("exploration", None, gamma * ln_n * delta_max);
    report.push("zeta", None, 3.0 * zeta(c)? * m as f64 * delta_max);
    report.push("cubic", None, gamma.powi(3) * delta_max);
    report
        .with_param("gamma", gamma)
        .with_param("c", c)
        .with_param("delta_max", delta_max)
        .finish()
}

/// UCB1 with radius `sqrt((c + 1) ln t / (2 T))`:
/// `2 (c + 1) sum_{gap > 0} ln n / gap + (1 + 2 zeta(c)) sum gap`.
pub fn ucb1_improved_bound(c: f64, gaps: &[f64], n: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    check_c(c)?;
    let z = zeta(c)?;
    let mut report = BoundReport::new("ucb1_improved", n);
    for (i, &gap) in gaps.iter().enumerate() {
        if gap > 0.0 {
            report.push("arm", Some(i), 2.0 * (c + 1.0) * ln_n / gap);
        }
    }
    report.push("constant", None, (1.0 + 2.0 * z) * gaps.iter().sum::<f64>());
    report.with_param("c", c).finish()
}

/// Classical MAB: `sum_{gap > 0} 6 ln n / gap + (pi^2/3 + 1) m dmax`.
pub fn classical_bound(gaps: &[f64], n: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let mut report = BoundReport::new("classical", n);
    for (i, &gap) in gaps.iter().enumerate() {
        if gap > 0.0 {
            report.push("arm", Some(i), 6.0 * ln_n / gap);
        }
    }
    let delta_max = gaps.iter().copied().fold(0.0, f64::max);
    report.push("constant", None, (PI * PI / 3.0 + 1.0) * gaps.len() as f64 * delta_max);
    report.with_param("delta_max", delta_max).finish()
}

/// Per-arm gaps of a singleton-super-arm profile (zero for optimal arms).
pub fn classical_gaps(profile: &GapProfile) -> Vec<f64> {
    profile.arms.iter().map(|a| a.delta_max).collect()
}

fn per_arm_sum(report: &mut BoundReport, profile: &GapProfile, numerator: f64, use_p: bool) -> Result<()> {
    for (i, arm) in profile.contributing_arms() {
        let p = if use_p {
            arm.trigger_min.ok_or(CmabError::UntriggerableArm(i))?
        } else {
            1.0
        };
        report.push("arm", Some(i), numerator / (arm.delta_min * p));
    }
    Ok(())
}

/// PMC: `sum 12 |E|^2 ln n / dmin_i + (pi^2/3 + 1) |E| dmax`.
pub fn pmc_bound(profile: &GapProfile, edges: usize, n: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let e = edges as f64;
    let mut report = BoundReport::new("pmc", n);
    per_arm_sum(&mut report, profile, 12.0 * e * e * ln_n, false)?;
    report.push("constant", None, (PI * PI / 3.0 + 1.0) * e * profile.delta_max);
    report.with_param("edges", e).finish()
}

/// PMC: `sqrt(24 |E|^3 n ln n) + (pi^2/3 + 1) |E| dmax`.
pub fn pmc_independent_bound(edges: usize, n: f64, delta_max: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let e = edges as f64;
    let mut report = BoundReport::new("pmc_independent", n);
    report.push("leading", None, (24.0 * e.powi(3) * n * ln_n).sqrt());
    report.push("constant", None, (PI * PI / 3.0 + 1.0) * e * delta_max);
    report.with_param("edges", e).finish()
}

/// Linear rewards: `sum 12 a^2 L^2 ln n / dmin_i + (pi^2/3 + 1) m dmax`.
pub fn linear_bound(profile: &GapProfile, a_max: f64, l: usize, n: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let al = a_max * l as f64;
    let mut report = BoundReport::new("linear", n);
    per_arm_sum(&mut report, profile, 12.0 * al * al * ln_n, false)?;
    report.push(
        "constant",
        None,
        (PI * PI / 3.0 + 1.0) * profile.num_arms() as f64 * profile.delta_max,
    );
    report.with_param("a_max", a_max).with_param("L", l as f64).finish()
}

/// Linear rewards: `a_max L sqrt(24 m n ln n) + (pi^2/3 + 1) m dmax`.
pub fn linear_independent_bound(m: usize, a_max: f64, l: usize, n: f64, delta_max: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let m_f = m as f64;
    let mut report = BoundReport::new("linear_independent", n);
    report.push("leading", None, a_max * l as f64 * (24.0 * m_f * n * ln_n).sqrt());
    report.push("constant", None, (PI * PI / 3.0 + 1.0) * m_f * delta_max);
    report.with_param("a_max", a_max).with_param("L", l as f64).finish()
}

/// Influence maximization: `sum 24 |V|^2 |E|^2 ln n / (dmin_i p_i) + (pi^2/2 + 1) |E| dmax`.
pub fn im_bound(profile: &GapProfile, nodes: usize, edges: usize, n: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    let (v, e) = (nodes as f64, edges as f64);
    let mut report = BoundReport::new("im", n);
    per_arm_sum(&mut report, profile, 24.0 * v * v * e * e * ln_n, true)?;
    report.push("constant", None, (PI * PI / 2.0 + 1.0) * e * profile.delta_max);
    report.with_param("nodes", v).with_param("edges", e).finish()
}

/// Influence maximization: `|V| sqrt(48 |E|^3 n ln n / p*) + (pi^2/2 + 1) |E| dmax`.
pub fn im_independent_bound(nodes: usize, edges: usize, n: f64, p_star: f64, delta_max: f64) -> Result<BoundReport> {
    let ln_n = check_horizon(n)?;
    if !(p_star > 0.0 && p_star <= 1.0) {
        return Err(CmabError::InvalidParameter(format!(
            "p* must lie in (0, 1], got {p_star}"
        )));
    }
    let (v, e) = (nodes as f64, edges as f64);
    let mut report = BoundReport::new("im_independent", n);
    report.push("leading", None, v * (48.0 * e.powi(3) * n * ln_n / p_star).sqrt());
    report.push("constant", None, (PI * PI / 2.0 + 1.0) * e * delta_max);
    report
        .with_param("nodes", v)
        .with_param("edges", e)
        .with_param("p_star", p_star)
        .finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::compute_gap_profile;
    use crate::arm_model::Environment;
    use crate::environments::ClassicalMab;
    use approx::assert_relative_eq;

    #[test]
    fn threshold_values() {
        let id = Smoothness::identity();
        assert!((sampling_threshold(0.5, 1.0, 1000.0, &id).unwrap() - 165.787).abs() < 1e-3);
        assert!((sampling_threshold(1.0, 0.5, 1000.0, &id).unwrap() - 331.572_253).abs() < 1e-3);
        assert!(sampling_threshold(0.0, 1.0, 1000.0, &id).is_err());
        assert!(sampling_threshold(0.5, 1.5, 1000.0, &id).is_err());
    }

    #[test]
    fn classical_profile_reduces_to_specialization() {
        let env = ClassicalMab::new(vec![0.1, 0.3, 0.5, 0.7, 0.9]);
        let g = compute_gap_profile(&env, env.true_means(), 1.0).unwrap();
        let t1 = theorem1_bound(&g, &Smoothness::identity(), 1e5).unwrap();
        let cl = classical_bound(&classical_gaps(&g), 1e5).unwrap();
        assert_relative_eq!(t1.value, cl.value, max_relative = 1e-12);
    }

    #[test]
    fn theorem2_example() {
        let n = std::f64::consts::E.powi(2);
        let r = theorem2_bound(4, n, 1.0, 1.0, 1.0, &[], 0.5).unwrap();
        let expected = 2.0 * 48f64.sqrt() * std::f64::consts::E + (PI * PI / 3.0 + 1.0) * 4.0 * 0.5;
        assert_relative_eq!(r.value, expected, max_relative = 1e-12);
    }

    #[test]
    fn ucb1_example() {
        let r = ucb1_improved_bound(2.0, &[0.5], std::f64::consts::E).unwrap();
        assert_relative_eq!(r.value, 12.0 + (1.0 + PI * PI / 3.0) * 0.5, max_relative = 1e-9);
        assert!(ucb1_improved_bound(1.0, &[0.5], 10.0).is_err());
    }

    #[test]
    fn epsgreedy_example() {
        let r = epsgreedy_bound(200.0, 2.0, 5, 1e6, 1.0).unwrap();
        let expected = 200.0 * 1e6f64.ln() + 3.0 * PI * PI / 6.0 * 5.0 + 8e6;
        assert_relative_eq!(r.value, expected, max_relative = 1e-10);
    }

    #[test]
    fn kinked_integral_closed_form_matches_quadrature() {
        let f = Smoothness::linear(3.0);
        let ln_n = 1e4f64.ln();
        // kink at 3 / sqrt(2) = 2.1213
        let closed = threshold_integral(0.5, 4.0, 0.3, ln_n, &f, Integration::Auto).unwrap();
        let quad = threshold_integral(0.5, 4.0, 0.3, ln_n, &f, Integration::Quadrature).unwrap();
        assert_relative_eq!(closed, quad, max_relative = 1e-9);
    }

    #[test]
    fn sublinear_power_closed_form_matches_quadrature() {
        let f = Smoothness::Power { gamma: 2.0, omega: 0.5 };
        let ln_n = 1e5f64.ln();
        for p in [1.0, 0.4] {
            let closed = threshold_integral(0.2, 1.9, p, ln_n, &f, Integration::Auto).unwrap();
            let quad = threshold_integral(0.2, 1.9, p, ln_n, &f, Integration::Quadrature).unwrap();
            assert_relative_eq!(closed, quad, max_relative = 1e-9);
        }
    }
}
