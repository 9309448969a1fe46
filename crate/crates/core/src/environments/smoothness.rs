use std::fmt;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bounded smoothness function `f` with its inverse.
///
/// If two mean vectors differ by at most `x` on every arm a super arm can
/// trigger, their expected rewards for that super arm differ by at most `f(x)`.
#[derive(Clone)]
pub enum Smoothness {
    /// `f(x) = gamma * x^omega` with `gamma > 0`, `0 < omega <= 1`.
    Power { gamma: f64, omega: f64 },
    /// Arbitrary strictly increasing `f`; bound evaluators fall back to quadrature.
    Custom { name: String, f: RealFn, inverse: RealFn },
}

impl Smoothness {
    pub fn identity() -> Self {
        Smoothness::linear(1.0)
    }

    pub fn linear(gamma: f64) -> Self {
        Smoothness::Power { gamma, omega: 1.0 }
    }

    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Smoothness::Custom {
            name: name.into(),
            f: Arc::new(f),
            inverse: Arc::new(inverse),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Smoothness::Power { gamma, omega } => gamma * x.powf(*omega),
            Smoothness::Custom { f, .. } => f(x),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match self {
            Smoothness::Power { gamma, omega } => (y / gamma).powf(1.0 / omega),
            Smoothness::Custom { inverse, .. } => inverse(y),
        }
    }

    /// `(gamma, omega)` when `f` has power form.
    pub fn power_form(&self) -> Option<(f64, f64)> {
        match self {
            Smoothness::Power { gamma, omega } => Some((*gamma, *omega)),
            Smoothness::Custom { .. } => None,
        }
    }
}

impl fmt::Debug for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Power { gamma, omega } if *omega == 1.0 => write!(f, "f(x) = {gamma}*x"),
            Smoothness::Power { gamma, omega } => write!(f, "f(x) = {gamma}*x^{omega}"),
            Smoothness::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_inverse_round_trips() {
        let s = Smoothness::Power { gamma: 3.0, omega: 0.5 };
        for x in [0.01, 0.2, 0.9, 4.0] {
            assert_relative_eq!(s.inverse(s.eval(x)), x, max_relative = 1e-12);
        }
    }

    #[test]
    fn identity_is_identity() {
        let s = Smoothness::identity();
        assert_eq!(s.eval(0.37), 0.37);
        assert_eq!(s.inverse(0.37), 0.37);
    }
}
