//! Competition drift `g`: continuous, non-decreasing, `g(0) = 0`.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

#[derive(Clone)]
pub enum CompetitionFunction {
    /// No competition; the process is a pure branching process.
    Zero,
    /// `g(x) = a·x^p`.
    Power { a: f64, p: f64 },
    /// `g(x) = a·x²`, the logistic case.
    Logistic { a: f64 },
    /// User-supplied callable with declared monotonicity and optional
    /// near-zero exponent `θ` (`liminf_{x→0} g(x) x^{−θ} > 0`).
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        label: String,
        theta: Option<f64>,
    },
}

impl fmt::Debug for CompetitionFunction {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompetitionFunction::Zero => write!(fm, "Zero"),
            CompetitionFunction::Power { a, p } => write!(fm, "Power(a={a}, p={p})"),
            CompetitionFunction::Logistic { a } => write!(fm, "Logistic(a={a})"),
            CompetitionFunction::Custom { label, theta, .. } => {
                write!(fm, "Custom({label}, θ={theta:?})")
            }
        }
    }
}

impl CompetitionFunction {
    pub fn power(a: f64, p: f64) -> Result<Self> {
        if !(a > 0.0 && p > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "power competition needs a > 0 and p > 0, got a={a}, p={p}"
            )));
        }
        Ok(CompetitionFunction::Power { a, p })
    }

    pub fn logistic(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "logistic competition needs a > 0, got a={a}"
            )));
        }
        Ok(CompetitionFunction::Logistic { a })
    }

    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: &str,
        theta: Option<f64>,
    ) -> Result<Self> {
        let g = CompetitionFunction::Custom {
            f: Arc::new(f),
            label: label.to_string(),
            theta,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CompetitionFunction::Zero => 0.0,
            CompetitionFunction::Power { a, p } => a * x.powf(*p),
            CompetitionFunction::Logistic { a } => a * x * x,
            CompetitionFunction::Custom { f, .. } => f(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CompetitionFunction::Zero)
    }

    /// Declared exponent for the behaviour of `g` near zero; parametric
    /// families derive it, custom functions declare it.
    pub fn near_zero_exponent(&self) -> Option<f64> {
        match self {
            CompetitionFunction::Zero => None,
            CompetitionFunction::Power { p, .. } => Some(*p),
            CompetitionFunction::Logistic { .. } => Some(2.0),
            CompetitionFunction::Custom { theta, .. } => *theta,
        }
    }

    /// `g(0) = 0` exactly, and sampled monotonicity on a log grid.
    pub fn validate(&self) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidSpec(
                "competition must vanish at zero: g(0) = 0".into(),
            ));
        }
        let mut prev: f64 = 0.0;
        let mut x = 1e-6;
        while x <= 1e6 {
            let v = self.eval(x);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "competition must be finite and non-negative, g({x}) = {v}"
                )));
            }
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(Error::InvalidSpec(format!(
                    "g is a continuous and non-decreasing function; decrease detected near x = {x}"
                )));
            }
            prev = v;
            x *= 2.0;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_evaluate() {
        assert_eq!(CompetitionFunction::Zero.eval(3.0), 0.0);
        assert_eq!(CompetitionFunction::logistic(2.0).unwrap().eval(3.0), 18.0);
        assert_eq!(CompetitionFunction::power(1.0, 0.5).unwrap().eval(4.0), 2.0);
    }

    #[test]
    fn non_monotone_custom_rejected() {
        let err = CompetitionFunction::custom(|x| (x - 1.0).powi(2) - 1.0, "dip", None);
        assert!(err.is_err());
    }

    #[test]
    fn nonzero_at_origin_rejected() {
        let err = CompetitionFunction::custom(|x| x + 1.0, "affine", None);
        assert!(err.is_err());
    }
}
