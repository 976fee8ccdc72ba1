//! Gauss-Markov process descriptors.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Gauss-Markov process given by its mean `m(t)` and the factorization of
/// its covariance, `c(tau, t) = u(tau) v(t)` for `tau <= t`.
///
/// Validity requires `v(t) > 0` and `u(t)/v(t)` strictly increasing on the
/// domain of interest, which makes the conditional variance
/// `V(t | tau) = v(t) [u(t) v(tau) - u(tau) v(t)] / v(tau)` positive.
#[derive(Clone)]
pub struct GaussMarkov {
    name: &'static str,
    mean: TimeFn,
    mean_deriv: TimeFn,
    past_factor: TimeFn,
    past_factor_deriv: TimeFn,
    future_factor: TimeFn,
    future_factor_deriv: TimeFn,
}

impl fmt::Debug for GaussMarkov {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaussMarkov").field("name", &self.name).finish()
    }
}

impl GaussMarkov {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &'static str,
        mean: TimeFn,
        mean_deriv: TimeFn,
        past_factor: TimeFn,
        past_factor_deriv: TimeFn,
        future_factor: TimeFn,
        future_factor_deriv: TimeFn,
    ) -> Self {
        GaussMarkov {
            name,
            mean,
            mean_deriv,
            past_factor,
            past_factor_deriv,
            future_factor,
            future_factor_deriv,
        }
    }

    /// Standard Brownian motion: `m = 0`, `u(s) = s`, `v = 1`.
    pub fn wiener() -> Self {
        GaussMarkov::new(
            "wiener",
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            Arc::new(|s| s),
            Arc::new(|_| 1.0),
            Arc::new(|_| 1.0),
            Arc::new(|_| 0.0),
        )
    }

    /// The stationary unit-variance Ornstein-Uhlenbeck process conditioned to
    /// start at zero: `m = 0`, `u(s) = e^{rate s} - e^{-rate s}`,
    /// `v(t) = e^{-rate t}`, so `c(tau, t) = e^{-rate (t - tau)} - e^{-rate (t + tau)}`.
    pub fn conditioned_ou(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "OU rate must be positive, got {rate}"
            )));
        }
        Ok(GaussMarkov::new(
            "conditioned-ou",
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            Arc::new(move |s| (rate * s).exp() - (-rate * s).exp()),
            Arc::new(move |s| rate * ((rate * s).exp() + (-rate * s).exp())),
            Arc::new(move |t| (-rate * t).exp()),
            Arc::new(move |t| -rate * (-rate * t).exp()),
        ))
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn mean(&self, t: f64) -> f64 {
        (self.mean)(t)
    }

    pub fn mean_deriv(&self, t: f64) -> f64 {
        (self.mean_deriv)(t)
    }

    /// The factor `u` attached to the earlier time in `c(tau, t) = u(tau) v(t)`.
    pub fn past_factor(&self, t: f64) -> f64 {
        (self.past_factor)(t)
    }

    pub fn past_factor_deriv(&self, t: f64) -> f64 {
        (self.past_factor_deriv)(t)
    }

    /// The factor `v` attached to the later time in `c(tau, t) = u(tau) v(t)`.
    pub fn future_factor(&self, t: f64) -> f64 {
        (self.future_factor)(t)
    }

    pub fn future_factor_deriv(&self, t: f64) -> f64 {
        (self.future_factor_deriv)(t)
    }

    /// Covariance `c(tau, t)` for `tau <= t`.
    pub fn covariance(&self, tau: f64, t: f64) -> f64 {
        debug_assert!(tau <= t);
        self.past_factor(tau) * self.future_factor(t)
    }

    /// Mean and variance of `X(t) | X(tau) = y` for `tau < t`.
    pub fn transition(&self, t: f64, y: f64, tau: f64) -> Result<(f64, f64)> {
        let vt = self.future_factor(t);
        let vtau = self.future_factor(tau);
        let d = self.past_factor(t) * vtau - vt * self.past_factor(tau);
        if d <= 0.0 {
            return Err(Error::FactorizationDomain { t, tau, d });
        }
        let mean = self.mean(t) + vt / vtau * (y - self.mean(tau));
        let var = vt * d / vtau;
        Ok((mean, var))
    }

    /// Check the factorization invariants on a uniform grid over `(0, t_max]`.
    pub fn validate(&self, t_max: f64, n_check: usize) -> Result<()> {
        let mut prev_ratio = f64::NEG_INFINITY;
        for i in 1..=n_check {
            let t = t_max * i as f64 / n_check as f64;
            let v = self.future_factor(t);
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "future factor must be positive, got {v} at t = {t}"
                )));
            }
            let ratio = self.past_factor(t) / v;
            if ratio <= prev_ratio {
                return Err(Error::InvalidParameter(format!(
                    "past/future factor ratio must be strictly increasing, violated at t = {t}"
                )));
            }
            prev_ratio = ratio;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wiener_covariance_is_min() {
        let w = GaussMarkov::wiener();
        assert_abs_diff_eq!(w.covariance(0.7, 2.0), 0.7, epsilon = 1e-15);
        let (mean, var) = w.transition(2.0, 0.3, 0.7).unwrap();
        assert_abs_diff_eq!(mean, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(var, 1.3, epsilon = 1e-15);
    }

    #[test]
    fn conditioned_ou_covariance() {
        // c(tau, t) = e^{-b(t-tau)} - e^{-b(t+tau)}.
        let b = 0.5;
        let ou = GaussMarkov::conditioned_ou(b).unwrap();
        for (tau, t) in [(0.5, 1.0), (1.0, 3.0), (0.1, 0.2)] {
            let expected = (-b * (t - tau)).exp() - (-b * (t + tau)).exp();
            assert_abs_diff_eq!(ou.covariance(tau, t), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn conditioned_ou_variance_positive() {
        let ou = GaussMarkov::conditioned_ou(0.5).unwrap();
        for (tau, t) in [(0.1, 0.2), (0.5, 5.0), (3.0, 3.001)] {
            let (_, var) = ou.transition(t, 0.4, tau).unwrap();
            assert!(var > 0.0);
        }
    }

    #[test]
    fn validates_factorization() {
        GaussMarkov::wiener().validate(10.0, 200).unwrap();
        GaussMarkov::conditioned_ou(0.5).unwrap().validate(10.0, 200).unwrap();
    }

    #[test]
    fn transition_rejects_reversed_times() {
        let ou = GaussMarkov::conditioned_ou(0.5).unwrap();
        assert!(matches!(
            ou.transition(0.5, 0.0, 1.0),
            Err(Error::FactorizationDomain { .. })
        ));
    }
}
