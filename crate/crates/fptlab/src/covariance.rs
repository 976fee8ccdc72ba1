//! Stationary unit-variance covariance models.

use crate::error::{Error, Result};

/// A stationary covariance function with unit variance, `gamma(0) = 1`.
///
/// Two parametric families are supported:
///
/// * [`Covariance::ExpCosine`] — exponentially damped cosine,
///   `gamma(t) = exp(-beta |t|) cos(alpha t)`. For `alpha -> 0` the function
///   factorizes over disjoint increments and the process is Gauss-Markov
///   (Ornstein-Uhlenbeck); for `alpha > 0` the process is non-Markov with a
///   rational spectral density.
/// * [`Covariance::DampedOscillatory`] —
///   `gamma(t) = exp(-beta |t|) [cos(alpha t) + sin(alpha |t|)]`. Mean-square
///   differentiable only when `alpha == beta` (the one-sided derivative at 0
///   is `alpha - beta`). Requires `alpha <= beta`: for `alpha > beta` the
///   formula exceeds 1 near the origin (`gamma ~ 1 + (alpha - beta) t`) and
///   its spectral density, `2 (alpha + beta)(alpha^2 + beta^2) + 2 omega^2
///   (beta - alpha)` over a positive denominator, turns negative at high
///   frequency, so it is not a covariance there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Covariance {
    ExpCosine { alpha: f64, beta: f64 },
    DampedOscillatory { alpha: f64, beta: f64 },
}

impl Covariance {
    pub fn exp_cosine(alpha: f64, beta: f64) -> Result<Self> {
        check_rates(alpha, beta)?;
        Ok(Covariance::ExpCosine { alpha, beta })
    }

    pub fn damped_oscillatory(alpha: f64, beta: f64) -> Result<Self> {
        check_rates(alpha, beta)?;
        if alpha > beta {
            return Err(Error::InvalidParameter(format!(
                "damped-oscillatory requires alpha <= beta to stay positive \
                 semidefinite, got alpha = {alpha} > beta = {beta}"
            )));
        }
        Ok(Covariance::DampedOscillatory { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            Covariance::ExpCosine { alpha, .. } | Covariance::DampedOscillatory { alpha, .. } => {
                alpha
            }
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Covariance::ExpCosine { beta, .. } | Covariance::DampedOscillatory { beta, .. } => beta,
        }
    }

    /// Evaluate `gamma(|t|)`.
    pub fn eval(&self, t: f64) -> f64 {
        let at = t.abs();
        match *self {
            Covariance::ExpCosine { alpha, beta } => (-beta * at).exp() * (alpha * at).cos(),
            Covariance::DampedOscillatory { alpha, beta } => {
                (-beta * at).exp() * ((alpha * at).cos() + (alpha * at).sin())
            }
        }
    }

    /// Spectral density `Gamma(omega)` of the exponential-cosine family,
    /// normalized so that `integral Gamma(omega) d omega / (2 pi) = gamma(0) = 1`:
    ///
    /// ```text
    /// Gamma(w) = 2 beta (w^2 + alpha^2 + beta^2)
    ///            / (w^4 + 2 w^2 (beta^2 - alpha^2) + (beta^2 + alpha^2)^2)
    /// ```
    ///
    /// The damped-oscillatory family has no published rational factorization
    /// here and is rejected with [`Error::UnsupportedFamily`]; it is simulated
    /// through circulant embedding only.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        match *self {
            Covariance::ExpCosine { alpha, beta } => {
                let w2 = omega * omega;
                let s = alpha * alpha + beta * beta;
                Ok(2.0 * beta * (w2 + s) / (w2 * w2 + 2.0 * w2 * (beta * beta - alpha * alpha) + s * s))
            }
            Covariance::DampedOscillatory { .. } => Err(Error::UnsupportedFamily),
        }
    }

    /// Whether the process is mean-square differentiable.
    ///
    /// True only for the damped-oscillatory family with `alpha == beta`;
    /// the exponential-cosine family never is.
    pub fn ms_differentiable(&self) -> bool {
        match *self {
            Covariance::ExpCosine { .. } => false,
            Covariance::DampedOscillatory { alpha, beta } => alpha == beta,
        }
    }

    /// Whether the covariance factorizes into a Gauss-Markov structure
    /// (exponential-cosine with a numerically vanishing oscillation rate).
    pub fn is_markov(&self) -> bool {
        matches!(*self, Covariance::ExpCosine { alpha, .. } if alpha.abs() <= 1e-8)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Covariance::ExpCosine { .. } => "exp-cosine",
            Covariance::DampedOscillatory { .. } => "damped-oscillatory",
        }
    }
}

fn check_rates(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_variance_at_lag_zero() {
        let models = [
            Covariance::exp_cosine(0.7, 1.3).unwrap(),
            Covariance::damped_oscillatory(1.0, 1.0).unwrap(),
        ];
        for m in models {
            assert_eq!(m.eval(0.0), 1.0);
        }
    }

    #[test]
    fn exp_cosine_reduces_to_exponential() {
        // alpha ~ 0: gamma(2) = exp(-1) with beta = 0.5.
        let m = Covariance::exp_cosine(1e-10, 0.5).unwrap();
        assert_abs_diff_eq!(m.eval(2.0), (-1.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn exp_cosine_zero_at_cosine_zero() {
        let m = Covariance::exp_cosine(0.5, 0.5).unwrap();
        assert_abs_diff_eq!(m.eval(PI), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn damped_oscillatory_at_pi() {
        // exp(-pi) (cos pi + sin pi) = -exp(-pi); cross-checked against the
        // independently evaluated decimal value.
        let m = Covariance::damped_oscillatory(1.0, 1.0).unwrap();
        let expected = -(-PI).exp();
        assert_abs_diff_eq!(m.eval(PI), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(m.eval(PI), -0.04321391826377224, epsilon = 1e-15);
        assert_abs_diff_eq!(m.eval(-PI), expected, epsilon = 1e-15);
    }

    #[test]
    fn spectral_density_at_zero_frequency() {
        // Gamma(0) = 2 beta / (alpha^2 + beta^2).
        let m = Covariance::exp_cosine(0.25, 0.5).unwrap();
        assert_abs_diff_eq!(m.spectral_density(0.0).unwrap(), 3.2, epsilon = 1e-14);
        let m = Covariance::exp_cosine(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.spectral_density(0.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn spectral_density_rejects_damped_oscillatory() {
        let m = Covariance::damped_oscillatory(1.0, 1.0).unwrap();
        assert!(matches!(
            m.spectral_density(1.0),
            Err(Error::UnsupportedFamily)
        ));
    }

    #[test]
    fn spectral_density_integrates_to_unit_variance() {
        // Fourier pair with gamma(0) = 1: integral over the real line of
        // Gamma(omega)/(2 pi) must be 1. Adaptive quadrature on [0, W] plus
        // the analytic O(2 beta / w^2) tail.
        for (alpha, beta) in [(0.25, 0.5), (1.0, 1.0), (2.0, 0.3)] {
            let m = Covariance::exp_cosine(alpha, beta).unwrap();
            let w = 1e4_f64.max(20.0 * (alpha + beta));
            let body = crate::num::adaptive_simpson(
                &|omega: f64| m.spectral_density(omega).unwrap(),
                0.0,
                w,
                1e-10,
            );
            let tail = 2.0 * beta / w;
            let total = (body + tail) / std::f64::consts::PI;
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn markov_factorization_flag() {
        assert!(Covariance::exp_cosine(1e-10, 0.5).unwrap().is_markov());
        assert!(!Covariance::exp_cosine(0.25, 0.5).unwrap().is_markov());
        assert!(!Covariance::damped_oscillatory(1.0, 1.0).unwrap().is_markov());
    }

    #[test]
    fn ms_differentiability() {
        assert!(Covariance::damped_oscillatory(1.0, 1.0).unwrap().ms_differentiable());
        assert!(!Covariance::damped_oscillatory(1.0, 2.0).unwrap().ms_differentiable());
        assert!(!Covariance::exp_cosine(1.0, 1.0).unwrap().ms_differentiable());
    }

    #[test]
    fn rejects_nonpositive_rates() {
        assert!(Covariance::exp_cosine(0.0, 1.0).is_err());
        assert!(Covariance::exp_cosine(1.0, -0.5).is_err());
        assert!(Covariance::damped_oscillatory(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn damped_oscillatory_requires_alpha_at_most_beta() {
        // gamma ~ 1 + (alpha - beta) t near 0 would exceed the variance.
        assert!(Covariance::damped_oscillatory(2.0, 1.0).is_err());
        let m = Covariance::damped_oscillatory(0.5, 1.0).unwrap();
        let max = (0..2000).map(|i| m.eval(i as f64 * 0.005).abs()).fold(0.0, f64::max);
        assert!(max <= 1.0 + 1e-12);
    }
}
