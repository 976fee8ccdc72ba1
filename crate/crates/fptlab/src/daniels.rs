//! Closed-form first-passage density through the Daniels-type threshold.
//!
//! For standard Brownian motion the two-point image solution
//!
//! ```text
//! p(x, u) = phi_u(x) - 1/2 phi_u(x - 2d) - 1/2 phi_u(x - 4d)
//! ```
//!
//! (`phi_u` the centered Gaussian density of variance `u`) vanishes exactly
//! on the curve `S_W(u) = d - (u/2d) ln[(1 + sqrt(1 + 8 e^{-4 d^2/u}))/4]`:
//! the weights 1/2, 1/2 are forced by a quadratic identity in
//! `sqrt(1 + 8 e^{-4 d^2/u})`. The first-passage density is then the
//! boundary flux `-1/2 dp/dx` on the curve.
//!
//! The zero-start Ornstein-Uhlenbeck process is Brownian motion under the
//! time change `X(t) = e^{-b t} W(e^{2 b t} - 1)`, which maps `S_W` onto the
//! [`crate::boundary::Boundary::DanielsOu`] threshold and gives the density
//! in process time by a change of variables.

use crate::boundary::daniels_brownian;
use crate::error::{Error, Result};
use crate::num::gaussian_pdf;

/// Residual of the image solution on the curve, `p(S_W(u), u)`; identically
/// zero up to rounding.
pub fn image_residual(start_gap: f64, u: f64) -> f64 {
    let d = start_gap;
    let (s, _) = daniels_brownian(d, u);
    gaussian_pdf(s, 0.0, u)
        - 0.5 * gaussian_pdf(s - 2.0 * d, 0.0, u)
        - 0.5 * gaussian_pdf(s - 4.0 * d, 0.0, u)
}

/// Brownian first-passage density through the Daniels curve: the image
/// solution's boundary flux
///
/// ```text
/// g_W(u) = 1/(2u) [S_W phi_u(S_W) - 1/2 (S_W - 2d) phi_u(S_W - 2d)
///                                 - 1/2 (S_W - 4d) phi_u(S_W - 4d)]
/// ```
pub fn brownian_passage_density(start_gap: f64, u: f64) -> f64 {
    let d = start_gap;
    let (s, _) = daniels_brownian(d, u);
    0.5 / u
        * (s * gaussian_pdf(s, 0.0, u)
            - 0.5 * (s - 2.0 * d) * gaussian_pdf(s - 2.0 * d, 0.0, u)
            - 0.5 * (s - 4.0 * d) * gaussian_pdf(s - 4.0 * d, 0.0, u))
}

/// First-passage density of the zero-start Ornstein-Uhlenbeck process
/// (decay rate `rate`) through the Daniels threshold with start gap `d`:
///
/// ```text
/// g(t) = 2 rate e^{2 rate t} g_W(e^{2 rate t} - 1)
/// ```
pub fn closed_form_daniels(start_gap: f64, rate: f64, t: f64) -> Result<f64> {
    if !(start_gap > 0.0 && start_gap.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "start gap must be positive, got {start_gap}"
        )));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rate must be positive, got {rate}"
        )));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time must be positive, got {t}"
        )));
    }
    let u = (2.0 * rate * t).exp_m1();
    Ok(2.0 * rate * (2.0 * rate * t).exp() * brownian_passage_density(start_gap, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::adaptive_simpson;
    use approx::assert_abs_diff_eq;

    #[test]
    fn image_identity_on_the_curve() {
        // p(S_W(u), u) = 0 to 1e-12 at u in {0.1, 1, 10}, d = 0.25.
        for &u in &[0.1, 1.0, 10.0] {
            let r = image_residual(0.25, u);
            assert!(r.abs() <= 1e-12, "u={u}: residual {r}");
        }
    }

    #[test]
    fn time_change_reproduces_conditioned_ou_covariance() {
        // Cov(e^{-bt} W(e^{2bt}-1), e^{-bs} W(e^{2bs}-1))
        //   = e^{-b(t-s)} - e^{-b(t+s)} for s <= t.
        let b = 0.5f64;
        for (s, t) in [(0.3f64, 1.0f64), (1.0, 1.0), (2.0, 7.0)] {
            let u_s = (2.0 * b * s).exp_m1();
            let lhs = (-b * t).exp() * (-b * s).exp() * u_s;
            let rhs = (-b * (t - s)).exp() - (-b * (t + s)).exp();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // The threshold decays to zero while the process is recurrent, so it
        // is crossed almost surely. Quadrature over [0, T] plus an
        // exponential tail extrapolated from the terminal decay rate.
        let (d, b) = (0.25, 0.5);
        let g = |t: f64| closed_form_daniels(d, b, t).unwrap();
        let body = adaptive_simpson(&g, 1e-9, 40.0, 1e-10);
        let rate = -(g(40.0) / g(39.0)).ln();
        let tail = g(40.0) / rate;
        assert_abs_diff_eq!(body + tail, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn density_positive_and_vanishing_at_origin() {
        for &t in &[0.01, 0.1, 1.0, 10.0] {
            assert!(closed_form_daniels(0.25, 0.5, t).unwrap() > 0.0);
        }
        assert!(closed_form_daniels(0.25, 0.5, 1e-9).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(closed_form_daniels(0.0, 0.5, 1.0).is_err());
        assert!(closed_form_daniels(0.25, -0.5, 1.0).is_err());
        assert!(closed_form_daniels(0.25, 0.5, 0.0).is_err());
    }

    #[test]
    fn matches_volterra_solution() {
        // Independent route: the Volterra march for the conditioned OU with
        // the Daniels threshold, pointwise within 1e-3.
        use crate::boundary::Boundary;
        use crate::gauss_markov::GaussMarkov;
        use crate::volterra::solve_volterra;
        let (d, b) = (0.25, 0.5);
        let ou = GaussMarkov::conditioned_ou(b).unwrap();
        let boundary = Boundary::daniels_ou(d, b).unwrap();
        let sol = solve_volterra(&ou, &boundary, 0.0, 2e-3, 10.0).unwrap();
        let mut max_err = 0.0f64;
        for (k, &t) in sol.times().iter().enumerate().skip(1) {
            let err = (sol.values()[k] - closed_form_daniels(d, b, t).unwrap()).abs();
            max_err = max_err.max(err);
        }
        assert!(max_err <= 1e-3, "max pointwise difference {max_err}");
    }
}
