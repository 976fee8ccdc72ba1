//! Time-dependent crossing thresholds.

use crate::error::{Error, Result};

/// A deterministic threshold `S(t)` with analytic first derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    /// `S(t) = level`.
    Constant { level: f64 },
    /// `S(t) = base + amplitude * sin(2 pi t / period)`.
    Periodic {
        base: f64,
        amplitude: f64,
        period: f64,
    },
    /// The image-method threshold for the zero-start Ornstein-Uhlenbeck
    /// process with decay rate `rate`:
    ///
    /// ```text
    /// S(t) = d exp(-rate t) {1 - (e^{2 rate t} - 1)/(2 d^2)
    ///          ln[1/4 + 1/4 sqrt(1 + 8 exp(-4 d^2 / (e^{2 rate t} - 1)))]}
    /// ```
    ///
    /// `S(0+) = d`; far out it decays like `(5d/3) exp(-rate t)`.
    DanielsOu { start_gap: f64, rate: f64 },
    /// `S(t) = c0 + c1 t + c2 t^2 + ...` (coefficients lowest degree first).
    Polynomial { coeffs: Vec<f64> },
}

impl Boundary {
    pub fn constant(level: f64) -> Self {
        Boundary::Constant { level }
    }

    pub fn periodic(base: f64, amplitude: f64, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "boundary period must be positive, got {period}"
            )));
        }
        Ok(Boundary::Periodic {
            base,
            amplitude,
            period,
        })
    }

    pub fn daniels_ou(start_gap: f64, rate: f64) -> Result<Self> {
        if !(start_gap > 0.0 && start_gap.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "start gap d must be positive, got {start_gap}"
            )));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decay rate must be positive, got {rate}"
            )));
        }
        Ok(Boundary::DanielsOu { start_gap, rate })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "polynomial boundary needs at least one coefficient".into(),
            ));
        }
        Ok(Boundary::Polynomial { coeffs })
    }

    /// Threshold value at `t >= 0`.
    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Threshold value and first derivative at `t >= 0`.
    ///
    /// The Daniels threshold returns its analytic limit for
    /// `e^{2 rate t} - 1 < 1e-12`, where the direct expression degenerates
    /// to `0 * inf`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            Boundary::Constant { level } => (*level, 0.0),
            Boundary::Periodic {
                base,
                amplitude,
                period,
            } => {
                let w = 2.0 * std::f64::consts::PI / period;
                (
                    base + amplitude * (w * t).sin(),
                    amplitude * w * (w * t).cos(),
                )
            }
            Boundary::DanielsOu { start_gap, rate } => daniels_eval(*start_gap, *rate, t),
            Boundary::Polynomial { coeffs } => {
                let mut s = 0.0;
                let mut sp = 0.0;
                for &c in coeffs.iter().rev() {
                    sp = sp * t + s;
                    s = s * t + c;
                }
                (s, sp)
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Boundary::Constant { .. } => "constant",
            Boundary::Periodic { .. } => "periodic",
            Boundary::DanielsOu { .. } => "daniels-ou",
            Boundary::Polynomial { .. } => "polynomial",
        }
    }
}

/// The Daniels threshold for standard Brownian motion, `S_W(u)`, together
/// with its derivative. The Ornstein-Uhlenbeck threshold is its image under
/// the time change `u = e^{2 rate t} - 1`.
pub fn daniels_brownian(start_gap: f64, u: f64) -> (f64, f64) {
    let d = start_gap;
    let x = 4.0 * d * d / u;
    // For u >> d^2 the direct form loses the log term to rounding
    // (q -> 1, ln -> 0 while the u/(2d) factor blows up); em = 1 - q and
    // root - 3 keep full precision at both ends.
    let em = -(-x).exp_m1();
    let root = (9.0 - 8.0 * em).sqrt();
    let root_m3 = -8.0 * em / (root + 3.0);
    let l = (root_m3 / 4.0).ln_1p();
    // dq/du = q x / u; dl/du = 4 q' / (root (1 + root)).
    let qp = (1.0 - em) * x / u;
    let lp = 4.0 * qp / (root * (1.0 + root));
    let s = d - u / (2.0 * d) * l;
    let sp = -l / (2.0 * d) - u / (2.0 * d) * lp;
    (s, sp)
}

fn daniels_eval(d: f64, rate: f64, t: f64) -> (f64, f64) {
    let u = (2.0 * rate * t).exp_m1();
    if u < 1e-12 {
        // Analytic limit: q -> 0, ln term -> ln(1/2).
        let ln2 = std::f64::consts::LN_2;
        return (d, rate * (ln2 / d - d));
    }
    let (sw, swp) = daniels_brownian(d, u);
    let decay = (-rate * t).exp();
    let up = 2.0 * rate * (2.0 * rate * t).exp();
    (decay * sw, decay * (-rate * sw + up * swp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn daniels_limit_at_origin() {
        let b = Boundary::daniels_ou(0.25, 0.5).unwrap();
        let (s, _) = b.eval(0.0);
        assert_eq!(s, 0.25);
        let (s, _) = b.eval(1e-14);
        assert_abs_diff_eq!(s, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn daniels_far_field_scaling() {
        // Series expansion for large t: S(t) e^{rate t} -> 5 d / 3.
        let d = 0.25;
        let rate = 0.5;
        let b = Boundary::daniels_ou(d, rate).unwrap();
        let t = 20.0 / rate;
        let (s, _) = b.eval(t);
        assert_abs_diff_eq!(s * (rate * t).exp(), 5.0 * d / 3.0, epsilon = 1e-7);
    }

    #[test]
    fn daniels_derivative_matches_finite_difference() {
        let b = Boundary::daniels_ou(0.25, 0.5).unwrap();
        for &t in &[0.05, 0.3, 1.0, 4.0] {
            let h = 1e-6;
            let fd = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
            let (_, sp) = b.eval(t);
            assert_abs_diff_eq!(sp, fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn periodic_peak_at_quarter_period() {
        let b = Boundary::periodic(2.0, 0.1, 3.0).unwrap();
        let (s, sp) = b.eval(0.75);
        assert_abs_diff_eq!(s, 2.1, epsilon = 1e-14);
        assert_abs_diff_eq!(sp, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn periodic_repeats_with_period() {
        let b = Boundary::periodic(2.0, 0.1, 3.0).unwrap();
        for &t in &[0.0, 0.4, 1.9, 2.8] {
            assert_abs_diff_eq!(b.value(t), b.value(t + 3.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn polynomial_value_and_derivative() {
        // S(t) = 5 - t - t^2/2 (lowest degree first).
        let b = Boundary::polynomial(vec![5.0, -1.0, -0.5]).unwrap();
        let (s, sp) = b.eval(2.0);
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sp, -3.0, epsilon = 1e-14);
    }

    #[test]
    fn all_families_finite_on_horizon() {
        let bs = [
            Boundary::constant(1.0),
            Boundary::periodic(2.0, 0.1, 3.0).unwrap(),
            Boundary::daniels_ou(0.25, 0.5).unwrap(),
            Boundary::polynomial(vec![5.0, -1.0, -0.5]).unwrap(),
        ];
        for b in &bs {
            for i in 0..=1000 {
                let t = i as f64 * 0.15;
                let (s, sp) = b.eval(t);
                assert!(s.is_finite() && sp.is_finite(), "{b:?} at t={t}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Boundary::periodic(2.0, 0.1, 0.0).is_err());
        assert!(Boundary::daniels_ou(0.0, 0.5).is_err());
        assert!(Boundary::daniels_ou(0.25, -1.0).is_err());
        assert!(Boundary::polynomial(vec![]).is_err());
    }
}
