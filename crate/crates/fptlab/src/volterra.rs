//! First-passage densities of Gauss-Markov processes through a second-kind
//! Volterra integral equation.
//!
//! With `f(x, t | y, tau)` the Gaussian transition density of the process,
//! the kernel
//!
//! ```text
//! Psi(t | y, tau) = 1/2 f(S(t), t | y, tau) {S'(t) - m'(t)
//!     - [S(t) - m(t)] [u'(t) v(tau) - v'(t) u(tau)] / D
//!     + [y - m(tau)]  [u'(t) v(t)   - v'(t) u(t)]   / D},
//! D = u(t) v(tau) - v(t) u(tau)
//! ```
//!
//! vanishes on the diagonal along `y = S(tau)`, making the equation
//!
//! ```text
//! g(t) = -2 Psi(t | x0, 0) + 2 int_0^t g(tau) Psi(t | S(tau), tau) d tau
//! ```
//!
//! non-singular; composite trapezoid quadrature on a uniform grid then
//! marches it explicitly with second-order accuracy.

use crate::boundary::Boundary;
use crate::error::{Error, Result};
use crate::gauss_markov::GaussMarkov;
use crate::num::gaussian_pdf;

/// Divergence guard for the marching recursion.
const INSTABILITY_LIMIT: f64 = 1e3;

/// Small negative density values tolerated from quadrature; reports clamp
/// them to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

/// Numerical solution `g(t_k | x0, 0)` on a uniform grid.
#[derive(Debug, Clone)]
pub struct VolterraSolution {
    times: Vec<f64>,
    values: Vec<f64>,
    step: f64,
    x0: f64,
}

impl VolterraSolution {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Raw marched values (may carry negatives within [`NEGATIVE_TOLERANCE`]).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values with tiny quadrature negatives clamped to zero.
    pub fn clamped_values(&self) -> Vec<f64> {
        self.values.iter().map(|&g| g.max(0.0)).collect()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Trapezoid mass of the clamped density over the solved horizon.
    pub fn cumulative_mass(&self) -> f64 {
        let v = self.clamped_values();
        self.step * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
    }
}

/// The Volterra kernel `Psi(t | y, tau)`; zero on the diagonal `tau == t`
/// (its analytic limit along `y = S(tau)`).
pub fn kernel_psi(
    spec: &GaussMarkov,
    boundary: &Boundary,
    t: f64,
    y: f64,
    tau: f64,
) -> Result<f64> {
    if tau == t {
        return Ok(0.0);
    }
    let nodes = KernelNodes::at(spec, boundary, &[tau, t]);
    nodes.psi(1, 0, y)
}

/// Node-precomputed factors of the kernel, shared by the solver's inner loop.
struct KernelNodes {
    u: Vec<f64>,
    up: Vec<f64>,
    v: Vec<f64>,
    vp: Vec<f64>,
    m: Vec<f64>,
    mp: Vec<f64>,
    s: Vec<f64>,
    sp: Vec<f64>,
    times: Vec<f64>,
}

impl KernelNodes {
    fn at(spec: &GaussMarkov, boundary: &Boundary, times: &[f64]) -> Self {
        let n = times.len();
        let mut nodes = KernelNodes {
            u: Vec::with_capacity(n),
            up: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            vp: Vec::with_capacity(n),
            m: Vec::with_capacity(n),
            mp: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            sp: Vec::with_capacity(n),
            times: times.to_vec(),
        };
        for &t in times {
            nodes.u.push(spec.past_factor(t));
            nodes.up.push(spec.past_factor_deriv(t));
            nodes.v.push(spec.future_factor(t));
            nodes.vp.push(spec.future_factor_deriv(t));
            nodes.m.push(spec.mean(t));
            nodes.mp.push(spec.mean_deriv(t));
            let (s, sp) = boundary.eval(t);
            nodes.s.push(s);
            nodes.sp.push(sp);
        }
        nodes
    }

    /// `Psi(t_k | y, t_j)` for `j < k`.
    fn psi(&self, k: usize, j: usize, y: f64) -> Result<f64> {
        let d = self.u[k] * self.v[j] - self.v[k] * self.u[j];
        if d <= 0.0 {
            return Err(Error::FactorizationDomain {
                t: self.times[k],
                tau: self.times[j],
                d,
            });
        }
        let mean = self.m[k] + self.v[k] / self.v[j] * (y - self.m[j]);
        let var = self.v[k] * d / self.v[j];
        let f = gaussian_pdf(self.s[k], mean, var);
        let r1 = (self.up[k] * self.v[j] - self.vp[k] * self.u[j]) / d;
        let r2 = (self.up[k] * self.v[k] - self.vp[k] * self.u[k]) / d;
        Ok(0.5
            * f
            * (self.sp[k] - self.mp[k] - (self.s[k] - self.m[k]) * r1 + (y - self.m[j]) * r2))
    }
}

/// March the Volterra equation on the uniform grid `t_k = k h`,
/// `k = 0 .. t_max/h`:
///
/// ```text
/// g_k = -2 Psi(t_k | x0, 0) + 2 h sum_{j=1}^{k-1} g_j Psi(t_k | S(t_j), t_j)
/// ```
///
/// (the `j = 0` trapezoid term vanishes because `g_0 = 0`, the `j = k` term
/// because the kernel is zero on the diagonal).
pub fn solve_volterra(
    spec: &GaussMarkov,
    boundary: &Boundary,
    x0: f64,
    h: f64,
    t_max: f64,
) -> Result<VolterraSolution> {
    if !(h > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidParameter(
            "solver needs positive step and horizon".into(),
        ));
    }
    if h > 0.01 * t_max {
        return Err(Error::InvalidParameter(format!(
            "step {h} too coarse for horizon {t_max} (need h <= 0.01 t_max)"
        )));
    }
    let s0 = boundary.value(0.0);
    if x0 >= s0 {
        return Err(Error::StartAboveBoundary {
            path_index: 0,
            value: x0,
            boundary: s0,
        });
    }

    let n = (t_max / h).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let nodes = KernelNodes::at(spec, boundary, &times);

    let mut g = vec![0.0f64; n + 1];
    for k in 1..=n {
        let mut sum = 0.0;
        for (j, &gj) in g.iter().enumerate().take(k).skip(1) {
            sum += gj * nodes.psi(k, j, nodes.s[j])?;
        }
        let gk = -2.0 * nodes.psi(k, 0, x0)? + 2.0 * h * sum;
        if gk.abs() > INSTABILITY_LIMIT {
            return Err(Error::Instability {
                t: times[k],
                value: gk,
            });
        }
        g[k] = gk;
    }

    Ok(VolterraSolution {
        times,
        values: g,
        step: h,
        x0,
    })
}
