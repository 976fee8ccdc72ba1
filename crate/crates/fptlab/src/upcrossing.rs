//! Random initial states for the upcrossing first-passage problem.

use rand::Rng;

use crate::boundary::Boundary;
use crate::error::{Error, Result};
use crate::num::{normal_cdf, normal_quantile};

/// Minimum admissible initial-state mass `P(X(0) < S(0) - eps)`.
pub const MIN_INITIAL_MASS: f64 = 1e-12;

/// Below this acceptance probability the rejection sampler gives way to
/// inverse-CDF sampling on the truncated range.
const REJECTION_FLOOR: f64 = 1e-2;

/// The upcrossing variant of the first-passage problem: instead of a fixed
/// start, the initial state is standard normal truncated (and renormalized)
/// to `(-inf, S(0) - eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpcrossingSpec {
    pub epsilon: f64,
    pub boundary: Boundary,
}

impl UpcrossingSpec {
    pub fn new(epsilon: f64, boundary: Boundary) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(UpcrossingSpec { epsilon, boundary })
    }

    /// Upper truncation point `S(0) - eps` of the initial-state law.
    pub fn truncation(&self) -> f64 {
        self.boundary.value(0.0) - self.epsilon
    }

    /// Mass of the untruncated normal below the truncation point; this is
    /// also the acceptance probability of the rejection sampler.
    pub fn initial_mass(&self) -> f64 {
        normal_cdf(self.truncation())
    }

    fn check_mass(&self) -> Result<f64> {
        let mass = self.initial_mass();
        if mass < MIN_INITIAL_MASS {
            return Err(Error::InitialMassUnderflow { mass });
        }
        Ok(mass)
    }

    /// Draw one initial state from the truncated law.
    ///
    /// Rejection against the untruncated normal while the acceptance
    /// probability is at least 1e-2, inverse CDF on the truncated range in
    /// the deeper tail. Errors when the truncated mass is below 1e-12.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let mass = self.check_mass()?;
        let cut = self.truncation();
        if mass >= REJECTION_FLOOR {
            Ok(reject_below(rng, cut))
        } else {
            Ok(inverse_cdf_below(rng, mass))
        }
    }

    /// Like [`UpcrossingSpec::sample`], but the caller supplies the first
    /// rejection proposal (used by the batch sampler, whose unconditional
    /// path already carries a standard-normal value at time zero).
    pub fn sample_with_proposal<R: Rng + ?Sized>(&self, proposal: f64, rng: &mut R) -> Result<f64> {
        let mass = self.check_mass()?;
        let cut = self.truncation();
        if proposal < cut {
            return Ok(proposal);
        }
        if mass >= REJECTION_FLOOR {
            Ok(reject_below(rng, cut))
        } else {
            Ok(inverse_cdf_below(rng, mass))
        }
    }
}

fn reject_below<R: Rng + ?Sized>(rng: &mut R, cut: f64) -> f64 {
    loop {
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        if z < cut {
            return z;
        }
    }
}

fn inverse_cdf_below<R: Rng + ?Sized>(rng: &mut R, mass: f64) -> f64 {
    let mut u: f64 = rng.random();
    // Guard against a zero uniform; the quantile needs p in (0, 1).
    while u <= 0.0 {
        u = rng.random();
    }
    normal_quantile(u * mass)
}
