//! Circulant embedding of a stationary covariance and the associated exact
//! Gaussian sampler.
//!
//! The covariance sequence `gamma(k dt)`, `k = 0..n-1`, is wrapped into the
//! first row of a symmetric circulant matrix of size `M >= 2(n-1)`. The FFT
//! of that row gives the circulant eigenvalues; when they are nonnegative
//! (up to a relative clipping tolerance) the matrix square root is diagonal
//! in Fourier space and sampling is exact: one complex FFT of a suitably
//! scaled white-noise vector yields two independent paths in its real and
//! imaginary parts.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{apply_conditioning, Conditioning, PathGrid, SamplePathBatch};
use crate::covariance::Covariance;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamKind};

/// Most negative eigenvalue accepted without growing the embedding,
/// relative to the largest eigenvalue.
const EIG_TOLERANCE: f64 = 1e-8;

/// Largest admissible relative L1 mass of clipped negative eigenvalues.
const CLIP_TOLERANCE: f64 = 1e-6;

const MAX_DOUBLINGS: u32 = 6;

/// An accepted circulant embedding: the clipped eigenvalue spectrum plus the
/// bookkeeping needed to audit its exactness.
#[derive(Debug, Clone)]
pub struct EmbeddingPlan {
    circulant_size: usize,
    eigenvalues: Vec<f64>,
    clipped_mass: f64,
}

impl EmbeddingPlan {
    pub fn circulant_size(&self) -> usize {
        self.circulant_size
    }

    /// Clipped (nonnegative) circulant eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Relative L1 mass removed by clipping negative eigenvalues.
    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    /// Covariance sequence actually realized by the sampler at lags
    /// `0..n_lags`, reconstructed from the clipped spectrum. Comparing this
    /// against `gamma` bounds the sampling error introduced by clipping.
    pub fn implied_covariance(&self, n_lags: usize) -> Vec<f64> {
        let m = self.circulant_size;
        let mut buf: Vec<Complex<f64>> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex::new(l, 0.0))
            .collect();
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        buf.iter().take(n_lags).map(|c| c.re / m as f64).collect()
    }
}

/// Build an embedding for `model` on `grid`.
///
/// Starts from the smallest power of two `>= 2 (n_steps - 1)` and doubles
/// (up to 6 times) until the most negative eigenvalue exceeds
/// `-1e-8 * max eigenvalue`; negatives are then clipped to zero. After the
/// final doubling a spectrum whose clipped mass still exceeds `1e-6`
/// is rejected.
pub fn plan_embedding(model: &Covariance, grid: &PathGrid) -> Result<EmbeddingPlan> {
    let min_size = 2 * (grid.n_steps() - 1);
    let mut m = min_size.next_power_of_two().max(2);
    let mut doublings = 0;
    loop {
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let lag = j.min(m - j) as f64 * grid.dt();
                Complex::new(model.eval(lag), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut row);

        let eigs: Vec<f64> = row.iter().map(|c| c.re).collect();
        let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
        let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
        let total: f64 = eigs.iter().map(|e| e.abs()).sum();
        let clipped: f64 = eigs.iter().filter(|e| **e < 0.0).map(|e| -*e).sum();
        let clipped_mass = (clipped / total).max(0.0);

        let acceptable_min = min > -EIG_TOLERANCE * max;
        let last_resort = doublings == MAX_DOUBLINGS && clipped_mass <= CLIP_TOLERANCE;
        if acceptable_min || last_resort {
            return Ok(EmbeddingPlan {
                circulant_size: m,
                eigenvalues: eigs.into_iter().map(|e| e.max(0.0)).collect(),
                clipped_mass,
            });
        }
        if doublings == MAX_DOUBLINGS {
            return Err(Error::EmbeddingFailed {
                size: m,
                doublings,
                clipped_mass,
            });
        }
        m *= 2;
        doublings += 1;
    }
}

/// Generate paths `first..first+count` of the ensemble keyed by `seed`.
///
/// `first` must be even: ensemble paths `2p` and `2p+1` are the real and
/// imaginary outputs of the FFT fed by pair stream `p`, so chunk boundaries
/// must not split a pair. Any even-aligned chunking of a range reproduces
/// the monolithic output exactly.
pub fn generate_batch_range(
    plan: &EmbeddingPlan,
    model: &Covariance,
    grid: &PathGrid,
    seed: u64,
    conditioning: &Conditioning,
    first: usize,
    count: usize,
) -> Result<SamplePathBatch> {
    assert_eq!(first % 2, 0, "path ranges must start on a pair boundary");
    if count == 0 {
        return Err(Error::EmptyInput("requested zero paths".into()));
    }
    let n = grid.n_steps();
    let m = plan.circulant_size();
    let n_pairs = count.div_ceil(2);

    let scale: Arc<Vec<f64>> = Arc::new(
        plan.eigenvalues()
            .iter()
            .map(|&l| (l / m as f64).sqrt())
            .collect(),
    );
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(m);

    let mut data = vec![0.0f64; n_pairs * 2 * n];
    data.par_chunks_mut(2 * n).enumerate().for_each(|(k, rows)| {
        let pair = first / 2 + k;
        let mut rng = stream(seed, StreamKind::EmbeddingPair, pair as u64);
        let mut buf: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(re * scale[j], im * scale[j])
            })
            .collect();
        let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(&mut buf, &mut scratch);
        let (row0, row1) = rows.split_at_mut(n);
        for (j, c) in buf.iter().take(n).enumerate() {
            row0[j] = c.re;
            row1[j] = c.im;
        }
    });
    data.truncate(count * n);

    apply_conditioning(model, grid, seed, first, conditioning, &mut data)?;
    Ok(SamplePathBatch::from_parts(
        *grid,
        count,
        first,
        seed,
        conditioning.clone(),
        data,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_step_grid_has_trivial_spectrum() {
        // M = 2, first row (1, gamma(dt)): eigenvalues 1 +- gamma(dt) >= 0.
        let model = Covariance::exp_cosine(0.4, 0.9).unwrap();
        let grid = PathGrid::new(0.3, 2).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        assert_eq!(plan.circulant_size(), 2);
        let g = model.eval(0.3);
        let mut eigs = plan.eigenvalues().to_vec();
        eigs.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(eigs[0], 1.0 - g, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 1.0 + g, epsilon = 1e-12);
    }

    #[test]
    fn exponential_embeds_without_clipping() {
        let model = Covariance::exp_cosine(1e-10, 0.5).unwrap();
        let grid = PathGrid::new(0.01, 1001).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        assert_eq!(plan.clipped_mass(), 0.0);
        assert!(plan.eigenvalues().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn damped_oscillatory_plan_accepted() {
        let model = Covariance::damped_oscillatory(1.0, 1.0).unwrap();
        let grid = PathGrid::new(0.05, 401).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        assert!(plan.circulant_size() >= 800);
        assert!(plan.clipped_mass() <= 1e-6);
        assert!(plan.eigenvalues().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn implied_covariance_matches_gamma() {
        let model = Covariance::damped_oscillatory(1.0, 1.0).unwrap();
        let grid = PathGrid::new(0.05, 401).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        let implied = plan.implied_covariance(grid.n_steps());
        for (k, &c) in implied.iter().enumerate() {
            assert_abs_diff_eq!(c, model.eval(grid.time(k)), epsilon = 1e-6);
        }
    }

    #[test]
    fn fixed_start_pins_index_zero() {
        let model = Covariance::exp_cosine(0.25, 0.5).unwrap();
        let grid = PathGrid::new(0.01, 101).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        let batch = generate_batch_range(
            &plan,
            &model,
            &grid,
            9,
            &Conditioning::FixedStart(0.0),
            0,
            257,
        )
        .unwrap();
        for p in batch.paths() {
            assert_eq!(p[0], 0.0);
        }
    }

    #[test]
    fn chunked_generation_is_identical_to_monolithic() {
        let model = Covariance::exp_cosine(0.25, 0.5).unwrap();
        let grid = PathGrid::new(0.02, 64).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        let cond = Conditioning::FixedStart(0.0);
        let full = generate_batch_range(&plan, &model, &grid, 5, &cond, 0, 100).unwrap();
        let a = generate_batch_range(&plan, &model, &grid, 5, &cond, 0, 38).unwrap();
        let b = generate_batch_range(&plan, &model, &grid, 5, &cond, 38, 62).unwrap();
        let stitched: Vec<f64> = a.raw().iter().chain(b.raw()).copied().collect();
        assert_eq!(full.raw(), stitched.as_slice());
    }

    #[test]
    fn generation_is_deterministic_across_worker_counts() {
        let model = Covariance::damped_oscillatory(1.0, 1.0).unwrap();
        let grid = PathGrid::new(0.05, 101).unwrap();
        let plan = plan_embedding(&model, &grid).unwrap();
        let cond = Conditioning::Unconditional;
        let here = generate_batch_range(&plan, &model, &grid, 77, &cond, 0, 64).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| generate_batch_range(&plan, &model, &grid, 77, &cond, 0, 64).unwrap());
        assert_eq!(here.raw(), single.raw());
    }
}
