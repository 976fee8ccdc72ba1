//! Exact generation of discretized stationary Gaussian sample paths.
//!
//! Two independent exact samplers are provided: circulant embedding
//! ([`plan_embedding`], [`generate_batch`]), which handles every supported
//! covariance family, and a state-space recursion ([`state_space_batch`])
//! specialized to the rational spectrum of the exponential-cosine family.
//! Their agreement in law is part of the test suite.
//!
//! Batch generation is data-parallel across paths with no shared mutable
//! state; randomness is assigned per work unit by [`crate::rng`], so output
//! is identical for any worker count.

mod embedding;
mod state_space;

pub use embedding::{plan_embedding, EmbeddingPlan};
pub use state_space::{state_space_batch, transfer_magnitude_sq};

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::covariance::Covariance;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamKind};
use crate::upcrossing::UpcrossingSpec;

/// A uniform time grid `t_k = k dt`, `k = 0 .. n_steps-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    dt: f64,
    n_steps: usize,
}

impl PathGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {dt}"
            )));
        }
        if n_steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 steps, got {n_steps}"
            )));
        }
        Ok(PathGrid { dt, n_steps })
    }

    /// Grid covering `[0, t_max]` with step `dt` (last point >= t_max).
    pub fn covering(dt: f64, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive, got {t_max}"
            )));
        }
        PathGrid::new(dt, (t_max / dt).ceil() as usize + 1)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn t_max(&self) -> f64 {
        self.dt * (self.n_steps - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.dt * k as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_steps).map(|k| self.time(k)).collect()
    }
}

/// How the start of each path is pinned.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditioning {
    /// Stationary paths, `X(0) ~ N(0, 1)`.
    Unconditional,
    /// `P(X(0) = x0) = 1`, applied through the exact Gaussian update
    /// `X(t) <- x0 gamma(t) + X(t) - X(0) gamma(t)`.
    FixedStart(f64),
    /// `X(0)` drawn from the truncated initial law of the upcrossing
    /// problem, then the same update.
    TruncatedStart(UpcrossingSpec),
}

/// A batch of discretized sample paths, stored row-major.
#[derive(Debug, Clone)]
pub struct SamplePathBatch {
    grid: PathGrid,
    n_paths: usize,
    /// Index of the first path within the logical ensemble; path `i` of this
    /// batch is ensemble path `first_path + i` and owns that random stream.
    first_path: usize,
    seed: u64,
    conditioning: Conditioning,
    data: Vec<f64>,
}

impl SamplePathBatch {
    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn first_path(&self) -> usize {
        self.first_path
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn conditioning(&self) -> &Conditioning {
        &self.conditioning
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.grid.n_steps;
        &self.data[i * n..(i + 1) * n]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.grid.n_steps)
    }

    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    /// Debug dump: header (grid, seed, model tag) followed by the row-major
    /// path matrix as little-endian 64-bit floats.
    pub fn dump<P: AsRef<Path>>(&self, path: P, model_tag: &str) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(b"FPTB")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&self.grid.dt.to_le_bytes())?;
        w.write_all(&(self.grid.n_steps as u64).to_le_bytes())?;
        w.write_all(&(self.n_paths as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        let tag = model_tag.as_bytes();
        w.write_all(&(tag.len() as u32).to_le_bytes())?;
        w.write_all(tag)?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read back a [`SamplePathBatch::dump`] file; returns the batch (with
    /// `Unconditional` as a placeholder conditioning) and the model tag.
    pub fn load<P: AsRef<Path>>(path: P) -> Result<(SamplePathBatch, String)> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"FPTB" {
            return Err(Error::InvalidParameter("not a path-batch dump".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        r.read_exact(&mut b8)?;
        let dt = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let n_steps = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let n_paths = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let seed = u64::from_le_bytes(b8);
        r.read_exact(&mut b4)?;
        let mut tag = vec![0u8; u32::from_le_bytes(b4) as usize];
        r.read_exact(&mut tag)?;
        let tag = String::from_utf8(tag)
            .map_err(|_| Error::InvalidParameter("bad model tag".into()))?;
        let mut data = vec![0.0; n_paths * n_steps];
        for v in &mut data {
            r.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        Ok((
            SamplePathBatch {
                grid: PathGrid::new(dt, n_steps)?,
                n_paths,
                first_path: 0,
                seed,
                conditioning: Conditioning::Unconditional,
                data,
            },
            tag,
        ))
    }

    pub(crate) fn from_parts(
        grid: PathGrid,
        n_paths: usize,
        first_path: usize,
        seed: u64,
        conditioning: Conditioning,
        data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), n_paths * grid.n_steps);
        SamplePathBatch {
            grid,
            n_paths,
            first_path,
            seed,
            conditioning,
            data,
        }
    }
}

/// Apply [`Conditioning`] in place. Path `i` of the batch owns initial-state
/// stream `first_path + i`.
pub(crate) fn apply_conditioning(
    model: &Covariance,
    grid: &PathGrid,
    seed: u64,
    first_path: usize,
    conditioning: &Conditioning,
    data: &mut [f64],
) -> Result<()> {
    match conditioning {
        Conditioning::Unconditional => Ok(()),
        Conditioning::FixedStart(x0) => {
            let gamma: Vec<f64> = (0..grid.n_steps).map(|k| model.eval(grid.time(k))).collect();
            data.par_chunks_mut(grid.n_steps).for_each(|row| {
                let shift = *x0 - row[0];
                for (v, g) in row.iter_mut().zip(&gamma).skip(1) {
                    *v += shift * g;
                }
                row[0] = *x0;
            });
            Ok(())
        }
        Conditioning::TruncatedStart(spec) => {
            // Validate the truncated mass once before touching any path.
            if spec.initial_mass() < crate::upcrossing::MIN_INITIAL_MASS {
                return Err(Error::InitialMassUnderflow {
                    mass: spec.initial_mass(),
                });
            }
            let gamma: Vec<f64> = (0..grid.n_steps).map(|k| model.eval(grid.time(k))).collect();
            data.par_chunks_mut(grid.n_steps)
                .enumerate()
                .try_for_each(|(i, row)| -> Result<()> {
                    let mut rng =
                        stream(seed, StreamKind::InitialState, (first_path + i) as u64);
                    // The path's own standard-normal start is the first
                    // rejection proposal; accepted starts leave the path
                    // untouched, which couples the conditional-start and
                    // rejection estimators of the upcrossing density.
                    let x0 = spec.sample_with_proposal(row[0], &mut rng)?;
                    let shift = x0 - row[0];
                    for (v, g) in row.iter_mut().zip(&gamma).skip(1) {
                        *v += shift * g;
                    }
                    row[0] = x0;
                    Ok(())
                })
        }
    }
}

/// Drive a large ensemble through `visit` in memory-bounded chunks.
///
/// Chunks are aligned to even path indices so that every chunk regenerates
/// exactly the same per-pair streams as one monolithic call; the
/// concatenation of chunk batches is byte-identical to
/// [`plan_embedding`]-based generation of the full ensemble at once.
pub fn for_each_chunk<F>(
    plan: &EmbeddingPlan,
    model: &Covariance,
    grid: &PathGrid,
    n_paths: usize,
    seed: u64,
    conditioning: &Conditioning,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&SamplePathBatch) -> Result<()>,
{
    let chunk = chunk_size(grid.n_steps);
    let mut start = 0;
    while start < n_paths {
        let count = chunk.min(n_paths - start);
        let batch = embedding::generate_batch_range(
            plan,
            model,
            grid,
            seed,
            conditioning,
            start,
            count,
        )?;
        visit(&batch)?;
        start += count;
    }
    Ok(())
}

/// One-shot convenience over [`for_each_chunk`]'s range generator.
pub fn generate_batch(
    plan: &EmbeddingPlan,
    model: &Covariance,
    grid: &PathGrid,
    n_paths: usize,
    seed: u64,
    conditioning: &Conditioning,
) -> Result<SamplePathBatch> {
    embedding::generate_batch_range(plan, model, grid, seed, conditioning, 0, n_paths)
}

fn chunk_size(n_steps: usize) -> usize {
    // ~32 MB of path data per chunk, even-aligned.
    let target = (32 << 20) / (8 * n_steps);
    (target.max(2) / 2) * 2
}
