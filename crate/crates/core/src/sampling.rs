//! Seeded random vectors for property checks and reports.
//!
//! All randomness in the crate flows through [`Sampler`], so a seed fixes
//! every sample a command or test draws.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gauges::{gauge_eval, GaugeSpec};
use crate::space_models::{strong_norm, ModelKind, SpaceModel};
use crate::vector::{GridFunction, SparseVector, Vector};

/// Largest support size drawn by default.
pub const MAX_SUPPORT: usize = 64;

/// Index range random sequences are drawn from. Dyadic weights `2^{-k}`
/// make coordinates past a few dozen invisible to the gauge, so those
/// models draw from a shorter range.
pub fn index_pool(model: &SpaceModel) -> u64 {
    match model.kind {
        ModelKind::LInfDyadic | ModelKind::C0Dyadic | ModelKind::WeakSep { .. } => 64,
        _ => 128,
    }
}

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn nonzero_value(&mut self) -> f64 {
        loop {
            let v: f64 = self.rng.gen_range(-1.0..1.0);
            if v != 0.0 {
                return v;
            }
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// `exp(U(ln lo, ln hi))`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo.ln()..hi.ln()).exp()
    }

    /// Random support of size `1..=max_support` inside `1..=pool`.
    pub fn support(&mut self, pool: u64, max_support: usize) -> Vec<u64> {
        let size = self.rng.gen_range(1..=max_support.min(pool as usize));
        let mut idx: Vec<u64> = sample(&mut self.rng, pool as usize, size)
            .into_iter()
            .map(|i| i as u64 + 1)
            .collect();
        idx.sort_unstable();
        idx
    }

    /// Nonzero vector with entries in `(-1, 1)` on the given support.
    pub fn on_support(&mut self, support: &[u64]) -> SparseVector {
        let entries: Vec<(u64, f64)> = support.iter().map(|&k| (k, self.nonzero_value())).collect();
        SparseVector::from_entries(entries).expect("indices are 1-based")
    }

    /// A random nonzero vector in the model's representation.
    pub fn vector(&mut self, model: &SpaceModel, max_support: usize) -> Vector {
        match model.kind {
            ModelKind::LpGrid { cells, .. } => {
                let values = (0..cells).map(|_| self.nonzero_value()).collect();
                Vector::Grid(GridFunction::new(values).expect("finite values"))
            }
            _ => {
                let support = self.support(index_pool(model), max_support);
                Vector::Sparse(self.on_support(&support))
            }
        }
    }

    /// Like [`Sampler::vector`], but sequences always carry an entry of
    /// size at least 1/2 at one of the indices 1, 2, 3. This keeps the
    /// gauge comparable to the squared norm under fast-decaying weights.
    pub fn anchored_vector(&mut self, model: &SpaceModel, max_support: usize) -> Vector {
        match self.vector(model, max_support.saturating_sub(1).max(1)) {
            Vector::Sparse(s) => {
                let k = self.rng.gen_range(1..=3u64);
                let v =
                    self.rng.gen_range(0.5..1.0) * if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let anchor = SparseVector::from_entries([(k, v - s.get(k))]).expect("valid index");
                Vector::Sparse(s.add(&anchor))
            }
            grid => grid,
        }
    }

    /// A unit direction on the support of `x` whose lowest-index entry has
    /// size at least half of the largest. Grids get [`Sampler::direction_like`].
    pub fn anchored_direction_like(&mut self, model: &SpaceModel, x: &Vector) -> Result<Vector> {
        let Vector::Sparse(s) = x else {
            return self.direction_like(model, x);
        };
        let support: Vec<u64> = s.indices().collect();
        let mut v = self.on_support(&support);
        if let Some(&first) = support.first() {
            let sign = if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mag = self.rng.gen_range(0.5..1.0);
            let fix = SparseVector::from_entries([(first, sign * mag - v.get(first))])?;
            v = v.add(&fix);
        }
        let v = Vector::Sparse(v);
        let n = strong_norm(model, &v)?;
        Ok(v.scale(1.0 / n))
    }

    /// A random vector of unit strong norm.
    pub fn unit_vector(&mut self, model: &SpaceModel, max_support: usize) -> Result<Vector> {
        let v = self.vector(model, max_support);
        let n = strong_norm(model, &v)?;
        Ok(v.scale(1.0 / n))
    }

    /// A random vector with strong norm `r`.
    pub fn vector_with_norm(
        &mut self,
        model: &SpaceModel,
        max_support: usize,
        r: f64,
    ) -> Result<Vector> {
        Ok(self.unit_vector(model, max_support)?.scale(r))
    }

    /// A unit-norm direction with the same support (or grid) as `x`.
    pub fn direction_like(&mut self, model: &SpaceModel, x: &Vector) -> Result<Vector> {
        let v = match x {
            Vector::Sparse(s) => {
                let support: Vec<u64> = s.indices().collect();
                Vector::Sparse(self.on_support(&support))
            }
            Vector::Grid(f) => {
                let values = (0..f.cells()).map(|_| self.nonzero_value()).collect();
                Vector::Grid(GridFunction::new(values)?)
            }
        };
        let n = strong_norm(model, &v)?;
        Ok(v.scale(1.0 / n))
    }
}

/// Rescales `x` so that `G(x) = target`, using `G(tx) = t^s G(x)`.
pub fn scale_to_gauge(
    g: &GaugeSpec,
    model: &SpaceModel,
    x: &Vector,
    target: f64,
) -> Result<Vector> {
    let current = gauge_eval(g, model, x)?;
    let t = (target / current).powf(1.0 / g.effective_s());
    Ok(x.scale(t))
}
