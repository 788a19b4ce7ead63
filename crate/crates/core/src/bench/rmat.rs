use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BenchError;

pub const MAX_SCALE: u32 = 24;

/// Recursive-matrix generator settings. Defaults are the Graph500 ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmatParams {
    pub scale: u32,
    pub edge_factor: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub rng_seed: u64,
}

impl Default for RmatParams {
    fn default() -> Self {
        RmatParams {
            scale: 14,
            edge_factor: 16,
            a: 0.57,
            b: 0.19,
            c: 0.19,
            d: 0.05,
            rng_seed: 1,
        }
    }
}

impl RmatParams {
    pub fn new(scale: u32, edge_factor: usize, rng_seed: u64) -> Self {
        RmatParams {
            scale,
            edge_factor,
            rng_seed,
            ..Default::default()
        }
    }

    pub fn vertex_count(&self) -> usize {
        1usize << self.scale
    }

    pub fn edge_count(&self) -> usize {
        self.edge_factor << self.scale
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.scale > MAX_SCALE {
            return Err(BenchError::Params(format!(
                "scale {} exceeds the limit of {MAX_SCALE}",
                self.scale
            )));
        }
        let probs = [self.a, self.b, self.c, self.d];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(BenchError::Params("quadrant probabilities must lie in [0, 1]".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(BenchError::Params(format!(
                "quadrant probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

/// `edge_factor * 2^scale` directed tuples. Duplicates and self-loops are
/// kept; the store collapses them.
pub fn rmat_generate(p: &RmatParams) -> Result<Vec<(usize, usize)>, BenchError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.rng_seed);
    let ab = p.a + p.b;
    let abc = ab + p.c;
    let mut edges = Vec::with_capacity(p.edge_count());
    for _ in 0..p.edge_count() {
        let (mut src, mut dst) = (0usize, 0usize);
        for level in (0..p.scale).rev() {
            let r: f64 = rng.random();
            let bit = 1usize << level;
            if r < p.a {
            } else if r < ab {
                dst |= bit;
            } else if r < abc {
                src |= bit;
            } else {
                src |= bit;
                dst |= bit;
            }
        }
        edges.push((src, dst));
    }
    Ok(edges)
}
