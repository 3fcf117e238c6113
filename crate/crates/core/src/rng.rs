//! Seeded random streams and uniform sampling in Euclidean balls.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A reproducible random stream. Identical seeds give identical draws on
/// every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for run `run_index` under `master_seed`.
    pub fn for_run(master_seed: u64, run_index: u64) -> Self {
        Self::new(derive_seed(master_seed, run_index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// SplitMix64 finaliser applied to `(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform point in the solid ball of `radius` about `center`.
///
/// Direction from a normalised standard-normal vector, radius scaled by
/// `U^(1/n)` with `U` uniform on `(0, 1]`. The returned point is guaranteed
/// to satisfy `|out - center| <= radius` in floating point.
pub fn sample_in_ball<R: Rng + ?Sized>(center: &[f64], radius: f64, rng: &mut R) -> Vec<f64> {
    let n = center.len();
    let mut dir = vec![0.0; n];
    let norm = loop {
        for d in dir.iter_mut() {
            *d = rng.sample(StandardNormal);
        }
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            break norm;
        }
    };
    let u = 1.0 - rng.random::<f64>();
    let mut scale = radius * u.powf(1.0 / n as f64) / norm;
    loop {
        let out: Vec<f64> = center
            .iter()
            .zip(&dir)
            .map(|(c, d)| c + scale * d)
            .collect();
        let dist = distance(&out, center);
        if dist <= radius {
            return out;
        }
        // rounding pushed the point just past the sphere
        scale *= (radius / dist) * (1.0 - 4.0 * f64::EPSILON);
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    distance_sq(a, b).sqrt()
}

pub(crate) fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
