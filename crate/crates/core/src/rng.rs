//! Seeded randomness.
//!
//! Every random object in the crate is drawn from a ChaCha8 stream seeded with
//! a single `u64` through [`rand::SeedableRng::seed_from_u64`], so a seed fully
//! determines the output across platforms and releases of this crate.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex standard normal sample (independent real and imaginary parts).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v / C64::from(n)
}

/// `count` orthonormal vectors in `C^dim` (Gram–Schmidt on Gaussian samples).
pub fn random_orthonormal<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> Vec<DVector<C64>> {
    assert!(count <= dim, "cannot fit {count} orthonormal vectors in dimension {dim}");
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v = DVector::from_fn(dim, |_, _| complex_normal(rng));
        // two passes keep the Gram deviation at roundoff level
        for _ in 0..2 {
            for u in &out {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            out.push(v / C64::from(n));
        }
    }
    out
}
