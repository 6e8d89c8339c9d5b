//! Seeded randomness. Every random routine in the crate draws from an
//! explicit [`SeededRng`]; independent streams are derived with [`derive_seed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{C64, CMat};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer over `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, stream: u64) -> SeededRng {
    seeded(derive_seed(seed, stream))
}

/// Standard complex normal (unit expected modulus squared).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform on the square `[-1,1] + i[-1,1]`.
pub fn complex_box<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Uniform on the square, rejecting values closer than `floor` to zero.
pub fn complex_away_from_zero<R: Rng + ?Sized>(rng: &mut R, floor: f64) -> C64 {
    loop {
        let z = complex_box(rng);
        if z.norm() >= floor {
            return z;
        }
    }
}

pub fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = normal_matrix(&mut stream(7, 1), 2, 2);
        let b = normal_matrix(&mut stream(7, 1), 2, 2);
        let c = normal_matrix(&mut stream(7, 2), 2, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
