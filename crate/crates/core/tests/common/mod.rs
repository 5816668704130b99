#![allow(dead_code)]

use multicorr::cyclic::CyclicSignal;
use multicorr::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed unit disc.
pub fn disc_point<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
}

pub fn bounded_signal<R: Rng>(rng: &mut R, m: usize) -> CyclicSignal {
    CyclicSignal::new((0..m).map(|_| disc_point(rng)).collect()).unwrap()
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `Σ_x f(x) e(−xξ/M) / M` summed term by term.
pub fn naive_dft(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    (0..m)
        .map(|xi| {
            values
                .iter()
                .enumerate()
                .map(|(x, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * ((x * xi) % m) as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64
        })
        .collect()
}
