//! Scrambled Halton sequence: radical inverses in the first `d` prime bases
//! with a random Cranley–Patterson shift per coordinate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut k = 2u64;
    while primes.len() < n {
        if primes.iter().take_while(|&&p| p * p <= k).all(|&p| !k.is_multiple_of(p)) {
            primes.push(k);
        }
        k += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    x
}

/// `n` points in `[0, 1)^dim`, deterministic in `seed`.
pub fn scrambled_halton(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let bases = first_primes(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (1..=n as u64)
        .map(|i| {
            bases
                .iter()
                .zip(&shifts)
                .map(|(&b, &s)| (radical_inverse(i, b) + s).fract())
                .collect()
        })
        .collect()
}
