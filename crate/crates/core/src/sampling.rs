//! Seeded random inputs. Every randomized routine in the crate draws from a
//! `ChaCha8Rng` seeded with `seed_from_u64`, so results are reproducible.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::Result;
use crate::main_component::{MainParams, SymmetricParams};
use crate::scalar::{rational, Rational};
use crate::soliton::SolitonMatrix;

pub const NUMERATOR_BOUND: i64 = 50;
pub const DENOMINATOR_BOUND: i64 = 10;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Numerator in `[-50, 50]`, denominator in `[1, 10]`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    rational(rng.gen_range(-NUMERATOR_BOUND..=NUMERATOR_BOUND), rng.gen_range(1..=DENOMINATOR_BOUND))
}

pub fn random_nonzero_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    loop {
        let q = random_rational(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

/// `n` pairwise distinct rationals (rejection sampling).
pub fn random_distinct_rationals<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    while out.len() < n {
        let q = random_rational(rng);
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Nonzero λ and pairwise distinct κ.
pub fn random_main_params<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Result<MainParams<Rational>> {
    let lambda = (0..g).map(|_| random_nonzero_rational(rng)).collect();
    let kappa = random_distinct_rationals(rng, 2 * g);
    MainParams::new(lambda, kappa)
}

/// `n` rationals in `[lo, hi]` with denominators ≤ 10, sorted descending, with
/// consecutive gaps of at least `gap`.
pub fn random_separated<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: i64, hi: i64, gap: &Rational) -> Vec<Rational> {
    let den = DENOMINATOR_BOUND;
    loop {
        let mut xs: Vec<Rational> = (0..n).map(|_| rational(rng.gen_range(lo * den..=hi * den), den)).collect();
        xs.sort_by(|a, b| b.cmp(a));
        if xs.windows(2).all(|w| &(&w[0] - &w[1]) >= gap) {
            return xs;
        }
    }
}

/// Parameters whose θ has strictly positive coefficients: κ descending in
/// `[-3, 3]` with gaps ≥ 1/2 (every Vandermonde factor is positive) and λ > 0.
pub fn random_regular_params<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Result<MainParams<Rational>> {
    let kappa = random_separated(rng, 2 * g, -3, 3, &rational(1, 2));
    let lambda = (0..g).map(|_| rational(rng.gen_range(1..=20), rng.gen_range(1..=DENOMINATOR_BOUND))).collect();
    MainParams::new(lambda, kappa)
}

pub fn random_symmetric_params<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Result<SymmetricParams<Rational>> {
    let s = (0..g).map(|_| random_nonzero_rational(rng)).collect();
    let mut q = BTreeMap::new();
    for i in 0..g {
        for j in i + 1..g {
            q.insert((i, j), random_nonzero_rational(rng));
        }
    }
    SymmetricParams::new(s, q)
}

/// Random `k × n` matrix of full row rank (rejection sampling).
pub fn random_full_rank_matrix<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize) -> Result<SolitonMatrix> {
    loop {
        let rows: Vec<Vec<Rational>> = (0..k).map(|_| (0..n).map(|_| random_rational(rng)).collect()).collect();
        if let Ok(m) = SolitonMatrix::new(rows) {
            return Ok(m);
        }
    }
}

/// Matrix with all maximal minors positive: the Vandermonde rows `x_j^i` for
/// increasing positive nodes `x_j`, with columns scaled by positive weights.
pub fn random_totally_positive_matrix<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize) -> Result<SolitonMatrix> {
    let mut pool: Vec<i64> = (1..=4 * n as i64).collect();
    pool.shuffle(rng);
    let mut nodes: Vec<Rational> = pool[..n].iter().map(|&x| rational(x, 2)).collect();
    nodes.sort();
    let weights: Vec<Rational> = (0..n).map(|_| rational(rng.gen_range(1..=9), rng.gen_range(1..=9))).collect();
    let rows = (0..k)
        .map(|i| {
            nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| {
                    let mut p = Rational::one();
                    for _ in 0..i {
                        p *= x;
                    }
                    p * w
                })
                .collect()
        })
        .collect();
    SolitonMatrix::new(rows)
}

/// Generic (random, nonzero) a-vector for negative controls.
pub fn random_a_vector<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Vec<Rational> {
    (0..1usize << g).map(|_| random_nonzero_rational(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::pluecker_minors;
    use num_traits::Signed;

    #[test]
    fn reproducible_and_valid() {
        let a = random_main_params(&mut rng_from_seed(3), 4).unwrap();
        let b = random_main_params(&mut rng_from_seed(3), 4).unwrap();
        assert_eq!(a, b);
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let q = random_rational(&mut rng);
            assert!(q.numer().abs() <= 50.into() && *q.denom() <= 10.into());
        }
    }

    #[test]
    fn regular_params_are_separated() {
        let mut rng = rng_from_seed(9);
        for g in 1..=3 {
            let p = random_regular_params(&mut rng, g).unwrap();
            let k = p.kappa();
            assert!(k.windows(2).all(|w| &w[0] - &w[1] >= rational(1, 2)));
            assert!(k.iter().all(|x| x.abs() <= rational(3, 1)));
            assert!(p.lambda().iter().all(|l| l.is_positive()));
        }
    }

    #[test]
    fn totally_positive_minors() {
        let mut rng = rng_from_seed(11);
        for (k, n) in [(1, 2), (2, 4), (3, 6)] {
            let m = random_totally_positive_matrix(&mut rng, k, n).unwrap();
            assert!(pluecker_minors(&m).iter().all(|(_, p)| p.is_positive()));
        }
    }
}
