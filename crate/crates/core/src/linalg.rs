//! Rank computations: fraction-free elimination over Z for exact rank, and
//! elimination over F_p for word-size primes.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{Field, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::input("matrix rows have different lengths"));
        }
        let n = rows.len();
        Ok(RationalMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let lcm = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
                row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
            })
            .collect()
    }
}

/// Exact rank by Bareiss fraction-free elimination.
pub fn rank_exact(m: &RationalMatrix) -> usize {
    let mut a = m.integer_rows();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        // smallest nonzero pivot keeps intermediate entries short
        let pivot = (rank..rows)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].bits());
        let Some(p) = pivot else { continue };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        let pv = &prow[col];
        for row in rest.iter_mut() {
            let f = row[col].clone();
            for c in col + 1..cols {
                let v = pv * &row[c] - &f * &prow[c];
                // exact by Sylvester's identity
                row[c] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pv.clone();
        rank += 1;
    }
    rank
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn reduce_int(x: &BigInt, p: u64) -> u64 {
    let r = (x.magnitude() % p).to_u64().expect("reduced below p");
    if x.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// Reduces every entry mod `p`; fails if `p` divides a denominator.
pub fn reduce_mod_p(m: &RationalMatrix, p: u64) -> Result<Vec<Vec<u64>>> {
    (0..m.rows)
        .map(|r| {
            m.row(r)
                .iter()
                .map(|q| {
                    let d = reduce_int(q.denom(), p);
                    if d == 0 {
                        return Err(Error::BadPrime(p));
                    }
                    Ok(mul_mod(reduce_int(q.numer(), p), pow_mod(d, p - 2, p), p))
                })
                .collect()
        })
        .collect()
}

/// Rank of the reduction mod the prime `p` (never above the rational rank).
pub fn rank_mod_p(m: &RationalMatrix, p: u64) -> Result<usize> {
    if !primal_check::miller_rabin(p) {
        return Err(Error::input(format!("{p} is not prime")));
    }
    let mut a = reduce_mod_p(m, p)?;
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else { continue };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][col], p - 2, p);
        for c in col..cols {
            a[rank][c] = mul_mod(a[rank][c], inv, p);
        }
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            for c in col..cols {
                let s = mul_mod(f, prow[c], p);
                row[c] = if row[c] >= s { row[c] - s } else { row[c] + p - s };
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// Uniform random prime in `[2^62, 2^63)`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(1u64 << 62..1u64 << 63) | 1;
        if primal_check::miller_rabin(c) {
            return c;
        }
    }
}

/// Row echelon form over any field; returns the rank and the product of pivots with
/// the sign of the row permutation (the determinant when the matrix is square).
pub fn gaussian_elimination<F: Field>(mut rows: Vec<Vec<F>>) -> (usize, F) {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut det = F::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            det = F::zero();
            continue;
        };
        if piv != rank {
            rows.swap(piv, rank);
            det = -det;
        }
        let pv = rows[rank][col].clone();
        det = det * pv.clone();
        let (top, rest) = rows.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].clone() / pv.clone();
            for c in col..ncols {
                row[c] = row[c].clone() - f.clone() * prow[c].clone();
            }
        }
        rank += 1;
    }
    if rank < nrows.min(ncols) || nrows != ncols {
        if rank < nrows {
            det = F::zero();
        }
    }
    (rank, det)
}

pub fn determinant<F: Field>(rows: Vec<Vec<F>>) -> Result<F> {
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(Error::input("determinant of a non-square matrix"));
    }
    Ok(gaussian_elimination(rows).1)
}

pub fn rank<F: Field>(rows: Vec<Vec<F>>) -> usize {
    gaussian_elimination(rows).0
}

/// Largest absolute numerator or denominator, in bits (diagnostics).
pub fn max_entry_bits(m: &RationalMatrix) -> u64 {
    m.data.iter().map(|q| q.numer().abs().bits().max(q.denom().bits())).max().unwrap_or(0)
}
