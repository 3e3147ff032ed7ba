//! Finite formal sums `Σ coeff·exp[ω_x x + ω_y y + ω_t t]`.
//!
//! The frequency triple of a term is determined by its key through a
//! [`FrequencyMode`]. Two modes exist:
//!
//! * [`LatticeMode`]: keys are lattice labels `c ∈ Z^g`, frequencies are the
//!   linear forms `c·u`, `c·v`, `c·w` in a polynomial ring, coefficients are
//!   polynomials. This is the symbolic theta function.
//! * [`NumericMode`]: keys are exact frequency triples, coefficients are field
//!   elements. Keys that coincide are merged.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::marker::PhantomData;
use std::sync::Arc;

use num_traits::Zero;

use crate::cube::{check_genus, vertices};
use crate::error::{Error, Result};
use crate::poly::{Polynomial, Ring};
use crate::scalar::{hirota_quartic, Field, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
    T,
}

pub trait FrequencyMode: Clone + Debug + PartialEq {
    type Key: Clone + Debug + Ord + Send + Sync;
    type Coeff: Scalar;

    fn add_keys(&self, a: &Self::Key, b: &Self::Key) -> Self::Key;
    fn omega(&self, key: &Self::Key, dir: Direction) -> Self::Coeff;
}

/// Symbolic mode over the Hirota ring of genus `g`.
#[derive(Clone, Debug)]
pub struct LatticeMode {
    ring: Arc<Ring>,
    genus: usize,
}

impl PartialEq for LatticeMode {
    fn eq(&self, other: &Self) -> bool {
        self.genus == other.genus && (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring)
    }
}

/// Variables `a_<bits>` for every vertex (little-endian vertex order), then `u1..ug`, `v1..vg`, `w1..wg`.
pub fn hirota_ring(g: usize) -> Result<Arc<Ring>> {
    check_genus(g, crate::cube::MAX_GENUS)?;
    let mut names: Vec<String> = vertices(g)?.iter().map(|v| format!("a_{v}")).collect();
    for prefix in ["u", "v", "w"] {
        names.extend((1..=g).map(|i| format!("{prefix}{i}")));
    }
    Ring::new(names)
}

impl LatticeMode {
    pub fn new(g: usize) -> Result<Self> {
        Ok(LatticeMode { ring: hirota_ring(g)?, genus: g })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Ring index of `a_c` for the vertex with little-endian index `k`.
    pub fn a_var(&self, k: usize) -> usize {
        k
    }

    /// Ring index of `u_i` / `v_i` / `w_i` (0-based `i`).
    pub fn uvw_var(&self, dir: Direction, i: usize) -> usize {
        let block = match dir {
            Direction::X => 0,
            Direction::Y => 1,
            Direction::T => 2,
        };
        (1 << self.genus) + block * self.genus + i
    }
}

impl FrequencyMode for LatticeMode {
    type Key = Vec<i32>;
    type Coeff = Polynomial<Rational>;

    fn add_keys(&self, a: &Vec<i32>, b: &Vec<i32>) -> Vec<i32> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn omega(&self, key: &Vec<i32>, dir: Direction) -> Polynomial<Rational> {
        let mut p = Polynomial::zero_in(&self.ring);
        for (i, &c) in key.iter().enumerate() {
            if c != 0 {
                let var = Polynomial::var_index(&self.ring, self.uvw_var(dir, i));
                p = p + var.times(c as i64);
            }
        }
        p
    }
}

/// Numeric mode: keys are exact `(ω_x, ω_y, ω_t)` triples.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericMode<C>(PhantomData<C>);

impl<C> Default for NumericMode<C> {
    fn default() -> Self {
        NumericMode(PhantomData)
    }
}

impl<C: Field + Ord> FrequencyMode for NumericMode<C> {
    type Key = [C; 3];
    type Coeff = C;

    fn add_keys(&self, a: &[C; 3], b: &[C; 3]) -> [C; 3] {
        [a[0].clone() + b[0].clone(), a[1].clone() + b[1].clone(), a[2].clone() + b[2].clone()]
    }

    fn omega(&self, key: &[C; 3], dir: Direction) -> C {
        match dir {
            Direction::X => key[0].clone(),
            Direction::Y => key[1].clone(),
            Direction::T => key[2].clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSum<M: FrequencyMode> {
    mode: M,
    terms: BTreeMap<M::Key, M::Coeff>,
}

pub type SymbolicExpSum = ExpSum<LatticeMode>;
pub type NumericExpSum<C = Rational> = ExpSum<NumericMode<C>>;

impl<M: FrequencyMode> ExpSum<M> {
    pub fn new(mode: M) -> Self {
        ExpSum { mode, terms: BTreeMap::new() }
    }

    pub fn from_terms(mode: M, terms: impl IntoIterator<Item = (M::Key, M::Coeff)>) -> Self {
        let mut s = Self::new(mode);
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    pub fn mode(&self) -> &M {
        &self.mode
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&M::Key, &M::Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &M::Key) -> Option<&M::Coeff> {
        self.terms.get(key)
    }

    /// Adds `c·e^{key}`, merging with an existing term and dropping zeros.
    pub fn add_term(&mut self, key: M::Key, c: M::Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let s = existing.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check_mode(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::input("exponential sums have different frequency modes"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &M::Coeff) -> Self {
        let mut out = Self::new(self.mode.clone());
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.clone() * c.clone());
        }
        out
    }

    pub fn times(&self, n: i64) -> Self {
        self.scale(&M::Coeff::from_int(n))
    }

    /// Product: keys add, coefficients convolve.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let mut out = Self::new(self.mode.clone());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(self.mode.add_keys(ka, kb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Partial derivative: each coefficient is multiplied by its frequency in `dir`.
    pub fn derivative(&self, dir: Direction) -> Self {
        let mut out = Self::new(self.mode.clone());
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone() * self.mode.omega(k, dir));
        }
        out
    }

    fn derivative_n(&self, dir: Direction, n: usize) -> Self {
        (0..n).fold(self.clone(), |s, _| s.derivative(dir))
    }

    /// `ττ_xxxx − 4τ_xxxτ_x + 3τ_xx² + 4τ_xτ_t − 4ττ_xt + 3ττ_yy − 3τ_y²`, by direct expansion.
    pub fn hirota_form(&self) -> Self {
        use Direction::*;
        let tau = self;
        let tx = tau.derivative(X);
        let txx = tx.derivative(X);
        let txxx = txx.derivative(X);
        let txxxx = txxx.derivative(X);
        let tt = tau.derivative(T);
        let txt = tx.derivative(T);
        let ty = tau.derivative(Y);
        let tyy = tau.derivative_n(Y, 2);
        let prod = |a: &Self, b: &Self| a.mul(b).expect("same mode");
        [
            prod(tau, &txxxx),
            prod(&txxx, &tx).times(-4),
            prod(&txx, &txx).times(3),
            prod(&tx, &tt).times(4),
            prod(tau, &txt).times(-4),
            prod(tau, &tyy).times(3),
            prod(&ty, &ty).times(-3),
        ]
        .iter()
        .fold(Self::new(self.mode.clone()), |acc, s| acc.add(s).expect("same mode"))
    }

    /// The same bilinear form via the closed pair sum
    /// `Σ_{k<ℓ} c_k c_ℓ P(ω_k − ω_ℓ) e^{k+ℓ}` with `P(x,y,t) = x⁴ + 3y² − 4xt`.
    pub fn hirota_form_pairwise(&self) -> Self {
        let terms: Vec<_> = self.terms.iter().collect();
        let omegas: Vec<[M::Coeff; 3]> = terms
            .iter()
            .map(|(k, _)| [Direction::X, Direction::Y, Direction::T].map(|d| self.mode.omega(k, d)))
            .collect();
        let mut out = Self::new(self.mode.clone());
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                let d = |n: usize| omegas[i][n].clone() - omegas[j][n].clone();
                let p = hirota_quartic(&d(0), &d(1), &d(2));
                if p.is_zero() {
                    continue;
                }
                let c = terms[i].1.clone() * terms[j].1.clone() * p;
                out.add_term(self.mode.add_keys(terms[i].0, terms[j].0), c);
            }
        }
        out
    }
}

impl ExpSum<LatticeMode> {
    /// `θ(z) = Σ_{c∈{0,1}^g} a_c e^{cᵀz}` with symbolic coefficients `a_c`.
    pub fn theta(g: usize) -> Result<Self> {
        let mode = LatticeMode::new(g)?;
        let ring = mode.ring.clone();
        let terms: Vec<_> = vertices(g)?
            .iter()
            .map(|v| {
                let key: Vec<i32> = v.coords().iter().map(|&b| b as i32).collect();
                (key, Polynomial::var_index(&ring, mode.a_var(v.index())))
            })
            .collect();
        Ok(Self::from_terms(mode, terms))
    }

    /// Substitutes values for every ring variable (by index) and passes to numeric frequencies.
    pub fn specialize<F: Field + Ord>(
        &self,
        value: impl Fn(usize) -> F + Copy,
    ) -> Result<ExpSum<NumericMode<F>>>
    where
        Rational: Into<F>,
    {
        let lift = |p: &Polynomial<Rational>| -> Result<F> {
            let mut acc = F::zero();
            for (m, c) in p.terms() {
                let mut t: F = c.clone().into();
                for (v, e) in m.exponents() {
                    t = t * value(v).pow(e);
                }
                acc = acc + t;
            }
            Ok(acc)
        };
        let mut out = ExpSum::new(NumericMode::default());
        for (k, c) in &self.terms {
            let key = [
                lift(&self.mode.omega(k, Direction::X))?,
                lift(&self.mode.omega(k, Direction::Y))?,
                lift(&self.mode.omega(k, Direction::T))?,
            ];
            out.add_term(key, lift(c)?);
        }
        Ok(out)
    }
}

impl<C: Field + Ord> ExpSum<NumericMode<C>> {
    pub fn numeric(terms: impl IntoIterator<Item = ([C; 3], C)>) -> Self {
        Self::from_terms(NumericMode::default(), terms)
    }

    /// Multiplies by `e^{shift·(x,y,t)}`, i.e. translates every key.
    pub fn shift_keys(&self, shift: &[C; 3]) -> Self {
        let mode = self.mode.clone();
        Self::from_terms(mode.clone(), self.terms.iter().map(|(k, c)| (mode.add_keys(k, shift), c.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_traits::One;

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn identity_and_binomial() {
        let s = NumericExpSum::numeric([([q(1), q(2), q(3)], q(5)), ([q(0), q(1), q(0)], q(-2))]);
        let one = NumericExpSum::numeric([([q(0), q(0), q(0)], q(1))]);
        assert_eq!(one.mul(&s).unwrap(), s);

        let c = [q(1), q(1), q(1)];
        let two_c = [q(2), q(2), q(2)];
        let zero = [q(0), q(0), q(0)];
        let t = NumericExpSum::numeric([(zero.clone(), q(3)), (c.clone(), q(5))]);
        let sq = t.mul(&t).unwrap();
        assert_eq!(sq, NumericExpSum::numeric([(zero, q(9)), (c, q(30)), (two_c, q(25))]));
    }

    #[test]
    fn theta_square_has_three_keys() {
        let th = SymbolicExpSum::theta(1).unwrap();
        let sq = th.mul(&th).unwrap();
        let keys: Vec<_> = sq.terms().map(|(k, _)| k.clone()).collect();
        assert_eq!(keys, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn derivatives_symbolic() {
        let th = SymbolicExpSum::theta(1).unwrap();
        let ring = th.mode().ring().clone();
        let a1 = Polynomial::var(&ring, "a_1").unwrap();
        let u1 = Polynomial::var(&ring, "u1").unwrap();
        let dx = th.derivative(Direction::X);
        assert_eq!(dx.len(), 1, "constant term drops");
        assert_eq!(dx.coefficient(&vec![1]).unwrap(), &(&u1 * &a1));
        let d4 = th.derivative_n(Direction::X, 4);
        assert_eq!(d4.coefficient(&vec![1]).unwrap(), &(u1.pow(4) * a1));
    }

    #[test]
    fn hirota_of_single_exponential_vanishes() {
        let s = NumericExpSum::numeric([([q(3), q(-1), q(7)], q(4))]);
        assert!(s.hirota_form().is_empty());
        assert!(s.hirota_form_pairwise().is_empty());
    }

    #[test]
    fn hirota_genus_one_theta() {
        let th = SymbolicExpSum::theta(1).unwrap();
        let ring = th.mode().ring().clone();
        let var = |n: &str| Polynomial::var(&ring, n).unwrap();
        let quartic = var("u1").pow(4) + var("v1").pow(2).times(3) - (var("u1") * var("w1")).times(4);
        let expect = var("a_0") * var("a_1") * quartic;
        for h in [th.hirota_form(), th.hirota_form_pairwise()] {
            assert_eq!(h.len(), 1);
            assert_eq!(h.coefficient(&vec![1]).unwrap(), &expect);
        }
    }

    #[test]
    fn equal_frequencies_cancel_pairwise() {
        let w = [q(1), q(2), q(3)];
        let s = NumericExpSum::numeric([(w.clone(), q(2)), (w, q(3))]);
        assert_eq!(s.len(), 1);
        assert!(s.hirota_form_pairwise().is_empty());
        assert!(s.hirota_form().is_empty());
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = SymbolicExpSum::theta(1).unwrap();
        let b = SymbolicExpSum::theta(2).unwrap();
        assert!(a.mul(&b).is_err());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn specialize_theta() {
        // g = 1, a = (1, 2), (u, v, w) = (2, 8, 26)
        let th = SymbolicExpSum::theta(1).unwrap();
        let vals = [q(1), q(2), q(2), q(8), q(26)];
        let num = th.specialize(|v| vals[v].clone()).unwrap();
        let expect = NumericExpSum::numeric([([q(0), q(0), q(0)], Rational::one()), ([q(2), q(8), q(26)], q(2))]);
        assert_eq!(num, expect);
    }
}
