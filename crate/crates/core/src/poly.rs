//! Sparse multivariate polynomials over a [`Scalar`] coefficient ring.
//!
//! A polynomial lives in a [`Ring`] (an ordered list of variable names). Constants
//! built without a ring (`zero()`, `one()`, `from_int`) are compatible with every
//! ring and adopt the ring of whatever they are combined with. The arithmetic
//! operators panic on a ring mismatch; the `checked_*` methods report it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, PartialEq, Eq)]
pub struct Ring {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Ring {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Ring>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate variable {n:?}")));
            }
        }
        Ok(Arc::new(Ring { names, index }))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }
}

fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// Sparse exponent vector: `(variable, exponent)` pairs sorted by variable, exponents > 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        Monomial(vec![(v as u32, 1)])
    }

    pub fn from_exponents(mut pairs: Vec<(usize, u32)>) -> Self {
        pairs.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == v as u32 => last.1 += e,
                _ => out.push((v as u32, e)),
            }
        }
        Monomial(out)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0
            .binary_search_by_key(&(var as u32), |&(v, _)| v)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `∂/∂var` of the monomial: the multiplier and the reduced monomial.
    fn derivative(&self, var: usize) -> Option<(u32, Monomial)> {
        let pos = self.0.binary_search_by_key(&(var as u32), |&(v, _)| v).ok()?;
        let e = self.0[pos].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((e, Monomial(out)))
    }
}

#[derive(Clone, Debug)]
pub struct Polynomial<C> {
    ring: Option<Arc<Ring>>,
    terms: BTreeMap<Monomial, C>,
}

pub type QPolynomial = Polynomial<Rational>;

impl<C: Scalar> Polynomial<C> {
    pub fn zero_in(ring: &Arc<Ring>) -> Self {
        Polynomial { ring: Some(ring.clone()), terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { ring: None, terms }
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Self> {
        let v = ring.index_of(name).ok_or_else(|| Error::input(format!("unknown variable {name:?}")))?;
        Ok(Self::var_index(ring, v))
    }

    pub fn var_index(ring: &Arc<Ring>, v: usize) -> Self {
        assert!(v < ring.len(), "variable index out of range");
        Self::monomial(ring, Monomial::var(v), C::one())
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: C) -> Self {
        if let Some(v) = m.max_var() {
            assert!(v < ring.len(), "monomial variable out of range");
        }
        let mut p = Self::zero_in(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn ring(&self) -> Option<&Arc<Ring>> {
        self.ring.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in the variables selected by `weight`, each counted with its weight.
    pub fn weighted_degrees(&self, weight: impl Fn(usize) -> u32) -> Vec<u32> {
        let mut degs: Vec<u32> =
            self.terms.keys().map(|m| m.exponents().map(|(v, e)| weight(v) * e).sum()).collect();
        degs.sort_unstable();
        degs.dedup();
        degs
    }

    fn joint_ring(&self, other: &Self) -> Result<Option<Arc<Ring>>> {
        match (&self.ring, &other.ring) {
            (Some(a), Some(b)) if !same_ring(a, b) => Err(Error::input("polynomials live in different rings")),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let ring = self.joint_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Polynomial { ring, terms })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.clone().neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let ring = self.joint_ring(other)?;
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                add_term(&mut terms, ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(Polynomial { ring, terms })
    }

    pub fn scale(&self, c: &C) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, x)| (m.clone(), x.clone() * c.clone()))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    pub fn derivative(&self, name: &str) -> Result<Self> {
        let ring = self.ring.as_ref().ok_or_else(|| Error::input("constant polynomial has no variables"))?;
        let v = ring.index_of(name).ok_or_else(|| Error::input(format!("unknown variable {name:?}")))?;
        Ok(self.derivative_index(v))
    }

    pub fn derivative_index(&self, var: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(var) {
                add_term(&mut terms, dm, c.times(e as i64));
            }
        }
        Polynomial { ring: self.ring.clone(), terms }
    }

    /// Evaluates with `value(var)` supplying every variable that occurs.
    pub fn evaluate_with(&self, mut value: impl FnMut(usize) -> Option<C>) -> Result<C> {
        let mut cache: HashMap<usize, C> = HashMap::new();
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.exponents() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = value(v).ok_or_else(|| {
                            let name = self.ring.as_ref().map(|r| r.name(v).to_string()).unwrap_or_default();
                            Error::input(format!("no value for variable {name}"))
                        })?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t = t * x.pow(e);
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Evaluates at a named assignment; every occurring variable must be assigned.
    pub fn evaluate(&self, assignment: &HashMap<String, C>) -> Result<C> {
        let ring = self.ring.clone();
        self.evaluate_with(|v| ring.as_ref().and_then(|r| assignment.get(r.name(v)).cloned()))
    }
}

fn add_term<C: Scalar>(terms: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().clone() + c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

impl<C: Scalar> PartialEq for Polynomial<C> {
    fn eq(&self, other: &Self) -> bool {
        let rings_ok = match (&self.ring, &other.ring) {
            (Some(a), Some(b)) => same_ring(a, b),
            _ => true,
        };
        rings_ok && self.terms == other.terms
    }
}

impl<C: Scalar> Add for Polynomial<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("ring mismatch")
    }
}

impl<C: Scalar> Sub for Polynomial<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("ring mismatch")
    }
}

impl<C: Scalar> Mul for Polynomial<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("ring mismatch")
    }
}

impl<'a, C: Scalar> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        self.checked_mul(rhs).expect("ring mismatch")
    }
}

impl<'a, C: Scalar> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        self.checked_add(rhs).expect("ring mismatch")
    }
}

impl<C: Scalar> Neg for Polynomial<C> {
    type Output = Self;
    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(m, c)| (m, -c)).collect();
        Polynomial { ring: self.ring, terms }
    }
}

impl<C: Scalar> Zero for Polynomial<C> {
    fn zero() -> Self {
        Polynomial { ring: None, terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Scalar> One for Polynomial<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Scalar> Scalar for Polynomial<C> {
    fn from_int(n: i64) -> Self {
        Self::constant(C::from_int(n))
    }

    fn times(&self, n: i64) -> Self {
        self.scale(&C::from_int(n))
    }
}

impl Polynomial<Rational> {
    /// Monomials in display order: descending total degree, then descending exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|(a, _), (b, _)| {
            b.degree().cmp(&a.degree()).then_with(|| {
                let ea: Vec<i64> = a.exponents().flat_map(|(v, e)| [-(v as i64), e as i64]).collect();
                let eb: Vec<i64> = b.exponents().flat_map(|(v, e)| [-(v as i64), e as i64]).collect();
                eb.cmp(&ea)
            })
        });
        ts
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        m.exponents()
            .map(|(v, e)| {
                let name = self.ring.as_ref().map(|r| r.name(v).to_string()).unwrap_or_else(|| format!("x{v}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Canonical text: sorted monomials, explicit rational coefficients, `0` for zero.
impl fmt::Display for Polynomial<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = self.render_monomial(m);
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn ring() -> Arc<Ring> {
        Ring::new(["u1", "v1", "w1"]).unwrap()
    }

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn difference_of_squares() {
        let r = ring();
        let u = QPolynomial::var(&r, "u1").unwrap();
        let one = QPolynomial::one();
        let p = (u.clone() + one.clone()) * (u.clone() - one.clone());
        assert_eq!(p, u.clone() * u - one);
        assert_eq!(p.to_string(), "u1^2 - 1");
    }

    #[test]
    fn derivative_and_evaluate() {
        let r = ring();
        let u = QPolynomial::var(&r, "u1").unwrap();
        let v = QPolynomial::var(&r, "v1").unwrap();
        let w = QPolynomial::var(&r, "w1").unwrap();
        let p = u.pow(4) - (&u * &w).times(4) + v.pow(2).times(3);
        assert_eq!(p.derivative("u1").unwrap(), u.pow(3).times(4) - w.times(4));
        let at = HashMap::from([("u1".to_string(), q(2)), ("v1".to_string(), q(8)), ("w1".to_string(), q(26))]);
        assert!(p.evaluate(&at).unwrap().is_zero());
        assert_eq!(p.to_string(), "u1^4 - 4*u1*w1 + 3*v1^2");
    }

    #[test]
    fn errors() {
        let r = ring();
        let other = Ring::new(["x"]).unwrap();
        let u = QPolynomial::var(&r, "u1").unwrap();
        let x = QPolynomial::var(&other, "x").unwrap();
        assert!(u.checked_mul(&x).is_err());
        assert!(QPolynomial::var(&r, "z").is_err());
        let partial = HashMap::from([("v1".to_string(), q(1))]);
        assert!(u.evaluate(&partial).is_err());
        assert!(Ring::new(["a", "a"]).is_err());
    }

    #[test]
    fn constants_adopt_ring() {
        let r = ring();
        let u = QPolynomial::var(&r, "u1").unwrap();
        let s = QPolynomial::from_int(3) + u.clone();
        assert!(Arc::ptr_eq(s.ring().unwrap(), &r));
        assert!((u.clone() - u).is_zero());
        assert_eq!(QPolynomial::zero().to_string(), "0");
    }
}
