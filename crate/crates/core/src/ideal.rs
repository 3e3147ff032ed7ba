//! Generators of the Hirota ideal of the g-cube.
//!
//! A generator is kept structurally: its label `d` and the vertex pairs summing
//! to `d`. A uniquely attained `d` (an edge) contributes the quartic
//! `P((c_k−c_ℓ)·u, (c_k−c_ℓ)·v, (c_k−c_ℓ)·w)` alone; any other `d` contributes
//! `Σ_pairs P_kℓ(u,v,w)·a_k a_ℓ`. Evaluation and differentiation work on this
//! form directly; [`Generator::to_polynomial`] expands on demand.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cube::{attained_pairs, check_genus, double_points, DoublePoint, Vertex};
use crate::error::{Error, Result};
use crate::expsum::{Direction, LatticeMode};
use crate::main_component::HirotaPoint;
use crate::poly::{Polynomial, Ring};
use crate::scalar::{hirota_quartic, hirota_quartic_gradient, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorMode {
    /// One generator per point of the sum set.
    PerPoint,
    /// One quartic per edge direction plus one generator per face of dimension ≥ 2.
    Deduped,
    /// One generator per nonempty direction, taken on the face through the origin.
    Reduced,
}

impl GeneratorMode {
    pub fn max_genus(self) -> usize {
        match self {
            GeneratorMode::PerPoint => 7,
            GeneratorMode::Deduped | GeneratorMode::Reduced => 9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorMode::PerPoint => "per-point",
            GeneratorMode::Deduped => "deduped",
            GeneratorMode::Reduced => "reduced",
        }
    }
}

impl fmt::Display for GeneratorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-point" => Ok(GeneratorMode::PerPoint),
            "deduped" => Ok(GeneratorMode::Deduped),
            "reduced" => Ok(GeneratorMode::Reduced),
            _ => Err(Error::input(format!("unknown generator mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexPair {
    pub first: Vertex,
    pub second: Vertex,
    /// `first − second`, entries in {−1, 0, 1}.
    pub delta: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    label: DoublePoint,
    pairs: Vec<VertexPair>,
}

/// `(Δ·u, Δ·v, Δ·w)` for a ±1/0 difference vector.
fn projected<F: Scalar>(delta: &[i8], p: &HirotaPoint<F>) -> [F; 3] {
    let dot = |xs: &[F]| {
        delta.iter().zip(xs).fold(F::zero(), |acc, (&d, x)| match d {
            1 => acc + x.clone(),
            -1 => acc - x.clone(),
            _ => acc,
        })
    };
    [dot(&p.u), dot(&p.v), dot(&p.w)]
}

pub fn generator_for(d: &DoublePoint) -> Generator {
    let pairs = attained_pairs(d)
        .into_iter()
        .map(|(first, second)| {
            let delta = (0..d.genus()).map(|i| first.bit(i) as i8 - second.bit(i) as i8).collect();
            VertexPair { first, second, delta }
        })
        .collect();
    Generator { label: d.clone(), pairs }
}

impl Generator {
    pub fn label(&self) -> &DoublePoint {
        &self.label
    }

    pub fn pairs(&self) -> &[VertexPair] {
        &self.pairs
    }

    pub fn genus(&self) -> usize {
        self.label.genus()
    }

    pub fn is_uniquely_attained(&self) -> bool {
        self.pairs.len() == 1
    }

    pub fn evaluate<F: Scalar>(&self, p: &HirotaPoint<F>) -> F {
        let unique = self.is_uniquely_attained();
        self.pairs.iter().fold(F::zero(), |acc, pair| {
            let [x, y, t] = projected(&pair.delta, p);
            let quartic = hirota_quartic(&x, &y, &t);
            if unique {
                acc + quartic
            } else {
                acc + quartic * p.a[pair.first.index()].clone() * p.a[pair.second.index()].clone()
            }
        })
    }

    /// Gradient over the affine coordinates `a…, u…, v…, w…`.
    pub fn gradient<F: Scalar>(&self, p: &HirotaPoint<F>) -> Vec<F> {
        let g = self.genus();
        let n = 1 << g;
        let mut row = vec![F::zero(); n + 3 * g];
        let unique = self.is_uniquely_attained();
        for pair in &self.pairs {
            let [x, y, t] = projected(&pair.delta, p);
            let (k, l) = (pair.first.index(), pair.second.index());
            let weight = if unique { F::one() } else { p.a[k].clone() * p.a[l].clone() };
            if !unique {
                let quartic = hirota_quartic(&x, &y, &t);
                row[k] = row[k].clone() + quartic.clone() * p.a[l].clone();
                row[l] = row[l].clone() + quartic * p.a[k].clone();
            }
            let grad = hirota_quartic_gradient(&x, &y, &t);
            for (block, gpart) in grad.iter().enumerate() {
                let scaled = gpart.clone() * weight.clone();
                for (j, &dj) in pair.delta.iter().enumerate() {
                    let col = n + block * g + j;
                    match dj {
                        1 => row[col] = row[col].clone() + scaled.clone(),
                        -1 => row[col] = row[col].clone() - scaled.clone(),
                        _ => {}
                    }
                }
            }
        }
        row
    }

    /// Full expansion in the Hirota ring of this genus.
    pub fn to_polynomial(&self, ring: &Arc<Ring>) -> Result<Polynomial<Rational>> {
        let mode = lattice_for(ring, self.genus())?;
        let unique = self.is_uniquely_attained();
        let mut acc = Polynomial::zero_in(ring);
        for pair in &self.pairs {
            let key: Vec<i32> = pair.delta.iter().map(|&d| d as i32).collect();
            let [x, y, t] = [Direction::X, Direction::Y, Direction::T].map(|d| {
                use crate::expsum::FrequencyMode;
                mode.omega(&key, d)
            });
            let mut term = hirota_quartic(&x, &y, &t);
            if !unique {
                term = term
                    * Polynomial::var_index(ring, pair.first.index())
                    * Polynomial::var_index(ring, pair.second.index());
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// The coefficient this label receives in the bilinear form of the symbolic theta
    /// function: the generator itself, times `a_k a_ℓ` for an edge.
    pub fn hirota_coefficient(&self, ring: &Arc<Ring>) -> Result<Polynomial<Rational>> {
        let poly = self.to_polynomial(ring)?;
        if self.is_uniquely_attained() {
            let pair = &self.pairs[0];
            return Ok(poly
                * Polynomial::var_index(ring, pair.first.index())
                * Polynomial::var_index(ring, pair.second.index()));
        }
        Ok(poly)
    }
}

fn lattice_for(ring: &Arc<Ring>, g: usize) -> Result<LatticeMode> {
    let mode = LatticeMode::new(g)?;
    if mode.ring().names() != ring.names() {
        return Err(Error::input("ring is not the Hirota ring of this genus"));
    }
    Ok(mode)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    genus: usize,
    mode: GeneratorMode,
    generators: Vec<Generator>,
}

impl GeneratorSet {
    /// Rebuilds a set from its labels (each generator is determined by its label).
    pub fn from_labels(genus: usize, mode: GeneratorMode, labels: &[DoublePoint]) -> Result<Self> {
        check_genus(genus, mode.max_genus())?;
        if let Some(d) = labels.iter().find(|d| d.genus() != genus) {
            return Err(Error::input(format!("label {d} does not have genus {genus}")));
        }
        Ok(GeneratorSet { genus, mode, generators: labels.iter().map(generator_for).collect() })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn mode(&self) -> GeneratorMode {
        self.mode
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// `g + Σ_{d=2}^{g} 2^{g−d} C(g,d)`.
pub fn deduped_count(g: usize) -> usize {
    let mut binom = 1usize;
    let mut total = g;
    for d in 1..=g {
        binom = binom * (g - d + 1) / d;
        if d >= 2 {
            total += binom << (g - d);
        }
    }
    total
}

pub fn all_generators(g: usize, mode: GeneratorMode) -> Result<GeneratorSet> {
    check_genus(g, mode.max_genus())?;
    let labels: Vec<DoublePoint> = match mode {
        GeneratorMode::PerPoint => double_points(g)?,
        GeneratorMode::Deduped => {
            let edges = (0..g).map(|i| DoublePoint::canonical(g, &BTreeSet::from([i])));
            let faces = double_points(g)?.into_iter().filter(|d| d.ones() >= 2).map(Ok);
            edges.chain(faces).collect::<Result<_>>()?
        }
        GeneratorMode::Reduced => (1u32..1 << g)
            .map(|mask| {
                let dir: BTreeSet<usize> = (0..g).filter(|&i| mask >> i & 1 == 1).collect();
                DoublePoint::canonical(g, &dir)
            })
            .collect::<Result<_>>()?,
    };
    let generators = labels.par_iter().map(generator_for).collect();
    Ok(GeneratorSet { genus: g, mode, generators })
}

pub fn evaluate_generators<F: Scalar>(gens: &GeneratorSet, p: &HirotaPoint<F>) -> Result<Vec<F>> {
    p.check_genus(gens.genus)?;
    Ok(gens.generators.par_iter().map(|gen| gen.evaluate(p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::hirota_ring;
    use crate::scalar::rational;
    use num_traits::Zero;

    fn dp(c: &[u8]) -> DoublePoint {
        DoublePoint::new(c.to_vec()).unwrap()
    }

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn counts() {
        assert_eq!(all_generators(3, GeneratorMode::PerPoint).unwrap().len(), 19);
        assert_eq!(all_generators(3, GeneratorMode::Deduped).unwrap().len(), 10);
        assert_eq!(all_generators(3, GeneratorMode::Reduced).unwrap().len(), 7);
        for g in 1..=9 {
            assert_eq!(all_generators(g, GeneratorMode::Deduped).unwrap().len(), deduped_count(g));
            assert_eq!(all_generators(g, GeneratorMode::Reduced).unwrap().len(), (1 << g) - 1);
        }
        assert!(all_generators(8, GeneratorMode::PerPoint).is_err());
        assert!(all_generators(10, GeneratorMode::Reduced).is_err());
        assert!(all_generators(0, GeneratorMode::Reduced).is_err());
    }

    #[test]
    fn edge_quartic() {
        let ring = hirota_ring(3).unwrap();
        let var = |n: &str| Polynomial::var(&ring, n).unwrap();
        let expect = var("u1").pow(4) - (var("u1") * var("w1")).times(4) + var("v1").pow(2).times(3);
        assert_eq!(generator_for(&dp(&[1, 2, 0])).to_polynomial(&ring).unwrap(), expect);

        let ring1 = hirota_ring(1).unwrap();
        let p = generator_for(&dp(&[1])).to_polynomial(&ring1).unwrap();
        assert_eq!(p.to_string(), "u1^4 - 4*u1*w1 + 3*v1^2");
    }

    #[test]
    fn face_generator_genus_two() {
        let ring = hirota_ring(2).unwrap();
        let var = |n: &str| Polynomial::var(&ring, n).unwrap();
        let quartic = |x: Polynomial<Rational>, y: Polynomial<Rational>, t: Polynomial<Rational>| {
            hirota_quartic(&x, &y, &t)
        };
        let minus = quartic(var("u1") - var("u2"), var("v1") - var("v2"), var("w1") - var("w2"));
        let plus = quartic(var("u1") + var("u2"), var("v1") + var("v2"), var("w1") + var("w2"));
        let expect = minus * var("a_10") * var("a_01") + plus * var("a_11") * var("a_00");
        assert_eq!(generator_for(&dp(&[1, 1])).to_polynomial(&ring).unwrap(), expect);
    }

    #[test]
    fn evaluate_points() {
        let g1 = all_generators(1, GeneratorMode::PerPoint).unwrap();
        let p = HirotaPoint::new(vec![q(5), q(-3)], vec![q(2)], vec![q(8)], vec![q(26)]).unwrap();
        assert_eq!(evaluate_generators(&g1, &p).unwrap(), vec![q(0)]);

        let g2 = all_generators(2, GeneratorMode::PerPoint).unwrap();
        let p2 = HirotaPoint::new(vec![q(1); 4], vec![q(1); 2], vec![q(0); 2], vec![q(0); 2]).unwrap();
        let vals = evaluate_generators(&g2, &p2).unwrap();
        for (gen, val) in g2.generators().iter().zip(&vals) {
            if gen.is_uniquely_attained() {
                assert_eq!(val, &q(1));
            }
        }
        assert!(evaluate_generators(&g2, &p).is_err());
    }

    #[test]
    fn structural_matches_expansion() {
        let g = 3;
        let ring = hirota_ring(g).unwrap();
        let coords: Vec<Rational> = (0..(1 << g) + 3 * g).map(|i| rational(i as i64 * 7 - 20, (i % 4 + 1) as i64)).collect();
        let p = HirotaPoint::from_coordinates(g, &coords).unwrap();
        for gen in all_generators(g, GeneratorMode::PerPoint).unwrap().generators() {
            let poly = gen.to_polynomial(&ring).unwrap();
            let val = poly.evaluate_with(|v| Some(coords[v].clone())).unwrap();
            assert_eq!(val, gen.evaluate(&p));
            let grad = gen.gradient(&p);
            for (v, gv) in grad.iter().enumerate() {
                let dv = poly.derivative_index(v).evaluate_with(|x| Some(coords[x].clone())).unwrap();
                assert_eq!(&dv, gv, "generator {} variable {}", gen.label(), ring.name(v));
            }
        }
    }

    #[test]
    fn weighted_homogeneity() {
        let g = 3;
        let n = 1 << g;
        let ring = hirota_ring(g).unwrap();
        let weight = |v: usize| if v < n { 0 } else { ((v - n) / g + 1) as u32 };
        let a_deg = |v: usize| u32::from(v < n);
        for gen in all_generators(g, GeneratorMode::PerPoint).unwrap().generators() {
            let poly = gen.to_polynomial(&ring).unwrap();
            assert_eq!(poly.weighted_degrees(weight), vec![4]);
            assert!(poly.weighted_degrees(a_deg).iter().all(|&d| d <= 2));
            assert!(!poly.is_zero());
        }
    }
}
