//! Parameterization of the main component and the structure of its `a`-coordinates.
//!
//! Indexing is 0-based throughout: node `i` of the curve owns the marked points
//! `κ[2i]` and `κ[2i+1]`, and `u_i = κ[2i] − κ[2i+1]`.

use std::collections::{BTreeMap, BTreeSet};

use crate::cube::{attained_pairs, check_genus, difference, face_of, vertices, FaceDescriptor, Vertex};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// A candidate point `(a, (u, v, w))`, with `a` indexed by little-endian vertex index.
#[derive(Clone, Debug, PartialEq)]
pub struct HirotaPoint<F> {
    pub a: Vec<F>,
    pub u: Vec<F>,
    pub v: Vec<F>,
    pub w: Vec<F>,
}

impl<F: Scalar> HirotaPoint<F> {
    pub fn new(a: Vec<F>, u: Vec<F>, v: Vec<F>, w: Vec<F>) -> Result<Self> {
        let g = u.len();
        check_genus(g, crate::cube::MAX_GENUS)?;
        if v.len() != g || w.len() != g || a.len() != 1 << g {
            return Err(Error::input(format!(
                "point dimensions do not match genus {g}: |a|={}, |u|={}, |v|={}, |w|={}",
                a.len(),
                u.len(),
                v.len(),
                w.len()
            )));
        }
        Ok(HirotaPoint { a, u, v, w })
    }

    pub fn genus(&self) -> usize {
        self.u.len()
    }

    pub fn check_genus(&self, g: usize) -> Result<()> {
        if self.genus() != g || self.a.len() != 1 << g {
            return Err(Error::input(format!("point has genus {}, expected {g}", self.genus())));
        }
        Ok(())
    }

    /// `(u, v, w) ↦ (s·u, s²·v, s³·w)`, the weighted projective scaling.
    pub fn scale_weighted(&self, s: &F) -> Self {
        let s2 = s.clone() * s.clone();
        let s3 = s2.clone() * s.clone();
        let mul = |xs: &[F], f: &F| xs.iter().map(|x| x.clone() * f.clone()).collect();
        HirotaPoint { a: self.a.clone(), u: mul(&self.u, s), v: mul(&self.v, &s2), w: mul(&self.w, &s3) }
    }

    /// All affine coordinates in Jacobian column order: `a…, u…, v…, w…`.
    pub fn coordinates(&self) -> Vec<F> {
        self.a.iter().chain(&self.u).chain(&self.v).chain(&self.w).cloned().collect()
    }

    pub fn from_coordinates(g: usize, coords: &[F]) -> Result<Self> {
        let n = 1 << g;
        if coords.len() != n + 3 * g {
            return Err(Error::input("coordinate vector has the wrong length"));
        }
        HirotaPoint::new(
            coords[..n].to_vec(),
            coords[n..n + g].to_vec(),
            coords[n + g..n + 2 * g].to_vec(),
            coords[n + 2 * g..].to_vec(),
        )
    }
}

/// `(λ_1..λ_g, κ_1..κ_2g)` with nonzero `λ` and pairwise distinct `κ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MainParams<F> {
    lambda: Vec<F>,
    kappa: Vec<F>,
}

impl<F: Scalar> MainParams<F> {
    pub fn new(lambda: Vec<F>, kappa: Vec<F>) -> Result<Self> {
        let g = lambda.len();
        check_genus(g, crate::cube::MAX_GENUS)?;
        if kappa.len() != 2 * g {
            return Err(Error::input(format!("expected {} kappas, got {}", 2 * g, kappa.len())));
        }
        if lambda.iter().any(|l| l.is_zero()) {
            return Err(Error::pre("lambda has a zero entry"));
        }
        for i in 0..kappa.len() {
            if kappa[i + 1..].contains(&kappa[i]) {
                return Err(Error::pre(format!("kappa_{} coincides with another kappa", i + 1)));
            }
        }
        Ok(MainParams { lambda, kappa })
    }

    pub fn genus(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[F] {
        &self.lambda
    }

    pub fn kappa(&self) -> &[F] {
        &self.kappa
    }
}

/// Sorted κ-indices selected by vertex `c`: `2i` when `c_i = 1`, `2i+1` when `c_i = 0`.
pub fn kappa_selection(c: &Vertex) -> Vec<usize> {
    (0..c.genus()).map(|i| if c.bit(i) == 1 { 2 * i } else { 2 * i + 1 }).collect()
}

/// `∏_{i<j} (κ_{I_i} − κ_{I_j})` over an ascending index list.
pub fn vandermonde<F: Scalar>(kappa: &[F], idx: &[usize]) -> F {
    let mut acc = F::one();
    for (n, &i) in idx.iter().enumerate() {
        for &j in &idx[n + 1..] {
            acc = acc * (kappa[i].clone() - kappa[j].clone());
        }
    }
    acc
}

pub fn phi<F: Scalar>(p: &MainParams<F>) -> HirotaPoint<F> {
    let g = p.genus();
    let k = &p.kappa;
    let pow = |x: &F, e| x.pow(e);
    let diff = |i: usize, e: u32| pow(&k[2 * i], e) - pow(&k[2 * i + 1], e);
    let a = vertices(g)
        .expect("genus validated")
        .iter()
        .map(|c| {
            let lam = (0..g).filter(|&i| c.bit(i) == 1).fold(F::one(), |acc, i| acc * p.lambda[i].clone());
            vandermonde(k, &kappa_selection(c)) * lam
        })
        .collect();
    HirotaPoint { a, u: (0..g).map(|i| diff(i, 1)).collect(), v: (0..g).map(|i| diff(i, 2)).collect(), w: (0..g).map(|i| diff(i, 3)).collect() }
}

/// `κ_{2i−1} = (u² + v)/2u`, `κ_{2i} = (v − u²)/2u` for every node.
pub fn kappa_from_uv<F: Field>(u: &[F], v: &[F]) -> Result<Vec<F>> {
    let mut kappa = Vec::with_capacity(2 * u.len());
    for (i, (u, v)) in u.iter().zip(v).enumerate() {
        if u.is_zero() {
            return Err(Error::pre(format!("u{} = 0, kappa cannot be recovered", i + 1)));
        }
        let u2 = u.clone() * u.clone();
        let two_u = u.times(2);
        kappa.push((u2.clone() + v.clone()) / two_u.clone());
        kappa.push((v.clone() - u2) / two_u);
    }
    Ok(kappa)
}

/// Inverse of [`phi`] on its image; the result is verified by a round trip.
pub fn invert_point<F: Field>(p: &HirotaPoint<F>) -> Result<MainParams<F>> {
    let g = p.genus();
    let kappa = kappa_from_uv(&p.u, &p.v)?;
    let origin = Vertex::new(g, 0)?;
    if p.a[0].is_zero() {
        return Err(Error::NotInImage("a_0 = 0".into()));
    }
    let v0 = vandermonde(&kappa, &kappa_selection(&origin));
    if v0.is_zero() {
        return Err(Error::pre("recovered kappas coincide"));
    }
    let mut lambda = Vec::with_capacity(g);
    for i in 0..g {
        let e = Vertex::new(g, 1 << i)?;
        let vi = vandermonde(&kappa, &kappa_selection(&e));
        if vi.is_zero() {
            return Err(Error::pre("recovered kappas coincide"));
        }
        lambda.push(p.a[e.index()].clone() / p.a[0].clone() * v0.clone() / vi);
    }
    let params = MainParams::new(lambda, kappa).map_err(|e| Error::NotInImage(e.to_string()))?;
    // The recovered parameters reproduce a_0 only up to the overall scale of `a`.
    let back = phi(&params);
    let scale = p.a[0].clone() / back.a[0].clone();
    let consistent = back.u == p.u
        && back.v == p.v
        && back.w == p.w
        && back.a.iter().zip(&p.a).all(|(x, y)| x.clone() * scale.clone() == *y);
    if !consistent {
        return Err(Error::NotInImage("round trip through phi does not reproduce the point".into()));
    }
    if !scale.is_one() {
        return Err(Error::NotInImage("a is a nontrivial multiple of a point in the image".into()));
    }
    Ok(params)
}

/// Torus action `a_c ↦ a_c ∏_{c_i=1} μ_i`.
pub fn shift<F: Scalar>(p: &HirotaPoint<F>, mu: &[F]) -> Result<HirotaPoint<F>> {
    let g = p.genus();
    if mu.len() != g {
        return Err(Error::input("shift vector length does not match genus"));
    }
    if mu.iter().any(|m| m.is_zero()) {
        return Err(Error::input("shift vector has a zero entry"));
    }
    let a = vertices(g)?
        .iter()
        .map(|c| (0..g).filter(|&i| c.bit(i) == 1).fold(p.a[c.index()].clone(), |acc, i| acc * mu[i].clone()))
        .collect();
    Ok(HirotaPoint { a, ..p.clone() })
}

/// Multiplicative encoding of a symmetric matrix: `s_i ↔ e^{R_ii/2}`, `q_ij ↔ e^{R_ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricParams<F> {
    s: Vec<F>,
    q: BTreeMap<(usize, usize), F>,
}

impl<F: Scalar> SymmetricParams<F> {
    /// `q` must contain every pair `i < j`.
    pub fn new(s: Vec<F>, q: BTreeMap<(usize, usize), F>) -> Result<Self> {
        let g = s.len();
        check_genus(g, crate::cube::MAX_GENUS)?;
        if s.iter().any(|x| x.is_zero()) {
            return Err(Error::pre("s has a zero entry"));
        }
        for i in 0..g {
            for j in i + 1..g {
                match q.get(&(i, j)) {
                    None => return Err(Error::input(format!("missing q_{}{}", i + 1, j + 1))),
                    Some(x) if x.is_zero() => return Err(Error::pre("q has a zero entry")),
                    _ => {}
                }
            }
        }
        if q.keys().any(|&(i, j)| i >= j || j >= g) {
            return Err(Error::input("q keys must be pairs i < j < g"));
        }
        Ok(SymmetricParams { s, q })
    }

    pub fn genus(&self) -> usize {
        self.s.len()
    }
}

/// `a_c = ∏_{i∈S} s_i ∏_{i<j∈S} q_ij` with `S` the support of `c`.
pub fn psi<F: Scalar>(sp: &SymmetricParams<F>) -> Vec<F> {
    let g = sp.genus();
    vertices(g)
        .expect("genus validated")
        .iter()
        .map(|c| {
            let support: Vec<usize> = (0..g).filter(|&i| c.bit(i) == 1).collect();
            let mut acc = F::one();
            for (n, &i) in support.iter().enumerate() {
                acc = acc * sp.s[i].clone();
                for &j in &support[n + 1..] {
                    acc = acc * sp.q[&(i, j)].clone();
                }
            }
            acc
        })
        .collect()
}

/// `∏ a_left = ∏ a_right` over two 4-element vertex multisets with equal sums and
/// equal sums of outer products `c cᵀ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ARelation {
    pub left: [Vertex; 4],
    pub right: [Vertex; 4],
}

/// Upper triangle (diagonal included) of `Σ c cᵀ` for a multiset of vertices.
fn gram_key(g: usize, ms: &[Vertex]) -> Vec<u8> {
    let mut key = Vec::with_capacity(g * (g + 1) / 2);
    for i in 0..g {
        for j in i..g {
            key.push(ms.iter().map(|c| c.bit(i) & c.bit(j)).sum());
        }
    }
    key
}

fn coord_sum(g: usize, ms: &[Vertex]) -> Vec<u8> {
    (0..g).map(|i| ms.iter().map(|c| c.bit(i)).sum()).collect()
}

impl ARelation {
    pub fn new(mut left: [Vertex; 4], mut right: [Vertex; 4]) -> Result<Self> {
        let g = left[0].genus();
        if left.iter().chain(&right).any(|c| c.genus() != g) {
            return Err(Error::input("relation mixes genera"));
        }
        left.sort();
        right.sort();
        if left == right {
            return Err(Error::input("relation sides are equal"));
        }
        if coord_sum(g, &left) != coord_sum(g, &right) || gram_key(g, &left) != gram_key(g, &right) {
            return Err(Error::input("relation sides have different sums or Gram matrices"));
        }
        if right < left {
            std::mem::swap(&mut left, &mut right);
        }
        Ok(ARelation { left, right })
    }
}

pub const MAX_RELATION_GENUS: usize = 5;

/// All 4-vs-4 quartic relations of genus `g`, canonical (sorted sides, left < right), at most `budget`.
pub fn enumerate_a_relations(g: usize, budget: usize) -> Result<Vec<ARelation>> {
    check_genus(g, MAX_RELATION_GENUS)?;
    let vs = vertices(g)?;
    let n = vs.len();
    let mut groups: BTreeMap<Vec<u8>, Vec<[Vertex; 4]>> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                for l in k..n {
                    let ms = [vs[i], vs[j], vs[k], vs[l]];
                    groups.entry(gram_key(g, &ms)).or_default().push(ms);
                }
            }
        }
    }
    let mut out = Vec::new();
    'outer: for members in groups.values() {
        for (x, left) in members.iter().enumerate() {
            for right in &members[x + 1..] {
                if out.len() >= budget {
                    break 'outer;
                }
                // members are generated in lexicographic order, so left < right already
                out.push(ARelation { left: *left, right: *right });
            }
        }
    }
    Ok(out)
}

/// `∏_{c∈left} a_c − ∏_{c∈right} a_c`.
pub fn check_a_relation<F: Scalar>(a: &[F], r: &ARelation) -> Result<F> {
    let prod = |side: &[Vertex; 4]| -> Result<F> {
        side.iter().try_fold(F::one(), |acc, c| {
            a.get(c.index()).map(|x| acc * x.clone()).ok_or_else(|| Error::input("vertex index out of range"))
        })
    };
    Ok(prod(&r.left)? - prod(&r.right)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionRatio<F> {
    pub multiplier: Option<F>,
    pub consistent: bool,
}

/// Compares the `a`-products of corresponding vertex pairs on two faces with the same direction.
pub fn direction_ratio<F: Field>(a: &[F], f1: &FaceDescriptor, f2: &FaceDescriptor) -> Result<DirectionRatio<F>> {
    let diff: BTreeSet<usize> = difference(f1, f2)?;
    if f1.direction.len() < 2 {
        return Err(Error::input("direction ratios need faces of dimension at least 2"));
    }
    if a.len() != 1 << f1.genus() {
        return Err(Error::input("a has the wrong length for the faces' genus"));
    }
    let mut ratios = Vec::new();
    for (ck, cl) in attained_pairs(&f1.point()) {
        let (tk, tl) = (ck.flipped(&diff), cl.flipped(&diff));
        let den = a[ck.index()].clone() * a[cl.index()].clone();
        if den.is_zero() {
            return Err(Error::input(format!("a_{ck}·a_{cl} = 0")));
        }
        ratios.push(a[tk.index()].clone() * a[tl.index()].clone() / den);
    }
    let consistent = ratios.windows(2).all(|w| w[0] == w[1]);
    Ok(DirectionRatio { multiplier: consistent.then(|| ratios[0].clone()), consistent })
}

/// All ordered pairs of distinct same-direction faces with `|direction| ≥ 2`.
pub fn same_direction_face_pairs(g: usize) -> Result<Vec<(FaceDescriptor, FaceDescriptor)>> {
    let mut by_dir: BTreeMap<Vec<usize>, Vec<FaceDescriptor>> = BTreeMap::new();
    for d in crate::cube::double_points(g)? {
        let f = face_of(&d);
        if f.direction.len() >= 2 {
            by_dir.entry(f.direction.iter().copied().collect()).or_default().push(f);
        }
    }
    let mut out = Vec::new();
    for faces in by_dir.values() {
        for f1 in faces {
            for f2 in faces {
                if f1 != f2 {
                    out.push((f1.clone(), f2.clone()));
                }
            }
        }
    }
    Ok(out)
}
