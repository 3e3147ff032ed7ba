//! `(k, n)`-soliton tau functions built from Plücker coordinates, and their
//! identification with the cube theta function on the main component.

use num_traits::{One, Zero};

use crate::cube::check_genus;
use crate::error::{Error, Result};
use crate::expsum::{ExpSum, NumericExpSum, NumericMode};
use crate::linalg::{determinant, rank};
use crate::main_component::{phi, vandermonde, HirotaPoint, MainParams};
use crate::scalar::{Field, Rational};

/// A `k × n` rational matrix of full row rank, `k < n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonMatrix {
    rows: Vec<Vec<Rational>>,
}

impl SolitonMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if k == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("soliton matrix must be a nonempty rectangle"));
        }
        if k >= n {
            return Err(Error::input(format!("soliton matrix needs k < n, got {k}x{n}")));
        }
        if rank(rows.clone()) != k {
            return Err(Error::input("soliton matrix is not of full row rank"));
        }
        Ok(SolitonMatrix { rows })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// All `k`-subsets of `0..n` in colexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // colex successor: bump the lowest position that can move
        let mut i = 0;
        while i < k && (if i + 1 < k { cur[i] + 1 == cur[i + 1] } else { cur[i] + 1 == n }) {
            i += 1;
        }
        if i == k {
            return out;
        }
        cur[i] += 1;
        for (j, c) in cur.iter_mut().enumerate().take(i) {
            *c = j;
        }
    }
}

/// Maximal minors `p_I` (columns ascending), listed over colex `k`-subsets.
pub fn pluecker_minors(a: &SolitonMatrix) -> Vec<(Vec<usize>, Rational)> {
    use rayon::prelude::*;
    k_subsets(a.n(), a.k())
        .into_par_iter()
        .map(|cols| {
            let sub = a.rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
            let d = determinant(sub).expect("square by construction");
            (cols, d)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolitonData<F = Rational> {
    k: usize,
    n: usize,
    kappa: Vec<F>,
    pluecker: Vec<(Vec<usize>, F)>,
}

impl<F: Field> SolitonData<F> {
    pub fn new(k: usize, n: usize, kappa: Vec<F>, pluecker: Vec<(Vec<usize>, F)>) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::input(format!("need 0 < k < n, got k={k}, n={n}")));
        }
        if kappa.len() != n {
            return Err(Error::input(format!("expected {n} kappas, got {}", kappa.len())));
        }
        for i in 0..n {
            if kappa[i + 1..].contains(&kappa[i]) {
                return Err(Error::pre("kappas must be pairwise distinct"));
            }
        }
        for (s, _) in &pluecker {
            if s.len() != k || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&i| i >= n) {
                return Err(Error::input(format!("invalid subset {s:?} for k={k}, n={n}")));
            }
        }
        if pluecker.iter().all(|(_, p)| p.is_zero()) {
            return Err(Error::pre("all Plücker coordinates vanish"));
        }
        let mut pluecker = pluecker;
        pluecker.sort_by(|(s, _), (t, _)| s.iter().rev().cmp(t.iter().rev()));
        if pluecker.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::input("repeated subset among Plücker coordinates"));
        }
        Ok(SolitonData { k, n, kappa, pluecker })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> &[F] {
        &self.kappa
    }

    pub fn pluecker(&self) -> &[(Vec<usize>, F)] {
        &self.pluecker
    }
}

impl SolitonData<Rational> {
    pub fn from_matrix(a: &SolitonMatrix, kappa: Vec<Rational>) -> Result<Self> {
        Self::new(a.k(), a.n(), kappa, pluecker_minors(a))
    }
}

/// `τ = Σ_I p_I Δ_I e^{Σ_{i∈I} (κ_i x + κ_i² y + κ_i³ t)}`, keys merged on collision.
pub fn soliton_tau<F: Field + Ord>(d: &SolitonData<F>) -> NumericExpSum<F> {
    let mut tau = ExpSum::new(NumericMode::default());
    for (subset, p) in &d.pluecker {
        if p.is_zero() {
            continue;
        }
        let mut key = [F::zero(), F::zero(), F::zero()];
        for &i in subset {
            let k = &d.kappa[i];
            key[0] = key[0].clone() + k.clone();
            key[1] = key[1].clone() + k.pow(2);
            key[2] = key[2].clone() + k.pow(3);
        }
        tau.add_term(key, p.clone() * vandermonde(&d.kappa, subset));
    }
    tau
}

/// The `g × 2g` matrix with row `i` equal to `λ_i` in column `2i` and `1` in column `2i+1`.
pub fn lambda_matrix(lambda: &[Rational]) -> Result<SolitonMatrix> {
    let g = lambda.len();
    check_genus(g, crate::cube::MAX_GENUS)?;
    if lambda.iter().any(Zero::is_zero) {
        return Err(Error::input("lambda has a zero entry"));
    }
    let rows = (0..g)
        .map(|i| {
            let mut row = vec![Rational::zero(); 2 * g];
            row[2 * i] = lambda[i].clone();
            row[2 * i + 1] = Rational::one();
            row
        })
        .collect();
    SolitonMatrix::new(rows)
}

/// `θ(ux + vy + wt)` at a point, with numeric frequencies `(c·u, c·v, c·w)`.
pub fn theta_at<F: Field + Ord>(p: &HirotaPoint<F>) -> Result<NumericExpSum<F>> {
    let g = p.genus();
    let mut tau = ExpSum::new(NumericMode::default());
    for c in crate::cube::vertices(g)? {
        let mut key = [F::zero(), F::zero(), F::zero()];
        for i in (0..g).filter(|&i| c.bit(i) == 1) {
            key[0] = key[0].clone() + p.u[i].clone();
            key[1] = key[1].clone() + p.v[i].clone();
            key[2] = key[2].clone() + p.w[i].clone();
        }
        tau.add_term(key, p.a[c.index()].clone());
    }
    Ok(tau)
}

/// The `(g, 2g)`-soliton of `λ, κ` divided by `e^{Σ_i (κ_{2i+1} x + κ_{2i+1}² y + κ_{2i+1}³ t)}`.
pub fn normalized_lambda_soliton(p: &MainParams<Rational>) -> Result<NumericExpSum<Rational>> {
    let a = lambda_matrix(p.lambda())?;
    let data = SolitonData::from_matrix(&a, p.kappa().to_vec())?;
    let mut shift = [Rational::zero(), Rational::zero(), Rational::zero()];
    for k in p.kappa().iter().skip(1).step_by(2) {
        shift[0] -= k;
        shift[1] -= k.pow(2);
        shift[2] -= k.pow(3);
    }
    Ok(soliton_tau(&data).shift_keys(&shift))
}

/// Whether `θ` at `point` equals the normalized `(g, 2g)`-soliton of `params`, exactly.
pub fn theta_matches_soliton(point: &HirotaPoint<Rational>, params: &MainParams<Rational>) -> Result<bool> {
    if point.genus() != params.genus() {
        return Err(Error::input("point and parameters have different genus"));
    }
    Ok(theta_at(point)? == normalized_lambda_soliton(params)?)
}

/// The theta function under `φ(p)` coincides with the soliton of the λ-matrix.
/// The left side is built from the symbolic theta sum by substitution.
pub fn theta_soliton_equivalence(p: &MainParams<Rational>) -> Result<bool> {
    let g = p.genus();
    let point = phi(p);
    let coords = point.coordinates();
    let lhs = crate::expsum::SymbolicExpSum::theta(g)?.specialize(|v| coords[v].clone())?;
    Ok(lhs == normalized_lambda_soliton(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn colex_subsets() {
        assert_eq!(k_subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
        assert_eq!(k_subsets(6, 3).len(), 20);
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn identity_prefixed_minors() {
        let (c, d, e, f) = (q(2), q(3), q(5), q(7));
        let a = SolitonMatrix::new(vec![vec![q(1), q(0), c.clone(), d.clone()], vec![q(0), q(1), e.clone(), f.clone()]]).unwrap();
        let m = pluecker_minors(&a);
        let get = |s: &[usize]| m.iter().find(|(t, _)| t == s).unwrap().1.clone();
        assert_eq!(get(&[0, 1]), q(1));
        assert_eq!(get(&[2, 3]), c * f - d * e);
        let scaled = SolitonMatrix::new(vec![a.rows()[0].iter().map(|x| x * q(3)).collect(), a.rows()[1].clone()]).unwrap();
        for ((_, x), (_, y)) in pluecker_minors(&scaled).iter().zip(&m) {
            assert_eq!(x, &(y * q(3)));
        }
        assert!(SolitonMatrix::new(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).is_err());
        assert!(SolitonMatrix::new(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]).is_err());
    }

    #[test]
    fn lambda_matrix_minors() {
        assert_eq!(lambda_matrix(&[q(5)]).unwrap().rows(), &[vec![q(5), q(1)]]);
        let m = pluecker_minors(&lambda_matrix(&[q(1), q(1), q(1)]).unwrap());
        let get = |s: &[usize]| m.iter().find(|(t, _)| t == s).unwrap().1.clone();
        assert_eq!(get(&[0, 2, 4]), q(1));
        assert_eq!(get(&[1, 3, 5]), q(1));
        assert_eq!(get(&[0, 2, 5]), q(1));
        assert_eq!(get(&[0, 1, 2]), q(0));
        assert!(lambda_matrix(&[q(0)]).is_err());
    }

    #[test]
    fn one_soliton_terms() {
        let d = SolitonData::new(1, 2, vec![q(3), q(1)], vec![(vec![0], q(1)), (vec![1], q(1))]).unwrap();
        let tau = soliton_tau(&d);
        assert_eq!(tau.coefficient(&[q(3), q(9), q(27)]), Some(&q(1)));
        assert_eq!(tau.coefficient(&[q(1), q(1), q(1)]), Some(&q(1)));
        assert!(tau.hirota_form().is_empty());
    }

    #[test]
    fn two_four_soliton_vanishes() {
        let a = SolitonMatrix::new(vec![vec![q(1), q(2), q(-1), q(3)], vec![q(0), q(1), q(4), q(-2)]]).unwrap();
        let d = SolitonData::from_matrix(&a, vec![q(-2), rational(1, 2), q(1), q(3)]).unwrap();
        let tau = soliton_tau(&d);
        assert!(tau.hirota_form_pairwise().is_empty());
        assert!(tau.hirota_form().is_empty());
    }

    #[test]
    fn power_sum_collision_still_vanishes() {
        // {0,4,7,11} and {1,2,9,10} agree in their first three power sums
        let kappa: Vec<Rational> = [0, 1, 2, 4, 7, 9, 10, 11].iter().map(|&x| q(x)).collect();
        let a = crate::sampling::random_full_rank_matrix(&mut crate::sampling::rng_from_seed(1), 4, 8).unwrap();
        let d = SolitonData::from_matrix(&a, kappa).unwrap();
        let tau = soliton_tau(&d);
        assert!(tau.len() < 70);
        assert!(tau.hirota_form_pairwise().is_empty());
    }

    #[test]
    fn theta_equals_soliton_g1() {
        let p = MainParams::new(vec![q(2)], vec![q(3), q(1)]).unwrap();
        assert!(theta_soliton_equivalence(&p).unwrap());
        let mut bad = phi(&p);
        bad.a[1] = bad.a[1].clone() + q(1);
        assert!(!theta_matches_soliton(&bad, &p).unwrap());
        assert!(theta_matches_soliton(&phi(&p), &p).unwrap());
    }
}
