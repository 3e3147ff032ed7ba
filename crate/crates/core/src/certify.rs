//! Jacobian-rank certificate that the image of `φ` is an irreducible component
//! of the Hirota variety.
//!
//! At a point of the main component the reduced generators vanish and their
//! Jacobian has rank at most `2^g − 1` (its number of rows). Reaching that rank
//! shows the tangent space has dimension `3g + 1`, equal to the dimension of the
//! (affine cone over the) main component, so the point is smooth on a unique
//! component. A rank computed modulo a prime is a lower bound for the rational
//! rank, so a single full-rank reduction already suffices; two agreeing primes are
//! required anyway as a consistency check.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::check_genus;
use crate::error::{Error, Result};
use crate::ideal::{all_generators, evaluate_generators, GeneratorMode, GeneratorSet};
use crate::linalg::{random_prime, rank_exact, rank_mod_p, RationalMatrix};
use crate::main_component::{phi, HirotaPoint};
use crate::sampling::{random_main_params, rng_from_seed};
use crate::scalar::Rational;

pub const MAX_CERT_GENUS: usize = 9;
pub const MAX_EXACT_GENUS: usize = 6;
pub const MAX_ATTEMPTS: usize = 5;
const MAX_PRIMES: usize = 5;

/// Jacobian of `gens` at `p`, columns ordered `a…, u…, v…, w…`.
pub fn jacobian_at(gens: &GeneratorSet, p: &HirotaPoint<Rational>) -> Result<RationalMatrix> {
    p.check_genus(gens.genus())?;
    if let Some(i) = p.a.iter().position(num_traits::Zero::is_zero) {
        return Err(Error::pre(format!("a-coordinate {i} vanishes")));
    }
    let rows: Vec<Vec<Rational>> = gens.generators().par_iter().map(|gen| gen.gradient(p)).collect();
    if rows.is_empty() {
        let g = gens.genus();
        return Ok(RationalMatrix::zeros(0, (1 << g) + 3 * g));
    }
    RationalMatrix::from_rows(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMode {
    Exact,
    Modular,
}

impl fmt::Display for CertMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertMode::Exact => "exact",
            CertMode::Modular => "modular",
        })
    }
}

impl FromStr for CertMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CertMode::Exact),
            "modular" => Ok(CertMode::Modular),
            _ => Err(Error::input(format!("unknown certification mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub genus: usize,
    pub seed: u64,
    pub mode: CertMode,
    /// Primes used in modular mode (empty in exact mode).
    pub primes: Vec<u64>,
    /// Number of sampled points (1 unless a sample was degenerate).
    pub attempts: usize,
    pub generators_vanish: bool,
    pub jacobian_rank: usize,
    pub expected_rank: usize,
    pub tangent_dim_affine: usize,
    pub main_component_dim_projective: usize,
    pub verdict: bool,
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

pub fn expected_rank(g: usize) -> usize {
    (1 << g) - 1
}

fn check_mode(g: usize, mode: CertMode) -> Result<()> {
    check_genus(g, MAX_CERT_GENUS)?;
    if mode == CertMode::Exact && g > MAX_EXACT_GENUS {
        return Err(Error::input(format!("exact mode supports g ≤ {MAX_EXACT_GENUS}, got {g}")));
    }
    Ok(())
}

struct RankOutcome {
    rank: usize,
    primes: Vec<u64>,
    note: Option<String>,
}

fn jacobian_rank<R: Rng>(m: &RationalMatrix, mode: CertMode, rng: &mut R) -> RankOutcome {
    match mode {
        CertMode::Exact => RankOutcome { rank: rank_exact(m), primes: vec![], note: None },
        CertMode::Modular => {
            // ranks mod p never exceed the rational rank; accept the first value seen twice
            let mut seen: Vec<(u64, usize)> = Vec::new();
            while seen.len() < MAX_PRIMES {
                let p = random_prime(rng);
                let Ok(r) = rank_mod_p(m, p) else { continue };
                if let Some(&(q, _)) = seen.iter().find(|&&(_, s)| s == r) {
                    return RankOutcome { rank: r, primes: vec![q, p], note: None };
                }
                seen.push((p, r));
            }
            let (p, r) = *seen.iter().max_by_key(|(_, r)| *r).expect("nonempty");
            RankOutcome {
                rank: r,
                primes: seen.iter().map(|(p, _)| *p).collect(),
                note: Some(format!("no two of {MAX_PRIMES} primes agreed; reporting the maximum rank {r} (prime {p})")),
            }
        }
    }
}

fn dims(g: usize, rank: usize) -> (usize, usize) {
    let ambient = (1usize << g) + 3 * g;
    let tangent = ambient - rank.min(ambient);
    (tangent, tangent.saturating_sub(1))
}

/// Certificate at a given point (no resampling). Checks the reduced generators and,
/// for small genus, the deduplicated ones.
pub fn certify_point(p: &HirotaPoint<Rational>, seed: u64, mode: CertMode) -> Result<CertReport> {
    let g = p.genus();
    check_mode(g, mode)?;
    let mut rng = rng_from_seed(seed);
    point_report(p, seed, mode, &mut rng, &mut BTreeMap::new())
}

fn point_report<R: Rng>(
    p: &HirotaPoint<Rational>,
    seed: u64,
    mode: CertMode,
    rng: &mut R,
    timings: &mut BTreeMap<String, u64>,
) -> Result<CertReport> {
    let g = p.genus();
    let mut diagnostics = Vec::new();
    let reduced = all_generators(g, GeneratorMode::Reduced)?;

    let clock = Instant::now();
    let mut vanish = true;
    let mut sets = vec![&reduced];
    let deduped;
    if g <= MAX_EXACT_GENUS {
        deduped = all_generators(g, GeneratorMode::Deduped)?;
        sets.push(&deduped);
    }
    for set in sets {
        let values = evaluate_generators(set, p)?;
        let bad: Vec<String> = set
            .generators()
            .iter()
            .zip(&values)
            .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
            .map(|(gen, _)| gen.label().to_string())
            .collect();
        if !bad.is_empty() {
            vanish = false;
            diagnostics.push(format!("{} generators not vanishing: {}", set.mode(), bad.join(",")));
        }
    }
    *timings.entry("vanishing".into()).or_default() += clock.elapsed().as_millis() as u64;

    let clock = Instant::now();
    let jac = jacobian_at(&reduced, p)?;
    *timings.entry("jacobian".into()).or_default() += clock.elapsed().as_millis() as u64;

    let clock = Instant::now();
    let outcome = jacobian_rank(&jac, mode, rng);
    *timings.entry("rank".into()).or_default() += clock.elapsed().as_millis() as u64;
    diagnostics.extend(outcome.note);

    let expected = expected_rank(g);
    let (tangent, projective) = dims(g, outcome.rank);
    Ok(CertReport {
        genus: g,
        seed,
        mode,
        primes: outcome.primes,
        attempts: 1,
        generators_vanish: vanish,
        jacobian_rank: outcome.rank,
        expected_rank: expected,
        tangent_dim_affine: tangent,
        main_component_dim_projective: projective,
        verdict: vanish && outcome.rank == expected,
        diagnostics,
        timings_ms: None,
    })
}

/// Samples `φ(λ, κ)` from `seed` and certifies it, resampling degenerate points up
/// to [`MAX_ATTEMPTS`] times.
pub fn certify_main_component(g: usize, seed: u64, mode: CertMode) -> Result<CertReport> {
    check_mode(g, mode)?;
    let start = Instant::now();
    let mut rng = rng_from_seed(seed);
    let mut timings = BTreeMap::new();
    let mut history = Vec::new();
    let mut report = None;
    for attempt in 1..=MAX_ATTEMPTS {
        let clock = Instant::now();
        let params = random_main_params(&mut rng, g)?;
        let p = phi(&params);
        *timings.entry("sampling".into()).or_default() += clock.elapsed().as_millis() as u64;
        let mut r = point_report(&p, seed, mode, &mut rng, &mut timings)?;
        r.attempts = attempt;
        let done = r.verdict || !r.generators_vanish;
        if !done {
            history.push(format!("attempt {attempt}: rank {} < {}", r.jacobian_rank, r.expected_rank));
        }
        report = Some(r);
        if done {
            break;
        }
    }
    let mut report = report.expect("at least one attempt");
    history.append(&mut report.diagnostics);
    report.diagnostics = history;
    timings.insert("total".into(), start.elapsed().as_millis() as u64);
    report.timings_ms = Some(timings);
    Ok(report)
}
