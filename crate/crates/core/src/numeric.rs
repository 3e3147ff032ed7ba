//! Floating-point evaluation of tau functions, `p = 2 ∂²ₓ log τ`, the KP
//! residual, and the (exact) Abel map.
//!
//! The KP residual needs a fourth x-derivative of `p` by finite differences; at
//! `h = 1e-3` the `h⁻⁴` stencil amplifies binary64 rounding to ~1e-4, so the
//! evaluation is generic over [`Real`] and the checks run in [`Wide`]
//! (128-bit mantissa).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::expsum::NumericExpSum;
use crate::scalar::{Field, Rational};

pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_f64(x: f64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn exp(&self) -> Self;

    fn abs(&self) -> Self {
        if *self < Self::from_f64(0.0) {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }
}

impl Real for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn exp(&self) -> Self {
        f32::exp(*self)
    }
}

pub const WIDE_PRECISION: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

/// Binary floating point with a 128-bit mantissa.
#[derive(Clone, Debug)]
pub struct Wide(BigFloat);

impl Wide {
    fn parse_dec(s: &str) -> Wide {
        Wide(CONSTS.with(|cc| BigFloat::parse(s, Radix::Dec, WIDE_PRECISION, RM, &mut cc.borrow_mut())))
    }
}

impl PartialEq for Wide {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! wide_op {
    ($tr:ident, $method:ident) => {
        impl $tr for Wide {
            type Output = Wide;
            fn $method(self, rhs: Wide) -> Wide {
                Wide(self.0.$method(&rhs.0, WIDE_PRECISION, RM))
            }
        }
    };
}

wide_op!(Add, add);
wide_op!(Sub, sub);
wide_op!(Mul, mul);
wide_op!(Div, div);

impl Neg for Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide(self.0.neg())
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Real for Wide {
    fn from_f64(x: f64) -> Self {
        Wide(BigFloat::from_f64(x, WIDE_PRECISION))
    }

    fn from_rational(q: &Rational) -> Self {
        Wide::parse_dec(&q.numer().to_string()) / Wide::parse_dec(&q.denom().to_string())
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        CONSTS
            .with(|cc| self.0.format(Radix::Dec, RM, &mut cc.borrow_mut()))
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .unwrap_or(f64::NAN)
    }

    fn exp(&self) -> Self {
        Wide(CONSTS.with(|cc| self.0.exp(WIDE_PRECISION, RM, &mut cc.borrow_mut())))
    }

    fn abs(&self) -> Self {
        Wide(self.0.abs())
    }
}

pub const DEFAULT_STEP: f64 = 1e-3;
/// `|τ|` (relative to its largest term) below which `p` is considered singular.
pub const TAU_GUARD: f64 = 1e-12;

/// A tau function `Σ c e^{ω_x x + ω_y y + ω_t t}` prepared for evaluation.
#[derive(Clone, Debug)]
pub struct EvalContext<R> {
    terms: Vec<([R; 3], R)>,
    h: f64,
}

/// Derivative orders of `τ` (each ≤ 2) and the evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orders {
    pub dx: u32,
    pub dy: u32,
    pub dt: u32,
}

impl Orders {
    pub const NONE: Orders = Orders { dx: 0, dy: 0, dt: 0 };

    pub fn x(dx: u32) -> Orders {
        Orders { dx, ..Orders::NONE }
    }
}

impl<R: Real> EvalContext<R> {
    pub fn new(tau: &NumericExpSum<Rational>, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::input("finite-difference step must be positive"));
        }
        if tau.is_empty() {
            return Err(Error::input("tau is empty"));
        }
        let terms = tau
            .terms()
            .map(|(k, c)| ([R::from_rational(&k[0]), R::from_rational(&k[1]), R::from_rational(&k[2])], R::from_rational(c)))
            .collect();
        Ok(EvalContext { terms, h })
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn with_step(&self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::input("finite-difference step must be positive"));
        }
        Ok(EvalContext { terms: self.terms.clone(), h })
    }

    /// `(Σ c ω^orders e^{E − M}, Σ |c| e^{E − M}, M)` with `M` the largest exponent.
    fn scaled(&self, x: &R, y: &R, t: &R, o: Orders) -> (R, R, R) {
        let exps: Vec<R> = self
            .terms
            .iter()
            .map(|(w, _)| w[0].clone() * x.clone() + w[1].clone() * y.clone() + w[2].clone() * t.clone())
            .collect();
        let max = exps
            .iter()
            .cloned()
            .reduce(|a, b| if b > a { b } else { a })
            .expect("nonempty");
        let zero = R::from_f64(0.0);
        let (mut val, mut mag) = (zero.clone(), zero);
        for ((w, c), e) in self.terms.iter().zip(exps) {
            let factor = (e - max.clone()).exp();
            let mut term = c.clone() * factor.clone();
            for (wi, n) in w.iter().zip([o.dx, o.dy, o.dt]) {
                for _ in 0..n {
                    term = term * wi.clone();
                }
            }
            mag = mag + c.abs() * factor;
            val = val + term;
        }
        (val, mag, max)
    }

    /// `∂ₓ^dx ∂_y^dy ∂_t^dt τ` at `(x, y, t)`, computed analytically.
    pub fn eval_tau(&self, x: &R, y: &R, t: &R, o: Orders) -> Result<R> {
        if o.dx > 2 || o.dy > 2 || o.dt > 2 {
            return Err(Error::input("derivative orders above 2 are not supported"));
        }
        let (v, _, m) = self.scaled(x, y, t, o);
        Ok(v * m.exp())
    }

    /// `(τ, τ_x, τ_xx, Σ|c|e^{E−M})`, all scaled by `e^{−M}`, sharing one set of exponentials.
    fn x_jet(&self, x: &R, y: &R, t: &R) -> [R; 4] {
        let exps: Vec<R> = self
            .terms
            .iter()
            .map(|(w, _)| w[0].clone() * x.clone() + w[1].clone() * y.clone() + w[2].clone() * t.clone())
            .collect();
        let max = exps.iter().cloned().reduce(|a, b| if b > a { b } else { a }).expect("nonempty");
        let zero = R::from_f64(0.0);
        let mut acc = [zero.clone(), zero.clone(), zero.clone(), zero];
        for ((w, c), e) in self.terms.iter().zip(exps) {
            let term = c.clone() * (e - max.clone()).exp();
            let tx = term.clone() * w[0].clone();
            acc[2] = acc[2].clone() + tx.clone() * w[0].clone();
            acc[1] = acc[1].clone() + tx;
            acc[3] = acc[3].clone() + term.abs();
            acc[0] = acc[0].clone() + term;
        }
        acc
    }

    /// `p = 2(τ τ_xx − τ_x²)/τ²`.
    pub fn eval_p(&self, x: &R, y: &R, t: &R) -> Result<R> {
        let [tau, tx, txx, mag] = self.x_jet(x, y, t);
        if (tau.abs() / mag).to_f64() <= TAU_GUARD {
            return Err(Error::Singular(format!(
                "tau vanishes at ({:.6}, {:.6}, {:.6})",
                x.to_f64(),
                y.to_f64(),
                t.to_f64()
            )));
        }
        let num = tau.clone() * txx - tx.clone() * tx;
        Ok(R::from_f64(2.0) * num / (tau.clone() * tau))
    }

    /// KP residual `4p_xt − 6(p_x² + p p_xx) − p_xxxx − 3p_yy` by central differences.
    pub fn kp_residual(&self, x: f64, y: f64, t: f64) -> Result<KpResidual> {
        let h = R::from_f64(self.h);
        let (x, y, t) = (R::from_f64(x), R::from_f64(y), R::from_f64(t));
        let off = |k: i32| h.clone() * R::from_f64(k as f64);
        let p = |dx: i32, dy: i32, dt: i32| {
            self.eval_p(&(x.clone() + off(dx)), &(y.clone() + off(dy)), &(t.clone() + off(dt)))
        };
        let c = |v: f64| R::from_f64(v);

        // 5-point stencils, O(h⁴)
        let d1 = [c(1.0), c(-8.0), c(0.0), c(8.0), c(-1.0)];
        let d2 = [c(-1.0), c(16.0), c(-30.0), c(16.0), c(-1.0)];
        // O(h²)
        let d4 = [c(1.0), c(-4.0), c(6.0), c(-4.0), c(1.0)];
        let twelve_h = c(12.0) * h.clone();

        let mut px_line = Vec::with_capacity(5);
        let mut py_line = Vec::with_capacity(5);
        for k in -2..=2 {
            px_line.push(p(k, 0, 0)?);
            py_line.push(p(0, k, 0)?);
        }
        let dot = |w: &[R; 5], f: &[R]| w.iter().zip(f).fold(c(0.0), |acc, (a, b)| acc + a.clone() * b.clone());
        let p0 = px_line[2].clone();
        let p_x = dot(&d1, &px_line) / twelve_h.clone();
        let p_xx = dot(&d2, &px_line) / (twelve_h.clone() * h.clone());
        let h4 = h.clone() * h.clone() * h.clone() * h.clone();
        let p_xxxx = dot(&d4, &px_line) / h4;
        let p_yy = dot(&d2, &py_line) / (twelve_h.clone() * h.clone());
        let mut rows = Vec::with_capacity(5);
        for i in -2..=2 {
            let mut line = Vec::with_capacity(5);
            for j in -2..=2 {
                line.push(p(i, 0, j)?);
            }
            rows.push(dot(&d1, &line) / twelve_h.clone());
        }
        let p_xt = dot(&d1, &rows) / twelve_h;

        let terms = [
            c(4.0) * p_xt,
            c(6.0) * (p_x.clone() * p_x + p0.clone() * p_xx),
            p_xxxx,
            c(3.0) * p_yy,
        ];
        let res = terms[0].clone() - terms[1].clone() - terms[2].clone() - terms[3].clone();
        let scale = terms.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        Ok(KpResidual { p: p0.to_f64(), residual: res.to_f64().abs(), scale })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KpResidual {
    pub p: f64,
    /// `|4p_xt − 6(p p_x)_x − p_xxxx − 3p_yy|`.
    pub residual: f64,
    /// Largest magnitude among the four terms.
    pub scale: f64,
}

impl KpResidual {
    pub fn relative(&self) -> f64 {
        self.residual / (1.0 + self.scale)
    }
}

/// `j`-th coordinate `∏_i (1 − κ_{2j} y_i)/(1 − κ_{2j+1} y_i)`.
pub fn abel_eval<F: Field>(kappa: &[F], ys: &[F]) -> Result<Vec<F>> {
    if kappa.len() % 2 != 0 || kappa.is_empty() {
        return Err(Error::input("abel map needs 2g kappas"));
    }
    let g = kappa.len() / 2;
    if ys.len() + 1 != g {
        return Err(Error::input(format!("abel map needs g−1 = {} points, got {}", g - 1, ys.len())));
    }
    let mut out = Vec::with_capacity(g);
    for j in 0..g {
        let mut acc = F::one();
        for y in ys {
            let den = F::one() - kappa[2 * j + 1].clone() * y.clone();
            if den.is_zero() {
                return Err(Error::input(format!("pole: 1 − κ y vanishes in coordinate {}", j + 1)));
            }
            acc = acc * (F::one() - kappa[2 * j].clone() * y.clone()) / den;
        }
        out.push(acc);
    }
    Ok(out)
}

/// One row of a residual grid dump.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub p: f64,
    pub residual: f64,
}

pub fn residual_grid<R: Real>(ctx: &EvalContext<R>, points: &[[f64; 3]]) -> Result<Vec<GridRow>> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|&[x, y, t]| {
            let r = ctx.kp_residual(x, y, t)?;
            Ok(GridRow { x, y, t, p: r.p, residual: r.residual })
        })
        .collect()
}
