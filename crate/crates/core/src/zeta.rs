//! Weil polynomials of supersingular genus-2 curves: the Cartier-Manin
//! test, table lookup from the Galois structure of a finite set, sign
//! disambiguation, and a brute-force point-counting oracle.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::exact_sqrt_u128;
use crate::curve::{CurveModel, Relation};
use crate::error::{Error, Result};
use crate::ff::{Fe, FieldCtx};
use crate::jacobian::Jacobian;
use crate::poly::{FactorShape, Polynomial};

/// Default enumeration bound on the size of the field being scanned.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// (r, s) with f_J(x) = x^4 + r x^3 + s x^2 + q r x + q^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeilCoeffs {
    pub r: i128,
    pub s: i128,
    pub q: u128,
}

impl WeilCoeffs {
    pub fn new(r: i128, s: i128, q: u128) -> WeilCoeffs {
        WeilCoeffs { r, s, q }
    }

    /// f_J(x) evaluated at an integer.
    pub fn eval(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        let q = BigInt::from(self.q);
        let r = BigInt::from(self.r);
        let s = BigInt::from(self.s);
        let x2 = &x * &x;
        &x2 * &x2 + &r * &x2 * &x + &s * &x2 + &q * &r * &x + &q * &q
    }

    /// |J(k)| = f_J(1).
    pub fn j_order(&self) -> BigInt {
        self.eval(1)
    }

    /// Weil data of the hyperelliptic twist.
    pub fn twisted(&self) -> WeilCoeffs {
        WeilCoeffs { r: -self.r, ..*self }
    }

    /// |C(k)| = q + 1 + r.
    pub fn n1(&self) -> i128 {
        self.q as i128 + 1 + self.r
    }

    /// |C(k_2)| = q^2 + 1 - r^2 + 2s.
    pub fn n2(&self) -> BigInt {
        let q = BigInt::from(self.q);
        &q * &q + 1 - BigInt::from(self.r) * self.r + BigInt::from(self.s) * 2
    }

    pub fn polynomial_string(&self) -> String {
        let mut out = String::from("x^4");
        let term = |out: &mut String, c: BigInt, mon: &str| {
            if c.is_zero() {
                return;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            let a = c.abs();
            if mon.is_empty() {
                out.push_str(&format!("{sign}{a}"));
            } else if a == BigInt::from(1) {
                out.push_str(&format!("{sign}{mon}"));
            } else {
                out.push_str(&format!("{sign}{a}*{mon}"));
            }
        };
        let q = BigInt::from(self.q);
        term(&mut out, BigInt::from(self.r), "x^3");
        term(&mut out, BigInt::from(self.s), "x^2");
        term(&mut out, &q * self.r, "x");
        term(&mut out, &q * &q, "");
        out
    }
}

impl fmt::Display for WeilCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r, self.s)
    }
}

/// Point counts over k and its quadratic extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCounts {
    pub n1: u128,
    pub n2: u128,
}

/// Recovers (r, s) from |C(k)| and |C(k_2)|.
pub fn zeta_from_counts(counts: PointCounts, q: u128) -> Result<WeilCoeffs> {
    let r = counts.n1 as i128 - q as i128 - 1;
    let num: BigInt = BigInt::from(counts.n2) - BigInt::from(q) * BigInt::from(q) - 1
        + BigInt::from(r) * BigInt::from(r);
    if (&num % 2u32) != BigInt::zero() {
        return Err(Error::InconsistentCounts);
    }
    let s = (num / BigInt::from(2)).to_i128().ok_or(Error::InconsistentCounts)?;
    Ok(WeilCoeffs { r, s, q })
}

// ---------------------------------------------------------------------------
// Supersingularity

/// Cartier-Manin matrix M and its entrywise p-th power.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CartierMatrix {
    pub m: [Fe; 4],
    pub mp: [Fe; 4],
}

pub fn cartier_matrix(curve: &CurveModel) -> Result<CartierMatrix> {
    let f = curve
        .f()
        .ok_or_else(|| Error::WrongCharacteristic("Cartier-Manin matrix needs odd p".into()))?;
    let k = f.ctx();
    let p = k.p() as usize;
    let h = f.pow(((p - 1) / 2) as u32);
    let m = [h.coeff(p - 1), h.coeff(p - 2), h.coeff(2 * p - 1), h.coeff(2 * p - 2)];
    let mp = m.map(|c| k.frob(c));
    Ok(CartierMatrix { m, mp })
}

impl CartierMatrix {
    /// M^(p) * M.
    pub fn product(&self, k: &FieldCtx) -> [Fe; 4] {
        let a = &self.mp;
        let b = &self.m;
        [
            k.add(k.mul(a[0], b[0]), k.mul(a[1], b[2])),
            k.add(k.mul(a[0], b[1]), k.mul(a[1], b[3])),
            k.add(k.mul(a[2], b[0]), k.mul(a[3], b[2])),
            k.add(k.mul(a[2], b[1]), k.mul(a[3], b[3])),
        ]
    }
}

/// Odd p: M^(p) M = 0. Artin-Schreier models in characteristic 2 are
/// supersingular by construction.
pub fn is_supersingular(curve: &CurveModel) -> bool {
    match cartier_matrix(curve) {
        Ok(cm) => cm.product(curve.ctx()).iter().all(|x| x.is_zero()),
        Err(_) => true,
    }
}

// ---------------------------------------------------------------------------
// Point counting oracle

/// |C(k_ext)|, by enumeration of x over k_ext.
pub fn count_points(curve: &CurveModel, ext: usize, budget: u128) -> Result<u128> {
    let k = curve.ctx();
    let size = crate::ff::checked_pow(k.p(), k.n() * ext)
        .ok_or_else(|| Error::BudgetExceeded(format!("q^{ext} overflows")))?;
    if size > budget || size > u64::MAX as u128 {
        return Err(Error::BudgetExceeded(format!("field of size {size} exceeds {budget}")));
    }
    let (big, emb) = k.extension(ext)?;
    let big = &big;
    let n = size as u64;
    match curve {
        CurveModel::OddChar { f } => {
            let g = f.embed(&emb);
            let affine: u128 = (0..n)
                .into_par_iter()
                .map(|x| {
                    let v = g.eval(Fe(x as u128));
                    if v.is_zero() {
                        1u128
                    } else if big.is_square(v) {
                        2
                    } else {
                        0
                    }
                })
                .sum();
            let infinity = if g.degree() == 5 {
                1
            } else if big.is_square(g.lc()) {
                2
            } else {
                0
            };
            Ok(affine + infinity)
        }
        CurveModel::Char2 { a, b, c, d, .. } => {
            let g = Polynomial::new(
                big.clone(),
                vec![emb.map(*d), emb.map(*c), Fe::ZERO, emb.map(*b), Fe::ZERO, emb.map(*a)],
            );
            let affine: u128 = (0..n)
                .into_par_iter()
                .map(|x| if big.abs_trace(g.eval(Fe(x as u128))) == 0 { 2u128 } else { 0 })
                .sum();
            Ok(affine + 1)
        }
    }
}

pub fn count_both(curve: &CurveModel, budget: u128) -> Result<PointCounts> {
    Ok(PointCounts { n1: count_points(curve, 1, budget)?, n2: count_points(curve, 2, budget)? })
}

/// Weil data by counting points over k and k_2.
pub fn oracle_weil(curve: &CurveModel, budget: u128) -> Result<WeilCoeffs> {
    zeta_from_counts(count_both(curve, budget)?, curve.ctx().q())
}

// ---------------------------------------------------------------------------
// Characteristic 2

/// Invariants attached to y^2 + y = a x^5 + b x^3 + c x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Char2Invariants {
    pub p_poly: Polynomial,
    pub p_shape: FactorShape,
    pub t_coeff: Fe,
    pub n: u32,
    pub m: u32,
}

/// Moves d to 0 by y -> y + u when tr(d) = 0; otherwise to the hyperelliptic
/// twist class. Returns the d = 0 model and whether the class was twisted.
pub fn normalize_char2(curve: &CurveModel) -> Result<(CurveModel, bool)> {
    match curve {
        CurveModel::Char2 { ctx, a, b, c, d } => {
            let flipped = ctx.abs_trace(*d) == 1;
            Ok((CurveModel::Char2 { ctx: ctx.clone(), a: *a, b: *b, c: *c, d: Fe::ZERO }, flipped))
        }
        _ => Err(Error::WrongCharacteristic("expected an Artin-Schreier model".into())),
    }
}

pub fn char2_invariants(curve: &CurveModel) -> Result<Char2Invariants> {
    let (ctx, a, b, c) = match curve {
        CurveModel::Char2 { ctx, a, b, c, .. } => (ctx, *a, *b, *c),
        _ => return Err(Error::WrongCharacteristic("expected an Artin-Schreier model".into())),
    };
    let k = ctx;
    let b2 = k.square(b);
    let p_poly = Polynomial::new(
        k.clone(),
        vec![a, b2, Fe::ZERO, Fe::ZERO, Fe::ZERO, k.square(a)],
    );
    let fact = p_poly.factor()?;
    let mut degs = Vec::new();
    for (g, e) in &fact.factors {
        for _ in 0..*e {
            degs.push(g.degree() as u32);
        }
    }
    let p_shape = FactorShape::from_degrees(&degs);
    let t_coeff = k.add(c, k.div(b2, a)?);
    let tr = |z: Fe| k.abs_trace(k.mul(t_coeff, z));
    let n = p_poly.roots().into_iter().filter(|&z| tr(z) == 0).count() as u32;
    let m = fact
        .factors
        .iter()
        .filter(|(g, _)| g.degree() == 2 && tr(g.coeff(1)) == 0)
        .count() as u32;
    Ok(Char2Invariants { p_poly, p_shape, t_coeff, n, m })
}

fn pm(r: i128, s: i128, q: u128) -> Vec<WeilCoeffs> {
    if r == 0 {
        vec![WeilCoeffs::new(0, s, q)]
    } else {
        vec![WeilCoeffs::new(r, s, q), WeilCoeffs::new(-r, s, q)]
    }
}

fn isqrt_exact(x: u128) -> Result<i128> {
    exact_sqrt_u128(x)
        .map(|v| v as i128)
        .ok_or_else(|| Error::RowNotFound(format!("{x} is not a perfect square")))
}

/// Candidate Weil data for an Artin-Schreier curve (any d).
pub fn table2_candidates(curve: &CurveModel) -> Result<Vec<WeilCoeffs>> {
    let (base, flipped) = normalize_char2(curve)?;
    let inv = char2_invariants(&base)?;
    let q = curve.ctx().q();
    let qi = q as i128;
    let shape = inv.p_shape.to_string();
    let miss = || Error::RowNotFound(format!("P(x) = {shape}, N = {}, M = {}", inv.n, inv.m));
    let out = if !curve.ctx().q_is_square() {
        let r2q = isqrt_exact(2 * q)?;
        match (shape.as_str(), inv.n, inv.m) {
            ("(1)(4)", 0, _) => pm(r2q, 2 * qi, q),
            ("(1)(4)", 1, _) => pm(0, 0, q),
            ("(2)(3)", _, 0) => pm(r2q, qi, q),
            ("(2)(3)", _, 1) => pm(0, qi, q),
            ("(1)^3(2)", 0, _) => pm(2 * r2q, 4 * qi, q),
            ("(1)^3(2)", 1, _) => pm(0, 2 * qi, q),
            ("(1)^3(2)", 2, _) => pm(0, 0, q),
            ("(1)^3(2)", 3, _) => pm(0, -2 * qi, q),
            _ => return Err(miss()),
        }
    } else {
        let rq = isqrt_exact(q)?;
        match (shape.as_str(), inv.n, inv.m) {
            ("(5)", _, _) => pm(rq, qi, q),
            ("(1)^2(3)", 0, _) => pm(0, -qi, q),
            ("(1)^2(3)", 1, _) => pm(0, qi, q),
            ("(1)^2(3)", 2, _) => pm(2 * rq, 3 * qi, q),
            ("(1)(2)^2", _, 0) => pm(2 * rq, 2 * qi, q),
            ("(1)(2)^2", _, 1) => pm(0, 0, q),
            ("(1)(2)^2", _, 2) => pm(0, 2 * qi, q),
            ("(1)^5", 1, _) => pm(0, -2 * qi, q),
            ("(1)^5", 3, _) => pm(0, 2 * qi, q),
            ("(1)^5", 5, _) => pm(4 * rq, 6 * qi, q),
            _ => return Err(miss()),
        }
    };
    Ok(if flipped { out.iter().map(|w| w.twisted()).collect() } else { out })
}

// ---------------------------------------------------------------------------
// Odd characteristic tables

/// Outcome of the odd-characteristic table lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table34 {
    Candidates(Vec<WeilCoeffs>),
    NotPossible,
}

/// A matched row: the tabulated 2-rank and the outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table34Row {
    pub rk2: u32,
    pub outcome: Table34,
}

/// rk_2(J) from the Galois shape of W.
pub fn rk2_from_shape(shape: &FactorShape) -> Result<u32> {
    let r1 = shape.count_of(1);
    let r2 = shape.count_of(2);
    let v = 1 + r1 * r1.saturating_sub(1) / 2 + r2;
    if shape.total() != 6 || !v.is_power_of_two() {
        return Err(Error::NonIntegerRank);
    }
    Ok(v.trailing_zeros())
}

fn legendre_minus_one(p: u64) -> i128 {
    if p % 4 == 1 {
        1
    } else {
        -1
    }
}

pub fn table34_row(shape: &FactorShape, p: u64, q: u128) -> Result<Table34Row> {
    let key = shape.to_string();
    let qi = q as i128;
    let square = exact_sqrt_u128(q).is_some();
    let np = Table34::NotPossible;
    let c = Table34::Candidates;
    let eps = legendre_minus_one(p);
    let (rk2, outcome) = if !square {
        match key.as_str() {
            "(1)^6" => (4, c(pm(0, -2 * eps * qi, q))),
            "(1)^4(2)" => (3, c(pm(0, -2 * eps * qi, q))),
            "(1)^2(2)^2" | "(2)^3" => (2, c(vec![WeilCoeffs::new(0, 2 * qi, q), WeilCoeffs::new(0, -2 * qi, q)])),
            "(1)^3(3)" => (2, np),
            "(1)(2)(3)" => {
                if p == 3 {
                    (1, c(pm(isqrt_exact(3 * q)?, 2 * qi, q)))
                } else {
                    (1, np)
                }
            }
            "(1)^2(4)" | "(2)(4)" => (1, c(pm(0, 0, q))),
            "(1)(5)" => {
                if p == 5 {
                    (0, c(pm(isqrt_exact(5 * q)?, 3 * qi, q)))
                } else {
                    (0, np)
                }
            }
            "(3)^2" => match p % 3 {
                1 => (0, c(pm(0, qi, q))),
                2 => (0, c(pm(0, eps * qi, q))),
                _ => (0, np),
            },
            "(6)" => {
                if p % 3 == 2 {
                    (0, c(vec![WeilCoeffs::new(0, qi, q), WeilCoeffs::new(0, -qi, q)]))
                } else {
                    (0, c(pm(0, qi, q)))
                }
            }
            _ => return Err(Error::RowNotFound(key)),
        }
    } else {
        let rq = isqrt_exact(q)?;
        match key.as_str() {
            "(1)^6" => {
                let mut v = pm(0, -2 * qi, q);
                v.extend(pm(4 * rq, 6 * qi, q));
                (4, c(v))
            }
            "(1)^4(2)" => (3, c(pm(0, -2 * qi, q))),
            "(1)^2(2)^2" | "(2)^3" => (2, c(vec![WeilCoeffs::new(0, 2 * qi, q), WeilCoeffs::new(0, -2 * qi, q)])),
            "(1)^3(3)" => {
                if p == 3 {
                    (2, c(pm(rq, 0, q)))
                } else {
                    (2, np)
                }
            }
            "(1)(2)(3)" => (1, np),
            "(1)^2(4)" | "(2)(4)" => {
                if p % 8 == 1 {
                    (1, np)
                } else {
                    (1, c(pm(0, 0, q)))
                }
            }
            "(1)(5)" => {
                if p % 5 == 1 {
                    (0, np)
                } else {
                    (0, c(pm(rq, qi, q)))
                }
            }
            "(3)^2" => {
                let mut v = pm(0, qi, q);
                v.extend(pm(2 * rq, 3 * qi, q));
                (0, c(v))
            }
            "(6)" => {
                if p % 12 == 5 {
                    (0, c(vec![WeilCoeffs::new(0, qi, q), WeilCoeffs::new(0, -qi, q)]))
                } else {
                    (0, c(pm(0, qi, q)))
                }
            }
            _ => return Err(Error::RowNotFound(key)),
        }
    };
    Ok(Table34Row { rk2, outcome })
}

pub fn table34_candidates(shape: &FactorShape, p: u64, q: u128) -> Result<Table34> {
    Ok(table34_row(shape, p, q)?.outcome)
}

// ---------------------------------------------------------------------------
// Full pipeline

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "table")]
    Table,
    #[serde(rename = "table+order-test")]
    TableOrderTest,
    #[serde(rename = "table+count")]
    TableCount,
    #[serde(rename = "count")]
    Count,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Table => "table",
            Method::TableOrderTest => "table+order-test",
            Method::TableCount => "table+count",
            Method::Count => "count",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ZetaOptions {
    pub budget: u128,
    pub seed: u64,
    pub samples: usize,
    /// Skip the order test and resolve ambiguity by counting only.
    pub count_only: bool,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions { budget: DEFAULT_BUDGET, seed: 0, samples: 32, count_only: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaResult {
    pub weil: WeilCoeffs,
    pub method: Method,
    pub candidates: Vec<WeilCoeffs>,
    pub shape: Option<FactorShape>,
}

/// Candidates surviving the order test n D = 0 on seeded divisors.
pub fn order_test(curve: &CurveModel, cands: &[WeilCoeffs], opts: &ZetaOptions) -> Result<Vec<WeilCoeffs>> {
    let model = curve.to_deg5().ok_or(Error::WrongModel)?;
    let jac = Jacobian::new(&model)?;
    let divisors: Vec<_> = (0..opts.samples)
        .map(|i| jac.random_divisor(opts.seed.wrapping_add(i as u64)))
        .collect::<Result<_>>()?;
    Ok(cands
        .iter()
        .filter(|w| {
            let n = w.j_order();
            divisors.iter().all(|d| jac.is_identity(&jac.scalar_mul(&n, d)))
        })
        .copied()
        .collect())
}

/// Picks the candidate consistent with point counts.
pub fn resolve_by_count(curve: &CurveModel, cands: &[WeilCoeffs], budget: u128) -> Result<WeilCoeffs> {
    let to_amb = |e: Error| match e {
        Error::BudgetExceeded(_) => Error::AmbiguityUnresolved,
        other => other,
    };
    let n1 = count_points(curve, 1, budget).map_err(to_amb)?;
    let mut left: Vec<WeilCoeffs> =
        cands.iter().filter(|w| w.n1() == n1 as i128).copied().collect();
    if left.len() > 1 {
        let n2 = count_points(curve, 2, budget).map_err(to_amb)?;
        left.retain(|w| w.n2() == BigInt::from(n2));
    }
    match left.len() {
        1 => Ok(left[0]),
        0 => Err(Error::InconsistentCounts),
        _ => Err(Error::AmbiguityUnresolved),
    }
}

/// The Weil polynomial by table lookup plus disambiguation.
pub fn weil_polynomial(curve: &CurveModel, opts: &ZetaOptions) -> Result<ZetaResult> {
    if !is_supersingular(curve) {
        return Err(Error::NotSupersingular);
    }
    let k = curve.ctx();
    let (cands, shape) = match curve {
        CurveModel::Char2 { .. } => (table2_candidates(curve)?, None),
        CurveModel::OddChar { .. } => {
            let shape = curve.weierstrass_shape()?;
            match table34_candidates(&shape, k.p(), k.q())? {
                Table34::Candidates(c) => (c, Some(shape)),
                Table34::NotPossible => return Err(Error::NotSupersingular),
            }
        }
    };
    let done = |weil, method| ZetaResult { weil, method, candidates: cands.clone(), shape: shape.clone() };
    if cands.len() == 1 {
        return Ok(done(cands[0], Method::Table));
    }
    if !opts.count_only && matches!(curve, CurveModel::OddChar { .. }) {
        match order_test(curve, &cands, opts) {
            Ok(surv) if surv.len() == 1 => return Ok(done(surv[0], Method::TableOrderTest)),
            Ok(_) | Err(Error::WrongModel) | Err(Error::NoRationalPoints) => {}
            Err(e) => return Err(e),
        }
    }
    let w = resolve_by_count(curve, &cands, opts.budget)?;
    Ok(done(w, Method::TableCount))
}

/// Weil data by counting only (for comparison runs).
pub fn weil_by_count(curve: &CurveModel, budget: u128) -> Result<ZetaResult> {
    let w = oracle_weil(curve, budget)?;
    let shape = curve.weierstrass_shape().ok();
    Ok(ZetaResult { weil: w, method: Method::Count, candidates: vec![w], shape })
}

// ---------------------------------------------------------------------------
// Twisting formulas

/// Weil data of C_v when C has Weil polynomial (x + sqrt q)^4.
pub fn twisted_weil_qsq(rel: Relation, q: u128) -> Result<WeilCoeffs> {
    let rq = exact_sqrt_u128(q).ok_or(Error::UnclassifiedOrder)? as i128;
    let qi = q as i128;
    let w = |r, s| Ok(WeilCoeffs::new(r, s, q));
    match rel {
        Relation::PowOne(2) => w(0, -2 * qi),
        Relation::PowIota(2) => w(0, 2 * qi),
        Relation::PowOne(3) => w(-2 * rq, 3 * qi),
        Relation::PowIota(3) => w(2 * rq, 3 * qi),
        Relation::PowIota(4) => w(0, 0),
        Relation::PowOne(5) => w(-rq, qi),
        Relation::PowIota(5) => w(rq, qi),
        Relation::PowOne(6) => w(0, qi),
        Relation::PowIota(6) => w(0, -qi),
        _ => Err(Error::UnclassifiedOrder),
    }
}

/// Weil data of C_v when C has Weil polynomial (x^2 + eps q)^2; n is the
/// order of v v^sigma.
pub fn twisted_weil_qnsq(n: u32, eps: i8, q: u128) -> Result<WeilCoeffs> {
    let e = eps as i128 * q as i128;
    let w = |s| Ok(WeilCoeffs::new(0, s, q));
    match n {
        1 => w(2 * e),
        2 => w(-2 * e),
        3 => w(-e),
        4 => w(0),
        6 => w(e),
        _ => Err(Error::InvalidOrder(n as u64)),
    }
}

// ---------------------------------------------------------------------------
// Group structure

/// A finite abelian group as a list of cyclic factor orders.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupStructure(pub Vec<BigUint>);

impl GroupStructure {
    fn new(mut v: Vec<BigUint>) -> GroupStructure {
        v.retain(|x| *x != BigUint::from(1u32));
        v.sort();
        GroupStructure(v)
    }
    pub fn order(&self) -> BigUint {
        self.0.iter().product()
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// All (r, s) appearing in the tables for this p and q.
pub fn supersingular_catalogue(p: u64, q: u128) -> Vec<WeilCoeffs> {
    let mut out = Vec::new();
    if p == 2 {
        let qi = q as i128;
        if let Some(rq) = exact_sqrt_u128(q) {
            let rq = rq as i128;
            for (r, s) in [(rq, qi), (0, -qi), (0, qi), (2 * rq, 3 * qi), (2 * rq, 2 * qi), (0, 0), (0, 2 * qi), (0, -2 * qi), (4 * rq, 6 * qi)] {
                out.extend(pm(r, s, q));
            }
        } else if let Some(r2q) = exact_sqrt_u128(2 * q) {
            let r2q = r2q as i128;
            for (r, s) in [(r2q, 2 * qi), (0, 0), (r2q, qi), (0, qi), (2 * r2q, 4 * qi), (0, 2 * qi), (0, -2 * qi)] {
                out.extend(pm(r, s, q));
            }
        }
    } else {
        for degs in [
            vec![1, 1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, 2],
            vec![1, 1, 2, 2],
            vec![1, 1, 1, 3],
            vec![1, 2, 3],
            vec![1, 1, 4],
            vec![1, 5],
            vec![3, 3],
            vec![6],
        ] {
            if let Ok(Table34Row { outcome: Table34::Candidates(c), .. }) =
                table34_row(&FactorShape::from_degrees(&degs), p, q)
            {
                out.extend(c);
            }
        }
        if exact_sqrt_u128(q).is_some() {
            for rel in [
                Relation::PowOne(2),
                Relation::PowIota(2),
                Relation::PowOne(3),
                Relation::PowIota(3),
                Relation::PowIota(4),
                Relation::PowOne(5),
                Relation::PowIota(5),
                Relation::PowOne(6),
                Relation::PowIota(6),
            ] {
                out.extend(twisted_weil_qsq(rel, q).map(|w| pm(w.r, w.s, q)).unwrap_or_default());
            }
        } else {
            for n in [1, 2, 3, 4, 6] {
                for eps in [1, -1] {
                    out.extend(twisted_weil_qnsq(n, eps, q));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Monic integer factors of f_J as (coefficients low-first, multiplicity).
fn factor_weil(w: &WeilCoeffs) -> Vec<(Vec<i128>, u32)> {
    let q = w.q as i128;
    let mut quads: Vec<Vec<i128>> = Vec::new();
    // (x^2 + a x + q)(x^2 + c x + q): a + c = r, ac = s - 2q
    let disc = w.r * w.r - 4 * (w.s - 2 * q);
    if disc >= 0 {
        if let Some(d) = exact_sqrt_u128(disc as u128) {
            let d = d as i128;
            if (w.r + d) % 2 == 0 {
                quads.push(vec![q, (w.r + d) / 2]);
                quads.push(vec![q, (w.r - d) / 2]);
            }
        }
    }
    if quads.is_empty() && w.r == 0 {
        // (x^2 + a x - q)(x^2 - a x - q): -a^2 = s + 2q
        let t = -(w.s + 2 * q);
        if t >= 0 {
            if let Some(a) = exact_sqrt_u128(t as u128) {
                quads.push(vec![-q, a as i128]);
                quads.push(vec![-q, -(a as i128)]);
            }
        }
    }
    if quads.is_empty() {
        return vec![(vec![q * q, q * w.r, w.s, w.r, 1], 1)];
    }
    // split quadratics with integer roots
    let mut factors: Vec<Vec<i128>> = Vec::new();
    for qd in quads {
        let (b, a) = (qd[0], qd[1]);
        let dd = a * a - 4 * b;
        match (dd >= 0).then(|| exact_sqrt_u128(dd as u128)).flatten() {
            Some(sd) => {
                let sd = sd as i128;
                factors.push(vec![(a + sd) / 2, 1]);
                factors.push(vec![(a - sd) / 2, 1]);
            }
            None => factors.push(vec![b, a, 1]),
        }
    }
    let mut out: Vec<(Vec<i128>, u32)> = Vec::new();
    for f in factors {
        match out.iter_mut().find(|(g, _)| *g == f) {
            Some(e) => e.1 += 1,
            None => out.push((f, 1)),
        }
    }
    out
}

/// Candidate structures of the group of rational points of the Jacobian.
pub fn group_structure_candidates(w: &WeilCoeffs, p: u64) -> Result<Vec<GroupStructure>> {
    if !supersingular_catalogue(p, w.q).contains(w) {
        return Err(Error::UnknownClass);
    }
    let q = w.q;
    let square = exact_sqrt_u128(q).is_some();
    let big = |x: i128| BigUint::from(x.unsigned_abs());
    let qi = q as i128;
    let exceptional = w.r == 0
        && ((!square && p % 4 == 3 && w.s == 2 * qi)
            || (!square && p % 4 == 1 && w.s == -2 * qi)
            || (square && w.s == -2 * qi));
    if exceptional {
        let mut out = Vec::new();
        if !square {
            let f1 = if w.s == 2 * qi { big(1 + qi) } else { big(qi - 1) };
            let half = &f1 / 2u32;
            for n in 0..=2u32 {
                let mut v = Vec::new();
                for _ in 0..(2 - n) {
                    v.push(f1.clone());
                }
                for _ in 0..n {
                    v.push(half.clone());
                    v.push(BigUint::from(2u32));
                }
                out.push(GroupStructure::new(v));
            }
        } else {
            let qm1 = big(qi - 1);
            out.push(GroupStructure::new(vec![
                &qm1 / 2u32,
                &qm1 / 2u32,
                BigUint::from(2u32),
                BigUint::from(2u32),
            ]));
            let v2 = (qi - 1).trailing_zeros();
            for m in 0..=v2 {
                for n in m..=v2 {
                    out.push(GroupStructure::new(vec![
                        &qm1 >> m,
                        &qm1 >> n,
                        BigUint::from(1u32) << (m + n),
                    ]));
                }
            }
        }
        out.sort();
        out.dedup();
        return Ok(out);
    }
    let mut v = Vec::new();
    for (f, e) in factor_weil(w) {
        let at1: i128 = f.iter().sum();
        for _ in 0..e {
            v.push(big(at1));
        }
    }
    Ok(vec![GroupStructure::new(v)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;

    fn curve(p: u64, n: usize, s: &str) -> CurveModel {
        CurveModel::parse(&FieldCtx::new(p, n).unwrap(), s).unwrap()
    }

    #[test]
    fn cartier_examples() {
        let c = curve(3, 1, "y^2 = x^5 - 1");
        let cm = cartier_matrix(&c).unwrap();
        let k = c.ctx();
        assert_eq!(cm.m, [Fe::ZERO, Fe::ZERO, k.one(), Fe::ZERO]);
        assert!(is_supersingular(&c));
        assert!(!is_supersingular(&curve(3, 1, "y^2 = x^5 - x")));
        assert!(is_supersingular(&curve(7, 1, "y^2 = x^5 - x")));
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_points(&curve(7, 1, "y^2 = x^5 - 1"), 1, DEFAULT_BUDGET).unwrap(), 8);
        assert_eq!(count_points(&curve(2, 1, "y^2 + y = x^5"), 1, DEFAULT_BUDGET).unwrap(), 3);
        assert_eq!(count_points(&curve(11, 1, "y^2 = x^6 - 1"), 1, DEFAULT_BUDGET).unwrap(), 12);
        assert_eq!(
            count_points(&curve(7, 1, "y^2 = x^5 - 1"), 2, 10).unwrap_err().name(),
            "BudgetExceeded"
        );
    }

    #[test]
    fn counts_to_weil() {
        let w = zeta_from_counts(PointCounts { n1: 8, n2: 50 }, 7).unwrap();
        assert_eq!((w.r, w.s), (0, 0));
        assert_eq!(
            zeta_from_counts(PointCounts { n1: 8, n2: 51 }, 7).unwrap_err(),
            Error::InconsistentCounts
        );
        let w = oracle_weil(&curve(11, 1, "y^2 = x^6 - 1"), DEFAULT_BUDGET).unwrap();
        assert_eq!((w.r, w.s), (0, 22));
    }

    #[test]
    fn table2_examples() {
        let c = curve(2, 1, "y^2 + y = x^5");
        assert_eq!(table2_candidates(&c).unwrap(), vec![WeilCoeffs::new(0, 0, 2)]);
        let c = curve(2, 1, "y^2 + y = x^5 + x^3");
        let cands = table2_candidates(&c).unwrap();
        assert_eq!(cands.len(), 2);
        assert!(cands.contains(&WeilCoeffs::new(2, 2, 2)));
        let z = weil_polynomial(&c, &ZetaOptions::default()).unwrap();
        assert_eq!(z.weil, WeilCoeffs::new(2, 2, 2));
        assert_eq!(z.method, Method::TableCount);
    }

    #[test]
    fn table34_examples() {
        let sh = |s| FactorShape::parse(s).unwrap();
        assert_eq!(table34_candidates(&sh("(1)^2(4)"), 7, 7).unwrap(), Table34::Candidates(vec![WeilCoeffs::new(0, 0, 7)]));
        assert_eq!(table34_candidates(&sh("(1)^3(3)"), 7, 7).unwrap(), Table34::NotPossible);
        match table34_candidates(&sh("(1)^6"), 7, 49).unwrap() {
            Table34::Candidates(c) => assert_eq!(c.len(), 3),
            _ => panic!(),
        }
        assert_eq!(rk2_from_shape(&sh("(1)^6")).unwrap(), 4);
        assert_eq!(rk2_from_shape(&sh("(1)^2(2)^2")).unwrap(), 2);
        assert_eq!(rk2_from_shape(&sh("(6)")).unwrap(), 0);
        assert_eq!(rk2_from_shape(&sh("(1)^5")).unwrap_err(), Error::NonIntegerRank);
    }

    #[test]
    fn pipeline_examples() {
        let o = ZetaOptions::default();
        assert_eq!(weil_polynomial(&curve(7, 1, "y^2 = x^5 - 1"), &o).unwrap().weil, WeilCoeffs::new(0, 0, 7));
        let z = weil_polynomial(&curve(11, 1, "y^2 = x^6 - 1"), &o).unwrap();
        assert_eq!(z.weil, WeilCoeffs::new(0, 22, 11));
        assert_eq!(z.method, Method::TableOrderTest);
        assert_eq!(
            weil_polynomial(&curve(3, 1, "y^2 = x^5 - x"), &o).unwrap_err(),
            Error::NotSupersingular
        );
    }

    #[test]
    fn props() {
        assert_eq!(twisted_weil_qsq(Relation::PowOne(2), 49).unwrap(), WeilCoeffs::new(0, -98, 49));
        assert_eq!(twisted_weil_qsq(Relation::PowIota(5), 49).unwrap(), WeilCoeffs::new(7, 49, 49));
        assert_eq!(twisted_weil_qsq(Relation::PowIota(6), 49).unwrap(), WeilCoeffs::new(0, -49, 49));
        assert_eq!(twisted_weil_qsq(Relation::PowOne(4), 49).unwrap_err(), Error::UnclassifiedOrder);
        assert_eq!(twisted_weil_qnsq(1, 1, 7).unwrap(), WeilCoeffs::new(0, 14, 7));
        assert_eq!(twisted_weil_qnsq(4, -1, 7).unwrap(), WeilCoeffs::new(0, 0, 7));
        assert_eq!(twisted_weil_qnsq(6, -1, 7).unwrap(), WeilCoeffs::new(0, -7, 7));
        assert_eq!(twisted_weil_qnsq(5, 1, 7).unwrap_err(), Error::InvalidOrder(5));
    }

    #[test]
    fn groups() {
        let w = WeilCoeffs::new(0, 14, 7);
        let g = group_structure_candidates(&w, 7).unwrap();
        assert_eq!(g.len(), 3);
        for s in &g {
            assert_eq!(BigInt::from(s.order()), w.j_order());
        }
        let w = WeilCoeffs::new(0, -7, 7);
        let g = group_structure_candidates(&w, 7).unwrap();
        assert_eq!(g, vec![GroupStructure(vec![BigUint::from(43u32)])]);
        assert_eq!(group_structure_candidates(&WeilCoeffs::new(1, 1, 7), 7).unwrap_err(), Error::UnknownClass);
    }
}
