//! Univariate polynomials over an explicit finite field.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};

/// Dense polynomial, lowest degree first, no trailing zeros.
#[derive(Clone)]
pub struct Polynomial {
    ctx: Arc<FieldCtx>,
    c: Vec<Fe>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.c == other.c
    }
}
impl Eq for Polynomial {}

/// Orders by degree, then coefficients from the top down.
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}
impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multiset of irreducible factor degrees as (degree, count), ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactorShape(pub Vec<(u32, u32)>);

impl FactorShape {
    pub fn from_degrees(degs: &[u32]) -> FactorShape {
        let mut sorted = degs.to_vec();
        sorted.sort();
        let mut out: Vec<(u32, u32)> = Vec::new();
        for d in sorted {
            match out.last_mut() {
                Some((dd, r)) if *dd == d => *r += 1,
                _ => out.push((d, 1)),
            }
        }
        FactorShape(out)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|(d, r)| d * r).sum()
    }

    pub fn count_of(&self, d: u32) -> u32 {
        self.0.iter().find(|(dd, _)| *dd == d).map(|x| x.1).unwrap_or(0)
    }

    /// Adds one orbit of the given length.
    pub fn with_orbit(&self, d: u32) -> FactorShape {
        let mut degs = self.degrees();
        degs.push(d);
        FactorShape::from_degrees(&degs)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.0
            .iter()
            .flat_map(|&(d, r)| std::iter::repeat_n(d, r as usize))
            .collect()
    }

    /// Parses "(1)^2(4)".
    pub fn parse(s: &str) -> Result<FactorShape> {
        let mut degs = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| Error::Parse(s.into()))?;
            let close = open.find(')').ok_or_else(|| Error::Parse(s.into()))?;
            let d: u32 = open[..close].trim().parse().map_err(|_| Error::Parse(s.into()))?;
            rest = &open[close + 1..];
            let mut r = 1;
            if let Some(after) = rest.strip_prefix('^') {
                let end = after.find('(').unwrap_or(after.len());
                r = after[..end].trim().parse().map_err(|_| Error::Parse(s.into()))?;
                rest = &after[end..];
            }
            degs.extend(std::iter::repeat_n(d, r));
            rest = rest.trim_start();
        }
        Ok(FactorShape::from_degrees(&degs))
    }
}

impl fmt::Display for FactorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(d, r) in &self.0 {
            if r == 1 {
                write!(f, "({d})")?;
            } else {
                write!(f, "({d})^{r}")?;
            }
        }
        Ok(())
    }
}

/// Complete factorization: leading coefficient times monic irreducible powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    pub factors: Vec<(Polynomial, u32)>,
}

impl Polynomial {
    pub fn new(ctx: Arc<FieldCtx>, mut c: Vec<Fe>) -> Polynomial {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Polynomial { ctx, c }
    }

    /// From small integer coefficients, lowest degree first.
    pub fn from_ints(ctx: &Arc<FieldCtx>, c: &[i64]) -> Polynomial {
        Polynomial::new(ctx.clone(), c.iter().map(|&v| ctx.from_int(v)).collect())
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Polynomial {
        Polynomial { ctx: ctx.clone(), c: Vec::new() }
    }
    pub fn one(ctx: &Arc<FieldCtx>) -> Polynomial {
        Polynomial::constant(ctx, ctx.one())
    }
    pub fn constant(ctx: &Arc<FieldCtx>, a: Fe) -> Polynomial {
        Polynomial::new(ctx.clone(), vec![a])
    }
    pub fn x(ctx: &Arc<FieldCtx>) -> Polynomial {
        Polynomial::monomial(ctx, ctx.one(), 1)
    }
    pub fn monomial(ctx: &Arc<FieldCtx>, a: Fe, d: usize) -> Polynomial {
        let mut c = vec![Fe::ZERO; d + 1];
        c[d] = a;
        Polynomial::new(ctx.clone(), c)
    }
    /// x - a
    pub fn linear(ctx: &Arc<FieldCtx>, a: Fe) -> Polynomial {
        Polynomial::new(ctx.clone(), vec![ctx.neg(a), ctx.one()])
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.c.get(i).copied().unwrap_or(Fe::ZERO)
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == self.ctx.one()
    }
    /// Degree; the zero polynomial has degree -1.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }
    pub fn lc(&self) -> Fe {
        self.c.last().copied().unwrap_or(Fe::ZERO)
    }
    pub fn is_monic(&self) -> bool {
        self.lc() == self.ctx.one()
    }

    fn check(&self, other: &Polynomial) -> Result<()> {
        if *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let k = &self.ctx;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| k.add(self.coeff(i), o.coeff(i))).collect();
        Polynomial::new(k.clone(), c)
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        let k = &self.ctx;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| k.sub(self.coeff(i), o.coeff(i))).collect();
        Polynomial::new(k.clone(), c)
    }

    pub fn neg(&self) -> Polynomial {
        let k = &self.ctx;
        Polynomial::new(k.clone(), self.c.iter().map(|&a| k.neg(a)).collect())
    }

    pub fn scale(&self, a: Fe) -> Polynomial {
        let k = &self.ctx;
        Polynomial::new(k.clone(), self.c.iter().map(|&x| k.mul(x, a)).collect())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let k = &self.ctx;
        let mut c = vec![Fe::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = k.add(c[i + j], k.mul(a, b));
            }
        }
        Polynomial::new(k.clone(), c)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut r = Polynomial::one(&self.ctx);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Multiply by x^d.
    pub fn shift(&self, d: usize) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Fe::ZERO; d];
        c.extend_from_slice(&self.c);
        Polynomial::new(self.ctx.clone(), c)
    }

    pub fn divrem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        self.check(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = &self.ctx;
        let dd = d.degree();
        let inv = k.inv(d.lc()).unwrap();
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return Ok((Polynomial::zero(k), self.clone()));
        }
        let mut quo = vec![Fe::ZERO; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let t = r[top];
            if t.is_zero() {
                continue;
            }
            let f = k.mul(t, inv);
            quo[top - dd] = f;
            for j in 0..=dd {
                r[top - dd + j] = k.sub(r[top - dd + j], k.mul(f, d.c[j]));
            }
        }
        r.truncate(dd);
        Ok((Polynomial::new(k.clone(), quo), Polynomial::new(k.clone(), r)))
    }

    pub fn rem(&self, d: &Polynomial) -> Polynomial {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Exact quotient (panics on a nonzero divisor mismatch only via divrem).
    pub fn div_exact(&self, d: &Polynomial) -> Polynomial {
        self.divrem(d).expect("nonzero divisor").0
    }

    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.ctx.inv(self.lc()).unwrap();
        self.scale(inv)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, o: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Polynomial {
        let k = &self.ctx;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| k.scale(a, i as i64))
            .collect();
        Polynomial::new(k.clone(), c)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let k = &self.ctx;
        let mut acc = Fe::ZERO;
        for &a in self.c.iter().rev() {
            acc = k.add(k.mul(acc, x), a);
        }
        acc
    }

    pub fn mulmod(&self, o: &Polynomial, m: &Polynomial) -> Polynomial {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Polynomial) -> Polynomial {
        let mut result = Polynomial::one(&self.ctx).rem(m);
        let base = self.rem(m);
        let bits = e.bits();
        for i in (0..bits).rev() {
            result = result.mulmod(&result, m);
            if e.bit(i) {
                result = result.mulmod(&base, m);
            }
        }
        result
    }

    pub fn powmod_u128(&self, e: u128, m: &Polynomial) -> Polynomial {
        self.powmod(&BigUint::from(e), m)
    }

    /// Composition self(g).
    pub fn compose(&self, g: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(&self.ctx);
        for &a in self.c.iter().rev() {
            acc = acc.mul(g).add(&Polynomial::constant(&self.ctx, a));
        }
        acc
    }

    /// Apply the p^m-power map to every coefficient.
    pub fn frob_coeffs(&self, m: usize) -> Polynomial {
        let k = &self.ctx;
        Polynomial::new(k.clone(), self.c.iter().map(|&a| k.frob_pow(a, m)).collect())
    }

    pub fn embed(&self, emb: &Embedding) -> Polynomial {
        Polynomial::new(emb.dst().clone(), self.c.iter().map(|&a| emb.map(a)).collect())
    }

    /// Coefficient-wise preimage under an embedding, if all coefficients lie
    /// in the image.
    pub fn pull_back(&self, emb: &Embedding) -> Option<Polynomial> {
        let c: Option<Vec<Fe>> = self.c.iter().map(|&a| emb.preimage(a)).collect();
        Some(Polynomial::new(emb.src().clone(), c?))
    }

    pub fn is_separable(&self) -> bool {
        self.deg() > 0 && self.gcd(&self.derivative()).is_one()
    }

    /// x^(q^d) mod self, q the size of the coefficient field.
    fn x_frob(&self, d: usize) -> Polynomial {
        let x = Polynomial::x(&self.ctx);
        let q = self.ctx.q_big();
        let mut h = x.rem(self);
        for _ in 0..d {
            h = h.powmod(&q, self);
        }
        h
    }

    /// Squarefree decomposition of a monic polynomial.
    fn squarefree(&self) -> Vec<(Polynomial, u32)> {
        let k = &self.ctx;
        let mut out = Vec::new();
        let d = self.derivative();
        let mut c = self.gcd(&d);
        let mut w = self.div_exact(&c);
        let mut i = 1;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.div_exact(&y);
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = c.div_exact(&w);
            i += 1;
        }
        if !c.is_one() {
            // c is a polynomial in x^p
            let p = k.p() as usize;
            let n = k.n();
            let root: Vec<Fe> = c
                .c
                .iter()
                .step_by(p)
                .map(|&a| k.frob_pow(a, n - 1))
                .collect();
            let root = Polynomial::new(k.clone(), root);
            for (g, m) in root.squarefree() {
                out.push((g, m * k.p() as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a squarefree monic polynomial:
    /// (product of all irreducible factors of degree d, d).
    fn ddf(&self) -> Vec<(Polynomial, usize)> {
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = Polynomial::x(&self.ctx);
        let q = self.ctx.q_big();
        let mut h = x.rem(&f);
        let mut d = 0;
        while f.degree() > 0 {
            d += 1;
            if 2 * d > f.degree() {
                let deg = f.degree();
                out.push((f.clone(), deg));
                break;
            }
            h = h.powmod(&q, &f);
            let g = f.gcd(&h.sub(&x));
            if !g.is_one() {
                f = f.div_exact(&g);
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        out
    }

    /// Deterministic split candidates: polynomials whose coefficient
    /// vector spells the base-q digits of m, starting at x.
    fn candidate(&self, m: u128) -> Polynomial {
        let k = &self.ctx;
        let q = k.q();
        let mut c = Vec::new();
        let mut x = m;
        while x > 0 {
            c.push(Fe(x % q));
            x /= q;
        }
        Polynomial::new(k.clone(), c)
    }

    /// Equal-degree splitting of a squarefree monic product of irreducibles
    /// of degree d.
    fn edf(&self, d: usize, out: &mut Vec<Polynomial>) {
        let deg = self.degree();
        if deg == d {
            out.push(self.clone());
            return;
        }
        let k = &self.ctx;
        let q = k.q_big();
        let qd = q.pow(d as u32);
        let one = Polynomial::one(k);
        let mut m = k.q();
        loop {
            let a = self.candidate(m);
            m += 1;
            if a.degree() >= deg {
                continue;
            }
            let t = if k.p() == 2 {
                // absolute trace map from GF(q^d) to GF(2)
                let steps = k.n() * d;
                let mut acc = a.rem(self);
                let mut cur = acc.clone();
                for _ in 1..steps {
                    cur = cur.mulmod(&cur, self);
                    acc = acc.add(&cur);
                }
                acc
            } else {
                let e = (&qd - 1u32) / 2u32;
                a.powmod(&e, self).sub(&one)
            };
            let g = self.gcd(&t);
            if g.degree() > 0 && g.degree() < deg {
                let h = self.div_exact(&g);
                g.edf(d, out);
                h.edf(d, out);
                return;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicity.
    pub fn factor(&self) -> Result<Factorization> {
        if self.deg() < 1 {
            return Err(Error::ConstantInput);
        }
        let unit = self.lc();
        let f = self.monic();
        let mut factors: Vec<(Polynomial, u32)> = Vec::new();
        for (sq, mult) in f.squarefree() {
            for (g, d) in sq.ddf() {
                let mut parts = Vec::new();
                g.edf(d, &mut parts);
                for h in parts {
                    factors.push((h, mult));
                }
            }
        }
        factors.sort();
        // merge equal factors that arose from different multiplicity layers
        let mut merged: Vec<(Polynomial, u32)> = Vec::new();
        for (g, m) in factors {
            match merged.last_mut() {
                Some((h, mm)) if *h == g => *mm += m,
                _ => merged.push((g, m)),
            }
        }
        Ok(Factorization { unit, factors: merged })
    }

    /// Degree multiset of the irreducible factors of a separable polynomial.
    pub fn factor_shape(&self) -> Result<FactorShape> {
        if self.deg() < 1 {
            return Err(Error::ConstantInput);
        }
        if !self.is_separable() {
            return Err(Error::NotSeparable);
        }
        let mut degs = Vec::new();
        for (g, d) in self.monic().ddf() {
            for _ in 0..g.degree() / d {
                degs.push(d as u32);
            }
        }
        Ok(FactorShape::from_degrees(&degs))
    }

    pub fn is_irreducible(&self) -> Result<bool> {
        if self.deg() < 1 {
            return Err(Error::ConstantInput);
        }
        if self.degree() == 1 {
            return Ok(true);
        }
        if !self.is_separable() {
            return Ok(false);
        }
        let f = self.monic();
        // Rabin: x^(q^n) = x and gcd(x^(q^(n/r)) - x, f) = 1
        let n = f.degree();
        let x = Polynomial::x(&self.ctx).rem(&f);
        if f.x_frob(n) != x {
            return Ok(false);
        }
        for r in crate::arith::prime_factors_u64(n as u64) {
            let h = f.x_frob(n / r as usize).sub(&x);
            if !f.gcd(&h).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All distinct roots in the coefficient field, ascending.
    pub fn roots(&self) -> Vec<Fe> {
        if self.deg() < 1 {
            return Vec::new();
        }
        let f = self.monic();
        let x = Polynomial::x(&self.ctx);
        let h = f.x_frob(1).sub(&x.rem(&f));
        let g = f.gcd(&h);
        if g.degree() == 0 {
            return Vec::new();
        }
        let mut parts = Vec::new();
        g.edf(1, &mut parts);
        let k = &self.ctx;
        let mut r: Vec<Fe> = parts.iter().map(|l| k.neg(l.coeff(0))).collect();
        r.sort();
        r
    }

    /// Distinct roots of a binary form sum c_i X^i Z^(d-i) of formal degree
    /// `d` on P^1, as normalized pairs (x:1) or (1:0).
    pub fn projective_roots(&self, d: usize) -> Vec<[Fe; 2]> {
        let k = &self.ctx;
        let mut out: Vec<[Fe; 2]> = self.roots().into_iter().map(|r| [r, k.one()]).collect();
        if self.degree() < d {
            out.push([k.one(), Fe::ZERO]);
        }
        out
    }
}

/// All m-th roots of a in a field, ascending; fallback when no tables exist.
pub(crate) fn nth_roots_generic(k: &Arc<FieldCtx>, a: Fe, m: u64) -> Vec<Fe> {
    let mut c = vec![Fe::ZERO; m as usize + 1];
    c[0] = k.neg(a);
    c[m as usize] = k.one();
    Polynomial::new(k.clone(), c).roots()
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let k = &self.ctx;
        let mut first = true;
        for i in (0..self.c.len()).rev() {
            let a = self.c[i];
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = k.fmt_elem(a);
            match (i, a == k.one()) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{coef}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{coef}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<u64>> = self.c.iter().map(|&a| self.ctx.coeffs(a)).collect();
        v.serialize(s)
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses a coefficient: an integer, or a bracketed coordinate vector.
pub fn parse_coeff(k: &Arc<FieldCtx>, s: &str) -> Result<Fe> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        let coords: std::result::Result<Vec<i64>, _> =
            inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
        let coords = coords.map_err(|_| Error::Parse(s.into()))?;
        let v: Vec<u64> = coords
            .iter()
            .map(|&c| c.rem_euclid(k.p() as i64) as u64)
            .collect();
        return k.from_coeffs(&v);
    }
    let v: i64 = s.parse().map_err(|_| Error::Parse(s.into()))?;
    Ok(k.from_int(v))
}

/// Parses "x^6 + 3*x^3 + 2", "[1,2]*x^2 - x", "2x + 1".
pub fn parse_polynomial(k: &Arc<FieldCtx>, s: &str) -> Result<Polynomial> {
    let err = || Error::Parse(s.to_string());
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0;
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch)
            }
            ']' => {
                depth -= 1;
                cur.push(ch)
            }
            '+' | '-' if depth == 0 && !(i > 0 && chars[i - 1] == '^') => {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                } else if i != 0 {
                    return Err(err());
                }
                neg = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if cur.is_empty() {
        return Err(err());
    }
    terms.push((neg, cur));
    let mut acc = Polynomial::zero(k);
    for (neg, t) in terms {
        let (coef, exp) = match t.find('x') {
            None => (parse_coeff(k, &t)?, 0usize),
            Some(pos) => {
                let head = t[..pos].trim_end_matches('*');
                let tail = &t[pos + 1..];
                let coef = if head.is_empty() { k.one() } else { parse_coeff(k, head)? };
                let exp = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^')
                        .ok_or_else(err)?
                        .parse::<usize>()
                        .map_err(|_| err())?
                };
                (coef, exp)
            }
        };
        let coef = if neg { k.neg(coef) } else { coef };
        acc = acc.add(&Polynomial::monomial(k, coef, exp));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(k: &Arc<FieldCtx>, c: &[i64]) -> Polynomial {
        Polynomial::from_ints(k, c)
    }

    #[test]
    fn shapes() {
        let k2 = FieldCtx::new(2, 1).unwrap();
        let f = poly(&k2, &[1, 0, 0, 0, 0, 1]);
        assert_eq!(f.factor_shape().unwrap().to_string(), "(1)(4)");
        let k7 = FieldCtx::new(7, 1).unwrap();
        let g = poly(&k7, &[-1, 0, 0, 0, 0, 0, 1]);
        assert_eq!(g.factor_shape().unwrap().to_string(), "(1)^6");
        assert_eq!(poly(&k7, &[3, 1]).factor_shape().unwrap().to_string(), "(1)");
        assert_eq!(poly(&k7, &[1, 2, 1]).factor_shape(), Err(Error::NotSeparable));
        assert_eq!(poly(&k7, &[3]).factor_shape(), Err(Error::ConstantInput));
    }

    #[test]
    fn factor_examples() {
        let k2 = FieldCtx::new(2, 1).unwrap();
        let f = poly(&k2, &[1, 1, 0, 0, 0, 1]).factor().unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.factors[0].0, poly(&k2, &[1, 1, 1]));
        assert_eq!(f.factors[1].0, poly(&k2, &[1, 0, 1, 1]));
        let k3 = FieldCtx::new(3, 1).unwrap();
        assert!(poly(&k3, &[1, 1, 1, 1, 1]).is_irreducible().unwrap());
        let k7 = FieldCtx::new(7, 1).unwrap();
        assert!(poly(&k7, &[1, 1, 1, 1, 1]).is_irreducible().unwrap());
        assert!(!poly(&k7, &[-1, 0, 1]).is_irreducible().unwrap());
        assert!(poly(&k2, &[1, 1, 1]).is_irreducible().unwrap());
    }

    #[test]
    fn roots_examples() {
        let k2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(poly(&k2, &[1, 0, 0, 0, 0, 1]).roots(), vec![Fe(1)]);
        let k7 = FieldCtx::new(7, 1).unwrap();
        assert!(poly(&k7, &[1, 0, 1]).roots().is_empty());
        assert_eq!(poly(&k7, &[0, 1]).roots(), vec![Fe(0)]);
    }

    #[test]
    fn inseparable_factorization() {
        let k3 = FieldCtx::new(3, 2).unwrap();
        // (x^3 - a)^2 (x+1) with a a generator
        let a = k3.generator();
        let base = Polynomial::new(k3.clone(), vec![k3.neg(a), Fe(0), Fe(0), k3.one()]);
        let f = base.mul(&base).mul(&poly(&k3, &[1, 1]));
        let fac = f.factor().unwrap();
        let mut prod = Polynomial::constant(&k3, fac.unit);
        for (g, m) in &fac.factors {
            assert!(g.is_irreducible().unwrap());
            prod = prod.mul(&g.pow(*m));
        }
        assert_eq!(prod, f);
    }

    #[test]
    fn parse_roundtrip() {
        let k = FieldCtx::new(7, 1).unwrap();
        let f = parse_polynomial(&k, "x^5 - 1").unwrap();
        assert_eq!(f, poly(&k, &[-1, 0, 0, 0, 0, 1]));
        let g = parse_polynomial(&k, "x^6 + 3*x^3 + 2x").unwrap();
        assert_eq!(g, poly(&k, &[0, 2, 0, 3, 0, 0, 1]));
        let k9 = FieldCtx::new(3, 2).unwrap();
        let h = parse_polynomial(&k9, "[1,2]*x^2 + x").unwrap();
        assert_eq!(h.coeff(2), k9.from_coeffs(&[1, 2]).unwrap());
        assert!(parse_polynomial(&k, "x^^2").is_err());
    }

    #[test]
    fn shape_parse() {
        let s = FactorShape::parse("(1)^2(4)").unwrap();
        assert_eq!(s, FactorShape(vec![(1, 2), (4, 1)]));
        assert_eq!(s.to_string(), "(1)^2(4)");
    }
}
