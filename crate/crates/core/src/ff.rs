//! Finite fields GF(p^n) in a polynomial basis.
//!
//! Elements are stored as their index in the fixed enumeration order:
//! coefficient vectors (c_0, ..., c_{n-1}) compared lexicographically with
//! c_0 most significant, so `index = sum c_i p^(n-1-i)`. Comparing two
//! [`Fe`] values therefore compares enumeration positions directly.
//!
//! Fields with at most 2^20 elements carry log/antilog/Zech tables; larger
//! ones fall back to schoolbook multiplication with reduction.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Default upper bound on p^n for user-facing construction.
pub const DEFAULT_FIELD_BOUND: u128 = 1 << 24;
const TABLE_LIMIT: u128 = 1 << 20;
const MAXN: usize = 128;
const NONE: u32 = u32::MAX;

/// A raw field element: its index in the enumeration order of its field.
/// Meaningless without the owning [`FieldCtx`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fe(pub u128);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    log: Vec<u32>,
    exp: Vec<u32>,
    zech: Vec<u32>,
}

/// An explicit finite field GF(p^n).
pub struct FieldCtx {
    p: u64,
    n: usize,
    q: u128,
    modulus: Vec<u64>,
    frob: Vec<Vec<u64>>,
    tables: Option<Tables>,
    one: Fe,
    nonsquare: OnceLock<Option<Fe>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.n)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}
impl Eq for FieldCtx {}

type CtxCell = Arc<OnceLock<Arc<FieldCtx>>>;

fn ctx_cache() -> &'static Mutex<HashMap<(u64, usize), CtxCell>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), CtxCell>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

// ---------------------------------------------------------------------------
// Dense polynomials over GF(p), used only for field construction.

fn pp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pp_mulmod(a: &[u64], b: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + arith::mul_mod_u64(x, y, p)) % p;
        }
    }
    pp_rem(prod, g, p)
}

/// Remainder modulo a monic polynomial.
fn pp_rem(mut a: Vec<u64>, g: &[u64], p: u64) -> Vec<u64> {
    let dg = g.len() - 1;
    pp_trim(&mut a);
    while a.len() > dg {
        let top = a.len() - 1;
        let c = a[top];
        if c != 0 {
            for j in 0..=dg {
                let idx = top - dg + j;
                a[idx] = (a[idx] + p - arith::mul_mod_u64(c, g[j], p)) % p;
            }
        }
        a.pop();
        pp_trim(&mut a);
    }
    a
}

fn pp_inv_mod(a: u64, p: u64) -> u64 {
    arith::pow_mod_u64(a, p - 2, p)
}

fn pp_make_monic(a: &mut [u64], p: u64) {
    if let Some(&lc) = a.last() {
        let inv = pp_inv_mod(lc, p);
        for c in a.iter_mut() {
            *c = arith::mul_mod_u64(*c, inv, p);
        }
    }
}

fn pp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    pp_trim(&mut r);
    let db = b.len() - 1;
    let inv = pp_inv_mod(b[db], p);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![0u64; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let c = arith::mul_mod_u64(r[top], inv, p);
        quo[top - db] = c;
        for j in 0..=db {
            let idx = top - db + j;
            r[idx] = (r[idx] + p - arith::mul_mod_u64(c, b[j], p)) % p;
        }
        pp_trim(&mut r);
        if r.len() <= top {
            continue;
        }
    }
    pp_trim(&mut quo);
    (quo, r)
}

fn pp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    pp_trim(&mut x);
    pp_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = pp_divrem(&x, &y, p);
        x = y;
        y = r;
    }
    pp_make_monic(&mut x, p);
    x
}

fn pp_powmod(base: &[u64], mut e: u128, g: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = pp_rem(base.to_vec(), g, p);
    while e > 0 {
        if e & 1 == 1 {
            result = pp_mulmod(&result, &b, g, p);
        }
        e >>= 1;
        if e > 0 {
            b = pp_mulmod(&b, &b, g, p);
        }
    }
    result
}

/// Rabin's irreducibility test for a monic polynomial over GF(p).
fn pp_is_irreducible(g: &[u64], p: u64) -> bool {
    let n = g.len() - 1;
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // xp[i] = x^(p^i) mod g
    let mut xp = vec![pp_rem(x.clone(), g, p)];
    for i in 1..=n {
        let next = pp_powmod(&xp[i - 1], p as u128, g, p);
        xp.push(next);
    }
    let mut xn = xp[n].clone();
    pp_trim(&mut xn);
    if xn != x {
        return false;
    }
    for r in arith::prime_factors_u64(n as u64) {
        let d = n / r as usize;
        let mut h = xp[d].clone();
        h.resize(h.len().max(2), 0);
        h[1] = (h[1] + p - 1) % p;
        pp_trim(&mut h);
        if pp_gcd(g, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree n over
/// GF(p), comparing (c_0, ..., c_{n-1}) with c_0 most significant.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let mut coeffs = vec![0u64; n + 1];
    coeffs[n] = 1;
    coeffs[0] = 1;
    loop {
        if pp_is_irreducible(&coeffs, p) {
            return coeffs;
        }
        // increment with c_{n-1} least significant
        let mut i = n - 1;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            if i == 0 {
                unreachable!("an irreducible polynomial always exists");
            }
            i -= 1;
        }
        if coeffs[0] == 0 {
            coeffs[0] = 1;
        }
    }
}

// ---------------------------------------------------------------------------

impl FieldCtx {
    /// Construct GF(p^n) under the default size bound.
    pub fn new(p: u64, n: usize) -> Result<Arc<FieldCtx>> {
        Self::with_bound(p, n, DEFAULT_FIELD_BOUND)
    }

    /// Construct GF(p^n) provided p^n does not exceed `bound`.
    pub fn with_bound(p: u64, n: usize, bound: u128) -> Result<Arc<FieldCtx>> {
        if !arith::is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::DegreeMismatch("extension degree must be at least 1".into()));
        }
        match checked_pow(p, n) {
            Some(q) if q <= bound => Self::unbounded(p, n),
            _ => Err(Error::SizeExceeded(format!("{p}^{n}"))),
        }
    }

    /// Construct GF(p^n) for internal splitting fields: only the
    /// representation limit p^n < 2^127 applies.
    pub fn unbounded(p: u64, n: usize) -> Result<Arc<FieldCtx>> {
        if !arith::is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 32 {
            return Err(Error::SizeExceeded(format!("characteristic {p} too large")));
        }
        if n == 0 || n >= MAXN {
            return Err(Error::SizeExceeded(format!("{p}^{n}")));
        }
        match checked_pow(p, n) {
            Some(q) if q < (1u128 << 127) => {}
            _ => return Err(Error::SizeExceeded(format!("{p}^{n}"))),
        }
        let cell = {
            let mut cache = ctx_cache().lock().unwrap();
            cache.entry((p, n)).or_default().clone()
        };
        Ok(cell.get_or_init(|| Arc::new(Self::build(p, n))).clone())
    }

    fn build(p: u64, n: usize) -> FieldCtx {
        let q = checked_pow(p, n).unwrap();
        let modulus = smallest_irreducible(p, n);
        let one = Fe(if n == 1 { 1 } else { q / p as u128 });
        let mut ctx = FieldCtx {
            p,
            n,
            q,
            modulus,
            frob: Vec::new(),
            tables: None,
            one,
            nonsquare: OnceLock::new(),
        };
        if n > 1 {
            let g = ctx.modulus.clone();
            let xp = pp_powmod(&[0, 1], p as u128, &g, p);
            let mut frob = Vec::with_capacity(n);
            let mut cur = vec![1u64];
            for _ in 0..n {
                let mut row = cur.clone();
                row.resize(n, 0);
                frob.push(row);
                cur = pp_mulmod(&cur, &xp, &g, p);
            }
            ctx.frob = frob;
        }
        if q <= TABLE_LIMIT && q > 2 {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let order = self.q - 1;
        let primes = arith::prime_factors_u64(order as u64);
        let gen = (1..self.q)
            .map(Fe)
            .find(|&g| primes.iter().all(|&r| self.pow_slow(g, order / r as u128) != self.one))
            .expect("primitive element exists");
        let mut exp = vec![0u32; q - 1];
        let mut log = vec![NONE; q];
        let mut cur = self.one;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = cur.0 as u32;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, gen);
        }
        let mut zech = Vec::new();
        if self.p != 2 {
            zech = vec![NONE; q - 1];
            for (d, z) in zech.iter_mut().enumerate() {
                let s = self.add_slow(self.one, Fe(exp[d] as u128));
                *z = log[s.0 as usize];
            }
        }
        Tables { log, exp, zech }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u128 {
        self.q
    }
    pub fn q_big(&self) -> BigUint {
        BigUint::from(self.q)
    }
    /// Monic modulus, low-degree coefficient first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn q_is_square(&self) -> bool {
        self.n.is_multiple_of(2)
    }
    /// p^(n/2) when n is even.
    pub fn sqrt_q(&self) -> Option<u128> {
        self.q_is_square().then(|| checked_pow(self.p, self.n / 2).unwrap())
    }
    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }
    pub fn one(&self) -> Fe {
        self.one
    }

    /// The class of x in GF(p)[x]/(modulus); zero for prime fields.
    pub fn generator(&self) -> Fe {
        if self.n == 1 {
            Fe::ZERO
        } else {
            Fe(self.q / (self.p as u128 * self.p as u128))
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> Fe {
        let c = v.rem_euclid(self.p as i64) as u128;
        Fe(c * (self.one.0))
    }

    /// The value in [0, p) when `a` lies in the prime field.
    pub fn prime_value(&self, a: Fe) -> Option<u64> {
        let unit = self.one.0;
        a.0.is_multiple_of(unit).then(|| (a.0 / unit) as u64)
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Result<Fe> {
        if c.len() > self.n {
            return Err(Error::DegreeMismatch(format!(
                "{} coordinates for a degree-{} field",
                c.len(),
                self.n
            )));
        }
        let mut buf = [0u64; MAXN];
        for (i, &x) in c.iter().enumerate() {
            buf[i] = x % self.p;
        }
        Ok(self.encode(&buf[..self.n]))
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u64> {
        let mut buf = [0u64; MAXN];
        self.decode(a, &mut buf);
        buf[..self.n].to_vec()
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    #[inline]
    fn decode(&self, a: Fe, c: &mut [u64]) {
        let p = self.p;
        if self.q <= u64::MAX as u128 {
            let mut x = a.0 as u64;
            for i in (0..self.n).rev() {
                c[i] = x % p;
                x /= p;
            }
        } else {
            let mut x = a.0;
            for i in (0..self.n).rev() {
                c[i] = (x % p as u128) as u64;
                x /= p as u128;
            }
        }
    }

    #[inline]
    fn encode(&self, c: &[u64]) -> Fe {
        let p = self.p as u128;
        let mut x: u128 = 0;
        for &ci in &c[..self.n] {
            x = x * p + ci as u128;
        }
        Fe(x)
    }

    fn add_slow(&self, a: Fe, b: Fe) -> Fe {
        let mut ca = [0u64; MAXN];
        let mut cb = [0u64; MAXN];
        self.decode(a, &mut ca);
        self.decode(b, &mut cb);
        for i in 0..self.n {
            ca[i] = (ca[i] + cb[i]) % self.p;
        }
        self.encode(&ca)
    }

    fn neg_slow(&self, a: Fe) -> Fe {
        let mut ca = [0u64; MAXN];
        self.decode(a, &mut ca);
        for c in ca.iter_mut().take(self.n) {
            *c = (self.p - *c) % self.p;
        }
        self.encode(&ca)
    }

    fn sub_slow(&self, a: Fe, b: Fe) -> Fe {
        let mut ca = [0u64; MAXN];
        let mut cb = [0u64; MAXN];
        self.decode(a, &mut ca);
        self.decode(b, &mut cb);
        for i in 0..self.n {
            ca[i] = (ca[i] + self.p - cb[i]) % self.p;
        }
        self.encode(&ca)
    }

    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        let n = self.n;
        let p = self.p;
        if n == 1 {
            return Fe(arith::mul_mod_u64(a.0 as u64, b.0 as u64, p) as u128);
        }
        let mut ca = [0u64; MAXN];
        let mut cb = [0u64; MAXN];
        self.decode(a, &mut ca);
        self.decode(b, &mut cb);
        let mut prod = [0u128; 2 * MAXN];
        for i in 0..n {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] += (ca[i] * cb[j]) as u128;
            }
        }
        let p128 = p as u128;
        for i in (n..2 * n - 1).rev() {
            let t = (prod[i] % p128) as u64;
            if t != 0 {
                let neg = p - t;
                for j in 0..n {
                    prod[i - n + j] += (neg * self.modulus[j]) as u128;
                }
            }
        }
        let mut out = [0u64; MAXN];
        for i in 0..n {
            out[i] = (prod[i] % p128) as u64;
        }
        self.encode(&out)
    }

    fn pow_slow(&self, a: Fe, mut e: u128) -> Fe {
        let mut r = self.one;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_slow(r, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul_slow(b, b);
            }
        }
        r
    }

    fn inv_slow(&self, a: Fe) -> Fe {
        if self.n == 1 {
            return Fe(pp_inv_mod(a.0 as u64, self.p) as u128);
        }
        // extended Euclid on (a, modulus) over GF(p)
        let p = self.p;
        let mut r0 = self.modulus.clone();
        let mut r1 = self.coeffs(a);
        pp_trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (quo, rem) = pp_divrem(&r0, &r1, p);
            // s2 = s0 - quo*s1
            let mut prod = vec![0u64; (quo.len() + s1.len()).max(1)];
            for (i, &x) in quo.iter().enumerate() {
                for (j, &y) in s1.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + arith::mul_mod_u64(x, y, p)) % p;
                }
            }
            let len = prod.len().max(s0.len());
            let mut s2 = vec![0u64; len];
            for (i, item) in s2.iter_mut().enumerate() {
                let x = s0.get(i).copied().unwrap_or(0);
                let y = prod.get(i).copied().unwrap_or(0);
                *item = (x + p - y) % p;
            }
            pp_trim(&mut s2);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant
        let c = pp_inv_mod(r0[0], p);
        let mut out = [0u64; MAXN];
        for (i, &x) in s0.iter().enumerate() {
            out[i] = arith::mul_mod_u64(x, c, p);
        }
        self.encode(&out)
    }

    // -- public arithmetic on raw elements --------------------------------

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.n == 1 {
            let s = a.0 + b.0;
            let p = self.p as u128;
            return Fe(if s >= p { s - p } else { s });
        }
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        match &self.tables {
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let m = (self.q - 1) as u64;
                let la = t.log[a.0 as usize] as u64;
                let lb = t.log[b.0 as usize] as u64;
                let d = (lb + m - la) % m;
                let z = t.zech[d as usize];
                if z == NONE {
                    Fe::ZERO
                } else {
                    Fe(t.exp[((la + z as u64) % m) as usize] as u128)
                }
            }
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 || self.p == 2 {
            return a;
        }
        if self.n == 1 {
            return Fe(self.p as u128 - a.0);
        }
        match &self.tables {
            Some(t) => {
                let m = (self.q - 1) as u64;
                let la = t.log[a.0 as usize] as u64;
                Fe(t.exp[((la + m / 2) % m) as usize] as u128)
            }
            None => self.neg_slow(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        if self.n == 1 {
            let p = self.p as u128;
            return Fe(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 });
        }
        if self.tables.is_some() || self.p == 2 {
            self.add(a, self.neg(b))
        } else {
            self.sub_slow(a, b)
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        if self.n == 1 && self.tables.is_none() {
            return Fe(arith::mul_mod_u64(a.0 as u64, b.0 as u64, self.p) as u128);
        }
        match &self.tables {
            Some(t) => {
                let m = (self.q - 1) as u64;
                let s = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
                Fe(t.exp[(if s >= m { s - m } else { s }) as usize] as u128)
            }
            None => self.mul_slow(a, b),
        }
    }

    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    /// Multiply by an integer scalar.
    pub fn scale(&self, a: Fe, k: i64) -> Fe {
        self.mul(a, self.from_int(k))
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        Some(match &self.tables {
            Some(t) => {
                let m = (self.q - 1) as u64;
                let la = t.log[a.0 as usize] as u64;
                Fe(t.exp[((m - la) % m) as usize] as u128)
            }
            None => self.inv_slow(a),
        })
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        let bi = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, e: u128) -> Fe {
        if e == 0 {
            return self.one;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let m = self.q - 1;
                let la = t.log[a.0 as usize] as u128;
                let k = (la * (e % m)) % m;
                Fe(t.exp[k as usize] as u128)
            }
            None => {
                // reduce the exponent modulo q-1 for nonzero a
                let m = self.q - 1;
                let e = e % m;
                if e == 0 {
                    self.one
                } else {
                    self.pow_slow(a, e)
                }
            }
        }
    }

    pub fn pow_big(&self, a: Fe, e: &BigUint) -> Fe {
        if e.bits() == 0 {
            return self.one;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let m = BigUint::from(self.q - 1);
        let r = (e % &m).to_u128().unwrap();
        if r == 0 {
            self.one
        } else {
            self.pow(a, r)
        }
    }

    /// Signed integer power (negative exponents invert).
    pub fn pow_i(&self, a: Fe, e: i64) -> Result<Fe> {
        if e >= 0 {
            Ok(self.pow(a, e as u128))
        } else {
            let ai = self.inv(a).ok_or(Error::DivisionByZero)?;
            Ok(self.pow(ai, e.unsigned_abs() as u128))
        }
    }

    /// The p-th power map.
    pub fn frob(&self, a: Fe) -> Fe {
        if self.n == 1 || a.0 == 0 {
            return a;
        }
        if let Some(t) = &self.tables {
            let m = (self.q - 1) as u64;
            let la = t.log[a.0 as usize] as u64;
            return Fe(t.exp[(arith::mul_mod_u64(la, self.p, m)) as usize] as u128);
        }
        let mut ca = [0u64; MAXN];
        self.decode(a, &mut ca);
        let mut acc = [0u64; MAXN];
        for i in 0..self.n {
            let c = ca[i];
            if c == 0 {
                continue;
            }
            for (j, &f) in self.frob[i].iter().enumerate() {
                acc[j] = (acc[j] + c * f) % self.p;
            }
        }
        self.encode(&acc)
    }

    /// a^(p^m).
    pub fn frob_pow(&self, a: Fe, m: usize) -> Fe {
        let m = m % self.n;
        if m == 0 || a.0 == 0 {
            return a;
        }
        if let Some(t) = &self.tables {
            let order = self.q - 1;
            let e = (checked_pow(self.p, m).unwrap()) % order;
            let la = t.log[a.0 as usize] as u128;
            return Fe(t.exp[((la * e) % order) as usize] as u128);
        }
        let mut x = a;
        for _ in 0..m {
            x = self.frob(x);
        }
        x
    }

    /// True when `a` lies in the subfield GF(p^m).
    pub fn in_subfield(&self, a: Fe, m: usize) -> bool {
        self.frob_pow(a, m) == a
    }

    /// Degree of the smallest subfield containing `a`.
    pub fn element_degree(&self, a: Fe) -> usize {
        (1..=self.n)
            .filter(|d| self.n.is_multiple_of(*d))
            .find(|&d| self.in_subfield(a, d))
            .unwrap()
    }

    /// Discrete logarithm to the fixed primitive element (table fields only).
    pub fn log(&self, a: Fe) -> Option<u32> {
        let t = self.tables.as_ref()?;
        match t.log[a.0 as usize] {
            NONE => None,
            l => Some(l),
        }
    }

    pub fn is_square(&self, a: Fe) -> bool {
        if a.0 == 0 || self.p == 2 {
            return true;
        }
        match &self.tables {
            Some(t) => t.log[a.0 as usize] % 2 == 0,
            None => self.pow(a, (self.q - 1) / 2) == self.one,
        }
    }

    /// First nonsquare in enumeration order (odd characteristic).
    pub fn first_nonsquare(&self) -> Option<Fe> {
        *self
            .nonsquare
            .get_or_init(|| (1..self.q).map(Fe).find(|&x| !self.is_square(x)))
    }

    /// Square root; returns the smaller of the two roots in enumeration order.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return Some(a);
        }
        if self.p == 2 {
            return Some(self.pow(a, self.q / 2));
        }
        let r = match &self.tables {
            Some(t) => {
                let la = t.log[a.0 as usize];
                if la % 2 != 0 {
                    return None;
                }
                Fe(t.exp[(la / 2) as usize] as u128)
            }
            None => self.tonelli_shanks(a)?,
        };
        let nr = self.neg(r);
        Some(r.min(nr))
    }

    fn tonelli_shanks(&self, a: Fe) -> Option<Fe> {
        if !self.is_square(a) {
            return None;
        }
        let qm1 = self.q - 1;
        let s = qm1.trailing_zeros();
        let t = qm1 >> s;
        let z = self.first_nonsquare()?;
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut x = self.pow(a, t.div_ceil(2));
        let mut b = self.pow(a, t);
        while b != self.one {
            let mut i = 0;
            let mut bb = b;
            while bb != self.one {
                bb = self.mul(bb, bb);
                i += 1;
            }
            let mut w = c;
            for _ in 0..(m - i - 1) {
                w = self.mul(w, w);
            }
            x = self.mul(x, w);
            c = self.mul(w, w);
            b = self.mul(b, c);
            m = i;
        }
        Some(x)
    }

    /// +1 iff `a` is an m-th power in this field.
    pub fn residue_symbol(&self, a: Fe, m: u64) -> Result<i8> {
        if a.0 == 0 {
            return Err(Error::ZeroInput);
        }
        let g = num_integer::gcd(m as u128, self.q - 1);
        let is_power = match &self.tables {
            Some(t) => (t.log[a.0 as usize] as u128).is_multiple_of(g),
            None => self.pow(a, (self.q - 1) / g) == self.one,
        };
        Ok(if is_power { 1 } else { -1 })
    }

    /// Smallest (in enumeration order) b with b^m = a, if any.
    pub fn nth_root(&self, a: Fe, m: u64) -> Option<Fe> {
        if m == 0 {
            return (a == self.one).then_some(self.one);
        }
        if a.0 == 0 {
            return Some(a);
        }
        if let Some(t) = &self.tables {
            let order = (self.q - 1) as u64;
            let la = t.log[a.0 as usize] as u64;
            let g = arith::gcd_u64(m % order, order);
            let g = if g == 0 { order } else { g };
            if !la.is_multiple_of(g) {
                return None;
            }
            let q1 = order / g;
            let m1 = (m / g) % q1.max(1);
            let l1 = la / g;
            let j0 = if q1 == 1 {
                0
            } else {
                arith::mul_mod_u64(l1 % q1, mod_inverse(m1, q1), q1)
            };
            return (0..g)
                .map(|k| Fe(t.exp[(j0 + k * q1) as usize] as u128))
                .min();
        }
        let k = FieldCtx::unbounded(self.p, self.n).expect("cached context");
        crate::poly::nth_roots_generic(&k, a, m).into_iter().min()
    }

    /// Trace to GF(p^m).
    pub fn trace(&self, a: Fe, m: usize) -> Result<Fe> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::DegreeMismatch(format!("{m} does not divide {}", self.n)));
        }
        let mut acc = Fe::ZERO;
        let mut x = a;
        for _ in 0..self.n / m {
            acc = self.add(acc, x);
            x = self.frob_pow(x, m);
        }
        Ok(acc)
    }

    /// Norm to GF(p^m).
    pub fn norm(&self, a: Fe, m: usize) -> Result<Fe> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::DegreeMismatch(format!("{m} does not divide {}", self.n)));
        }
        let mut acc = self.one;
        let mut x = a;
        for _ in 0..self.n / m {
            acc = self.mul(acc, x);
            x = self.frob_pow(x, m);
        }
        Ok(acc)
    }

    /// Absolute trace as an integer in [0, p).
    pub fn abs_trace(&self, a: Fe) -> u64 {
        let t = self.trace(a, 1).unwrap();
        self.prime_value(t).expect("trace lies in the prime field")
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> u128 {
        let mut ord = self.q - 1;
        for (r, _) in arith::factor_u128(ord) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == self.one {
                ord /= r;
            }
        }
        ord
    }

    pub fn element(self: &Arc<Self>, v: Fe) -> FieldElement {
        FieldElement { ctx: self.clone(), v }
    }

    /// GF(p^(n*m)) together with the canonical embedding of this field.
    pub fn extension(self: &Arc<Self>, m: usize) -> Result<(Arc<FieldCtx>, Arc<Embedding>)> {
        let big = FieldCtx::unbounded(self.p, self.n * m)?;
        let emb = Embedding::get(self, &big)?;
        Ok((big, emb))
    }

    pub fn describe(&self) -> CtxDescription {
        CtxDescription { p: self.p, n: self.n, modulus: self.modulus.clone() }
    }

    /// Human-readable rendering of an element, e.g. `3`, `[1,2]`.
    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.n == 1 {
            a.0.to_string()
        } else {
            let c = self.coeffs(a);
            format!(
                "[{}]",
                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            )
        }
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid on i128
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    t0.rem_euclid(m as i128) as u64
}

pub(crate) fn checked_pow(p: u64, n: usize) -> Option<u128> {
    let mut q: u128 = 1;
    for _ in 0..n {
        q = q.checked_mul(p as u128)?;
    }
    Some(q)
}

/// JSON form of a field context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtxDescription {
    pub p: u64,
    pub n: usize,
    pub modulus: Vec<u64>,
}

// ---------------------------------------------------------------------------

/// Embedding of a subfield into an extension, sending the generator of the
/// source to the smallest root of its modulus in the target.
pub struct Embedding {
    src: Arc<FieldCtx>,
    dst: Arc<FieldCtx>,
    basis: Vec<Fe>,
    solver: OnceLock<Solver>,
}

struct Solver {
    rows: Vec<usize>,
    inv: Vec<Vec<u64>>,
}

type EmbKey = (u64, usize, usize);

fn emb_cache() -> &'static Mutex<HashMap<EmbKey, Arc<OnceLock<Arc<Embedding>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<EmbKey, Arc<OnceLock<Arc<Embedding>>>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Embedding {
    /// Cached canonical embedding src -> dst.
    pub fn get(src: &Arc<FieldCtx>, dst: &Arc<FieldCtx>) -> Result<Arc<Embedding>> {
        if src.p != dst.p || !dst.n.is_multiple_of(src.n) {
            return Err(Error::DegreeMismatch(format!(
                "no embedding of {:?} into {:?}",
                src, dst
            )));
        }
        let cell = {
            let mut cache = emb_cache().lock().unwrap();
            cache.entry((src.p, src.n, dst.n)).or_default().clone()
        };
        Ok(cell.get_or_init(|| Arc::new(Self::build(src, dst))).clone())
    }

    /// The embedding mid -> dst that agrees with the given embeddings of a
    /// common subfield k (k -> mid and k -> dst).
    pub fn compatible(to_mid: &Embedding, to_dst: &Embedding) -> Result<Arc<Embedding>> {
        let (mid, dst) = (&to_mid.dst, &to_dst.dst);
        if !Arc::ptr_eq(&to_mid.src, &to_dst.src) && *to_mid.src != *to_dst.src {
            return Err(Error::ContextMismatch);
        }
        let canonical = Self::get(mid, dst)?;
        let k = &to_mid.src;
        let gens: Vec<Fe> = if k.n == 1 { vec![] } else { vec![k.generator()] };
        let agrees = |e: &Embedding| gens.iter().all(|&g| e.map(to_mid.map(g)) == to_dst.map(g));
        if agrees(&canonical) {
            return Ok(canonical);
        }
        let coeffs: Vec<Fe> = mid.modulus.iter().map(|&c| dst.from_int(c as i64)).collect();
        let f = crate::poly::Polynomial::new(dst.clone(), coeffs);
        for rho in f.roots() {
            let e = Self::with_root(mid, dst, rho);
            if agrees(&e) {
                return Ok(Arc::new(e));
            }
        }
        Err(Error::DegreeMismatch("no compatible embedding".into()))
    }

    fn with_root(src: &Arc<FieldCtx>, dst: &Arc<FieldCtx>, rho: Fe) -> Embedding {
        let mut basis = Vec::with_capacity(src.n);
        let mut cur = dst.one();
        for _ in 0..src.n {
            basis.push(cur);
            cur = dst.mul(cur, rho);
        }
        Embedding { src: src.clone(), dst: dst.clone(), basis, solver: OnceLock::new() }
    }

    fn build(src: &Arc<FieldCtx>, dst: &Arc<FieldCtx>) -> Embedding {
        let basis = if src.n == 1 {
            vec![dst.one()]
        } else {
            let coeffs: Vec<Fe> = src.modulus.iter().map(|&c| dst.from_int(c as i64)).collect();
            let f = crate::poly::Polynomial::new(dst.clone(), coeffs);
            let rho = f
                .roots()
                .into_iter()
                .min()
                .expect("modulus splits in an extension");
            let mut b = Vec::with_capacity(src.n);
            let mut cur = dst.one();
            for _ in 0..src.n {
                b.push(cur);
                cur = dst.mul(cur, rho);
            }
            b
        };
        Embedding { src: src.clone(), dst: dst.clone(), basis, solver: OnceLock::new() }
    }

    pub fn src(&self) -> &Arc<FieldCtx> {
        &self.src
    }
    pub fn dst(&self) -> &Arc<FieldCtx> {
        &self.dst
    }

    /// Image of a source element.
    pub fn map(&self, a: Fe) -> Fe {
        if self.src.n == 1 {
            return self.dst.from_int(a.0 as i64);
        }
        let c = self.src.coeffs(a);
        let mut acc = Fe::ZERO;
        for (ci, &b) in c.iter().zip(&self.basis) {
            if *ci != 0 {
                acc = self.dst.add(acc, self.dst.scale(b, *ci as i64));
            }
        }
        acc
    }

    fn solver(&self) -> &Solver {
        self.solver.get_or_init(|| {
            let p = self.dst.p;
            let n = self.src.n;
            let big_n = self.dst.n;
            // a[r][c] = coordinate r of basis[c]
            let cols: Vec<Vec<u64>> = self.basis.iter().map(|&b| self.dst.coeffs(b)).collect();
            // pick pivot rows greedily by elimination on the transpose
            let mut mat: Vec<Vec<u64>> = cols.clone(); // n rows x N cols
            let mut rows = Vec::new();
            let mut rank = 0;
            for col in 0..big_n {
                if rank == n {
                    break;
                }
                let piv = (rank..n).find(|&r| mat[r][col] != 0);
                if let Some(pr) = piv {
                    mat.swap(rank, pr);
                    let inv = pp_inv_mod(mat[rank][col], p);
                    for x in mat[rank].iter_mut() {
                        *x = arith::mul_mod_u64(*x, inv, p);
                    }
                    for r in 0..n {
                        if r != rank && mat[r][col] != 0 {
                            let f = mat[r][col];
                            for c in 0..big_n {
                                let sub = arith::mul_mod_u64(f, mat[rank][c], p);
                                mat[r][c] = (mat[r][c] + p - sub) % p;
                            }
                        }
                    }
                    rows.push(col);
                    rank += 1;
                }
            }
            // square system: sq[i][j] = coordinate rows[i] of basis[j]
            let mut sq: Vec<Vec<u64>> = rows
                .iter()
                .map(|&r| (0..n).map(|j| cols[j][r]).collect())
                .collect();
            let mut inv: Vec<Vec<u64>> =
                (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
            for c in 0..n {
                let pr = (c..n).find(|&r| sq[r][c] != 0).expect("basis is independent");
                sq.swap(c, pr);
                inv.swap(c, pr);
                let iv = pp_inv_mod(sq[c][c], p);
                for j in 0..n {
                    sq[c][j] = arith::mul_mod_u64(sq[c][j], iv, p);
                    inv[c][j] = arith::mul_mod_u64(inv[c][j], iv, p);
                }
                for r in 0..n {
                    if r != c && sq[r][c] != 0 {
                        let f = sq[r][c];
                        for j in 0..n {
                            sq[r][j] = (sq[r][j] + p - arith::mul_mod_u64(f, sq[c][j], p)) % p;
                            inv[r][j] = (inv[r][j] + p - arith::mul_mod_u64(f, inv[c][j], p)) % p;
                        }
                    }
                }
            }
            Solver { rows, inv }
        })
    }

    /// Preimage of a target element lying in the image of the embedding.
    pub fn preimage(&self, b: Fe) -> Option<Fe> {
        if self.src.n == 1 {
            return self.dst.prime_value(b).map(|v| Fe(v as u128));
        }
        if !self.dst.in_subfield(b, self.src.n) {
            return None;
        }
        let s = self.solver();
        let p = self.dst.p;
        let bc = self.dst.coeffs(b);
        let rhs: Vec<u64> = s.rows.iter().map(|&r| bc[r]).collect();
        let n = self.src.n;
        let mut c = vec![0u64; n];
        for (i, ci) in c.iter_mut().enumerate() {
            let mut acc = 0u64;
            for j in 0..n {
                acc = (acc + arith::mul_mod_u64(s.inv[i][j], rhs[j], p)) % p;
            }
            *ci = acc;
        }
        let a = self.src.from_coeffs(&c).ok()?;
        (self.map(a) == b).then_some(a)
    }
}

// ---------------------------------------------------------------------------

/// A field element bundled with its context; all binary operations check
/// that both operands share a field.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    v: Fe,
}

/// Binary operations accepted by [`FieldElement::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(ctx: &Arc<FieldCtx>, v: Fe) -> Result<Self> {
        if !ctx.contains(v) {
            return Err(Error::DegreeMismatch("index out of range".into()));
        }
        Ok(FieldElement { ctx: ctx.clone(), v })
    }
    pub fn from_coeffs(ctx: &Arc<FieldCtx>, c: &[u64]) -> Result<Self> {
        Ok(FieldElement { ctx: ctx.clone(), v: ctx.from_coeffs(c)? })
    }
    pub fn from_int(ctx: &Arc<FieldCtx>, v: i64) -> Self {
        FieldElement { ctx: ctx.clone(), v: ctx.from_int(v) }
    }
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
    pub fn raw(&self) -> Fe {
        self.v
    }
    pub fn coeffs(&self) -> Vec<u64> {
        self.ctx.coeffs(self.v)
    }
    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn wrap(&self, v: Fe) -> FieldElement {
        FieldElement { ctx: self.ctx.clone(), v }
    }

    pub fn arith(&self, other: &FieldElement, op: Op) -> Result<FieldElement> {
        self.same(other)?;
        let c = &self.ctx;
        let v = match op {
            Op::Add => c.add(self.v, other.v),
            Op::Sub => c.sub(self.v, other.v),
            Op::Mul => c.mul(self.v, other.v),
            Op::Div => c.div(self.v, other.v)?,
        };
        Ok(self.wrap(v))
    }

    pub fn pow(&self, e: &BigUint) -> FieldElement {
        self.wrap(self.ctx.pow_big(self.v, e))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.wrap(self.ctx.inv(self.v).ok_or(Error::DivisionByZero)?))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.ctx.neg(self.v))
    }

    /// a^(p^m); m must divide the field degree.
    pub fn frobenius(&self, m: usize) -> Result<FieldElement> {
        if m == 0 || !self.ctx.n.is_multiple_of(m) {
            return Err(Error::DegreeMismatch(format!("{m} does not divide {}", self.ctx.n)));
        }
        Ok(self.wrap(self.ctx.frob_pow(self.v, m)))
    }

    pub fn residue_symbol(&self, m: u64) -> Result<i8> {
        self.ctx.residue_symbol(self.v, m)
    }

    pub fn trace(&self, m: usize) -> Result<FieldElement> {
        Ok(self.wrap(self.ctx.trace(self.v, m)?))
    }

    pub fn norm(&self, m: usize) -> Result<FieldElement> {
        Ok(self.wrap(self.ctx.norm(self.v, m)?))
    }

    pub fn nth_root(&self, m: u64) -> Option<FieldElement> {
        self.ctx.nth_root(self.v, m).map(|v| self.wrap(v))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.v == other.v
    }
}
impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ctx.fmt_elem(self.v))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ctx.fmt_elem(self.v))
    }
}

macro_rules! impl_op {
    ($tr:ident, $m:ident, $op:expr) => {
        impl std::ops::$tr for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands live in different fields; use
            /// [`FieldElement::arith`] for a checked version.
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                self.arith(rhs, $op).expect("field operation")
            }
        }
    };
}
impl_op!(Add, add, Op::Add);
impl_op!(Sub, sub, Op::Sub);
impl_op!(Mul, mul, Op::Mul);
impl_op!(Div, div, Op::Div);

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli() {
        assert_eq!(FieldCtx::new(7, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(FieldCtx::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // x^2+1 is irreducible over GF(3) and precedes x^2+x+2
        assert_eq!(FieldCtx::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // (c0,c1,c2) = (1,0,1) precedes (1,1,0): x^3+x^2+1 wins over x^3+x+1
        assert_eq!(FieldCtx::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
    }

    #[test]
    fn errors() {
        assert_eq!(FieldCtx::new(6, 1).unwrap_err().name(), "NotPrime");
        assert_eq!(FieldCtx::new(2, 30).unwrap_err().name(), "SizeExceeded");
    }

    #[test]
    fn gf4_examples() {
        let k = FieldCtx::new(2, 2).unwrap();
        let a = k.generator();
        let a2 = k.mul(a, a);
        assert_eq!(a2, k.add(a, k.one()));
        assert_eq!(k.frob(a), k.add(a, k.one()));
        assert_eq!(k.trace(a, 1).unwrap(), k.one());
    }

    #[test]
    fn gf7_examples() {
        let k = FieldCtx::new(7, 1).unwrap();
        assert_eq!(k.mul(Fe(3), Fe(5)), Fe(1));
        assert_eq!(k.residue_symbol(Fe(3), 2).unwrap(), -1);
        assert_eq!(k.nth_root(Fe(4), 2), Some(Fe(2)));
        assert_eq!(k.nth_root(Fe(3), 2), None);
        assert_eq!(k.nth_root(Fe(1), 3), Some(Fe(1)));
        let k11 = FieldCtx::new(11, 1).unwrap();
        assert_eq!(k11.residue_symbol(Fe(2), 5).unwrap(), -1);
    }

    #[test]
    fn slow_path_matches_tables() {
        let k = FieldCtx::new(5, 3).unwrap();
        assert!(k.has_tables());
        for a in (0..125).map(Fe) {
            for b in (0..125).step_by(7).map(Fe) {
                assert_eq!(k.mul(a, b), k.mul_slow(a, b));
                assert_eq!(k.add(a, b), k.add_slow(a, b));
                assert_eq!(k.sub(a, b), k.sub_slow(a, b));
            }
            if !a.is_zero() {
                assert_eq!(k.inv(a).unwrap(), k.inv_slow(a));
            }
            assert_eq!(k.frob(a), k.pow_slow(a, 5));
        }
    }

    #[test]
    fn big_field_ops() {
        let k = FieldCtx::unbounded(23, 12).unwrap();
        assert!(!k.has_tables());
        let a = Fe(123_456_789_012_345);
        let b = Fe(987_654_321);
        let ab = k.mul(a, b);
        assert_eq!(k.mul(ab, k.inv(b).unwrap()), a);
        assert_eq!(k.pow(a, k.q() - 1), k.one());
        assert_eq!(k.frob_pow(a, 12), a);
        assert_eq!(k.frob(a), k.pow(a, 23));
        let s = k.mul(a, a);
        let r = k.sqrt(s).unwrap();
        assert_eq!(k.mul(r, r), s);
    }

    #[test]
    fn embedding_roundtrip() {
        let k = FieldCtx::new(3, 2).unwrap();
        let (big, emb) = k.extension(3).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                let s = emb.map(k.mul(a, b));
                assert_eq!(s, big.mul(emb.map(a), emb.map(b)));
            }
            assert_eq!(emb.preimage(emb.map(a)), Some(a));
        }
        assert_eq!(emb.preimage(big.generator()), None);
    }
}
