//! Test-side helpers: a point-counting oracle over prime fields written
//! with plain integer arithmetic, independent of the library's fields.
#![allow(dead_code)]

use ss_zeta::curve::CurveModel;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Legendre symbol of a mod p as -1, 0, 1.
pub fn chi(a: u64, p: u64) -> i64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// GF(p^2) = GF(p)[t]/(t^2 - nr), elements (a, b) = a + b t.
struct Fp2 {
    p: u64,
    nr: u64,
}

impl Fp2 {
    fn new(p: u64) -> Fp2 {
        let nr = (2..p).find(|&a| chi(a, p) == -1).unwrap();
        Fp2 { p, nr }
    }
    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        ((x.0 * y.0 + x.1 * y.1 % p * self.nr) % p, (x.0 * y.1 + x.1 * y.0) % p)
    }
    fn add(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }
    fn norm(&self, x: (u64, u64)) -> u64 {
        let p = self.p;
        (x.0 * x.0 % p + p * p - x.1 * x.1 % p * self.nr % p) % p
    }
    /// Quadratic character on GF(p^2) via the norm.
    fn chi(&self, x: (u64, u64)) -> i64 {
        if x == (0, 0) {
            0
        } else {
            chi(self.norm(x), self.p)
        }
    }
}

/// Coefficients (low first) of y^2 = f(x) over a prime field.
pub fn prime_coeffs(c: &CurveModel) -> Option<(u64, Vec<u64>)> {
    let k = c.ctx();
    if k.n() != 1 || k.p() == 2 {
        return None;
    }
    let f = c.f()?;
    let v = f.coeffs().iter().map(|&a| k.prime_value(a).unwrap()).collect();
    Some((k.p(), v))
}

/// (|C(GF(p))|, |C(GF(p^2))|) by direct enumeration.
pub fn count_prime(p: u64, f: &[u64]) -> (i128, i128) {
    let deg = f.len() - 1;
    let eval1 = |x: u64| f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p);
    let lc = f[deg];
    let inf1 = if deg == 5 { 1 } else { 1 + chi(lc, p) };
    let n1: i64 = (0..p).map(|x| 1 + chi(eval1(x), p)).sum::<i64>() + inf1;
    let k2 = Fp2::new(p);
    let mut n2: i64 = if deg == 5 { 1 } else { 2 };
    for a in 0..p {
        for b in 0..p {
            let x = (a, b);
            let fx = f.iter().rev().fold((0, 0), |acc, &c| k2.add(k2.mul(acc, x), (c, 0)));
            n2 += 1 + k2.chi(fx);
        }
    }
    (n1 as i128, n2 as i128)
}

/// (r, s) from the two counts.
pub fn weil_from_counts(q: i128, n1: i128, n2: i128) -> (i128, i128) {
    let r = n1 - q - 1;
    let twice_s = n2 - q * q - 1 + r * r;
    assert_eq!(twice_s % 2, 0);
    (r, twice_s / 2)
}

/// Independent (r, s) of an odd-characteristic curve over a prime field.
pub fn independent_weil(c: &CurveModel) -> Option<(i128, i128)> {
    let (p, f) = prime_coeffs(c)?;
    let (n1, n2) = count_prime(p, &f);
    Some(weil_from_counts(p as i128, n1, n2))
}
