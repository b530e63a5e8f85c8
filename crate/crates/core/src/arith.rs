//! Integer helpers: primality, factorization, modular powers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of a 64-bit integer, ascending.
pub fn prime_factors_u64(n: u64) -> Vec<u64> {
    let big = factor_biguint(&BigUint::from(n));
    big.0.into_iter().map(|(p, _)| p.to_u64().unwrap()).collect()
}

/// Full factorization of a 64-bit integer as (prime, exponent), ascending.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let big = factor_biguint(&BigUint::from(n));
    big.0
        .into_iter()
        .map(|(p, e)| (p.to_u64().unwrap(), e))
        .collect()
}

/// Factors of a 128-bit integer.
pub fn factor_u128(n: u128) -> Vec<(u128, u32)> {
    let big = factor_biguint(&BigUint::from(n));
    big.0
        .into_iter()
        .map(|(p, e)| (p.to_u128().unwrap(), e))
        .collect()
}

/// Returns (p, n) when q = p^n with p prime.
pub fn prime_power(q: u128) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factor_u128(q);
    if f.len() == 1 {
        Some((f[0].0 as u64, f[0].1))
    } else {
        None
    }
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(x) = n.to_u64() {
        return is_prime_u64(x);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, c: u32) -> Option<BigUint> {
    let one = BigUint::one();
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 64u64;
    let mut iterations = 0u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        iterations += r;
        if iterations > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

/// Factorization into (prime, exponent) pairs, ascending. The boolean is
/// false when some cofactor resisted splitting; that cofactor is then
/// listed as if it were prime.
pub fn factor_biguint(n: &BigUint) -> (Vec<(BigUint, u32)>, bool) {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut complete = true;
    if n.is_zero() {
        return (out, false);
    }
    let mut m = n.clone();
    let mut p = 2u64;
    while p < 10_000 {
        let bp = BigUint::from(p);
        if (&bp * &bp) > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if m > BigUint::one() {
        stack.push(m);
    }
    let mut rest: Vec<BigUint> = Vec::new();
    while let Some(x) = stack.pop() {
        if is_probable_prime_big(&x) {
            rest.push(x);
            continue;
        }
        let mut split = None;
        for c in 1..20u32 {
            if let Some(d) = pollard_brent(&x, c) {
                split = Some(d);
                break;
            }
        }
        match split {
            Some(d) => {
                let e = &x / &d;
                stack.push(d);
                stack.push(e);
            }
            None => {
                complete = false;
                rest.push(x);
            }
        }
    }
    rest.sort();
    for r in rest {
        match out.iter_mut().find(|(p, _)| *p == r) {
            Some(entry) => entry.1 += 1,
            None => out.push((r, 1)),
        }
    }
    out.sort();
    (out, complete)
}

/// Multiplicative order of a modulo m (gcd(a,m)=1 assumed), for small m.
pub fn mult_order_u64(a: u64, m: u64) -> u64 {
    let phi: u64 = factor_u64(m)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product();
    let mut ord = phi;
    for (p, _) in factor_u64(phi) {
        while ord.is_multiple_of(p) && pow_mod_u64(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Exact integer square root if n is a perfect square.
pub fn exact_sqrt_u128(n: u128) -> Option<u128> {
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Legendre symbol (a/p) for odd prime p, a taken mod p.
pub fn legendre(a: i64, p: u64) -> i8 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_small() {
        let naive = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime_u64(n), naive(n), "{n}");
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn factor_roundtrip() {
        for n in [730u64, 2 * 3 * 5 * 73, 1 << 40, 600851475143, 999_999_000_001] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
        let big = BigUint::from(1_000_000_007u64) * BigUint::from(998_244_353u64);
        let (f, ok) = factor_biguint(&big);
        assert!(ok);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order_u64(7, 43), 6);
        assert_eq!(mult_order_u64(27, 73), 4);
        assert_eq!(prime_power(529), Some((23, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(exact_sqrt_u128(625), Some(25));
    }
}
