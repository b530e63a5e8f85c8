//! Cryptographic exponent of simple supersingular abelian surfaces and
//! its verification against the large prime factors of |J(k)|.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt_u128, factor_biguint};
use crate::error::{Error, Result};
use crate::zeta::WeilCoeffs;

/// A positive half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger {
    pub twice: u32,
}

impl HalfInteger {
    pub fn from_twice(twice: u32) -> HalfInteger {
        HalfInteger { twice }
    }
    pub fn int(v: u32) -> HalfInteger {
        HalfInteger { twice: 2 * v }
    }
    pub fn is_integer(&self) -> bool {
        self.twice.is_multiple_of(2)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bad = || serde::de::Error::custom(format!("bad half-integer {s:?}"));
        match s.split_once('/') {
            Some((a, "2")) => Ok(HalfInteger { twice: a.parse().map_err(|_| bad())? }),
            None => Ok(HalfInteger::int(s.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Exponent from the (r, s, q, p) pattern of a simple class.
pub fn crypto_exponent(w: &WeilCoeffs, p: u64) -> Result<HalfInteger> {
    let q = w.q;
    let qi = q as i128;
    let (r, s) = (w.r, w.s);
    let int = HalfInteger::int;
    let uncovered = Err(Error::NotSimpleOrUncovered);
    match exact_sqrt_u128(q) {
        Some(rq) => {
            let rq = rq as i128;
            if (r, s) == (0, 2 * qi) && p % 4 == 1 {
                Ok(int(2))
            } else if (r, s) == (2 * rq, 3 * qi) && p % 3 == 1 {
                Ok(HalfInteger::from_twice(3))
            } else if (r, s) == (-2 * rq, 3 * qi) && p % 3 == 1 {
                Ok(int(3))
            } else if (r, s) == (0, 0) && p % 8 != 1 {
                Ok(int(4))
            } else if (r, s) == (0, -qi) && p % 12 != 1 {
                Ok(int(6))
            } else if (r, s) == (rq, qi) && p % 5 != 1 {
                Ok(HalfInteger::from_twice(5))
            } else if (r, s) == (-rq, qi) && p % 5 != 1 {
                Ok(int(5))
            } else {
                uncovered
            }
        }
        None => {
            if (r, s) == (0, -2 * qi) {
                Ok(int(1))
            } else if (r, s) == (0, 0) && p != 2 {
                Ok(int(4))
            } else if (r, s) == (0, qi) {
                Ok(int(3))
            } else if (r, s) == (0, -qi) && p != 3 {
                Ok(int(6))
            } else if p == 5 && s == 3 * qi && r * r == 5 * qi {
                Ok(int(5))
            } else if p == 2 && s == qi && r * r == 2 * qi {
                Ok(int(12))
            } else {
                uncovered
            }
        }
    }
}

/// Outcome of checking an exponent against |J(k)|.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    pub c: HalfInteger,
    pub large_primes: Vec<BigUint>,
    /// True when every large prime was checked and passed.
    pub verified: bool,
    /// No prime above 5 divides |J(k)|, or factoring was incomplete.
    pub inconclusive: bool,
}

/// q^c as an exact integer; requires q^c integral.
fn q_power(p: u64, n: u32, c: HalfInteger) -> Option<BigUint> {
    let e = n * c.twice;
    e.is_multiple_of(2).then(|| BigUint::from(p).pow(e / 2))
}

fn q_power_mod(p: u64, n: u32, c: HalfInteger, l: &BigUint) -> Option<BigUint> {
    let e = n * c.twice;
    e.is_multiple_of(2).then(|| BigUint::from(p).modpow(&BigUint::from(e / 2), l))
}

/// Checks l | q^c - 1 and minimality of c for every prime l > 5 dividing
/// f_J(1).
pub fn verify_exponent(w: &WeilCoeffs, p: u64, c: HalfInteger) -> Result<ExponentReport> {
    let (_, n) = crate::arith::prime_power(w.q)
        .filter(|(pp, _)| *pp == p)
        .ok_or_else(|| Error::VerificationFailed(format!("q = {} is not a power of {p}", w.q)))?;
    let order = w
        .j_order()
        .to_biguint()
        .ok_or_else(|| Error::VerificationFailed("nonpositive group order".into()))?;
    let (factors, complete) = factor_biguint(&order);
    let large: Vec<BigUint> = factors
        .into_iter()
        .map(|(l, _)| l)
        .filter(|l| *l > BigUint::from(5u32))
        .collect();
    if large.is_empty() || !complete {
        return Ok(ExponentReport { c, large_primes: large, verified: false, inconclusive: true });
    }
    if q_power(p, n, c).is_none() {
        return Err(Error::VerificationFailed(format!("q^{c} is not an integer")));
    }
    for l in &large {
        if q_power_mod(p, n, c, l) != Some(BigUint::one()) {
            return Err(Error::VerificationFailed(format!("{l} does not divide q^{c} - 1")));
        }
        for t in 1..c.twice {
            let c2 = HalfInteger::from_twice(t);
            if q_power_mod(p, n, c2, l) == Some(BigUint::one()) {
                return Err(Error::VerificationFailed(format!("{l} already divides q^{c2} - 1")));
            }
        }
    }
    Ok(ExponentReport { c, large_primes: large, verified: true, inconclusive: false })
}

/// p^(n c), the size of the smallest field receiving the pairing.
pub fn embedding_field_size(w: &WeilCoeffs, p: u64) -> Result<BigUint> {
    let c = crypto_exponent(w, p)?;
    let (_, n) = crate::arith::prime_power(w.q).ok_or(Error::NotSimpleOrUncovered)?;
    q_power(p, n, c).ok_or(Error::NotSimpleOrUncovered)
}

/// Bit length of the embedding field size.
pub fn embedding_field_bits(w: &WeilCoeffs, p: u64) -> Result<u64> {
    Ok(embedding_field_size(w, p)?.bits())
}

/// Small helper for reports: the prime factors above 5 of |J(k)|.
pub fn large_prime_factors(w: &WeilCoeffs) -> Vec<BigUint> {
    match w.j_order().to_biguint() {
        Some(o) => factor_biguint(&o)
            .0
            .into_iter()
            .map(|(l, _)| l)
            .filter(|l| l.to_u64().is_none_or(|v| v > 5))
            .collect(),
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(r: i128, s: i128, q: u128) -> WeilCoeffs {
        WeilCoeffs::new(r, s, q)
    }

    #[test]
    fn table_rows() {
        assert_eq!(crypto_exponent(&w(0, -14, 7), 7).unwrap(), HalfInteger::int(1));
        assert_eq!(crypto_exponent(&w(0, -7, 7), 7).unwrap(), HalfInteger::int(6));
        assert_eq!(crypto_exponent(&w(0, 0, 3), 3).unwrap(), HalfInteger::int(4));
        assert_eq!(crypto_exponent(&w(14, 147, 49), 7).unwrap(), HalfInteger::from_twice(3));
        assert_eq!(crypto_exponent(&w(5, 25, 25), 5).unwrap(), HalfInteger::from_twice(5));
        assert_eq!(crypto_exponent(&w(-5, 15, 5), 5).unwrap(), HalfInteger::int(5));
        assert_eq!(crypto_exponent(&w(4, 8, 8), 2).unwrap(), HalfInteger::int(12));
        assert_eq!(crypto_exponent(&w(28, 294, 49), 7).unwrap_err(), Error::NotSimpleOrUncovered);
        assert_eq!(crypto_exponent(&w(0, 98, 49), 7).unwrap_err(), Error::NotSimpleOrUncovered);
        assert_eq!(crypto_exponent(&w(0, 0, 2), 2).unwrap_err(), Error::NotSimpleOrUncovered);
    }

    #[test]
    fn half_integer_text() {
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::int(6).to_string(), "6");
        let j = serde_json::to_string(&HalfInteger::from_twice(5)).unwrap();
        assert_eq!(j, "\"5/2\"");
        assert_eq!(serde_json::from_str::<HalfInteger>(&j).unwrap(), HalfInteger::from_twice(5));
    }

    #[test]
    fn verification() {
        let rep = verify_exponent(&w(0, 0, 27), 3, HalfInteger::int(4)).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.large_primes, vec![BigUint::from(73u32)]);
        let rep = verify_exponent(&w(0, -7, 7), 7, HalfInteger::int(6)).unwrap();
        assert_eq!(rep.large_primes, vec![BigUint::from(43u32)]);
        assert!(verify_exponent(&w(0, -7, 7), 7, HalfInteger::int(3)).is_err());
        assert!(verify_exponent(&w(0, -7, 7), 7, HalfInteger::int(12)).is_err());
        // f_J(1) = 10 has no prime factor above 5
        let rep = verify_exponent(&w(0, 0, 3), 3, HalfInteger::int(4)).unwrap();
        assert!(rep.inconclusive);
    }

    #[test]
    fn field_sizes() {
        assert_eq!(embedding_field_size(&w(0, -7, 7), 7).unwrap(), BigUint::from(117649u32));
        assert_eq!(embedding_field_size(&w(0, 0, 27), 3).unwrap(), BigUint::from(531441u32));
        assert_eq!(embedding_field_size(&w(14, 147, 49), 7).unwrap(), BigUint::from(343u32));
    }
}
