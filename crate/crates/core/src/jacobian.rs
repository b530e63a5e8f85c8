//! Divisor-class arithmetic on Jacobians of y^2 = f(x), deg f = 5, in
//! Mumford representation (Cantor composition and reduction).

use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::ff::{Fe, FieldCtx};
use crate::poly::Polynomial;

/// A reduced divisor class (u, v): u monic, deg v < deg u <= 2, u | v^2 - f.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MumfordDivisor {
    pub u: Polynomial,
    pub v: Polynomial,
}

/// Jacobian of an imaginary (degree-5) model.
#[derive(Clone, Debug)]
pub struct Jacobian {
    f: Polynomial,
}

/// Extended gcd: returns (d, s, t) with s*a + t*b = d and d monic.
fn xgcd(a: &Polynomial, b: &Polynomial) -> (Polynomial, Polynomial, Polynomial) {
    let k = a.ctx();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Polynomial::one(k), Polynomial::zero(k));
    let (mut t0, mut t1) = (Polynomial::zero(k), Polynomial::one(k));
    while !r1.is_zero() {
        let (quo, rem) = r0.divrem(&r1).expect("nonzero divisor");
        let s2 = s0.sub(&quo.mul(&s1));
        let t2 = t0.sub(&quo.mul(&t1));
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_zero() {
        return (r0, s0, t0);
    }
    let li = k.inv(r0.lc()).unwrap();
    (r0.scale(li), s0.scale(li), t0.scale(li))
}

impl Jacobian {
    pub fn new(curve: &CurveModel) -> Result<Jacobian> {
        match curve {
            CurveModel::OddChar { f } if f.degree() == 5 => Ok(Jacobian { f: f.clone() }),
            _ => Err(Error::WrongModel),
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.f.ctx()
    }

    pub fn identity(&self) -> MumfordDivisor {
        MumfordDivisor { u: Polynomial::one(self.ctx()), v: Polynomial::zero(self.ctx()) }
    }

    pub fn is_identity(&self, d: &MumfordDivisor) -> bool {
        d.u.is_one()
    }

    pub fn is_valid(&self, d: &MumfordDivisor) -> bool {
        d.u.is_monic()
            && d.u.deg() <= 2
            && d.v.deg() < d.u.deg()
            && self.f.sub(&d.v.mul(&d.v)).rem(&d.u).is_zero()
    }

    /// Divisor P - infinity for a point P = (x, y) on the curve.
    pub fn point(&self, x: Fe, y: Fe) -> Result<MumfordDivisor> {
        let k = self.ctx();
        if k.square(y) != self.f.eval(x) {
            return Err(Error::InvalidCurve("point is not on the curve".into()));
        }
        Ok(MumfordDivisor { u: Polynomial::linear(k, x), v: Polynomial::constant(k, y) })
    }

    pub fn negate(&self, d: &MumfordDivisor) -> MumfordDivisor {
        MumfordDivisor { u: d.u.clone(), v: d.v.neg().rem(&d.u) }
    }

    fn reduce(&self, mut u: Polynomial, mut v: Polynomial) -> MumfordDivisor {
        while u.degree() > 2 {
            let num = self.f.sub(&v.mul(&v));
            let u2 = num.div_exact(&u);
            v = v.neg().rem(&u2);
            u = u2;
        }
        let u = u.monic();
        let v = v.rem(&u);
        MumfordDivisor { u, v }
    }

    /// Class of D1 + D2.
    pub fn compose_reduce(&self, d1: &MumfordDivisor, d2: &MumfordDivisor) -> MumfordDivisor {
        let (e, e1, e2) = xgcd(&d1.u, &d2.u);
        let (d, c1, c2) = xgcd(&e, &d1.v.add(&d2.v));
        let s1 = c1.mul(&e1);
        let s2 = c1.mul(&e2);
        let s3 = c2;
        let dd = d.mul(&d);
        let u = d1.u.mul(&d2.u).div_exact(&dd);
        let num = s1
            .mul(&d1.u)
            .mul(&d2.v)
            .add(&s2.mul(&d2.u).mul(&d1.v))
            .add(&s3.mul(&d1.v.mul(&d2.v).add(&self.f)));
        let v = num.div_exact(&d).rem(&u);
        self.reduce(u, v)
    }

    pub fn double(&self, d: &MumfordDivisor) -> MumfordDivisor {
        self.compose_reduce(d, d)
    }

    /// n * D by double-and-add; negative n uses the inverse.
    pub fn scalar_mul(&self, n: &BigInt, d: &MumfordDivisor) -> MumfordDivisor {
        let base = if n.sign() == Sign::Minus { self.negate(d) } else { d.clone() };
        let mag = n.magnitude();
        let mut acc = self.identity();
        for i in (0..mag.bits()).rev() {
            acc = self.double(&acc);
            if mag.bit(i) {
                acc = self.compose_reduce(&acc, &base);
            }
        }
        acc
    }

    /// A rational divisor P1 + P2 - 2*infinity from two seeded random points.
    pub fn random_divisor(&self, seed: u64) -> Result<MumfordDivisor> {
        let k = self.ctx().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = k.q();
        let pick = |rng: &mut ChaCha8Rng| -> Option<MumfordDivisor> {
            for _ in 0..4096 {
                let x = Fe(rng.gen_range(0..q));
                let fx = self.f.eval(x);
                if let Some(y) = k.sqrt(fx) {
                    let y = if rng.gen_bool(0.5) { k.neg(y) } else { y };
                    return self.point(x, y).ok();
                }
            }
            None
        };
        let p1 = pick(&mut rng).ok_or(Error::NoRationalPoints)?;
        let p2 = pick(&mut rng).ok_or(Error::NoRationalPoints)?;
        Ok(self.compose_reduce(&p1, &p2))
    }

    /// True when n kills every one of `samples` seeded divisors.
    pub fn annihilates(&self, n: &BigInt, seed: u64, samples: usize) -> Result<bool> {
        for i in 0..samples {
            let d = self.random_divisor(seed.wrapping_add(i as u64))?;
            if !self.is_identity(&self.scalar_mul(n, &d)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jac(p: u64, s: &str) -> Jacobian {
        let k = FieldCtx::new(p, 1).unwrap();
        Jacobian::new(&CurveModel::parse(&k, s).unwrap()).unwrap()
    }

    #[test]
    fn rejects_sextic() {
        let k = FieldCtx::new(7, 1).unwrap();
        let c = CurveModel::parse(&k, "y^2 = x^6 - 1").unwrap();
        assert_eq!(Jacobian::new(&c).unwrap_err(), Error::WrongModel);
    }

    #[test]
    fn group_law_basics() {
        let j = jac(7, "y^2 = x^5 - 1");
        let id = j.identity();
        for seed in 0..20 {
            let d = j.random_divisor(seed).unwrap();
            assert!(j.is_valid(&d));
            assert_eq!(j.compose_reduce(&d, &id), d);
            assert!(j.is_identity(&j.compose_reduce(&d, &j.negate(&d))));
            assert!(j.is_identity(&j.scalar_mul(&BigInt::from(50), &d)));
            assert!(j.is_identity(&j.scalar_mul(&BigInt::from(0), &d)));
            assert_eq!(j.scalar_mul(&BigInt::from(1), &d), d);
            assert_eq!(j.scalar_mul(&BigInt::from(-1), &d), j.negate(&d));
        }
        assert_eq!(j.random_divisor(3).unwrap(), j.random_divisor(3).unwrap());
    }
}
