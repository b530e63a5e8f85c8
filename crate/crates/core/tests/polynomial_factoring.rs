use std::sync::Arc;

use proptest::prelude::*;
use ss_zeta::ff::{Fe, FieldCtx};
use ss_zeta::poly::{FactorShape, Polynomial};

fn all_polys(k: &Arc<FieldCtx>, max_deg: usize) -> impl Iterator<Item = Polynomial> + '_ {
    let q = k.q();
    (0..=max_deg).flat_map(move |d| {
        let count = (q - 1) * q.pow(d as u32);
        (0..count).map(move |mut i| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(Fe(i % q));
                i /= q;
            }
            c.push(Fe(i + 1));
            Polynomial::new(k.clone(), c)
        })
    })
}

#[test]
fn factorization_reconstructs_every_small_polynomial() {
    for (p, n) in [(2u64, 1usize), (3, 1), (2, 2), (5, 1)] {
        let k = FieldCtx::new(p, n).unwrap();
        for f in all_polys(&k, 5) {
            if f.degree() == 0 {
                assert_eq!(f.factor().unwrap_err(), ss_zeta::Error::ConstantInput);
                continue;
            }
            let fac = f.factor().unwrap();
            let mut prod = Polynomial::constant(&k, fac.unit);
            let mut degs = Vec::new();
            for (g, e) in &fac.factors {
                assert!(g.is_monic());
                assert!(g.is_irreducible().unwrap(), "{g} from {f}");
                prod = prod.mul(&g.pow(*e));
                for _ in 0..*e {
                    degs.push(g.degree() as u32);
                }
            }
            assert_eq!(prod, f, "GF({p}^{n})");
            if f.is_separable() {
                assert_eq!(f.factor_shape().unwrap(), FactorShape::from_degrees(&degs));
            } else {
                assert_eq!(f.factor_shape().unwrap_err(), ss_zeta::Error::NotSeparable);
                assert!(fac.factors.iter().any(|(_, e)| *e > 1));
            }
        }
    }
}

#[test]
fn roots_are_zeros() {
    let k = FieldCtx::new(7, 2).unwrap();
    let f = Polynomial::from_ints(&k, &[-1, 0, 0, 0, 0, 0, 1]);
    let roots = f.roots();
    assert_eq!(roots.len(), 6);
    assert!(roots.windows(2).all(|w| w[0] < w[1]));
    assert!(roots.iter().all(|&r| f.eval(r).is_zero()));
}

proptest! {
    #[test]
    fn division_identity(a in prop::collection::vec(0u128..49, 1..9), b in prop::collection::vec(0u128..49, 1..6)) {
        let k = FieldCtx::new(7, 2).unwrap();
        let a = Polynomial::new(k.clone(), a.into_iter().map(Fe).collect());
        let b = Polynomial::new(k.clone(), b.into_iter().map(Fe).collect());
        prop_assume!(!b.is_zero());
        let (quo, rem) = a.divrem(&b).unwrap();
        prop_assert_eq!(quo.mul(&b).add(&rem), a.clone());
        prop_assert!(rem.deg() < b.deg());
        let g = a.gcd(&b);
        prop_assert!(a.rem(&g).is_zero() && b.rem(&g).is_zero());
    }

    #[test]
    fn powmod_matches_repeated_multiplication(a in prop::collection::vec(0u128..9, 1..5), e in 0u32..40) {
        let k = FieldCtx::new(3, 2).unwrap();
        let m = Polynomial::from_ints(&k, &[1, 1, 0, 2, 0, 1]);
        let a = Polynomial::new(k.clone(), a.into_iter().map(Fe).collect());
        prop_assert_eq!(a.powmod_u128(e as u128, &m), a.pow(e).rem(&m));
    }
}
