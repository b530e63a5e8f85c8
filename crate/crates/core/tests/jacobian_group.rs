use num_bigint::BigInt;
use proptest::prelude::*;
use ss_zeta::curve::CurveModel;
use ss_zeta::ff::FieldCtx;
use ss_zeta::jacobian::Jacobian;
use ss_zeta::zeta::oracle_weil;

const CURVES: &[(u64, usize, &str)] = &[
    (7, 1, "y^2 = x^5 - 1"),
    (5, 1, "y^2 = x^5 - x"),
    (3, 2, "y^2 = x^5 - x + [0,1]"),
    (11, 1, "y^2 = x^5 + 3*x^3 + 2*x + 5"),
];

fn jac(i: usize) -> (Jacobian, BigInt) {
    let (p, n, s) = CURVES[i];
    let k = FieldCtx::new(p, n).unwrap();
    let c = CurveModel::parse(&k, s).unwrap();
    let order = oracle_weil(&c, 1 << 24).unwrap().j_order();
    (Jacobian::new(&c).unwrap(), order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn abelian_group_axioms(i in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (j, _) = jac(i);
        let (a, b, c) = (j.random_divisor(s1).unwrap(), j.random_divisor(s2).unwrap(), j.random_divisor(s3).unwrap());
        prop_assert!(j.is_valid(&a));
        let ab = j.compose_reduce(&a, &b);
        prop_assert!(j.is_valid(&ab));
        prop_assert_eq!(ab.clone(), j.compose_reduce(&b, &a));
        prop_assert_eq!(j.compose_reduce(&ab, &c), j.compose_reduce(&a, &j.compose_reduce(&b, &c)));
        prop_assert_eq!(j.compose_reduce(&a, &j.identity()), a.clone());
        prop_assert!(j.is_identity(&j.compose_reduce(&a, &j.negate(&a))));
        prop_assert_eq!(j.double(&a), j.scalar_mul(&BigInt::from(2), &a));
    }

    #[test]
    fn scalar_multiplication_is_linear(i in 0usize..4, s in any::<u64>(), m in -200i64..200, n in -200i64..200) {
        let (j, order) = jac(i);
        let d = j.random_divisor(s).unwrap();
        let lhs = j.scalar_mul(&BigInt::from(m + n), &d);
        let rhs = j.compose_reduce(&j.scalar_mul(&BigInt::from(m), &d), &j.scalar_mul(&BigInt::from(n), &d));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(j.is_identity(&j.scalar_mul(&order, &d)));
    }
}
