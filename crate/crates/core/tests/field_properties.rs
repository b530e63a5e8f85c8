use std::sync::Arc;

use proptest::prelude::*;
use ss_zeta::ff::{Embedding, Fe, FieldCtx};

const FIELDS: &[(u64, usize)] = &[(2, 1), (2, 3), (2, 4), (3, 2), (5, 1), (5, 3), (7, 2), (11, 1), (13, 2), (3, 5)];

fn field(i: usize) -> Arc<FieldCtx> {
    let (p, n) = FIELDS[i % FIELDS.len()];
    FieldCtx::new(p, n).unwrap()
}

fn elem(k: &FieldCtx, raw: u128) -> Fe {
    Fe(raw % k.q())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(i in 0usize..10, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let k = field(i);
        let (a, b, c) = (elem(&k, a as u128), elem(&k, b as u128), elem(&k, c as u128));
        prop_assert_eq!(k.add(a, b), k.add(b, a));
        prop_assert_eq!(k.mul(a, b), k.mul(b, a));
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.sub(k.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism(i in 0usize..10, a in any::<u64>(), b in any::<u64>()) {
        let k = field(i);
        let (a, b) = (elem(&k, a as u128), elem(&k, b as u128));
        prop_assert_eq!(k.frob(k.add(a, b)), k.add(k.frob(a), k.frob(b)));
        prop_assert_eq!(k.frob(k.mul(a, b)), k.mul(k.frob(a), k.frob(b)));
        prop_assert_eq!(k.frob(a), k.pow(a, k.p() as u128));
        prop_assert_eq!(k.frob_pow(a, k.n()), a);
    }

    #[test]
    fn residue_symbols_and_roots(i in 0usize..10, a in 1u64.., m in prop::sample::select(vec![2u64, 3, 4, 5])) {
        let k = field(i);
        let a = elem(&k, a as u128);
        prop_assume!(!a.is_zero());
        let g = num_integer::gcd(m as u128, k.q() - 1);
        let is_power = k.pow(a, (k.q() - 1) / g) == k.one();
        if g > 1 {
            let sym = k.residue_symbol(a, m);
            if (k.q() - 1) % m as u128 == 0 {
                prop_assert_eq!(sym.unwrap(), if is_power { 1 } else { -1 });
            }
        }
        match k.nth_root(a, m) {
            Some(r) => prop_assert_eq!(k.pow(r, m as u128), a),
            None => prop_assert!(!is_power),
        }
        if let Some(r) = k.sqrt(a) {
            prop_assert_eq!(k.square(r), a);
            prop_assert!(r <= k.neg(r));
        }
    }

    #[test]
    fn trace_and_norm_land_in_the_subfield(i in 0usize..10, a in any::<u64>()) {
        let k = field(i);
        let a = elem(&k, a as u128);
        for m in 1..=k.n() {
            if k.n() % m != 0 {
                continue;
            }
            let t = k.trace(a, m).unwrap();
            let nm = k.norm(a, m).unwrap();
            // Galois-stable over GF(p^m)
            prop_assert_eq!(k.frob_pow(t, m), t);
            prop_assert_eq!(k.frob_pow(nm, m), nm);
            prop_assert!(k.in_subfield(t, m));
            // the trace is additive, the norm multiplicative
            let b = k.frob(a);
            prop_assert_eq!(k.trace(k.add(a, b), m).unwrap(), k.add(t, k.trace(b, m).unwrap()));
            prop_assert_eq!(k.norm(k.mul(a, b), m).unwrap(), k.mul(nm, k.norm(b, m).unwrap()));
        }
    }

    #[test]
    fn embeddings_are_homomorphisms(a in any::<u64>(), b in any::<u64>(), j in 0usize..4) {
        let (p, n, m) = [(2u64, 2usize, 3usize), (3, 1, 4), (5, 2, 2), (7, 1, 3)][j];
        let k = FieldCtx::new(p, n).unwrap();
        let (big, e) = k.extension(m).unwrap();
        let (a, b) = (elem(&k, a as u128), elem(&k, b as u128));
        prop_assert_eq!(e.map(k.add(a, b)), big.add(e.map(a), e.map(b)));
        prop_assert_eq!(e.map(k.mul(a, b)), big.mul(e.map(a), e.map(b)));
        prop_assert_eq!(e.map(k.frob(a)), big.frob(e.map(a)));
        prop_assert_eq!(e.preimage(e.map(a)), Some(a));
        prop_assert_eq!(Embedding::get(&k, &big).unwrap().map(a), e.map(a));
    }
}

#[test]
fn generator_generates_the_field() {
    for i in 0..FIELDS.len() {
        let k = field(i);
        if k.n() > 1 {
            assert_eq!(k.element_degree(k.generator()), k.n());
        }
        // some element has full multiplicative order
        assert!(k.elements().any(|a| !a.is_zero() && k.order(a) == k.q() - 1));
    }
}

#[test]
fn nonsquares_are_counted_exactly() {
    for i in 0..FIELDS.len() {
        let k = field(i);
        let squares = k.elements().filter(|&a| !a.is_zero() && k.is_square(a)).count() as u128;
        let expect = if k.p() == 2 { k.q() - 1 } else { (k.q() - 1) / 2 };
        assert_eq!(squares, expect, "GF({}^{})", k.p(), k.n());
    }
}
