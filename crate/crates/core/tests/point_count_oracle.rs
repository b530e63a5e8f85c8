mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ss_zeta::curve::CurveModel;
use ss_zeta::families::{find_ss_parameters, table_for, FamilyKind, RowEnv, PARAM_BUDGET};
use ss_zeta::ff::{Fe, FieldCtx};
use ss_zeta::poly::Polynomial;
use ss_zeta::zeta::{is_supersingular, oracle_weil, weil_polynomial, ZetaOptions};

const BUDGET: u128 = 1 << 24;

#[test]
fn library_counts_agree_with_independent_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
        let k = FieldCtx::new(p, 1).unwrap();
        let mut done = 0;
        while done < 25 {
            let deg = if rng.gen_bool(0.5) { 5 } else { 6 };
            let mut c: Vec<Fe> = (0..deg).map(|_| Fe(rng.gen_range(0..p as u128))).collect();
            c.push(Fe(rng.gen_range(1..p as u128)));
            let Ok(curve) = CurveModel::odd(Polynomial::new(k.clone(), c)) else { continue };
            let w = oracle_weil(&curve, BUDGET).unwrap();
            assert_eq!(Some((w.r, w.s)), common::independent_weil(&curve), "{curve} over GF({p})");
            done += 1;
        }
    }
}

#[test]
fn table_pipeline_agrees_on_supersingular_prime_field_curves() {
    for p in [3u64, 5, 7, 11] {
        let k = FieldCtx::new(p, 1).unwrap();
        let mut seen = 0;
        for i in 0..(p as u128).pow(5) {
            let mut c: Vec<Fe> = (0..5).map(|j| Fe(i / (p as u128).pow(j) % p as u128)).collect();
            c.push(k.one());
            let Ok(curve) = CurveModel::odd(Polynomial::new(k.clone(), c)) else { continue };
            if !is_supersingular(&curve) {
                continue;
            }
            let z = weil_polynomial(&curve, &ZetaOptions::default()).unwrap();
            assert_eq!(Some((z.weil.r, z.weil.s)), common::independent_weil(&curve), "{curve}");
            seen += 1;
            if seen == 300 {
                break;
            }
        }
        assert!(seen > 0);
    }
}

#[test]
fn atlas_rows_over_prime_fields_match_independent_counts() {
    let mut checked = 0;
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let k = FieldCtx::new(p, 1).unwrap();
        for kind in FamilyKind::ALL {
            for tag in find_ss_parameters(kind, &k, PARAM_BUDGET).into_iter().take(6) {
                let Some(table) = table_for(&tag, &k) else { continue };
                let env = RowEnv::new(&k, tag).unwrap();
                for row in ss_zeta::families::table_rows(table) {
                    let Ok(insts) = row.instantiate(&env) else { continue };
                    for inst in insts {
                        let (r, s) = common::independent_weil(&inst.model).unwrap();
                        assert!(
                            inst.weil.iter().any(|w| (w.r, w.s) == (r, s)),
                            "table {} row {} over GF({p}): {} has ({r}, {s})",
                            inst.table,
                            inst.row,
                            inst.model
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100, "only {checked} instances");
}
