use ss_zeta::families::{
    find_ss_parameters, rows, ss_condition, table_for, twist_catalogue, verify_member, FamilyKind, FamilyTag,
    RowStatus, PARAM_BUDGET,
};
use ss_zeta::ff::FieldCtx;
use ss_zeta::zeta::{is_supersingular, DEFAULT_BUDGET};

fn primes(below: u64) -> impl Iterator<Item = u64> {
    (3..below).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
}

#[test]
fn rigid_members_follow_the_congruence_rules() {
    for p in primes(60) {
        let k = FieldCtx::new(p, 1).unwrap();
        let rules = [
            (FamilyKind::X6minus1, p % 3 == 2),
            (FamilyKind::X5minusX, p % 8 == 5 || p % 8 == 7),
            (FamilyKind::X5minus1, matches!(p % 5, 2 | 3 | 4)),
        ];
        for (kind, expect) in rules {
            let tag = FamilyTag::rigid(kind).unwrap();
            let Ok(curve) = tag.standard_model(&k) else { continue };
            if !tag.is_generic(&k) {
                continue;
            }
            assert_eq!(ss_condition(&tag, &k), expect, "{kind} at p = {p}");
            assert_eq!(is_supersingular(&curve), expect, "{kind} at p = {p}");
        }
    }
}

#[test]
fn every_table_has_rows_and_each_member_lands_in_one_table() {
    for t in (5u8..=18).filter(|&t| t != 8) {
        assert!(rows().iter().any(|r| r.table == t), "table {t} has no rows");
    }
    assert!(rows().iter().all(|r| r.table != 8));
    for p in primes(24) {
        for n in [1, 2] {
            let k = FieldCtx::new(p, n).unwrap();
            for kind in FamilyKind::ALL {
                for tag in find_ss_parameters(kind, &k, PARAM_BUDGET).into_iter().take(4) {
                    let Some(t) = table_for(&tag, &k) else { continue };
                    assert!((5..=18).contains(&t) && t != 8);
                }
            }
        }
    }
}

#[test]
fn x5_minus_1_has_ten_twists_when_q_is_1_mod_5() {
    // 19 = 4 mod 5 keeps the curve supersingular, 361 = 1 mod 5
    let k = FieldCtx::new(19, 2).unwrap();
    let cat = twist_catalogue(FamilyTag::X5minus1, &k, DEFAULT_BUDGET).unwrap();
    assert_eq!(cat.class_count, 10);
    assert_eq!(cat.entries.len(), 10);
    assert!(cat.pass, "{:?}", cat.errors);
    let mut classes: Vec<usize> = cat.entries.iter().map(|e| e.class).collect();
    classes.sort();
    classes.dedup();
    assert_eq!(classes.len(), 10);
    for e in &cat.entries {
        assert_eq!(e.weil, e.oracle);
        assert!(e.trans_ok);
    }
}

#[test]
fn x5_minus_x_over_5_members_verify() {
    let k = FieldCtx::new(5, 1).unwrap();
    let reps = verify_member(FamilyTag::X5minusX, &k, DEFAULT_BUDGET).unwrap();
    assert!(!reps.is_empty());
    for r in &reps {
        assert!(r.pass || r.status == RowStatus::NoParameter, "{r:?}");
    }
    let json = serde_json::to_value(&reps).unwrap();
    assert_eq!(json.as_array().unwrap().len(), reps.len());
    assert_eq!(json[0]["status"], "verified");
}
