use std::collections::HashSet;

use pslrack::conjugacy::{all_classes, class_members, class_size, tabulated_psl, ClassDescriptor, ClassType};
use pslrack::field::field_of_order;
use pslrack::rack::ConjRack;
use pslrack::taxonomy::{
    brute_force_subracks, classify_subracks, cross_validate, default_mode, minimality_verdict, ClassKind, OracleMode,
    Verdict,
};

fn non_identity(q: u32) -> Vec<ClassDescriptor> {
    let f = field_of_order(q).unwrap();
    all_classes(&f).iter().filter(|c| c.class_type != ClassType::Identity).map(|c| c.descriptor).collect()
}

#[test]
fn families_match_exhaustive_lattice_search() {
    for q in [2u32, 3, 4, 5, 7, 8, 9, 11] {
        let f = field_of_order(q).unwrap();
        for cd in non_identity(q) {
            let r = cross_validate(&f, &cd, OracleMode::Lattice).unwrap();
            assert!(r.exhaustive);
            assert!(r.unmatched.is_empty(), "q={q} {}: {:?}", r.class_id, r.unmatched);
            let missing: Vec<_> = r.unwitnessed().collect();
            assert!(missing.is_empty(), "q={q} {}: {missing:?}", r.class_id);
            assert!(r.passed);
        }
    }
}

#[test]
fn power_set_agrees_with_lattice_on_small_classes() {
    for q in [3u32, 4, 5] {
        let f = field_of_order(q).unwrap();
        for cd in non_identity(q).into_iter().filter(|cd| class_size(&f, cd) <= 15) {
            let a = cross_validate(&f, &cd, OracleMode::Lattice).unwrap();
            let b = cross_validate(&f, &cd, OracleMode::PowerSet).unwrap();
            assert_eq!(a.subracks, b.subracks, "q={q} {}", a.class_id);
            assert!(b.passed);
        }
    }
}

// Seeds of at most three elements reach every subrack except commuting
// subsets with more than three elements.
#[test]
fn seeded_search_misses_only_large_commuting_subsets() {
    for q in [4u32, 5, 7, 8, 9] {
        let f = field_of_order(q).unwrap();
        let t = tabulated_psl(&f).unwrap();
        let g = t.table();
        for cd in non_identity(q) {
            let (all, _) = brute_force_subracks(&f, &cd, OracleMode::Lattice).unwrap();
            let (seeded, exhaustive) = brute_force_subracks(&f, &cd, OracleMode::Seeded).unwrap();
            assert!(!exhaustive);
            let seeded: HashSet<_> = seeded.into_iter().collect();
            assert!(seeded.iter().all(|y| all.binary_search(y).is_ok()));
            for y in all.iter().filter(|y| !seeded.contains(*y)) {
                assert!(y.len() > 3 && g.is_abelian_set(y), "q={q} {}: {y:?}", cd.id());
            }
        }
    }
}

#[test]
fn dihedral_supplement_occurs_at_q11_and_q13() {
    for q in [11u32, 13] {
        let f = field_of_order(q).unwrap();
        let inv = all_classes(&f).iter().find(|c| c.order == 2).unwrap().descriptor;
        let r = classify_subracks(&f, &inv).unwrap();
        assert_eq!(r.kind, ClassKind::Involutions);
        let sup: Vec<_> = r.families.iter().flat_map(|x| x.instances.iter()).filter(|i| i.supplement).collect();
        assert_eq!(sup.len(), 1);
        assert_eq!(sup[0].signature, vec![(1, 2), (3, 2)]);
        let mode = if q == 11 { OracleMode::Lattice } else { OracleMode::Seeded };
        let v = cross_validate(&f, &inv, mode).unwrap();
        assert!(v.passed);
        let c = v.coverage.iter().find(|c| c.supplement).unwrap();
        // every D12 contributes two such subracks, one per reflection class
        assert!(c.witnesses > 0 && c.witnesses % 2 == 0);
    }
}

#[test]
fn verdicts_agree_with_brute_force_minimality() {
    for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
        let f = field_of_order(q).unwrap();
        let t = tabulated_psl(&f).unwrap();
        for cd in non_identity(q) {
            let r = ConjRack::new(t.table(), &class_members(&t, &cd)).unwrap();
            let expected = if r.rack().is_abelian() {
                Verdict::Abelian
            } else if r.rack().is_minimal_nonabelian() {
                Verdict::MinimalNonAbelian
            } else {
                Verdict::Neither
            };
            let v = minimality_verdict(&f, &cd).unwrap();
            assert_eq!(v.verdict, expected, "q={q} {}: {}", cd.id(), v.reason);
        }
    }
}

#[test]
fn auto_mode_prefers_exhaustive_oracles() {
    let f = field_of_order(11).unwrap();
    assert_eq!(default_mode(&f, &non_identity(11)[0], 660), OracleMode::Lattice);
    let f = field_of_order(13).unwrap();
    assert_eq!(default_mode(&f, &non_identity(13)[0], 660), OracleMode::Seeded);
    let f = field_of_order(4).unwrap();
    assert_eq!(default_mode(&f, &non_identity(4)[0], 10), OracleMode::Seeded);
    let f = field_of_order(3).unwrap();
    assert_eq!(default_mode(&f, &non_identity(3)[0], 10), OracleMode::PowerSet);
}
