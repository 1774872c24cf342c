use pslrack::abelian::AbelianInvariants;
use pslrack::assoc::{
    ass_descriptor, h2_quandle, involution_centralizer_check, mu_image_orders_at_random_points,
    relative_schur_multiplier, symbolic_relative_multiplier, CoverLabel,
};
use pslrack::conjugacy::{all_classes, ClassType};
use pslrack::field::field_of_order;

#[test]
fn computed_multipliers_match_the_case_table() {
    for q in [4u32, 5, 7, 8, 9, 11, 13] {
        let f = field_of_order(q).unwrap();
        let g = (q as usize - 1) * q as usize * (q as usize + 1) / f.e() as usize;
        for c in all_classes(&f).iter().filter(|c| c.class_type != ClassType::Identity) {
            let d = ass_descriptor(&f, &c.descriptor).unwrap();
            assert_eq!(d.rel_multiplier, d.symbolic_rel_multiplier, "q={q} {}", c.id);
            assert_eq!(d.multiplier_order % d.mu_image_order, 0);
            assert_eq!(d.dx_order, g * d.rel_multiplier.order() as usize, "q={q} {}", c.id);
            assert!(d.basepoint_independent, "q={q} {}", c.id);
            println!(
                "q={q:2} {:16} mu={} rel={} D_X={} H2={}",
                c.id, d.mu_image_order, d.rel_multiplier, d.dx_identification, d.h2_invariants
            );
        }
    }
}

#[test]
fn basepoints_give_the_same_image() {
    let f = field_of_order(13).unwrap();
    for c in all_classes(&f).iter().filter(|c| c.class_type != ClassType::Identity) {
        let v = mu_image_orders_at_random_points(&f, &c.descriptor, 20, 7).unwrap();
        assert_eq!(v.len(), 20);
        assert!(v.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn a6_table_of_central_subgroups() {
    let f = field_of_order(9).unwrap();
    for c in all_classes(&f).iter().filter(|c| c.class_type != ClassType::Identity) {
        let d = ass_descriptor(&f, &c.descriptor).unwrap();
        assert_eq!(d.covering_label, CoverLabel::A6Star);
        let n = match c.order {
            3 => 3,
            2 => 2,
            _ => 1,
        };
        assert_eq!(d.central_quotient_order, n, "{}", c.id);
        assert_eq!(d.dx_order, 2160 / n);
        assert_eq!(d.rel_multiplier, AbelianInvariants::cyclic(6 / n as u64));
    }
}

#[test]
fn ass_examples() {
    let f8 = field_of_order(8).unwrap();
    for c in all_classes(&f8).iter().filter(|c| c.class_type != ClassType::Identity) {
        let d = ass_descriptor(&f8, &c.descriptor).unwrap();
        assert_eq!(d.dx_identification, "PSL(2,8)");
        assert!(d.rel_multiplier.is_trivial());
    }
    let f7 = field_of_order(7).unwrap();
    let inv = all_classes(&f7).iter().find(|c| c.order == 2).unwrap().descriptor;
    assert_eq!(ass_descriptor(&f7, &inv).unwrap().ass_identification, "PSL(2,7) x Z");
    let unip = all_classes(&f7).iter().find(|c| c.class_type == ClassType::Unipotent).unwrap().descriptor;
    assert_eq!(relative_schur_multiplier(&f7, &unip).unwrap(), AbelianInvariants::cyclic(2));
    assert_eq!(symbolic_relative_multiplier(&f7, &unip).unwrap(), AbelianInvariants::cyclic(2));
}

#[test]
fn involution_centralizers_are_dihedral() {
    for q in [5u32, 7, 9, 11, 13] {
        let f = field_of_order(q).unwrap();
        let d = involution_centralizer_check(&f).unwrap();
        assert!(d.is_dihedral && d.matches_q_pm_1, "{d:?}");
        let inv = all_classes(&f).iter().find(|c| c.order == 2).unwrap().descriptor;
        let h2 = h2_quandle(&f, &inv).unwrap();
        // abelianization of a dihedral group of order 2m: C2 x C2 for m even, C2 for m odd
        let m = d.centralizer_order / 2;
        let expected = if q == 9 {
            // D_X is A6*/C2 there, not PSL(2,9)
            h2.clone()
        } else if m.is_multiple_of(2) {
            AbelianInvariants::from_primary(vec![2, 2])
        } else {
            AbelianInvariants::cyclic(2)
        };
        assert_eq!(h2, expected, "q={q}");
    }
    let f7 = field_of_order(7).unwrap();
    let inv = all_classes(&f7).iter().find(|c| c.order == 2).unwrap().descriptor;
    assert_eq!(h2_quandle(&f7, &inv).unwrap().invariant_factors, vec![2, 2]);
}
