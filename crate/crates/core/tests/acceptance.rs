//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use pslrack::abelian::AbelianInvariants;
use pslrack::assoc::{ass_descriptor, h2_quandle};
use pslrack::config::Limits;
use pslrack::conjugacy::{all_classes, class_generates, count_classes_of_order, ClassType};
use pslrack::field::{field_of_order, Field};
use pslrack::fpgroup::{
    central_quotient, parse_presentation, perm_group_analysis, RegularGroup, A6_COVER_ROBERTSON, DEFAULT_COSET_LIMIT,
};
use pslrack::matrix::MatrixGroup;
use pslrack::taxonomy::minimality_verdict;
use pslrack::taxonomy::{brute_force_subracks, class_kind, cross_validate, ClassKind, OracleMode, Verdict};
use pslrack::verify::{verify_field, CheckStatus};

const Q_UP_TO_13: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];

type Outcome = Result<String, String>;
/// Class id, size, element order, generates.
type Row = (&'static str, u64, u64, bool);
type Criterion = (&'static str, fn() -> Outcome);

fn field(q: u32) -> Field {
    field_of_order(q).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the named checks of the invariant suite over the given fields and
/// fails unless each of them passed (skips count as failures here).
fn suite(qs: &[u32], names: &[&str]) -> Outcome {
    let limits = Limits::default();
    for &q in qs {
        let r = verify_field(&field(q), &limits);
        for name in names {
            let c = r.checks.iter().find(|c| c.name == *name).ok_or_else(|| format!("no check {name}"))?;
            ensure(c.status == CheckStatus::Passed, || format!("q={q} {name}: {:?} {}", c.status, c.detail))?;
        }
    }
    Ok(format!("{} over q in {qs:?}", names.join(", ")))
}

fn group_orders() -> Outcome {
    let t = Instant::now();
    for q in Q_UP_TO_13 {
        let f = field(q);
        let n = MatrixGroup::psl(&f).enumerate().map_err(|e| e.to_string())?.len() as u64;
        let q = q as u64;
        let expected = q * (q * q - 1) / f.e() as u64;
        ensure(n == expected, || format!("q={q}: {n} elements, expected {expected}"))?;
    }
    let dt = t.elapsed();
    ensure(dt < Duration::from_secs(5), || format!("took {dt:?}"))?;
    Ok(format!("enumerated in {dt:?}"))
}

fn small_tables() -> Outcome {
    let expected: [(u32, &[Row]); 2] = [
        (2, &[("unip:b=1", 3, 2, true), ("nonsplit:t=1", 2, 3, false)]),
        (3, &[("unip:b=1", 4, 3, true), ("unip:b=2", 4, 3, true), ("nonsplit:t=0", 3, 2, false)]),
    ];
    for (q, rows) in expected {
        let f = field(q);
        let classes = all_classes(&f);
        let got: Vec<(String, u64, u64, bool)> = classes
            .iter()
            .filter(|c| c.class_type != ClassType::Identity)
            .map(|c| (c.id.clone(), c.size, c.order, class_generates(&f, &c.descriptor).unwrap()))
            .collect();
        let want: Vec<(String, u64, u64, bool)> = rows.iter().map(|&(i, s, o, g)| (i.to_string(), s, o, g)).collect();
        ensure(got == want, || format!("q={q}: {got:?}"))?;
    }
    Ok("q = 2, 3 sizes, orders and generation".into())
}

fn counts_by_order() -> Outcome {
    suite(&Q_UP_TO_13, &["class_counts_by_order"])?;
    let n = count_classes_of_order(&field(13), 7);
    ensure(n == 3, || format!("q=13, m=7 gives {n}"))?;
    Ok("brute force agrees for q <= 13; q=13, m=7 gives 3".into())
}

fn cross_validation() -> Outcome {
    let f5 = field(5);
    let inv = all_classes(&f5).iter().find(|c| c.order == 2).unwrap().descriptor;
    let r = cross_validate(&f5, &inv, OracleMode::PowerSet).map_err(|e| e.to_string())?;
    ensure(r.passed && r.exhaustive, || format!("q=5 involutions: {r:?}"))?;
    let mut n = 0;
    for q in [4u32, 5, 7, 8, 9] {
        let f = field(q);
        for c in all_classes(&f).iter().filter(|c| c.class_type != ClassType::Identity) {
            let r = cross_validate(&f, &c.descriptor, OracleMode::Lattice).map_err(|e| e.to_string())?;
            ensure(r.passed, || format!("q={q} {}: {} unmatched", c.id, r.unmatched.len()))?;
            n += 1;
        }
    }
    Ok(format!("power set at q=5 involutions, lattice on {n} classes"))
}

fn minimality() -> Outcome {
    suite(&Q_UP_TO_13, &["minimality"])?;
    for q in Q_UP_TO_13 {
        let f = field(q);
        for c in all_classes(&f).iter().filter(|c| c.class_type == ClassType::Unipotent) {
            let v = minimality_verdict(&f, &c.descriptor).map_err(|e| e.to_string())?.verdict;
            let prime = matches!(q, 2 | 3 | 5 | 7 | 11 | 13);
            ensure((v == Verdict::MinimalNonAbelian) == prime, || format!("q={q} {}: {v:?}", c.id))?;
        }
    }
    let f8 = field(8);
    let c3 = all_classes(&f8).iter().find(|c| c.order == 3).unwrap().descriptor;
    ensure(class_kind(&f8, &c3).map_err(|e| e.to_string())? == ClassKind::OrderThree, || "kind".into())?;
    let v = minimality_verdict(&f8, &c3).map_err(|e| e.to_string())?.verdict;
    ensure(v == Verdict::MinimalNonAbelian, || format!("q=8 order 3: {v:?}"))?;
    let (subs, exhaustive) = brute_force_subracks(&f8, &c3, OracleMode::Lattice).map_err(|e| e.to_string())?;
    let size = all_classes(&f8).iter().find(|c| c.descriptor == c3).unwrap().size as usize;
    let proper: Vec<usize> = subs.iter().map(Vec::len).filter(|&s| s > 1 && s < size).collect();
    ensure(exhaustive && !proper.is_empty() && proper.iter().all(|&s| s == 2), || format!("sizes {proper:?}"))?;
    Ok(format!("rule = brute force; unipotent rule; q=8 order 3 has {} proper subracks, all of size 2", proper.len()))
}

fn a6_cover() -> Outcome {
    let g =
        RegularGroup::realize(&parse_presentation(A6_COVER_ROBERTSON).map_err(|e| e.to_string())?, DEFAULT_COSET_LIMIT)
            .map_err(|e| e.to_string())?;
    let a = perm_group_analysis(&g).map_err(|e| e.to_string())?;
    ensure(g.order() == 2160 && a.centre.len() == 6, || format!("order {}, centre {}", g.order(), a.centre.len()))?;
    let want: BTreeMap<usize, usize> = [(1, 6), (72, 12), (90, 9), (120, 4)].into_iter().collect();
    ensure(a.class_sizes == want, || format!("{:?}", a.class_sizes))?;
    let q6 = central_quotient(&g, &a, 6).map_err(|e| e.to_string())?;
    let mut s: Vec<usize> = q6.classes.iter().map(|c| c.size).collect();
    s.sort_unstable();
    ensure(s == [1, 40, 40, 45, 72, 72, 90], || format!("quotient classes {s:?}"))?;
    let fib: BTreeMap<(usize, usize), usize> =
        [((1, 1), 6), ((72, 72), 12), ((90, 90), 6), ((90, 45), 3), ((120, 40), 4)].into_iter().collect();
    ensure(q6.fibration(&a) == fib, || format!("{:?}", q6.fibration(&a)))?;
    let f9 = field(9);
    for c in all_classes(&f9).iter().filter(|c| c.class_type != ClassType::Identity) {
        let d = ass_descriptor(&f9, &c.descriptor).map_err(|e| e.to_string())?;
        let n = match c.order {
            3 => 3,
            2 => 2,
            _ => 1,
        };
        ensure(d.central_quotient_order == n, || format!("{}: n = {}", c.id, d.central_quotient_order))?;
    }
    Ok("order 2160, centre 6, classes, n=6 quotient, fibration, n(X)".into())
}

fn involution_centralizers() -> Outcome {
    suite(&[5, 7, 9, 11, 13], &["involution_centralizer"])?;
    let f7 = field(7);
    let inv = all_classes(&f7).iter().find(|c| c.order == 2).unwrap().descriptor;
    let h2 = h2_quandle(&f7, &inv).map_err(|e| e.to_string())?;
    ensure(h2 == AbelianInvariants::from_primary(vec![2, 2]), || format!("q=7: H2 = {h2}"))?;
    Ok("dihedral of order q +- 1 for q in 5..13 odd; q=7 H2 = C2 x C2".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("group orders", group_orders),
        ("class tables for q = 2, 3", small_tables),
        ("class sizes", || suite(&Q_UP_TO_13, &["class_partition"])),
        ("classes of a given order", counts_by_order),
        ("power maps", || suite(&Q_UP_TO_13, &["power_map"])),
        ("subgroup labels", || suite(&[2, 3, 4, 5, 7, 8, 9, 11], &["dickson_labels"])),
        ("subrack cross-validation", cross_validation),
        ("minimality", minimality),
        ("relative multiplier", || suite(&[5, 7, 8, 11, 13], &["relative_multiplier"])),
        ("A6 cover", a6_cover),
        ("involution centralizers", involution_centralizers),
        ("property suite", || {
            suite(&Q_UP_TO_13, &["rack_axioms", "char_poly_invariance", "reality", "quadratic_form_surjectivity"])
        }),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        match r {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} ({dt:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e} ({dt:.2?})", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
