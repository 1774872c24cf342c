//! The invariant suite: every closed-form claim about a given `q` checked
//! against brute force on the tabulated group.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::assoc::{
    involution_centralizer_check, mu_image_orders_at_random_points, relative_schur_multiplier,
    symbolic_relative_multiplier, BASEPOINT_SAMPLES,
};
use crate::config::Limits;
use crate::conjugacy::{
    all_classes, class_members, class_of, count_classes_of_order, is_real, power_class, tabulated_psl, ClassType,
};
use crate::field::Field;
use crate::finite::MAX_TABLE_ORDER;
use crate::matrix::MatrixGroup;
use crate::rack::ConjRack;
use crate::subgroups::all_subgroups_bounded;
use crate::taxonomy::{brute_force_verdict, cross_validate, default_mode, minimality_verdict, OracleMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub q: u32,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

type Outcome = Result<Option<String>, String>;
type Check = fn(&Field, &Limits) -> Outcome;

const CHECKS: &[(&str, Check)] = &[
    ("group_order", group_order),
    ("class_partition", class_partition),
    ("class_counts_by_order", class_counts_by_order),
    ("power_map", power_map),
    ("reality", reality),
    ("char_poly_invariance", char_poly_invariance),
    ("quadratic_form_surjectivity", quadratic_form_surjectivity),
    ("rack_axioms", rack_axioms),
    ("dickson_labels", dickson_labels),
    ("minimality", minimality),
    ("subrack_taxonomy", subrack_taxonomy),
    ("relative_multiplier", relative_multiplier),
    ("involution_centralizer", involution_centralizer),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs one named check, or `None` for an unknown name.
pub fn run_check(name: &str, field: &Field, limits: &Limits) -> Option<CheckResult> {
    CHECKS.iter().find(|c| c.0 == name).map(|(name, f)| timed(name, *f, field, limits))
}

fn timed(name: &'static str, f: Check, field: &Field, limits: &Limits) -> CheckResult {
    let t = Instant::now();
    let (status, detail) = match f(field, limits) {
        Ok(Some(d)) => (CheckStatus::Passed, d),
        Ok(None) => (CheckStatus::Skipped, "not applicable or beyond the configured bounds".into()),
        Err(e) => (CheckStatus::Failed, e),
    };
    CheckResult { name, status, detail, millis: t.elapsed().as_millis() }
}

/// Runs every check for the field. `Ok(None)` from a check means it does
/// not apply at this `q` or exceeds a bound.
pub fn verify_field(field: &Field, limits: &Limits) -> VerifyReport {
    let checks: Vec<CheckResult> = CHECKS.iter().map(|(name, f)| timed(name, *f, field, limits)).collect();
    let passed = checks.iter().all(|c| c.status != CheckStatus::Failed);
    VerifyReport { q: field.q(), checks, passed }
}

fn psl_order(field: &Field) -> u64 {
    let q = field.q() as u64;
    (q - 1) * q * (q + 1) / field.e() as u64
}

fn tabulable(field: &Field) -> bool {
    psl_order(field) <= MAX_TABLE_ORDER as u64
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group_order(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let n = MatrixGroup::psl(field).enumerate().map_err(|e| e.to_string())?.len() as u64;
    ensure(n == psl_order(field), || format!("enumerated {n}, formula {}", psl_order(field)))?;
    Ok(Some(format!("|PSL(2,{})| = {n}", field.q())))
}

fn class_partition(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let t = tabulated_psl(field).map_err(|e| e.to_string())?;
    let g = t.table();
    let classes = all_classes(field);
    let orbits = g.conjugacy_classes();
    ensure(orbits.len() == classes.len(), || format!("{} orbits, {} descriptors", orbits.len(), classes.len()))?;
    for orbit in &orbits {
        let cd = class_of(field, &t.matrix(orbit[0]));
        let info = classes.iter().find(|c| c.descriptor == cd).ok_or_else(|| format!("no descriptor {cd}"))?;
        ensure(info.size as usize == orbit.len(), || format!("{cd}: orbit {} vs formula {}", orbit.len(), info.size))?;
        ensure(info.order as usize == g.element_order(orbit[0]), || format!("{cd}: order mismatch"))?;
        ensure(orbit.iter().all(|&x| class_of(field, &t.matrix(x)) == cd), || format!("{cd}: orbit not uniform"))?;
    }
    Ok(Some(format!("{} classes match their conjugation orbits", classes.len())))
}

fn class_counts_by_order(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let t = tabulated_psl(field).map_err(|e| e.to_string())?;
    let g = t.table();
    let orders: Vec<usize> = g.conjugacy_classes().iter().map(|c| g.element_order(c[0])).collect();
    for m in 1..=(field.q() as u64 + 1) {
        let brute = orders.iter().filter(|&&o| o as u64 == m).count() as u64;
        let formula = count_classes_of_order(field, m);
        ensure(brute == formula, || format!("m={m}: brute force {brute}, formula {formula}"))?;
    }
    Ok(Some(format!("orders 1..={}", field.q() + 1)))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn power_map(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let t = tabulated_psl(field).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for info in all_classes(field).iter().filter(|c| c.class_type.is_semisimple()) {
        let members = class_members(&t, &info.descriptor);
        for m in (1..info.order).filter(|&m| gcd(m, info.order) == 1) {
            let symbolic = power_class(field, &info.descriptor, m as i64);
            for &x in &members {
                let y = class_of(field, &t.matrix(t.table().pow(x, m as i64)));
                ensure(y == symbolic, || format!("{}^{m}: element gives {y}, rule gives {symbolic}", info.id))?;
                checked += 1;
            }
        }
    }
    Ok(Some(format!("{checked} element powers")))
}

fn reality(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let t = tabulated_psl(field).map_err(|e| e.to_string())?;
    for info in all_classes(field).iter() {
        let members = class_members(&t, &info.descriptor);
        let brute = members.binary_search(&t.table().inv(members[0])).is_ok();
        ensure(brute == is_real(field, &info.descriptor), || format!("{}: brute force says real = {brute}", info.id))?;
    }
    Ok(Some("all classes".into()))
}

fn char_poly_invariance(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let grp = MatrixGroup::psl(field);
    let elems = grp.enumerate().map_err(|e| e.to_string())?;
    let polys: Vec<_> = elems.iter().map(|m| grp.char_poly(m)).collect();
    for h in &elems {
        for (g, p) in elems.iter().zip(&polys) {
            let c = grp.conjugate(h, g);
            ensure(grp.char_poly(&c) == *p, || format!("{} conjugated by {}", grp.format(g), grp.format(h)))?;
        }
    }
    Ok(Some(format!("{} conjugations", elems.len() * elems.len())))
}

fn quadratic_form_surjectivity(field: &Field, _: &Limits) -> Outcome {
    if field.q() > 64 {
        return Ok(None);
    }
    let f = field;
    let nonzero: BTreeSet<_> = f.nonzero().collect();
    let mut forms = 0;
    for t in f.elements() {
        for d in f.elements() {
            if f.elements().any(|x| f.add(f.sub(f.mul(x, x), f.mul(t, x)), d).is_zero()) {
                continue;
            }
            let mut values = BTreeSet::new();
            for y in f.elements() {
                for z in f.elements() {
                    if !(y.is_zero() && z.is_zero()) {
                        values.insert(f.add(f.sub(f.mul(y, y), f.mul(t, f.mul(y, z))), f.mul(d, f.mul(z, z))));
                    }
                }
            }
            ensure(values == nonzero, || format!("t={}, d={}: image misses values", f.format(t), f.format(d)))?;
            forms += 1;
        }
    }
    Ok(Some(format!("{forms} irreducible forms")))
}

fn rack_axioms(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let t = tabulated_psl(field).map_err(|e| e.to_string())?;
    let classes = all_classes(field);
    for info in classes.iter() {
        let r = ConjRack::new(t.table(), &class_members(&t, &info.descriptor)).map_err(|e| e.to_string())?;
        r.rack().check_axioms().map_err(|e| format!("{}: {e}", info.id))?;
        ensure(r.rack().is_quandle(), || format!("{}: not a quandle", info.id))?;
    }
    Ok(Some(format!("{} conjugation racks", classes.len())))
}

fn dickson_labels(field: &Field, limits: &Limits) -> Outcome {
    if psl_order(field) > limits.lattice_bound {
        return Ok(None);
    }
    let subs = all_subgroups_bounded(field, limits.lattice_bound).map_err(|e| e.to_string())?;
    for s in subs.iter() {
        ensure(s.label.order() == s.order as u64, || format!("{} has order {}", s.label, s.order))?;
        ensure(s.label.allowed_in(field), || format!("{} is not on the list for q = {}", s.label, field.q()))?;
    }
    Ok(Some(format!("{} subgroups, one primary label each", subs.len())))
}

fn minimality(field: &Field, _: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let mut n = 0;
    for info in all_classes(field).iter().filter(|c| c.class_type != ClassType::Identity) {
        let brute = brute_force_verdict(field, &info.descriptor).map_err(|e| e.to_string())?;
        let v = minimality_verdict(field, &info.descriptor).map_err(|e| e.to_string())?;
        ensure(v.verdict == brute, || format!("{}: rule {:?}, brute force {brute:?}", info.id, v.verdict))?;
        n += 1;
    }
    Ok(Some(format!("{n} classes")))
}

fn subrack_taxonomy(field: &Field, limits: &Limits) -> Outcome {
    if !tabulable(field) {
        return Ok(None);
    }
    let mut done = Vec::new();
    for info in all_classes(field).iter().filter(|c| c.class_type != ClassType::Identity) {
        let mode = default_mode(field, &info.descriptor, limits.lattice_bound);
        if mode == OracleMode::Seeded {
            continue;
        }
        let r = cross_validate(field, &info.descriptor, mode).map_err(|e| e.to_string())?;
        ensure(r.passed, || {
            format!("{}: {} unmatched, {} unwitnessed", info.id, r.unmatched.len(), r.unwitnessed().count())
        })?;
        done.push(info.id.clone());
    }
    if done.is_empty() {
        return Ok(None);
    }
    Ok(Some(format!("exhaustive match for {}", done.join(", "))))
}

fn relative_multiplier(field: &Field, _: &Limits) -> Outcome {
    let q = field.q() as u64;
    if q <= 3 || (q != 9 && q * q * q - q > MAX_TABLE_ORDER as u64) {
        return Ok(None);
    }
    for info in all_classes(field).iter().filter(|c| c.class_type != ClassType::Identity) {
        let cd = &info.descriptor;
        let computed = relative_schur_multiplier(field, cd).map_err(|e| e.to_string())?;
        let symbolic = symbolic_relative_multiplier(field, cd).map_err(|e| e.to_string())?;
        ensure(computed == symbolic, || format!("{}: computed {computed}, table {symbolic}", info.id))?;
        let samples =
            mu_image_orders_at_random_points(field, cd, BASEPOINT_SAMPLES, 0x5eed).map_err(|e| e.to_string())?;
        ensure(samples.windows(2).all(|w| w[0] == w[1]), || format!("{}: basepoint dependence {samples:?}", info.id))?;
    }
    Ok(Some("lift conjugacy agrees with the case table".into()))
}

fn involution_centralizer(field: &Field, _: &Limits) -> Outcome {
    if field.q().is_multiple_of(2) || field.q() < 5 || !tabulable(field) {
        return Ok(None);
    }
    let d = involution_centralizer_check(field).map_err(|e| e.to_string())?;
    ensure(d.is_dihedral && d.matches_q_pm_1, || format!("{d:?}"))?;
    Ok(Some(format!("dihedral of order {}", d.centralizer_order)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_of_order;

    #[test]
    fn small_fields_pass() {
        for q in [2u32, 3, 4, 5] {
            let r = verify_field(&field_of_order(q).unwrap(), &Limits::default());
            assert!(r.passed, "{r:#?}");
            assert_eq!(r.checks.len(), check_names().len());
        }
    }
}
