//! Subracks of the conjugacy classes of PSL(2,q).
//!
//! A subrack `Y` of a class `O` is a union of conjugacy classes of the
//! subgroup `H = <Y>`, and conversely every union of `H`-classes inside `O`
//! that generates `H` is a subrack. The families below list, for each kind of
//! class, which `H` from Dickson's list occur and which unions of their
//! classes land in `O`.
//!
//! Each family is instantiated at the given `q` into concrete instances: a
//! Dickson label for `<Y>` and the multiset of `(H-class size, element
//! order)` pairs that make up `Y`. Cross-validation compares those against
//! subracks found by brute force.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::conjugacy::{class_info, class_members, tabulated_psl, ClassDescriptor, ClassType, ConjugacyError};
use crate::field::{is_prime, Field};
use crate::finite::FiniteGroup;
use crate::matrix::MatrixError;
use crate::rack::{ConjRack, RackError, POWER_SET_LIMIT};
use crate::subgroups::{all_subgroups_bounded, DicksonLabel, Labeller, SubgroupError, DEFAULT_LATTICE_BOUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("the identity class has no subrack taxonomy")]
    IdentityClass,
    #[error("class of size {size} exceeds the power-set limit {limit}")]
    PowerSetTooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Rack(#[from] RackError),
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
}

/// Which list of families applies to a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Unipotent,
    /// The involutions, for odd `q`.
    Involutions,
    /// Elements of order three, for `p != 3`.
    OrderThree,
    /// Semisimple elements of order at least four.
    SemisimpleHigh,
}

pub fn class_kind(field: &Field, cd: &ClassDescriptor) -> Result<ClassKind, TaxonomyError> {
    let info = class_info(field, cd);
    Ok(match info.class_type {
        ClassType::Identity => return Err(TaxonomyError::IdentityClass),
        ClassType::Unipotent => ClassKind::Unipotent,
        _ if info.order == 2 => ClassKind::Involutions,
        _ if info.order == 3 => ClassKind::OrderThree,
        _ => ClassKind::SemisimpleHigh,
    })
}

/// The subgroup a family instance lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMatch {
    Exact(DicksonLabel),
    /// Any elementary abelian `p`-group.
    ElemAbelian,
}

impl LabelMatch {
    fn accepts<'a>(&self, mut labels: impl Iterator<Item = &'a DicksonLabel>) -> bool {
        match self {
            LabelMatch::Exact(l) => labels.any(|x| x == l),
            LabelMatch::ElemAbelian => labels.any(|x| matches!(x, DicksonLabel::ElemAbelianP { .. })),
        }
    }
}

impl std::fmt::Display for LabelMatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelMatch::Exact(l) => l.fmt(f),
            LabelMatch::ElemAbelian => f.write_str("E(p^r)"),
        }
    }
}

/// A concrete subrack shape at a given `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyInstance {
    pub params: String,
    pub subgroup: LabelMatch,
    /// Sorted `(class size in <Y>, element order)` pairs.
    pub signature: Vec<(usize, u64)>,
    pub size: usize,
    /// False when `Y` is the whole class.
    pub proper: bool,
    /// Not in the published list; found by exhaustive search.
    pub supplement: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubrackFamily {
    /// Position in the list for this kind of class, from 1.
    pub item: usize,
    pub subgroup: String,
    pub content: String,
    pub condition: String,
    pub condition_holds: bool,
    pub instances: Vec<FamilyInstance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Abelian,
    MinimalNonAbelian,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityVerdict {
    pub verdict: Verdict,
    pub rule: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubrackReport {
    pub class_id: String,
    pub q: u32,
    pub kind: ClassKind,
    pub class_size: usize,
    pub order: u64,
    pub families: Vec<SubrackFamily>,
    pub minimality: MinimalityVerdict,
}

struct Builder {
    class_size: usize,
    families: Vec<SubrackFamily>,
}

impl Builder {
    fn family(&mut self, subgroup: &str, content: &str, condition: &str, holds: bool) -> &mut SubrackFamily {
        let item = self.families.len() + 1;
        self.families.push(SubrackFamily {
            item,
            subgroup: subgroup.into(),
            content: content.into(),
            condition: condition.into(),
            condition_holds: holds,
            instances: Vec::new(),
        });
        self.families.last_mut().unwrap()
    }

    fn add(&mut self, params: String, subgroup: LabelMatch, signature: Vec<(usize, u64)>) {
        self.push(params, subgroup, signature, false)
    }

    fn add_supplement(&mut self, params: String, subgroup: LabelMatch, signature: Vec<(usize, u64)>) {
        self.push(params, subgroup, signature, true)
    }

    fn push(&mut self, params: String, subgroup: LabelMatch, mut signature: Vec<(usize, u64)>, supplement: bool) {
        signature.sort_unstable();
        let size = signature.iter().map(|s| s.0).sum();
        let proper = size < self.class_size;
        let fam = self.families.last_mut().unwrap();
        if fam.condition_holds {
            fam.instances.push(FamilyInstance { params, subgroup, signature, size, proper, supplement });
        }
    }
}

/// Arithmetic about `q` shared by the family lists.
struct Params {
    p: u64,
    q: u64,
    n: u32,
    e: u64,
    subfields: Vec<u64>,
}

impl Params {
    fn new(field: &Field) -> Params {
        Params {
            p: field.p() as u64,
            q: field.q() as u64,
            n: field.n(),
            e: field.e() as u64,
            subfields: field.subfield_orders().into_iter().map(u64::from).collect(),
        }
    }

    fn power_of(&self, q0: u64) -> bool {
        self.subfields.contains(&q0)
    }

    fn dihedral_ns(&self, divide: u64) -> Vec<u64> {
        let (a, b) = ((self.q - 1) / divide, (self.q + 1) / divide);
        (2..=b.max(a)).filter(|&m| (a > 0 && a % m == 0) || b % m == 0).collect()
    }
}

fn psl_unipotent_size(q0: u64) -> usize {
    ((q0 * q0 - 1) / if q0.is_multiple_of(2) { 1 } else { 2 }) as usize
}

/// Sizes of the involution classes of PGL(2,q0), `q0` odd: the one inside
/// PSL(2,q0) first.
fn pgl_involution_sizes(q0: u64) -> (usize, usize) {
    let split = (q0 * (q0 + 1) / 2) as usize;
    let nonsplit = (q0 * (q0 - 1) / 2) as usize;
    if (q0 - 1).is_multiple_of(4) {
        (split, nonsplit)
    } else {
        (nonsplit, split)
    }
}

/// Size of a semisimple class of order at least three in PSL(2,q0) or
/// PGL(2,q0).
fn semisimple_size(q0: u64, split: bool) -> usize {
    (if split { q0 * (q0 + 1) } else { q0 * (q0 - 1) }) as usize
}

pub fn classify_subracks(field: &Field, cd: &ClassDescriptor) -> Result<SubrackReport, TaxonomyError> {
    let kind = class_kind(field, cd)?;
    let info = class_info(field, cd);
    let mut b = Builder { class_size: info.size as usize, families: Vec::new() };
    let pr = Params::new(field);
    match kind {
        ClassKind::Unipotent => unipotent_families(&mut b, &pr),
        ClassKind::Involutions => involution_families(&mut b, &pr),
        ClassKind::OrderThree => order_three_families(field, &mut b, &pr),
        ClassKind::SemisimpleHigh => high_order_families(field, cd, info.order, &mut b, &pr),
    }
    Ok(SubrackReport {
        class_id: info.id.clone(),
        q: field.q(),
        kind,
        class_size: info.size as usize,
        order: info.order,
        families: b.families,
        minimality: minimality_verdict(field, cd)?,
    })
}

fn exact(l: DicksonLabel) -> LabelMatch {
    LabelMatch::Exact(l)
}

fn unipotent_families(b: &mut Builder, pr: &Params) {
    let (p, q, e) = (pr.p, pr.q, pr.e);
    let bound = ((q - 1) / e) as usize;
    b.family("E(p^r)", "non-empty subsets of {[1 bx; 0 1] : b a square}", "always", true);
    for k in 1..=bound {
        b.add(format!("size={k}"), LabelMatch::ElemAbelian, vec![(1, p); k]);
    }

    b.family("PSL(2,q0)", "a unipotent class of PSL(2,q0)", "q a power of q0", true);
    for &q0 in &pr.subfields {
        b.add(format!("q0={q0}"), exact(DicksonLabel::PSL2 { q0: q0 as u32 }), vec![(psl_unipotent_size(q0), p)]);
    }

    let odd = p != 2;
    b.family(
        "PGL(2,q0)",
        "the unipotent class of PGL(2,q0), the union of both unipotent classes of PSL(2,q0)",
        "q odd and a power of q0^2",
        odd,
    );
    for &q0 in &pr.subfields {
        if q0 * q0 <= q && pr.power_of(q0 * q0) {
            let s = psl_unipotent_size(q0);
            b.add(format!("q0={q0}"), exact(DicksonLabel::PSL2 { q0: q0 as u32 }), vec![(s, p), (s, p)]);
        }
    }

    b.family("D2n", "the involutions of D2n", "p = 2, n | q-1 or n | q+1", p == 2);
    for m in pr.dihedral_ns(1) {
        b.add(format!("n={m}"), exact(DicksonLabel::Dihedral { order: 2 * m }), vec![(m as usize, 2)]);
    }

    b.family("A5", "the involutions of A5", "p = 2 and q a power of 4", p == 2 && pr.n.is_multiple_of(2));
    b.add(String::new(), exact(DicksonLabel::A5), vec![(15, 2)]);

    b.family("A4", "one class of 3-cycles of A4", "p = 3", p == 3);
    b.add(String::new(), exact(DicksonLabel::A4), vec![(4, 3)]);

    let p3_even = p == 3 && pr.n.is_multiple_of(2);
    b.family("A4", "both classes of 3-cycles of A4", "p = 3 and q a power of 9", p3_even);
    b.add(String::new(), exact(DicksonLabel::A4), vec![(4, 3), (4, 3)]);

    b.family("A5", "the 3-cycles of A5", "p = 3 and q a power of 9", p3_even);
    b.add(String::new(), exact(DicksonLabel::A5), vec![(20, 3)]);
}

fn involution_families(b: &mut Builder, pr: &Params) {
    let (p, q) = (pr.p, pr.q);
    b.family("C2", "a single involution", "always", true);
    b.add(String::new(), exact(DicksonLabel::Cyclic { n: 2 }), vec![(1, 2)]);

    b.family(
        "D2n",
        "all involutions of D2n, or for even n the two non-central classes",
        "n >= 2, n | (q-1)/2 or n | (q+1)/2",
        true,
    );
    for m in pr.dihedral_ns(2) {
        let d = exact(DicksonLabel::Dihedral { order: 2 * m });
        let m = m as usize;
        if m % 2 == 1 {
            b.add(format!("n={m}"), d, vec![(m, 2)]);
        } else {
            b.add(format!("n={m}, all"), d, vec![(1, 2), (m / 2, 2), (m / 2, 2)]);
            b.add(format!("n={m}, non-central"), d, vec![(m / 2, 2), (m / 2, 2)]);
            // for n = 2 mod 4 the centre and one class of n/2 reflections
            // already generate D2n
            if m % 4 == 2 && m >= 6 {
                b.add_supplement(format!("n={m}, centre and one class"), d, vec![(1, 2), (m / 2, 2)]);
            }
        }
    }

    let s4 = (q * q - 1) % 16 == 0;
    b.family("S4", "(1 2)^S4, or (1 2)^S4 with (1 2)(3 4)^S4", "16 | q^2-1", s4);
    b.add("transpositions".into(), exact(DicksonLabel::S4), vec![(6, 2)]);
    b.add("all involutions".into(), exact(DicksonLabel::S4), vec![(3, 2), (6, 2)]);

    b.family("A5", "the involutions of A5", "5 | q^2-1", (q * q - 1) % 5 == 0);
    b.add(String::new(), exact(DicksonLabel::A5), vec![(15, 2)]);

    b.family("A:C2", "the coset A x| {-1}", "4 | q-1", (q - 1) % 4 == 0);
    for k in 1..=pr.n {
        let a = p.pow(k);
        b.add(format!("|A|={a}"), exact(DicksonLabel::SemidirectAC { a, c: 2 }), vec![(a as usize, 2)]);
    }

    b.family("PSL(2,q0)", "the involutions of PSL(2,q0)", "q0 > 4, q a power of q0", true);
    for &q0 in pr.subfields.iter().filter(|&&q0| q0 > 4) {
        let (inner, _) = pgl_involution_sizes(q0);
        b.add(format!("q0={q0}"), exact(DicksonLabel::PSL2 { q0: q0 as u32 }), vec![(inner, 2)]);
    }

    b.family(
        "PGL(2,q0)",
        "the involutions of PGL(2,q0) outside PSL(2,q0), or all involutions of PGL(2,q0)",
        "q0 > 4, q a power of q0^2",
        true,
    );
    for &q0 in pr.subfields.iter().filter(|&&q0| q0 > 4 && q0 * q0 <= q && pr.power_of(q0 * q0)) {
        let (inner, outer) = pgl_involution_sizes(q0);
        let l = exact(DicksonLabel::PGL2 { q0: q0 as u32 });
        b.add(format!("q0={q0}, outer"), l, vec![(outer, 2)]);
        b.add(format!("q0={q0}, all"), l, vec![(inner, 2), (outer, 2)]);
    }
}

/// `A x| C` sizes: the `F_q0`-subspaces of `F_q`, `q0` the field generated
/// by the diagonal entry.
fn affine_sizes(pr: &Params, q0: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut a = q0;
    while a <= pr.q {
        if pr.power_of(a) {
            out.push(a);
        }
        a *= q0;
    }
    out
}

fn order_three_families(field: &Field, b: &mut Builder, pr: &Params) {
    let (p, q) = (pr.p, pr.q);
    b.family("C3", "a single element", "always", true);
    b.add(String::new(), exact(DicksonLabel::Cyclic { n: 3 }), vec![(1, 3)]);
    b.family("C3", "{y, y^-1}", "always", true);
    b.add(String::new(), exact(DicksonLabel::Cyclic { n: 3 }), vec![(1, 3), (1, 3)]);

    b.family(
        "A4",
        "(1 2 3)^A4, or (1 2 3)^A4 with (1 3 2)^A4",
        "q odd or a power of 4",
        p != 2 || pr.n.is_multiple_of(2),
    );
    b.add("one class".into(), exact(DicksonLabel::A4), vec![(4, 3)]);
    b.add("two classes".into(), exact(DicksonLabel::A4), vec![(4, 3), (4, 3)]);

    b.family("A5", "the 3-cycles of A5", "5 | q^2-1", (q * q - 1) % 5 == 0);
    b.add(String::new(), exact(DicksonLabel::A5), vec![(20, 3)]);

    b.family("A:C3", "A x| {z}, or A x| {z, z^-1}, z of order 3", "3 | q-1", (q - 1) % 3 == 0);
    if (q - 1) % 3 == 0 {
        let z = field.exp((q - 1) / 3);
        let q0 = field.generated_subfield_order(z) as u64;
        for a in affine_sizes(pr, q0) {
            let l = exact(DicksonLabel::SemidirectAC { a, c: 3 });
            b.add(format!("|A|={a}, one coset"), l, vec![(a as usize, 3)]);
            b.add(format!("|A|={a}, two cosets"), l, vec![(a as usize, 3), (a as usize, 3)]);
        }
    }

    b.family("PSL(2,q0)", "the elements of order 3 of PSL(2,q0)", "q0 > 4, q a power of q0", true);
    for &q0 in pr.subfields.iter().filter(|&&q0| q0 > 4) {
        let e0 = if q0 % 2 == 0 { 1 } else { 2 };
        let split = ((q0 - 1) / e0) % 3 == 0;
        b.add(format!("q0={q0}"), exact(DicksonLabel::PSL2 { q0: q0 as u32 }), vec![(semisimple_size(q0, split), 3)]);
    }
}

fn high_order_families(field: &Field, cd: &ClassDescriptor, o: u64, b: &mut Builder, pr: &Params) {
    let q = pr.q;
    b.family("Co", "{y} or {y, y^-1}", "always", true);
    b.add("{y}".into(), exact(DicksonLabel::Cyclic { n: o }), vec![(1, o)]);
    b.add("{y, y^-1}".into(), exact(DicksonLabel::Cyclic { n: o }), vec![(1, o), (1, o)]);

    b.family("S4", "(1 2 3 4)^S4", "16 | q^2-1 and o = 4", (q * q - 1).is_multiple_of(16) && o == 4);
    b.add(String::new(), exact(DicksonLabel::S4), vec![(6, 4)]);

    b.family("A5", "(1 2 3 4 5)^A5", "5 | q^2-1 and o = 5", (q * q - 1).is_multiple_of(5) && o == 5);
    b.add(String::new(), exact(DicksonLabel::A5), vec![(12, 5)]);

    let split = matches!(cd, ClassDescriptor::Split { .. });
    b.family("A:C", "A x| {z}, or A x| {z, z^-1}, C = <z>", "class split semisimple", split);
    if let ClassDescriptor::Split { a } = *cd {
        let q0 = field.generated_subfield_order(a) as u64;
        for s in affine_sizes(pr, q0) {
            let l = exact(DicksonLabel::SemidirectAC { a: s, c: o });
            b.add(format!("|A|={s}, one coset"), l, vec![(s as usize, o)]);
            b.add(format!("|A|={s}, two cosets"), l, vec![(s as usize, o), (s as usize, o)]);
        }
    }

    let d = class_info(field, cd).char_poly.d;
    b.family(
        "PGL(2,q0)",
        "the class of PGL(2,q0) with the same [chi]; it lies in PSL(2,q0) when d is a square there",
        "[chi] = x^2+x+d with d in GF(q0), q0 > 4",
        true,
    );
    for &q0 in pr.subfields.iter().filter(|&&q0| q0 > 4) {
        if !field.in_subfield(d, q0 as u32) {
            continue;
        }
        let sub: Vec<_> = field.subfield_elements(q0 as u32).expect("subfield");
        let square = sub.iter().any(|&y| field.mul(y, y) == d);
        // x^2 - x + d splits over GF(q0)
        let splits = sub.iter().any(|&y| field.add(field.sub(field.mul(y, y), y), d).is_zero());
        let label = if square { DicksonLabel::PSL2 { q0: q0 as u32 } } else { DicksonLabel::PGL2 { q0: q0 as u32 } };
        b.add(format!("q0={q0}"), exact(label), vec![(semisimple_size(q0, splits), o)]);
    }
}

/// Abelian, minimal non-abelian, or neither, decided from `q` and the class
/// alone.
pub fn minimality_verdict(field: &Field, cd: &ClassDescriptor) -> Result<MinimalityVerdict, TaxonomyError> {
    let kind = class_kind(field, cd)?;
    let (p, q, n) = (field.p() as u64, field.q() as u64, field.n());
    let v = |verdict, rule: &str, reason: String| MinimalityVerdict { verdict, rule: rule.into(), reason };
    Ok(match kind {
        ClassKind::Unipotent => {
            let rule = "unipotent: minimal non-abelian iff q is prime";
            if n == 1 {
                v(Verdict::MinimalNonAbelian, rule, format!("q = {q} is prime"))
            } else {
                v(
                    Verdict::Neither,
                    rule,
                    format!("q = {q} is not prime; a unipotent class of PSL(2,{p}) is a proper non-abelian subrack"),
                )
            }
        }
        ClassKind::Involutions => {
            let rule = "involutions, q odd: abelian iff q = 3, otherwise neither";
            if q == 3 {
                v(Verdict::Abelian, rule, "q = 3".into())
            } else {
                v(
                    Verdict::Neither,
                    rule,
                    format!("a dihedral subgroup gives a proper non-abelian subrack of size {}", q.div_ceil(2)),
                )
            }
        }
        ClassKind::OrderThree => {
            let rule = "order three, p != 3: abelian iff q = 2; minimal non-abelian iff q = 2^m with m an odd prime";
            if q == 2 {
                v(Verdict::Abelian, rule, "q = 2".into())
            } else if p == 2 && n % 2 == 1 && is_prime(n) {
                v(Verdict::MinimalNonAbelian, rule, format!("q = 2^{n} with {n} an odd prime"))
            } else if p != 2 || n % 2 == 0 {
                v(
                    Verdict::Neither,
                    rule,
                    "q is odd or a power of 4, so (1 2 3)^A4 is a proper non-abelian subrack".into(),
                )
            } else {
                v(Verdict::Neither, rule, format!("q = 2^{n} with {n} odd and composite"))
            }
        }
        ClassKind::SemisimpleHigh => high_order_verdict(field, cd)?,
    })
}

fn high_order_verdict(field: &Field, cd: &ClassDescriptor) -> Result<MinimalityVerdict, TaxonomyError> {
    let info = class_info(field, cd);
    let (q, o) = (field.q() as u64, info.order);
    let rule = "order >= 4: minimal non-abelian iff non-split, d outside every proper subfield, \
                no proper S4 with o = 4, no proper A5 with o = 5";
    let mk = |verdict, reason: String| MinimalityVerdict { verdict, rule: rule.into(), reason };
    if !matches!(cd, ClassDescriptor::NonSplit { .. }) {
        return Ok(mk(Verdict::Neither, "the class is split semisimple".into()));
    }
    let d = info.char_poly.d;
    let proper: Vec<u32> = field.subfield_orders().into_iter().filter(|&q0| q0 < field.q()).collect();
    if let Some(q0) = proper.iter().find(|&&q0| field.in_subfield(d, q0)) {
        return Ok(mk(Verdict::Neither, format!("d = {} lies in GF({q0})", field.format(d))));
    }
    if (q * q - 1) % 16 == 0 && o == 4 {
        return Ok(mk(Verdict::Neither, "16 | q^2-1 and o = 4: (1 2 3 4)^S4 is a proper subrack".into()));
    }
    // A5 is the whole group only for q in {4, 5}
    if (q * q - 1) % 5 == 0 && o == 5 && q != 4 {
        return Ok(mk(Verdict::Neither, "5 | q^2-1 and o = 5: (1 2 3 4 5)^A5 is a proper subrack".into()));
    }
    Ok(mk(Verdict::MinimalNonAbelian, "all four conditions hold".into()))
}

/// The verdict read off the conjugation rack of the tabulated class.
pub fn brute_force_verdict(field: &Field, cd: &ClassDescriptor) -> Result<Verdict, TaxonomyError> {
    class_kind(field, cd)?;
    let t = tabulated_psl(field)?;
    let r = ConjRack::new(t.table(), &class_members(&t, cd))?;
    Ok(if r.rack().is_abelian() {
        Verdict::Abelian
    } else if r.rack().is_minimal_nonabelian() {
        Verdict::MinimalNonAbelian
    } else {
        Verdict::Neither
    })
}

/// Brute-force source of subracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// Unions of classes of every subgroup; exhaustive.
    Lattice,
    /// Every subset of the class; exhaustive, small classes only.
    PowerSet,
    /// Closures of up to three seeds; may miss subracks.
    Seeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnmatchedSubrack {
    pub size: usize,
    pub subgroup: String,
    pub signature: Vec<(usize, u64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceCoverage {
    pub item: usize,
    pub params: String,
    pub proper: bool,
    pub supplement: bool,
    /// Brute-force subracks matching this instance.
    pub witnesses: usize,
    /// Of those, the ones assigned to this instance (first match wins).
    pub assigned: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub class_id: String,
    pub q: u32,
    pub mode: OracleMode,
    pub exhaustive: bool,
    pub subracks: usize,
    pub unmatched: Vec<UnmatchedSubrack>,
    pub coverage: Vec<InstanceCoverage>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn unwitnessed(&self) -> impl Iterator<Item = &InstanceCoverage> {
        self.coverage.iter().filter(|c| c.witnesses == 0)
    }
}

/// Picks the strongest feasible oracle.
pub fn default_mode(field: &Field, cd: &ClassDescriptor, lattice_bound: u64) -> OracleMode {
    let q = field.q() as u64;
    let order = (q - 1) * q * (q + 1) / field.e() as u64;
    if order <= lattice_bound {
        OracleMode::Lattice
    } else if class_info(field, cd).size as usize <= POWER_SET_LIMIT {
        OracleMode::PowerSet
    } else {
        OracleMode::Seeded
    }
}

/// Every subrack of the class, as sorted element indices of the tabulated
/// group, with a flag telling whether the list is exhaustive.
pub fn brute_force_subracks(
    field: &Field,
    cd: &ClassDescriptor,
    mode: OracleMode,
) -> Result<(Vec<Vec<usize>>, bool), TaxonomyError> {
    let t = tabulated_psl(field)?;
    let g = t.table();
    let members = class_members(&t, cd);
    Ok(match mode {
        OracleMode::Lattice => (lattice_subracks(field, g, &members)?, true),
        OracleMode::PowerSet => {
            if members.len() > POWER_SET_LIMIT {
                return Err(TaxonomyError::PowerSetTooLarge { size: members.len(), limit: POWER_SET_LIMIT });
            }
            let r = ConjRack::new(g, &members)?;
            let subs = r.rack().enumerate_subracks(members.len())?;
            (subs.iter().map(|s| sorted(r.to_group(s))).collect(), true)
        }
        OracleMode::Seeded => {
            let r = ConjRack::new(g, &members)?;
            let subs = r.rack().subracks_by_seeds(3);
            (subs.iter().map(|s| sorted(r.to_group(s))).collect(), false)
        }
    })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn lattice_subracks(field: &Field, g: &FiniteGroup, members: &[usize]) -> Result<Vec<Vec<usize>>, TaxonomyError> {
    let in_class = g.bitset(members);
    let mut out = Vec::new();
    for h in all_subgroups_bounded(field, DEFAULT_LATTICE_BOUND)?.iter() {
        let inside: Vec<usize> = h.elements.iter().copied().filter(|&x| in_class.contains(x)).collect();
        if inside.is_empty() {
            continue;
        }
        let classes = g.classes_under(&inside, &h.generators);
        assert!(classes.len() < 24, "too many classes to combine");
        for mask in 1u32..(1 << classes.len()) {
            let y: Vec<usize> = sorted(
                classes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).flat_map(|(_, c)| c.clone()).collect(),
            );
            if g.closure(&y).len() == h.order {
                out.push(y);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Matches brute-force subracks against the families in both directions.
pub fn cross_validate(
    field: &Field,
    cd: &ClassDescriptor,
    mode: OracleMode,
) -> Result<ValidationReport, TaxonomyError> {
    let report = classify_subracks(field, cd)?;
    let (subracks, exhaustive) = brute_force_subracks(field, cd, mode)?;
    let t = tabulated_psl(field)?;
    let g = t.table();
    let mut labeller = Labeller::new(field);
    let mut label_cache: HashMap<Vec<usize>, (Vec<DicksonLabel>, Vec<usize>)> = HashMap::new();

    let instances: Vec<(usize, &FamilyInstance)> =
        report.families.iter().flat_map(|f| f.instances.iter().map(move |i| (f.item, i))).collect();
    let mut witnesses = vec![0usize; instances.len()];
    let mut assigned = vec![0usize; instances.len()];
    let mut unmatched = Vec::new();

    for y in &subracks {
        let h = g.closure(y);
        if !label_cache.contains_key(&h) {
            let (l, also) = labeller.classify(g, &h)?;
            let labels: Vec<DicksonLabel> = std::iter::once(l).chain(also).collect();
            label_cache.insert(h.clone(), (labels, g.generating_set(&h)));
        }
        let (labels, gens) = &label_cache[&h];
        let mut sig: Vec<(usize, u64)> =
            g.classes_under(y, gens).iter().map(|c| (c.len(), g.element_order(c[0]) as u64)).collect();
        sig.sort_unstable();
        let mut first = None;
        for (k, (_, inst)) in instances.iter().enumerate() {
            if inst.signature == sig && inst.subgroup.accepts(labels.iter()) {
                witnesses[k] += 1;
                first.get_or_insert(k);
            }
        }
        match first {
            Some(k) => assigned[k] += 1,
            None => unmatched.push(UnmatchedSubrack {
                size: y.len(),
                subgroup: labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" = "),
                signature: sig,
            }),
        }
    }

    let coverage: Vec<InstanceCoverage> = instances
        .iter()
        .enumerate()
        .map(|(k, (item, inst))| InstanceCoverage {
            item: *item,
            params: inst.params.clone(),
            proper: inst.proper,
            supplement: inst.supplement,
            witnesses: witnesses[k],
            assigned: assigned[k],
        })
        .collect();
    let all_witnessed = coverage.iter().all(|c| c.witnesses > 0);
    Ok(ValidationReport {
        class_id: report.class_id,
        q: field.q(),
        mode,
        exhaustive,
        subracks: subracks.len(),
        passed: unmatched.is_empty() && (!exhaustive || all_witnessed),
        unmatched,
        coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::all_classes;
    use crate::field::field_of_order;

    fn class_of_order(f: &Field, o: u64) -> ClassDescriptor {
        all_classes(f).iter().find(|c| c.order == o).unwrap().descriptor
    }

    #[test]
    fn unipotent_families_at_q5() {
        let f = field_of_order(5).unwrap();
        let r = classify_subracks(&f, &ClassDescriptor::Unipotent { b: crate::field::Elem(1) }).unwrap();
        let live: Vec<_> = r.families.iter().filter(|x| x.condition_holds).map(|x| x.item).collect();
        assert_eq!(live, vec![1, 2, 3]);
        assert_eq!(r.families[0].instances.len(), 2);
        // the PGL item has no q0 with q a power of q0^2
        assert!(r.families[2].instances.is_empty());
        assert_eq!(r.families[1].instances.len(), 1);
        assert!(!r.families[1].instances[0].proper);
        assert_eq!(r.minimality.verdict, Verdict::MinimalNonAbelian);
    }

    #[test]
    fn involution_families_at_q9() {
        let f = field_of_order(9).unwrap();
        let r = classify_subracks(&f, &class_of_order(&f, 2)).unwrap();
        let holds = |i: usize| r.families[i - 1].condition_holds;
        assert!(holds(2) && holds(3) && holds(4) && holds(5));
        let ns: Vec<_> = r.families[1].instances.iter().map(|i| i.params.clone()).collect();
        assert!(ns.contains(&"n=4, all".to_string()) && ns.contains(&"n=5".to_string()));
        assert_eq!(r.minimality.verdict, Verdict::Neither);
    }

    #[test]
    fn order_three_at_q8_has_only_cyclic_items() {
        let f = field_of_order(8).unwrap();
        let r = classify_subracks(&f, &class_of_order(&f, 3)).unwrap();
        let proper_items: Vec<_> =
            r.families.iter().filter(|x| x.instances.iter().any(|i| i.proper)).map(|x| x.item).collect();
        assert_eq!(proper_items, vec![1, 2]);
        assert_eq!(r.minimality.verdict, Verdict::MinimalNonAbelian);
    }

    #[test]
    fn identity_is_rejected() {
        let f = field_of_order(5).unwrap();
        assert_eq!(classify_subracks(&f, &ClassDescriptor::Identity).unwrap_err(), TaxonomyError::IdentityClass);
    }

    #[test]
    fn involutions_at_q5_against_power_set() {
        let f = field_of_order(5).unwrap();
        let cd = class_of_order(&f, 2);
        let r = cross_validate(&f, &cd, OracleMode::PowerSet).unwrap();
        assert!(r.passed, "{r:#?}");
        let l = cross_validate(&f, &cd, OracleMode::Lattice).unwrap();
        assert_eq!(l.subracks, r.subracks);
    }
}
