//! Conjugacy classes of PSL(2,q) and PGL(2,q), described symbolically.
//!
//! A non-trivial class of PSL(2,q) is one of
//!
//! * `Split { a }`: elements conjugate to `[a 0; 0 1]`, `a` a non-zero
//!   square other than 1, taken up to `a <-> a^-1`;
//! * `Unipotent { b }`: conjugates of `[1 b; 0 1]`, `b` up to squares;
//! * `NonSplit { t }`: conjugates of `[0 1; -1 t]` with `x^2 - t x + 1`
//!   irreducible, `t` up to sign.
//!
//! Parameters are stored as the least member of their equivalence class in
//! the field's total order, so descriptors compare structurally.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::field::{Elem, Field};
use crate::finite::FiniteGroup;
use crate::matrix::{CharPolyClass, Mat2, MatrixError, MatrixGroup, TabulatedGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjugacyError {
    #[error("malformed class id {0:?}")]
    BadId(String),
    #[error("{0:?} does not name a conjugacy class of PSL(2,{1})")]
    NoSuchClass(String, u32),
    #[error("PGL(2,{q}) class {class} is disjoint from PSL(2,{q})")]
    DisjointFromPsl { class: String, q: u32 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ClassDescriptor {
    Identity,
    Split { a: Elem },
    Unipotent { b: Elem },
    NonSplit { t: Elem },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassType {
    Identity,
    Split,
    Unipotent,
    NonSplit,
}

impl ClassType {
    pub fn is_semisimple(self) -> bool {
        matches!(self, ClassType::Split | ClassType::NonSplit)
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassType::Identity => "identity",
            ClassType::Split => "split semisimple",
            ClassType::Unipotent => "unipotent",
            ClassType::NonSplit => "non-split semisimple",
        }
    }
}

impl ClassDescriptor {
    pub fn class_type(&self) -> ClassType {
        match self {
            ClassDescriptor::Identity => ClassType::Identity,
            ClassDescriptor::Split { .. } => ClassType::Split,
            ClassDescriptor::Unipotent { .. } => ClassType::Unipotent,
            ClassDescriptor::NonSplit { .. } => ClassType::NonSplit,
        }
    }

    /// Canonical textual id: `identity`, `split:a=2`, `unip:b=1`,
    /// `nonsplit:t=3`, with field elements written as their index in the
    /// total order.
    pub fn id(&self) -> String {
        match self {
            ClassDescriptor::Identity => "identity".into(),
            ClassDescriptor::Split { a } => format!("split:a={a}"),
            ClassDescriptor::Unipotent { b } => format!("unip:b={b}"),
            ClassDescriptor::NonSplit { t } => format!("nonsplit:t={t}"),
        }
    }

    /// Parses an id and checks that it names a class over `field`.
    pub fn parse_id(field: &Field, id: &str) -> Result<ClassDescriptor, ConjugacyError> {
        let bad = || ConjugacyError::BadId(id.to_string());
        let cd = if id == "identity" {
            ClassDescriptor::Identity
        } else {
            let (kind, rest) = id.split_once(':').ok_or_else(bad)?;
            let (key, value) = rest.split_once('=').ok_or_else(bad)?;
            let v: u32 = value.trim().parse().map_err(|_| bad())?;
            let x = field.elem(v).ok_or_else(|| ConjugacyError::NoSuchClass(id.into(), field.q()))?;
            match (kind, key) {
                ("split", "a") => ClassDescriptor::Split { a: x },
                ("unip", "b") => ClassDescriptor::Unipotent { b: x },
                ("nonsplit", "t") => ClassDescriptor::NonSplit { t: x },
                _ => return Err(bad()),
            }
        };
        if canonicalize(field, cd) == Some(cd) {
            Ok(cd)
        } else {
            Err(ConjugacyError::NoSuchClass(id.into(), field.q()))
        }
    }

    /// Conventional name such as `O_{2,a}` with the parameter in polynomial
    /// notation.
    pub fn label(&self, field: &Field) -> String {
        match self {
            ClassDescriptor::Identity => "1".into(),
            ClassDescriptor::Split { a } => format!("O_{{2,{}}}", field.format(*a)),
            ClassDescriptor::Unipotent { b } => format!("O_{{1,{}}}", field.format(*b)),
            ClassDescriptor::NonSplit { t } => format!("O_{{0,{}}}", field.format(*t)),
        }
    }
}

impl fmt::Display for ClassDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Whether `t = x + 1/x` for some non-zero `x`, i.e. `x^2 - t x + 1` has a
/// root. Returns such an `x`.
fn trace_root(field: &Field, t: Elem) -> Option<Elem> {
    field.nonzero().find(|&x| field.add(x, field.inv(x).unwrap()) == t)
}

/// Canonical form of a descriptor, or `None` if the parameter is invalid.
pub fn canonicalize(field: &Field, cd: ClassDescriptor) -> Option<ClassDescriptor> {
    match cd {
        ClassDescriptor::Identity => Some(cd),
        ClassDescriptor::Split { a } => {
            if a.is_zero() || a == Elem::ONE || !field.is_square(a) {
                return None;
            }
            Some(ClassDescriptor::Split { a: a.min(field.inv(a).unwrap()) })
        }
        ClassDescriptor::Unipotent { b } => {
            (!b.is_zero()).then(|| ClassDescriptor::Unipotent { b: field.square_class_rep(b) })
        }
        ClassDescriptor::NonSplit { t } => {
            trace_root(field, t).is_none().then(|| ClassDescriptor::NonSplit { t: t.min(field.neg(t)) })
        }
    }
}

/// Canonical matrix representative of a class.
pub fn representative(field: &Field, cd: &ClassDescriptor) -> Mat2 {
    let g = MatrixGroup::psl(field);
    let m = match *cd {
        ClassDescriptor::Identity => g.identity(),
        ClassDescriptor::Split { a } => Mat2::new(a, Elem::ZERO, Elem::ZERO, Elem::ONE),
        ClassDescriptor::Unipotent { b } => Mat2::new(Elem::ONE, b, Elem::ZERO, Elem::ONE),
        ClassDescriptor::NonSplit { t } => Mat2::new(Elem::ZERO, Elem::ONE, field.neg(Elem::ONE), t),
    };
    g.canonical(&m).expect("class representatives lie in PSL")
}

/// The class of an element of PSL(2,q), read off from its trace. For
/// unipotent elements the square class of the translation parameter comes
/// from the nilpotent part `N = g - I` of the trace-2 lift: conjugating
/// `[1 b; 0 1]` by `[x y; z w]` (determinant 1) gives `N = b [-xz x^2; -z^2 xz]`,
/// so the upper-right entry is `b x^2` and, when it vanishes, the negated
/// lower-left entry is `b z^2`.
pub fn class_of(field: &Field, g: &Mat2) -> ClassDescriptor {
    let grp = MatrixGroup::psl(field);
    let g = grp.canonical(g).expect("element of PSL(2,q)");
    if grp.is_identity(&g) {
        return ClassDescriptor::Identity;
    }
    let f = field;
    let two = f.from_int(2);
    let t = grp.trace(&g);
    if t == two || t == f.neg(two) {
        let h = if t == two { g } else { grp.scale(&g, f.neg(Elem::ONE)) };
        let v = h.b;
        let b = if !v.is_zero() { v } else { f.neg(h.c) };
        return ClassDescriptor::Unipotent { b: f.square_class_rep(b) };
    }
    match trace_root(f, t) {
        Some(x) => {
            let a = f.mul(x, x);
            ClassDescriptor::Split { a: a.min(f.inv(a).unwrap()) }
        }
        None => ClassDescriptor::NonSplit { t: t.min(f.neg(t)) },
    }
}

/// Everything known about a class without enumerating it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassInfo {
    pub descriptor: ClassDescriptor,
    pub id: String,
    pub class_type: ClassType,
    pub size: u64,
    pub order: u64,
    pub char_poly: CharPolyClass,
    pub representative: Mat2,
    pub real: bool,
}

pub fn class_size(field: &Field, cd: &ClassDescriptor) -> u64 {
    let q = field.q() as u64;
    let f = field;
    match *cd {
        ClassDescriptor::Identity => 1,
        ClassDescriptor::Split { a } => {
            if f.p() != 2 && a == f.neg(Elem::ONE) {
                q * (q + 1) / 2
            } else {
                q * (q + 1)
            }
        }
        ClassDescriptor::Unipotent { .. } => (q * q - 1) / f.e() as u64,
        ClassDescriptor::NonSplit { t } => {
            if f.p() != 2 && t.is_zero() {
                q * (q - 1) / 2
            } else {
                q * (q - 1)
            }
        }
    }
}

/// Order of the elements of a class.
pub fn class_order(field: &Field, cd: &ClassDescriptor) -> u64 {
    match *cd {
        ClassDescriptor::Identity => 1,
        ClassDescriptor::Split { a } => field.mult_order(a).unwrap(),
        ClassDescriptor::Unipotent { .. } => field.p() as u64,
        ClassDescriptor::NonSplit { t } => {
            let mut k = 1u64;
            let (mut prev, mut cur) = (field.from_int(2), t);
            let two = field.from_int(2);
            while cur != two && cur != field.neg(two) {
                let next = field.sub(field.mul(t, cur), prev);
                prev = cur;
                cur = next;
                k += 1;
            }
            k
        }
    }
}

/// Reality of a class: even-q involutions, unipotent classes when
/// `4 | q - 1`, and every semisimple class.
pub fn is_real(field: &Field, cd: &ClassDescriptor) -> bool {
    match cd {
        ClassDescriptor::Identity | ClassDescriptor::Split { .. } | ClassDescriptor::NonSplit { .. } => true,
        ClassDescriptor::Unipotent { .. } => field.p() == 2 || (field.q() - 1).is_multiple_of(4),
    }
}

pub fn class_info(field: &Field, cd: &ClassDescriptor) -> ClassInfo {
    let representative = representative(field, cd);
    ClassInfo {
        descriptor: *cd,
        id: cd.id(),
        class_type: cd.class_type(),
        size: class_size(field, cd),
        order: class_order(field, cd),
        char_poly: MatrixGroup::psl(field).char_poly(&representative),
        representative,
        real: is_real(field, cd),
    }
}

/// All classes of PSL(2,q): identity, split, unipotent, non-split, each
/// family in increasing parameter order. Memoized per field.
pub fn all_classes(field: &Field) -> Arc<Vec<ClassInfo>> {
    type Cache = Mutex<HashMap<(u32, u32), Arc<Vec<ClassInfo>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (field.p(), field.n());
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }
    let mut descs = vec![ClassDescriptor::Identity];
    let mut push = |cd: ClassDescriptor| {
        if let Some(c) = canonicalize(field, cd) {
            if c == cd && !descs.contains(&c) {
                descs.push(c);
            }
        }
    };
    for a in field.nonzero() {
        push(ClassDescriptor::Split { a });
    }
    for b in field.nonzero() {
        push(ClassDescriptor::Unipotent { b });
    }
    for t in field.elements() {
        push(ClassDescriptor::NonSplit { t });
    }
    let infos: Arc<Vec<ClassInfo>> = Arc::new(descs.iter().map(|cd| class_info(field, cd)).collect());
    cache.lock().unwrap().insert(key, infos.clone());
    infos
}

/// The class of `{g^m : g in class}`; depends only on `m` modulo the order.
pub fn power_class(field: &Field, cd: &ClassDescriptor, m: i64) -> ClassDescriptor {
    let o = class_order(field, cd) as i64;
    let m = m.rem_euclid(o);
    if m == 0 {
        return ClassDescriptor::Identity;
    }
    let f = field;
    match *cd {
        ClassDescriptor::Identity => ClassDescriptor::Identity,
        ClassDescriptor::Split { a } => {
            let am = f.pow(a, m as u64);
            canonicalize(f, ClassDescriptor::Split { a: am }).expect("power of a non-trivial split element")
        }
        ClassDescriptor::Unipotent { b } => {
            ClassDescriptor::Unipotent { b: f.square_class_rep(f.mul(f.from_int(m), b)) }
        }
        ClassDescriptor::NonSplit { t } => {
            // trace of the m-th power of a determinant-1 lift
            let (mut prev, mut cur) = (f.from_int(2), t);
            for _ in 1..m {
                let next = f.sub(f.mul(t, cur), prev);
                prev = cur;
                cur = next;
            }
            ClassDescriptor::NonSplit { t: cur.min(f.neg(cur)) }
        }
    }
}

pub fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            while m.is_multiple_of(d) {
                m /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Number of classes of elements of order `m`, from the closed formulas:
/// one class of involutions, `e` classes of order `p`, and `phi(m)/2`
/// semisimple classes for `m >= 3` dividing `(q-1)/e` or `(q+1)/e`.
pub fn count_classes_of_order(field: &Field, m: u64) -> u64 {
    let q = field.q() as u64;
    let e = field.e() as u64;
    match m {
        0 => 0,
        1 => 1,
        2 => 1,
        _ if m == field.p() as u64 => e,
        _ if ((q - 1) / e).is_multiple_of(m) || ((q + 1) / e).is_multiple_of(m) => euler_phi(m) / 2,
        _ => 0,
    }
}

/// The same count taken from the brute-force class partition of the
/// enumerated group.
pub fn count_classes_of_order_by_enumeration(field: &Field, m: u64) -> Result<u64, MatrixError> {
    let t = tabulated_psl(field)?;
    let g = t.table();
    Ok(g.conjugacy_classes().iter().filter(|c| g.element_order(c[0]) as u64 == m).count() as u64)
}

/// Tabulated PSL(2,q), memoized per field.
pub fn tabulated_psl(field: &Field) -> Result<Arc<TabulatedGroup>, MatrixError> {
    tabulated(&MatrixGroup::psl(field))
}

/// Tabulated SL(2,q), memoized per field.
pub fn tabulated_sl(field: &Field) -> Result<Arc<TabulatedGroup>, MatrixError> {
    tabulated(&MatrixGroup::sl(field))
}

fn tabulated(group: &MatrixGroup) -> Result<Arc<TabulatedGroup>, MatrixError> {
    type Cache = Mutex<HashMap<(u32, u32, crate::matrix::GroupKind), Arc<TabulatedGroup>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (group.field().p(), group.field().n(), group.kind());
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(group.tabulate()?);
    cache.lock().unwrap().insert(key, t.clone());
    Ok(t)
}

/// Centralizer of `g` in PSL(2,q), as matrices.
pub fn centralizer(field: &Field, g: &Mat2) -> Result<Vec<Mat2>, MatrixError> {
    let t = tabulated_psl(field)?;
    let i = t.index_of(g).ok_or(MatrixError::NotInGroup(crate::matrix::GroupKind::Psl))?;
    Ok(t.table().centralizer(i).into_iter().map(|j| t.matrix(j)).collect())
}

/// The elements of a class, as indices into the tabulated PSL(2,q).
pub fn class_members(t: &TabulatedGroup, cd: &ClassDescriptor) -> Vec<usize> {
    let f = t.field();
    let rep = t.index_of(&representative(f, cd)).expect("representative in group");
    let g: &FiniteGroup = t.table();
    g.conjugation_orbit(rep, &g.generators())
}

/// Whether the class generates PSL(2,q). For `q >= 4` the group is simple,
/// so every non-trivial class does; for `q = 2, 3` only the unipotent
/// classes do (the other class lies in the normal subgroup of index 2 or 3).
pub fn class_generates_by_rule(field: &Field, cd: &ClassDescriptor) -> bool {
    match cd.class_type() {
        ClassType::Identity => false,
        ClassType::Unipotent => true,
        _ => field.q() >= 4,
    }
}

/// Whether the class generates PSL(2,q), by closure in the tabulated group.
pub fn class_generates(field: &Field, cd: &ClassDescriptor) -> Result<bool, MatrixError> {
    let t = tabulated_psl(field)?;
    let members = class_members(&t, cd);
    Ok(t.table().closure(&members).len() == t.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum PglClassDescriptor {
    Identity,
    /// Eigenvalue ratio `a` up to inversion, any non-zero `a != 1`.
    Split {
        a: Elem,
    },
    Unipotent,
    /// Irreducible `x^2 - t x + d` up to `(t, d) ~ (lt, l^2 d)`.
    NonSplit {
        poly: CharPolyClass,
    },
}

impl PglClassDescriptor {
    pub fn id(&self) -> String {
        match self {
            PglClassDescriptor::Identity => "identity".into(),
            PglClassDescriptor::Split { a } => format!("pgl-split:a={a}"),
            PglClassDescriptor::Unipotent => "pgl-unip".into(),
            PglClassDescriptor::NonSplit { poly } => format!("pgl-nonsplit:t={},d={}", poly.t, poly.d),
        }
    }
}

fn roots(field: &Field, t: Elem, d: Elem) -> Vec<Elem> {
    field.elements().filter(|&x| field.add(field.sub(field.mul(x, x), field.mul(t, x)), d).is_zero()).collect()
}

pub fn pgl_class_of(field: &Field, m: &Mat2) -> PglClassDescriptor {
    let g = MatrixGroup::pgl(field);
    let m = g.canonical(m).expect("element of PGL(2,q)");
    if g.is_identity(&m) {
        return PglClassDescriptor::Identity;
    }
    let (t, d) = (g.trace(&m), g.det(&m));
    let r = roots(field, t, d);
    match r.len() {
        1 => PglClassDescriptor::Unipotent,
        2 => {
            let a = field.div(r[0], r[1]).unwrap();
            PglClassDescriptor::Split { a: a.min(field.inv(a).unwrap()) }
        }
        _ => PglClassDescriptor::NonSplit { poly: CharPolyClass::canonical(field, t, d) },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PglClassInfo {
    pub descriptor: PglClassDescriptor,
    pub size: u64,
    pub representative: Mat2,
}

pub fn pgl_class_size(field: &Field, cd: &PglClassDescriptor) -> u64 {
    let q = field.q() as u64;
    match *cd {
        PglClassDescriptor::Identity => 1,
        PglClassDescriptor::Split { a } => {
            if field.p() != 2 && a == field.neg(Elem::ONE) {
                q * (q + 1) / 2
            } else {
                q * (q + 1)
            }
        }
        PglClassDescriptor::Unipotent => q * q - 1,
        PglClassDescriptor::NonSplit { poly } => {
            if poly.t.is_zero() {
                q * (q - 1) / 2
            } else {
                q * (q - 1)
            }
        }
    }
}

pub fn pgl_representative(field: &Field, cd: &PglClassDescriptor) -> Mat2 {
    let g = MatrixGroup::pgl(field);
    let m = match *cd {
        PglClassDescriptor::Identity => g.identity(),
        PglClassDescriptor::Split { a } => Mat2::new(a, Elem::ZERO, Elem::ZERO, Elem::ONE),
        PglClassDescriptor::Unipotent => Mat2::new(Elem::ONE, Elem::ONE, Elem::ZERO, Elem::ONE),
        PglClassDescriptor::NonSplit { poly } => Mat2::new(Elem::ZERO, Elem::ONE, field.neg(poly.d), poly.t),
    };
    g.canonical(&m).unwrap()
}

pub fn all_pgl_classes(field: &Field) -> Vec<PglClassInfo> {
    let f = field;
    let mut descs = vec![PglClassDescriptor::Identity];
    for a in f.nonzero().filter(|&a| a != Elem::ONE) {
        let c = PglClassDescriptor::Split { a: a.min(f.inv(a).unwrap()) };
        if !descs.contains(&c) {
            descs.push(c);
        }
    }
    descs.push(PglClassDescriptor::Unipotent);
    for t in f.elements() {
        for d in f.nonzero() {
            if roots(f, t, d).is_empty() {
                let c = PglClassDescriptor::NonSplit { poly: CharPolyClass::canonical(f, t, d) };
                if !descs.contains(&c) {
                    descs.push(c);
                }
            }
        }
    }
    descs
        .into_iter()
        .map(|cd| PglClassInfo {
            size: pgl_class_size(f, &cd),
            representative: pgl_representative(f, &cd),
            descriptor: cd,
        })
        .collect()
}

/// The PSL(2,q) classes making up a PGL(2,q) class, or an error when the
/// class misses PSL(2,q) altogether.
pub fn pgl_restrict(field: &Field, cd: &PglClassDescriptor) -> Result<Vec<ClassDescriptor>, ConjugacyError> {
    let f = field;
    let disjoint = || ConjugacyError::DisjointFromPsl { class: cd.id(), q: f.q() };
    match *cd {
        PglClassDescriptor::Identity => Ok(vec![ClassDescriptor::Identity]),
        PglClassDescriptor::Split { a } => {
            if f.is_square(a) {
                Ok(vec![canonicalize(f, ClassDescriptor::Split { a }).unwrap()])
            } else {
                Err(disjoint())
            }
        }
        PglClassDescriptor::Unipotent => {
            let mut v = vec![ClassDescriptor::Unipotent { b: Elem::ONE }];
            if let Some(b) = f.least_nonsquare() {
                v.push(ClassDescriptor::Unipotent { b });
            }
            Ok(v)
        }
        PglClassDescriptor::NonSplit { poly } => {
            let r = f.sqrt(poly.d).ok_or_else(disjoint)?;
            let t = f.div(poly.t, r).unwrap();
            Ok(vec![canonicalize(f, ClassDescriptor::NonSplit { t }).unwrap()])
        }
    }
}
