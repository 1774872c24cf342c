//! 2x2 matrix groups over GF(q): SL(2,q), GL(2,q), PSL(2,q) and PGL(2,q).
//!
//! Projective elements are stored as canonical matrix representatives:
//!
//! * PSL: determinant 1, and of `M` and `-M` the one whose first non-zero
//!   entry (reading order a, b, c, d) is smaller in the field's total order;
//! * PGL: scaled so that the first non-zero entry is 1;
//! * SL and GL: the matrix itself.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::field::{Elem, Field, FieldError};
use crate::finite::{FiniteGroup, GroupError};

/// Default bound on `q` for full enumeration of a matrix group.
pub const DEFAULT_MAX_ENUM_Q: u32 = 49;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not represent an element of {0}")]
    NotInGroup(GroupKind),
    #[error("cannot combine elements of {0} and {1}")]
    MixedTags(GroupKind, GroupKind),
    #[error("cannot combine elements over GF({0}) and GF({1})")]
    MixedFields(u32, u32),
    #[error("enumeration of {kind} over GF({q}) exceeds the bound q <= {bound}")]
    TooLarge { kind: GroupKind, q: u32, bound: u32 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupKind {
    #[serde(rename = "SL")]
    Sl,
    #[serde(rename = "GL")]
    Gl,
    #[serde(rename = "PSL")]
    Psl,
    #[serde(rename = "PGL")]
    Pgl,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Sl => "SL",
            GroupKind::Gl => "GL",
            GroupKind::Psl => "PSL",
            GroupKind::Pgl => "PGL",
        })
    }
}

/// The matrix `[a b; c d]`. Ordering compares `(a, b, c, d)` in the field's
/// total order and is the enumeration order of every group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mat2 {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Mat2 {
    pub const fn new(a: Elem, b: Elem, c: Elem, d: Elem) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn entries(&self) -> [Elem; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// A point of the projective line over GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(Elem),
    Infinity,
}

/// `x^2 - T x + D` up to `(T, D) ~ (lT, l^2 D)`, in canonical form: `T = 1`
/// when `T != 0`, otherwise `T = 0` and `D` is the least element of its
/// square class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CharPolyClass {
    pub t: Elem,
    pub d: Elem,
}

impl CharPolyClass {
    pub fn canonical(field: &Field, t: Elem, d: Elem) -> CharPolyClass {
        if t.is_zero() {
            CharPolyClass { t, d: field.square_class_rep(d) }
        } else {
            let t2 = field.mul(t, t);
            CharPolyClass { t: Elem::ONE, d: field.div(d, t2).expect("t non-zero") }
        }
    }

    pub fn display(&self, field: &Field) -> String {
        let t = if self.t.is_zero() { String::new() } else { "-x".to_string() };
        format!("x^2{t}+{}", field.format(self.d))
    }
}

/// One of the groups SL, GL, PSL, PGL over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGroup {
    field: Field,
    kind: GroupKind,
}

impl MatrixGroup {
    pub fn new(field: Field, kind: GroupKind) -> MatrixGroup {
        MatrixGroup { field, kind }
    }

    pub fn psl(field: &Field) -> MatrixGroup {
        MatrixGroup::new(field.clone(), GroupKind::Psl)
    }

    pub fn sl(field: &Field) -> MatrixGroup {
        MatrixGroup::new(field.clone(), GroupKind::Sl)
    }

    pub fn pgl(field: &Field) -> MatrixGroup {
        MatrixGroup::new(field.clone(), GroupKind::Pgl)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// The group order from the closed formulas.
    pub fn order(&self) -> u64 {
        let q = self.field.q() as u64;
        let sl = (q - 1) * q * (q + 1);
        match self.kind {
            GroupKind::Sl | GroupKind::Pgl => sl,
            GroupKind::Gl => sl * (q - 1),
            GroupKind::Psl => sl / self.field.e() as u64,
        }
    }

    pub fn det(&self, m: &Mat2) -> Elem {
        let f = &self.field;
        f.sub(f.mul(m.a, m.d), f.mul(m.b, m.c))
    }

    pub fn trace(&self, m: &Mat2) -> Elem {
        self.field.add(m.a, m.d)
    }

    pub fn identity(&self) -> Mat2 {
        Mat2::new(Elem::ONE, Elem::ZERO, Elem::ZERO, Elem::ONE)
    }

    /// Builds `[a b; c d]` from field-element indices and canonicalizes it.
    pub fn from_indices(&self, a: u32, b: u32, c: u32, d: u32) -> Result<Mat2, MatrixError> {
        let q = self.field.q();
        let e = |x: u32| self.field.elem(x).ok_or(FieldError::NotSubfield { sub: x, q });
        self.canonical(&Mat2::new(e(a)?, e(b)?, e(c)?, e(d)?))
    }

    /// Builds a matrix from integer entries reduced into the prime field.
    pub fn from_ints(&self, a: i64, b: i64, c: i64, d: i64) -> Result<Mat2, MatrixError> {
        let f = &self.field;
        self.canonical(&Mat2::new(f.from_int(a), f.from_int(b), f.from_int(c), f.from_int(d)))
    }

    /// Canonical representative of the element represented by `m`. For PSL
    /// the matrix is first scaled to determinant 1, which requires the
    /// determinant to be a square.
    pub fn canonical(&self, m: &Mat2) -> Result<Mat2, MatrixError> {
        let f = &self.field;
        let det = self.det(m);
        if det.is_zero() {
            return Err(MatrixError::Singular);
        }
        match self.kind {
            GroupKind::Gl => Ok(*m),
            GroupKind::Sl => {
                if det == Elem::ONE {
                    Ok(*m)
                } else {
                    Err(MatrixError::NotInGroup(self.kind))
                }
            }
            GroupKind::Pgl => {
                let first = m.entries().into_iter().find(|x| !x.is_zero()).expect("non-singular");
                let s = f.inv(first)?;
                Ok(self.scale(m, s))
            }
            GroupKind::Psl => {
                let r = f.sqrt(det).ok_or(MatrixError::NotInGroup(self.kind))?;
                let m1 = self.scale(m, f.inv(r)?);
                let m2 = self.scale(&m1, f.neg(Elem::ONE));
                let first = |x: &Mat2| x.entries().into_iter().find(|e| !e.is_zero()).unwrap();
                Ok(if first(&m2) < first(&m1) { m2 } else { m1 })
            }
        }
    }

    /// Canonicalization of a product that is already known to lie in the
    /// group (skips the determinant square root for PSL).
    fn renormalize(&self, m: Mat2) -> Mat2 {
        let f = &self.field;
        match self.kind {
            GroupKind::Gl | GroupKind::Sl => m,
            GroupKind::Pgl => {
                let first = m.entries().into_iter().find(|x| !x.is_zero()).unwrap();
                self.scale(&m, f.inv(first).unwrap())
            }
            GroupKind::Psl => {
                let first = m.entries().into_iter().find(|x| !x.is_zero()).unwrap();
                if f.neg(first) < first {
                    self.scale(&m, f.neg(Elem::ONE))
                } else {
                    m
                }
            }
        }
    }

    pub fn scale(&self, m: &Mat2, s: Elem) -> Mat2 {
        let f = &self.field;
        Mat2::new(f.mul(s, m.a), f.mul(s, m.b), f.mul(s, m.c), f.mul(s, m.d))
    }

    /// Raw matrix product without canonicalization.
    pub fn mat_mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        let f = &self.field;
        Mat2::new(
            f.add(f.mul(x.a, y.a), f.mul(x.b, y.c)),
            f.add(f.mul(x.a, y.b), f.mul(x.b, y.d)),
            f.add(f.mul(x.c, y.a), f.mul(x.d, y.c)),
            f.add(f.mul(x.c, y.b), f.mul(x.d, y.d)),
        )
    }

    pub fn mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        self.renormalize(self.mat_mul(x, y))
    }

    pub fn inv(&self, m: &Mat2) -> Mat2 {
        let f = &self.field;
        let di = f.inv(self.det(m)).expect("group elements are invertible");
        let adj = Mat2::new(m.d, f.neg(m.b), f.neg(m.c), m.a);
        self.renormalize(self.scale(&adj, di))
    }

    /// `g h g^-1`.
    pub fn conjugate(&self, g: &Mat2, h: &Mat2) -> Mat2 {
        self.mul(&self.mul(g, h), &self.inv(g))
    }

    pub fn pow(&self, m: &Mat2, e: i64) -> Mat2 {
        let base = if e < 0 { self.inv(m) } else { *m };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self, m: &Mat2) -> bool {
        *m == self.identity()
    }

    pub fn element_order(&self, m: &Mat2) -> u64 {
        let mut k = 1;
        let mut x = *m;
        while !self.is_identity(&x) {
            x = self.mul(&x, m);
            k += 1;
        }
        k
    }

    /// Canonical class of `x^2 - tr(m) x + det(m)`.
    pub fn char_poly(&self, m: &Mat2) -> CharPolyClass {
        CharPolyClass::canonical(&self.field, self.trace(m), self.det(m))
    }

    /// `z -> (az + b) / (cz + d)`.
    pub fn act(&self, m: &Mat2, z: ProjPoint) -> ProjPoint {
        let f = &self.field;
        match z {
            ProjPoint::Infinity => {
                if m.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(f.div(m.a, m.c).unwrap())
                }
            }
            ProjPoint::Finite(z) => {
                let num = f.add(f.mul(m.a, z), m.b);
                let den = f.add(f.mul(m.c, z), m.d);
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(f.div(num, den).unwrap())
                }
            }
        }
    }

    pub fn projective_line(&self) -> Vec<ProjPoint> {
        self.field.elements().map(ProjPoint::Finite).chain([ProjPoint::Infinity]).collect()
    }

    pub fn fixed_points(&self, m: &Mat2) -> usize {
        self.projective_line().into_iter().filter(|&z| self.act(m, z) == z).count()
    }

    /// All elements in increasing order of canonical representative.
    pub fn enumerate(&self) -> Result<Vec<Mat2>, MatrixError> {
        self.enumerate_bounded(DEFAULT_MAX_ENUM_Q)
    }

    pub fn enumerate_bounded(&self, bound: u32) -> Result<Vec<Mat2>, MatrixError> {
        let q = self.field.q();
        if q > bound {
            return Err(MatrixError::TooLarge { kind: self.kind, q, bound });
        }
        let f = &self.field;
        let mut out = Vec::with_capacity(self.order() as usize);
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    for d in f.elements() {
                        let m = Mat2::new(a, b, c, d);
                        if self.det(&m).is_zero() {
                            continue;
                        }
                        if let Ok(k) = self.canonical(&m) {
                            if k == m {
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Enumerates the group and tabulates it.
    pub fn tabulate(&self) -> Result<TabulatedGroup, MatrixError> {
        TabulatedGroup::new(self.clone())
    }

    pub fn element(&self, m: &Mat2) -> Result<ProjElement, MatrixError> {
        Ok(ProjElement { group: self.clone(), rep: self.canonical(m)? })
    }

    pub fn format(&self, m: &Mat2) -> String {
        let f = &self.field;
        format!("[{} {}; {} {}]", f.format(m.a), f.format(m.b), f.format(m.c), f.format(m.d))
    }
}

/// A group element carrying its group, for checked mixed-group arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjElement {
    group: MatrixGroup,
    rep: Mat2,
}

impl ProjElement {
    pub fn rep(&self) -> Mat2 {
        self.rep
    }

    pub fn group(&self) -> &MatrixGroup {
        &self.group
    }

    fn compatible(&self, other: &ProjElement) -> Result<(), MatrixError> {
        if self.group.kind != other.group.kind {
            return Err(MatrixError::MixedTags(self.group.kind, other.group.kind));
        }
        if self.group.field != other.group.field {
            return Err(MatrixError::MixedFields(self.group.field.q(), other.group.field.q()));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &ProjElement) -> Result<ProjElement, MatrixError> {
        self.compatible(other)?;
        Ok(ProjElement { group: self.group.clone(), rep: self.group.mul(&self.rep, &other.rep) })
    }

    pub fn try_conjugate(&self, h: &ProjElement) -> Result<ProjElement, MatrixError> {
        self.compatible(h)?;
        Ok(ProjElement { group: self.group.clone(), rep: self.group.conjugate(&self.rep, &h.rep) })
    }

    pub fn inv(&self) -> ProjElement {
        ProjElement { group: self.group.clone(), rep: self.group.inv(&self.rep) }
    }

    pub fn order(&self) -> u64 {
        self.group.element_order(&self.rep)
    }

    pub fn char_poly(&self) -> CharPolyClass {
        self.group.char_poly(&self.rep)
    }

    pub fn fixed_points(&self) -> usize {
        self.group.fixed_points(&self.rep)
    }
}

/// A fully enumerated matrix group with its multiplication table.
#[derive(Clone, Debug)]
pub struct TabulatedGroup {
    group: MatrixGroup,
    elements: Vec<Mat2>,
    index: Vec<u32>,
    table: FiniteGroup,
}

impl TabulatedGroup {
    fn new(group: MatrixGroup) -> Result<TabulatedGroup, MatrixError> {
        let elements = group.enumerate()?;
        let q = group.field.q() as usize;
        let key = |m: &Mat2| ((m.a.index() * q + m.b.index()) * q + m.c.index()) * q + m.d.index();
        let mut index = vec![u32::MAX; q * q * q * q];
        for (i, m) in elements.iter().enumerate() {
            index[key(m)] = i as u32;
        }
        let table =
            FiniteGroup::from_fn(elements.len(), |i, j| index[key(&group.mul(&elements[i], &elements[j]))] as usize)?;
        Ok(TabulatedGroup { group, elements, index, table })
    }

    pub fn group(&self) -> &MatrixGroup {
        &self.group
    }

    pub fn field(&self) -> &Field {
        &self.group.field
    }

    pub fn table(&self) -> &FiniteGroup {
        &self.table
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn matrix(&self, i: usize) -> Mat2 {
        self.elements[i]
    }

    /// Index of a matrix, after canonicalization.
    pub fn index_of(&self, m: &Mat2) -> Option<usize> {
        let m = self.group.canonical(m).ok()?;
        let q = self.group.field.q() as usize;
        let k = ((m.a.index() * q + m.b.index()) * q + m.c.index()) * q + m.d.index();
        let i = self.index[k];
        (i != u32::MAX).then_some(i as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, field_of_order};

    fn gcd(a: u64, b: u64) -> u64 {
        crate::field::gcd(a, b)
    }

    #[test]
    fn group_orders() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = field_of_order(q).unwrap();
            for kind in [GroupKind::Sl, GroupKind::Psl, GroupKind::Pgl] {
                let g = MatrixGroup::new(f.clone(), kind);
                let elems = g.enumerate().unwrap();
                assert_eq!(elems.len() as u64, g.order(), "{kind} q={q}");
                let mut sorted = elems.clone();
                sorted.dedup();
                assert_eq!(sorted.len(), elems.len());
            }
        }
        let f = field_of_order(5).unwrap();
        assert_eq!(MatrixGroup::psl(&f).enumerate().unwrap().len(), 60);
        assert_eq!(MatrixGroup::pgl(&f).enumerate().unwrap().len(), 120);
        assert_eq!(MatrixGroup::psl(&field_of_order(8).unwrap()).enumerate().unwrap().len(), 504);
        assert!(matches!(
            MatrixGroup::psl(&field_of_order(53).unwrap()).enumerate(),
            Err(MatrixError::TooLarge { .. })
        ));
    }

    #[test]
    fn psl_conjugation_example() {
        let g = MatrixGroup::psl(&build_field(5, 1).unwrap());
        let u = g.from_ints(1, 1, 0, 1).unwrap();
        let w = g.from_ints(0, 1, -1, 0).unwrap();
        // [0 1; -1 0][1 1; 0 1][0 -1; 1 0] = [1 0; -1 1]
        assert_eq!(g.conjugate(&w, &u), g.from_ints(1, 0, -1, 1).unwrap());
        assert_eq!(g.element_order(&w), 2);
        assert_eq!(g.mul(&u, &g.inv(&u)), g.identity());
        assert_eq!(g.conjugate(&g.identity(), &u), u);
    }

    #[test]
    fn orders_and_fixed_points() {
        let g7 = MatrixGroup::psl(&build_field(7, 1).unwrap());
        assert_eq!(g7.element_order(&g7.from_ints(1, 1, 0, 1).unwrap()), 7);
        assert_eq!(g7.element_order(&g7.identity()), 1);
        assert_eq!(g7.fixed_points(&g7.from_ints(1, 1, 0, 1).unwrap()), 1);
        assert_eq!(g7.fixed_points(&g7.from_ints(2, 0, 0, 1).unwrap()), 2);
        assert_eq!(g7.fixed_points(&g7.from_ints(0, 1, -1, 0).unwrap()), 0);
        assert_eq!(g7.fixed_points(&g7.identity()), 8);
    }

    #[test]
    fn char_poly_examples() {
        let f7 = build_field(7, 1).unwrap();
        let g = MatrixGroup::psl(&f7);
        // identity: (2, 1) scaled by 1/2 -> (1, 1/4) = (1, 2)
        assert_eq!(g.char_poly(&g.identity()), CharPolyClass { t: Elem::ONE, d: f7.from_int(2) });
        let w = g.from_ints(0, 1, -1, 0).unwrap();
        assert_eq!(g.char_poly(&w), CharPolyClass { t: Elem::ZERO, d: Elem::ONE });
        // diag(2, 1): (3, 2) -> (1, 2/9) = (1, 2 * 4) = (1, 1)
        let gl = MatrixGroup::new(f7.clone(), GroupKind::Gl);
        let m = gl.from_ints(2, 0, 0, 1).unwrap();
        let expected = f7.div(f7.from_int(2), f7.from_int(9)).unwrap();
        assert_eq!(gl.char_poly(&m), CharPolyClass { t: Elem::ONE, d: expected });
        // and the PSL image has the same class
        assert_eq!(g.char_poly(&g.canonical(&m).unwrap()), gl.char_poly(&m));
    }

    #[test]
    fn canonical_equality_matches_action() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = field_of_order(q).unwrap();
            for kind in [GroupKind::Psl, GroupKind::Pgl] {
                let g = MatrixGroup::new(f.clone(), kind);
                let elems = g.enumerate().unwrap();
                let mut actions = std::collections::HashSet::new();
                for m in &elems {
                    assert_eq!(g.canonical(m).unwrap(), *m);
                    let act: Vec<ProjPoint> = g.projective_line().into_iter().map(|z| g.act(m, z)).collect();
                    assert!(actions.insert(act), "{kind} q={q}: two representatives act alike");
                }
            }
        }
    }

    #[test]
    fn char_poly_is_class_invariant() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let t = MatrixGroup::psl(&field_of_order(q).unwrap()).tabulate().unwrap();
            let g = t.group();
            for (i, m) in t.elements().iter().enumerate() {
                let c = g.char_poly(m);
                for &h in &t.table().generators() {
                    let x = t.table().conj(h, i);
                    assert_eq!(g.char_poly(&t.matrix(x)), c);
                }
            }
        }
    }

    #[test]
    fn element_orders_follow_the_three_types() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49] {
            let f = field_of_order(q).unwrap();
            let e = f.e() as u64;
            let (lo, hi) = ((q as u64 - 1) / e, (q as u64 + 1) / e);
            assert_eq!(gcd(lo, hi), 1);
            if q > 13 {
                continue;
            }
            let g = MatrixGroup::psl(&f);
            for m in g.enumerate().unwrap() {
                let o = g.element_order(&m);
                assert!(o == 1 || o == f.p() as u64 || lo % o == 0 || hi % o == 0, "q={q} order {o}");
            }
        }
    }

    #[test]
    fn doubly_transitive() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let g = MatrixGroup::psl(&field_of_order(q).unwrap());
            let line = g.projective_line();
            let mut images = std::collections::HashSet::new();
            for m in g.enumerate().unwrap() {
                images.insert((g.act(&m, line[0]), g.act(&m, line[1])));
            }
            let n = line.len();
            assert_eq!(images.len(), n * (n - 1), "q={q}");
        }
    }

    #[test]
    fn mixed_tags_are_rejected() {
        let f = build_field(5, 1).unwrap();
        let a = MatrixGroup::psl(&f).element(&Mat2::new(Elem(1), Elem(1), Elem(0), Elem(1))).unwrap();
        let b = MatrixGroup::pgl(&f).element(&Mat2::new(Elem(1), Elem(1), Elem(0), Elem(1))).unwrap();
        assert_eq!(a.try_mul(&b), Err(MatrixError::MixedTags(GroupKind::Psl, GroupKind::Pgl)));
        assert_eq!(a.try_mul(&a.inv()).unwrap().rep(), MatrixGroup::psl(&f).identity());
        let g = MatrixGroup::psl(&f);
        assert_eq!(
            g.canonical(&Mat2::new(Elem(2), Elem(0), Elem(0), Elem(1))),
            Err(MatrixError::NotInGroup(GroupKind::Psl))
        );
        assert_eq!(g.canonical(&Mat2::new(Elem(1), Elem(1), Elem(1), Elem(1))), Err(MatrixError::Singular));
    }
}
