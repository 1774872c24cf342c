//! The subgroup lattice of PSL(2,q) for small q, labelled by Dickson's list.
//!
//! Subgroups are found by closing joins of known subgroups with cyclic
//! subgroups until nothing new appears. Every subgroup is generated by its
//! cyclic subgroups, so the fixed point is the whole lattice.
//!
//! Labels: a subgroup can fit several items of the list (`S3` is both
//! `D6` and `PSL(2,2)`, the Borel subgroup of PSL(2,5) is `D10` as well as
//! `A x| C`). The primary label is the first match in the order
//! `Cyclic(1)`, `ElemAbelianP`, `Cyclic`, `SemidirectAC`, `Dihedral`, `A4`,
//! `S4`, `A5`, `PSL2`, `PGL2`; the other matches whose side conditions hold
//! at this `q` are kept as alternatives.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::conjugacy::tabulated_psl;
use crate::field::{build_field, gcd, Field};
use crate::finite::{alternating_group, order_profile, symmetric_group, FiniteGroup};
use crate::matrix::{MatrixError, MatrixGroup, TabulatedGroup};

/// Largest group order for which the full lattice is computed.
pub const DEFAULT_LATTICE_BOUND: u64 = 660;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("PSL(2,{q}) has order {order}, above the lattice bound {bound}")]
    TooLarge { q: u32, order: u64, bound: u64 },
    #[error("subgroup of order {order} matches no item of Dickson's list at q = {q}")]
    NoLabel { order: usize, q: u32 },
    #[error("elements do not form a subgroup")]
    NotASubgroup,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// An isomorphism type from Dickson's list, with parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type")]
pub enum DicksonLabel {
    ElemAbelianP {
        p: u32,
        rank: u32,
    },
    Cyclic {
        n: u64,
    },
    /// Dihedral group of the given order; order 4 is the Klein four group.
    Dihedral {
        order: u64,
    },
    A4,
    S4,
    A5,
    /// `A x|_q C` with `|A| = a` and `|C| = c`.
    SemidirectAC {
        a: u64,
        c: u64,
    },
    PSL2 {
        q0: u32,
    },
    PGL2 {
        q0: u32,
    },
}

impl DicksonLabel {
    pub fn order(&self) -> u64 {
        match *self {
            DicksonLabel::ElemAbelianP { p, rank } => (p as u64).pow(rank),
            DicksonLabel::Cyclic { n } => n,
            DicksonLabel::Dihedral { order } => order,
            DicksonLabel::A4 => 12,
            DicksonLabel::S4 => 24,
            DicksonLabel::A5 => 60,
            DicksonLabel::SemidirectAC { a, c } => a * c,
            DicksonLabel::PSL2 { q0 } => psl_order(q0 as u64),
            DicksonLabel::PGL2 { q0 } => {
                let q0 = q0 as u64;
                (q0 - 1) * q0 * (q0 + 1)
            }
        }
    }

    /// Short name of the menu item without parameters.
    pub fn kind(&self) -> &'static str {
        match self {
            DicksonLabel::ElemAbelianP { .. } => "elementary-abelian",
            DicksonLabel::Cyclic { .. } => "cyclic",
            DicksonLabel::Dihedral { .. } => "dihedral",
            DicksonLabel::A4 => "A4",
            DicksonLabel::S4 => "S4",
            DicksonLabel::A5 => "A5",
            DicksonLabel::SemidirectAC { .. } => "semidirect",
            DicksonLabel::PSL2 { .. } => "PSL2",
            DicksonLabel::PGL2 { .. } => "PGL2",
        }
    }

    /// Whether the side conditions of the list hold for this label inside
    /// PSL(2,q).
    pub fn allowed_in(&self, field: &Field) -> bool {
        let (p, q) = (field.p() as u64, field.q() as u64);
        let e = field.e() as u64;
        let (lo, hi) = ((q - 1) / e, (q + 1) / e);
        match *self {
            DicksonLabel::ElemAbelianP { p: p0, rank } => p0 as u64 == p && rank >= 1 && rank <= field.n(),
            DicksonLabel::Cyclic { n } => n == 1 || lo % n == 0 || hi % n == 0,
            DicksonLabel::Dihedral { order } => order >= 4 && ((2 * lo) % order == 0 || (2 * hi) % order == 0),
            DicksonLabel::A4 => p != 2 || field.n().is_multiple_of(2),
            DicksonLabel::S4 => (q * q - 1) % 16 == 0,
            DicksonLabel::A5 => p == 5 || (q * q - 1) % 5 == 0,
            DicksonLabel::SemidirectAC { a, c } => {
                c > 1 && a > 1 && a <= q && is_power_of(a, p) && gcd(a - 1, lo).is_multiple_of(c)
            }
            DicksonLabel::PSL2 { q0 } => field.has_subfield(q0),
            DicksonLabel::PGL2 { q0 } => q0 % 2 == 1 && q0 >= 3 && field.has_subfield(q0.saturating_mul(q0)),
        }
    }
}

impl fmt::Display for DicksonLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DicksonLabel::ElemAbelianP { p, rank } => write!(f, "E({p}^{rank})"),
            DicksonLabel::Cyclic { n } => write!(f, "C{n}"),
            DicksonLabel::Dihedral { order } => write!(f, "D{order}"),
            DicksonLabel::A4 => f.write_str("A4"),
            DicksonLabel::S4 => f.write_str("S4"),
            DicksonLabel::A5 => f.write_str("A5"),
            DicksonLabel::SemidirectAC { a, c } => write!(f, "E{a}:C{c}"),
            DicksonLabel::PSL2 { q0 } => write!(f, "PSL(2,{q0})"),
            DicksonLabel::PGL2 { q0 } => write!(f, "PGL(2,{q0})"),
        }
    }
}

fn psl_order(q: u64) -> u64 {
    (q - 1) * q * (q + 1) / gcd(2, q - 1)
}

fn is_power_of(mut a: u64, p: u64) -> bool {
    while a > 1 && a.is_multiple_of(p) {
        a /= p;
    }
    a == 1
}

/// A subgroup of the tabulated PSL(2,q).
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupRecord {
    /// Sorted element indices into the tabulated group.
    pub elements: Vec<usize>,
    pub order: usize,
    pub label: DicksonLabel,
    /// Further list items the subgroup is isomorphic to.
    pub also: Vec<DicksonLabel>,
    pub generators: Vec<usize>,
}

impl SubgroupRecord {
    pub fn has_label(&self, label: &DicksonLabel) -> bool {
        self.label == *label || self.also.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &DicksonLabel> {
        std::iter::once(&self.label).chain(self.also.iter())
    }
}

/// All subgroups of PSL(2,q), sorted by order and then by elements.
/// Memoized per field.
pub fn all_subgroups(field: &Field) -> Result<Arc<Vec<SubgroupRecord>>, SubgroupError> {
    all_subgroups_bounded(field, DEFAULT_LATTICE_BOUND)
}

pub fn all_subgroups_bounded(field: &Field, bound: u64) -> Result<Arc<Vec<SubgroupRecord>>, SubgroupError> {
    let order = psl_order(field.q() as u64);
    if order > bound {
        return Err(SubgroupError::TooLarge { q: field.q(), order, bound });
    }
    type Cache = Mutex<HashMap<(u32, u32), Arc<Vec<SubgroupRecord>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (field.p(), field.n());
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let t = tabulated_psl(field)?;
    let g = t.table();
    let mut labeller = Labeller::new(field);
    let mut out = Vec::new();
    for elements in subgroup_sets(g) {
        let (label, also) = labeller.classify(g, &elements)?;
        let generators = g.generating_set(&elements);
        out.push(SubgroupRecord { order: elements.len(), elements, label, also, generators });
    }
    out.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.elements.cmp(&b.elements)));
    let out = Arc::new(out);
    cache.lock().unwrap().insert(key, out.clone());
    Ok(out)
}

/// The element sets of all subgroups of `g`.
pub fn subgroup_sets(g: &FiniteGroup) -> Vec<Vec<usize>> {
    lattice_rounds(g, usize::MAX).0
}

/// Runs the join closure for at most `rounds` rounds; also reports whether
/// the last round found nothing new.
pub fn lattice_rounds(g: &FiniteGroup, rounds: usize) -> (Vec<Vec<usize>>, bool) {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut cyclic: Vec<(usize, Vec<usize>)> = Vec::new();
    for x in 0..g.order() {
        let c = g.closure(&[x]);
        if seen.insert(c.clone()) {
            cyclic.push((x, c));
        }
    }
    let mut all: Vec<Vec<usize>> = cyclic.iter().map(|(_, c)| c.clone()).collect();
    let mut frontier = all.clone();
    let mut round = 0;
    let mut stable = false;
    while !frontier.is_empty() && round < rounds {
        round += 1;
        let mut next = Vec::new();
        for h in &frontier {
            if h.len() == g.order() {
                continue;
            }
            let member = g.bitset(h);
            let gens = g.generating_set(h);
            for (x, c) in &cyclic {
                if member.contains(*x) || c.len() == 1 {
                    continue;
                }
                let mut with = gens.clone();
                with.push(*x);
                let j = bounded_closure(g, &with);
                if seen.insert(j.clone()) {
                    next.push(j);
                }
            }
        }
        stable = next.is_empty();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    if frontier.is_empty() {
        stable = true;
    }
    (all, stable)
}

/// Closure that gives up as soon as it passes half the group, since the only
/// subgroup that large is the group itself.
fn bounded_closure(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let n = g.order();
    let mut seen = FixedBitSet::with_capacity(n);
    seen.insert(g.identity());
    let mut out = vec![g.identity()];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for &s in gens {
            let y = g.mul(x, s);
            if !seen.put(y) {
                out.push(y);
                if 2 * out.len() > n {
                    return g.all();
                }
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// Dickson label of a subgroup of PSL(2,q), given as sorted elements of the
/// tabulated group: the primary label and alternatives.
pub fn dickson_classify(
    field: &Field,
    group: &FiniteGroup,
    elements: &[usize],
) -> Result<(DicksonLabel, Vec<DicksonLabel>), SubgroupError> {
    Labeller::new(field).classify(group, elements)
}

/// Holds model groups so repeated classification does not rebuild them.
pub struct Labeller {
    field: Field,
    models: HashMap<DicksonLabel, FiniteGroup>,
}

impl Labeller {
    pub fn new(field: &Field) -> Labeller {
        Labeller { field: field.clone(), models: HashMap::new() }
    }

    fn model(&mut self, label: DicksonLabel) -> &FiniteGroup {
        self.models.entry(label).or_insert_with(|| match label {
            DicksonLabel::A4 => alternating_group(4).0,
            DicksonLabel::S4 => symmetric_group(4).0,
            DicksonLabel::A5 => alternating_group(5).0,
            DicksonLabel::PSL2 { q0 } | DicksonLabel::PGL2 { q0 } => {
                let (p, k) = crate::field::prime_power(q0).expect("prime power");
                let f = build_field(p, k).expect("small field");
                let g = if matches!(label, DicksonLabel::PSL2 { .. }) {
                    MatrixGroup::psl(&f)
                } else {
                    MatrixGroup::pgl(&f)
                };
                g.tabulate().expect("small group").table().clone()
            }
            _ => unreachable!("no model needed"),
        })
    }

    pub fn classify(
        &mut self,
        group: &FiniteGroup,
        elements: &[usize],
    ) -> Result<(DicksonLabel, Vec<DicksonLabel>), SubgroupError> {
        let (h, _) = group.induced(elements).map_err(|_| SubgroupError::NotASubgroup)?;
        let mut labels = self.structural_labels(&h, group.order());
        labels.retain(|l| l.allowed_in(&self.field));
        if labels.is_empty() {
            return Err(SubgroupError::NoLabel { order: elements.len(), q: self.field.q() });
        }
        let primary = labels.remove(0);
        Ok((primary, labels))
    }

    /// Every list item `h` is isomorphic to, in priority order, ignoring the
    /// side conditions.
    fn structural_labels(&mut self, h: &FiniteGroup, ambient_order: usize) -> Vec<DicksonLabel> {
        let n = h.order();
        let p = self.field.p() as usize;
        let orders = h.element_orders();
        let abelian = h.is_abelian();
        let mut out = Vec::new();
        if n == 1 {
            out.push(DicksonLabel::Cyclic { n: 1 });
            return out;
        }
        let rank = exact_log(n, p);
        if abelian {
            if let Some(r) = rank {
                if orders.iter().all(|&o| o == 1 || o == p) {
                    out.push(DicksonLabel::ElemAbelianP { p: p as u32, rank: r });
                }
            }
            if orders.contains(&n) {
                out.push(DicksonLabel::Cyclic { n: n as u64 });
            }
        } else if let Some((a, c)) = semidirect_shape(h, &orders, p) {
            out.push(DicksonLabel::SemidirectAC { a: a as u64, c: c as u64 });
        }
        if is_dihedral(h, &orders) {
            out.push(DicksonLabel::Dihedral { order: n as u64 });
        }
        for (label, size) in [(DicksonLabel::A4, 12), (DicksonLabel::S4, 24), (DicksonLabel::A5, 60)] {
            if n == size && self.isomorphic_to(h, label) {
                out.push(label);
            }
        }
        for q0 in self.field.subfield_orders() {
            let label = DicksonLabel::PSL2 { q0 };
            if label.order() as usize == n && (n == ambient_order || self.isomorphic_to(h, label)) {
                out.push(label);
            }
        }
        for q0 in self.field.subfield_orders() {
            let label = DicksonLabel::PGL2 { q0 };
            if q0 % 2 == 1
                && label.order() as usize == n
                && label.allowed_in(&self.field)
                && self.isomorphic_to(h, label)
            {
                out.push(label);
            }
        }
        out
    }

    fn isomorphic_to(&mut self, h: &FiniteGroup, label: DicksonLabel) -> bool {
        let m = self.model(label);
        order_profile(m) == order_profile(h) && h.find_isomorphism(m).is_some()
    }
}

fn exact_log(mut n: usize, p: usize) -> Option<u32> {
    let mut k = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return None;
        }
        n /= p;
        k += 1;
    }
    Some(k)
}

/// `(|A|, |C|)` when the non-abelian group `h` has a normal elementary
/// abelian Sylow `p`-subgroup `A` with a cyclic complement `C != 1`.
fn semidirect_shape(h: &FiniteGroup, orders: &[usize], p: usize) -> Option<(usize, usize)> {
    let a: Vec<usize> = (0..h.order()).filter(|&x| orders[x] == 1 || orders[x] == p).collect();
    if a.len() <= 1 || a.len() == h.order() || !h.order().is_multiple_of(a.len()) {
        return None;
    }
    let c = h.order() / a.len();
    if c.is_multiple_of(p) || h.closure(&a).len() != a.len() || !h.is_abelian_set(&a) || !h.is_normal(&a, &h.all()) {
        return None;
    }
    orders.contains(&c).then_some((a.len(), c))
}

/// Dihedral of order `n >= 4`: a cyclic subgroup of index two whose
/// complement consists of involutions.
fn is_dihedral(h: &FiniteGroup, orders: &[usize]) -> bool {
    let n = h.order();
    if n < 4 || n % 2 == 1 {
        return false;
    }
    (0..n).filter(|&r| orders[r] == n / 2).any(|r| {
        let rot = h.bitset(&h.closure(&[r]));
        (0..n).all(|x| rot.contains(x) || orders[x] == 2)
    })
}

/// An element `g` with `g H g^-1` upper triangular, when one exists.
pub fn upper_triangular_conjugator(t: &TabulatedGroup, elements: &[usize]) -> Option<usize> {
    let g = t.table();
    (0..g.order()).find(|&c| elements.iter().all(|&h| t.matrix(g.conj(c, h)).c.is_zero()))
}
