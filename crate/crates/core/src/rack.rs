//! Finite racks: tables, conjugation racks, subrack closure, minimality and
//! embedding search.
//!
//! A rack is minimal non-abelian when it is not abelian but every proper
//! subrack is. Testing this only needs pair closures: if `x ▷ y != y` and
//! the subrack generated by `{x, y}` is all of `R` for every such pair, then
//! any proper subrack is abelian (a non-commuting pair inside it would
//! generate `R`). Conversely a non-commuting pair generating a proper
//! subrack exhibits a non-abelian proper subrack. Pairs only need to be
//! checked for one `x` per orbit of the inner group, since inner maps are
//! rack automorphisms.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::finite::FiniteGroup;

/// Default bound on the target size in embedding searches.
pub const DEFAULT_EMBEDDING_BOUND: usize = 120;
/// Racks up to this size are enumerated through all subsets.
pub const POWER_SET_LIMIT: usize = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RackError {
    #[error("seed set is empty")]
    EmptySeed,
    #[error("element {0} is not in the rack")]
    NotInRack(usize),
    #[error("carrier is not closed under conjugation: {x} ▷ {y} leaves it")]
    NotClosed { x: usize, y: usize },
    #[error("rack of size {size} exceeds the bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("rack axiom fails: {0}")]
    Axiom(String),
}

/// A rack on `0..n` given by its full operation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRack {
    n: usize,
    table: Vec<u32>,
}

impl FiniteRack {
    /// Builds the table of `op` and verifies both rack axioms.
    pub fn from_fn(n: usize, op: impl Fn(usize, usize) -> usize) -> Result<FiniteRack, RackError> {
        let r = Self::from_fn_unchecked(n, op);
        r.check_axioms()?;
        Ok(r)
    }

    pub fn from_fn_unchecked(n: usize, op: impl Fn(usize, usize) -> usize) -> FiniteRack {
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                table.push(op(x, y) as u32);
            }
        }
        FiniteRack { n, table }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `x ▷ y`.
    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    /// Left translations are bijections and `▷` is self-distributive.
    pub fn check_axioms(&self) -> Result<(), RackError> {
        let n = self.n;
        for x in 0..n {
            let mut seen = FixedBitSet::with_capacity(n);
            for y in 0..n {
                let z = self.op(x, y);
                if z >= n || seen.put(z) {
                    return Err(RackError::Axiom(format!("left translation by {x} is not a bijection")));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.op(x, y);
                for z in 0..n {
                    if self.op(x, self.op(y, z)) != self.op(xy, self.op(x, z)) {
                        return Err(RackError::Axiom(format!("self-distributivity fails at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_quandle(&self) -> bool {
        (0..self.n).all(|x| self.op(x, x) == x)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|x| (0..self.n).all(|y| self.op(x, y) == y))
    }

    pub fn is_abelian_subset(&self, set: &[usize]) -> bool {
        set.iter().all(|&x| set.iter().all(|&y| self.op(x, y) == y))
    }

    pub fn is_subrack(&self, set: &[usize]) -> bool {
        let mut m = FixedBitSet::with_capacity(self.n);
        for &x in set {
            m.insert(x);
        }
        !set.is_empty() && set.iter().all(|&x| set.iter().all(|&y| m.contains(self.op(x, y))))
    }

    /// The least subrack containing `seed`, sorted.
    pub fn subrack_closure(&self, seed: &[usize]) -> Result<Vec<usize>, RackError> {
        if seed.is_empty() {
            return Err(RackError::EmptySeed);
        }
        if let Some(&x) = seed.iter().find(|&&x| x >= self.n) {
            return Err(RackError::NotInRack(x));
        }
        let mut members = FixedBitSet::with_capacity(self.n);
        let mut elems: Vec<usize> = Vec::new();
        for &s in seed {
            if !members.put(s) {
                elems.push(s);
            }
        }
        self.close(&mut members, &mut elems, 0);
        elems.sort_unstable();
        debug_assert!(self.translations_permute(&elems));
        Ok(elems)
    }

    /// Extends `elems` to a subrack. Pairs among `elems[..done]` are assumed
    /// to be handled already.
    fn close(&self, members: &mut FixedBitSet, elems: &mut Vec<usize>, done: usize) {
        let mut i = done;
        while i < elems.len() {
            let z = elems[i];
            let mut j = 0;
            while j <= i {
                let y = elems[j];
                for w in [self.op(z, y), self.op(y, z)] {
                    if !members.put(w) {
                        elems.push(w);
                    }
                }
                j += 1;
            }
            i += 1;
        }
    }

    /// In a finite subrack every left translation restricts to a
    /// permutation; asserted after each closure.
    fn translations_permute(&self, set: &[usize]) -> bool {
        let mut m = FixedBitSet::with_capacity(self.n);
        for &x in set {
            m.insert(x);
        }
        set.iter().all(|&x| {
            let mut img = FixedBitSet::with_capacity(self.n);
            for &y in set {
                img.insert(self.op(x, y));
            }
            img == m
        })
    }

    /// Orbits of the inner group generated by all left translations.
    pub fn inner_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut orbits = Vec::new();
        for s in 0..self.n {
            if seen.put(s) {
                continue;
            }
            let mut orbit = vec![s];
            let mut i = 0;
            while i < orbit.len() {
                let y = orbit[i];
                for x in 0..self.n {
                    let z = self.op(x, y);
                    if !seen.put(z) {
                        orbit.push(z);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// A non-commuting pair generating a proper subrack, if any.
    pub fn proper_nonabelian_witness(&self) -> Option<(usize, usize, Vec<usize>)> {
        for orbit in self.inner_orbits() {
            let x = orbit[0];
            for y in 0..self.n {
                if self.op(x, y) != y {
                    let c = self.subrack_closure(&[x, y]).unwrap();
                    if c.len() < self.n {
                        return Some((x, y, c));
                    }
                }
            }
        }
        None
    }

    /// Pair-closure criterion for minimal non-abelian racks.
    pub fn is_minimal_nonabelian(&self) -> bool {
        !self.is_abelian() && self.proper_nonabelian_witness().is_none()
    }

    /// The literal definition over the full subrack lattice: non-abelian and
    /// every proper subrack abelian. Only for racks small enough for a
    /// power-set scan.
    pub fn is_minimal_nonabelian_by_definition(&self) -> Result<bool, RackError> {
        if self.is_abelian() {
            return Ok(false);
        }
        let subs = self.enumerate_subracks(self.n)?;
        Ok(subs.iter().filter(|s| s.len() < self.n).all(|s| self.is_abelian_subset(s)))
    }

    /// Subracks of size at most `max_size`. Exhaustive for racks with at
    /// most [`POWER_SET_LIMIT`] elements; otherwise the subracks generated
    /// by at most three elements. Sorted by size, then lexicographically.
    pub fn enumerate_subracks(&self, max_size: usize) -> Result<Vec<Vec<usize>>, RackError> {
        let mut out = if self.n <= POWER_SET_LIMIT { self.subracks_by_power_set() } else { self.subracks_by_seeds(3) };
        out.retain(|s| s.len() <= max_size);
        out.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    pub fn enumeration_is_exhaustive(&self) -> bool {
        self.n <= POWER_SET_LIMIT
    }

    fn subracks_by_power_set(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let phi: Vec<u32> = (0..n * n).map(|i| 1u32 << self.table[i]).collect();
        let mut out = Vec::new();
        for mask in 1u32..(1u32 << n) {
            let closed = (0..n)
                .filter(|&x| mask >> x & 1 == 1)
                .all(|x| (0..n).filter(|&y| mask >> y & 1 == 1).all(|y| phi[x * n + y] & mask != 0));
            if closed {
                out.push((0..n).filter(|&x| mask >> x & 1 == 1).collect());
            }
        }
        out
    }

    /// Closures of all seed sets with at most `depth` elements: singletons,
    /// pair closures, then each distinct closure extended by one element,
    /// repeated.
    pub fn subracks_by_seeds(&self, depth: usize) -> Vec<Vec<usize>> {
        let mut found: HashSet<Vec<usize>> = HashSet::new();
        let mut layer: Vec<Vec<usize>> = (0..self.n).map(|x| vec![x]).collect();
        found.extend(layer.iter().cloned());
        for _ in 1..depth {
            let mut next = Vec::new();
            for base in &layer {
                let mut members = FixedBitSet::with_capacity(self.n);
                for &x in base {
                    members.insert(x);
                }
                for z in 0..self.n {
                    if members.contains(z) || z < base[0] && base.len() == 1 {
                        continue;
                    }
                    let mut m = members.clone();
                    m.insert(z);
                    let mut elems = base.clone();
                    elems.push(z);
                    self.close(&mut m, &mut elems, base.len());
                    elems.sort_unstable();
                    if found.insert(elems.clone()) {
                        next.push(elems);
                    }
                }
            }
            layer = next;
        }
        found.into_iter().collect()
    }

    /// Cycle type of the left translation by `x`, sorted.
    fn translation_profile(&self, x: usize) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut cycles = Vec::new();
        for s in 0..self.n {
            if seen.put(s) {
                continue;
            }
            let mut len = 1;
            let mut y = self.op(x, s);
            while y != s {
                seen.insert(y);
                y = self.op(x, y);
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable();
        cycles
    }

    /// Fewest elements found greedily whose closure is the whole rack.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        while current.len() < self.n {
            let mut member = FixedBitSet::with_capacity(self.n);
            for &x in &current {
                member.insert(x);
            }
            let (best, closure) = (0..self.n)
                .filter(|&z| !member.contains(z))
                .map(|z| {
                    let mut seed = gens.clone();
                    seed.push(z);
                    (z, self.subrack_closure(&seed).unwrap())
                })
                .max_by_key(|(z, c)| (c.len(), std::cmp::Reverse(*z)))
                .unwrap();
            gens.push(best);
            current = closure;
        }
        gens
    }
}

/// Searches for an injective rack homomorphism `s -> r`. When the racks
/// have equal size the search is an isomorphism search and candidates are
/// pruned by the cycle type of their left translations.
pub fn find_rack_embedding(s: &FiniteRack, r: &FiniteRack) -> Result<Option<Vec<usize>>, RackError> {
    find_rack_embedding_bounded(s, r, DEFAULT_EMBEDDING_BOUND)
}

pub fn find_rack_embedding_bounded(
    s: &FiniteRack,
    r: &FiniteRack,
    bound: usize,
) -> Result<Option<Vec<usize>>, RackError> {
    if r.len() > bound {
        return Err(RackError::TooLarge { size: r.len(), bound });
    }
    if s.len() > r.len() || s.is_empty() {
        return Ok(None);
    }
    if !s.is_abelian() && r.is_abelian() {
        return Ok(None);
    }
    let iso = s.len() == r.len();
    let s_prof: Vec<Vec<usize>> = if iso { (0..s.len()).map(|x| s.translation_profile(x)).collect() } else { vec![] };
    let r_prof: Vec<Vec<usize>> = if iso { (0..r.len()).map(|x| r.translation_profile(x)).collect() } else { vec![] };
    let gens = s.generators();
    let orbit_reps: HashSet<usize> = r.inner_orbits().into_iter().map(|o| o[0]).collect();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            (0..r.len())
                .filter(|&y| !iso || s_prof[g] == r_prof[y])
                .filter(|&y| s.op(g, g) != g || r.op(y, y) == y)
                // composing with inner automorphisms of r moves the first
                // image to its orbit representative
                .filter(|&y| i > 0 || orbit_reps.contains(&y))
                .collect()
        })
        .collect();
    let mut map = vec![usize::MAX; s.len()];
    Ok(embed_search(s, r, &gens, &candidates, 0, &mut map))
}

fn embed_search(
    s: &FiniteRack,
    r: &FiniteRack,
    gens: &[usize],
    candidates: &[Vec<usize>],
    depth: usize,
    map: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if depth == gens.len() {
        return Some(map.clone());
    }
    for &y in &candidates[depth] {
        let mut trial = map.clone();
        if propagate(s, r, &mut trial, gens[depth], y) {
            if let Some(done) = embed_search(s, r, gens, candidates, depth + 1, &mut trial) {
                *map = done;
                return Some(map.clone());
            }
        }
    }
    None
}

/// Assigns `x -> y` and closes the partial map under `f(a ▷ b) = f(a) ▷ f(b)`,
/// failing on any inconsistency or loss of injectivity.
fn propagate(s: &FiniteRack, r: &FiniteRack, map: &mut [usize], x: usize, y: usize) -> bool {
    let mut used = FixedBitSet::with_capacity(r.len());
    let mut assigned: Vec<usize> = Vec::new();
    for (a, &b) in map.iter().enumerate() {
        if b != usize::MAX {
            used.insert(b);
            assigned.push(a);
        }
    }
    if map[x] != usize::MAX {
        return map[x] == y;
    }
    if used.contains(y) {
        return false;
    }
    map[x] = y;
    used.insert(y);
    let start = assigned.len();
    assigned.push(x);
    let mut i = start;
    while i < assigned.len() {
        let a = assigned[i];
        let mut j = 0;
        while j <= i {
            let b = assigned[j];
            for (u, v) in [(a, b), (b, a)] {
                let su = s.op(u, v);
                let ru = r.op(map[u], map[v]);
                if map[su] == usize::MAX {
                    if used.contains(ru) {
                        return false;
                    }
                    map[su] = ru;
                    used.insert(ru);
                    assigned.push(su);
                } else if map[su] != ru {
                    return false;
                }
            }
            j += 1;
        }
        i += 1;
    }
    true
}

/// A union of conjugacy classes of a table group, as a rack under
/// `x ▷ y = x y x^-1`.
#[derive(Clone, Debug)]
pub struct ConjRack {
    carrier: Vec<usize>,
    rack: FiniteRack,
}

impl ConjRack {
    /// The rack on `carrier`, which must be closed under conjugation by its
    /// own elements.
    pub fn new(group: &FiniteGroup, carrier: &[usize]) -> Result<ConjRack, RackError> {
        let mut carrier = carrier.to_vec();
        carrier.sort_unstable();
        carrier.dedup();
        let mut pos = vec![usize::MAX; group.order()];
        for (i, &x) in carrier.iter().enumerate() {
            pos[x] = i;
        }
        for &x in &carrier {
            for &y in &carrier {
                if pos[group.conj(x, y)] == usize::MAX {
                    return Err(RackError::NotClosed { x, y });
                }
            }
        }
        let rack = FiniteRack::from_fn_unchecked(carrier.len(), |i, j| pos[group.conj(carrier[i], carrier[j])]);
        Ok(ConjRack { carrier, rack })
    }

    pub fn rack(&self) -> &FiniteRack {
        &self.rack
    }

    /// Group elements, indexed by rack element.
    pub fn carrier(&self) -> &[usize] {
        &self.carrier
    }

    pub fn to_group(&self, set: &[usize]) -> Vec<usize> {
        set.iter().map(|&i| self.carrier[i]).collect()
    }

    pub fn from_group(&self, elems: &[usize]) -> Option<Vec<usize>> {
        elems.iter().map(|x| self.carrier.binary_search(x).ok()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{dihedral_group, symmetric_group};

    /// Racks of size <= 4 on which the literal and the pair-closure notions
    /// of minimality can be compared.
    fn dihedral_rack(n: usize) -> FiniteRack {
        FiniteRack::from_fn(n, |x, y| (2 * x + n - y) % n).unwrap()
    }

    fn trivial_rack(n: usize) -> FiniteRack {
        FiniteRack::from_fn(n, |_, y| y).unwrap()
    }

    fn transpositions_of(k: usize) -> ConjRack {
        let (s, perms) = symmetric_group(k);
        let carrier: Vec<usize> =
            (0..s.order()).filter(|&i| perms[i].iter().enumerate().filter(|(a, &b)| *a != b).count() == 2).collect();
        ConjRack::new(&s, &carrier).unwrap()
    }

    #[test]
    fn closures() {
        let r = dihedral_rack(5);
        assert_eq!(r.subrack_closure(&[2]).unwrap(), vec![2]);
        assert_eq!(r.subrack_closure(&[0, 1]).unwrap().len(), 5);
        assert_eq!(r.subrack_closure(&(0..5).collect::<Vec<_>>()).unwrap().len(), 5);
        assert_eq!(r.subrack_closure(&[]), Err(RackError::EmptySeed));
        let r6 = dihedral_rack(6);
        assert_eq!(r6.subrack_closure(&[0, 2]).unwrap(), vec![0, 2, 4]);
        for a in 0..6 {
            for b in 0..6 {
                let c = r6.subrack_closure(&[a, b]).unwrap();
                assert_eq!(r6.subrack_closure(&c).unwrap(), c);
                assert!(r6.is_subrack(&c));
            }
        }
    }

    #[test]
    fn abelian_and_minimal() {
        assert!(trivial_rack(4).is_abelian());
        assert!(!trivial_rack(4).is_minimal_nonabelian());
        assert!(dihedral_rack(3).is_minimal_nonabelian());
        assert!(dihedral_rack(5).is_minimal_nonabelian());
        // D_6 rack contains the non-abelian D_3 subrack {0, 2, 4}
        assert!(!dihedral_rack(6).is_minimal_nonabelian());
        assert!(dihedral_rack(9).proper_nonabelian_witness().is_some());
    }

    #[test]
    fn subrack_counts() {
        assert_eq!(trivial_rack(5).enumerate_subracks(5).unwrap().len(), 31);
        assert_eq!(trivial_rack(1).enumerate_subracks(1).unwrap().len(), 1);
        // D_3: singletons and the whole rack
        assert_eq!(dihedral_rack(3).enumerate_subracks(3).unwrap().len(), 4);
        let t4 = transpositions_of(4);
        let seeded = t4.rack().subracks_by_seeds(3);
        assert_eq!(seeded.len(), t4.rack().enumerate_subracks(6).unwrap().len());
    }

    #[test]
    fn minimality_criterion_matches_definition() {
        let mut racks = vec![trivial_rack(3), dihedral_rack(3), dihedral_rack(4), dihedral_rack(6), dihedral_rack(7)];
        racks.push(transpositions_of(4).rack().clone());
        let d = dihedral_group(6);
        let reflections: Vec<usize> = (6..12).collect();
        racks.push(ConjRack::new(&d, &reflections).unwrap().rack().clone());
        for r in &racks {
            assert_eq!(r.is_minimal_nonabelian(), r.is_minimal_nonabelian_by_definition().unwrap());
        }
    }

    #[test]
    fn embeddings() {
        let s3 = transpositions_of(3);
        let s4 = transpositions_of(4);
        let f = find_rack_embedding(s3.rack(), s4.rack()).unwrap().unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(f[s3.rack().op(a, b)], s4.rack().op(f[a], f[b]));
            }
        }
        assert!(find_rack_embedding(&dihedral_rack(3), &trivial_rack(5)).unwrap().is_none());
        assert!(find_rack_embedding(&trivial_rack(1), &dihedral_rack(5)).unwrap().is_some());
        assert!(find_rack_embedding(&dihedral_rack(3), &dihedral_rack(5)).unwrap().is_none());
        assert!(find_rack_embedding(s3.rack(), &dihedral_rack(3)).unwrap().is_some());
        assert!(matches!(find_rack_embedding(&trivial_rack(1), &trivial_rack(200)), Err(RackError::TooLarge { .. })));
    }

    #[test]
    fn conjugation_racks_are_racks() {
        let t = transpositions_of(4);
        assert!(t.rack().check_axioms().is_ok());
        assert!(t.rack().is_quandle());
        let (s, perms) = symmetric_group(3);
        let three_cycles: Vec<usize> = (0..6).filter(|&i| perms[i].iter().enumerate().all(|(a, &b)| a != b)).collect();
        assert!(ConjRack::new(&s, &three_cycles).unwrap().rack().is_abelian());
        assert!(matches!(ConjRack::new(&s, &[1, 2]), Err(RackError::NotClosed { .. })));
    }
}
