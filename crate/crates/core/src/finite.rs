//! Finite groups given by a multiplication table on `0..n`.
//!
//! Every concrete group in the crate (matrix groups, permutation
//! realizations of finitely presented groups, subgroups and quotients) is
//! eventually turned into a [`FiniteGroup`], and the brute-force oracles run
//! on that representation.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Hard ceiling on the number of elements of a tabulated group.
pub const MAX_TABLE_ORDER: usize = 6000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group of order {order} exceeds the table bound {bound}")]
    TooLarge { order: usize, bound: usize },
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("subset is not a normal subgroup")]
    NotNormal,
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<u16>,
    inv: Vec<u16>,
    identity: u16,
}

impl FiniteGroup {
    /// Tabulates `mul` on `0..n` and checks the group axioms that a
    /// multiplication table can violate cheaply: closure, identity, inverses
    /// (Latin square property). Associativity is the caller's responsibility
    /// and is spot-checked by [`FiniteGroup::check_associative`].
    pub fn from_fn(n: usize, mut mul: impl FnMut(usize, usize) -> usize) -> Result<Self, GroupError> {
        if n > MAX_TABLE_ORDER {
            return Err(GroupError::TooLarge { order: n, bound: MAX_TABLE_ORDER });
        }
        let mut table = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = mul(i, j);
                if k >= n {
                    return Err(GroupError::NotAGroup(format!("{i}*{j} = {k} out of range")));
                }
                table[i * n + j] = k as u16;
            }
        }
        Self::from_table(n, table)
    }

    pub fn from_table(n: usize, table: Vec<u16>) -> Result<Self, GroupError> {
        if n == 0 || table.len() != n * n {
            return Err(GroupError::NotAGroup("table has the wrong shape".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .ok_or_else(|| GroupError::NotAGroup("no identity".into()))?;
        let mut inv = vec![u16::MAX; n];
        for x in 0..n {
            let mut seen = FixedBitSet::with_capacity(n);
            for y in 0..n {
                let z = table[x * n + y] as usize;
                if seen.put(z) {
                    return Err(GroupError::NotAGroup(format!("row {x} repeats {z}")));
                }
                if z == identity {
                    inv[x] = y as u16;
                }
            }
        }
        Ok(FiniteGroup { n, table, inv, identity: identity as u16 })
    }

    /// Checks associativity on all triples (small groups) or on a strided
    /// sample of triples otherwise.
    pub fn check_associative(&self) -> bool {
        let step = if self.n <= 64 { 1 } else { self.n / 37 + 1 };
        for a in (0..self.n).step_by(step) {
            for b in 0..self.n {
                for c in (0..self.n).step_by(step) {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn identity(&self) -> usize {
        self.identity as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g h g^-1`.
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity() {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.n).map(|a| self.element_order(a)).collect()
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn bitset(&self, elems: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        for &e in elems {
            s.insert(e);
        }
        s
    }

    /// The subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        seen.insert(self.identity());
        let mut out = vec![self.identity()];
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen.put(y) {
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Closure of the subgroup `base` (given as a membership set) together
    /// with extra generators.
    pub fn join(&self, base: &[usize], extra: &[usize]) -> Vec<usize> {
        let mut gens: Vec<usize> = self.generating_set(base);
        gens.extend_from_slice(extra);
        self.closure(&gens)
    }

    /// A small generating set of the subgroup with the given elements,
    /// chosen greedily: repeatedly add the element of largest order not yet
    /// covered.
    pub fn generating_set(&self, subgroup: &[usize]) -> Vec<usize> {
        let mut by_order: Vec<(usize, usize)> = subgroup.iter().map(|&x| (self.element_order(x), x)).collect();
        by_order.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut gens = Vec::new();
        let mut current = FixedBitSet::with_capacity(self.n);
        current.insert(self.identity());
        let mut size = 1;
        for (_, x) in by_order {
            if size == subgroup.len() {
                break;
            }
            if !current.contains(x) {
                gens.push(x);
                let c = self.closure(&gens);
                size = c.len();
                current = self.bitset(&c);
            }
        }
        gens
    }

    /// Generators of the whole group.
    pub fn generators(&self) -> Vec<usize> {
        self.generating_set(&self.all())
    }

    /// Orbit of `x` under conjugation by the elements of `gens` (and hence by
    /// the subgroup they generate), sorted.
    pub fn conjugation_orbit(&self, x: usize, gens: &[usize]) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(self.n);
        seen.insert(x);
        let mut out = vec![x];
        let mut i = 0;
        while i < out.len() {
            let y = out[i];
            for &g in gens {
                let z = self.conj(g, y);
                if !seen.put(z) {
                    out.push(z);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Conjugacy classes, ordered by least element; each class sorted.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        self.classes_under(&self.all(), &self.generators())
    }

    /// Partition of the normal subset `set` into orbits under conjugation by
    /// the group generated by `gens`.
    pub fn classes_under(&self, set: &[usize], gens: &[usize]) -> Vec<Vec<usize>> {
        let mut done = FixedBitSet::with_capacity(self.n);
        let mut classes = Vec::new();
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        for x in sorted {
            if done.contains(x) {
                continue;
            }
            let orbit = self.conjugation_orbit(x, gens);
            for &y in &orbit {
                done.insert(y);
            }
            classes.push(orbit);
        }
        classes
    }

    /// Class index of every element.
    pub fn class_map(&self, classes: &[Vec<usize>]) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.n];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                map[x] = i;
            }
        }
        map
    }

    pub fn centralizer(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&g| self.mul(g, x) == self.mul(x, g)).collect()
    }

    /// Centralizer of `x` inside the given subset.
    pub fn centralizer_in(&self, x: usize, within: &[usize]) -> Vec<usize> {
        within.iter().copied().filter(|&g| self.mul(g, x) == self.mul(x, g)).collect()
    }

    pub fn center(&self) -> Vec<usize> {
        let gens = self.generators();
        (0..self.n).filter(|&z| gens.iter().all(|&g| self.mul(g, z) == self.mul(z, g))).collect()
    }

    pub fn is_abelian_set(&self, set: &[usize]) -> bool {
        set.iter().all(|&a| set.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.generators();
        self.is_abelian_set(&g)
    }

    /// Least subgroup containing `set` and normalized by `normalizers`.
    pub fn normal_closure(&self, set: &[usize], normalizers: &[usize]) -> Vec<usize> {
        let mut current = self.closure(set);
        loop {
            let members = self.bitset(&current);
            let gens = self.generating_set(&current);
            let mut extra = Vec::new();
            for &g in normalizers {
                for &h in &gens {
                    let c = self.conj(g, h);
                    if !members.contains(c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return current;
            }
            extra.extend(gens);
            current = self.closure(&extra);
        }
    }

    /// Derived subgroup of the subgroup with the given elements.
    pub fn derived_subgroup(&self, subgroup: &[usize]) -> Vec<usize> {
        let gens = self.generating_set(subgroup);
        let mut comms = Vec::new();
        for &a in &gens {
            for &b in &gens {
                comms.push(self.commutator(a, b));
            }
        }
        self.normal_closure(&comms, &gens)
    }

    pub fn is_normal(&self, sub: &[usize], within: &[usize]) -> bool {
        let members = self.bitset(sub);
        let gens = self.generating_set(within);
        let sub_gens = self.generating_set(sub);
        gens.iter().all(|&g| sub_gens.iter().all(|&h| members.contains(self.conj(g, h))))
    }

    /// Least `k >= 1` with `a^k` in the subgroup `n` (the order of `aN` in
    /// a quotient).
    pub fn order_modulo(&self, a: usize, n: &FixedBitSet) -> usize {
        let mut k = 1;
        let mut x = a;
        while !n.contains(x) {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// The subgroup with the given elements as a group in its own right,
    /// together with the embedding (index in the subgroup -> element here).
    pub fn induced(&self, subgroup: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        let elems: Vec<usize> = subgroup.to_vec();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &x) in elems.iter().enumerate() {
            pos[x] = i;
        }
        let g = FiniteGroup::from_fn(elems.len(), |i, j| {
            let k = pos[self.mul(elems[i], elems[j])];
            if k == usize::MAX {
                elems.len()
            } else {
                k
            }
        })?;
        Ok((g, elems))
    }

    /// The quotient by a normal subgroup, with the projection of every
    /// element. Cosets are numbered by their least element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_normal(normal, &self.all()) {
            return Err(GroupError::NotNormal);
        }
        let mut proj = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if proj[x] != usize::MAX {
                continue;
            }
            let idx = reps.len();
            reps.push(x);
            for &k in normal {
                proj[self.mul(x, k)] = idx;
            }
        }
        let q = FiniteGroup::from_fn(reps.len(), |i, j| proj[self.mul(reps[i], reps[j])])?;
        Ok((q, proj))
    }

    /// Spanning tree of the Cayley graph for `gens`: for each element other
    /// than the identity, `(parent, generator index)` with
    /// `element = parent * gens[generator]`, plus BFS order.
    fn cayley_tree(&self, gens: &[usize]) -> (Vec<(usize, usize)>, Vec<usize>) {
        let mut parent = vec![(usize::MAX, usize::MAX); self.n];
        let mut order = vec![self.identity()];
        let mut seen = FixedBitSet::with_capacity(self.n);
        seen.insert(self.identity());
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for (k, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                if !seen.put(y) {
                    parent[y] = (x, k);
                    order.push(y);
                }
            }
            i += 1;
        }
        (parent, order)
    }

    /// Tries to extend `gens[i] -> images[i]` to a homomorphism into `other`.
    /// Returns the full map when it is well defined.
    pub fn extend_hom(&self, gens: &[usize], images: &[usize], other: &FiniteGroup) -> Option<Vec<usize>> {
        let (parent, order) = self.cayley_tree(gens);
        if order.len() != self.n {
            return None;
        }
        self.extend_with_tree(gens, images, other, &parent, &order)
    }

    fn extend_with_tree(
        &self,
        gens: &[usize],
        images: &[usize],
        other: &FiniteGroup,
        parent: &[(usize, usize)],
        order: &[usize],
    ) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.n];
        map[self.identity()] = other.identity();
        for &x in &order[1..] {
            let (p, k) = parent[x];
            map[x] = other.mul(map[p], images[k]);
        }
        for x in 0..self.n {
            for (k, &g) in gens.iter().enumerate() {
                if map[self.mul(x, g)] != other.mul(map[x], images[k]) {
                    return None;
                }
            }
        }
        Some(map)
    }

    /// Searches for an isomorphism `self -> other`. The image of the first
    /// generator ranges over one representative per conjugacy class of
    /// `other`, which loses nothing since inner automorphisms can be
    /// composed afterwards.
    pub fn find_isomorphism(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        if self.n != other.n {
            return None;
        }
        let mine = order_profile(self);
        if mine != order_profile(other) {
            return None;
        }
        let gens = self.generators();
        let (parent, order) = self.cayley_tree(&gens);
        let other_orders = other.element_orders();
        let reps: FixedBitSet = {
            let mut s = FixedBitSet::with_capacity(other.n);
            for c in other.conjugacy_classes() {
                s.insert(c[0]);
            }
            s
        };
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let o = self.element_order(g);
                (0..other.n).filter(|&h| other_orders[h] == o && (i > 0 || reps.contains(h))).collect()
            })
            .collect();
        let mut images = vec![0usize; gens.len()];
        self.iso_search(&gens, &candidates, 0, &mut images, other, &parent, &order)
    }

    #[allow(clippy::too_many_arguments)]
    fn iso_search(
        &self,
        gens: &[usize],
        candidates: &[Vec<usize>],
        depth: usize,
        images: &mut Vec<usize>,
        other: &FiniteGroup,
        parent: &[(usize, usize)],
        order: &[usize],
    ) -> Option<Vec<usize>> {
        if depth == gens.len() {
            if other.closure(images).len() != other.n {
                return None;
            }
            let map = self.extend_with_tree(gens, images, other, parent, order)?;
            let mut hit = FixedBitSet::with_capacity(other.n);
            for &y in &map {
                hit.insert(y);
            }
            return (hit.count_ones(..) == other.n).then_some(map);
        }
        for &h in &candidates[depth] {
            // Orders of products of pairs of generators must match.
            let ok = (0..depth).all(|j| {
                self.element_order(self.mul(gens[j], gens[depth])) == other.element_order(other.mul(images[j], h))
            });
            if !ok {
                continue;
            }
            images[depth] = h;
            if let Some(m) = self.iso_search(gens, candidates, depth + 1, images, other, parent, order) {
                return Some(m);
            }
        }
        None
    }

    /// Number of elements of each order.
    pub fn order_counts(&self, set: &[usize]) -> HashMap<usize, usize> {
        let mut counts = HashMap::new();
        for &x in set {
            *counts.entry(self.element_order(x)).or_insert(0) += 1;
        }
        counts
    }
}

/// Sorted `(element order, count)` pairs, an isomorphism invariant.
pub fn order_profile(g: &FiniteGroup) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = g.order_counts(&g.all()).into_iter().collect();
    v.sort_unstable();
    v
}

/// The symmetric group on `0..k` as a table group, elements in
/// lexicographic order of their images (identity first).
pub fn symmetric_group(k: usize) -> (FiniteGroup, Vec<Vec<usize>>) {
    permutation_group(&all_permutations(k))
}

/// Even permutations of `0..k`.
pub fn alternating_group(k: usize) -> (FiniteGroup, Vec<Vec<usize>>) {
    let perms: Vec<Vec<usize>> = all_permutations(k).into_iter().filter(|p| is_even(p)).collect();
    permutation_group(&perms)
}

/// Table group of a set of permutations closed under composition, where
/// `(s * t)(i) = s(t(i))`.
pub fn permutation_group(perms: &[Vec<usize>]) -> (FiniteGroup, Vec<Vec<usize>>) {
    let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let g = FiniteGroup::from_fn(perms.len(), |i, j| {
        let c: Vec<usize> = perms[j].iter().map(|&x| perms[i][x]).collect();
        index[&c]
    })
    .expect("permutations closed under composition");
    (g, perms.to_vec())
}

pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn is_even(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 0
}

/// Cyclic group of order `n`.
pub fn cyclic_group(n: usize) -> FiniteGroup {
    FiniteGroup::from_fn(n, |i, j| (i + j) % n).expect("cyclic group")
}

/// Dihedral group of order `2n`: elements `r^i` (index `i`) and `s r^i`
/// (index `n + i`).
pub fn dihedral_group(n: usize) -> FiniteGroup {
    FiniteGroup::from_fn(2 * n, |x, y| {
        let (fx, ix) = (x / n, x % n);
        let (fy, iy) = (y / n, y % n);
        // s^a r^i s^b r^j = s^(a+b) r^((-1)^b i + j)
        let i = if fy == 1 { (n - ix) % n } else { ix };
        ((fx + fy) % 2) * n + (i + iy) % n
    })
    .expect("dihedral group")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_models() {
        let (s3, _) = symmetric_group(3);
        assert_eq!(s3.order(), 6);
        assert!(s3.check_associative());
        assert!(!s3.is_abelian());
        assert_eq!(s3.conjugacy_classes().len(), 3);
        assert_eq!(s3.center().len(), 1);
        assert_eq!(s3.derived_subgroup(&s3.all()).len(), 3);

        let (a5, _) = alternating_group(5);
        let mut sizes: Vec<usize> = a5.conjugacy_classes().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
        assert_eq!(a5.derived_subgroup(&a5.all()).len(), 60);

        let d8 = dihedral_group(4);
        assert!(d8.check_associative());
        assert_eq!(d8.center().len(), 2);
        assert_eq!(d8.derived_subgroup(&d8.all()).len(), 2);
        assert_eq!(cyclic_group(7).generators().len(), 1);
    }

    #[test]
    fn isomorphisms() {
        let (s3, _) = symmetric_group(3);
        let d6 = dihedral_group(3);
        let map = s3.find_isomorphism(&d6).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(map[s3.mul(a, b)], d6.mul(map[a], map[b]));
            }
        }
        assert!(cyclic_group(6).find_isomorphism(&d6).is_none());
        let (s4, _) = symmetric_group(4);
        assert!(dihedral_group(12).find_isomorphism(&s4).is_none());
        let (a4, _) = alternating_group(4);
        assert!(dihedral_group(6).find_isomorphism(&a4).is_none());
    }

    #[test]
    fn quotients_and_subgroups() {
        let (s4, _) = symmetric_group(4);
        let classes = s4.conjugacy_classes();
        let v4: Vec<usize> = classes.iter().find(|c| c.len() == 3).unwrap().clone();
        let v4 = s4.closure(&v4);
        assert_eq!(v4.len(), 4);
        let (q, proj) = s4.quotient(&v4).unwrap();
        assert_eq!(q.order(), 6);
        assert!(!q.is_abelian());
        for a in 0..24 {
            for b in 0..24 {
                assert_eq!(proj[s4.mul(a, b)], q.mul(proj[a], proj[b]));
            }
        }
        let c3 = s4.closure(&[s4.conjugacy_classes().iter().find(|c| c.len() == 8).unwrap()[0]]);
        assert!(s4.quotient(&c3).is_err());
        let (h, emb) = s4.induced(&v4).unwrap();
        assert!(h.is_abelian());
        assert_eq!(emb.len(), 4);
    }

    #[test]
    fn rejects_non_groups() {
        assert!(FiniteGroup::from_fn(3, |i, j| i.max(j)).is_err());
        assert!(FiniteGroup::from_fn(MAX_TABLE_ORDER + 1, |_, _| 0).is_err());
    }
}
