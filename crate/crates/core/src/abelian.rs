//! Structure of finite abelian groups from element-order statistics.
//!
//! For an abelian group the number of elements killed by `p^k` is
//! `p^(sum_i min(k, e_i))` where `p^e_i` are the `p`-primary cyclic factors,
//! so the counts for `k = 1, 2, ...` determine the primary decomposition.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

/// A finite abelian group up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianInvariants {
    /// `d_1 | d_2 | ... | d_r`, all greater than 1; empty for the trivial group.
    pub invariant_factors: Vec<u64>,
    /// Prime-power orders of the cyclic factors, sorted.
    pub primary: Vec<u64>,
}

impl AbelianInvariants {
    pub fn trivial() -> AbelianInvariants {
        AbelianInvariants { invariant_factors: vec![], primary: vec![] }
    }

    pub fn cyclic(n: u64) -> AbelianInvariants {
        AbelianInvariants::from_primary(factor(n).into_iter().map(|(p, k)| p.pow(k)).collect())
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    /// Builds invariant factors from prime-power cyclic orders.
    pub fn from_primary(mut primary: Vec<u64>) -> AbelianInvariants {
        primary.retain(|&x| x > 1);
        primary.sort_unstable();
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &pp in &primary {
            let p = factor(pp)[0].0;
            by_prime.entry(p).or_default().push(pp);
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for parts in by_prime.values() {
            // largest powers go to the last factors
            for (i, &pp) in parts.iter().rev().enumerate() {
                factors[rank - 1 - i] *= pp;
            }
        }
        AbelianInvariants { invariant_factors: factors, primary }
    }

    /// Decomposition from the number of elements of each order, assuming the
    /// group is abelian.
    pub fn from_order_counts(counts: &HashMap<usize, usize>) -> AbelianInvariants {
        let n: usize = counts.values().sum();
        let mut primary = Vec::new();
        for (p, _) in factor(n as u64) {
            let p = p as usize;
            // exponents of N_k = #{x : x^(p^k) = 1}
            let mut logs = vec![0u32];
            let mut k = 1;
            loop {
                let pk = p.pow(k);
                let nk: usize = counts.iter().filter(|(&o, _)| pk % o == 0).map(|(_, &c)| c).sum();
                let l = ilog(nk as u64, p as u64);
                if l == *logs.last().unwrap() {
                    break;
                }
                logs.push(l);
                k += 1;
            }
            // number of factors with exponent >= k
            let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
            for k in 0..at_least.len() {
                let next = at_least.get(k + 1).copied().unwrap_or(0);
                for _ in 0..(at_least[k] - next) {
                    primary.push((p as u64).pow(k as u32 + 1));
                }
            }
        }
        AbelianInvariants::from_primary(primary)
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("C{d}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

fn ilog(mut n: u64, p: u64) -> u32 {
    let mut l = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0, "count is not a prime power");
        n /= p;
        l += 1;
    }
    l
}

/// Prime factorization as `(prime, exponent)` pairs.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
