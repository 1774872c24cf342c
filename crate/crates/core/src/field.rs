//! Exact arithmetic in the finite fields GF(p^n).
//!
//! A field is built from the lexicographically least monic irreducible
//! polynomial of degree `n` over GF(p). Elements are stored as their index in
//! the field's total order: the base-`p` digits of the index are the
//! coefficients `(c_{n-1}, ..., c_0)` of the reduced polynomial representative,
//! most significant digit first. For prime fields the index is the residue.
//!
//! Multiplication goes through discrete log tables built from the first
//! primitive element found by scanning in the total order; addition uses a
//! precomputed table. Fields are cached per `(p, n)`, so building the same
//! field twice returns a handle to the same tables.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

/// Largest field order accepted by [`build_field`].
pub const DEFAULT_MAX_FIELD_ORDER: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the configured bound {bound}")]
    TooLarge { p: u32, n: u32, bound: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("elements belong to different fields (GF({0}) and GF({1}))")]
    MixedFields(u32, u32),
    #[error("GF({sub}) is not a subfield of GF({q})")]
    NotSubfield { sub: u32, q: u32 },
}

/// An element of a finite field, identified by its position in the field's
/// total order. Only meaningful together with the [`Field`] it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Elem(pub u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct FieldInner {
    p: u32,
    n: u32,
    q: u32,
    /// Monic modulus, little-endian coefficients, length n + 1.
    modulus: Vec<u32>,
    add: Vec<u16>,
    neg: Vec<u16>,
    /// exp[k] = g^k for k in 0..2(q-1).
    exp: Vec<u16>,
    /// log[a] for a != 0.
    log: Vec<u32>,
    generator: Elem,
}

/// The finite field GF(p^n). Cheap to clone.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.n == other.inner.n
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {}", self.p(), self.n(), self.modulus_string())
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^n`, or returns `None` when `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut m = q;
    let mut n = 0;
    while m.is_multiple_of(p) {
        m /= p;
        n += 1;
    }
    (m == 1).then_some((p, n))
}

/// Builds GF(p^n) with the default order bound.
pub fn build_field(p: u32, n: u32) -> Result<Field, FieldError> {
    build_field_bounded(p, n, DEFAULT_MAX_FIELD_ORDER)
}

/// Builds GF(q) for a prime power `q`.
pub fn field_of_order(q: u32) -> Result<Field, FieldError> {
    let (p, n) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    build_field(p, n)
}

pub fn build_field_bounded(p: u32, n: u32, bound: u32) -> Result<Field, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = (p as u64).checked_pow(n).filter(|&q| q <= bound as u64);
    let q = match q {
        Some(q) if q <= u16::MAX as u64 => q as u32,
        _ => return Err(FieldError::TooLarge { p, n, bound }),
    };

    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let field = Field { inner: Arc::new(FieldInner::new(p, n, q)) };
    cache.lock().unwrap().insert((p, n), field.clone());
    Ok(field)
}

mod poly {
    //! Dense polynomials over GF(p), little-endian, used only while building
    //! a field's tables.

    pub fn trim(mut f: Vec<u32>) -> Vec<u32> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut base = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Remainder of `f` modulo the non-zero polynomial `g`.
    pub fn rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
        let g = trim(g.to_vec());
        let mut r = trim(f.to_vec());
        let dg = g.len() - 1;
        let lead_inv = inv_mod(g[dg], p);
        while r.len() > dg {
            let dr = r.len() - 1;
            let factor = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &gc) in g.iter().enumerate() {
                let idx = dr - dg + i;
                let sub = (factor as u64 * gc as u64 % p as u64) as u32;
                r[idx] = (r[idx] + p - sub) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; f.len() + g.len() - 1];
        for (i, &a) in f.iter().enumerate() {
            for (j, &b) in g.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    /// The monic polynomial of degree `deg` whose lower coefficients are the
    /// base-`p` digits of `index` (c_0 least significant).
    pub fn monic_from_index(mut index: u32, deg: u32, p: u32) -> Vec<u32> {
        let mut f = Vec::with_capacity(deg as usize + 1);
        for _ in 0..deg {
            f.push(index % p);
            index /= p;
        }
        f.push(1);
        f
    }

    /// Trial division by every monic polynomial of degree 1..=deg/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = (f.len() - 1) as u32;
        for k in 1..=deg / 2 {
            for idx in 0..p.pow(k) {
                let g = monic_from_index(idx, k, p);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// The lexicographically least monic irreducible polynomial of degree `n`
/// over GF(p), little-endian.
pub fn least_irreducible(p: u32, n: u32) -> Vec<u32> {
    (0..p.pow(n))
        .map(|idx| poly::monic_from_index(idx, n, p))
        .find(|f| poly::is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl FieldInner {
    fn new(p: u32, n: u32, q: u32) -> FieldInner {
        let modulus = least_irreducible(p, n);
        let qs = q as usize;

        let digits = |mut v: usize| -> Vec<u32> {
            let mut d = Vec::with_capacity(n as usize);
            for _ in 0..n {
                d.push((v % p as usize) as u32);
                v /= p as usize;
            }
            d
        };
        let encode = |d: &[u32]| -> usize { d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize) };

        let mut add = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        let all_digits: Vec<Vec<u32>> = (0..qs).map(digits).collect();
        for a in 0..qs {
            neg[a] = encode(&all_digits[a].iter().map(|&c| (p - c) % p).collect::<Vec<_>>()) as u16;
            for b in 0..qs {
                let s: Vec<u32> = all_digits[a].iter().zip(&all_digits[b]).map(|(&x, &y)| (x + y) % p).collect();
                add[a * qs + b] = encode(&s) as u16;
            }
        }

        let mulmod = |x: usize, y: usize| -> usize {
            let prod = poly::mul(&poly::trim(all_digits[x].clone()), &poly::trim(all_digits[y].clone()), p);
            let mut r = if prod.is_empty() { prod } else { poly::rem(&prod, &modulus, p) };
            r.resize(n as usize, 0);
            encode(&r)
        };

        // Scan for a primitive element; its existence witnesses cyclicity of
        // the multiplicative group.
        let mut found = None;
        for g in 1..qs {
            let mut powers = Vec::with_capacity(qs - 1);
            let mut x = 1usize;
            loop {
                powers.push(x as u16);
                x = mulmod(x, g);
                if x == 1 {
                    break;
                }
            }
            if powers.len() == qs - 1 {
                found = Some((g, powers));
                break;
            }
        }
        let (generator, powers) = found.expect("multiplicative group of a finite field is cyclic");
        let mut exp = powers.clone();
        exp.extend_from_slice(&powers);
        let mut log = vec![0u32; qs];
        for (k, &v) in powers.iter().enumerate() {
            log[v as usize] = k as u32;
        }

        FieldInner { p, n, q, modulus, add, neg, exp, log, generator: Elem(generator as u16) }
    }
}

impl Field {
    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.inner.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// `gcd(2, q - 1)`.
    #[inline]
    pub fn e(&self) -> u32 {
        if self.inner.p == 2 {
            1
        } else {
            2
        }
    }

    /// Coefficients of the monic modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn modulus_string(&self) -> String {
        poly_to_string(&self.inner.modulus)
    }

    pub fn generator(&self) -> Elem {
        self.inner.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.inner.q as u16).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.inner.q as u16).map(Elem)
    }

    /// The element `c` of the prime subfield, for `0 <= c < p`.
    pub fn from_int(&self, c: i64) -> Elem {
        Elem(c.rem_euclid(self.inner.p as i64) as u16)
    }

    /// Element with the given index in the total order.
    pub fn elem(&self, index: u32) -> Option<Elem> {
        (index < self.inner.q).then_some(Elem(index as u16))
    }

    /// Coefficients `c_0, ..., c_{n-1}` of the reduced representative.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let p = self.inner.p;
        let mut v = a.0 as u32;
        (0..self.inner.n)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    /// Polynomial notation in the variable `x`, e.g. `x^2+2x+1`.
    pub fn format(&self, a: Elem) -> String {
        let mut c = self.coeffs(a);
        c.push(0);
        let s = poly_to_string(&poly::trim(c));
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.inner.add[a.index() * self.inner.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.inner.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        let i = self.inner.log[a.index()] + self.inner.log[b.index()];
        Elem(self.inner.exp[i as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let m = self.inner.q - 1;
        Ok(Elem(self.inner.exp[((m - self.inner.log[a.index()]) % m) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for a non-negative exponent; `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let m = (self.inner.q - 1) as u64;
        let l = (self.inner.log[a.index()] as u64 * (e % m)) % m;
        Elem(self.inner.exp[l as usize])
    }

    /// `a^e` for any integer exponent; negative powers of zero fail.
    pub fn powi(&self, a: Elem, e: i64) -> Result<Elem, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Discrete logarithm to the base [`Field::generator`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.inner.log[a.index()])
    }

    pub fn exp(&self, k: u64) -> Elem {
        Elem(self.inner.exp[(k % (self.inner.q as u64 - 1)) as usize])
    }

    /// Multiplicative order of a non-zero element.
    pub fn mult_order(&self, a: Elem) -> Option<u64> {
        let l = self.log(a)? as u64;
        let m = (self.inner.q - 1) as u64;
        Some(m / gcd(l, m))
    }

    /// Membership in the squares `F_q^{x2}`. Zero counts as a square.
    pub fn is_square(&self, a: Elem) -> bool {
        match self.log(a) {
            None => true,
            Some(l) => self.inner.p == 2 || l % 2 == 0,
        }
    }

    /// A square root of `a`, if one exists.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        let l = match self.log(a) {
            None => return Some(Elem::ZERO),
            Some(l) => l as u64,
        };
        let m = (self.inner.q - 1) as u64;
        if self.inner.p == 2 {
            // 2 * (q/2) = q = 1 mod (q-1)
            Some(self.exp(l * (self.inner.q as u64 / 2) % m))
        } else if l % 2 == 0 {
            Some(self.exp(l / 2))
        } else {
            None
        }
    }

    /// Non-zero squares in increasing order.
    pub fn squares(&self) -> Vec<Elem> {
        self.nonzero().filter(|&a| self.is_square(a)).collect()
    }

    /// Least non-square, for odd `q`.
    pub fn least_nonsquare(&self) -> Option<Elem> {
        self.nonzero().find(|&a| !self.is_square(a))
    }

    /// Least element of the coset `a * F_q^{x2}`.
    pub fn square_class_rep(&self, a: Elem) -> Elem {
        if a.is_zero() {
            return Elem::ZERO;
        }
        if self.is_square(a) {
            Elem::ONE
        } else {
            self.least_nonsquare().expect("odd field has non-squares")
        }
    }

    pub fn cmp_elems(&self, a: Elem, b: Elem) -> Ordering {
        a.cmp(&b)
    }

    /// Wraps an element together with its field.
    pub fn element(&self, a: Elem) -> FieldElement {
        FieldElement { field: self.clone(), value: a }
    }

    /// The Frobenius powers `x -> x^(p^k)`, `k = 0..n`.
    pub fn galois_automorphisms(&self) -> Vec<FrobeniusMap> {
        (0..self.inner.n).map(|k| FrobeniusMap { k, n: self.inner.n, p: self.inner.p }).collect()
    }

    /// Whether GF(q0) is a subfield, i.e. `q0 = p^d` with `d | n`.
    pub fn has_subfield(&self, q0: u32) -> bool {
        match prime_power(q0) {
            Some((p0, d)) => p0 == self.inner.p && self.inner.n.is_multiple_of(d),
            None => false,
        }
    }

    /// Orders of all subfields, increasing.
    pub fn subfield_orders(&self) -> Vec<u32> {
        (1..=self.inner.n).filter(|d| self.inner.n.is_multiple_of(*d)).map(|d| self.inner.p.pow(d)).collect()
    }

    /// Elements of the subfield of order `q0`: the roots of `x^q0 - x`.
    pub fn subfield_elements(&self, q0: u32) -> Result<Vec<Elem>, FieldError> {
        if !self.has_subfield(q0) {
            return Err(FieldError::NotSubfield { sub: q0, q: self.inner.q });
        }
        Ok(self.elements().filter(|&a| self.pow(a, q0 as u64) == a).collect())
    }

    pub fn in_subfield(&self, a: Elem, q0: u32) -> bool {
        self.has_subfield(q0) && self.pow(a, q0 as u64) == a
    }

    /// Smallest subfield containing `a`.
    pub fn generated_subfield_order(&self, a: Elem) -> u32 {
        self.subfield_orders().into_iter().find(|&q0| self.pow(a, q0 as u64) == a).expect("a lies in the full field")
    }

    /// Evaluates a polynomial with coefficients in GF(p) at `x`.
    pub fn eval_prime_poly(&self, coeffs: &[u32], x: Elem) -> Elem {
        coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| self.add(self.mul(acc, x), self.from_int(c as i64)))
    }

    /// Embedding of `sub` into `self`: `table[i]` is the image of the element
    /// of `sub` with index `i`. The generator `x` of `sub` goes to the least
    /// root of `sub`'s modulus in `self`.
    pub fn embedding_of(&self, sub: &Field) -> Result<Vec<Elem>, FieldError> {
        if sub.p() != self.p() || !self.has_subfield(sub.q()) {
            return Err(FieldError::NotSubfield { sub: sub.q(), q: self.q() });
        }
        let root = self
            .elements()
            .find(|&x| self.eval_prime_poly(sub.modulus(), x).is_zero())
            .expect("modulus of a subfield splits in the extension");
        Ok(sub.elements().map(|a| self.eval_prime_poly(&sub.coeffs(a), root)).collect())
    }
}

/// `x -> x^(p^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrobeniusMap {
    pub k: u32,
    n: u32,
    p: u32,
}

impl FrobeniusMap {
    pub fn apply(&self, field: &Field, a: Elem) -> Elem {
        field.pow(a, (self.p as u64).pow(self.k))
    }

    pub fn compose(&self, other: &FrobeniusMap) -> FrobeniusMap {
        FrobeniusMap { k: (self.k + other.k) % self.n, n: self.n, p: self.p }
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0
    }
}

/// A field element bundled with its field, for callers that want checked
/// mixed-field arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in GF({})", self.field.format(self.value), self.field.q())
    }
}

impl FieldElement {
    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields(self.field.q(), other.field.q()))
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.field.element(self.field.add(self.value, other.value)))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same_field(other)?;
        Ok(self.field.element(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.field.element(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        Ok(self.field.element(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement, FieldError> {
        Ok(self.field.element(self.field.powi(self.value, e)?))
    }

    pub fn is_square(&self) -> bool {
        self.field.is_square(self.value)
    }

    /// Lexicographic comparison of coefficient vectors, highest degree first.
    pub fn total_order_cmp(&self, other: &FieldElement) -> Result<Ordering, FieldError> {
        self.same_field(other)?;
        Ok(self.value.cmp(&other.value))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn poly_to_string(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{i}"),
        });
    }
    terms.join("+")
}
