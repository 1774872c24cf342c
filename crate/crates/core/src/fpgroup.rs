//! Finitely presented groups: a presentation parser and Todd-Coxeter coset
//! enumeration, enough to realize small groups such as the 2160-element
//! Schur cover of A6 and to analyse them through their regular
//! permutation representation.
//!
//! # Presentation syntax
//!
//! ```text
//! < a, b | a^2, b^3, (a b)^5 >
//! ```
//!
//! Generators are a letter followed by optional digits (`a`, `g1`, `z`), so
//! `ab` reads as `a b`. A relator is a product of factors separated by
//! spaces or `*`; a factor is a generator, `1`, a parenthesized word or a
//! commutator `[u, v]` (meaning `u^-1 v^-1 u v`, left-normed for more
//! entries), optionally raised to `^n`, `^-n` or `^(-n)`. A relation `u = v`
//! stands for `u v^-1`. Angle brackets are optional and `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::finite::{FiniteGroup, GroupError, MAX_TABLE_ORDER};

/// Default bound on coset table rows, counting rows later found redundant.
pub const DEFAULT_COSET_LIMIT: usize = 1_000_000;

/// Degree bound for the table-free analysis of a regular representation.
pub const MAX_ANALYSIS_DEGREE: usize = 10_000;

/// Robertson's two-generator presentation of the Schur cover of A6.
pub const A6_COVER_ROBERTSON: &str = include_str!("../presentations/a6cover_robertson.txt");
/// Schur's presentation of the same group; `z` generates the centre.
pub const A6_COVER_SCHUR: &str = include_str!("../presentations/a6cover_schur.txt");
/// The (2,3,5) triangle presentation of A5.
pub const A5_TRIANGLE: &str = include_str!("../presentations/a5_triangle.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unknown generator `{symbol}` at offset {pos}")]
    UnknownSymbol { symbol: String, pos: usize },
    #[error("malformed exponent at offset {pos}")]
    MalformedExponent { pos: usize },
    #[error("unbalanced bracket at offset {pos}")]
    UnbalancedBracket { pos: usize },
    #[error("duplicate generator `{symbol}` at offset {pos}")]
    DuplicateGenerator { symbol: String, pos: usize },
    #[error("unexpected {found} at offset {pos}")]
    Unexpected { found: String, pos: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("coset enumeration exceeded {limit} rows")]
    LimitExceeded { limit: usize },
    #[error("coset table is incomplete")]
    IncompleteTable,
    #[error("the regular representation needs the trivial subgroup; index is {index}")]
    NotRegular { index: usize },
    #[error("degree {degree} exceeds {bound}")]
    TooLarge { degree: usize, bound: usize },
    #[error("centre of order {order} is not cyclic")]
    NonCyclicCentre { order: usize },
    #[error("{n} does not divide the centre order {centre}")]
    BadDivisor { n: usize, centre: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A word in the generators: `+k` is generator `k-1`, `-k` its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Word {
        Word(vec![i as i32 + 1])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Appends with free cancellation.
    pub fn push(&mut self, l: i32) {
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..e.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// Coset table column: generator `i` is `2i`, its inverse `2i+1`.
    fn columns(&self) -> Vec<usize> {
        self.0.iter().map(|&l| column(l)).collect()
    }
}

fn column(l: i32) -> usize {
    let g = (l.unsigned_abs() - 1) as usize;
    if l > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < w.0.len() {
            let l = w.0[i];
            let mut j = i;
            while j < w.0.len() && w.0[j] == l {
                j += 1;
            }
            let name = &self.generators[(l.unsigned_abs() - 1) as usize];
            let e = (j - i) as i64 * l.signum() as i64;
            parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
            i = j;
        }
        parts.join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        let toks = lex(text)?;
        let mut p = Parser { toks: &toks, i: 0, gens: &self.generators };
        let w = p.word()?;
        p.expect_end()?;
        Ok(w)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        write!(f, "< {} | {} >", self.generators.join(", "), rels.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c == '#' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
        } else if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_alphabetic() {
            chars.next();
            let mut s = c.to_string();
            while let Some(&(_, d)) = chars.peek().filter(|(_, d)| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek().filter(|(_, d)| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            let v = s.parse().map_err(|_| ParseError::MalformedExponent { pos })?;
            out.push((Tok::Int(v), pos));
        } else if "^-()[],|*<>=".contains(c) {
            chars.next();
            out.push((Tok::Sym(c), pos));
        } else {
            return Err(ParseError::Unexpected { found: format!("`{c}`"), pos });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    i: usize,
    gens: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or_else(|| self.toks.last().map_or(0, |t| t.1 + 1), |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> ParseError {
        let found = match self.peek() {
            None => "end of input".into(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Int(v)) => format!("`{v}`"),
            Some(Tok::Sym(c)) => format!("`{c}`"),
        };
        ParseError::Unexpected { found, pos: self.pos() }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(Tok::Sym(')' | ']')) => Err(ParseError::UnbalancedBracket { pos: self.pos() }),
            _ => Err(self.unexpected()),
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Int(_) | Tok::Sym('(' | '[')))
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut w = Word::identity();
        loop {
            self.eat('*');
            if !self.starts_factor() {
                return Err(self.unexpected());
            }
            w = w.mul(&self.factor()?);
            if !(self.starts_factor() || self.peek() == Some(&Tok::Sym('*'))) {
                return Ok(w);
            }
        }
    }

    /// A relator, or a relation `u = v` read as `u v^-1`.
    fn relator(&mut self) -> Result<Word, ParseError> {
        let w = self.word()?;
        if self.eat('=') {
            let v = self.word()?;
            return Ok(w.mul(&v.inverse()));
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let pos = self.pos();
        let base = match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.i += 1;
                let g = self.gens.iter().position(|x| *x == s).ok_or(ParseError::UnknownSymbol { symbol: s, pos })?;
                Word::generator(g)
            }
            Some(Tok::Int(1)) => {
                self.i += 1;
                Word::identity()
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let w = self.word()?;
                if !self.eat(')') {
                    return Err(ParseError::UnbalancedBracket { pos });
                }
                w
            }
            Some(Tok::Sym('[')) => {
                self.i += 1;
                let mut w = self.word()?;
                if !self.eat(',') {
                    return Err(ParseError::UnbalancedBracket { pos });
                }
                loop {
                    let v = self.word()?;
                    w = w.commutator(&v);
                    if !self.eat(',') {
                        break;
                    }
                }
                if !self.eat(']') {
                    return Err(ParseError::UnbalancedBracket { pos });
                }
                w
            }
            _ => return Err(self.unexpected()),
        };
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let pos = self.pos();
        let paren = self.eat('(');
        let neg = self.eat('-');
        let Some(Tok::Int(v)) = self.peek().cloned() else {
            return Err(ParseError::MalformedExponent { pos });
        };
        self.i += 1;
        if paren && !self.eat(')') {
            return Err(ParseError::UnbalancedBracket { pos });
        }
        Ok(if neg { -v } else { v })
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let toks = lex(text)?;
    let open = toks.first().map(|t| &t.0) == Some(&Tok::Sym('<'));
    let mut i = usize::from(open);
    let mut generators: Vec<String> = Vec::new();
    while let Some((Tok::Ident(s), pos)) = toks.get(i) {
        if generators.contains(s) {
            return Err(ParseError::DuplicateGenerator { symbol: s.clone(), pos: *pos });
        }
        generators.push(s.clone());
        i += 1;
        if toks.get(i).map(|t| &t.0) == Some(&Tok::Sym(',')) {
            i += 1;
        } else {
            break;
        }
    }
    let mut p = Parser { toks: &toks, i, gens: &generators };
    if generators.is_empty() {
        return Err(p.unexpected());
    }
    let mut relators = Vec::new();
    if p.eat('|') {
        while p.starts_factor() || p.peek() == Some(&Tok::Sym('*')) {
            relators.push(p.relator()?);
            if !p.eat(',') {
                break;
            }
        }
    }
    if open && !p.eat('>') {
        return Err(ParseError::UnbalancedBracket { pos: p.pos() });
    }
    if !open && p.peek() == Some(&Tok::Sym('>')) {
        return Err(ParseError::UnbalancedBracket { pos: p.pos() });
    }
    p.expect_end()?;
    Ok(Presentation { generators, relators })
}

const NONE: u32 = u32::MAX;

/// A complete coset table: `action[c][col]` for generator columns `2i`
/// and inverse columns `2i+1`. Coset 0 is the subgroup itself and cosets
/// are numbered in breadth-first order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    ngens: usize,
    rows: Vec<Vec<u32>>,
    /// Rows defined during enumeration, including redundant ones.
    pub total_defined: usize,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.rows.len()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn act(&self, coset: usize, col: usize) -> usize {
        self.rows[coset][col] as usize
    }

    /// Action of generator `g` as a permutation of cosets.
    pub fn permutation(&self, g: usize) -> Vec<usize> {
        self.rows.iter().map(|r| r[2 * g] as usize).collect()
    }

    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        w.columns().into_iter().fold(coset, |c, col| self.act(c, col))
    }

    /// Every relator returns every coset to itself.
    pub fn is_closed_under(&self, p: &Presentation) -> bool {
        (0..self.index()).all(|c| p.relators.iter().all(|r| self.trace(c, r) == c))
    }
}

struct Enumerator<'a> {
    rels: Vec<Vec<usize>>,
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    queue: Vec<u32>,
    limit: usize,
    p: &'a Presentation,
}

impl Enumerator<'_> {
    fn rows(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.ncols + x]
    }

    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.ncols + x] = d;
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn new_row(&mut self) -> Result<u32, FpError> {
        if self.rows() >= self.limit {
            return Err(FpError::LimitExceeded { limit: self.limit });
        }
        let c = self.rows() as u32;
        self.parent.push(c);
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        Ok(c)
    }

    fn define(&mut self, c: u32, x: usize) -> Result<(), FpError> {
        let d = self.new_row()?;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.ncols {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.set(d, x ^ 1, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                if self.get(mu, x) != NONE {
                    let t = self.get(mu, x);
                    self.merge(nu, t);
                } else if self.get(nu, x ^ 1) != NONE {
                    let t = self.get(nu, x ^ 1);
                    self.merge(mu, t);
                } else {
                    self.set(mu, x, nu);
                    self.set(nu, x ^ 1, mu);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Result<(), FpError> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, w[j as usize] ^ 1) != NONE {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if i as isize == j {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn finish(self) -> CosetTable {
        let ngens = self.p.generators.len();
        // renumber live cosets in breadth-first order from coset 0
        let mut number = vec![NONE; self.rows()];
        let mut order = vec![0u32];
        number[0] = 0;
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            for x in 0..self.ncols {
                let d = self.get(c, x);
                if number[d as usize] == NONE {
                    number[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
            k += 1;
        }
        let rows = order.iter().map(|&c| (0..self.ncols).map(|x| number[self.get(c, x) as usize]).collect()).collect();
        CosetTable { ngens, rows, total_defined: self.rows() }
    }
}

/// Coset enumeration (HLT strategy) for the subgroup generated by
/// `subgroup` in the group presented by `p`.
pub fn todd_coxeter(p: &Presentation, subgroup: &[Word], limit: usize) -> Result<CosetTable, FpError> {
    let ncols = 2 * p.generators.len();
    let mut rels: Vec<Vec<usize>> = p.relators.iter().filter(|r| !r.is_empty()).map(Word::columns).collect();
    // also every cyclic conjugate is a relator; HLT only needs the words
    rels.dedup();
    let mut e = Enumerator { rels, ncols, table: Vec::new(), parent: Vec::new(), queue: Vec::new(), limit, p };
    e.new_row()?;
    for h in subgroup {
        e.scan_and_fill(0, &h.columns())?;
    }
    let mut c = 0u32;
    while (c as usize) < e.rows() {
        for r in 0..e.rels.len() {
            if !e.live(c) {
                break;
            }
            let w = std::mem::take(&mut e.rels[r]);
            let res = e.scan_and_fill(c, &w);
            e.rels[r] = w;
            res?;
        }
        if e.live(c) {
            for x in 0..ncols {
                if e.get(c, x) == NONE {
                    e.define(c, x)?;
                }
            }
        }
        c += 1;
    }
    Ok(e.finish())
}

/// The regular representation: one coset per element. Element `c` is the
/// group element carrying coset 0 to coset `c`.
#[derive(Clone, Debug)]
pub struct RegularGroup {
    pub presentation: Presentation,
    pub table: CosetTable,
    /// `(parent, column)` in the breadth-first spanning tree.
    tree: Vec<(u32, u8)>,
    /// `left[col][c]`: the element `x * c` for the generator or inverse `x`.
    left: Vec<Vec<u32>>,
}

impl RegularGroup {
    /// Enumerates cosets of the trivial subgroup.
    pub fn realize(p: &Presentation, limit: usize) -> Result<RegularGroup, FpError> {
        let t = todd_coxeter(p, &[], limit)?;
        RegularGroup::from_table(p.clone(), t)
    }

    pub fn from_table(presentation: Presentation, table: CosetTable) -> Result<RegularGroup, FpError> {
        if !table.is_closed_under(&presentation) {
            return Err(FpError::IncompleteTable);
        }
        let n = table.index();
        let ncols = 2 * table.ngens();
        let mut tree = vec![(NONE, 0u8); n];
        let mut order = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            for x in 0..ncols {
                let d = table.act(c, x);
                if !seen[d] {
                    seen[d] = true;
                    tree[d] = (c as u32, x as u8);
                    order.push(d);
                }
            }
            k += 1;
        }
        // x * c = (x * parent) * step
        let left = (0..ncols)
            .map(|x| {
                let mut row = vec![NONE; n];
                row[0] = table.act(0, x) as u32;
                for &c in &order[1..] {
                    let (p, col) = tree[c];
                    row[c] = table.act(row[p as usize] as usize, col as usize) as u32;
                }
                row
            })
            .collect();
        let g = RegularGroup { presentation, table, tree, left };
        // a regular table has trivial point stabilizers
        for x in 0..g.table.ngens() {
            if (0..n).any(|c| g.mul(g.generator(x), c) != g.left[2 * x][c] as usize) {
                return Err(FpError::NotRegular { index: n });
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.table.index()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generator(&self, g: usize) -> usize {
        self.table.act(0, 2 * g)
    }

    /// Columns spelling element `c` from the identity.
    pub fn word_columns(&self, mut c: usize) -> Vec<usize> {
        let mut cols = Vec::new();
        while c != 0 {
            let (p, x) = self.tree[c];
            cols.push(x as usize);
            c = p as usize;
        }
        cols.reverse();
        cols
    }

    pub fn element_word(&self, c: usize) -> Word {
        Word(
            self.word_columns(c)
                .into_iter()
                .map(|x| if x % 2 == 0 { x as i32 / 2 + 1 } else { -(x as i32 / 2 + 1) })
                .collect(),
        )
    }

    pub fn element_of(&self, w: &Word) -> usize {
        self.table.trace(0, w)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.word_columns(b).into_iter().fold(a, |c, x| self.table.act(c, x))
    }

    pub fn pow(&self, a: usize, e: usize) -> usize {
        (0..e).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `x^-1 c x` for the generator column `x`.
    pub fn conj_by(&self, c: usize, x: usize) -> usize {
        self.table.act(self.left[x ^ 1][c] as usize, x)
    }

    /// Subgroup generated by `gens`, closed under right multiplication.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let n = self.order();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut out = vec![0usize];
        let mut k = 0;
        while k < out.len() {
            let c = out[k];
            for &g in gens {
                let d = self.mul(c, g);
                if !seen[d] {
                    seen[d] = true;
                    out.push(d);
                }
            }
            k += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let ncols = 2 * self.table.ngens();
        let mut class = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if class[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            class[s] = id;
            let mut orbit = vec![s];
            let mut k = 0;
            while k < orbit.len() {
                for x in (0..ncols).step_by(2) {
                    let d = self.conj_by(orbit[k], x);
                    if class[d] == usize::MAX {
                        class[d] = id;
                        orbit.push(d);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn center(&self) -> Vec<usize> {
        let ncols = 2 * self.table.ngens();
        (0..self.order()).filter(|&c| (0..ncols).step_by(2).all(|x| self.conj_by(c, x) == c)).collect()
    }

    /// Normal closure of the commutators of the generators.
    pub fn derived_subgroup(&self) -> Vec<usize> {
        let k = self.table.ngens();
        let gens: Vec<usize> = (0..k).map(|i| self.generator(i)).collect();
        let mut seeds = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let w = Word::generator(i).commutator(&Word::generator(j));
                seeds.push(self.element_of(&w));
            }
        }
        let mut sub = self.subgroup(&seeds);
        loop {
            let extra: Vec<usize> = seeds
                .iter()
                .flat_map(|&s| (0..k).map(move |x| (s, 2 * x)))
                .map(|(s, x)| self.conj_by(s, x))
                .filter(|d| sub.binary_search(d).is_err())
                .collect();
            if extra.is_empty() {
                break;
            }
            seeds.extend(extra);
            sub = self.subgroup(&seeds);
        }
        let _ = gens;
        sub
    }

    /// Multiplication table, for groups small enough to tabulate.
    pub fn to_finite_group(&self) -> Result<FiniteGroup, FpError> {
        let n = self.order();
        if n > MAX_TABLE_ORDER {
            return Err(FpError::TooLarge { degree: n, bound: MAX_TABLE_ORDER });
        }
        let mut bfs: Vec<usize> = (1..n).collect();
        bfs.sort_by_key(|&c| self.word_columns(c).len());
        let mut table = vec![0u16; n * n];
        for a in 0..n {
            table[a * n] = a as u16;
            for &b in &bfs {
                let (p, x) = self.tree[b];
                table[a * n + b] = self.table.act(table[a * n + p as usize] as usize, x as usize) as u16;
            }
        }
        Ok(FiniteGroup::from_table(n, table)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub representative: usize,
    pub size: usize,
    pub element_order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupAnalysis {
    pub order: usize,
    pub centre: Vec<usize>,
    pub centre_cyclic: bool,
    pub derived_order: usize,
    pub classes: Vec<ClassSummary>,
    /// Class size -> number of classes of that size.
    pub class_sizes: BTreeMap<usize, usize>,
}

pub fn perm_group_analysis(g: &RegularGroup) -> Result<GroupAnalysis, FpError> {
    if g.order() > MAX_ANALYSIS_DEGREE {
        return Err(FpError::TooLarge { degree: g.order(), bound: MAX_ANALYSIS_DEGREE });
    }
    let centre = g.center();
    let centre_cyclic = centre.iter().any(|&z| g.element_order(z) == centre.len());
    let classes: Vec<ClassSummary> = g
        .conjugacy_classes()
        .into_iter()
        .map(|c| ClassSummary { representative: c[0], size: c.len(), element_order: g.element_order(c[0]) })
        .collect();
    let mut class_sizes = BTreeMap::new();
    for c in &classes {
        *class_sizes.entry(c.size).or_insert(0) += 1;
    }
    Ok(GroupAnalysis {
        order: g.order(),
        centre,
        centre_cyclic,
        derived_order: g.derived_subgroup().len(),
        classes,
        class_sizes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientClass {
    pub size: usize,
    pub element_order: usize,
    /// Classes of the covering group mapping onto this class.
    pub preimages: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralQuotient {
    pub n: usize,
    pub order: usize,
    /// The central subgroup of order `n`.
    pub kernel: Vec<usize>,
    pub classes: Vec<QuotientClass>,
    pub class_sizes: BTreeMap<usize, usize>,
    /// For each class of the covering group, its image class.
    pub class_map: Vec<usize>,
}

impl CentralQuotient {
    /// `(preimage class size, image class size)` -> number of preimage
    /// classes.
    pub fn fibration(&self, a: &GroupAnalysis) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for (i, c) in a.classes.iter().enumerate() {
            *out.entry((c.size, self.classes[self.class_map[i]].size)).or_insert(0) += 1;
        }
        out
    }
}

/// The quotient by the unique central subgroup of order `n`, described by
/// the images of the conjugacy classes.
pub fn central_quotient(g: &RegularGroup, a: &GroupAnalysis, n: usize) -> Result<CentralQuotient, FpError> {
    let z = a.centre.len();
    if !a.centre_cyclic {
        return Err(FpError::NonCyclicCentre { order: z });
    }
    if n == 0 || !z.is_multiple_of(n) {
        return Err(FpError::BadDivisor { n, centre: z });
    }
    let gen = *a.centre.iter().find(|&&c| g.element_order(c) == z).expect("cyclic centre");
    let kernel = g.subgroup(&[g.pow(gen, z / n)]);
    let mut in_kernel = vec![false; g.order()];
    for &k in &kernel {
        in_kernel[k] = true;
    }
    let mut class_of = vec![0usize; g.order()];
    let all = g.conjugacy_classes();
    for (i, c) in all.iter().enumerate() {
        for &x in c {
            class_of[x] = i;
        }
    }
    // classes C and Ck (k central) have the same image
    let mut class_map = vec![usize::MAX; all.len()];
    let mut classes: Vec<QuotientClass> = Vec::new();
    for i in 0..all.len() {
        if class_map[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut pre: Vec<usize> = kernel.iter().map(|&k| class_of[g.mul(all[i][0], k)]).collect();
        pre.sort_unstable();
        pre.dedup();
        for &j in &pre {
            class_map[j] = id;
        }
        let size = pre.iter().map(|&j| all[j].len()).sum::<usize>() / n;
        let r = all[i][0];
        let mut x = r;
        let mut o = 1;
        while !in_kernel[x] {
            x = g.mul(x, r);
            o += 1;
        }
        classes.push(QuotientClass { size, element_order: o, preimages: pre });
    }
    let mut class_sizes = BTreeMap::new();
    for c in &classes {
        *class_sizes.entry(c.size).or_insert(0) += 1;
    }
    Ok(CentralQuotient { n, order: g.order() / n, kernel, classes, class_sizes, class_map })
}

/// Breadth-first coset counts are handy for reports.
pub fn coset_summary(t: &CosetTable) -> (usize, usize) {
    (t.index(), t.total_defined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_triangle_presentation() {
        let p = parse_presentation("a, b | a^2, b^3, (ab)^5").unwrap();
        assert_eq!(p.generators, vec!["a", "b"]);
        assert_eq!(p.relators.len(), 3);
        assert_eq!(p.relators[2], Word(vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2]));
        let q = parse_presentation(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn commutators_and_exponents() {
        let p = parse_presentation("<a | [a,a]>").unwrap();
        assert!(p.relators[0].is_empty());
        assert_eq!(p.to_string(), "< a | 1 >");
        let p = parse_presentation("x, y | [x, y], x^(-2) y^-1 = 1, x*y*x").unwrap();
        assert_eq!(p.relators[0], Word(vec![-1, -2, 1, 2]));
        assert_eq!(p.relators[1], Word(vec![-1, -1, -2]));
        assert_eq!(p.relators[2], Word(vec![1, 2, 1]));
        let r = parse_presentation(A6_COVER_ROBERTSON).unwrap();
        assert_eq!((r.generators.len(), r.relators.len()), (2, 2));
        assert_eq!(r.format_word(&r.relators[0]), "a b^3 a^-1 b^-1 a^-1 b^-1 a^-1 b^-1 a^-1 b^-1");
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_presentation("a, b | a c").unwrap_err(),
            ParseError::UnknownSymbol { symbol: "c".into(), pos: 9 }
        );
        assert_eq!(parse_presentation("a | a^x").unwrap_err(), ParseError::MalformedExponent { pos: 6 });
        assert!(matches!(parse_presentation("a | (a a").unwrap_err(), ParseError::UnbalancedBracket { pos: 4 }));
        assert!(matches!(parse_presentation("a | a)").unwrap_err(), ParseError::UnbalancedBracket { .. }));
        assert!(matches!(parse_presentation("<a | a").unwrap_err(), ParseError::UnbalancedBracket { .. }));
        assert!(matches!(parse_presentation("a, a | a").unwrap_err(), ParseError::DuplicateGenerator { .. }));
    }

    #[test]
    fn enumerates_small_groups() {
        let a5 = parse_presentation(A5_TRIANGLE).unwrap();
        let t = todd_coxeter(&a5, &[], DEFAULT_COSET_LIMIT).unwrap();
        assert_eq!(t.index(), 60);
        assert!(t.is_closed_under(&a5));
        let all: Vec<Word> = (0..2).map(Word::generator).collect();
        assert_eq!(todd_coxeter(&a5, &all, DEFAULT_COSET_LIMIT).unwrap().index(), 1);
        // index of <b> is 20, of <a> is 30
        assert_eq!(todd_coxeter(&a5, &[Word::generator(1)], DEFAULT_COSET_LIMIT).unwrap().index(), 20);
        assert_eq!(todd_coxeter(&a5, &[Word::generator(0)], DEFAULT_COSET_LIMIT).unwrap().index(), 30);
        let c6 = parse_presentation("a | a^6").unwrap();
        assert_eq!(todd_coxeter(&c6, &[], 100).unwrap().index(), 6);
    }

    #[test]
    fn infinite_groups_hit_the_limit() {
        let z2 = parse_presentation("a, b | [a, b]").unwrap();
        assert_eq!(todd_coxeter(&z2, &[], 5000).unwrap_err(), FpError::LimitExceeded { limit: 5000 });
    }

    #[test]
    fn a5_analysis_matches_its_table() {
        let a5 = parse_presentation(A5_TRIANGLE).unwrap();
        let g = RegularGroup::realize(&a5, DEFAULT_COSET_LIMIT).unwrap();
        let a = perm_group_analysis(&g).unwrap();
        let mut sizes: Vec<usize> = a.classes.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
        assert_eq!(a.centre, vec![0]);
        assert_eq!(a.derived_order, 60);
        let fg = g.to_finite_group().unwrap();
        assert!(fg.check_associative());
        let mut oracle: Vec<usize> = fg.conjugacy_classes().iter().map(Vec::len).collect();
        oracle.sort_unstable();
        assert_eq!(oracle, sizes);
        for a in 0..60 {
            for b in [1, 7, 33] {
                assert_eq!(fg.mul(a, b), g.mul(a, b));
            }
        }
    }
}
