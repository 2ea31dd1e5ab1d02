//! Words and chains in BS(M,L) = <a, t | a^M = t a^L t^-1>.
//!
//! A hyperbolic conjugacy class is stored as a tight word
//! `a^{p_1} t^{e_1} ... a^{p_n} t^{e_n}`, read cyclically.

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::Rational;

/// The pair (M, L) with d = gcd(|M|,|L|), m = M/d and l = L/d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub big_m: i64,
    pub big_l: i64,
    pub d: i64,
    pub m: i64,
    pub l: i64,
}

impl GroupParams {
    pub fn new(big_m: i64, big_l: i64) -> Result<Self> {
        if big_m == 0 || big_l == 0 {
            return Err(SclError::InvalidGroup(format!("BS({big_m},{big_l}): M and L must be nonzero")));
        }
        if big_m == i64::MIN || big_l == i64::MIN {
            return Err(SclError::InvalidGroup("parameter out of range".into()));
        }
        let d = big_m.abs().gcd(&big_l.abs());
        Ok(GroupParams { big_m, big_l, d, m: big_m / d, l: big_l / d })
    }

    /// BS(M,L) is solvable when |M| = 1 or |L| = 1, and scl vanishes there.
    pub fn is_solvable(&self) -> bool {
        self.big_m.abs() == 1 || self.big_l.abs() == 1
    }

    /// The ratio m/l carried with its sign.
    pub fn ratio(&self) -> Rational {
        BigRational::new(self.m.into(), self.l.into())
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BS({},{})", self.big_m, self.big_l)
    }
}

/// One letter of an unreduced word: a power of `a` or a power of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A(i64),
    T(i64),
}

/// The block `a^p t^eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub p: i64,
    pub eps: i8,
}

/// A Britton-cyclically-reduced word with at least one t-letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TightWord {
    syllables: Vec<Syllable>,
}

impl TightWord {
    /// Builds a word from syllables, checking that it is tight.
    pub fn from_syllables(syllables: Vec<Syllable>, params: &GroupParams) -> Result<Self> {
        if syllables.is_empty() {
            return Err(SclError::Invalid("a tight word needs a t-letter".into()));
        }
        if syllables.iter().any(|s| s.eps != 1 && s.eps != -1) {
            return Err(SclError::Invalid("t-exponents must be +1 or -1".into()));
        }
        if find_pinch(&syllables, params).is_some() {
            return Err(SclError::Invalid("word admits a Britton pinch".into()));
        }
        Ok(TightWord { syllables })
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// The inverse word, rotated back into the a-block-then-t-letter form.
    pub fn inverse(&self) -> TightWord {
        // (a^p1 t^e1 ... a^pn t^en)^-1 = t^-en a^-pn ... t^-e1 a^-p1,
        // which is conjugate to a^-pn t^-e(n-1) a^-p(n-1) ... a^-p1 t^-en.
        let n = self.syllables.len();
        let syllables = (0..n)
            .map(|k| {
                let i = n - 1 - k;
                let e = self.syllables[(i + n - 1) % n].eps;
                Syllable { p: -self.syllables[i].p, eps: -e }
            })
            .collect();
        TightWord { syllables }
    }

    /// Cyclic rotation by `k` syllables.
    pub fn rotated(&self, k: usize) -> TightWord {
        let mut syllables = self.syllables.clone();
        let n = syllables.len();
        syllables.rotate_left(k % n);
        TightWord { syllables }
    }

    /// Lexicographically least rotation, used to identify conjugate duplicates.
    pub(crate) fn canonical_rotation(&self) -> Vec<Syllable> {
        let n = self.syllables.len();
        (0..n)
            .map(|k| {
                let mut v = self.syllables.clone();
                v.rotate_left(k);
                v
            })
            .min()
            .unwrap_or_default()
    }

    pub fn to_letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.syllables.len());
        for s in &self.syllables {
            if s.p != 0 {
                out.push(Letter::A(s.p));
            }
            out.push(Letter::T(s.eps as i64));
        }
        out
    }
}

impl fmt::Display for TightWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.syllables {
            match s.p {
                0 => {}
                1 => write!(f, "a")?,
                -1 => write!(f, "A")?,
                p => write!(f, "a^{p}")?,
            }
            write!(f, "{}", if s.eps > 0 { "t" } else { "T" })?;
        }
        Ok(())
    }
}

/// Result of cyclic Britton reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduced {
    Tight(TightWord),
    Elliptic(i64),
}

/// Position of a cyclic pinch `t^{e_i} a^{p_j} t^{e_j}` with j = i+1,
/// returned together with the a-power it collapses to.
fn find_pinch(syl: &[Syllable], params: &GroupParams) -> Option<(usize, i64)> {
    let n = syl.len();
    if n < 2 {
        return None;
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let p = syl[j].p;
        match (syl[i].eps, syl[j].eps) {
            (1, -1) if p % params.big_l == 0 => return Some((i, p / params.big_l * params.big_m)),
            (-1, 1) if p % params.big_m == 0 => return Some((i, p / params.big_m * params.big_l)),
            _ => {}
        }
    }
    None
}

/// Cyclically reduces an arbitrary word, applying pinches left to right
/// until none remains.
pub fn britton_cyclic_reduce(word: &[Letter], params: &GroupParams) -> Reduced {
    let mut syl: Vec<Syllable> = Vec::new();
    let mut acc = 0i64;
    for letter in word {
        match *letter {
            Letter::A(p) => acc += p,
            Letter::T(e) => {
                let eps = if e > 0 { 1 } else { -1 };
                for _ in 0..e.unsigned_abs() {
                    syl.push(Syllable { p: acc, eps });
                    acc = 0;
                }
            }
        }
    }
    if syl.is_empty() {
        return Reduced::Elliptic(acc);
    }
    // A trailing a-block is conjugated around to the front.
    syl[0].p += acc;

    while let Some((i, power)) = find_pinch(&syl, params) {
        if syl.len() == 2 {
            let other = syl[i].p;
            return Reduced::Elliptic(other + power);
        }
        syl.rotate_left(i);
        let merged = Syllable { p: syl[0].p + power + syl[2].p, eps: syl[2].eps };
        syl.drain(0..3);
        syl.insert(0, merged);
    }
    Reduced::Tight(TightWord { syllables: syl })
}

/// Sum of the t-exponents.
pub fn h_value(word: &TightWord) -> i64 {
    word.syllables.iter().map(|s| s.eps as i64).sum()
}

/// Maximal a-segment of a tight loop, between two consecutive t-letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub loop_index: usize,
    /// 1-based position within the word.
    pub pos: usize,
    pub winding: i64,
    pub eps_out: i8,
    pub eps_in: i8,
    pub mu: u32,
    pub lambda: u32,
}

/// Arcs of a word, with `mu`/`lambda` read from the t-letter right after each arc.
pub fn arcs(word: &TightWord) -> Vec<Arc> {
    arcs_on_loop(word, 0)
}

fn arcs_on_loop(word: &TightWord, loop_index: usize) -> Vec<Arc> {
    let syl = &word.syllables;
    let n = syl.len();
    (0..n)
        .map(|i| {
            let (mut s, mut hi, mut lo) = (0i64, 0i64, 0i64);
            for k in 0..n {
                s += syl[(i + k) % n].eps as i64;
                hi = hi.max(s);
                lo = lo.min(s);
            }
            Arc {
                loop_index,
                pos: i + 1,
                winding: syl[i].p,
                eps_out: syl[i].eps,
                eps_in: syl[(i + n - 1) % n].eps,
                mu: hi as u32,
                lambda: (-lo) as u32,
            }
        })
        .collect()
}

/// rho(g) = min(max mu, max lambda).
pub fn word_complexity(word: &TightWord) -> u32 {
    let a = arcs(word);
    let mu = a.iter().map(|x| x.mu).max().unwrap_or(0);
    let lambda = a.iter().map(|x| x.lambda).max().unwrap_or(0);
    mu.min(lambda)
}

/// rho(c), the maximum of the word complexities.
pub fn complexity(chain: &Chain) -> u32 {
    chain.terms.iter().map(|t| word_complexity(&t.word)).max().unwrap_or(0)
}

/// s(g) = sum_j u_j (m/l)^{k_j}, defined when h(g) = 0.
pub fn s_value(word: &TightWord, params: &GroupParams) -> Result<Rational> {
    s_value_with_ratio(word, &params.ratio())
}

pub(crate) fn s_value_with_ratio(word: &TightWord, ratio: &Rational) -> Result<Rational> {
    let h = h_value(word);
    if h != 0 {
        return Err(SclError::SUndefined(h));
    }
    let mut total = Rational::zero();
    let mut level = 0i32;
    for s in &word.syllables {
        if s.p != 0 {
            total += Rational::from_integer(s.p.into()) * ratio.pow(level);
        }
        level += s.eps as i32;
    }
    Ok(total)
}

/// True when the cyclic t-exponents strictly alternate.
pub fn is_t_alternating(word: &TightWord) -> bool {
    let syl = &word.syllables;
    let n = syl.len();
    n.is_multiple_of(2) && (0..n).all(|i| syl[i].eps != syl[(i + 1) % n].eps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    #[serde(with = "crate::serde_rational")]
    pub coeff: Rational,
    pub word: TightWord,
}

/// An elliptic summand removed during parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedElliptic {
    #[serde(with = "crate::serde_rational")]
    pub coeff: Rational,
    pub power: i64,
}

impl fmt::Display for DroppedElliptic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.coeff.is_one() {
            write!(f, "{} ", self.coeff)?;
        }
        write!(f, "a^{}", self.power)
    }
}

/// A rational chain c = sum r_i g_i of tight words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub terms: Vec<ChainTerm>,
    pub dropped_elliptic: Vec<DroppedElliptic>,
}

impl Chain {
    /// Merges duplicate (cyclically equal) words and rejects nonpositive coefficients.
    pub fn new(terms: Vec<ChainTerm>) -> Result<Self> {
        let mut merged: Vec<ChainTerm> = Vec::new();
        let mut keys: Vec<Vec<Syllable>> = Vec::new();
        for term in terms {
            if !term.coeff.is_positive() {
                return Err(SclError::NonPositiveCoefficient { position: 0, coeff: term.coeff.to_string() });
            }
            let key = term.word.canonical_rotation();
            match keys.iter().position(|k| *k == key) {
                Some(i) => merged[i].coeff += term.coeff,
                None => {
                    keys.push(key);
                    merged.push(term);
                }
            }
        }
        Ok(Chain { terms: merged, dropped_elliptic: Vec::new() })
    }

    pub fn single(word: TightWord) -> Self {
        Chain { terms: vec![ChainTerm { coeff: Rational::one(), word }], dropped_elliptic: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All arcs of the chain, numbered consecutively loop by loop.
    pub fn arcs(&self) -> Vec<Arc> {
        self.terms.iter().enumerate().flat_map(|(i, t)| arcs_on_loop(&t.word, i)).collect()
    }

    /// Index of the first arc of each loop in `arcs()`, plus the total at the end.
    pub fn arc_offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.terms.len() + 1);
        let mut acc = 0;
        for t in &self.terms {
            out.push(acc);
            acc += t.word.len();
        }
        out.push(acc);
        out
    }

    /// Sum of r_i h(g_i).
    pub fn t_homology(&self) -> Rational {
        self.terms.iter().map(|t| &t.coeff * Rational::from_integer(h_value(&t.word).into())).sum()
    }

    /// Sum of r_i times the a-exponent sum of g_i.
    pub fn a_homology(&self) -> Rational {
        self.terms
            .iter()
            .map(|t| {
                let a: i64 = t.word.syllables.iter().map(|s| s.p).sum();
                &t.coeff * Rational::from_integer(a.into())
            })
            .sum()
    }

    /// Sum of r_i A_i where A_i is the arc count of g_i.
    pub fn weighted_arc_count(&self) -> Rational {
        self.terms.iter().map(|t| &t.coeff * Rational::from_integer(t.word.len().into())).sum()
    }

    /// The chain q*c.
    pub fn scaled(&self, q: &Rational) -> Result<Chain> {
        if !q.is_positive() {
            return Err(SclError::Invalid("scaling factor must be positive".into()));
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = &t.coeff * q;
        }
        for e in &mut out.dropped_elliptic {
            e.coeff = &e.coeff * q;
        }
        Ok(out)
    }

    /// Same words up to rotation with the same coefficients, in any order.
    pub fn equivalent(&self, other: &Chain) -> bool {
        let key = |c: &Chain| {
            let mut v: Vec<(Vec<Syllable>, Rational)> =
                c.terms.iter().map(|t| (t.word.canonical_rotation(), t.coeff.clone())).collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v
        };
        key(self) == key(other)
    }

    /// The union of two chains, merging duplicates.
    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let mut out = Chain::new(terms)?;
        out.dropped_elliptic = self.dropped_elliptic.clone();
        out.dropped_elliptic.extend(other.dropped_elliptic.iter().cloned());
        Ok(out)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if !t.coeff.is_one() {
                write!(f, "{} ", t.coeff)?;
            }
            write!(f, "{}", t.word)?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(SclError::Parse { position: self.pos, message: message.into() })
    }

    fn digits(&mut self) -> Result<num_bigint::BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("validated digits"))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let at = self.pos;
        let v = self.digits()?;
        let v: i64 = match i64::try_from(v) {
            Ok(v) => v,
            Err(_) => return Err(SclError::Parse { position: at, message: "exponent too large".into() }),
        };
        Ok(if neg { -v } else { v })
    }

    fn coefficient(&mut self) -> Result<Option<(usize, Rational)>> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {}
            _ if neg => return self.err("expected a coefficient after '-'"),
            _ => return Ok(None),
        }
        let num = self.digits()?;
        let den = if self.peek() == Some(b'/') {
            self.pos += 1;
            self.digits()?
        } else {
            1.into()
        };
        if den.is_zero() {
            return Err(SclError::Parse { position: start, message: "zero denominator".into() });
        }
        let q = Rational::new(if neg { -num } else { num }, den);
        Ok(Some((start, q)))
    }

    fn word(&mut self) -> Result<Vec<Letter>> {
        let mut letters = Vec::new();
        while let Some(c) = self.peek() {
            let letter = match c {
                b'a' | b'A' | b't' | b'T' => c,
                _ => break,
            };
            self.pos += 1;
            let base = if letter.is_ascii_uppercase() { -1 } else { 1 };
            let exp = if self.peek() == Some(b'^') {
                self.pos += 1;
                self.signed_int()?
            } else {
                1
            };
            let e = base * exp;
            letters.push(if letter.eq_ignore_ascii_case(&b'a') { Letter::A(e) } else { Letter::T(e) });
        }
        if letters.is_empty() {
            return self.err("expected a word over a, A, t, T");
        }
        Ok(letters)
    }
}

/// Parses `term (+ term)*` where a term is an optional rational coefficient
/// followed by a word over a, A, t, T with optional `^` exponents.
pub fn parse_chain(text: &str, params: &GroupParams) -> Result<Chain> {
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut dropped = Vec::new();
    loop {
        let coeff = match cur.coefficient()? {
            Some((at, q)) => {
                if !q.is_positive() {
                    return Err(SclError::NonPositiveCoefficient { position: at, coeff: q.to_string() });
                }
                q
            }
            None => Rational::one(),
        };
        let letters = cur.word()?;
        match britton_cyclic_reduce(&letters, params) {
            Reduced::Tight(word) => terms.push(ChainTerm { coeff, word }),
            Reduced::Elliptic(power) => dropped.push(DroppedElliptic { coeff, power }),
        }
        match cur.peek() {
            None => break,
            Some(b'+') => cur.pos += 1,
            Some(_) => return cur.err("expected '+' or end of input"),
        }
    }
    let mut chain = Chain::new(terms)?;
    chain.dropped_elliptic = dropped;
    Ok(chain)
}

/// Parses a single word and reduces it.
pub fn parse_word(text: &str, params: &GroupParams) -> Result<Reduced> {
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0 };
    let letters = cur.word()?;
    if cur.peek().is_some() {
        return cur.err("trailing input after word");
    }
    Ok(britton_cyclic_reduce(&letters, params))
}
